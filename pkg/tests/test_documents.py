from fractions import Fraction

import pytest

from algtorsion import documents
from algtorsion.errors import ValidationError
from algtorsion.models import (
    ech_from_surface_model,
    no_giroux_surface,
    toy_zigzag_complex,
    vgk_surface,
)


class TestParsing:
    def test_exactly_one_payload_required(self):
        with pytest.raises(ValidationError, match="exactly one"):
            documents.parse_document({"truncation": {}})
        with pytest.raises(ValidationError, match="exactly one"):
            documents.parse_document(
                {"surface": {}, "planar_torsion": {}, "truncation": {}}
            )

    def test_unknown_keys_reported_with_locus(self):
        with pytest.raises(ValidationError, match="/"):
            documents.parse_document({"planar_torsion": {"m": 0, "n": 1, "r": 0}, "bogus": 1})

    def test_missing_key_locus(self):
        with pytest.raises(ValidationError, match="/planar_torsion"):
            documents.parse_document({"planar_torsion": {"m": 0}})

    def test_bad_rational(self):
        with pytest.raises(ValidationError, match="rational"):
            documents.parse_document(
                {
                    "planar_torsion": {"m": 0, "n": 1, "r": 0},
                    "truncation": {"action_bound": "one half"},
                }
            )

    def test_surface_validation_errors_carry_locus(self):
        doc = {
            "surface": {
                "plus": {"components": [{"id": "p", "genus": 0, "boundary_circles": ["P1"]}],
                          "critical_points": [{"id": "pm", "component": "p", "index": 0}],
                          "flow_lines": []},
                "minus": {"components": [{"id": "m", "genus": 0, "boundary_circles": ["M1", "M2"]}],
                           "critical_points": [{"id": "mm", "component": "m", "index": 0},
                                                {"id": "ms", "component": "m", "index": 1}],
                           "flow_lines": []},
                "gamma": [],
                "crossing_flow_lines": [],
            }
        }
        with pytest.raises(ValidationError, match="/surface"):
            documents.parse_document(doc)


class TestBundled:
    def test_all_bundled_documents_parse(self):
        names = documents.bundled_names()
        assert {"no_giroux", "v2k2", "v3k2", "v3k3", "planar_k0", "planar_k1",
                "planar_k2", "planar_k3", "ech_overtwisted", "ech_v2k2"} <= set(names)
        for name in names:
            doc, raw = documents.load_bundled(name)
            assert doc.kind in documents.PAYLOAD_KEYS

    def test_unknown_bundled_name(self):
        with pytest.raises(ValidationError, match="available"):
            documents.load_bundled("nope")


class TestRoundTrips:
    def test_surface_round_trip(self):
        ds = no_giroux_surface()
        data = {"surface": documents.surface_to_json(ds)}
        doc = documents.parse_document(data)
        assert documents.surface_to_json(doc.payload) == data["surface"]

    def test_ech_round_trip(self):
        cx = toy_zigzag_complex()
        data = {"ech_complex": documents.ech_complex_to_json(cx)}
        doc = documents.parse_document(data)
        assert documents.ech_complex_to_json(doc.payload) == data["ech_complex"]

    def test_element_round_trip(self):
        from algtorsion.orbits import generate_orbits

        orbits = generate_orbits(vgk_surface(2, 2), 2)
        gens = [o.generator() for o in orbits]
        table = {g.name: g for g in gens}
        from algtorsion.algebra import AlgebraElement

        x = (
            AlgebraElement.from_generators(gens[:2], coeff=Fraction(-3, 7), hbar=2)
            + AlgebraElement.from_generators(gens[3:5])
        )
        blob = documents.element_to_json(x)
        assert documents.element_from_json(blob, table, 0) == x

    def test_digest_is_stable_under_key_order(self):
        a = {"x": 1, "y": [1, 2]}
        b = {"y": [1, 2], "x": 1}
        assert documents.document_digest(a) == documents.document_digest(b)
