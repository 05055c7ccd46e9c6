from fractions import Fraction

import pytest

from algtorsion.algebra import AlgebraElement, verify_square_zero
from algtorsion.cylinders import (
    CoefficientConfig,
    assemble_sft_differential,
    automatic_transversality_check,
    count_index1_positive_only,
    enumerate_cylinders,
    reject_branched_cover,
    Cylinder,
    TYPE_INDEX,
)
from algtorsion.errors import ValidationError
from algtorsion.models import no_giroux_surface, sphere_surface, vgk_surface
from algtorsion.orbits import generate_orbits


def model(ds, cover_max=2):
    orbits = generate_orbits(ds, cover_max)
    return orbits, enumerate_cylinders(ds, orbits, cover_max)


class TestEnumerate:
    def test_no_giroux_x1_is_type4(self):
        ds = no_giroux_surface()
        orbits, cylinders = model(ds, 1)
        x1 = next(c for c in cylinders if c.flow_line == "x1")
        assert x1.cyl_type == 4
        assert x1.fredholm_index == 1
        assert not x1.negative_ends
        assert {o.critical_point for o in x1.positive_ends} == {"na0", "pc1a"}

    def test_internal_minus_line_is_type3(self):
        ds = no_giroux_surface()
        orbits, cylinders = model(ds, 1)
        f1 = next(c for c in cylinders if c.flow_line == "f1")
        assert f1.cyl_type == 3 and f1.fredholm_index == 1
        # One positive end at the minimum orbit.
        assert [o.critical_point for o in f1.positive_ends] == ["na0"]
        assert [o.critical_point for o in f1.negative_ends] == ["na1"]

    def test_trivial_cylinders_have_index_zero(self):
        ds = vgk_surface(2, 2)
        orbits, cylinders = model(ds, 2)
        trivial = [c for c in cylinders if c.cyl_type == "trivial"]
        assert len(trivial) == len(orbits)
        assert all(c.fredholm_index == 0 for c in trivial)

    def test_type_index_table_for_all_covers(self):
        ds = no_giroux_surface()
        _, cylinders = model(ds, 3)
        for c in cylinders:
            assert c.fredholm_index == TYPE_INDEX[c.cyl_type]

    def test_sphere_min_to_max_is_type1(self):
        ds = sphere_surface()
        _, cylinders = model(ds, 1)
        x1 = next(c for c in cylinders if c.flow_line == "x1")
        assert x1.cyl_type == 1 and x1.fredholm_index == 2
        assert len(x1.positive_ends) == 2


class TestTransversality:
    def test_type1(self):
        ds = sphere_surface()
        _, cylinders = model(ds, 1)
        x1 = next(c for c in cylinders if c.flow_line == "x1")
        assert automatic_transversality_check(x1)  # ind 2 > -2

    def test_all_flow_line_cylinders_pass(self):
        for make in (no_giroux_surface, lambda: vgk_surface(3, 3)):
            _, cylinders = model(make(), 2)
            for c in cylinders:
                if c.cyl_type != "trivial":
                    assert automatic_transversality_check(c)

    def test_failing_hypothetical(self):
        orbits = generate_orbits(no_giroux_surface(), 1)
        saddle = next(o for o in orbits if o.orbit_kind == "hyperbolic")
        fake = Cylinder(
            flow_line="fake",
            cover=1,
            positive_ends=(saddle,),
            negative_ends=(saddle,),
            cyl_type="trivial",
            fredholm_index=0,
            sign=1,
        )
        assert not automatic_transversality_check(fake)  # 0 > 0 fails

    def test_branched_cover_records_rejected(self):
        with pytest.raises(ValidationError):
            reject_branched_cover(genus=0, positive_ends=2, declared_index=1)
        assert reject_branched_cover(genus=0, positive_ends=2, declared_index=2)


class TestCounts:
    def test_unique_extrema_counts_vanish(self):
        ds = vgk_surface(3, 3)
        orbits, cylinders = model(ds, 2)
        table = count_index1_positive_only(ds, orbits, cylinders, 2, Fraction(5))
        assert table[(0, 1)] == {}  # no one-ended curves
        assert table[(0, 2)], "two-ended rows must be reported"
        for data in table[(0, 2)].values():
            assert data["total"] == 0

    def test_no_giroux_unique_line_counts_one(self):
        ds = no_giroux_surface()
        orbits, cylinders = model(ds, 1)
        table = count_index1_positive_only(ds, orbits, cylinders, 2, Fraction(5))
        key = tuple(sorted(["na0^01", "pc1a^01"]))
        assert table[(0, 2)][key]["total"] == 1

    def test_per_cover_subtotals(self):
        ds = no_giroux_surface()
        orbits, cylinders = model(ds, 2)
        # Double covers carry double action, so widen the window to see them.
        table = count_index1_positive_only(ds, orbits, cylinders, 2, Fraction(8))
        key = tuple(sorted(["na0^02", "pc1a^02"]))
        assert table[(0, 2)][key]["by_cover"] == {2: 1}


class TestAssemble:
    def test_no_giroux_certificate_monomial(self):
        ds = no_giroux_surface()
        orbits, cylinders = model(ds, 1)
        D = assemble_sft_differential(ds, orbits, cylinders)
        e1 = next(o for o in orbits if o.critical_point == "na0").generator()
        s1 = next(o for o in orbits if o.critical_point == "pc1a").generator()
        assert D.apply(AlgebraElement.from_generators((e1, s1))) == AlgebraElement.hbar(1)

    def test_first_order_counts_cancel(self):
        ds = no_giroux_surface()
        orbits, cylinders = model(ds, 2)
        D = assemble_sft_differential(ds, orbits, cylinders)
        assert all(not t.outputs or t.hbar_power for t in D.terms) or not any(
            t.hbar_power == 0 for t in D.terms
        )
        # All surviving terms are the order-two crossing terms.
        assert all(t.hbar_power == 1 and len(t.inputs) == 2 for t in D.terms)

    def test_no_flow_lines_gives_zero_operator(self):
        ds = vgk_surface(2, 2)
        orbits, _ = model(ds, 1)
        D = assemble_sft_differential(ds, orbits, [])
        assert D.is_zero()

    def test_v2k2_square_zero(self):
        ds = vgk_surface(2, 2)
        orbits, cylinders = model(ds, 2)
        D = assemble_sft_differential(ds, orbits, cylinders)
        gens = [o.generator() for o in orbits]
        assert verify_square_zero(D, gens, Fraction(5), 3).ok

    def test_assembled_is_odd_kills_one_decreases_action(self):
        ds = no_giroux_surface()
        orbits, cylinders = model(ds, 2)
        D = assemble_sft_differential(ds, orbits, cylinders)
        assert D.is_odd()
        assert D.apply(AlgebraElement.one()).is_zero()
        for t in D.terms:
            assert t.action_drop() > 0

    def test_cover_weight_convention(self):
        ds = no_giroux_surface()
        orbits, cylinders = model(ds, 2)
        D = assemble_sft_differential(ds, orbits, cylinders, CoefficientConfig())
        cover_terms = [
            t for t in D.terms if any(g.kappa == 2 for g in t.inputs)
        ]
        assert cover_terms and all(abs(t.coeff) == Fraction(1, 2) for t in cover_terms)
