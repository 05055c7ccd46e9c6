"""JSON document schema: parsing with pointer-style error loci, canonical
serialization of reports and witnesses, and the bundled corpus loader.

A document carries exactly one payload key (``surface``, ``planar_torsion``
or ``ech_complex``) plus ``truncation`` and ``coefficients`` blocks.
Rationals are written as strings like "5" or "5/2" so round-trips stay
exact.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .algebra import AlgebraElement, Truncation
from .ech import Contribution, ECHComplex, EmbeddedOrbitECH, OrbitSetECH, RelClassData
from .errors import ValidationError
from .surface import (
    CriticalPoint,
    CrossingFlowLine,
    GammaComponent,
    InternalFlowLine,
    SidedSurface,
    SurfaceComponent,
    build_divided_surface,
)
from .torsion import FULLY_TWISTED, TWISTED, UNTWISTED, PlanarTorsionDescriptor

PAYLOAD_KEYS = ("surface", "planar_torsion", "ech_complex")


def parse_fraction(value, locus):
    try:
        if isinstance(value, bool):
            raise ValueError
        if isinstance(value, (int, str)):
            return Fraction(value)
    except (ValueError, ZeroDivisionError):
        pass
    raise ValidationError("expected a rational like 5 or \"5/2\"", locus)


def format_fraction(value):
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else str(value)


def _require(mapping, key, locus, kind=None):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ValidationError(f"missing required key '{key}'", locus)
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise ValidationError(f"key '{key}' has the wrong type", locus)
    return value


def _no_extras(mapping, allowed, locus):
    extras = set(mapping) - set(allowed)
    if extras:
        raise ValidationError(f"unknown keys {sorted(extras)}", locus)


@dataclass(frozen=True)
class Coefficients:
    mode: str
    omega: tuple = ()
    rank: int = 0


@dataclass(frozen=True)
class Document:
    kind: str  # one of PAYLOAD_KEYS
    payload: object
    truncation: Truncation
    coefficients: Coefficients
    raw: dict


def parse_document(data):
    """Validate and interpret a JSON document object."""
    if not isinstance(data, dict):
        raise ValidationError("document must be a JSON object", "/")
    present = [k for k in PAYLOAD_KEYS if k in data]
    if len(present) != 1:
        raise ValidationError(
            f"exactly one of {PAYLOAD_KEYS} is required, found {present}", "/"
        )
    _no_extras(data, PAYLOAD_KEYS + ("truncation", "coefficients"), "/")
    kind = present[0]

    truncation = _parse_truncation(data.get("truncation", {}), "/truncation")
    coefficients = _parse_coefficients(data.get("coefficients", {}), "/coefficients")

    if kind == "surface":
        payload = _parse_surface(data["surface"], "/surface")
    elif kind == "planar_torsion":
        payload = _parse_planar(data["planar_torsion"], coefficients, "/planar_torsion")
    else:
        payload = _parse_ech(data["ech_complex"], "/ech_complex")
    return Document(kind, payload, truncation, coefficients, data)


def _parse_truncation(data, locus):
    _no_extras(data, ("action_bound", "hbar_bound", "cover_max", "exponent_box"), locus)
    return Truncation(
        action_bound=parse_fraction(data.get("action_bound", "5"), f"{locus}/action_bound"),
        hbar_bound=int(data.get("hbar_bound", 4)),
        cover_max=int(data.get("cover_max", 1)),
        exponent_box=int(data.get("exponent_box", 3)),
    )


def _parse_coefficients(data, locus):
    _no_extras(data, ("mode", "omega", "rank"), locus)
    mode = data.get("mode", UNTWISTED)
    if mode not in (UNTWISTED, TWISTED, FULLY_TWISTED):
        raise ValidationError(f"unknown coefficient mode {mode}", f"{locus}/mode")
    omega = tuple(
        parse_fraction(v, f"{locus}/omega/{i}") for i, v in enumerate(data.get("omega", []))
    )
    return Coefficients(mode=mode, omega=omega, rank=int(data.get("rank", 0)))


def _parse_surface(data, locus):
    _no_extras(data, ("plus", "minus", "gamma", "crossing_flow_lines"), locus)

    def parse_side(side_name):
        side_locus = f"{locus}/{side_name}"
        side_data = _require(data, side_name, locus, dict)
        _no_extras(side_data, ("components", "critical_points", "flow_lines"), side_locus)
        components = tuple(
            SurfaceComponent(
                id=_require(c, "id", f"{side_locus}/components/{i}", str),
                genus=int(_require(c, "genus", f"{side_locus}/components/{i}")),
                boundary_circles=tuple(
                    _require(c, "boundary_circles", f"{side_locus}/components/{i}", list)
                ),
            )
            for i, c in enumerate(_require(side_data, "components", side_locus, list))
        )
        criticals = tuple(
            CriticalPoint(
                id=_require(c, "id", f"{side_locus}/critical_points/{i}", str),
                component=_require(c, "component", f"{side_locus}/critical_points/{i}", str),
                index=int(_require(c, "index", f"{side_locus}/critical_points/{i}")),
            )
            for i, c in enumerate(side_data.get("critical_points", []))
        )
        lines = tuple(
            InternalFlowLine(
                id=_require(f, "id", f"{side_locus}/flow_lines/{i}", str),
                start=_require(f, "from", f"{side_locus}/flow_lines/{i}", str),
                end=_require(f, "to", f"{side_locus}/flow_lines/{i}", str),
                sign=int(_require(f, "sign", f"{side_locus}/flow_lines/{i}")),
            )
            for i, f in enumerate(side_data.get("flow_lines", []))
        )
        return SidedSurface(side_name, components, criticals, lines)

    plus = parse_side("plus")
    minus = parse_side("minus")
    gammas = [
        GammaComponent(
            id=_require(g, "id", f"{locus}/gamma/{i}", str),
            plus_circle=_require(g, "plus_circle", f"{locus}/gamma/{i}", str),
            minus_circle=_require(g, "minus_circle", f"{locus}/gamma/{i}", str),
            h1_class=tuple(int(v) for v in g.get("h1_class", [])),
        )
        for i, g in enumerate(data.get("gamma", []))
    ]
    crossings = [
        CrossingFlowLine(
            id=_require(x, "id", f"{locus}/crossing_flow_lines/{i}", str),
            start=_require(x, "from", f"{locus}/crossing_flow_lines/{i}", str),
            gamma=_require(x, "gamma", f"{locus}/crossing_flow_lines/{i}", str),
            end=_require(x, "to", f"{locus}/crossing_flow_lines/{i}", str),
            sign=int(_require(x, "sign", f"{locus}/crossing_flow_lines/{i}")),
            h2_class=tuple(int(v) for v in x.get("h2_class", [])),
        )
        for i, x in enumerate(data.get("crossing_flow_lines", []))
    ]
    try:
        return build_divided_surface(plus, minus, gammas, crossings)
    except ValidationError as err:
        raise ValidationError(str(err), locus) from err


def _parse_planar(data, coefficients, locus):
    _no_extras(
        data, ("m", "n", "r", "lattice_rank", "page_class", "torus_classes"), locus
    )
    return PlanarTorsionDescriptor(
        m=int(_require(data, "m", locus)),
        n=int(_require(data, "n", locus)),
        r=int(_require(data, "r", locus)),
        lattice_rank=int(data.get("lattice_rank", 0)),
        page_class=tuple(int(v) for v in data.get("page_class", [])),
        torus_classes=tuple(tuple(int(v) for v in cls) for cls in data.get("torus_classes", [])),
        omega=coefficients.omega,
    )


def _parse_ech(data, locus):
    _no_extras(data, ("orbits", "generators", "contributions"), locus)
    orbits = {}
    for i, o in enumerate(_require(data, "orbits", locus, list)):
        oid = _require(o, "id", f"{locus}/orbits/{i}", str)
        cz = o.get("cz", 0)
        if isinstance(cz, dict):
            cz = {int(k): int(v) for k, v in cz.items()}
        orbits[oid] = EmbeddedOrbitECH(
            id=oid,
            kind=_require(o, "kind", f"{locus}/orbits/{i}", str),
            action=parse_fraction(_require(o, "action", f"{locus}/orbits/{i}"), f"{locus}/orbits/{i}/action"),
            cz=cz,
        )

    def orbit_set(pairs, sub_locus):
        try:
            return OrbitSetECH([(p[0], int(p[1])) for p in pairs])
        except (IndexError, TypeError):
            raise ValidationError("orbit sets are lists of [id, mult] pairs", sub_locus) from None

    generators = [
        orbit_set(g, f"{locus}/generators/{i}")
        for i, g in enumerate(data.get("generators", []))
    ]
    contributions = []
    for i, c in enumerate(data.get("contributions", [])):
        sub = f"{locus}/contributions/{i}"
        _no_extras(
            c,
            ("from", "to", "c_tau", "q_tau", "sign", "genus", "pos_ends",
             "neg_ends", "label", "irreducible", "ind_eq_i"),
            sub,
        )
        contributions.append(
            Contribution(
                rel=RelClassData(
                    source=orbit_set(_require(c, "from", sub, list), f"{sub}/from"),
                    target=orbit_set(c.get("to", []), f"{sub}/to"),
                    c_tau=int(c.get("c_tau", 0)),
                    q_tau=int(c.get("q_tau", 0)),
                    label=c.get("label", f"c{i}"),
                ),
                sign=int(_require(c, "sign", sub)),
                genus=int(c.get("genus", 0)),
                pos_ends=tuple((p[0], int(p[1])) for p in c.get("pos_ends", [])),
                neg_ends=tuple((p[0], int(p[1])) for p in c.get("neg_ends", [])),
                irreducible=bool(c.get("irreducible", True)),
                ind_eq_i=bool(c.get("ind_eq_i", True)),
            )
        )
    try:
        return ECHComplex(orbits, generators, contributions)
    except ValidationError as err:
        raise ValidationError(str(err), locus) from err


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def element_to_json(element):
    """Canonical JSON form of an algebra element."""
    return [
        {
            "generators": [g.name for g in gens],
            "exponent": list(exp),
            "hbar": h,
            "coeff": format_fraction(coeff),
        }
        for (gens, exp, h), coeff in element.sorted_terms()
    ]


def element_from_json(data, generator_table, rank):
    terms = {}
    for t in data:
        gens = tuple(generator_table[name] for name in t["generators"])
        key = (gens, tuple(t["exponent"]), int(t["hbar"]))
        terms[key] = terms.get(key, Fraction(0)) + Fraction(t["coeff"])
    return AlgebraElement(rank, terms)


def element_to_text(element):
    return repr(element)


def surface_to_json(ds):
    def side_json(side):
        return {
            "components": [
                {
                    "id": c.id,
                    "genus": c.genus,
                    "boundary_circles": list(c.boundary_circles),
                }
                for c in side.components
            ],
            "critical_points": [
                {"id": cp.id, "component": cp.component, "index": cp.index}
                for cp in side.critical_points
            ],
            "flow_lines": [
                {"id": f.id, "from": f.start, "to": f.end, "sign": f.sign}
                for f in side.flow_lines
            ],
        }

    return {
        "plus": side_json(ds.plus),
        "minus": side_json(ds.minus),
        "gamma": [
            {
                "id": g.id,
                "plus_circle": g.plus_circle,
                "minus_circle": g.minus_circle,
                "h1_class": list(g.h1_class),
            }
            for g in ds.gamma_components
        ],
        "crossing_flow_lines": [
            {
                "id": x.id,
                "from": x.start,
                "gamma": x.gamma,
                "to": x.end,
                "sign": x.sign,
                **({"h2_class": list(x.h2_class)} if x.h2_class else {}),
            }
            for x in ds.crossing_flow_lines
        ],
    }


def ech_complex_to_json(cx):
    def cz_json(cz):
        if isinstance(cz, dict):
            return {str(k): v for k, v in sorted(cz.items())}
        return int(cz)

    return {
        "orbits": [
            {
                "id": o.id,
                "kind": o.kind,
                "action": format_fraction(o.action),
                "cz": cz_json(o.cz),
            }
            for _, o in sorted(cx.orbits.items())
        ],
        "generators": [
            [[oid, m] for oid, m in g] for g in cx.generators
        ],
        "contributions": [
            {
                "from": [[oid, m] for oid, m in c.source],
                "to": [[oid, m] for oid, m in c.target],
                "c_tau": c.rel.c_tau,
                "q_tau": c.rel.q_tau,
                "sign": c.sign,
                "genus": c.genus,
                "pos_ends": [[oid, m] for oid, m in c.pos_ends],
                "neg_ends": [[oid, m] for oid, m in c.neg_ends],
                "label": c.rel.label,
                "irreducible": c.irreducible,
                "ind_eq_i": c.ind_eq_i,
            }
            for c in cx.contributions
        ],
    }


def document_digest(data):
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def dumps_report(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def load_document(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as err:
            raise ValidationError(f"not valid JSON: {err}", "/") from err
    return parse_document(data), data


def bundled_names():
    files = resources.files("algtorsion.data")
    return sorted(p.name[: -len(".json")] for p in files.iterdir() if p.name.endswith(".json"))


def load_bundled(name):
    files = resources.files("algtorsion.data")
    target = files / f"{name}.json"
    if not target.is_file():
        raise ValidationError(
            f"no bundled document '{name}'; available: {', '.join(bundled_names())}"
        )
    data = json.loads(target.read_text(encoding="utf-8"))
    return parse_document(data), data
