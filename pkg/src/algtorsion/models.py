"""Bundled example models: the disconnected-dividing-set certificate
surface, the circle-invariant higher-order family, planar torsion
descriptors, and toy ECH complexes.

Surface models store only rigid flow lines (index difference one); signed
so that the Morse differential squares to zero and every saddle's
descending and ascending pairs cancel where the certificates require it.
"""

from __future__ import annotations

from fractions import Fraction

from .cylinders import enumerate_cylinders
from .ech import (
    ELLIPTIC,
    EMPTY_SET,
    POSITIVE_HYPERBOLIC,
    Contribution,
    ECHComplex,
    EmbeddedOrbitECH,
    OrbitSetECH,
    RelClassData,
    enumerate_orbit_sets,
)
from .errors import ValidationError
from .orbits import generate_orbits
from .surface import (
    CriticalPoint,
    CrossingFlowLine,
    GammaComponent,
    InternalFlowLine,
    SidedSurface,
    SurfaceComponent,
    build_divided_surface,
)
from .torsion import PlanarTorsionDescriptor


def _side(side, components, criticals, lines):
    return SidedSurface(
        side=side,
        components=tuple(SurfaceComponent(*c) for c in components),
        critical_points=tuple(CriticalPoint(*c) for c in criticals),
        flow_lines=tuple(InternalFlowLine(*f) for f in lines),
    )


def sphere_surface():
    """Two disks glued along one circle; the minimal valid model."""
    plus = _side("plus", [("pD", 0, ("P1",))], [("pmax", "pD", 0)], [])
    minus = _side("minus", [("mD", 0, ("M1",))], [("mmin", "mD", 0)], [])
    gammas = [GammaComponent("g1", "P1", "M1", ())]
    crossings = [CrossingFlowLine("x1", "mmin", "g1", "pmax", 1)]
    return build_divided_surface(plus, minus, gammas, crossings)


def torus_surface():
    """Two annuli glued along two circles; genus one."""
    plus = _side(
        "plus",
        [("pA", 0, ("P1", "P2"))],
        [("pext", "pA", 0), ("psad", "pA", 1)],
        [
            ("pf1", "psad", "pext", 1),
            ("pf2", "psad", "pext", -1),
        ],
    )
    minus = _side(
        "minus",
        [("mA", 0, ("M1", "M2"))],
        [("mmin", "mA", 0), ("msad", "mA", 1)],
        [
            ("mf1", "mmin", "msad", 1),
            ("mf2", "mmin", "msad", -1),
        ],
    )
    gammas = [
        GammaComponent("g1", "P1", "M1", (1, 0)),
        GammaComponent("g2", "P2", "M2", (-1, 0)),
    ]
    crossings = [
        CrossingFlowLine("x1", "mmin", "g1", "psad", 1),
        CrossingFlowLine("x2", "mmin", "g2", "psad", -1),
        CrossingFlowLine("x3", "msad", "g1", "pext", 1),
        CrossingFlowLine("x4", "msad", "g2", "pext", -1),
    ]
    return build_divided_surface(plus, minus, gammas, crossings)


def no_giroux_surface():
    """Disconnected minus side: two annuli against a four-holed sphere.

    The first annulus minimum na0 has a unique crossing line x1 to the
    saddle pc1a, while its internal lines and every other saddle's
    descending pair cancel in signs; this is the configuration behind the
    order-one certificate.  The glued surface has genus two.
    """
    minus = _side(
        "minus",
        [("mA", 0, ("M1", "M2")), ("mB", 0, ("M3", "M4"))],
        [("na0", "mA", 0), ("na1", "mA", 1), ("nb0", "mB", 0), ("nb1", "mB", 1)],
        [
            ("f1", "na0", "na1", 1),
            ("f2", "na0", "na1", -1),
            ("f3", "nb0", "nb1", 1),
            ("f4", "nb0", "nb1", -1),
        ],
    )
    plus = _side(
        "plus",
        [("pP", 0, ("P1", "P2", "P3", "P4"))],
        [
            ("pc2", "pP", 0),
            ("pc1a", "pP", 1),
            ("pc1b", "pP", 1),
            ("pc1c", "pP", 1),
        ],
        [
            ("f5", "pc1a", "pc2", 1),
            ("f6", "pc1a", "pc2", -1),
            ("f7", "pc1b", "pc2", 1),
            ("f8", "pc1b", "pc2", -1),
            ("f9", "pc1c", "pc2", 1),
            ("f10", "pc1c", "pc2", -1),
        ],
    )
    gammas = [
        GammaComponent("g1", "P1", "M1", (1, 0, 0, 0)),
        GammaComponent("g2", "P2", "M2", (0, 1, 0, 0)),
        GammaComponent("g3", "P3", "M3", (0, 0, 1, 0)),
        GammaComponent("g4", "P4", "M4", (-1, -1, -1, 0)),
    ]
    crossings = [
        CrossingFlowLine("x1", "na0", "g1", "pc1a", 1),
        CrossingFlowLine("x2", "nb0", "g3", "pc1a", -1),
        CrossingFlowLine("x3", "nb0", "g3", "pc1b", 1),
        CrossingFlowLine("x4", "nb0", "g4", "pc1b", -1),
        CrossingFlowLine("x5", "nb0", "g3", "pc1c", 1),
        CrossingFlowLine("x6", "nb0", "g4", "pc1c", -1),
        CrossingFlowLine("x7", "na1", "g2", "pc2", 1),
        CrossingFlowLine("x8", "na1", "g2", "pc2", -1),
        CrossingFlowLine("x9", "nb1", "g3", "pc2", 1),
        CrossingFlowLine("x10", "nb1", "g3", "pc2", -1),
    ]
    return build_divided_surface(plus, minus, gammas, crossings)


def vgk_surface(g, k):
    """The circle-invariant model of the higher-order family.

    The minus side is planar and connected with k boundary circles and a
    unique minimum; the plus side has genus g - k + 1, k boundary circles
    and a unique maximum after the flip.  Every saddle's descending pair
    lands on the unique minimum and its ascending pair on the unique
    maximum, each with cancelling signs, so the assembled differential is
    identically zero; this is the vanishing that the lower-bound
    certificate consumes.
    """
    if not 1 <= k <= g:
        raise ValidationError("the family needs g >= k >= 1")
    genus_plus = g - k + 1
    minus_saddles = [f"vms{i}" for i in range(1, k)]
    plus_saddles = [f"vps{i}" for i in range(1, 2 * genus_plus + k)]

    minus = _side(
        "minus",
        [("mP", 0, tuple(f"M{i}" for i in range(1, k + 1)))],
        [("vm0", "mP", 0)] + [(s, "mP", 1) for s in minus_saddles],
        [(f"d{s}p", "vm0", s, 1) for s in minus_saddles]
        + [(f"d{s}m", "vm0", s, -1) for s in minus_saddles],
    )
    plus = _side(
        "plus",
        [("pG", genus_plus, tuple(f"P{i}" for i in range(1, k + 1)))],
        [("vp0", "pG", 0)] + [(s, "pG", 1) for s in plus_saddles],
        [(f"u{s}p", s, "vp0", 1) for s in plus_saddles]
        + [(f"u{s}m", s, "vp0", -1) for s in plus_saddles],
    )

    rank = 2 * g
    classes = []
    for i in range(k - 1):
        cls = [0] * rank
        cls[i] = 1
        classes.append(tuple(cls))
    last = [0] * rank
    for i in range(k - 1):
        last[i] = -1
    classes.append(tuple(last))
    gammas = [
        GammaComponent(f"g{i + 1}", f"P{i + 1}", f"M{i + 1}", classes[i])
        for i in range(k)
    ]

    crossings = []
    for j, s in enumerate(plus_saddles):
        gamma = gammas[j % k].id
        crossings.append(CrossingFlowLine(f"c{s}p", "vm0", gamma, s, 1))
        crossings.append(CrossingFlowLine(f"c{s}m", "vm0", gamma, s, -1))
    for j, s in enumerate(minus_saddles):
        gamma = gammas[j % k].id
        crossings.append(CrossingFlowLine(f"c{s}p", s, gamma, "vp0", 1))
        crossings.append(CrossingFlowLine(f"c{s}m", s, gamma, "vp0", -1))
    return build_divided_surface(plus, minus, gammas, crossings)


def vgk_planar_descriptor(g, k, lattice_rank=0, torus_classes=(), omega=(), page_class=()):
    """Planar torsion combinatorics of the same family: the planar piece is
    the minus side, so the domain has no binding, k boundary tori of the
    planar piece, and no interior interface tori."""
    if not 1 <= k <= g:
        raise ValidationError("the family needs g >= k >= 1")
    return PlanarTorsionDescriptor(
        m=0,
        n=k,
        r=0,
        lattice_rank=lattice_rank,
        page_class=tuple(page_class),
        torus_classes=tuple(torus_classes),
        omega=tuple(omega),
    )


# ---------------------------------------------------------------------------
# Derived and toy ECH complexes
# ---------------------------------------------------------------------------


def _augment_with_spectators(orbits, base_records, action_bound):
    """Every base contribution together with its trivial-cylinder
    augmentations that stay admissible below the action bound."""
    spectators = enumerate_orbit_sets(orbits, action_bound)
    contributions = []
    for rec in base_records:
        source, target, c_tau, q_tau, sign, genus, pos, neg, label = rec
        for sigma in spectators:
            new_source = source.union(sigma)
            new_target = target.union(sigma)
            if new_source.action(orbits) >= action_bound:
                continue
            if not (new_source.admissible(orbits) and new_target.admissible(orbits)):
                continue
            plain = not sigma
            contributions.append(
                Contribution(
                    rel=RelClassData(
                        new_source,
                        new_target,
                        c_tau,
                        q_tau,
                        label if plain else f"{label}+{sigma!r}",
                    ),
                    sign=sign,
                    genus=genus,
                    pos_ends=_merge_ends(pos, sigma),
                    neg_ends=_merge_ends(neg, sigma),
                    irreducible=plain,
                    ind_eq_i=plain,
                )
            )
    return contributions


def _merge_ends(base, sigma):
    counts = {}
    for oid, n in list(base) + list(sigma):
        counts[oid] = counts.get(oid, 0) + n
    return tuple(sorted(counts.items()))


def ech_from_surface_model(ds, action_bound, cover_max=1):
    """ECH complex of a circle-invariant surface model.

    Embedded orbits sit over critical points: elliptic with constant
    Conley-Zehnder index one over extrema, positive hyperbolic with index
    zero over saddles.  Rigid cylinders give the contributions; the
    circle-invariant trivialization sets c_tau = Q_tau = 0 throughout.
    """
    model_orbits = generate_orbits(ds, 1)
    cylinders = enumerate_cylinders(ds, model_orbits, 1)
    orbits = {}
    for o in model_orbits:
        orbits[o.critical_point] = EmbeddedOrbitECH(
            id=o.critical_point,
            kind=ELLIPTIC if o.orbit_kind == "elliptic" else POSITIVE_HYPERBOLIC,
            action=o.action,
            cz=o.cz_index,
        )

    base = []
    for cyl in cylinders:
        if cyl.cyl_type == "trivial" or cyl.fredholm_index != 1:
            continue
        if cyl.cyl_type in (4, 5):
            source = OrbitSetECH(
                [(o.critical_point, 1) for o in cyl.positive_ends]
            )
            target = EMPTY_SET
            pos = tuple((o.critical_point, 1) for o in cyl.positive_ends)
            neg = ()
        else:
            source = OrbitSetECH([(cyl.positive_ends[0].critical_point, 1)])
            target = OrbitSetECH([(cyl.negative_ends[0].critical_point, 1)])
            pos = ((cyl.positive_ends[0].critical_point, 1),)
            neg = ((cyl.negative_ends[0].critical_point, 1),)
        base.append(
            (source, target, 0, 0, cyl.sign, 0, pos, neg, str(cyl.flow_line))
        )

    contributions = _augment_with_spectators(orbits, base, action_bound)
    generators = enumerate_orbit_sets(orbits, action_bound)
    return ECHComplex(orbits, generators, contributions)


def ech_from_planar_descriptor(desc, action_bound=None):
    """ECH complex of the perturbed planar torsion domain.

    Gradient cylinders of each torus contribute in the zeroth layer with
    the two relative classes differing by the torus class; the page curve
    contributes only when its ECH index is one, which happens exactly at
    torsion order one.
    """
    from .torsion import descriptor_generators

    gens = descriptor_generators(desc)
    orbits = {}
    for name, g in sorted(gens.items()):
        orbits[name] = EmbeddedOrbitECH(
            id=name,
            kind=ELLIPTIC if g.parity == 0 else POSITIVE_HYPERBOLIC,
            action=g.action,
            cz=1 if g.parity == 0 else 0,
        )
    if action_bound is None:
        # Roughly one torus pair's action plus room for one more pair of
        # spectator orbits; keeps the generator count in the dozens.
        action_bound = sum(
            (g.action for name, g in gens.items()), Fraction(0)
        ) / (desc.n + desc.r) + Fraction(5, 2)

    base = []
    for i in range(1, desc.n + desc.r + 1):
        e, h = f"t{i:02d}e", f"t{i:02d}h"
        source = OrbitSetECH([(e, 1)])
        target = OrbitSetECH([(h, 1)])
        base.append((source, target, 0, 0, 1, 0, ((e, 1),), ((h, 1),), f"v{i}+"))
        base.append((source, target, 0, 0, -1, 0, ((e, 1),), ((h, 1),), f"v{i}-"))

    page_source = OrbitSetECH(
        [(f"b{i:02d}", 1) for i in range(1, desc.m + 1)]
        + [("t01h", 1)]
        + [(f"t{i:02d}e", 1) for i in range(2, desc.n + 1)]
        + [(f"t{desc.n + i:02d}e", 2) for i in range(1, desc.r + 1)]
    )
    page_index = desc.order  # CZ sums with c = Q = 0
    if page_index == 1:
        pos = tuple((o, m) for o, m in page_source)
        base.append((page_source, EMPTY_SET, 0, 0, 1, 0, pos, (), "page"))

    contributions = _augment_with_spectators(orbits, base, action_bound)
    generators = enumerate_orbit_sets(orbits, action_bound)
    return ECHComplex(orbits, generators, contributions)


def toy_overtwisted_complex():
    """One orbit, one rigid plane: the empty set dies on the first page."""
    orbits = {
        "g": EmbeddedOrbitECH("g", POSITIVE_HYPERBOLIC, Fraction(1), cz=0),
    }
    alpha = OrbitSetECH([("g", 1)])
    contributions = [
        Contribution(
            rel=RelClassData(alpha, EMPTY_SET, c_tau=1, q_tau=0, label="plane"),
            sign=1,
            genus=0,
            pos_ends=(("g", 1),),
            neg_ends=(),
        )
    ]
    return ECHComplex(orbits, [alpha], contributions)


def toy_zigzag_complex():
    """Death on page two with a genuine correction chain.

    The pair generator hits the empty set in layer one but is not closed in
    layer zero; a second generator repairs it, so the zig-zag needs a
    two-term representative and the sufficient-condition solve needs the
    same combination.
    """
    orbits = {
        "e1": EmbeddedOrbitECH("e1", ELLIPTIC, Fraction(1), cz=1),
        "h1": EmbeddedOrbitECH("h1", POSITIVE_HYPERBOLIC, Fraction(9, 10), cz=0),
        "e3": EmbeddedOrbitECH("e3", ELLIPTIC, Fraction(4, 5), cz=1),
        "h3": EmbeddedOrbitECH("h3", POSITIVE_HYPERBOLIC, Fraction(21, 20), cz=0),
    }
    pair = OrbitSetECH([("e1", 1), ("h1", 1)])
    b = OrbitSetECH([("e3", 1)])
    x = OrbitSetECH([("h3", 1)])
    contributions = [
        Contribution(
            rel=RelClassData(pair, EMPTY_SET, 0, 0, label="page"),
            sign=1,
            genus=0,
            pos_ends=(("e1", 1), ("h1", 1)),
        ),
        Contribution(
            rel=RelClassData(pair, b, 1, 0, label="leak"),
            sign=1,
            genus=0,
            pos_ends=(("e1", 1), ("h1", 1)),
            neg_ends=(("e3", 1),),
            irreducible=False,
            ind_eq_i=False,
        ),
        Contribution(
            rel=RelClassData(x, b, 1, 1, label="repair"),
            sign=-1,
            genus=0,
            pos_ends=(("h3", 1),),
            neg_ends=(("e3", 1),),
        ),
    ]
    return ECHComplex(orbits, [pair, b, x], contributions)


def toy_broken_relations_complex():
    """Deliberately inconsistent: the layer-zero differential does not
    square to zero, so decomposition must reject it."""
    orbits = {
        "ha": EmbeddedOrbitECH("ha", POSITIVE_HYPERBOLIC, Fraction(6, 5), cz=0),
        "eb": EmbeddedOrbitECH("eb", ELLIPTIC, Fraction(1), cz=1),
        "hc": EmbeddedOrbitECH("hc", POSITIVE_HYPERBOLIC, Fraction(4, 5), cz=0),
    }
    a = OrbitSetECH([("ha", 1)])
    b = OrbitSetECH([("eb", 1)])
    c = OrbitSetECH([("hc", 1)])
    contributions = [
        Contribution(
            rel=RelClassData(a, b, 1, 1, label="ab"),
            sign=1,
            genus=0,
            pos_ends=(("ha", 1),),
            neg_ends=(("eb", 1),),
        ),
        Contribution(
            rel=RelClassData(b, c, 0, 0, label="bc"),
            sign=1,
            genus=0,
            pos_ends=(("eb", 1),),
            neg_ends=(("hc", 1),),
        ),
    ]
    return ECHComplex(orbits, [a, b, c], contributions)


SURFACE_MODELS = {
    "sphere": sphere_surface,
    "torus": torus_surface,
    "no_giroux": no_giroux_surface,
    "v2k2": lambda: vgk_surface(2, 2),
    "v3k2": lambda: vgk_surface(3, 2),
    "v3k3": lambda: vgk_surface(3, 3),
}

PLANAR_DESCRIPTORS = {
    "planar_k0": PlanarTorsionDescriptor(m=0, n=1, r=0),
    "planar_k1": PlanarTorsionDescriptor(m=0, n=2, r=0),
    "planar_k2": PlanarTorsionDescriptor(m=1, n=2, r=0),
    "planar_k3": PlanarTorsionDescriptor(m=0, n=2, r=1),
}

TOY_ECH_COMPLEXES = {
    "ech_overtwisted": toy_overtwisted_complex,
    "ech_zigzag": toy_zigzag_complex,
}
