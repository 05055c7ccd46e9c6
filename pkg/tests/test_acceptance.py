"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with  pytest tests/test_acceptance.py -v -s  to see the ledger lines.
All comparisons are exact; there are no numerical tolerances anywhere.
"""

import random
from fractions import Fraction

import pytest

from algtorsion.algebra import (
    EVEN,
    ODD,
    AlgebraElement,
    DifferentialOperator,
    Generator,
    Truncation,
    verify_square_zero,
)
from algtorsion.cylinders import assemble_sft_differential, enumerate_cylinders
from algtorsion.ech import (
    ELLIPTIC,
    EMPTY_SET,
    INFINITY,
    NEGATIVE_HYPERBOLIC,
    POSITIVE_HYPERBOLIC,
    Contribution,
    EmbeddedOrbitECH,
    OrbitSetECH,
    RelClassData,
    decompose_differential,
    ech_index,
    ech_lower_bound_certificate,
    f_value,
    j_plus,
    ji_bound,
    positive_hyperbolic_count,
    scaling_relabel,
    survival_report,
)
from algtorsion.models import (
    PLANAR_DESCRIPTORS,
    SURFACE_MODELS,
    ech_from_planar_descriptor,
    ech_from_surface_model,
    no_giroux_surface,
    toy_overtwisted_complex,
    toy_zigzag_complex,
    vgk_planar_descriptor,
    vgk_surface,
)
from algtorsion.orbits import generate_orbits
from algtorsion.primitives import primitive_via_bracket, solve_primitive
from algtorsion.surface import morse_homology
from algtorsion.torsion import (
    TWISTED,
    PlanarTorsionDescriptor,
    default_descriptor_truncation,
    descriptor_generators,
    lower_bound_certificate,
    planar_torsion_differential,
    torsion_upper_bound,
)


def ledger(number, text):
    print(f"ACCEPTANCE {number}: PASS  {text}")


def surface_pipeline(ds, cover_max=2):
    orbits = generate_orbits(ds, cover_max)
    cylinders = enumerate_cylinders(ds, orbits, cover_max)
    operator = assemble_sft_differential(ds, orbits, cylinders)
    return orbits, cylinders, operator, [o.generator() for o in orbits]


def all_descriptor_shapes(max_order_plus_one=5):
    shapes = []
    for m in range(max_order_plus_one + 1):
        for n in range(1, max_order_plus_one + 1):
            for r in range(max_order_plus_one + 1):
                if m + n + 2 * r <= max_order_plus_one:
                    shapes.append((m, n, r))
    return shapes


def test_criterion_1_planar_torsion_certificates():
    shapes = all_descriptor_shapes(5)
    assert len(shapes) >= 15
    for (m, n, r) in shapes:
        desc = PlanarTorsionDescriptor(m=m, n=n, r=r)
        k0 = desc.order
        operator, f = planar_torsion_differential(desc)
        expected = AlgebraElement.hbar(k0) if k0 else AlgebraElement.one()
        assert operator.apply(f) == expected, (m, n, r)
        truncation = default_descriptor_truncation(desc)
        upper = torsion_upper_bound(
            operator, list(descriptor_generators(desc).values()), truncation
        )
        assert upper is not None and upper.order == k0, (m, n, r)
    ledger(1, f"D(F) = hbar^k0 exactly and upper bound k0 for all {len(shapes)} shapes with m+n+2r <= 5")


def test_criterion_2_omega_twisting():
    gens = None
    outcomes = {}
    for omega_t2 in (1, 0):
        desc = PlanarTorsionDescriptor(
            m=0, n=2, r=0, lattice_rank=1,
            page_class=(0,), torus_classes=((0,), (omega_t2,)), omega=(1,),
        )
        operator, _ = planar_torsion_differential(desc, TWISTED)
        gens = list(descriptor_generators(desc).values())
        truncation = Truncation(action_bound=Fraction(4), hbar_bound=2, exponent_box=3)
        target = AlgebraElement.hbar(1, operator.rank)
        outcomes[omega_t2] = solve_primitive(operator, target, gens, truncation)
    assert not outcomes[1].found
    assert outcomes[1].box_limited
    assert outcomes[0].found
    ledger(2, "omega([T2]) = 1 blocks the hbar primitive in box +-3, hbar <= 2; omega([T2]) = 0 restores it")


def test_criterion_3_no_giroux_model():
    ds = no_giroux_surface()
    orbits, cylinders, operator, gens = surface_pipeline(ds, cover_max=2)

    # Independent brute-force Morse computation: the ascending lines from
    # the annulus minimum into its own component's saddles cancel in signs.
    minus_criticals = {cp.id: cp for cp in ds.minus.critical_points}
    brute = sum(
        line.sign
        for line in ds.minus.flow_lines
        if line.start == "na0" and minus_criticals[line.end].index == 1
    )
    assert brute == 0

    # The assembled operator keeps no first-order term: all same-side counts
    # cancelled during assembly.
    assert all(t.hbar_power == 1 and not t.outputs for t in operator.terms)

    e1 = next(o for o in orbits if o.critical_point == "na0" and o.cover == 1)
    s1 = next(o for o in orbits if o.critical_point == "pc1a" and o.cover == 1)
    pair = AlgebraElement.from_generators((e1.generator(), s1.generator()))
    assert operator.apply(pair) == AlgebraElement.hbar(1)

    upper = torsion_upper_bound(operator, gens, Truncation(Fraction(5), 3, cover_max=2))
    assert upper.order == 1
    ledger(3, "D(q_min q_saddle) = hbar after first-order counts cancel; upper bound 1")


@pytest.mark.parametrize("g,k", [(2, 2), (3, 3)])
def test_criterion_4_higher_order_family(g, k):
    # (a) upper bound k-1 through the planar torsion combinatorics.
    desc = vgk_planar_descriptor(g, k)
    operator_d, f = planar_torsion_differential(desc)
    assert operator_d.apply(f) == AlgebraElement.hbar(k - 1)
    upper = torsion_upper_bound(
        operator_d,
        list(descriptor_generators(desc).values()),
        default_descriptor_truncation(desc),
    )
    assert upper.order == k - 1

    # (b) lower-bound certificate at K = k-2 on the circle-invariant model.
    ds = vgk_surface(g, k)
    orbits, cylinders, operator, gens = surface_pipeline(ds, cover_max=2)
    truncation = Truncation(Fraction(5), k, cover_max=2)
    cert = lower_bound_certificate(ds, orbits, cylinders, operator, gens, k - 2, truncation)
    assert cert.granted
    assert cert.gamma_rank == k - 1 and cert.nullspace_is_ones
    assert cert.count_rows.get((0, 1)) == {}
    for data in cert.count_rows.get((0, 2), {}).values():
        assert data["total"] == 0

    # (c) independent solver cross-check: no primitive of hbar^(k-2) modulo
    # hbar^(k-1); candidates of higher hbar order cannot contribute there.
    target = AlgebraElement.hbar(k - 2) if k > 2 else AlgebraElement.one()
    out = solve_primitive(operator, target, gens, Truncation(Fraction(5), k - 2, cover_max=2))
    assert not out.found
    ledger(4, f"(g,k)=({g},{k}): upper k-1={k-1}, certificate at K={k-2}, solver refusal")


def acyclic_synthetic_operator():
    h0 = Generator("h0", ODD, Fraction(1))
    pairs = [
        (Generator(f"h{i}", ODD, Fraction(1)), Generator(f"e{i}", EVEN, Fraction(1)))
        for i in (1, 2)
    ]
    h3 = Generator("h3", ODD, Fraction(1))
    e3 = Generator("e3", EVEN, Fraction(1))
    gens = [h0, h3, e3] + [g for pair in pairs for g in pair]
    terms = [(1, (), (h0,), 0), (1, (h3,), (e3,), 0)]
    for h, e in pairs:
        terms.append((1, (), (h, e), 1))
    return DifferentialOperator.build(terms, 0), gens, h0


def test_criterion_5_constructive_acyclicity():
    operator, gens, h0 = acyclic_synthetic_operator()
    assert len(gens) >= 6
    assert verify_square_zero(operator, gens, Fraction(6), 4).ok
    p = AlgebraElement.from_generators((h0,))
    assert operator.apply(p, 4) == AlgebraElement.one()

    rng = random.Random(2024)
    verified = 0
    while verified < 100:
        word = tuple(rng.choice(gens) for _ in range(rng.randint(1, 3)))
        seed_elem = AlgebraElement.from_generators(
            word, coeff=Fraction(rng.randint(-3, 3)), hbar=rng.randint(0, 1)
        )
        q = operator.apply(seed_elem, 4) + AlgebraElement.hbar(rng.randint(0, 3))
        if operator.apply(q, 4) != AlgebraElement.zero():
            continue
        result = primitive_via_bracket(operator, p, q, 4)
        assert operator.apply(result, 4) == q.truncate_hbar(4)
        verified += 1
    ledger(5, "primitive_via_bracket verified D(R) = Q mod hbar^5 on 100 randomized closed elements")


def bundled_differentials():
    out = []
    for name, make in SURFACE_MODELS.items():
        ds = make()
        orbits, cylinders, operator, gens = surface_pipeline(ds, cover_max=2)
        out.append((name, operator, gens))
    for name, desc in PLANAR_DESCRIPTORS.items():
        operator, _ = planar_torsion_differential(desc)
        out.append((name, operator, list(descriptor_generators(desc).values())))
    twisted = PlanarTorsionDescriptor(
        m=0, n=2, r=0, lattice_rank=1,
        page_class=(0,), torus_classes=((0,), (1,)), omega=(1,),
    )
    operator, _ = planar_torsion_differential(twisted, TWISTED)
    out.append(
        ("planar_k1_twisted", operator, list(descriptor_generators(twisted).values()))
    )
    operator, gens, _ = acyclic_synthetic_operator()
    out.append(("synthetic", operator, gens))
    return out


def test_criterion_6_structural_suite():
    checked = []
    for name, operator, gens in bundled_differentials():
        assert verify_square_zero(operator, gens, Fraction(5), 4).ok, name
        assert operator.is_odd(), name
        assert operator.apply(AlgebraElement.one(operator.rank), 4).is_zero(), name
        checked.append(name)

    # Mutation 1: flip one sign in a differential whose square-zero relies
    # on the cancellation of broken lines.
    a = Generator("ma", ODD, Fraction(1))
    b = Generator("mb", ODD, Fraction(1))
    e = Generator("me", EVEN, Fraction(1))
    f = Generator("mf", EVEN, Fraction(1))
    good = DifferentialOperator.build(
        [(1, (a,), (f,), 0), (1, (b,), (f,), 0), (1, (e,), (a,), 0), (-1, (e,), (b,), 0)], 0
    )
    assert verify_square_zero(good, [a, b, e, f], Fraction(5), 4).ok
    mutated = DifferentialOperator.build(
        [(1, (a,), (f,), 0), (1, (b,), (f,), 0), (1, (e,), (a,), 0), (1, (e,), (b,), 0)], 0
    )
    report = verify_square_zero(mutated, [a, b, e, f], Fraction(5), 4)
    assert not report.ok and report.monomial is not None

    # Mutation 2: flip the sign of the distinguished crossing line; the
    # certificate replay catches it even though the square stays zero.
    ds = no_giroux_surface()
    orbits = generate_orbits(ds, 1)
    cylinders = enumerate_cylinders(ds, orbits, 1)
    flipped = [
        c if c.flow_line != "x1" else type(c)(
            flow_line=c.flow_line, cover=c.cover,
            positive_ends=c.positive_ends, negative_ends=c.negative_ends,
            cyl_type=c.cyl_type, fredholm_index=c.fredholm_index,
            sign=-c.sign, homology_class=c.homology_class,
        )
        for c in cylinders
    ]
    mutated_d = assemble_sft_differential(ds, orbits, flipped)
    e1 = next(o for o in orbits if o.critical_point == "na0").generator()
    s1 = next(o for o in orbits if o.critical_point == "pc1a").generator()
    pair = AlgebraElement.from_generators((e1, s1))
    assert mutated_d.apply(pair) != AlgebraElement.hbar(1)
    ledger(6, f"square-zero, oddness and D(1)=0 on {len(checked)} bundled differentials; both mutations caught")


def test_criterion_7_morse_oracle():
    for name, make in SURFACE_MODELS.items():
        ds = make()
        betti = morse_homology(ds)
        genus = ds.genus()
        assert betti == (1, 2 * genus, 1), name
        # Independent computation: connectivity gives b0 = b2 = 1 and the
        # Euler characteristic fixes b1.
        chi = ds.euler_characteristic()
        assert betti == (1, 2 - chi, 1), name
    ledger(7, f"morse_homology = (1, 2g, 1) on all {len(SURFACE_MODELS)} bundled surfaces, matching the Euler oracle")


def test_criterion_8_ech_arithmetic():
    cx = ech_from_surface_model(no_giroux_surface(), Fraction(4))
    x1 = next(c for c in cx.contributions if c.rel.label == "x1")
    assert ech_index(cx.orbits, x1.rel) == 1
    assert j_plus(cx.orbits, x1.rel) == 2
    assert j_plus(cx.orbits, x1.rel) == ji_bound(x1)

    rng = random.Random(88)
    samples = 0
    while samples < 100:
        orbits = {}
        for i in range(rng.randint(1, 4)):
            kind = rng.choice((ELLIPTIC, POSITIVE_HYPERBOLIC, NEGATIVE_HYPERBOLIC))
            if kind == ELLIPTIC:
                theta = Fraction(rng.randint(1, 9), 10)
                cz = {j: 2 * int(j * theta) + 1 for j in range(1, 8)}
            elif kind == POSITIVE_HYPERBOLIC:
                cz = {j: j * 2 * rng.randint(-2, 2) for j in range(1, 8)}
            else:
                cz = {j: j * (2 * rng.randint(-2, 2) + 1) for j in range(1, 8)}
            orbits[f"o{i}"] = EmbeddedOrbitECH(f"o{i}", kind, Fraction(rng.randint(1, 5)), cz=cz)

        def admissible_sample():
            pairs = []
            for oid, orbit in orbits.items():
                if rng.random() < 0.5:
                    continue
                pairs.append((oid, 1 if orbit.hyperbolic else rng.randint(1, 3)))
            return OrbitSetECH(pairs)

        rel = RelClassData(
            admissible_sample(), admissible_sample(),
            c_tau=rng.randint(-3, 3), q_tau=rng.randint(-3, 3),
        )
        diff = j_plus(orbits, rel) - ech_index(orbits, rel)
        assert diff % 2 == positive_hyperbolic_count(orbits, rel) % 2
        samples += 1
    ledger(8, "noGiroux contribution has I=1, J+=2 with JI equality; parity rule on 100 samples")


def bundled_ech_complexes():
    return {
        "toy_overtwisted": toy_overtwisted_complex(),
        "toy_zigzag": toy_zigzag_complex(),
        "v2k2_derived": ech_from_planar_descriptor(vgk_planar_descriptor(2, 2)),
        "no_giroux_derived": ech_from_surface_model(no_giroux_surface(), Fraction(4)),
    }


def test_criterion_9_ech_invariants():
    assert f_value(toy_overtwisted_complex()) == 0

    cx = ech_from_planar_descriptor(vgk_planar_descriptor(2, 2))
    cert = ech_lower_bound_certificate(cx, None, 1)
    assert cert.granted
    report = survival_report(cx)
    assert report.f == 1
    # The explicit witness path: (d0 + d1) x = empty set is solvable.
    assert report.f_sufficient == 1

    for name, complex_ in bundled_ech_complexes().items():
        assert f_value(complex_, simple_only=True) >= f_value(complex_), name

    for c in (Fraction(2), Fraction(1, 2)):
        scaled = scaling_relabel(cx, c)
        for bound in (Fraction(2), Fraction(3), Fraction(4)):
            assert f_value(cx, bound) == f_value(scaled, c * bound)
    ledger(9, "f = 0 (toy overtwisted); f = 1 with certificate at k=1 (order-two family); f_simp >= f; scaling invariance")


def test_criterion_10_multicomplex_relations_and_agreement():
    names = []
    for name, cx in bundled_ech_complexes().items():
        decompose_differential(cx, max_relation_degree=4)
        report = survival_report(cx)
        assert report.f == report.f_sufficient, name
        names.append(name)
    ledger(10, f"relations sum d_i d_j = 0 for k <= 4 and survival agreement on {len(names)} bundled complexes")
