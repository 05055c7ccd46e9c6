"""Torsion-order analysis.

Upper bounds come from explicit primitives: either a direct solver witness
on an assembled differential, or the planar-torsion certificate, whose
differential and distinguished monomial are generated straight from the
combinatorics of the torsion domain.  Lower bounds are only ever issued
through the vanishing-count certificate; a bare solver failure never
certifies anything beyond the declared truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    EVEN,
    ODD,
    AlgebraElement,
    DifferentialOperator,
    Generator,
    OperatorTerm,
    Truncation,
)
from .cylinders import count_index1_positive_only
from .errors import InvariantBreach, ValidationError
from .primitives import solve_primitive
from .surface import gamma_class_matrix_profile

UNTWISTED = "untwisted"
TWISTED = "twisted"
FULLY_TWISTED = "fully_twisted"


@dataclass(frozen=True)
class PlanarTorsionDescriptor:
    """Combinatorics of a planar torsion domain.

    ``binding`` orbits (m of them), ``boundary`` tori (n >= 1) and
    ``interface`` tori (r) satisfy m + n + 2r = k0 + 1.  Torus classes and
    the page class are integer vectors in a declared lattice; ``omega`` is
    an optional rational functional used for twisted runs.
    """

    m: int
    n: int
    r: int
    lattice_rank: int = 0
    page_class: tuple = ()
    torus_classes: tuple = ()
    omega: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("planar torsion needs n >= 1 boundary tori")
        if self.m < 0 or self.r < 0:
            raise ValidationError("m and r must be nonnegative")
        if self.torus_classes and len(self.torus_classes) != self.n + self.r:
            raise ValidationError("need one torus class per boundary/interface torus")
        for cls in self.torus_classes:
            if len(cls) != self.lattice_rank:
                raise ValidationError("torus class length must match lattice rank")
        if self.page_class and len(self.page_class) != self.lattice_rank:
            raise ValidationError("page class length must match lattice rank")
        if self.omega and len(self.omega) != self.lattice_rank:
            raise ValidationError("omega length must match lattice rank")

    @property
    def order(self):
        return self.m + self.n + 2 * self.r - 1


def descriptor_generators(desc):
    """Generators of the perturbed complex: binding orbits plus an
    elliptic/hyperbolic pair per torus.

    Binding orbits are elliptic (even); torus orbits split into an even
    elliptic orbit and an odd hyperbolic orbit, the elliptic one carrying
    slightly larger action so gradient cylinders decrease action.
    """
    gens = {}
    denom = 8 * (desc.m + desc.n + desc.r + 1)
    for i in range(1, desc.m + 1):
        name = f"b{i:02d}"
        gens[name] = Generator(name, EVEN, 1 + Fraction(i, denom))
    for i in range(1, desc.n + desc.r + 1):
        h = f"t{i:02d}h"
        e = f"t{i:02d}e"
        gens[h] = Generator(h, ODD, 1 + Fraction(desc.m + i, denom))
        gens[e] = Generator(e, EVEN, 1 + Fraction(desc.m + i, denom) + Fraction(1, 4 * denom))
    return gens


def _twist_exponent(desc, cls, mode):
    """Map a lattice class to the exponent used in the requested mode."""
    if mode == UNTWISTED or desc.lattice_rank == 0:
        return ()
    if mode == FULLY_TWISTED:
        return tuple(cls)
    if mode == TWISTED:
        if not desc.omega:
            return (0,)
        value = sum(Fraction(a) * b for a, b in zip(desc.omega, cls))
        if value.denominator != 1:
            raise ValidationError(
                "omega must take integer values on the declared classes; rescale it"
            )
        return (int(value),)
    raise ValidationError(f"unknown coefficient mode {mode}")


def planar_torsion_differential(desc, mode=UNTWISTED):
    """Differential and distinguished monomial of a planar torsion domain.

    The page curve contributes the single hbar^k0 term differentiating once
    by the first torus' hyperbolic orbit, once by every binding orbit and
    boundary-torus elliptic orbit past the first torus, and twice (with a
    factor 1/2 each) by every interface-torus elliptic orbit.  Every torus
    additionally contributes the gradient-cylinder term
    (z^[T_i] - 1) q_{t_i^h} d/dq_{t_i^e}.

    Returns (operator, F) where F is the monomial whose differential
    exhibits the torsion: in separating coefficients D(F) = z^dbar hbar^k0
    exactly.
    """
    gens = descriptor_generators(desc)
    rank = 0 if mode == UNTWISTED else (desc.lattice_rank if mode == FULLY_TWISTED else 1)
    if mode != UNTWISTED and desc.lattice_rank == 0:
        rank = 0

    def texp(i):
        cls = desc.torus_classes[i - 1] if desc.torus_classes else (0,) * desc.lattice_rank
        return _twist_exponent(desc, cls, mode) if rank else ()

    page_inputs = [gens["t01h"]]
    page_inputs += [gens[f"b{i:02d}"] for i in range(1, desc.m + 1)]
    page_inputs += [gens[f"t{i:02d}e"] for i in range(2, desc.n + 1)]
    for i in range(1, desc.r + 1):
        page_inputs += [gens[f"t{desc.n + i:02d}e"]] * 2
    page_exp = (
        _twist_exponent(desc, desc.page_class or (0,) * desc.lattice_rank, mode)
        if rank
        else ()
    )
    terms = [
        OperatorTerm.make(
            Fraction(1, 2 ** desc.r),
            (),
            tuple(page_inputs),
            hbar_power=desc.order,
            exp=page_exp,
        )
    ]
    zero = (0,) * rank
    for i in range(1, desc.n + desc.r + 1):
        h = gens[f"t{i:02d}h"]
        e = gens[f"t{i:02d}e"]
        exp = texp(i)
        terms.append(OperatorTerm.make(1, (h,), (e,), hbar_power=0, exp=exp))
        terms.append(OperatorTerm.make(-1, (h,), (e,), hbar_power=0, exp=zero))

    operator = DifferentialOperator(terms, rank)
    if not operator.is_odd():
        raise InvariantBreach("planar torsion differential must be odd")

    f = AlgebraElement.from_generators(_f_word(desc, gens), rank=rank)
    return operator, f


def _f_word(desc, gens):
    word = [gens[f"b{i:02d}"] for i in range(1, desc.m + 1)]
    word.append(gens["t01h"])
    word += [gens[f"t{i:02d}e"] for i in range(2, desc.n + 1)]
    for i in range(1, desc.r + 1):
        word += [gens[f"t{desc.n + i:02d}e"]] * 2
    return word


def default_descriptor_truncation(desc, hbar_slack=1, exponent_box=3):
    gens = descriptor_generators(desc)
    f_action = sum((g.action for g in _f_word(desc, gens)), Fraction(0))
    # Room for the distinguished monomial and nothing heavier.
    return Truncation(
        action_bound=f_action + 1,
        hbar_bound=desc.order + hbar_slack,
        exponent_box=exponent_box,
    )


@dataclass(frozen=True)
class UpperBound:
    order: int
    witness: AlgebraElement
    truncation: Truncation


def torsion_upper_bound(operator, generators, truncation):
    """Least k within the hbar bound such that hbar^k admits a primitive in
    the truncated complex; None when no power is exact there."""
    for k in range(truncation.hbar_bound + 1):
        target = AlgebraElement.hbar(k, operator.rank) if k else AlgebraElement.one(operator.rank)
        outcome = solve_primitive(operator, target, generators, truncation)
        if outcome.found:
            return UpperBound(k, outcome.witness, truncation)
    return None


@dataclass(frozen=True)
class LowerBoundCertificate:
    granted: bool
    order: int
    action_bound: Fraction
    count_rows: dict
    gamma_rank: int
    gamma_rank_expected: int
    nullspace_is_ones: bool
    solver_cross_check: bool
    refusal_reason: str | None = None
    notes: tuple = ()


def lower_bound_certificate(ds, orbits, cylinders, operator, generators, k, truncation):
    """Vanishing-count certificate: no primitive of hbar^k exists below the
    truncation when every rigid positive-end count with g + r <= k + 1
    vanishes and interface configurations are excluded homologically.

    Refusals carry the first nonzero count.  A granted certificate is
    cross-validated by an independent solver failure; disagreement raises,
    since it would mean the counts and the algebra contradict each other.
    """
    table = count_index1_positive_only(
        ds, orbits, cylinders, max_g_plus_r=k + 1, action_bound=truncation.action_bound
    )
    notes = [
        "curves with one positive end: none exist (every model curve is a cylinder)",
        "genus >= 1: none exist (all model curves are genus-zero cylinder covers)",
    ]
    refusal = None
    for (g, r), entries in sorted(table.items()):
        for key, data in entries.items():
            if data["total"] != 0:
                refusal = (
                    f"nonzero signed count {data['total']} for positive ends "
                    f"{key} at (g, r) = ({g}, {r})"
                )
                break
        if refusal:
            break

    rank, ones = gamma_class_matrix_profile(ds)
    expected = max(len(ds.gamma_components) - 1, 0)
    if refusal is None:
        if k + 1 > max(len(ds.gamma_components) - 1, 0) and ds.gamma_components:
            refusal = (
                "homological pre-filter inapplicable: curves with up to "
                f"{k + 1} ends could use every interface component"
            )
        elif rank != expected or not ones:
            refusal = (
                f"gamma class matrix has rank {rank} (expected {expected}) or a "
                "nullspace other than the all-ones line; interface orbits are "
                "not excluded"
            )
        else:
            notes.append(
                "interface-orbit configurations excluded: any proper sub-collection "
                "of gamma components has no vanishing positive combination"
            )

    solver_outcome = solve_primitive(
        operator,
        AlgebraElement.hbar(k, operator.rank) if k else AlgebraElement.one(operator.rank),
        generators,
        Truncation(
            action_bound=truncation.action_bound,
            hbar_bound=k,
            cover_max=truncation.cover_max,
            exponent_box=truncation.exponent_box,
        ),
    )
    if refusal is None and solver_outcome.found:
        raise InvariantBreach(
            "vanishing counts granted a certificate but the solver found a primitive"
        )

    return LowerBoundCertificate(
        granted=refusal is None,
        order=k,
        action_bound=truncation.action_bound,
        count_rows=table,
        gamma_rank=rank,
        gamma_rank_expected=expected,
        nullspace_is_ones=ones,
        solver_cross_check=not solver_outcome.found,
        refusal_reason=refusal,
        notes=tuple(notes),
    )


def coefficient_morphism(element, projection, target_rank):
    """Push z-exponents through a lattice quotient map.

    ``projection`` is a list of integer rows of length source rank; the
    untwisted morphism is the projection to rank zero (empty row list).
    """
    for row in projection:
        if len(row) != element.rank:
            raise ValidationError("projection rows must match the source rank")
    if len(projection) != target_rank:
        raise ValidationError("projection must have target_rank rows")
    return element.project(projection, target_rank)


@dataclass(frozen=True)
class TorsionReport:
    order_upper: UpperBound | None
    order_lower: LowerBoundCertificate | None
    truncation: Truncation
    upper_source: str = ""

    def __post_init__(self):
        # A granted certificate at K excludes primitives of hbar^K, so any
        # upper bound must be at least K + 1.
        if (
            self.order_upper is not None
            and self.order_lower is not None
            and self.order_lower.granted
            and self.order_lower.order >= self.order_upper.order
        ):
            raise InvariantBreach("lower bound certificate contradicts upper bound")
