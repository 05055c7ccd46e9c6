"""Holomorphic cylinders of the circle-invariant model.

Every relevant curve is a cover of a gradient-flow-line cylinder or a
trivial cylinder over an orbit.  Cylinders over flow lines come in five
types determined by the endpoint indices of the glued Morse function:

    type 1: index 0 -> 2 across the interface, index 2, both ends positive
    type 2: plus side, 1 -> 2, index 1, one negative end (at the saddle)
    type 3: minus side, 0 -> 1, index 1, one negative end (at the saddle)
    type 4: 0 -> 1 across the interface, index 1, both ends positive
    type 5: 1 -> 2 across the interface, index 1, both ends positive

Only index-1 cylinders are rigid and enter the differential; type 1 and
trivial cylinders are enumerated but contribute no operator terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import DifferentialOperator, OperatorTerm
from .errors import ValidationError
from .orbits import orbit_table
from .surface import enumerate_flow_lines

TYPE_INDEX = {1: 2, 2: 1, 3: 1, 4: 1, 5: 1, "trivial": 0}


@dataclass(frozen=True)
class Cylinder:
    flow_line: str  # flow line id, or critical point id for trivial cylinders
    cover: int
    positive_ends: tuple  # ReebOrbit refs
    negative_ends: tuple
    cyl_type: object  # 1..5 or "trivial"
    fredholm_index: int
    sign: int
    homology_class: tuple = ()

    def ends(self):
        return self.positive_ends + self.negative_ends


def classify_crossing(start_index, end_index):
    if (start_index, end_index) == (0, 2):
        return 1
    if (start_index, end_index) == (0, 1):
        return 4
    if (start_index, end_index) == (1, 2):
        return 5
    raise ValidationError(f"no crossing cylinder type for {start_index} -> {end_index}")


def enumerate_cylinders(ds, orbits, cover_max, class_assignment=None):
    """All cylinders of the model: covers of flow-line cylinders plus the
    trivial cylinders over every orbit.

    ``class_assignment`` optionally maps crossing flow line ids to exponent
    vectors (the z-class carried by the curve); it defaults to zero, which
    is the untwisted convention.
    """
    table = orbit_table(orbits)
    rank = 0
    if class_assignment:
        rank = len(next(iter(class_assignment.values())))
    zero = (0,) * rank

    cylinders = []
    for rec in enumerate_flow_lines(ds):
        if rec.touches_boundary:
            continue
        cls = tuple(class_assignment.get(rec.id, zero)) if class_assignment else zero
        for n in range(1, cover_max + 1):
            start = table[(rec.start, n)]
            end = table[(rec.end, n)]
            if rec.crosses_gamma:
                ctype = classify_crossing(rec.start_index, rec.end_index)
                cyl = Cylinder(
                    flow_line=rec.id,
                    cover=n,
                    positive_ends=(end, start),
                    negative_ends=(),
                    cyl_type=ctype,
                    fredholm_index=end.cz_index + start.cz_index,
                    sign=rec.sign,
                    homology_class=cls,
                )
            else:
                # Same side: the local extremum is the positive end.
                if rec.start_index in (0, 2):
                    pos, neg = start, end
                else:
                    pos, neg = end, start
                ctype = 2 if rec.end_index == 2 else 3
                cyl = Cylinder(
                    flow_line=rec.id,
                    cover=n,
                    positive_ends=(pos,),
                    negative_ends=(neg,),
                    cyl_type=ctype,
                    fredholm_index=pos.cz_index - neg.cz_index,
                    sign=rec.sign,
                    homology_class=cls,
                )
            if cyl.fredholm_index != TYPE_INDEX[ctype]:
                raise ValidationError(
                    f"cylinder over {rec.id} cover {n}: index {cyl.fredholm_index} "
                    f"does not match type {ctype}"
                )
            cylinders.append(cyl)

    for orbit in sorted(orbits, key=lambda o: o.name):
        cylinders.append(
            Cylinder(
                flow_line=orbit.critical_point,
                cover=orbit.cover,
                positive_ends=(orbit,),
                negative_ends=(orbit,),
                cyl_type="trivial",
                fredholm_index=0,
                sign=1,
                homology_class=zero,
            )
        )
    return cylinders


def automatic_transversality_check(cylinder):
    """Index criterion for automatic regularity at genus zero:

    ind > 2g - 2 + #Gamma_0, where #Gamma_0 counts ends at orbits of even
    Conley-Zehnder index.
    """
    even_ends = sum(1 for o in cylinder.ends() if o.cz_index % 2 == 0)
    return cylinder.fredholm_index > -2 + even_ends


def reject_branched_cover(genus, positive_ends, declared_index):
    """Refuse branched-cover-of-trivial-cylinder records.

    Covers of trivial cylinders over elliptic orbits satisfy
    ind = 2g + 2(#positive ends - 1) >= 0; a record claiming a smaller
    index is not a curve of the model and is rejected.
    """
    bound = 2 * genus + 2 * (positive_ends - 1)
    if declared_index < bound:
        raise ValidationError(
            f"branched cover record violates the index bound: "
            f"declared {declared_index} < {bound}"
        )
    return True


def count_index1_positive_only(ds, orbits, cylinders, max_g_plus_r, action_bound):
    """Signed counts of rigid curves with only positive ends, keyed by the
    positive-end orbit set.

    The model contains no curves of positive genus and every curve is a
    cylinder, so only (g, r) = (0, 2) can carry nonzero counts; those come
    from the crossing cylinders of types 4 and 5.  Rows are reported for
    every (g, r) with g + r <= max_g_plus_r, with per-cover subtotals.
    """
    rows = {}
    for g in range(0, max_g_plus_r):
        for r in range(1, max_g_plus_r - g + 1):
            rows[(g, r)] = {}
    for cyl in cylinders:
        if cyl.cyl_type not in (4, 5):
            continue
        if cyl.fredholm_index != 1 or cyl.negative_ends:
            continue
        total_action = sum((o.action for o in cyl.positive_ends), Fraction(0))
        if total_action >= action_bound:
            continue
        key = tuple(sorted(o.name for o in cyl.positive_ends))
        if (0, 2) not in rows:
            continue
        entry = rows[(0, 2)].setdefault(key, {})
        entry[cyl.cover] = entry.get(cyl.cover, 0) + cyl.sign
    table = {}
    for (g, r), entries in sorted(rows.items()):
        formatted = {}
        for key, subtotals in sorted(entries.items()):
            formatted[key] = {
                "by_cover": dict(sorted(subtotals.items())),
                "total": sum(subtotals.values()),
            }
        table[(g, r)] = formatted
    return table


@dataclass(frozen=True)
class CoefficientConfig:
    """Conventions entering the assembled differential.

    ``cover_weight(n)`` is the coefficient carried by an n-fold unbranched
    cover; the default 1/n is the asymptotic-marker quotient convention
    (n marker pairs over a deck group of order n, divided by the
    combinatorial factor).  All certified computations evaluate on simple
    orbit monomials, where every convention agrees.
    """

    rank: int = 0
    cover_weight: object = None

    def weight(self, n):
        if self.cover_weight is not None:
            return Fraction(self.cover_weight(n))
        return Fraction(1, n)


def check_class_consistency(ds, cylinders):
    """Reject inconsistent z-class data.

    Parallel flow lines through different interface components may carry
    different classes (their difference is an interface torus class), but
    lines with the same endpoints through the same component describe the
    same region and must agree.  Covers must carry their base line's class.
    """
    gamma_of = {line.id: line.gamma for line in ds.crossing_flow_lines}
    seen = {}
    for cyl in cylinders:
        if cyl.cyl_type == "trivial":
            continue
        endpoints = tuple(sorted(o.critical_point for o in cyl.ends()))
        key = (endpoints, gamma_of.get(cyl.flow_line))
        base = seen.setdefault((cyl.flow_line,), cyl.homology_class)
        if base != cyl.homology_class:
            raise ValidationError(
                f"covers of flow line {cyl.flow_line} carry different classes"
            )
        prior = seen.setdefault(key, cyl.homology_class)
        if prior != cyl.homology_class:
            raise ValidationError(
                f"inconsistent z-class data for lines {key[0]} through {key[1]}"
            )


def assemble_sft_differential(ds, orbits, cylinders, config=None):
    """Assemble the differential from signed rigid cylinder counts.

    Same-side cylinders (types 2 and 3) yield first-order terms: the
    negative-end orbit is produced, the positive-end orbit consumed, no
    hbar.  Crossing cylinders of types 4 and 5 yield order-two terms with
    one hbar and no outputs.  Type-1 cylinders have index 2, are not rigid
    and contribute nothing.  Terms with equal keys are merged, so opposite
    signs cancel here and not downstream.
    """
    config = config or CoefficientConfig()
    rank = config.rank
    check_class_consistency(ds, cylinders)
    spec_terms = []
    for cyl in sorted(cylinders, key=lambda c: (str(c.flow_line), c.cover)):
        if cyl.cyl_type == "trivial" or cyl.fredholm_index != 1:
            continue
        weight = Fraction(cyl.sign) * config.weight(cyl.cover)
        exp = cyl.homology_class if rank else ()
        if len(exp) != rank:
            raise ValidationError("cylinder class does not match coefficient rank")
        if cyl.cyl_type in (2, 3):
            pos = cyl.positive_ends[0].generator()
            neg = cyl.negative_ends[0].generator()
            spec_terms.append(
                OperatorTerm.make(weight, (neg,), (pos,), hbar_power=0, exp=exp)
            )
        else:
            ins = tuple(o.generator() for o in cyl.positive_ends)
            spec_terms.append(
                OperatorTerm.make(weight, (), ins, hbar_power=1, exp=exp)
            )
    operator = DifferentialOperator(spec_terms, rank)
    if not operator.is_odd():
        raise ValidationError("assembled differential has an even term")
    operator.check_truncation_preserving(strict=True)
    return operator
