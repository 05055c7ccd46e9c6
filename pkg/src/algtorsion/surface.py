"""Combinatorial divided surfaces: two sided Morse data glued along a
dividing multicurve, with signed flow lines and interface homology classes.

The surface is never realized geometrically.  A side stores its components
with genus and boundary circles, critical points of the side function with
Morse index 0 or 1 (index 2 does not occur), and signed internal flow
lines.  Gluing flips the plus side, so plus-side index 0 points become
index 2 points of the glued function; all flow lines are stored ascending.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .errors import UnknownGeneratorError, ValidationError

PLUS = "plus"
MINUS = "minus"


@dataclass(frozen=True)
class SurfaceComponent:
    id: str
    genus: int
    boundary_circles: tuple


@dataclass(frozen=True)
class CriticalPoint:
    id: str
    component: str
    index: int  # Morse index of the side function, 0 or 1


@dataclass(frozen=True)
class InternalFlowLine:
    id: str
    start: str  # critical point or boundary circle id
    end: str
    sign: int


@dataclass(frozen=True)
class SidedSurface:
    side: str
    components: tuple
    critical_points: tuple
    flow_lines: tuple

    def validate(self):
        if self.side not in (PLUS, MINUS):
            raise ValidationError(f"side must be plus or minus, got {self.side}")
        circle_owner = {}
        for comp in self.components:
            if not comp.boundary_circles:
                raise ValidationError(
                    f"component {comp.id} has empty boundary", locus=self.side
                )
            if comp.genus < 0:
                raise ValidationError(f"component {comp.id}: negative genus")
            for c in comp.boundary_circles:
                if c in circle_owner:
                    raise ValidationError(f"boundary circle {c} listed twice")
                circle_owner[c] = comp.id
        comp_ids = {c.id for c in self.components}
        counts = {c.id: [0, 0] for c in self.components}
        for cp in self.critical_points:
            if cp.component not in comp_ids:
                raise ValidationError(
                    f"critical point {cp.id} references unknown component {cp.component}"
                )
            if cp.index not in (0, 1):
                raise ValidationError(
                    f"critical point {cp.id}: side Morse index must be 0 or 1"
                )
            counts[cp.component][cp.index] += 1
        for comp in self.components:
            chi = 2 - 2 * comp.genus - len(comp.boundary_circles)
            n0, n1 = counts[comp.id]
            if n0 - n1 != chi:
                raise ValidationError(
                    f"{self.side} component {comp.id}: #index0 - #index1 = {n0 - n1} "
                    f"but Euler characteristic is {chi}"
                )
        return circle_owner

    def euler_characteristic(self):
        return sum(2 - 2 * c.genus - len(c.boundary_circles) for c in self.components)

    def critical_by_id(self):
        return {cp.id: cp for cp in self.critical_points}

    def circles(self):
        out = []
        for comp in self.components:
            out.extend(comp.boundary_circles)
        return out


@dataclass(frozen=True)
class GammaComponent:
    id: str
    plus_circle: str
    minus_circle: str
    h1_class: tuple


@dataclass(frozen=True)
class CrossingFlowLine:
    id: str
    start: str  # minus-side critical point
    gamma: str  # interface component crossed
    end: str  # plus-side critical point
    sign: int
    h2_class: tuple = ()


@dataclass(frozen=True)
class FlowLineRecord:
    """Derived view of one stored flow line."""

    id: str
    start: str
    end: str
    sign: int
    crosses_gamma: bool
    start_index: int | None  # h_eps Morse index, None for boundary endpoints
    end_index: int | None
    gamma: str | None = None
    touches_boundary: bool = False


@dataclass
class DividedSurface:
    plus: SidedSurface
    minus: SidedSurface
    gamma_components: tuple
    crossing_flow_lines: tuple
    h1_rank: int = field(default=-1)

    def __post_init__(self):
        if self.h1_rank < 0:
            self.h1_rank = 2 * self.genus()

    def euler_characteristic(self):
        return self.plus.euler_characteristic() + self.minus.euler_characteristic()

    def genus(self):
        chi = self.euler_characteristic()
        if chi % 2:
            raise ValidationError("odd Euler characteristic for a closed surface")
        return (2 - chi) // 2

    def gamma_by_id(self):
        return {g.id: g for g in self.gamma_components}

    def heps_index(self, cp_id):
        """Morse index of the glued function at a critical point."""
        cp = self._critical().get(cp_id)
        if cp is None:
            raise UnknownGeneratorError(f"unknown critical point {cp_id}")
        side, point = cp
        if side == MINUS:
            return point.index
        return 2 - point.index if point.index == 0 else point.index

    def _critical(self):
        table = {}
        for cp in self.minus.critical_points:
            table[cp.id] = (MINUS, cp)
        for cp in self.plus.critical_points:
            if cp.id in table:
                raise ValidationError(f"critical point id {cp.id} used on both sides")
            table[cp.id] = (PLUS, cp)
        return table

    def critical_points_by_index(self):
        out = {0: [], 1: [], 2: []}
        for cp_id in sorted(self._critical()):
            out[self.heps_index(cp_id)].append(cp_id)
        return out


def build_divided_surface(plus, minus, gamma_components, crossing_flow_lines):
    """Validate and assemble a DividedSurface.

    Rejects boundary count mismatches, Euler characteristic inconsistencies,
    saddle-to-saddle connections and inconsistent signed flow data (the
    Morse differential must square to zero).
    """
    plus_circles = plus.validate()
    minus_circles = minus.validate()
    if plus.side != PLUS or minus.side != MINUS:
        raise ValidationError("sides are mislabelled")
    if len(plus_circles) != len(minus_circles):
        raise ValidationError(
            f"boundary circle counts differ: plus has {len(plus_circles)}, "
            f"minus has {len(minus_circles)}"
        )

    seen_plus, seen_minus = set(), set()
    for g in gamma_components:
        if g.plus_circle not in plus_circles:
            raise ValidationError(f"gamma {g.id}: unknown plus circle {g.plus_circle}")
        if g.minus_circle not in minus_circles:
            raise ValidationError(f"gamma {g.id}: unknown minus circle {g.minus_circle}")
        if g.plus_circle in seen_plus or g.minus_circle in seen_minus:
            raise ValidationError(f"gamma {g.id}: circle glued twice")
        seen_plus.add(g.plus_circle)
        seen_minus.add(g.minus_circle)
    if len(gamma_components) != len(plus_circles):
        raise ValidationError("gluing must pair every boundary circle")

    ds = DividedSurface(plus, minus, tuple(gamma_components), tuple(crossing_flow_lines))

    rank = ds.h1_rank
    total = [0] * rank
    for g in gamma_components:
        if len(g.h1_class) != rank:
            raise ValidationError(
                f"gamma {g.id}: h1 class has length {len(g.h1_class)}, "
                f"expected 2*genus = {rank}"
            )
        total = [a + b for a, b in zip(total, g.h1_class)]
    if any(total):
        raise ValidationError("gamma h1 classes must sum to zero")

    table = ds._critical()
    gamma_ids = {g.id for g in gamma_components}
    for line in crossing_flow_lines:
        if line.start not in table or table[line.start][0] != MINUS:
            raise ValidationError(
                f"crossing line {line.id}: start must be a minus-side critical point"
            )
        if line.end not in table or table[line.end][0] != PLUS:
            raise ValidationError(
                f"crossing line {line.id}: end must be a plus-side critical point"
            )
        if line.gamma not in gamma_ids:
            raise ValidationError(f"crossing line {line.id}: unknown gamma {line.gamma}")
        if line.sign not in (1, -1):
            raise ValidationError(f"crossing line {line.id}: sign must be +1 or -1")
        if ds.heps_index(line.start) == 1 and ds.heps_index(line.end) == 1:
            raise ValidationError(
                f"crossing line {line.id} connects two index-1 points; "
                "saddle-saddle connections are not Morse-Smale"
            )

    for side in (plus, minus):
        circles = set(side.circles())
        for line in side.flow_lines:
            touches = line.start in circles or line.end in circles
            if touches:
                continue
            for endpoint in (line.start, line.end):
                if endpoint not in table or table[endpoint][0] != side.side:
                    raise ValidationError(
                        f"flow line {line.id}: endpoint {endpoint} is not a "
                        f"critical point on the {side.side} side"
                    )
            si, ei = ds.heps_index(line.start), ds.heps_index(line.end)
            if ei - si != 1:
                raise ValidationError(
                    f"flow line {line.id}: internal lines must ascend one index "
                    f"step, got {si} -> {ei}"
                )
            if line.sign not in (1, -1):
                raise ValidationError(f"flow line {line.id}: sign must be +1 or -1")

    if gamma_components and not crossing_flow_lines:
        raise ValidationError(
            "a connected divided surface needs at least one crossing flow line"
        )

    # Signed flow data must be a chain complex.
    morse_complex(ds)
    return ds


def enumerate_flow_lines(ds):
    """All stored flow lines with derived endpoint indices and gamma flags."""
    records = []
    for side in (ds.minus, ds.plus):
        circles = set(side.circles())
        for line in side.flow_lines:
            touches = line.start in circles or line.end in circles
            records.append(
                FlowLineRecord(
                    id=line.id,
                    start=line.start,
                    end=line.end,
                    sign=line.sign,
                    crosses_gamma=False,
                    start_index=None if line.start in circles else ds.heps_index(line.start),
                    end_index=None if line.end in circles else ds.heps_index(line.end),
                    touches_boundary=touches,
                )
            )
    for line in ds.crossing_flow_lines:
        records.append(
            FlowLineRecord(
                id=line.id,
                start=line.start,
                end=line.end,
                sign=line.sign,
                crosses_gamma=True,
                start_index=ds.heps_index(line.start),
                end_index=ds.heps_index(line.end),
                gamma=line.gamma,
            )
        )
    return sorted(records, key=lambda r: r.id)


@dataclass(frozen=True)
class MorseComplexOverQ:
    generators: dict  # index -> list of critical point ids
    boundary1: list  # rows: index-0 points, columns: saddles
    boundary2: list  # rows: saddles, columns: index-2 points


def morse_complex(ds):
    """Chain complex of the glued Morse function from the signed flow lines."""
    by_index = ds.critical_points_by_index()
    pos0 = {cp: i for i, cp in enumerate(by_index[0])}
    pos1 = {cp: i for i, cp in enumerate(by_index[1])}
    pos2 = {cp: i for i, cp in enumerate(by_index[2])}

    d1 = [[Fraction(0)] * len(pos1) for _ in pos0]
    d2 = [[Fraction(0)] * len(pos2) for _ in pos1]
    for rec in enumerate_flow_lines(ds):
        if rec.touches_boundary:
            continue
        if rec.start_index == 0 and rec.end_index == 1:
            d1[pos0[rec.start]][pos1[rec.end]] += rec.sign
        elif rec.start_index == 1 and rec.end_index == 2:
            d2[pos1[rec.start]][pos2[rec.end]] += rec.sign
        # index 0 -> 2 lines belong to two-parameter families; they do not
        # enter the Morse differential.

    if d1 and d2 and not linalg.is_zero_matrix(linalg.matrix_mult(d1, d2)):
        raise ValidationError("signed flow data inconsistent: d1 * d2 != 0")
    return MorseComplexOverQ(dict(by_index), d1, d2)


def morse_homology(ds):
    """Betti numbers (b0, b1, b2) of the Morse complex over the rationals."""
    cx = morse_complex(ds)
    n0 = len(cx.generators[0])
    n1 = len(cx.generators[1])
    n2 = len(cx.generators[2])
    r1 = linalg.rank(cx.boundary1) if n0 and n1 else 0
    r2 = linalg.rank(cx.boundary2) if n1 and n2 else 0
    return (n0 - r1, n1 - r1 - r2, n2 - r2)


def null_homology_check(ds, asymptotics):
    """Whether a weighted sum of gamma classes vanishes in H1 of the surface.

    ``asymptotics`` maps gamma ids to positive multiplicities.  Orbits in
    the interface region project to multiples of the gamma components, so a
    curve with these asymptotics can exist only if the weighted class sum
    is zero.
    """
    table = ds.gamma_by_id()
    total = [Fraction(0)] * ds.h1_rank
    for gamma_id, mult in asymptotics.items():
        if gamma_id not in table:
            raise UnknownGeneratorError(f"unknown gamma component {gamma_id}")
        if mult < 1:
            raise ValidationError("multiplicities must be >= 1")
        cls = table[gamma_id].h1_class
        total = [a + mult * b for a, b in zip(total, cls)]
    return not any(total)


def gamma_class_matrix_profile(ds):
    """Rank of the gamma class matrix and whether its nullspace is the
    all-ones line; used by the homological pre-filter of the lower-bound
    certificate."""
    gammas = sorted(ds.gamma_components, key=lambda g: g.id)
    if not gammas:
        return 0, True
    # Columns are gamma components, rows lattice coordinates.
    rows = [[g.h1_class[i] for g in gammas] for i in range(ds.h1_rank)]
    rank = linalg.rank(rows)
    null = linalg.nullspace(rows, len(gammas))
    ones_line = len(null) == 1 and all(
        null[0][i] == null[0][0] and null[0][0] != 0 for i in range(len(gammas))
    )
    return rank, ones_line
