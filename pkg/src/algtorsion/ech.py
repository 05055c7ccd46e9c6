"""Embedded-contact-homology side: orbit sets, the index I, the filtration
J_+, the multicomplex decomposition of the differential, its spectral
sequence, and the survival invariants f / f_simp.

Relative-class data (c_tau, Q_tau) is trivialization-dependent input, never
computed; model-derived complexes use the circle-invariant trivialization
where both vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from . import linalg
from .errors import InvariantBreach, UnknownGeneratorError, ValidationError

ELLIPTIC = "elliptic"
POSITIVE_HYPERBOLIC = "positive_hyperbolic"
NEGATIVE_HYPERBOLIC = "negative_hyperbolic"
KINDS = (ELLIPTIC, POSITIVE_HYPERBOLIC, NEGATIVE_HYPERBOLIC)

INFINITY = math.inf


@dataclass(frozen=True)
class EmbeddedOrbitECH:
    """An embedded Reeb orbit with its Conley-Zehnder data per iterate.

    ``cz`` maps the iterate k >= 1 to an integer; a plain int means the
    index is constant in k, which is the shape the circle-invariant models
    produce.
    """

    id: str
    kind: str
    action: Fraction
    cz: object = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"orbit {self.id}: unknown kind {self.kind}")
        if self.action <= 0:
            raise ValidationError(f"orbit {self.id}: action must be positive")

    def cz_iterate(self, k):
        if callable(self.cz):
            return int(self.cz(k))
        if isinstance(self.cz, dict):
            try:
                return int(self.cz[k])
            except KeyError:
                raise ValidationError(
                    f"orbit {self.id}: cz data missing for iterate {k}"
                ) from None
        return int(self.cz)

    @property
    def hyperbolic(self):
        return self.kind != ELLIPTIC


class OrbitSetECH:
    """Finite orbit set {(orbit_id, multiplicity)}; hashable and ordered."""

    __slots__ = ("pairs",)

    def __init__(self, pairs=()):
        if isinstance(pairs, dict):
            pairs = pairs.items()
        clean = {}
        for orbit_id, mult in pairs:
            mult = int(mult)
            if mult < 1:
                raise ValidationError("orbit multiplicities must be >= 1")
            clean[orbit_id] = clean.get(orbit_id, 0) + mult
        object.__setattr__(self, "pairs", tuple(sorted(clean.items())))

    def __setattr__(self, *_):
        raise AttributeError("OrbitSetECH is immutable")

    def multiplicity(self, orbit_id):
        return dict(self.pairs).get(orbit_id, 0)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __bool__(self):
        return bool(self.pairs)

    def __eq__(self, other):
        return isinstance(other, OrbitSetECH) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    def union(self, other):
        return OrbitSetECH(self.pairs + other.pairs)

    def action(self, orbits):
        return sum(
            (orbits[o].action * m for o, m in self.pairs), Fraction(0)
        )

    def admissible(self, orbits):
        return all(
            m == 1 or not orbits[o].hyperbolic for o, m in self.pairs
        )

    def all_simple_multiplicities(self):
        return all(m == 1 for _, m in self.pairs)

    def __repr__(self):
        if not self.pairs:
            return "{}"
        return "{" + ",".join(f"({o},{m})" for o, m in self.pairs) + "}"


EMPTY_SET = OrbitSetECH()


@dataclass(frozen=True)
class RelClassData:
    """Trivialization data of a relative homology class between orbit sets."""

    source: OrbitSetECH
    target: OrbitSetECH
    c_tau: int
    q_tau: int
    label: str = ""


def _cz_sum(orbits, orbit_set, upto_full):
    """Sum of CZ indices over iterates 1..m_i (upto_full) or 1..m_i-1."""
    total = 0
    for orbit_id, mult in orbit_set:
        try:
            orbit = orbits[orbit_id]
        except KeyError:
            raise UnknownGeneratorError(f"unknown orbit {orbit_id}") from None
        top = mult if upto_full else mult - 1
        total += sum(orbit.cz_iterate(k) for k in range(1, top + 1))
    return total


def ech_index(orbits, rel):
    """ECH index I = c_tau + Q_tau + CZ sums over all iterates."""
    return (
        rel.c_tau
        + rel.q_tau
        + _cz_sum(orbits, rel.source, True)
        - _cz_sum(orbits, rel.target, True)
    )


def j_plus(orbits, rel):
    """J_+ = -c_tau + Q_tau + truncated CZ sums + |alpha| - |beta|."""
    return (
        -rel.c_tau
        + rel.q_tau
        + _cz_sum(orbits, rel.source, False)
        - _cz_sum(orbits, rel.target, False)
        + len(rel.source)
        - len(rel.target)
    )


def positive_hyperbolic_count(orbits, rel):
    """Number of positive hyperbolic orbits among the alpha_i plus those
    among the beta_j; an orbit on both sides counts twice."""
    return sum(
        1
        for side in (rel.source, rel.target)
        for o, _ in side
        if orbits[o].kind == POSITIVE_HYPERBOLIC
    )


@dataclass(frozen=True)
class Contribution:
    """One holomorphic-curve contribution to the differential.

    ``pos_ends``/``neg_ends`` record the number of curve ends at covers of
    each orbit (the N counts of the index inequality), ``genus`` the genus
    of the underlying curve.  ``irreducible`` and ``ind_eq_i`` flag which
    side conditions the JI inequality checks apply to.
    """

    rel: RelClassData
    sign: int
    genus: int = 0
    pos_ends: tuple = ()
    neg_ends: tuple = ()
    irreducible: bool = True
    ind_eq_i: bool = True

    @property
    def source(self):
        return self.rel.source

    @property
    def target(self):
        return self.rel.target

    def n_positive(self):
        return sum(n for _, n in self.pos_ends)


def ji_bound(contribution):
    """Right-hand side of the JI inequality for an irreducible curve."""
    alpha = len(contribution.source)
    pos_excess = sum(n - 1 for _, n in contribution.pos_ends)
    neg_excess = sum(n - 1 for _, n in contribution.neg_ends)
    return 2 * (contribution.genus - 1 + alpha + pos_excess + neg_excess)


class ECHComplex:
    """Filtered ECH chain data: admissible generators plus contributions.

    Validation pins the structural invariants: every contribution has ECH
    index one, strictly decreases action, respects the JI inequality when
    flagged irreducible (with equality when ind = I), and satisfies the
    parity rule tying J_+ - I to the number of positive hyperbolic orbits
    involved.
    """

    def __init__(self, orbits, generators, contributions):
        self.orbits = dict(orbits)
        gens = list(generators)
        if EMPTY_SET not in gens:
            gens.append(EMPTY_SET)
        seen = set()
        ordered = []
        for g in gens:
            if g in seen:
                continue
            seen.add(g)
            ordered.append(g)
        ordered.sort(key=lambda g: (g.action(self.orbits), repr(g)))
        self.generators = ordered
        self.contributions = tuple(contributions)
        self._validate()

    def _validate(self):
        gen_set = set(self.generators)
        for g in self.generators:
            if not g.admissible(self.orbits):
                raise ValidationError(f"generator {g} is not admissible")
        for c in self.contributions:
            if c.sign not in (1, -1):
                raise ValidationError("contribution signs must be +1 or -1")
            if c.source not in gen_set or c.target not in gen_set:
                raise ValidationError(
                    f"contribution {c.rel.label or c.rel}: endpoints must be generators"
                )
            if c.source.action(self.orbits) <= c.target.action(self.orbits):
                raise ValidationError(
                    f"contribution {c.rel.label or c.rel} does not decrease action"
                )
            index = ech_index(self.orbits, c.rel)
            if index != 1:
                raise ValidationError(
                    f"contribution {c.rel.label or c.rel} has ECH index {index}, not 1"
                )
            jp = j_plus(self.orbits, c.rel)
            if (jp - index) % 2 != positive_hyperbolic_count(self.orbits, c.rel) % 2:
                raise ValidationError(
                    f"contribution {c.rel.label or c.rel} violates the parity rule"
                )
            if c.irreducible:
                bound = ji_bound(c)
                if jp < bound:
                    raise ValidationError(
                        f"contribution {c.rel.label or c.rel} violates the JI inequality"
                    )
                if c.ind_eq_i and jp != bound:
                    raise ValidationError(
                        f"contribution {c.rel.label or c.rel}: ind = I forces JI equality"
                    )

    def max_action(self):
        return max(
            (g.action(self.orbits) for g in self.generators), default=Fraction(0)
        )

    def restricted(self, action_bound=None, keep=None):
        """Subcomplex of generators below the action bound (and in ``keep``)."""
        gens = [
            g
            for g in self.generators
            if (action_bound is None or g.action(self.orbits) < action_bound)
            and (keep is None or g in keep)
        ]
        gen_set = set(gens)
        contribs = [
            c
            for c in self.contributions
            if c.source in gen_set and c.target in gen_set
        ]
        return ECHComplex(self.orbits, gens, contribs)


def decompose_differential(cx, max_relation_degree=None):
    """Split the differential by J_+ = 2k and verify the multicomplex
    relations sum_{i+j=k} d_i d_j = 0.

    Returns the list of matrices [d_0, d_1, ...] over the generator basis
    (rows: targets, columns: sources).  Raises on odd J_+ and on any broken
    relation, reporting a witness generator pair.
    """
    n = len(cx.generators)
    position = {g: i for i, g in enumerate(cx.generators)}
    layers = {}
    for c in cx.contributions:
        jp = j_plus(cx.orbits, c.rel)
        if jp % 2:
            raise ValidationError(
                f"contribution {c.rel.label or c.rel} has odd J_+ = {jp}"
            )
        if jp < 0:
            raise ValidationError(
                f"contribution {c.rel.label or c.rel} has negative J_+"
            )
        k = jp // 2
        matrix = layers.setdefault(
            k, [[Fraction(0)] * n for _ in range(n)]
        )
        matrix[position[c.target]][position[c.source]] += c.sign

    max_k = max(layers, default=0)
    matrices = [
        layers.get(k, [[Fraction(0)] * n for _ in range(n)])
        for k in range(max_k + 1)
    ]

    top = 2 * max_k if max_relation_degree is None else max_relation_degree
    for k in range(top + 1):
        total = [[Fraction(0)] * n for _ in range(n)]
        for i in range(k + 1):
            j = k - i
            if i > max_k or j > max_k:
                continue
            prod = linalg.matrix_mult(matrices[i], matrices[j])
            for r in range(n):
                for c_ in range(n):
                    total[r][c_] += prod[r][c_]
        for r in range(n):
            for c_ in range(n):
                if total[r][c_]:
                    raise ValidationError(
                        "multicomplex relation broken at degree "
                        f"{k}: d_i d_j sums to {total[r][c_]} from "
                        f"{cx.generators[c_]} to {cx.generators[r]}"
                    )
    return matrices


def _empty_index(cx):
    return cx.generators.index(EMPTY_SET)


def _dies_on_page(matrices, n, empty_idx, r):
    """Whether the empty set's class is killed entering page r + 1.

    Zig-zag formulation: chains y_0..y_r with sum_{i+j=s} d_i y_j = 0 for
    all s < r and sum_{i+j=r} d_i y_j = the empty set.
    """
    columns = []
    col_keys = []
    for j in range(r + 1):
        for g in range(n):
            col = {}
            for s in range(r + 1):
                i = s - j
                if i < 0 or i >= len(matrices):
                    continue
                for row in range(n):
                    v = matrices[i][row][g]
                    if v:
                        col[(s, row)] = col.get((s, row), Fraction(0)) + v
            columns.append(col)
            col_keys.append((j, g))
    rhs = {(r, empty_idx): Fraction(1)}
    solution = linalg.solve_columns(columns, rhs)
    return solution is not None


def _sufficient_condition(matrices, n, empty_idx, k):
    """Whether some x satisfies (d_0 + ... + d_k) x = empty set."""
    columns = []
    for g in range(n):
        col = {}
        for i in range(min(k, len(matrices) - 1) + 1):
            for row in range(n):
                v = matrices[i][row][g]
                if v:
                    col[row] = col.get(row, Fraction(0)) + v
        columns.append(col)
    return linalg.solve_columns(columns, {empty_idx: Fraction(1)}) is not None


@dataclass(frozen=True)
class SurvivalReport:
    f: object  # int or INFINITY
    f_sufficient: object
    pages_checked: int
    generators: int

    @property
    def agree(self):
        return self.f == self.f_sufficient


def survival_report(cx, action_bound=None, simple_only=False, curve_graph=None):
    """Compute the page at which the empty set dies, two ways.

    ``f`` comes from the literal spectral-sequence construction, and
    ``f_sufficient`` from the one-shot linear solve (d_0 + ... + d_k) x =
    empty set.  The sufficient condition can only overestimate; if it ever
    came out smaller than f the two computations would contradict each
    other and we raise.
    """
    sub = cx
    if simple_only:
        simple = simplicity_closure(cx, curve_graph or cx.contributions)
        sub = cx.restricted(action_bound, keep={g for g in cx.generators if simple(g)})
    elif action_bound is not None:
        sub = cx.restricted(action_bound)

    matrices = decompose_differential(sub)
    n = len(sub.generators)
    empty_idx = _empty_index(sub)
    # Death can occur past the largest J_+ layer through long zig-zags, so
    # allow dim-many extra pages before declaring survival.
    pages = len(matrices) + n + 1

    f = INFINITY
    if all(not m[empty_idx][g] for m in matrices for g in range(n)):
        # Nothing ever maps onto the empty set, so it survives every page.
        pages = 0
    for k in range(pages):
        if _dies_on_page(matrices, n, empty_idx, k):
            f = k
            break

    f_suff = INFINITY
    for k in range(len(matrices)):
        if _sufficient_condition(matrices, n, empty_idx, k):
            f_suff = k
            break

    if f > f_suff:
        raise InvariantBreach(
            f"sufficient condition gives f <= {f_suff} but the spectral "
            f"sequence says the empty set survives to page {f}"
        )
    return SurvivalReport(f, f_suff, pages, n)


def f_value(cx, action_bound=None, simple_only=False, curve_graph=None):
    """Smallest k such that the empty set does not survive to page E^{k+1};
    INFINITY when it survives every page."""
    return survival_report(cx, action_bound, simple_only, curve_graph).f


def simplicity_closure(cx, curve_graph):
    """Predicate: an orbit set is simple when it has all multiplicities one
    and so does everything reachable from it through (possibly broken)
    curves in the supplied graph."""
    edges = {}
    for c in curve_graph:
        edges.setdefault(c.source, set()).add(c.target)

    cache = {}

    def simple(orbit_set):
        if orbit_set in cache:
            return cache[orbit_set]
        seen = set()
        stack = [orbit_set]
        verdict = True
        while stack:
            current = stack.pop()
            if current in seen:
                continue
            seen.add(current)
            if not current.all_simple_multiplicities():
                verdict = False
                break
            stack.extend(edges.get(current, ()))
        cache[orbit_set] = verdict
        return verdict

    return simple


@dataclass(frozen=True)
class ECHLowerBound:
    granted: bool
    k: int
    action_bound: object
    counts: dict
    f_computed: object
    refusal_reason: str | None = None


def ech_lower_bound_certificate(cx, action_bound, k, counts=None):
    """Vanishing-count lower bound: f^L >= k when every signed count of
    I = 1 curves to the empty set with g + N_+ <= k vanishes.

    ``counts`` defaults to the complex's own contribution list, keyed by
    (source, class label, genus, N_+).  The granted bound is cross-checked
    against the computed f value; disagreement raises.
    """
    if counts is None:
        counts = {}
        for c in cx.contributions:
            if c.target != EMPTY_SET:
                continue
            if action_bound is not None and c.source.action(cx.orbits) >= action_bound:
                continue
            key = (repr(c.source), c.rel.label, c.genus, c.n_positive())
            counts[key] = counts.get(key, 0) + c.sign

    refusal = None
    for (source, label, genus, n_pos), total in sorted(counts.items()):
        if genus + n_pos <= k and total != 0:
            refusal = (
                f"nonzero count {total} for curves from {source} "
                f"(class {label or 'default'}, g={genus}, N+={n_pos})"
            )
            break

    f_computed = f_value(cx, action_bound)
    if refusal is None and f_computed < k:
        raise InvariantBreach(
            f"certificate claims f >= {k} but the spectral sequence computed {f_computed}"
        )
    return ECHLowerBound(
        granted=refusal is None,
        k=k,
        action_bound=action_bound,
        counts=counts,
        f_computed=f_computed,
        refusal_reason=refusal,
    )


def scaling_relabel(cx, c):
    """Rescale the contact form: all actions multiply by c > 0; indices,
    J_+ and contributions are unchanged."""
    c = Fraction(c)
    if c <= 0:
        raise ValidationError("scaling constant must be positive")
    orbits = {
        k: replace(o, action=o.action * c) for k, o in cx.orbits.items()
    }
    return ECHComplex(orbits, cx.generators, cx.contributions)


def enumerate_orbit_sets(orbits, action_bound):
    """All admissible orbit sets with action below the bound."""
    ids = sorted(orbits)
    sets = []

    def extend(prefix, start, remaining):
        sets.append(OrbitSetECH(prefix))
        for i in range(start, len(ids)):
            orbit = orbits[ids[i]]
            if orbit.action >= remaining:
                continue
            max_mult = 1 if orbit.hyperbolic else int(remaining / orbit.action)
            mult = 1
            while mult <= max_mult and mult * orbit.action < remaining:
                extend(prefix + [(ids[i], mult)], i + 1, remaining - mult * orbit.action)
                mult += 1

    extend([], 0, Fraction(action_bound))
    return sets
