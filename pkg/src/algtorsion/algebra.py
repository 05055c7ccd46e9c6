"""Z2-graded commutative algebra with hbar and group-ring coefficients.

The algebra is generated by symbols q_g (one per Reeb-orbit generator), is
graded commutative for the generator parities, and carries a formal even
variable hbar.  Coefficients are group-ring elements z^d over a fixed
exponent lattice.  Differential operators are finite sums of terms

    c * z^d * hbar^j * q_{o_1}...q_{o_k} * d/dq_{i_1} ... d/dq_{i_s}

acting by iterated graded left derivatives followed by left multiplication
with the output monomial.

Sign conventions (fixed once, validated globally through square-zero checks
rather than per term):

* Normal form sorts generators by name.  Transposing two adjacent odd
  generators flips the sign; a repeated odd generator kills the monomial.
* The derivative d/dq_a is a left derivative of parity |a|:
  d/dq_a (q_{b_1}...q_{b_r}) = sum over positions i with b_i = a of
  (-1)^(|a|*(|b_1|+...+|b_{i-1}|)) * q_{b_1}...omit i...q_{b_r}.
* In a term the input list is kept sorted and the rightmost derivative is
  applied first, so d/dq_a d/dq_b means "apply d/dq_b, then d/dq_a".
  With a < b both odd this gives (hbar d2/dq_a dq_b)(q_a q_b) = -hbar.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import TruncationError, UnknownGeneratorError, ValidationError
from .groupring import GroupRingElement

EVEN = 0
ODD = 1


@dataclass(frozen=True, order=True)
class Generator:
    """One polynomial generator q_gamma of the algebra.

    ``parity`` is the Z2 degree, ``action`` the positive action of the
    underlying orbit and ``kappa`` its covering multiplicity.
    """

    name: str
    parity: int
    action: Fraction
    kappa: int = 1

    def __post_init__(self):
        if self.parity not in (EVEN, ODD):
            raise ValidationError(f"generator {self.name}: parity must be 0 or 1")
        if self.action <= 0:
            raise ValidationError(f"generator {self.name}: action must be positive")
        if self.kappa < 1:
            raise ValidationError(f"generator {self.name}: kappa must be >= 1")


@dataclass(frozen=True)
class Monomial:
    """Input record for normalize(): a word in the generators with coefficient."""

    generators: tuple
    coefficient: GroupRingElement
    hbar_power: int = 0


def koszul_sort(gens):
    """Sort a generator word into normal form.

    Returns (sorted_tuple, sign) or None when an odd generator repeats.
    The sign counts inversions between odd generators only.
    """
    gens = tuple(gens)
    names = [g.name for g in gens]
    sign = 1
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if names[i] > names[j] and gens[i].parity == ODD and gens[j].parity == ODD:
                sign = -sign
            if names[i] == names[j] and gens[i].parity == ODD:
                return None
    return tuple(sorted(gens, key=lambda g: g.name)), sign


def word_parity(gens):
    return sum(g.parity for g in gens) % 2


def word_action(gens):
    return sum((g.action for g in gens), Fraction(0))


class AlgebraElement:
    """Normalized sparse sum of monomials q_w * z^e * hbar^j with rational coefficients.

    Internally keyed by (generator word, exponent vector, hbar power); the
    normal form makes equality decidable by direct comparison.
    """

    __slots__ = ("rank", "terms")

    def __init__(self, rank, terms=None):
        self.rank = rank
        clean = {}
        for (gens, exp, hbar), coeff in (terms or {}).items():
            coeff = Fraction(coeff)
            if not coeff:
                continue
            if len(exp) != rank:
                raise ValidationError(f"exponent {exp} does not match rank {rank}")
            if hbar < 0:
                raise ValidationError("hbar power must be nonnegative")
            key = (tuple(gens), tuple(exp), int(hbar))
            clean[key] = clean.get(key, Fraction(0)) + coeff
        self.terms = {k: c for k, c in clean.items() if c}

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, rank=0):
        return cls(rank, {})

    @classmethod
    def one(cls, rank=0):
        return cls(rank, {((), (0,) * rank, 0): Fraction(1)})

    @classmethod
    def hbar(cls, power=1, rank=0):
        return cls(rank, {((), (0,) * rank, power): Fraction(1)})

    @classmethod
    def from_generators(cls, gens, rank=0, coeff=1, exp=None, hbar=0):
        sorted_word = koszul_sort(gens)
        if sorted_word is None:
            return cls.zero(rank)
        word, sign = sorted_word
        exp = tuple(exp) if exp is not None else (0,) * rank
        return cls(rank, {(word, exp, hbar): Fraction(coeff) * sign})

    # -- structure ----------------------------------------------------

    def is_zero(self):
        return not self.terms

    def parity(self):
        """Z2 degree when homogeneous, None for mixed or zero elements."""
        parities = {word_parity(gens) for (gens, _, _) in self.terms}
        if len(parities) == 1:
            return parities.pop()
        return None

    def parity_part(self, parity):
        return AlgebraElement(
            self.rank,
            {k: c for k, c in self.terms.items() if word_parity(k[0]) == parity},
        )

    def min_hbar(self):
        """Lowest hbar power present, or None for the zero element."""
        if not self.terms:
            return None
        return min(h for (_, _, h) in self.terms)

    def max_action(self):
        if not self.terms:
            return Fraction(0)
        return max(word_action(gens) for (gens, _, _) in self.terms)

    def truncate_hbar(self, bound):
        return AlgebraElement(
            self.rank, {k: c for k, c in self.terms.items() if k[2] <= bound}
        )

    def hbar_multiply(self, power):
        return AlgebraElement(
            self.rank,
            {(g, e, h + power): c for (g, e, h), c in self.terms.items()},
        )

    def project(self, matrix, target_rank):
        """Push all z-exponents through an integer lattice map."""
        terms = {}
        for (gens, exp, h), coeff in self.terms.items():
            ne = tuple(
                sum(row[i] * exp[i] for i in range(self.rank)) for row in matrix
            )
            key = (gens, ne, h)
            terms[key] = terms.get(key, Fraction(0)) + coeff
        return AlgebraElement(target_rank, terms)

    # -- arithmetic ---------------------------------------------------

    def _check_rank(self, other):
        if self.rank != other.rank:
            raise ValidationError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other):
        self._check_rank(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return AlgebraElement(self.rank, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return AlgebraElement(self.rank, {k: -c for k, c in self.terms.items()})

    def scale(self, value):
        value = Fraction(value)
        return AlgebraElement(self.rank, {k: c * value for k, c in self.terms.items()})

    def __mul__(self, other):
        """Graded-commutative product; left factor is written first."""
        self._check_rank(other)
        terms = {}
        for (g1, e1, h1), c1 in self.terms.items():
            for (g2, e2, h2), c2 in other.terms.items():
                sorted_word = koszul_sort(g1 + g2)
                if sorted_word is None:
                    continue
                word, sign = sorted_word
                key = (word, tuple(a + b for a, b in zip(e1, e2)), h1 + h2)
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2 * sign
        return AlgebraElement(self.rank, terms)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    def __hash__(self):
        return hash((self.rank, tuple(sorted(self.terms.items(), key=repr))))

    def sorted_terms(self):
        return sorted(
            self.terms.items(),
            key=lambda kv: (tuple(g.name for g in kv[0][0]), kv[0][1], kv[0][2]),
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (gens, exp, h), coeff in self.sorted_terms():
            factors = []
            if coeff != 1 or (not gens and not any(exp) and h == 0):
                factors.append(str(coeff))
            if any(exp):
                factors.append("z^(%s)" % ",".join(str(v) for v in exp))
            if h:
                factors.append(f"h^{h}" if h > 1 else "h")
            factors.extend(f"q[{g.name}]" for g in gens)
            parts.append("*".join(factors) if factors else "1")
        return " + ".join(parts)


def normalize(raw_monomials, rank=0):
    """Collect a list of Monomial records into a normalized AlgebraElement.

    Koszul signs from sorting are folded into the coefficients; words with a
    repeated odd generator vanish; like terms are collected and zeros
    dropped.  Normalization is idempotent by construction.
    """
    terms = {}
    for mono in raw_monomials:
        coeff = mono.coefficient
        if not isinstance(coeff, GroupRingElement):
            coeff = GroupRingElement.scalar(rank, coeff)
        if coeff.rank != rank:
            raise ValidationError("monomial coefficient rank mismatch")
        for g in mono.generators:
            if not isinstance(g, Generator):
                raise UnknownGeneratorError(f"not a registered generator: {g!r}")
        sorted_word = koszul_sort(mono.generators)
        if sorted_word is None:
            continue
        word, sign = sorted_word
        for exp, value in coeff.terms.items():
            key = (word, exp, mono.hbar_power)
            terms[key] = terms.get(key, Fraction(0)) + value * sign
    return AlgebraElement(rank, terms)


def derivative(gen, element):
    """Graded left derivative d/dq_gen applied to an element."""
    terms = {}
    for (gens, exp, h), coeff in element.terms.items():
        parity_sum = 0
        for i, g in enumerate(gens):
            if g == gen:
                sign = -1 if (gen.parity and parity_sum % 2) else 1
                key = (gens[:i] + gens[i + 1 :], exp, h)
                terms[key] = terms.get(key, Fraction(0)) + coeff * sign
            parity_sum += g.parity
    return AlgebraElement(element.rank, terms)


@dataclass(frozen=True)
class OperatorTerm:
    """One summand of a differential operator.

    ``outputs`` multiply on the left after the ``inputs`` derivatives have
    acted (rightmost first).  Both lists are stored sorted; the Koszul signs
    of sorting are folded into ``coeff`` at construction.
    """

    coeff: Fraction
    exp: tuple
    hbar_power: int
    outputs: tuple
    inputs: tuple

    @staticmethod
    def make(coeff, outputs, inputs, hbar_power=0, exp=()):
        if not inputs:
            raise ValidationError("operator terms need at least one input generator")
        out_sorted = koszul_sort(outputs)
        if out_sorted is None:
            return None
        in_sorted = koszul_sort(inputs)
        if in_sorted is None:
            # A repeated odd derivative annihilates everything.
            return None
        out_word, out_sign = out_sorted
        in_word, in_sign = in_sorted
        coeff = Fraction(coeff) * out_sign * in_sign
        if not coeff:
            return None
        if hbar_power < 0:
            raise ValidationError("hbar power must be nonnegative")
        return OperatorTerm(coeff, tuple(exp), hbar_power, out_word, in_word)

    def parity(self):
        return (word_parity(self.outputs) + word_parity(self.inputs)) % 2

    def action_drop(self):
        """Input action minus output action; positive means action decreases."""
        return word_action(self.inputs) - word_action(self.outputs)

    def apply(self, element):
        x = element
        for gen in reversed(self.inputs):
            x = derivative(gen, x)
            if x.is_zero():
                return x
        head = AlgebraElement(
            element.rank, {(self.outputs, self.exp, self.hbar_power): self.coeff}
        )
        return head * x

    def key(self):
        return (
            tuple(g.name for g in self.outputs),
            tuple(g.name for g in self.inputs),
            self.exp,
            self.hbar_power,
        )


class DifferentialOperator:
    """Finite sum of OperatorTerms over a fixed exponent lattice rank."""

    def __init__(self, terms, rank=0):
        merged = {}
        order = []
        for t in terms:
            if t is None:
                continue
            if len(t.exp) != rank:
                raise ValidationError("term exponent does not match operator rank")
            k = t.key()
            if k in merged:
                merged[k] = OperatorTerm(
                    merged[k].coeff + t.coeff, t.exp, t.hbar_power, t.outputs, t.inputs
                )
            else:
                merged[k] = t
                order.append(k)
        self.rank = rank
        self.terms = tuple(merged[k] for k in sorted(order) if merged[k].coeff)

    @classmethod
    def build(cls, spec_terms, rank=0):
        """Build from (coeff_or_groupring, outputs, inputs, hbar) tuples.

        A GroupRingElement coefficient expands into one term per exponent.
        """
        terms = []
        for coeff, outputs, inputs, hbar in spec_terms:
            if isinstance(coeff, GroupRingElement):
                if coeff.rank != rank:
                    raise ValidationError("coefficient rank mismatch")
                for exp, value in coeff.sorted_terms():
                    terms.append(OperatorTerm.make(value, outputs, inputs, hbar, exp))
            else:
                terms.append(
                    OperatorTerm.make(coeff, outputs, inputs, hbar, (0,) * rank)
                )
        return cls(terms, rank)

    def is_zero(self):
        return not self.terms

    def is_odd(self):
        return all(t.parity() == ODD for t in self.terms)

    def generators(self):
        seen = {}
        for t in self.terms:
            for g in t.outputs + t.inputs:
                seen[g.name] = g
        return [seen[name] for name in sorted(seen)]

    def check_truncation_preserving(self, strict=False):
        """Raise TruncationError if some term increases total action."""
        for t in self.terms:
            drop = t.action_drop()
            if drop < 0 or (strict and drop == 0):
                raise TruncationError(
                    f"operator term {t.key()} increases action by {-drop}"
                )

    def apply(self, element, hbar_bound=None):
        if element.rank != self.rank:
            raise ValidationError("element rank does not match operator rank")
        result = AlgebraElement.zero(self.rank)
        for t in self.terms:
            needed = _multiset(t.inputs)
            for (gens, exp, h), coeff in element.terms.items():
                if hbar_bound is not None and h + t.hbar_power > hbar_bound:
                    continue
                if not _contains_multiset(_multiset(gens), needed):
                    continue
                piece = t.apply(AlgebraElement(self.rank, {(gens, exp, h): coeff}))
                result = result + piece
        if hbar_bound is not None:
            result = result.truncate_hbar(hbar_bound)
        return result

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for t in self.terms:
            factors = [str(t.coeff)]
            if any(t.exp):
                factors.append("z^(%s)" % ",".join(str(v) for v in t.exp))
            if t.hbar_power:
                factors.append(f"h^{t.hbar_power}" if t.hbar_power > 1 else "h")
            factors.extend(f"q[{g.name}]" for g in t.outputs)
            factors.extend(f"d[{g.name}]" for g in t.inputs)
            parts.append("*".join(factors))
        return " + ".join(parts)


def _multiset(gens):
    counts = {}
    for g in gens:
        counts[g] = counts.get(g, 0) + 1
    return counts


def _contains_multiset(haystack, needle):
    return all(haystack.get(g, 0) >= n for g, n in needle.items())


def apply_operator(operator, element, hbar_bound=None):
    """Apply a differential operator to a normalized element."""
    return operator.apply(element, hbar_bound)


def bracket(operator, x, y, hbar_bound=None):
    """Deviation of the operator from being a derivation:

    [x, y] = D(xy) - D(x) y - (-1)^|x| x D(y),

    extended bilinearly over the parity-homogeneous parts of x.
    """
    result = AlgebraElement.zero(operator.rank)
    for parity in (EVEN, ODD):
        xp = x.parity_part(parity)
        if xp.is_zero():
            continue
        piece = (
            operator.apply(xp * y, hbar_bound)
            - operator.apply(xp, hbar_bound) * y
            - (xp * operator.apply(y, hbar_bound)).scale((-1) ** parity)
        )
        result = result + piece
    if hbar_bound is not None:
        result = result.truncate_hbar(hbar_bound)
    return result


def enumerate_words(generators, action_bound):
    """All normal-form generator words of total action < action_bound.

    Odd generators appear at most once, even generators repeat while the
    action budget allows.  Yields canonical sorted tuples, the empty word
    first.
    """
    gens = sorted(set(generators), key=lambda g: g.name)
    words = []

    def extend(prefix, start, remaining):
        words.append(tuple(prefix))
        for i in range(start, len(gens)):
            g = gens[i]
            if g.action >= remaining:
                continue
            if g.parity == ODD:
                extend(prefix + [g], i + 1, remaining - g.action)
            else:
                extend(prefix + [g], i, remaining - g.action)

    extend([], 0, Fraction(action_bound))
    return words


@dataclass(frozen=True)
class SquareZeroReport:
    ok: bool
    monomial: AlgebraElement | None = None
    residual: AlgebraElement | None = None


def verify_square_zero(operator, generating_set, action_bound, hbar_bound):
    """Check D(D(m)) = 0 mod hbar^(bound+1) for every monomial below the action bound.

    Returns a SquareZeroReport; on failure it carries the offending monomial
    and the residual.  Raises TruncationError when a term of D increases
    action.
    """
    operator.check_truncation_preserving()
    for word in enumerate_words(generating_set, action_bound):
        m = AlgebraElement(
            operator.rank, {(word, (0,) * operator.rank, 0): Fraction(1)}
        )
        residual = operator.apply(operator.apply(m, hbar_bound), hbar_bound)
        if not residual.is_zero():
            return SquareZeroReport(False, m, residual)
    return SquareZeroReport(True)


@dataclass(frozen=True)
class Truncation:
    """Finite window in which all searches and checks take place."""

    action_bound: Fraction
    hbar_bound: int
    cover_max: int = 1
    exponent_box: int = 0

    def __post_init__(self):
        if self.action_bound <= 0 or self.hbar_bound < 0:
            raise ValidationError("truncation bounds must be positive")
        if self.cover_max < 1 or self.exponent_box < 0:
            raise ValidationError("cover_max must be >= 1 and exponent_box >= 0")
