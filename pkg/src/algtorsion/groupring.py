"""Group-ring coefficients: rational combinations of formal symbols z^d.

Exponents d live in a free abelian lattice of fixed rank, which models the
quotient of second homology that the twisting data declares.  Rank 0 means
untwisted coefficients: the ring degenerates to the rationals and z^() is
the unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError


@dataclass(frozen=True)
class CoefficientLattice:
    """Free abelian exponent lattice for the group ring."""

    rank: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.rank < 0:
            raise ValidationError("lattice rank must be nonnegative")
        if self.labels is not None and len(self.labels) != self.rank:
            raise ValidationError("label count must match lattice rank")

    def zero(self):
        return (0,) * self.rank

    def check(self, exponent):
        if len(exponent) != self.rank:
            raise ValidationError(
                f"exponent {exponent} has length {len(exponent)}, lattice rank is {self.rank}"
            )
        return tuple(int(v) for v in exponent)


class GroupRingElement:
    """Finite sum of terms a_i * z^{d_i} with rational a_i and integer vectors d_i."""

    __slots__ = ("rank", "terms")

    def __init__(self, rank, terms=None):
        self.rank = rank
        clean = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(v) for v in exp)
            if len(exp) != rank:
                raise ValidationError(f"exponent {exp} does not match rank {rank}")
            coeff = Fraction(coeff)
            if coeff:
                clean[exp] = clean.get(exp, Fraction(0)) + coeff
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def unit(cls, rank):
        return cls(rank, {(0,) * rank: Fraction(1)})

    @classmethod
    def z(cls, exponent, coeff=1):
        exponent = tuple(int(v) for v in exponent)
        return cls(len(exponent), {exponent: Fraction(coeff)})

    @classmethod
    def scalar(cls, rank, value):
        value = Fraction(value)
        return cls(rank, {(0,) * rank: value} if value else {})

    def is_zero(self):
        return not self.terms

    def _check_rank(self, other):
        if self.rank != other.rank:
            raise ValidationError(
                f"rank mismatch: {self.rank} vs {other.rank}"
            )

    def __add__(self, other):
        self._check_rank(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return GroupRingElement(self.rank, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return GroupRingElement(self.rank, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GroupRingElement):
            self._check_rank(other)
            terms = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    terms[e] = terms.get(e, Fraction(0)) + c1 * c2
            return GroupRingElement(self.rank, terms)
        return GroupRingElement(
            self.rank, {e: c * Fraction(other) for e, c in self.terms.items()}
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    def __hash__(self):
        return hash((self.rank, tuple(sorted(self.terms.items()))))

    def project(self, matrix, target_rank):
        """Push exponents through an integer linear map (rows of length rank)."""
        if len(matrix) != target_rank:
            raise ValidationError("projection matrix must have target_rank rows")
        for row in matrix:
            if len(row) != self.rank:
                raise ValidationError("projection matrix rows must match source rank")
        terms = {}
        for e, c in self.terms.items():
            ne = tuple(sum(row[i] * e[i] for i in range(self.rank)) for row in matrix)
            terms[ne] = terms.get(ne, Fraction(0)) + c
        return GroupRingElement(target_rank, terms)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            if any(e):
                ztxt = "z^(%s)" % ",".join(str(v) for v in e)
                parts.append(f"{c}*{ztxt}" if c != 1 else ztxt)
            else:
                parts.append(str(c))
        return " + ".join(parts)
