"""Primitive searches: linear solves over the truncated complex and the
constructive bracket series of the acyclicity argument."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .algebra import (
    AlgebraElement,
    DifferentialOperator,
    Truncation,
    bracket,
    enumerate_words,
)
from .errors import InvariantBreach, SeriesDivergenceError


@dataclass(frozen=True)
class PrimitiveSearch:
    """Outcome of a solve_primitive call.

    ``witness`` is None when no primitive exists inside the declared
    truncation window.  ``box_limited`` records that the search space was
    clipped by the exponent box, so a None witness is a statement about the
    declared box only.
    """

    witness: AlgebraElement | None
    truncation: Truncation
    candidates: int
    box_limited: bool

    @property
    def found(self):
        return self.witness is not None


def candidate_keys(generators, truncation, rank, parity=None):
    """Canonically ordered basis keys (word, exponent, hbar) for the solve."""
    words = enumerate_words(generators, truncation.action_bound)
    if parity is not None:
        words = [w for w in words if sum(g.parity for g in w) % 2 == parity]
    box = range(-truncation.exponent_box, truncation.exponent_box + 1)
    exps = [tuple(e) for e in itertools.product(box, repeat=rank)]
    keys = []
    for word in sorted(words, key=lambda w: tuple(g.name for g in w)):
        for exp in sorted(exps):
            for h in range(truncation.hbar_bound + 1):
                keys.append((word, exp, h))
    return keys


def solve_primitive(operator, target, generators, truncation):
    """Search for Q with D(Q) == target mod hbar^(hbar_bound + 1).

    The candidate space is spanned by normal-form words in ``generators``
    with action below the bound, z-exponents inside the declared box and
    hbar powers up to the bound.  The solve is a deterministic exact linear
    system; when a witness is returned it is re-verified before the call
    returns, so a successful result is sound by construction.
    """
    operator.check_truncation_preserving()
    rank = operator.rank
    target = target.truncate_hbar(truncation.hbar_bound)
    parity = target.parity()
    want_parity = None if parity is None else (parity + 1) % 2
    keys = candidate_keys(generators, truncation, rank, want_parity)

    columns = []
    col_keys = []
    for key in keys:
        image = operator.apply(
            AlgebraElement(rank, {key: Fraction(1)}), truncation.hbar_bound
        )
        if image.is_zero():
            continue
        columns.append(dict(image.terms))
        col_keys.append(key)

    solution = linalg.solve_columns(columns, dict(target.terms))
    box_limited = rank > 0 and any(any(t.exp) for t in operator.terms)
    if solution is None:
        return PrimitiveSearch(None, truncation, len(keys), box_limited)

    witness = AlgebraElement(
        rank, {k: c for k, c in zip(col_keys, solution) if c}
    )
    check = operator.apply(witness, truncation.hbar_bound)
    if check != target:
        raise InvariantBreach(
            "solver returned a witness that does not reproduce the target"
        )
    return PrimitiveSearch(witness, truncation, len(keys), box_limited)


def primitive_via_bracket(operator, p, q, hbar_bound):
    """Constructive primitive for a closed element, given D(P) = 1.

    Computes B(Q) = Q - [P,Q] + [P,[P,Q]] - ... and returns P * B(Q); the
    series terminates because each bracket with an operator assembled from
    curves raises the hbar order by at least one.  The postcondition
    D(result) == Q mod hbar^(bound+1) is asserted before returning.
    """
    one = AlgebraElement.one(operator.rank)
    dp = operator.apply(p, hbar_bound)
    if dp != one:
        raise InvariantBreach("primitive_via_bracket requires D(P) = 1 on the truncation")
    dq = operator.apply(q, hbar_bound)
    if not dq.is_zero():
        raise InvariantBreach("primitive_via_bracket requires D(Q) = 0 on the truncation")

    series = AlgebraElement.zero(operator.rank)
    term = q
    sign = 1
    while not term.is_zero():
        series = series + term.scale(sign)
        nxt = bracket(operator, p, term, hbar_bound)
        if not nxt.is_zero():
            old = term.min_hbar()
            new = nxt.min_hbar()
            if old is not None and new is not None and new <= old:
                raise SeriesDivergenceError(
                    f"bracket did not raise the hbar order ({old} -> {new}); "
                    "series cannot terminate"
                )
        sign = -sign
        term = nxt

    result = (p * series).truncate_hbar(hbar_bound)
    check = operator.apply(result, hbar_bound)
    if check != q.truncate_hbar(hbar_bound):
        raise InvariantBreach("bracket primitive failed its postcondition")
    return result
