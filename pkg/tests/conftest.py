from fractions import Fraction

import pytest

from algtorsion.algebra import EVEN, ODD, Generator


@pytest.fixture
def odd_a():
    return Generator("a", ODD, Fraction(1))


@pytest.fixture
def odd_b():
    return Generator("b", ODD, Fraction(1))


@pytest.fixture
def even_e():
    return Generator("e", EVEN, Fraction(1))


def bubble_sort_sign(gens):
    """Independent Koszul oracle: bubble sort with explicit adjacent
    transpositions, flipping the sign whenever two odd generators swap."""
    gens = list(gens)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(gens) - 1):
            if gens[i].name > gens[i + 1].name:
                if gens[i].parity == 1 and gens[i + 1].parity == 1:
                    sign = -sign
                gens[i], gens[i + 1] = gens[i + 1], gens[i]
                changed = True
    for i in range(len(gens) - 1):
        if gens[i] == gens[i + 1] and gens[i].parity == 1:
            return None
    return tuple(gens), sign


def leibniz_derivative(gen, word):
    """Independent derivative oracle by recursion on the word:
    d_a(q_b w) = delta_ab * w + (-1)^(|a||b|) q_b d_a(w).

    Returns a dict word -> coefficient.
    """
    if not word:
        return {}
    head, tail = word[0], tuple(word[1:])
    result = {}
    if head == gen:
        result[tail] = result.get(tail, 0) + 1
    sign = -1 if (gen.parity and head.parity) else 1
    for sub, coeff in leibniz_derivative(gen, tail).items():
        key = (head,) + sub
        result[key] = result.get(key, 0) + sign * coeff
    return {k: v for k, v in result.items() if v}
