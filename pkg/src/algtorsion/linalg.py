"""Exact linear algebra over the rationals.

Everything here works on sparse columns represented as dicts mapping a
hashable row key to a nonzero Fraction.  Sizes in this project stay in the
low thousands, so plain Gaussian elimination with exact arithmetic is both
fast enough and free of any numerical tolerance.
"""

from __future__ import annotations

from fractions import Fraction


def solve_columns(columns, rhs):
    """Solve ``sum_j x_j * columns[j] == rhs`` over the rationals.

    ``columns`` is a list of sparse column dicts, ``rhs`` a sparse dict.
    Returns a list of Fractions (one per column) or None when the system is
    inconsistent.  Pivoting is deterministic: columns are consumed left to
    right, rows in sorted key order, so the returned solution is canonical
    for a fixed column ordering.
    """
    # Augmented sparse rows: row key -> (dict col_index -> coeff, rhs value).
    row_keys = set(rhs)
    for col in columns:
        row_keys.update(col)
    rows = {}
    for key in row_keys:
        entries = {}
        for j, col in enumerate(columns):
            v = col.get(key)
            if v:
                entries[j] = Fraction(v)
        rows[key] = [entries, Fraction(rhs.get(key, 0))]

    order = sorted(rows, key=_row_sort_key)
    pivots = {}  # column index -> row key
    used_rows = set()
    for j in range(len(columns)):
        pivot_key = None
        for key in order:
            if key in used_rows:
                continue
            if rows[key][0].get(j):
                pivot_key = key
                break
        if pivot_key is None:
            continue
        used_rows.add(pivot_key)
        pivots[j] = pivot_key
        p_entries, p_rhs = rows[pivot_key]
        inv = 1 / p_entries[j]
        for c in list(p_entries):
            p_entries[c] *= inv
        rows[pivot_key][1] = p_rhs * inv
        for key in order:
            if key == pivot_key:
                continue
            entries, rv = rows[key]
            factor = entries.get(j)
            if not factor:
                continue
            for c, pv in p_entries.items():
                nv = entries.get(c, Fraction(0)) - factor * pv
                if nv:
                    entries[c] = nv
                else:
                    entries.pop(c, None)
            rows[key][1] = rv - factor * rows[pivot_key][1]

    for key in order:
        entries, rv = rows[key]
        if not entries and rv:
            return None

    solution = [Fraction(0)] * len(columns)
    for j, key in pivots.items():
        solution[j] = rows[key][1]
    return solution


def _row_sort_key(key):
    return repr(key)


def rank(matrix_rows):
    """Rank of a dense matrix given as a list of row lists."""
    return len(_echelon([list(map(Fraction, row)) for row in matrix_rows]))


def nullspace(matrix_rows, ncols):
    """Basis of the right nullspace of a dense matrix, as row vectors."""
    rows = _echelon([list(map(Fraction, row)) for row in matrix_rows])
    pivot_cols = []
    for row in rows:
        for c in range(ncols):
            if row[c]:
                pivot_cols.append(c)
                break
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for row, pc in zip(reversed(rows), reversed(pivot_cols)):
            s = sum(row[c] * vec[c] for c in range(pc + 1, ncols))
            vec[pc] = -s / row[pc]
        basis.append(vec)
    return basis


def _echelon(rows):
    """Row echelon form; returns the nonzero rows."""
    rows = [row for row in rows if any(row)]
    result = []
    col = 0
    ncols = max((len(r) for r in rows), default=0)
    while rows and col < ncols:
        pivot = next((r for r in rows if r[col]), None)
        if pivot is None:
            col += 1
            continue
        rows.remove(pivot)
        inv = 1 / pivot[col]
        pivot = [v * inv for v in pivot]
        result.append(pivot)
        for r in rows:
            if r[col]:
                f = r[col]
                for c in range(col, ncols):
                    r[c] -= f * pivot[c]
        rows = [r for r in rows if any(r)]
        col += 1
    return result


def matrix_mult(a, b):
    """Product of two dense matrices (lists of row lists) over the rationals."""
    if not a or not b:
        return []
    n, k, m = len(a), len(b), len(b[0])
    out = [[Fraction(0)] * m for _ in range(n)]
    for i in range(n):
        for j in range(k):
            aij = a[i][j]
            if not aij:
                continue
            brow = b[j]
            orow = out[i]
            for c in range(m):
                if brow[c]:
                    orow[c] += aij * brow[c]
    return out


def is_zero_matrix(m):
    return all(not v for row in m for v in row)
