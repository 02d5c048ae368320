"""Exact rank of sparse rational matrices.

Rows are ``{column: value}`` dicts.  Elimination is fraction-free: rows
are scaled to primitive integer vectors and combined as
``p*r - r[c]*pivot`` followed by removal of the content, so no
denominators ever appear.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

SparseRow = Mapping[int, object]


def primitive(row: Mapping[int, object]) -> dict[int, int]:
    """Integer row proportional to ``row`` with content 1 and zeros dropped."""
    items = [(c, Fraction(v)) for c, v in row.items() if v != 0]
    if not items:
        return {}
    den = reduce(lcm, (v.denominator for _, v in items), 1)
    ints = [(c, int(v * den)) for c, v in items]
    g = reduce(gcd, (abs(v) for _, v in ints), 0)
    return {c: v // g for c, v in ints}


class EchelonBasis:
    """Row-echelon basis built one row at a time.

    Every stored pivot row has its pivot at its smallest column, so
    reducing a row at column ``c`` only introduces columns after ``c``.
    """

    def __init__(self):
        self.pivots: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: SparseRow) -> dict[int, int]:
        r = primitive(row)
        if not r:
            return r
        while True:
            cols = [c for c in r if c in self.pivots]
            if not cols:
                return r
            c = min(cols)
            piv = self.pivots[c]
            p, f = piv[c], r[c]
            g = gcd(p, f)
            p, f = p // g, f // g
            out = {k: p * v for k, v in r.items()}
            for k, v in piv.items():
                nv = out.get(k, 0) - f * v
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
            if not out:
                return out
            g = reduce(gcd, (abs(v) for v in out.values()), 0)
            if g > 1:
                out = {k: v // g for k, v in out.items()}
            r = out

    def add(self, row: SparseRow) -> bool:
        """Insert ``row``; True if it was independent of the basis."""
        r = self.reduce(row)
        if not r:
            return False
        self.pivots[min(r)] = r
        return True


def exact_rank(rows: Iterable[SparseRow]) -> int:
    basis = EchelonBasis()
    for row in rows:
        basis.add(row)
    return basis.rank


def dense_to_sparse(matrix: Sequence[Sequence[object]]) -> list[dict[int, object]]:
    return [{c: v for c, v in enumerate(row) if v != 0} for row in matrix]


def null_vector(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Fraction] | None:
    """A nonzero exact solution of ``rows @ x = 0``, or None if only zero solves it."""
    work = [[Fraction(v) for v in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        k = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if k is None:
            continue
        work[r], work[k] = work[k], work[r]
        inv = 1 / work[r][c]
        work[r] = [v * inv for v in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    free = next((c for c in range(ncols) if c not in pivots), None)
    if free is None:
        return None
    x = [Fraction(0)] * ncols
    x[free] = Fraction(1)
    for i, c in enumerate(pivots):
        x[c] = -work[i][free]
    return x
