"""Independent reference implementations used only by the tests.

Nothing here imports the package's rank or triple code: the Jacobian is
differentiated symbolically and ranked by sympy.
"""

from fractions import Fraction
from itertools import combinations

import sympy


def naive_incidence_count(points, lines):
    """points: (x, y) pairs; lines: (a, b, c) meaning a x + b y = c."""
    return sum(1 for x, y in points for a, b, c in lines if a * x + b * y == c)


def symbolic_rank(points, triples):
    n = len(points)
    xs = sympy.symbols(f"x0:{n}")
    ys = sympy.symbols(f"y0:{n}")
    subs = {}
    for k, (x, y) in enumerate(points):
        subs[xs[k]] = sympy.Rational(str(Fraction(x)))
        subs[ys[k]] = sympy.Rational(str(Fraction(y)))
    variables = [v for k in range(n) for v in (xs[k], ys[k])]
    rows = []
    for i, j, k in triples:
        det = sympy.Matrix([[xs[i], ys[i], 1], [xs[j], ys[j], 1], [xs[k], ys[k], 1]]).det()
        rows.append([sympy.diff(det, v).subs(subs) for v in variables])
    if not rows:
        return 0
    return sympy.Matrix(rows).rank()


def grid3_points_and_triples():
    """3x3 grid, point id = 3*row + col, with its 8 three-point lines."""
    pts = [(c, r) for r in range(3) for c in range(3)]
    lines = [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8], [0, 4, 8], [2, 4, 6]]
    return pts, lines


def brute_consecutive_count(points, lines):
    """Sum over lines of max(0, s - 2), richness from brute force."""
    total = 0
    for a, b, c in lines:
        s = sum(1 for x, y in points if a * x + b * y == c)
        total += max(0, s - 2)
    return total


def brute_collinear_triples(points):
    out = []
    for i, j, k in combinations(range(len(points)), 3):
        (x1, y1), (x2, y2), (x3, y3) = points[i], points[j], points[k]
        if (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1) == 0:
            out.append((i, j, k))
    return out
