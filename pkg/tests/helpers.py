"""Random configurations with lots of collinearity, for property tests."""

import random

from st_lab.geometry import Configuration, Point, line_through


def dense_config(seed: int, n: int, m: int, side: int = 6) -> Configuration:
    """``n`` distinct points of a small grid and up to ``m`` lines through
    pairs of them (small grids make rich lines common)."""
    rng = random.Random(seed)
    cells = [(x, y) for x in range(side) for y in range(side)]
    pts = [Point(x, y) for x, y in rng.sample(cells, min(n, len(cells)))]
    lines = []
    seen = set()
    for _ in range(20 * m):
        if len(lines) >= m or len(pts) < 2:
            break
        p, q = rng.sample(pts, 2)
        l = line_through(p, q)
        if l not in seen:
            seen.add(l)
            lines.append(l)
    return Configuration(pts, lines)
