"""Benchmark configurations."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .geometry import Configuration, Line, Point, line_through


def gen_elekes(N: int) -> Configuration:
    """Grid ``[1..N] x [1..2N^2]`` with the lines ``y = a x + b``,
    ``a in [1..N]``, ``b in [1..N^2]``; every line is N-rich."""
    if N < 1:
        raise ValueError("N must be positive")
    return gen_unbalanced(N, 2)


def gen_unbalanced(N: int, s: int) -> Configuration:
    """Grid ``[1..N] x [1..s N^2]`` with lines ``y = a x + b`` for
    ``a in [1..N]`` and ``b in [1..(s-1) N^2]`` (all staying inside the
    grid over ``x in [1..N]``); ``s = 2`` is the Elekes grid."""
    if N < 1 or s < 1:
        raise ValueError("N and s must be positive")
    points = [Point(x, y) for x in range(1, N + 1) for y in range(1, s * N * N + 1)]
    lines = [Line(a, -1, -b) for a in range(1, N + 1) for b in range(1, (s - 1) * N * N + 1)]
    return Configuration(points, lines)


def gen_random(n: int, m: int, seed: int = 0) -> Configuration:
    """``n`` distinct points uniform on ``[0..4nm]^2`` and up to ``m``
    distinct lines, each through a random pair of the points.

    Fewer than ``m`` lines come back only when the points span fewer
    distinct lines (e.g. ``n = 2``).
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    rng = random.Random(seed)
    side = 4 * n * m
    seen: set[Point] = set()
    points: list[Point] = []
    while len(points) < n:
        p = Point(rng.randint(0, side), rng.randint(0, side))
        if p not in seen:
            seen.add(p)
            points.append(p)
    lines: list[Line] = []
    have: set[Line] = set()
    if n >= 2:
        budget = 50 * m + 100
        while len(lines) < m and budget > 0:
            budget -= 1
            i, j = rng.sample(range(n), 2)
            l = line_through(points[i], points[j])
            if l not in have:
                have.add(l)
                lines.append(l)
    return Configuration(points, lines)


def gen_circle(n: int) -> Configuration:
    """``n`` rational points of the unit circle, ``t -> ((1-t^2)/(1+t^2),
    2t/(1+t^2))`` at ``t = 0..n-1``; no three are collinear."""
    if n < 3:
        raise ValueError("n must be at least 3")
    pts = [Point(Fraction(1 - t * t, 1 + t * t), Fraction(2 * t, 1 + t * t)) for t in range(n)]
    return Configuration(pts, [])


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def build(self) -> Configuration:
        p = self.params
        if self.kind == "elekes":
            return gen_elekes(p["N"])
        if self.kind == "unbalanced":
            return gen_unbalanced(p["N"], p["s"])
        if self.kind == "random":
            return gen_random(p["n"], p["m"], self.seed)
        if self.kind == "circle":
            return gen_circle(p["n"])
        raise ValueError(f"unknown generator {self.kind!r}")
