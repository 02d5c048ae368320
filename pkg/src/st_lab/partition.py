"""Polynomial partitioning by level-wise simultaneous bisection.

Each level finds one polynomial that splits every current sign class
into two nearly equal halves.  Candidates are searched in floating point
in the lifted monomial space (random restarts, then exact 1-D sweeps
along random directions) and accepted only after exact sign counting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import chain
from math import comb
from typing import Sequence

import numpy as np

from .geometry import Configuration, GeometryError, Line, Point, incident, sort_key_along
from .linalg import null_vector
from .triples import line_orders

BOUNDARY = None
RETRY_BUDGET = 200
DEFAULT_EPSILON = Fraction(1, 20)


class BisectionFailure(RuntimeError):
    pass


class PartitionFailure(RuntimeError):
    def __init__(self, level: int, cause: Exception | None = None):
        super().__init__(f"bisection failed at level {level}" + (f": {cause}" if cause else ""))
        self.level = level


class LineInZeroSet(GeometryError):
    pass


def monomials(d: int) -> list[tuple[int, int]]:
    """Exponents ``(i, j)`` of ``x^i y^j`` with ``i + j <= d`` in graded-lex
    order: 1, x, y, x^2, xy, y^2, ..."""
    return [(k - j, j) for k in range(d + 1) for j in range(k + 1)]


def monomial_count(d: int) -> int:
    return (d + 1) * (d + 2) // 2


def degree_for(classes: int) -> int:
    """Smallest degree whose monomial count exceeds ``classes``."""
    d = 1
    while monomial_count(d) <= classes:
        d += 1
    return d


def veronese_lift(p: Point, d: int) -> list[Fraction]:
    """Values of all monomials of degree 1..d at ``p`` (graded-lex)."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    return [p.x**i * p.y**j for i, j in monomials(d)[1:]]


@dataclass(frozen=True)
class BisectingFactor:
    """Polynomial with dense graded-lex coefficients, constant term first."""

    degree: int
    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) != monomial_count(self.degree):
            raise ValueError("coefficient count does not match degree")
        if not any(coeffs):
            raise ValueError("factor is identically zero")

    def __call__(self, p: Point) -> Fraction:
        return self.evaluate(p.x, p.y)

    def evaluate(self, x, y) -> Fraction:
        total = Fraction(0)
        for c, (i, j) in zip(self.coefficients, monomials(self.degree)):
            if c:
                total += c * x**i * y**j
        return total

    def sign(self, p: Point) -> int:
        v = self(p)
        return (v > 0) - (v < 0)

    def to_json_obj(self) -> dict:
        return {"degree": self.degree, "coefficients": [str(c) for c in self.coefficients]}

    @classmethod
    def from_json_obj(cls, obj) -> "BisectingFactor":
        return cls(int(obj["degree"]), tuple(Fraction(c) for c in obj["coefficients"]))


def expand_affine(coeffs_uv: Sequence[Fraction], d: int, cx: Fraction, cy: Fraction, s: Fraction) -> list[Fraction]:
    """Rewrite ``f(u, v)`` with ``u = (x - cx)/s``, ``v = (y - cy)/s`` as a
    polynomial in ``x, y`` (graded-lex coefficients)."""
    index = {e: k for k, e in enumerate(monomials(d))}
    out = [Fraction(0)] * len(index)
    for c, (i, j) in zip(coeffs_uv, monomials(d)):
        if not c:
            continue
        scale = c / s ** (i + j)
        for a in range(i + 1):
            ca = comb(i, a) * (-cx) ** (i - a)
            for b in range(j + 1):
                out[index[(a, b)]] += scale * ca * comb(j, b) * (-cy) ** (j - b)
    return out


@dataclass
class _Lifted:
    """Float features of the normalized points, plus exact normalization."""

    points: list[Point]
    labels: np.ndarray
    sizes: np.ndarray
    caps: np.ndarray
    feats: np.ndarray
    uv: np.ndarray
    exps: np.ndarray
    cx: Fraction
    cy: Fraction
    scale: Fraction


def _lift(classes: Sequence[Sequence[Point]], d: int, epsilon: Fraction) -> _Lifted:
    pts = list(chain.from_iterable(classes))
    labels = np.array([k for k, cls in enumerate(classes) for _ in cls], dtype=np.int64)
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    cx = (min(xs) + max(xs)) / 2
    cy = (min(ys) + max(ys)) / 2
    half = max(max(xs) - cx, max(ys) - cy)
    scale = half if half > 0 else Fraction(1)
    u = np.array([float((x - cx) / scale) for x in xs])
    v = np.array([float((y - cy) / scale) for y in ys])
    exps = np.array(monomials(d))
    feats = np.stack([u**i * v**j for i, j in exps], axis=1)
    sizes = np.array([len(c) for c in classes], dtype=np.int64)
    caps = np.array([int((Fraction(1, 2) + epsilon) * len(c)) for c in classes], dtype=np.int64)
    return _Lifted(pts, labels, sizes, caps, feats, np.stack([u, v], axis=1), exps, cx, cy, scale)


def _median_start(lifted: _Lifted, nclass: int, rng) -> np.ndarray:
    """Starting coefficients through one "median gap" per class.

    For each class, project onto a random direction and take the midpoint
    of its two middle points; the remaining conditions are random points
    of the box.  The interpolating polynomial then tends to cross every
    class near its middle, which random starts almost never do when the
    classes are arcs of a curve.
    """
    dim = lifted.feats.shape[1]
    targets = []
    for k in range(nclass):
        xy = lifted.uv[lifted.labels == k]
        theta = rng.uniform(0, np.pi)
        order = np.argsort(xy @ np.array([np.cos(theta), np.sin(theta)]), kind="stable")
        if len(order) == 1:
            targets.append(xy[order[0]])
        else:
            mid = (len(order) - 1) // 2
            targets.append((xy[order[mid]] + xy[order[mid + 1]]) / 2)
    while len(targets) < dim - 1:
        targets.append(rng.uniform(-1, 1, size=2))
    t = np.array(targets)
    rows = t[:, :1] ** lifted.exps[:, 0] * t[:, 1:] ** lifted.exps[:, 1]
    return np.linalg.svd(rows)[2][-1]


def _score(pos: np.ndarray, neg: np.ndarray, lifted: _Lifted):
    """Vectorized objective over candidate positions (rows)."""
    worst = np.maximum(pos, neg)
    excess = np.maximum(worst - lifted.caps, 0).sum(axis=-1)
    imbalance = (worst / lifted.sizes).max(axis=-1)
    spread = (np.abs(pos - neg) / lifted.sizes).sum(axis=-1)
    return excess, imbalance, spread


def _counts(values: np.ndarray, lifted: _Lifted, nclass: int):
    pos = np.bincount(lifted.labels[values > 0], minlength=nclass)
    neg = np.bincount(lifted.labels[values < 0], minlength=nclass)
    return pos, neg


def _line_search(w: np.ndarray, direction: np.ndarray, lifted: _Lifted, nclass: int):
    """Best step ``t`` for ``w + t*direction`` over all open intervals
    between sign changes; returns ``(key, t)``."""
    f0 = lifted.feats @ w
    g = lifted.feats @ direction
    moving = np.abs(g) > 1e-12 * (np.abs(f0) + 1)
    fixed_pos, fixed_neg = _counts(np.where(moving, 0.0, f0), lifted, nclass)
    bp = -f0[moving] / g[moving]
    lab = lifted.labels[moving]
    up = g[moving] > 0
    order = np.argsort(bp, kind="stable")
    bp, lab, up = bp[order], lab[order], up[order]
    k = len(bp)
    # before every breakpoint, points with g > 0 are negative
    pos0 = fixed_pos + np.bincount(lab[~up], minlength=nclass)
    neg0 = fixed_neg + np.bincount(lab[up], minlength=nclass)
    step = np.zeros((k + 1, nclass), dtype=np.int64)
    if k:
        sgn = np.where(up, 1, -1)
        step[np.arange(1, k + 1), lab] = sgn
    delta = np.cumsum(step, axis=0)
    pos = pos0 + delta
    neg = neg0 - delta
    valid = np.ones(k + 1, dtype=bool)
    if k > 1:
        gap = np.diff(bp)
        valid[1:k] = gap > 1e-9 * (np.abs(bp[1:]) + 1)
    excess, imbalance, spread = _score(pos, neg, lifted)
    idx = np.nonzero(valid)[0]
    keys = np.lexsort((spread[idx], imbalance[idx], excess[idx]))
    best = idx[keys[0]]
    if k == 0:
        t = 0.0
    elif best == 0:
        t = bp[0] - 1.0
    elif best == k:
        t = bp[-1] + 1.0
    else:
        t = (bp[best - 1] + bp[best]) / 2
    return (int(excess[best]), float(imbalance[best]), float(spread[best])), t


def _exact_check(coeffs: Sequence[Fraction], d: int, classes: Sequence[Sequence[Point]], epsilon: Fraction):
    factor = BisectingFactor(d, tuple(coeffs))
    bound = Fraction(1, 2) + epsilon
    for cls in classes:
        pos = neg = 0
        for p in cls:
            s = factor.sign(p)
            pos += s > 0
            neg += s < 0
        if pos > bound * len(cls) or neg > bound * len(cls):
            return None
    return factor


def _interpolation_search(classes, lifted: _Lifted, d: int, epsilon: Fraction, rng, tries: int, accept):
    """Exact fallback for degenerate inputs: polynomials through ``dim - 1``
    points (random configuration points, or a median point of every class
    padded with random dyadic points).  A bisector may have to pass through points (a grid
    column, say), which the open-interval sweep never produces.

    A polynomial vanishing on most points meets the side caps trivially, so
    candidates must leave fewer than half of every class on the zero set;
    the one with the fewest zeros wins.
    """
    mons = monomials(d)
    dim = len(mons)
    npts = len(lifted.points)
    if npts < dim - 1:
        return None
    uv = [((p.x - lifted.cx) / lifted.scale, (p.y - lifted.cy) / lifted.scale) for p in lifted.points]
    nclass = len(classes)
    absfeats = np.abs(lifted.feats)
    found: list[tuple[int, int, list[Fraction]]] = []
    members = [np.nonzero(lifted.labels == k)[0] for k in range(nclass)]
    for attempt in range(tries):
        if attempt % 2 == 0:
            conds = [uv[k] for k in rng.choice(npts, dim - 1, replace=False)]
        else:
            # one median point per class, the rest random dyadic points
            conds = []
            for idx in members:
                theta = rng.uniform(0, np.pi)
                proj = lifted.uv[idx] @ np.array([np.cos(theta), np.sin(theta)])
                order = idx[np.argsort(proj, kind="stable")]
                conds.append(uv[order[(len(order) - 1 + rng.integers(2)) // 2]])
            while len(conds) < dim - 1:
                a, b = rng.integers(-1024, 1025, size=2)
                conds.append((Fraction(int(a), 1024), Fraction(int(b), 1024)))
            conds = conds[:dim - 1]
        rows = [[u**i * v**j for i, j in mons] for u, v in conds]
        w = null_vector(rows, dim)
        if w is None:
            continue
        wf = np.array([float(c) for c in w])
        vals = lifted.feats @ wf
        vals[np.abs(vals) <= 1e-9 * (absfeats @ np.abs(wf))] = 0.0
        pos, neg = _counts(vals, lifted, nclass)
        zeros = lifted.sizes - pos - neg
        excess, _, _ = _score(pos, neg, lifted)
        if excess == 0 and np.all(2 * zeros < lifted.sizes):
            found.append((int(zeros.sum()), attempt, w))
            if found[-1][0] <= dim - 1:
                break
    for _, _, w in sorted(found, key=lambda f: (f[0], f[1])):
        coeffs = expand_affine(w, d, lifted.cx, lifted.cy, lifted.scale)
        factor = _exact_check(coeffs, d, classes, epsilon)
        if factor is None or not accept(factor):
            continue
        zeros = [sum(factor.sign(p) == 0 for p in c) for c in classes]
        if all(2 * z < len(c) for z, c in zip(zeros, classes)):
            return factor
    return None


def _to_dyadic(w: np.ndarray, bits: int = 30) -> list[Fraction]:
    top = float(np.max(np.abs(w))) or 1.0
    return [Fraction(int(round(c / top * 2**bits)), 2**bits) for c in w]


def bisect_classes(
    classes: Sequence[Sequence[Point]],
    d: int,
    epsilon=DEFAULT_EPSILON,
    seed: int = 0,
    restarts: int = RETRY_BUDGET,
    sweeps: int = 60,
    forbidden_lines: Sequence[Line] = (),
) -> BisectingFactor:
    """Find a degree-``d`` polynomial leaving at most ``(1/2 + epsilon)|S|``
    points of every class ``S`` strictly on either side.

    Candidates vanishing on one of ``forbidden_lines`` are rejected.
    Raises :class:`BisectionFailure` when the restart budget runs out.
    """
    epsilon = Fraction(epsilon)
    if not 0 <= epsilon < Fraction(1, 2):
        raise ValueError("epsilon must lie in [0, 1/2)")
    classes = [list(c) for c in classes if len(c)]
    if not classes:
        raise BisectionFailure("no points to bisect")
    dim = monomial_count(d)
    if dim <= len(classes):
        raise ValueError(f"degree {d} has {dim} monomials, need more than {len(classes)}")
    lifted = _lift(classes, d, epsilon)
    nclass = len(classes)

    def accept(f: BisectingFactor) -> bool:
        return not any(factor_on_line(f, l) for l in forbidden_lines)

    for attempt in range(restarts):
        rng = np.random.default_rng([seed, attempt])
        w = _median_start(lifted, nclass, rng) if attempt % 2 else rng.standard_normal(dim)
        key = None
        for sweep in range(sweeps):
            if sweep % 3 == 0:
                direction = np.zeros(dim)
                direction[sweep // 3 % dim] = 1.0
            else:
                direction = rng.standard_normal(dim)
            key, t = _line_search(w, direction, lifted, nclass)
            w = w + t * direction
            w /= np.max(np.abs(w))
            if key[0] == 0:
                break
        if key is None or key[0] != 0:
            continue
        coeffs_uv = _to_dyadic(w)
        if not any(coeffs_uv):
            continue
        coeffs = expand_affine(coeffs_uv, d, lifted.cx, lifted.cy, lifted.scale)
        factor = _exact_check(coeffs, d, classes, epsilon)
        if factor is not None and accept(factor):
            return factor
    rng = np.random.default_rng([seed, restarts])
    factor = _interpolation_search(classes, lifted, d, epsilon, rng, 20 * restarts, accept)
    if factor is not None:
        return factor
    raise BisectionFailure(f"no bisecting polynomial of degree {d} after {restarts} restarts")


@dataclass
class PartitionTree:
    levels: list[BisectingFactor]
    cell_of: dict[int, str | None]
    epsilon: Fraction
    achieved_max_cell: int
    seed: int = 0

    @property
    def total_degree(self) -> int:
        return sum(f.degree for f in self.levels)

    @property
    def degrees(self) -> list[int]:
        return [f.degree for f in self.levels]

    def cells(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {}
        for i, c in sorted(self.cell_of.items()):
            if c is not BOUNDARY:
                out.setdefault(c, []).append(i)
        return dict(sorted(out.items()))

    @property
    def boundary(self) -> list[int]:
        return sorted(i for i, c in self.cell_of.items() if c is BOUNDARY)

    def label(self, p: Point) -> str | None:
        return sign_vector(self.levels, p)

    def balance_bound(self, n: int) -> float:
        return float((Fraction(1, 2) + self.epsilon) ** len(self.levels) * n)

    def to_json_obj(self) -> dict:
        return {
            "levels": [f.to_json_obj() for f in self.levels],
            "degrees": self.degrees,
            "epsilon": str(self.epsilon),
            "seed": self.seed,
            "achieved_max_cell": self.achieved_max_cell,
            "cells": len(self.cells()),
            "cell_of": {str(i): c for i, c in sorted(self.cell_of.items())},
        }

    @classmethod
    def from_json_obj(cls, obj) -> "PartitionTree":
        return cls(
            [BisectingFactor.from_json_obj(f) for f in obj["levels"]],
            {int(i): c for i, c in obj["cell_of"].items()},
            Fraction(obj["epsilon"]),
            int(obj["achieved_max_cell"]),
            int(obj.get("seed", 0)),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))


def sign_vector(levels: Sequence[BisectingFactor], p: Point) -> str | None:
    out = []
    for f in levels:
        s = f.sign(p)
        if s == 0:
            return BOUNDARY
        out.append("+" if s > 0 else "-")
    return "".join(out)


def build_partition(config: Configuration, levels: int, epsilon=DEFAULT_EPSILON, seed: int = 0,
                    point_ids: Sequence[int] | None = None) -> PartitionTree:
    """Refine sign classes ``levels`` times, one bisecting factor per level.

    Level ``j`` uses the smallest degree whose monomial count exceeds the
    number of current classes.  Points where any factor vanishes are
    boundary points and belong to no cell.
    """
    if levels < 1:
        raise ValueError("need at least one level")
    epsilon = Fraction(epsilon)
    ids = list(range(config.n)) if point_ids is None else sorted(point_ids)
    label: dict[int, str | None] = {i: "" for i in ids}
    factors: list[BisectingFactor] = []
    for level in range(levels):
        groups: dict[str, list[int]] = {}
        for i in ids:
            if label[i] is not BOUNDARY:
                groups.setdefault(label[i], []).append(i)
        keys = sorted(groups)
        if not keys:
            break
        d = degree_for(len(keys))
        try:
            factor = bisect_classes([[config.points[i] for i in groups[k]] for k in keys], d, epsilon,
                                    seed=seed * 1009 + level, forbidden_lines=config.lines)
        except BisectionFailure as exc:
            raise PartitionFailure(level + 1, exc) from exc
        factors.append(factor)
        for k in keys:
            for i in groups[k]:
                s = factor.sign(config.points[i])
                label[i] = BOUNDARY if s == 0 else k + ("+" if s > 0 else "-")
    sizes: dict[str, int] = {}
    for c in label.values():
        if c is not BOUNDARY:
            sizes[c] = sizes.get(c, 0) + 1
    return PartitionTree(factors, label, epsilon, max(sizes.values(), default=0), seed)


def factor_on_line(factor: BisectingFactor, line: Line) -> bool:
    """True if ``factor`` vanishes identically on ``line``; checked at
    ``degree + 1`` distinct points of the line."""
    if line.b != 0:
        pts = [(Fraction(t), Fraction(line.c - line.a * t, line.b)) for t in range(factor.degree + 1)]
    else:
        pts = [(Fraction(line.c, line.a), Fraction(t)) for t in range(factor.degree + 1)]
    return all(factor.evaluate(x, y) == 0 for x, y in pts)


def line_crossings(line: Line, tree: PartitionTree, config: Configuration, order: Sequence[int] | None = None) -> int:
    """Sign-vector changes between consecutive labelled points of ``line``.

    Boundary points are skipped; each change needs a zero of the
    partitioning polynomial on the line, so the count is at most the
    total degree unless a factor contains the line.
    """
    for k, f in enumerate(tree.levels):
        if factor_on_line(f, line):
            raise LineInZeroSet(f"factor {k} vanishes on {line}")
    if order is None:
        ids = [i for i, p in enumerate(config.points) if incident(p, line) and i in tree.cell_of]
        order = sorted(ids, key=lambda i: sort_key_along(line, config.points[i]))
    labels = [tree.cell_of[i] for i in order if tree.cell_of.get(i) is not BOUNDARY]
    return sum(1 for a, b in zip(labels, labels[1:]) if a != b)


def all_line_crossings(tree: PartitionTree, config: Configuration) -> list[int]:
    orders = line_orders(config)
    out = []
    for l, order in zip(config.lines, orders):
        out.append(line_crossings(l, tree, config, [i for i in order if i in tree.cell_of]))
    return out
