"""Exact rational points, canonical integer lines, incidence and duality.

All coordinates are :class:`fractions.Fraction`; all predicates are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Sequence, Union

import numpy as np

PointId = int
LineId = int


class GeometryError(ValueError):
    pass


class EqualPoints(GeometryError):
    pass


class PointAtInfinity(GeometryError):
    def __init__(self, point_id: int):
        super().__init__(f"point {point_id} is sent to the line at infinity")
        self.point_id = point_id


class LineAtInfinity(GeometryError):
    def __init__(self, line_id: int):
        super().__init__(f"line {line_id} is sent to the line at infinity")
        self.line_id = line_id


class DuplicateElement(GeometryError):
    pass


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact coordinates")
    return Fraction(value)


@dataclass(frozen=True, order=True)
class Point:
    x: Fraction
    y: Fraction

    def __init__(self, x, y):
        object.__setattr__(self, "x", to_fraction(x))
        object.__setattr__(self, "y", to_fraction(y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __repr__(self):
        return f"Point({self.x}, {self.y})"


@dataclass(frozen=True, order=True)
class Line:
    """The line ``a*x + b*y = c`` in canonical integer form.

    Construct through :meth:`normalize` (or :func:`line_through`); the
    plain constructor also normalizes, so equal lines compare equal.
    """

    a: int
    b: int
    c: int

    def __init__(self, a, b, c):
        a, b, c = _canonical_triple(a, b, c)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @classmethod
    def normalize(cls, a, b, c) -> "Line":
        return cls(a, b, c)

    @property
    def is_vertical(self) -> bool:
        return self.b == 0

    @property
    def direction(self) -> tuple[int, int]:
        return (-self.b, self.a)

    def __repr__(self):
        return f"Line({self.a}x + {self.b}y = {self.c})"


def _canonical_triple(a, b, c) -> tuple[int, int, int]:
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if a == 0 and b == 0:
        raise GeometryError("degenerate line: (a, b) = (0, 0)")
    den = lcm(a.denominator, b.denominator, c.denominator)
    ia, ib, ic = int(a * den), int(b * den), int(c * den)
    g = gcd(gcd(abs(ia), abs(ib)), abs(ic))
    ia, ib, ic = ia // g, ib // g, ic // g
    lead = ia if ia != 0 else ib
    if lead < 0:
        ia, ib, ic = -ia, -ib, -ic
    return ia, ib, ic


def incident(p: Point, l: Line) -> bool:
    return l.a * p.x + l.b * p.y == l.c


def line_through(p: Point, q: Point) -> Line:
    if p == q:
        raise EqualPoints(f"{p} and {q} coincide")
    a = q.y - p.y
    b = p.x - q.x
    return Line(a, b, a * p.x + b * p.y)


class Parallel:
    def __repr__(self):
        return "Parallel"


class Identical:
    def __repr__(self):
        return "Identical"


PARALLEL = Parallel()
IDENTICAL = Identical()


def intersect(l1: Line, l2: Line) -> Union[Point, Parallel, Identical]:
    if l1 == l2:
        return IDENTICAL
    det = l1.a * l2.b - l1.b * l2.a
    if det == 0:
        return PARALLEL
    x = Fraction(l1.c * l2.b - l1.b * l2.c, det)
    y = Fraction(l1.a * l2.c - l1.c * l2.a, det)
    return Point(x, y)


def collinear(p: Point, q: Point, r: Point) -> bool:
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x) == 0


class Configuration:
    """Indexed points and lines with a cached incidence structure.

    ``incidences[j]`` is the sorted list of point ids on line ``j``.
    """

    def __init__(self, points: Iterable[Point] = (), lines: Iterable[Line] = ()):
        self.points: tuple[Point, ...] = tuple(points)
        self.lines: tuple[Line, ...] = tuple(lines)
        if len(set(self.points)) != len(self.points):
            raise DuplicateElement("configuration has duplicate points")
        if len(set(self.lines)) != len(self.lines):
            raise DuplicateElement("configuration has duplicate lines")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.lines)

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.points == other.points and self.lines == other.lines

    def __hash__(self):
        return hash((self.points, self.lines))

    def __repr__(self):
        return f"Configuration(n={self.n}, m={self.m})"

    @cached_property
    def point_index(self) -> dict[Point, PointId]:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def incidences(self) -> tuple[tuple[PointId, ...], ...]:
        return tuple(tuple(ids) for ids in grouped_incidences(self.points, self.lines))

    @cached_property
    def point_lines(self) -> tuple[tuple[LineId, ...], ...]:
        on: list[list[LineId]] = [[] for _ in self.points]
        for j, ids in enumerate(self.incidences):
            for i in ids:
                on[i].append(j)
        return tuple(tuple(x) for x in on)

    def subconfiguration(self, point_ids: Iterable[PointId], line_ids: Iterable[LineId]) -> "Configuration":
        """New configuration on the given ids (kept in increasing order)."""
        pids = sorted(set(point_ids))
        lids = sorted(set(line_ids))
        return Configuration([self.points[i] for i in pids], [self.lines[j] for j in lids])

    # -- serialization -------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "points": [[str(p.x), str(p.y)] for p in self.points],
            "lines": [[str(l.a), str(l.b), str(l.c)] for l in self.lines],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Configuration":
        points = [Point(Fraction(x), Fraction(y)) for x, y in obj.get("points", [])]
        lines = [Line(Fraction(a), Fraction(b), Fraction(c)) for a, b, c in obj.get("lines", [])]
        return cls(points, lines)

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def loads(cls, text: str) -> "Configuration":
        return cls.from_json_obj(json.loads(text))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Configuration":
        with open(path) as fh:
            return cls.loads(fh.read())


_INT64_SAFE = 2**61


def naive_incidences(points: Sequence[Point], lines: Sequence[Line]) -> list[list[PointId]]:
    """Test every (point, line) pair.

    Points become integer homogeneous triples ``(X, Y, Z)`` so the test is
    ``a X + b Y == c Z`` in integers; when every term provably fits in
    int64 the whole n x m table is evaluated with numpy.
    """
    if not points or not lines:
        return [[] for _ in lines]
    homog = []
    for p in points:
        z = lcm(p.x.denominator, p.y.denominator)
        homog.append((p.x.numerator * (z // p.x.denominator), p.y.numerator * (z // p.y.denominator), z))
    pmax = max(max(abs(v) for v in h) for h in homog)
    lmax = max(max(abs(l.a), abs(l.b), abs(l.c)) for l in lines)
    if 3 * pmax * lmax < _INT64_SAFE:
        P = np.array(homog, dtype=np.int64)
        L = np.array([(l.a, l.b, -l.c) for l in lines], dtype=np.int64)
        hit = (L @ P.T) == 0
        return [np.flatnonzero(row).tolist() for row in hit]
    return [[i for i, (X, Y, Z) in enumerate(homog) if l.a * X + l.b * Y == l.c * Z] for l in lines]


def grouped_incidences(points: Sequence[Point], lines: Sequence[Line]) -> list[list[PointId]]:
    """Incidences by walking each line over a sorted coordinate index.

    Points are bucketed by x and by y; each line is evaluated at whichever
    set of distinct coordinate values is smaller and hits are looked up.
    """
    index = {p: i for i, p in enumerate(points)}
    xs = sorted({p.x for p in points})
    ys = sorted({p.y for p in points})
    by_x: dict[Fraction, list[PointId]] = {}
    by_y: dict[Fraction, list[PointId]] = {}
    for i, p in enumerate(points):
        by_x.setdefault(p.x, []).append(i)
        by_y.setdefault(p.y, []).append(i)
    out = []
    for l in lines:
        hits: list[PointId] = []
        if l.b == 0:
            hits = list(by_x.get(Fraction(l.c, l.a), ()))
        elif l.a == 0:
            hits = list(by_y.get(Fraction(l.c, l.b), ()))
        elif len(xs) <= len(ys):
            for x in xs:
                y = (l.c - l.a * x) / l.b
                i = index.get(Point(x, y))
                if i is not None:
                    hits.append(i)
        else:
            for y in ys:
                x = (l.c - l.b * y) / l.a
                i = index.get(Point(x, y))
                if i is not None:
                    hits.append(i)
        hits.sort()
        out.append(hits)
    return out


@dataclass(frozen=True)
class ProjectiveMap:
    """3x3 rational matrix acting on homogeneous coordinates (x, y, 1)."""

    matrix: tuple[tuple[Fraction, ...], ...]

    def __init__(self, matrix):
        rows = tuple(tuple(to_fraction(v) for v in row) for row in matrix)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise GeometryError("projective map must be 3x3")
        object.__setattr__(self, "matrix", rows)
        if self.determinant() == 0:
            raise GeometryError("singular projective map")

    @classmethod
    def identity(cls) -> "ProjectiveMap":
        return cls([[1, 0, 0], [0, 1, 0], [0, 0, 1]])

    @classmethod
    def shear(cls, lam) -> "ProjectiveMap":
        return cls([[1, lam, 0], [0, 1, 0], [0, 0, 1]])

    @classmethod
    def translation(cls, dx, dy) -> "ProjectiveMap":
        return cls([[1, 0, dx], [0, 1, dy], [0, 0, 1]])

    def determinant(self) -> Fraction:
        m = self.matrix
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )

    def adjugate(self) -> tuple[tuple[Fraction, ...], ...]:
        m = self.matrix

        def cof(i, j):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            minor = m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]]
            return minor if (i + j) % 2 == 0 else -minor

        return tuple(tuple(cof(j, i) for j in range(3)) for i in range(3))

    def image(self, p: Point) -> Point | None:
        """Image of ``p``, or None when it lands at infinity."""
        m = self.matrix
        u = m[0][0] * p.x + m[0][1] * p.y + m[0][2]
        v = m[1][0] * p.x + m[1][1] * p.y + m[1][2]
        w = m[2][0] * p.x + m[2][1] * p.y + m[2][2]
        if w == 0:
            return None
        return Point(u / w, v / w)

    def line_image(self, l: Line) -> Line | None:
        # covector (a, b, -c) transforms by the inverse; the adjugate is
        # the inverse up to a scalar, which canonicalization removes
        cov = (l.a, l.b, -l.c)
        adj = self.adjugate()
        a, b, negc = (sum(cov[k] * adj[k][j] for k in range(3)) for j in range(3))
        if a == 0 and b == 0:
            return None
        return Line(a, b, -negc)


def apply_map(pmap: ProjectiveMap, config: Configuration) -> Configuration:
    points = []
    for i, p in enumerate(config.points):
        q = pmap.image(p)
        if q is None:
            raise PointAtInfinity(i)
        points.append(q)
    lines = []
    for j, l in enumerate(config.lines):
        k = pmap.line_image(l)
        if k is None:
            raise LineAtInfinity(j)
        lines.append(k)
    return Configuration(points, lines)


def shear_parameter(lines: Iterable[Line]) -> int:
    """Smallest integer lam >= 0 such that no line is vertical after
    ``(x, y) -> (x + lam*y, y)``."""
    # after the shear, a*x + b*y = c becomes a*x' + (b - lam*a)*y' = c
    bad = {Fraction(l.b, l.a) for l in lines if l.a != 0}
    lam = 0
    while lam in bad:
        lam += 1
    return lam


def dual_point(l: Line) -> Point:
    """Line ``y = s*x + t`` goes to the point ``(s, -t)``."""
    if l.b == 0:
        raise GeometryError(f"{l} is vertical and has no dual point")
    return Point(Fraction(-l.a, l.b), Fraction(-l.c, l.b))


def dual_line(p: Point) -> Line:
    """Point ``(u, v)`` goes to the line ``y = u*x - v``."""
    return Line(p.x, -1, p.y)


def dualize(config: Configuration) -> tuple[Configuration, ProjectiveMap]:
    """Point-line dual after a deterministic shear removing vertical lines.

    Dual point ``j`` is the image of line ``j``; dual line ``i`` is the
    image of point ``i``, so incidences carry over id for id.
    """
    lam = shear_parameter(config.lines)
    shear = ProjectiveMap.shear(lam)
    sheared = apply_map(shear, config) if lam else config
    points = [dual_point(l) for l in sheared.lines]
    lines = [dual_line(p) for p in sheared.points]
    return Configuration(points, lines), shear


def sort_key_along(l: Line, p: Point) -> Fraction:
    """Position of ``p`` along ``l`` in the direction ``(-b, a)``."""
    return -l.b * p.x + l.a * p.y

