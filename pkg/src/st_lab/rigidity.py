"""Tangent-space rigidity certificates for collinearity constraints.

A triple ``{s1, s2, s3}`` contributes the constraint
``det [[x1, y1, 1], [x2, y2, 1], [x3, y3, 1]] = 0``; its gradient at the
configuration is one row of the collinearity Jacobian.  The tangent space
of the constraint variety has dimension ``2n - rank``, which bounds the
dimension of every component through the configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .geometry import Configuration, GeometryError, Point, dualize, line_through
from .linalg import EchelonBasis, exact_rank
from .triples import TripleSystem, consecutive_triples


class UnknownId(KeyError):
    pass


class KernelViolation(AssertionError):
    pass


class CompositionUnjustified(ValueError):
    pass


class UncoveredPoint(GeometryError):
    def __init__(self, point_ids):
        self.point_ids = sorted(point_ids)
        super().__init__(f"points on fewer than two lines: {self.point_ids[:20]}")


@dataclass
class CollinearityMatrix:
    ground: tuple[int, ...]
    rows: list[dict[int, Fraction]]
    degenerate_rows: list[int] = field(default_factory=list)

    @property
    def ncols(self) -> int:
        return 2 * len(self.ground)

    def column_of(self, point_id: int) -> int:
        return 2 * self._pos[point_id]

    def __post_init__(self):
        self._pos = {g: k for k, g in enumerate(self.ground)}

    def dense(self) -> list[list[Fraction]]:
        out = []
        for row in self.rows:
            d = [Fraction(0)] * self.ncols
            for c, v in row.items():
                d[c] = v
            out.append(d)
        return out

    def apply(self, vec: Sequence[Fraction]) -> list[Fraction]:
        return [sum((v * vec[c] for c, v in row.items()), Fraction(0)) for row in self.rows]


def _coords(points) -> Mapping[int, Point]:
    if isinstance(points, Configuration):
        return dict(enumerate(points.points))
    if isinstance(points, Mapping):
        return points
    return dict(enumerate(points))


def collinearity_row(p1: Point, p2: Point, p3: Point) -> tuple[Fraction, ...]:
    """Gradient of the orientation determinant in (x1, y1, x2, y2, x3, y3)."""
    return (
        p2.y - p3.y, p3.x - p2.x,
        p3.y - p1.y, p1.x - p3.x,
        p1.y - p2.y, p2.x - p1.x,
    )


def collinearity_matrix(points, triples: TripleSystem, ground=None) -> CollinearityMatrix:
    """Jacobian of the collinearity constraints.

    ``points`` maps ids to coordinates (a Configuration, a sequence or a
    mapping).  Columns come in (x, y) pairs in increasing id order over
    ``ground`` (default: the triple system's ground set).
    """
    if triples.kind != "collinear":
        raise ValueError("collinearity_matrix needs a collinear triple system")
    coords = _coords(points)
    ground = tuple(sorted(triples.ground if ground is None else ground))
    pos = {g: k for k, g in enumerate(ground)}
    rows, degenerate = [], []
    for k, t in enumerate(triples.triples):
        for s in t:
            if s not in pos or s not in coords:
                raise UnknownId(s)
        ps = [coords[s] for s in t]
        if len(set(ps)) < 3:
            degenerate.append(k)
        grad = collinearity_row(*ps)
        row: dict[int, Fraction] = {}
        for slot, s in enumerate(t):
            for axis in (0, 1):
                v = grad[2 * slot + axis]
                if v != 0:
                    row[2 * pos[s] + axis] = v
        rows.append(row)
    return CollinearityMatrix(ground, rows, degenerate)


def matrix_rank(M: CollinearityMatrix) -> int:
    return exact_rank(M.rows)


@dataclass(frozen=True)
class RigidityCertificate:
    ground_size: int
    rank: int
    certificate: int
    triples_used: int
    degenerate_triples: int = 0

    def to_json_obj(self) -> dict:
        return {
            "ground_size": self.ground_size,
            "rank": self.rank,
            "certificate": self.certificate,
            "triples_used": self.triples_used,
            "degenerate_triples": self.degenerate_triples,
        }


def rigidity_certificate(points, triples: TripleSystem, ground=None) -> RigidityCertificate:
    M = collinearity_matrix(points, triples, ground)
    r = matrix_rank(M)
    n = len(M.ground)
    return RigidityCertificate(n, r, 2 * n - r, len(M.rows), len(M.degenerate_rows))


def dgos_bound(n: int, k: int, t: int) -> int:
    """``floor(8 t n / (4 t + k))``."""
    if k < 1 or t < 1:
        raise ValueError("k and t must be positive")
    return (8 * t * n) // (4 * t + k)


@dataclass(frozen=True)
class DgosHypotheses:
    min_coverage: int
    max_pair_multiplicity: int
    max_same_line_triples: int
    k: int
    t: int

    @property
    def coverage_ok(self) -> bool:
        return self.min_coverage >= self.k

    @property
    def pairs_ok(self) -> bool:
        return self.max_pair_multiplicity <= self.t

    @property
    def line_ok(self) -> bool:
        return 2 * self.max_same_line_triples <= self.k

    @property
    def holds(self) -> bool:
        return self.coverage_ok and self.pairs_ok and self.line_ok

    def bound(self, n: int) -> int | None:
        return dgos_bound(n, self.k, self.t) if self.holds and self.k >= 1 else None

    def to_json_obj(self) -> dict:
        return {
            "k": self.k,
            "t": self.t,
            "min_coverage": self.min_coverage,
            "max_pair_multiplicity": self.max_pair_multiplicity,
            "max_same_line_triples": self.max_same_line_triples,
            "coverage_ok": self.coverage_ok,
            "pairs_ok": self.pairs_ok,
            "line_ok": self.line_ok,
        }


def dgos_hypotheses(points, triples: TripleSystem, k: int | None = None, t: int | None = None) -> DgosHypotheses:
    """Measure the three hypotheses of the triple-rich rigidity bound.

    ``k`` and ``t`` default to the achieved minimum coverage and maximum
    pair multiplicity.  The third number is, over points ``s`` and lines
    through ``s``, the largest count of triples of ``s`` lying on one line.
    """
    coords = _coords(points)
    cov = triples.coverage()
    min_cov = min(cov.values(), default=0)
    max_pair = triples.max_pair_multiplicity()
    # every collinear triple lies on a unique line (points distinct), so
    # group each point's triples by the line they span
    per: dict[tuple, int] = {}
    for t3 in triples.triples:
        ps = [coords[s] for s in t3]
        if len(set(ps)) < 3:
            continue
        key_line = line_through(ps[0], ps[1])
        for s in t3:
            per[(s, key_line)] = per.get((s, key_line), 0) + 1
    worst = max(per.values(), default=0)
    return DgosHypotheses(min_cov, max_pair, worst, min_cov if k is None else k, max_pair if t is None else t)


PROJECTIVE_FIELDS = ("1,0", "0,1", "x,0", "y,0", "0,x", "0,y", "x2,xy", "xy,y2")


def projective_field(name: str, p: Point) -> tuple[Fraction, Fraction]:
    x, y = p.x, p.y
    return {
        "1,0": (Fraction(1), Fraction(0)),
        "0,1": (Fraction(0), Fraction(1)),
        "x,0": (x, Fraction(0)),
        "y,0": (y, Fraction(0)),
        "0,x": (Fraction(0), x),
        "0,y": (Fraction(0), y),
        "x2,xy": (x * x, x * y),
        "xy,y2": (x * y, y * y),
    }[name]


@dataclass(frozen=True)
class KernelReport:
    ok: bool
    span_rank: int


def projective_kernel_check(points, M: CollinearityMatrix) -> KernelReport:
    """Assert that the 8 infinitesimal projective motions lie in ker M.

    Returns the rank of their span in ``R^(2n)``, a lower bound for every
    certificate computed from ``M``.
    """
    coords = _coords(points)
    vectors = []
    for name in PROJECTIVE_FIELDS:
        vec = [Fraction(0)] * M.ncols
        for k, g in enumerate(M.ground):
            vx, vy = projective_field(name, coords[g])
            vec[2 * k], vec[2 * k + 1] = vx, vy
        image = M.apply(vec)
        for row_index, val in enumerate(image):
            if val != 0:
                raise KernelViolation(f"field ({name}) violates row {row_index}")
        vectors.append(vec)
    basis = EchelonBasis()
    for v in vectors:
        basis.add({c: x for c, x in enumerate(v) if x != 0})
    return KernelReport(True, basis.rank)


def compose_rigidity(cell_certificates: Sequence[int], closure_unique: bool) -> int:
    """Sum of per-cell certificates, valid once the cells pin down the rest."""
    if not closure_unique:
        raise CompositionUnjustified("fixing the cells does not determine the configuration")
    return sum(cell_certificates)


def compose_rigidity_count_max(cell_certificates: Sequence[int], closure_unique: bool) -> int:
    """The looser ``count * max`` form of the same bound."""
    if not closure_unique:
        raise CompositionUnjustified("fixing the cells does not determine the configuration")
    return len(cell_certificates) * max(cell_certificates, default=0)


def concurrent_triples(config: Configuration) -> TripleSystem:
    """Consecutive concurrent triples: for each point, its lines taken three
    at a time in order of slope (after the dual shear), as line ids."""
    dual, _ = dualize(config)
    col = consecutive_triples(dual)
    return TripleSystem(frozenset(range(config.m)), col.triples, "concurrent", col.carriers)


@dataclass(frozen=True)
class DualCertificate:
    certificate: RigidityCertificate
    shear: int
    valid_for: str = "primal configuration (point-line duality transfer)"

    def to_json_obj(self) -> dict:
        obj = self.certificate.to_json_obj()
        obj.update({"shear": self.shear, "valid_for": self.valid_for})
        return obj


def dual_rigidity_transfer(config: Configuration, concurrency: TripleSystem) -> DualCertificate:
    """Certificate of the dual points w.r.t. the concurrency triples.

    Every point must lie on at least two lines.  The returned number also
    bounds the rigidity of the primal configuration.
    """
    uncovered = [i for i, ls in enumerate(config.point_lines) if len(ls) < 2]
    if uncovered:
        raise UncoveredPoint(uncovered)
    if concurrency.kind != "concurrent":
        raise ValueError("expected a concurrent triple system over line ids")
    dual, shear = dualize(config)
    as_collinear = TripleSystem(concurrency.ground, concurrency.triples, "collinear", concurrency.carriers)
    cert = rigidity_certificate(dual, as_collinear)
    return DualCertificate(cert, int(shear.matrix[0][1]))
