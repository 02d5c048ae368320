"""Incidence counting, Szemeredi-Trotter ratios and richness cleaning."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import CubeRootMultiple
from .geometry import Configuration, LineId, PointId, grouped_incidences, naive_incidences
from .peeling import Peeler, peel_rounds


@dataclass(frozen=True)
class IncidenceStats:
    total: int
    per_point_richness: dict[PointId, int]
    per_line_richness: dict[LineId, int]


def incidence_lists(config: Configuration, method: str = "grouped") -> list[list[PointId]]:
    if method == "naive":
        return naive_incidences(config.points, config.lines)
    if method == "grouped":
        return grouped_incidences(config.points, config.lines)
    raise ValueError(f"unknown counting method {method!r}")


def count_incidences(config: Configuration, method: str = "grouped") -> IncidenceStats:
    lists = incidence_lists(config, method)
    per_point = {i: 0 for i in range(config.n)}
    for ids in lists:
        for i in ids:
            per_point[i] += 1
    per_line = {j: len(ids) for j, ids in enumerate(lists)}
    return IncidenceStats(sum(per_line.values()), per_point, per_line)


def st_ratio(config: Configuration, incidences: int | None = None) -> tuple[float, float]:
    """``I / (n m)^(2/3)`` and ``I / ((n m)^(2/3) + n + m)`` as floats."""
    n, m = config.n, config.m
    if n < 1 or m < 1:
        raise ValueError("st_ratio needs at least one point and one line")
    total = incidences if incidences is not None else sum(len(ids) for ids in config.incidences)
    main = (n * m) ** (2 / 3)
    return total / main, total / (main + n + m)


def point_threshold(n: int, m: int, delta) -> CubeRootMultiple:
    """``delta * m^(2/3) / (4 n^(1/3))``."""
    return CubeRootMultiple(Fraction(delta) / 4, Fraction(m * m, n))


def line_threshold(n: int, m: int, delta) -> CubeRootMultiple:
    """``delta * n^(2/3) / (4 m^(1/3))``."""
    return CubeRootMultiple(Fraction(delta) / 4, Fraction(n * n, m))


@dataclass
class CleaningReport:
    rounds: int
    surviving_points: frozenset[PointId]
    surviving_lines: frozenset[LineId]
    incidences_before: int
    incidences_after: int
    point_threshold: object
    line_threshold: object

    @property
    def empty(self) -> bool:
        return not self.surviving_points and not self.surviving_lines

    @property
    def incidence_fraction(self) -> float:
        return self.incidences_after / self.incidences_before if self.incidences_before else 0.0

    def to_json_obj(self) -> dict:
        return {
            "rounds": self.rounds,
            "surviving_points": sorted(self.surviving_points),
            "surviving_lines": sorted(self.surviving_lines),
            "incidences_before": self.incidences_before,
            "incidences_after": self.incidences_after,
            "point_threshold": str(self.point_threshold),
            "line_threshold": str(self.line_threshold),
            "point_threshold_float": float(self.point_threshold),
            "line_threshold_float": float(self.line_threshold),
            "incidence_fraction": self.incidence_fraction,
            "empty": self.empty,
        }


def richness_peeler(config: Configuration, point_thr, line_thr) -> Peeler:
    """Peeler over elements ``("p", i)`` and ``("l", j)``; each incidence
    is one support owned by both of its ends."""
    elements = [("p", i) for i in range(config.n)] + [("l", j) for j in range(config.m)]
    supports = []
    for j, ids in enumerate(config.incidences):
        for i in ids:
            supports.append((("p", i), ("l", j)))

    def below(e, count):
        return count < (point_thr if e[0] == "p" else line_thr)

    return Peeler(elements, supports, supports, below)


def _survivors(peeler: Peeler) -> tuple[frozenset, frozenset]:
    pts = frozenset(i for kind, i in peeler.alive if kind == "p")
    lns = frozenset(j for kind, j in peeler.alive if kind == "l")
    return pts, lns


def count_between(config: Configuration, points, lines) -> int:
    points = set(points)
    return sum(sum(1 for i in config.incidences[j] if i in points) for j in lines)


def peel_incidences(config: Configuration, point_thr, line_thr) -> CleaningReport:
    """Round-based removal of points (lines) with richness strictly below
    ``point_thr`` (``line_thr``) inside the surviving subconfiguration."""
    peeler = richness_peeler(config, point_thr, line_thr)
    rounds = peel_rounds(peeler)
    pts, lns = _survivors(peeler)
    before = sum(len(ids) for ids in config.incidences)
    return CleaningReport(rounds, pts, lns, before, count_between(config, pts, lns), point_thr, line_thr)


def clean(config: Configuration, delta) -> CleaningReport:
    """Richness cleaning with thresholds frozen at the input sizes."""
    n, m = config.n, config.m
    if n < 1 or m < 1:
        raise ValueError("clean needs at least one point and one line")
    return peel_incidences(config, point_threshold(n, m, delta), line_threshold(n, m, delta))


class BadExponents(ValueError):
    pass


@dataclass(frozen=True)
class InequalityReport:
    form: str
    alpha: Fraction
    beta: Fraction
    size_constant: float
    incidence_constant: float
    conclusion_constant: float
    regime_constant: float

    def to_json_obj(self) -> dict:
        return {
            "form": self.form,
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "size_constant": self.size_constant,
            "incidence_constant": self.incidence_constant,
            "conclusion_constant": self.conclusion_constant,
            "regime_constant": self.regime_constant,
        }


def check_cleaning_inequality(
    points: int, lines: int, incidences: int, m: int, n: int, alpha, beta, form: str = "line"
) -> InequalityReport:
    """Measure the constants in the line (or point) cleaning inequality.

    Line form, for ``2*alpha + beta = 1`` and ``alpha <= 2/3``: with
    ``|P| <= c1 m^a n^b`` and ``I >= c2 m^(a+2/3) n^(b-1/3)`` one expects
    ``|L| >= c3 m^(a/2+1) n^(b/2-1/2)``.  The point form swaps the roles
    (``a + 2b = 1``, ``b <= 2/3``).  Returns the achieved c1, c2, c3 and
    ``min(n^2/m, m^2/n)`` (the largest admissible regime constant).
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    if form == "line":
        if 2 * alpha + beta != 1 or alpha > Fraction(2, 3):
            raise BadExponents(f"line form needs 2a+b=1, a<=2/3; got a={alpha}, b={beta}")
        size, target = points, lines
        inc_exp = (alpha + Fraction(2, 3), beta - Fraction(1, 3))
        con_exp = (alpha / 2 + 1, beta / 2 - Fraction(1, 2))
    elif form == "point":
        if alpha + 2 * beta != 1 or beta > Fraction(2, 3):
            raise BadExponents(f"point form needs a+2b=1, b<=2/3; got a={alpha}, b={beta}")
        size, target = lines, points
        inc_exp = (alpha - Fraction(1, 3), beta + Fraction(2, 3))
        con_exp = (alpha / 2 - Fraction(1, 2), beta / 2 + 1)
    else:
        raise ValueError(f"unknown form {form!r}")

    def scale(e):
        return float(m) ** float(e[0]) * float(n) ** float(e[1])

    return InequalityReport(
        form,
        alpha,
        beta,
        size / scale((alpha, beta)),
        incidences / scale(inc_exp),
        target / scale(con_exp),
        min(n * n / m, m * m / n),
    )
