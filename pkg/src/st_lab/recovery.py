"""Good cells, rigid cores, greedy cell selection, determination closure
and the end-to-end pipeline."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import __version__
from .exact import CubeRootMultiple
from .geometry import Configuration, dualize
from .incidence import check_cleaning_inequality, clean, count_between, st_ratio
from .parallel import parallel_map
from .partition import (
    DEFAULT_EPSILON,
    PartitionFailure,
    all_line_crossings,
    build_partition,
)
from .rigidity import (
    compose_rigidity,
    compose_rigidity_count_max,
    dgos_hypotheses,
    projective_kernel_check,
    collinearity_matrix,
    rigidity_certificate,
)
from .triples import TripleSystem, consecutive_triples, in_cell_triples, triple_peel

SCHEMA_VERSION = 1


class EmptyCore(RuntimeError):
    pass


class NoGoodCells(RuntimeError):
    pass


@dataclass
class CellSummary:
    cell: str
    points: frozenset
    in_cell_triples: int
    good: bool
    core_points: frozenset = frozenset()
    core_lines: frozenset = frozenset()
    core_certificate: int | None = None
    peel_threshold: Fraction | None = None
    core_triples: int = 0
    demoted: bool = False

    def to_json_obj(self) -> dict:
        return {
            "cell": self.cell,
            "points": len(self.points),
            "in_cell_triples": self.in_cell_triples,
            "good": self.good,
            "demoted": self.demoted,
            "peel_threshold": None if self.peel_threshold is None else str(self.peel_threshold),
            "core_points": sorted(self.core_points),
            "core_lines": sorted(self.core_lines),
            "core_triples": self.core_triples,
            "core_certificate": self.core_certificate,
        }


def good_cell_threshold(n: int, m: int, c2) -> int:
    """``ceil(C2 * m^(4/3) / n^(2/3))``."""
    return CubeRootMultiple(Fraction(c2), Fraction(m**4, n * n)).ceil()


def classify_cells(config: Configuration, tree, triples: TripleSystem, c2, n: int | None = None,
                   m: int | None = None) -> list[CellSummary]:
    """Per-cell counts of in-cell triples and the good/bad split.

    ``n`` and ``m`` default to the configuration's own sizes.
    """
    n = config.n if n is None else n
    m = config.m if m is None else m
    threshold = good_cell_threshold(n, m, c2)
    counts: dict[str, int] = {}
    for t in triples.triples:
        c = tree.cell_of[t[0]]
        counts[c] = counts.get(c, 0) + 1
    out = []
    for cell, pts in tree.cells().items():
        k = counts.get(cell, 0)
        out.append(CellSummary(cell, frozenset(pts), k, k >= threshold))
    return out


def default_peel_threshold(summary: CellSummary) -> Fraction:
    """``T / (2 |cell|)``: with ``T = C |cell|^2`` triples, points in fewer
    than ``C |cell| / 2`` triples are peeled."""
    if not summary.points:
        return Fraction(0)
    return Fraction(summary.in_cell_triples, 2 * len(summary.points))


def cell_triples(summary: CellSummary, triples: TripleSystem) -> TripleSystem:
    keep = [k for k, t in enumerate(triples.triples) if t[0] in summary.points]
    carriers = tuple(triples.carriers[k] for k in keep) if triples.carriers is not None else None
    return TripleSystem(summary.points, tuple(triples.triples[k] for k in keep), "collinear", carriers)


def prepare_cell(config: Configuration, summary: CellSummary, peel_threshold, triples: TripleSystem) -> CellSummary:
    """Peel the cell's triples and certify the surviving core.

    ``triples`` are the in-cell triples (with carrier line ids); only those
    of this cell are used.
    """
    if not summary.good:
        raise ValueError(f"cell {summary.cell} is not good")
    peel_threshold = Fraction(peel_threshold)
    mine = cell_triples(summary, triples)
    report = triple_peel(summary.points, mine, peel_threshold)
    core = report.surviving
    kept = report.surviving_triples
    if not core or not kept.triples:
        raise EmptyCore(f"peeling emptied cell {summary.cell}")
    cert = rigidity_certificate(config, kept, ground=core)
    return CellSummary(
        summary.cell,
        summary.points,
        summary.in_cell_triples,
        True,
        core,
        frozenset(kept.carriers),
        cert.certificate,
        peel_threshold,
        len(kept),
    )


@dataclass
class Selection:
    cells: list[str]
    union_sizes: list[int]
    gains: list[int]
    shortfall: bool
    target: float
    total_core_lines: int

    @property
    def union_size(self) -> int:
        return self.union_sizes[-1] if self.union_sizes else 0

    def to_json_obj(self) -> dict:
        return {
            "cells": self.cells,
            "union_sizes": self.union_sizes,
            "gains": self.gains,
            "shortfall": self.shortfall,
            "union_size": self.union_size,
            "target": self.target,
            "meets_target": self.union_size >= self.target,
            "total_core_lines": self.total_core_lines,
        }


def greedy_select(summaries: Sequence[CellSummary], k: int, n: int = 1, m: int = 1, c3=Fraction(1, 100)) -> Selection:
    """Pick ``k`` good cells, each maximizing the number of new core lines.

    Ties go to the smallest cell id.  The union size is compared with
    ``(k C3 / 2) m^(4/3) / n^(2/3)``.
    """
    good = sorted((s for s in summaries if s.good and s.core_lines), key=lambda s: s.cell)
    if not good:
        raise NoGoodCells("no good cell with a nonempty core")
    chosen: list[str] = []
    covered: set[int] = set()
    sizes, gains = [], []
    pool = list(good)
    while pool and len(chosen) < k:
        # max() keeps the first maximum and the pool is sorted by cell id
        best = max(pool, key=lambda s: len(s.core_lines - covered))
        gain = len(best.core_lines - covered)
        pool.remove(best)
        chosen.append(best.cell)
        covered |= best.core_lines
        sizes.append(len(covered))
        gains.append(gain)
    total = len(set().union(*(s.core_lines for s in good)))
    target = float(k * Fraction(c3) / 2) * m ** (4 / 3) / n ** (2 / 3)
    return Selection(chosen, sizes, gains, len(chosen) < k, target, total)


@dataclass
class ClosureState:
    determined_points: frozenset
    determined_lines: frozenset
    rounds: int
    history: list[tuple[int, int]]

    def to_json_obj(self) -> dict:
        return {
            "determined_points": sorted(self.determined_points),
            "determined_lines": sorted(self.determined_lines),
            "rounds": self.rounds,
            "history": [{"points": p, "lines": l} for p, l in self.history],
        }


def closure(config: Configuration, seed_points: Iterable[int] = (), seed_lines: Iterable[int] = ()) -> ClosureState:
    """Least fixpoint of: a line through two determined points is
    determined; a point on two determined lines is determined.

    Each round first adds lines, then points; ``history`` records the
    number added by each round.
    """
    pts = set(seed_points)
    lns = set(seed_lines)
    on_line = config.incidences
    lines_at = config.point_lines
    pts_on = [sum(1 for i in ids if i in pts) for ids in on_line]
    lns_at = [sum(1 for j in ls if j in lns) for ls in lines_at]
    history = []
    while True:
        new_lines = [j for j in range(config.m) if j not in lns and pts_on[j] >= 2]
        for j in new_lines:
            lns.add(j)
            for i in on_line[j]:
                lns_at[i] += 1
        new_points = [i for i in range(config.n) if i not in pts and lns_at[i] >= 2]
        for i in new_points:
            pts.add(i)
            for j in lines_at[i]:
                pts_on[j] += 1
        if not new_lines and not new_points:
            break
        history.append((len(new_points), len(new_lines)))
    return ClosureState(frozenset(pts), frozenset(lns), len(history), history)


def closure_sequential(config: Configuration, seed_points=(), seed_lines=(), rng: random.Random | None = None):
    """Same fixpoint, adding one eligible element at a time (random order
    when ``rng`` is given).  Returns ``(points, lines)``."""
    pts, lns = set(seed_points), set(seed_lines)
    while True:
        cands = [("l", j) for j in range(config.m)
                 if j not in lns and sum(1 for i in config.incidences[j] if i in pts) >= 2]
        cands += [("p", i) for i in range(config.n)
                  if i not in pts and sum(1 for j in config.point_lines[i] if j in lns) >= 2]
        if not cands:
            return frozenset(pts), frozenset(lns)
        kind, e = rng.choice(cands) if rng is not None else cands[0]
        (lns if kind == "l" else pts).add(e)


@dataclass
class PipelineParams:
    delta: Fraction = Fraction(1, 2)
    c2: Fraction = Fraction(1, 100)
    c3: Fraction | None = None
    peel: Fraction | None = None
    k: int = 10
    levels: int | None = None
    epsilon: Fraction = DEFAULT_EPSILON
    seed: int = 0
    orientation: str = "auto"

    def to_json_obj(self) -> dict:
        def s(v):
            return None if v is None else str(v)

        return {
            "delta": s(self.delta),
            "c2": s(self.c2),
            "c3": s(self.c3 if self.c3 is not None else self.c2),
            "peel": s(self.peel) if self.peel is not None else "auto",
            "k": self.k,
            "levels": self.levels if self.levels is not None else "auto",
            "epsilon": s(self.epsilon),
            "seed": self.seed,
            "orientation": self.orientation,
        }


def derived_levels(n: int, m: int, delta, surviving_points: int) -> tuple[int, float, bool]:
    """Levels ``t`` with ``2^t`` near ``D^2``, ``D = delta n^(2/3) / (16 m^(1/3))``,
    clamped to ``[1, log2(surviving_points)]``.  Returns ``(t, D, clamped)``."""
    D = float(delta) * n ** (2 / 3) / (16 * m ** (1 / 3))
    raw = round(math.log2(D * D)) if D > 0 else 1
    hi = max(1, int(math.floor(math.log2(surviving_points)))) if surviving_points >= 1 else 1
    t = min(max(raw, 1), hi)
    return t, D, t != raw


def run_pipeline(config: Configuration, params: PipelineParams | None = None) -> dict:
    """Clean, partition, classify, prepare, select, close and certify.

    Returns a JSON-ready report.  When ``orientation`` is ``"auto"`` and
    there are fewer lines than points, the whole run happens on the dual
    and the results are mapped back (determined dual lines are the
    determined points).
    """
    params = params or PipelineParams()
    report: dict = {
        "schema": SCHEMA_VERSION,
        "tool_version": __version__,
        "parameters": params.to_json_obj(),
        "notes": [],
    }
    n0, m0 = config.n, config.m
    total0 = sum(len(ids) for ids in config.incidences)
    report["input"] = {"n": n0, "m": m0, "incidences": total0}
    if n0 < 1 or m0 < 1:
        report["status"] = "degenerate"
        report["notes"].append("need at least one point and one line")
        return report
    main, full = st_ratio(config, total0)
    report["input"].update({"ratio_main": main, "ratio_full": full})

    if params.orientation == "dual" or (params.orientation == "auto" and m0 < n0):
        work, shear = dualize(config)
        side = "dual"
        report["notes"].append("fewer lines than points: running on the dual configuration")
    elif params.orientation in ("auto", "primal"):
        work, shear, side = config, None, "primal"
    else:
        raise ValueError(f"unknown orientation {params.orientation!r}")
    report["orientation"] = side
    report["cell_ids_refer_to"] = "dual configuration (ids are input line/point ids swapped)" if side == "dual" else "input configuration"
    report["shear"] = int(shear.matrix[0][1]) if shear is not None else 0
    n, m = work.n, work.m

    # step 0: cleaning
    cleaning = clean(work, params.delta)
    report["cleaning"] = cleaning.to_json_obj()
    pids = sorted(cleaning.surviving_points)
    lids = sorted(cleaning.surviving_lines)
    report["cleaning_inequalities"] = [
        check_cleaning_inequality(len(pids), len(lids), cleaning.incidences_after, m, n, 0, 1, "line").to_json_obj(),
        check_cleaning_inequality(len(pids), len(lids), cleaning.incidences_after, m, n, 1, 0, "point").to_json_obj(),
    ]
    if not pids or not lids:
        report["status"] = "empty_after_cleaning"
        return _finish(report, config, side, frozenset(), frozenset(), total0)
    cleaned = work.subconfiguration(pids, lids)

    # step 1: partition
    if params.levels is None:
        t, D, clamped = derived_levels(n, m, params.delta, len(pids))
        if clamped:
            report["notes"].append(f"levels clamped to {t} (D = {D:.4g})")
    else:
        t, D, clamped = params.levels, float(params.delta) * n ** (2 / 3) / (16 * m ** (1 / 3)), False
    try:
        tree = build_partition(cleaned, t, params.epsilon, params.seed)
    except PartitionFailure as exc:
        report["partition"] = {"levels": t, "failed_level": exc.level, "error": str(exc)}
        report["status"] = "partition_failed"
        return _finish(report, config, side, frozenset(), frozenset(), total0)
    crossings = all_line_crossings(tree, cleaned)
    cells = tree.cells()
    D_total = tree.total_degree
    report["partition"] = {
        "levels": t,
        "levels_source": "given" if params.levels is not None else "derived",
        "target_D": D,
        "clamped": clamped,
        "degrees": tree.degrees,
        "total_degree": D_total,
        "factors": [f.to_json_obj() for f in tree.levels],
        "cells": len(cells),
        # a single degree-1 cut already makes 2 cells, so D^2 only bounds t >= 2
        "cell_bound_ok": len(cells) <= 2**t and (t < 2 or len(cells) <= D_total * D_total),
        "achieved_max_cell": tree.achieved_max_cell,
        "balance_bound": tree.balance_bound(len(pids)),
        "boundary_points": len(tree.boundary),
        "max_line_crossings": max(crossings, default=0),
        "bezout_ok": all(c <= D_total for c in crossings),
    }

    # step 2: good cells and their rigid cores
    all_triples = consecutive_triples(cleaned)
    ict = in_cell_triples(cleaned, tree.cell_of)
    summaries = classify_cells(cleaned, tree, ict, params.c2, n=n, m=m)
    threshold = good_cell_threshold(n, m, params.c2)
    bad_sum = sum(s.in_cell_triples for s in summaries if not s.good)
    report["triples"] = {
        "consecutive": len(all_triples),
        "in_cell": len(ict),
        "good_cell_threshold": threshold,
        "good_cells": sum(s.good for s in summaries),
        "in_good_cells": sum(s.in_cell_triples for s in summaries if s.good),
        "bad_accounting_ok": bad_sum <= threshold * len(summaries),
    }

    def prep(s: CellSummary) -> CellSummary:
        if not s.good:
            return s
        peel = params.peel if params.peel is not None else default_peel_threshold(s)
        try:
            return prepare_cell(cleaned, s, peel, ict)
        except EmptyCore:
            return CellSummary(s.cell, s.points, s.in_cell_triples, False, peel_threshold=Fraction(peel), demoted=True)

    summaries = parallel_map(prep, summaries)

    # step 3: greedy selection
    c3 = params.c3 if params.c3 is not None else params.c2
    try:
        selection = greedy_select(summaries, params.k, n, m, c3)
    except NoGoodCells:
        report["cells"] = [_cell_json(s, cleaned, pids, lids) for s in summaries]
        report["status"] = "no_good_cells"
        return _finish(report, config, side, frozenset(), frozenset(), total0)
    report["selection"] = selection.to_json_obj()
    by_id = {s.cell: s for s in summaries}
    chosen = [by_id[c] for c in selection.cells]

    # step 4: determination closure seeded with the chosen cores
    seed_pts = frozenset().union(*(s.core_points for s in chosen))
    seed_lns = frozenset().union(*(s.core_lines for s in chosen))
    state = closure(cleaned, seed_pts, seed_lns)
    report["closure"] = {
        "seed_points": len(seed_pts),
        "seed_lines": len(seed_lns),
        "seeded_with": "core points and core lines",
        "rounds": state.rounds,
        "history": [{"points": p, "lines": l} for p, l in state.history],
        "determined_points": len(state.determined_points),
        "determined_lines": len(state.determined_lines),
    }

    # final certificate on the determined points
    det_pts = sorted(state.determined_points)
    if side == "dual":
        final_lines = sorted(state.determined_lines)
        report["notes"].append("final certificate uses the concurrency triples of the determined points")
    else:
        final_lines = list(range(cleaned.m))
    sub = cleaned.subconfiguration(det_pts, final_lines)
    sub_triples = consecutive_triples(sub)
    cert = rigidity_certificate(sub, sub_triples)
    kernel = projective_kernel_check(sub, collinearity_matrix(sub, sub_triples))
    hyp = dgos_hypotheses(sub, sub_triples)
    report["final_certificate"] = cert.to_json_obj()
    report["final_certificate"]["projective_span_rank"] = kernel.span_rank
    report["final_certificate"]["dgos"] = hyp.to_json_obj()
    report["final_certificate"]["dgos_bound"] = hyp.bound(sub.n)
    if side == "dual":
        report["final_certificate"]["valid_for"] = "primal (determined points, determined lines) by duality transfer"
    certs = [s.core_certificate for s in chosen]
    report["composed_bound"] = compose_rigidity(certs, closure_unique=True)
    report["composed_bound_count_times_max"] = compose_rigidity_count_max(certs, closure_unique=True)
    report["cells"] = [_cell_json(s, cleaned, pids, lids) for s in summaries]
    report["status"] = "ok"

    det_work_pts = frozenset(pids[i] for i in state.determined_points)
    det_work_lns = frozenset(lids[j] for j in state.determined_lines)
    return _finish(report, config, side, det_work_pts, det_work_lns, total0)


def _cell_json(s: CellSummary, cleaned: Configuration, pids, lids) -> dict:
    obj = s.to_json_obj()
    obj["core_points"] = [pids[i] for i in obj["core_points"]]
    obj["core_lines"] = [lids[j] for j in obj["core_lines"]]
    return obj


def _finish(report: dict, config: Configuration, side: str, work_pts, work_lns, total0: int) -> dict:
    """Translate determined ids back to the input configuration."""
    if side == "dual":
        det_points, det_lines = sorted(work_lns), sorted(work_pts)
    else:
        det_points, det_lines = sorted(work_pts), sorted(work_lns)
    report["determined_points"] = det_points
    report["determined_lines"] = det_lines
    inc_star = count_between(config, det_points, range(config.m))
    report["fractions"] = {
        "determined_points": len(det_points) / config.n if config.n else 0.0,
        "determined_lines": len(det_lines) / config.m if config.m else 0.0,
        "incidence_fraction": inc_star / total0 if total0 else 0.0,
    }
    return report
