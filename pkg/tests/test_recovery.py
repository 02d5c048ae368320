import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from st_lab.generators import gen_elekes, gen_random
from st_lab.geometry import Configuration, Line, Point
from st_lab.partition import build_partition
from st_lab.recovery import (
    CellSummary,
    NoGoodCells,
    PipelineParams,
    classify_cells,
    closure,
    closure_sequential,
    default_peel_threshold,
    greedy_select,
    prepare_cell,
    run_pipeline,
)
from st_lab.report import dumps
from st_lab.rigidity import collinearity_matrix, projective_kernel_check
from st_lab.triples import consecutive_triples, in_cell_triples

from helpers import dense_config


@pytest.fixture(scope="module")
def elekes6():
    config = gen_elekes(6)
    tree = build_partition(config, 3, Fraction(1, 20), seed=0)
    ict = in_cell_triples(config, tree.cell_of)
    return config, tree, ict


def test_classify_thresholds(elekes6):
    config, tree, ict = elekes6
    assert all(s.good for s in classify_cells(config, tree, ict, 0))
    summaries = classify_cells(config, tree, ict, Fraction(1, 100))
    good = sum(s.in_cell_triples for s in summaries if s.good)
    assert good >= len(ict) / 2
    huge = classify_cells(config, tree, ict, 10**6)
    assert not any(s.good for s in huge)


def test_zero_triple_cell_is_bad():
    config = Configuration([Point(0, 0), Point(5, 1)], [Line(1, 0, 0)])
    tree = build_partition(config, 1, 0, seed=0)
    summaries = classify_cells(config, tree, in_cell_triples(config, tree.cell_of), 1)
    assert summaries and not any(s.good for s in summaries)


def test_prepare_cell_peel_zero(elekes6):
    config, tree, ict = elekes6
    s = next(s for s in classify_cells(config, tree, ict, 0) if s.in_cell_triples)
    prepared = prepare_cell(config, s, 0, ict)
    assert prepared.core_points == s.points
    carriers = {ict.carriers[k] for k, t in enumerate(ict.triples) if t[0] in s.points}
    assert prepared.core_lines == carriers


def test_prepare_cell_default_peel(elekes6):
    config, tree, ict = elekes6
    for s in classify_cells(config, tree, ict, Fraction(1, 100)):
        if not s.good:
            continue
        prepared = prepare_cell(config, s, default_peel_threshold(s), ict)
        assert prepared.core_points <= s.points
        sub_triples = ict.restrict(prepared.core_points)
        kernel = projective_kernel_check(config, collinearity_matrix(config, sub_triples, ground=prepared.core_points))
        assert prepared.core_certificate >= kernel.span_rank
        # every core line carries a triple of core points
        carried = {sub_triples.carriers[k] for k in range(len(sub_triples))}
        assert prepared.core_lines <= carried


def test_prepare_cell_full_core():
    # two parallel 4-point lines: every point is in >= 1 triple
    pts = [Point(i, 0) for i in range(4)] + [Point(i, 1) for i in range(4)]
    config = Configuration(pts, [Line(0, 1, 0), Line(0, 1, 1)])
    s = CellSummary("+", frozenset(range(8)), 4, True)
    ts = consecutive_triples(config)
    prepared = prepare_cell(config, s, 1, ts)
    assert prepared.core_points == frozenset(range(8))


def summary(cell, lines):
    return CellSummary(cell, frozenset(), 5, True, frozenset({0}), frozenset(lines), 8)


def test_greedy_examples():
    sel = greedy_select([summary("+", {1, 2})], 1)
    assert sel.cells == ["+"]
    sel = greedy_select([summary("+", {1, 2}), summary("-", {1, 2})], 2)
    assert sel.gains == [2, 0] and sel.union_size == 2
    with pytest.raises(NoGoodCells):
        greedy_select([], 3)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.frozensets(st.integers(0, 20), min_size=1, max_size=6), min_size=1, max_size=8),
       st.integers(1, 8))
def test_greedy_union_monotone(line_sets, k):
    cells = [summary(f"c{i:02d}", ls) for i, ls in enumerate(line_sets)]
    sel = greedy_select(cells, k)
    assert sel.union_sizes == sorted(sel.union_sizes)
    assert sel.union_size <= sel.total_core_lines == len(frozenset().union(*line_sets))
    assert len(sel.cells) == min(k, len(cells))


def square():
    pts = [Point(0, 0), Point(2, 0), Point(2, 2), Point(0, 2), Point(1, 1)]
    lines = [Line(1, -1, 0), Line(1, 1, 2), Line(0, 1, 0), Line(1, 0, 2), Line(0, 1, 2), Line(1, 0, 0)]
    return Configuration(pts, lines)


def test_closure_square():
    state = closure(square(), (), (0, 1))
    assert state.determined_points == {4}
    assert state.determined_lines == {0, 1}


def test_closure_all_lines():
    config = gen_elekes(3)
    state = closure(config, (), range(config.m))
    on_two = {i for i, ls in enumerate(config.point_lines) if len(ls) >= 2}
    assert state.determined_points == on_two
    assert state.history[0][0] == len(on_two)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_closure_laws(seed):
    rng = random.Random(seed)
    config = dense_config(seed, 30, 25, side=6)
    sp = set(rng.sample(range(config.n), 3))
    sl = set(rng.sample(range(config.m), min(2, config.m)))
    state = closure(config, sp, sl)
    assert sp <= state.determined_points and sl <= state.determined_lines
    again = closure(config, state.determined_points, state.determined_lines)
    assert again.determined_points == state.determined_points
    assert again.determined_lines == state.determined_lines
    assert again.rounds == 0
    pts, lns = closure_sequential(config, sp, sl, rng)
    assert (pts, lns) == (state.determined_points, state.determined_lines)
    bigger = closure(config, sp | {rng.randrange(config.n)}, sl)
    assert state.determined_points <= bigger.determined_points


def test_pipeline_degenerate():
    report = run_pipeline(Configuration([Point(0, 0)], [Line(1, 0, 0)]))
    assert report["schema"] == 1
    assert report["status"] in ("degenerate", "empty_after_cleaning", "no_good_cells", "partition_failed")


def test_pipeline_elekes6():
    report = run_pipeline(gen_elekes(6), PipelineParams(seed=1))
    assert report["status"] == "ok"
    assert report["final_certificate"]["certificate"] >= 8
    assert report["triples"]["bad_accounting_ok"]
    assert report["partition"]["cell_bound_ok"] and report["partition"]["bezout_ok"]
    assert 0 < report["fractions"]["determined_points"] <= 1
    assert dumps(report) == dumps(run_pipeline(gen_elekes(6), PipelineParams(seed=1)))


def test_pipeline_random_has_little_structure():
    structured = run_pipeline(gen_elekes(5), PipelineParams(seed=0))
    noise = run_pipeline(gen_random(250, 125, seed=3), PipelineParams(seed=0))
    if noise["status"] == "ok":
        assert noise["fractions"]["determined_points"] < structured["fractions"]["determined_points"]
    else:
        assert noise["status"] in ("no_good_cells", "empty_after_cleaning")


def test_pipeline_primal_route():
    report = run_pipeline(gen_elekes(4), PipelineParams(seed=0, orientation="primal", levels=2))
    assert report["orientation"] == "primal"
    assert report["partition"]["levels"] == 2
