import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from st_lab.generators import gen_elekes, gen_random
from st_lab.geometry import Configuration, Line, Point
from st_lab.peeling import peel_sequential
from st_lab.triples import (
    NotIncident,
    TripleSystem,
    consecutive_triples,
    in_cell_triples,
    sort_along_line,
    triple_count_formula,
    triple_peel,
    triple_peeler,
)

from helpers import dense_config


def collinear_config(k):
    return Configuration([Point(i, 0) for i in range(k)], [Line(0, 1, 0)])


def brute_consecutive(config):
    """Triples on a line with no other point of that line strictly between
    the outer two; position is x, or y for vertical lines."""
    out = set()
    for l, ids in zip(config.lines, config.incidences):
        def pos(i):
            p = config.points[i]
            return p.y if l.b == 0 else p.x
        for t in combinations(ids, 3):
            lo, hi = min(map(pos, t)), max(map(pos, t))
            if not any(lo < pos(i) < hi for i in ids if i not in t):
                out.add(tuple(sorted(t)))
    return out


def test_sort_along_line_examples():
    config = Configuration([Point(2, 2), Point(0, 0), Point(1, 1)], [])
    assert sort_along_line(Line(1, -1, 0), [0, 1, 2], config) == [1, 2, 0]
    config = Configuration([Point(0, 3), Point(0, 1), Point(0, 2)], [])
    assert sort_along_line(Line(1, 0, 0), [0, 1, 2], config) == [1, 2, 0]
    assert len(sort_along_line(Line(1, 0, 0), [0, 1], config)) == 2
    with pytest.raises(NotIncident):
        sort_along_line(Line(0, 1, 0), [0], config)


def test_five_collinear_points():
    ts = consecutive_triples(collinear_config(5))
    assert len(ts) == 3


def test_triple_system_validation():
    with pytest.raises(ValueError):
        TripleSystem({0, 1, 2}, ((0, 0, 1),))
    with pytest.raises(ValueError):
        TripleSystem({0, 1, 2}, ((0, 1, 5),))
    with pytest.raises(ValueError):
        TripleSystem({0, 1, 2}, ((0, 1, 2), (2, 1, 0)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_consecutive_matches_brute_force(seed):
    config = dense_config(seed, 25, 20)
    ts = consecutive_triples(config)
    assert set(ts.triples) == brute_consecutive(config)
    assert len(ts) == triple_count_formula(config)
    assert ts.max_pair_multiplicity() <= 2


def test_in_cell_examples():
    config = collinear_config(4)
    full = consecutive_triples(config)
    assert in_cell_triples(config, {i: "A" for i in range(4)}).triples == full.triples
    assert len(in_cell_triples(config, {0: "A", 1: "A", 2: "B", 3: "B"})) == 0
    config = collinear_config(3)
    assert len(in_cell_triples(config, {0: "A", 1: None, 2: "A"})) == 0


def test_triple_peel_examples():
    config = collinear_config(5)
    ts = consecutive_triples(config)
    assert triple_peel(range(5), ts, 2).surviving == frozenset()
    assert triple_peel(range(5), ts, 0).surviving == frozenset(range(5))
    disjoint = TripleSystem(range(9), ((0, 1, 2), (3, 4, 5), (6, 7, 8)))
    assert triple_peel(range(9), disjoint, 1).surviving == frozenset(range(9))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)]))
def test_triple_peel_confluence_and_accounting(seed, threshold):
    config = dense_config(seed, 30, 30, side=7)
    ts = consecutive_triples(config)
    rep = triple_peel(range(config.n), ts, threshold)
    cov = rep.surviving_triples.coverage()
    assert all(cov[s] >= threshold for s in rep.surviving)
    removed = config.n - len(rep.surviving)
    assert len(ts) - len(rep.surviving_triples) <= threshold * removed
    peeler = triple_peeler(range(config.n), ts, threshold)
    peel_sequential(peeler, random.Random(seed))
    assert frozenset(peeler.alive) == rep.surviving


def test_grid_and_random_formula():
    for N in range(2, 7):
        config = gen_elekes(N)
        assert len(consecutive_triples(config)) == triple_count_formula(config) == N**3 * (N - 2)
    config = gen_random(40, 30, seed=2)
    assert len(consecutive_triples(config)) == triple_count_formula(config)


def test_json_roundtrip():
    ts = consecutive_triples(collinear_config(4))
    assert TripleSystem.from_json_obj(ts.to_json_obj()) == ts
