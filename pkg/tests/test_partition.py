import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from st_lab.generators import gen_circle, gen_elekes, gen_random
from st_lab.geometry import Configuration, Line, Point
from st_lab.partition import (
    BisectingFactor,
    LineInZeroSet,
    PartitionTree,
    all_line_crossings,
    bisect_classes,
    build_partition,
    degree_for,
    expand_affine,
    line_crossings,
    monomial_count,
    sign_vector,
    veronese_lift,
)


def side_counts(factor, pts):
    signs = [factor.sign(p) for p in pts]
    return signs.count(1), signs.count(-1)


def test_veronese_examples():
    assert veronese_lift(Point(2, 3), 1) == [2, 3]
    assert veronese_lift(Point(2, 3), 2) == [2, 3, 4, 6, 9]
    assert all(v == 0 for v in veronese_lift(Point(0, 0), 4))


def test_degree_rule():
    # smallest d with (d+1)(d+2)/2 > classes
    assert [degree_for(k) for k in (1, 2, 3, 4, 5, 6, 9, 10)] == [1, 1, 2, 2, 2, 3, 3, 4]
    assert monomial_count(2) == 6


def test_bisect_two_points():
    f = bisect_classes([[Point(0, 0), Point(3, 1)]], 1, 0, seed=0)
    assert max(side_counts(f, [Point(0, 0), Point(3, 1)])) <= 1


def test_bisect_square_corners():
    square = [Point(0, 0), Point(1, 0), Point(0, 1), Point(1, 1)]
    f = bisect_classes([square], 1, 0, seed=3)
    assert max(side_counts(f, square)) <= 2


def test_ham_sandwich_two_clusters():
    left = [Point(x, y) for x, y in [(0, 0), (1, 3), (2, 1), (0, 2)]]
    right = [Point(x, y) for x, y in [(10, 0), (11, 2), (12, 5), (13, 1)]]
    f = bisect_classes([left, right], 1, 0, seed=1)
    assert max(side_counts(f, left)) <= 2 and max(side_counts(f, right)) <= 2


def test_one_level_halves():
    config = gen_random(20, 1, seed=5)
    tree = build_partition(config, 1, 0, seed=0)
    assert len(tree.cells()) <= 2
    assert all(len(c) <= 10 for c in tree.cells().values())


def test_elekes4_exact_halving():
    config = gen_elekes(4)
    tree = build_partition(config, 3, 0, seed=0)
    assert len(tree.cells()) == 8
    assert tree.achieved_max_cell <= 16


def check_tree(tree, config, t):
    cells = tree.cells()
    assert len(cells) <= 2**t
    D = tree.total_degree
    if t >= 2:
        assert len(cells) <= D * D
    n = len(tree.cell_of)
    assert tree.achieved_max_cell <= (Fraction(1, 2) + tree.epsilon) ** t * n + t
    for i, label in tree.cell_of.items():
        assert sign_vector(tree.levels, config.points[i]) == label
    assert all(c <= D for c in all_line_crossings(tree, config))


@pytest.mark.parametrize("seed", range(3))
def test_elekes5_epsilon_bound(seed):
    config = gen_elekes(5)
    tree = build_partition(config, 3, Fraction(1, 20), seed=seed)
    assert tree.achieved_max_cell <= math.ceil(0.55**3 * config.n)
    check_tree(tree, config, 3)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**4), st.integers(1, 3))
def test_random_partition_invariants(seed, t):
    config = gen_random(60, 20, seed=seed)
    tree = build_partition(config, t, Fraction(1, 20), seed=seed)
    check_tree(tree, config, t)


def test_circle_needs_curves():
    config = gen_circle(40)
    tree = build_partition(config, 3, Fraction(1, 20), seed=0)
    assert tree.degrees == [1, 1, 2]
    check_tree(tree, config, 3)


def test_seed_reproducible():
    config = gen_elekes(4)
    a = build_partition(config, 3, Fraction(1, 20), seed=7)
    b = build_partition(config, 3, Fraction(1, 20), seed=7)
    assert a.dumps() == b.dumps()
    assert PartitionTree.from_json_obj(a.to_json_obj()).to_json_obj() == a.to_json_obj()


def manual_tree(factors, config):
    labels = {i: sign_vector(factors, p) for i, p in enumerate(config.points)}
    return PartitionTree(factors, labels, Fraction(0), 0)


def test_single_cut_one_crossing():
    pts = [Point(x, 0) for x in range(-3, 4) if x != 0]
    config = Configuration(pts, [Line(0, 1, 0)])
    tree = manual_tree([BisectingFactor(1, (0, 1, 0))], config)  # f = x
    assert line_crossings(config.lines[0], tree, config) == 1


def test_product_of_lines_bounded():
    pts = [Point(x, 2 * x + 1) for x in range(-10, 11)]
    test_line = Line(2, -1, -1)
    config = Configuration(pts, [test_line])
    cuts = [BisectingFactor(1, (-k, 1, 0)) for k in (Fraction(-7, 2), Fraction(1, 2), Fraction(9, 2))]  # x = k
    tree = manual_tree(cuts, config)
    assert line_crossings(test_line, tree, config) <= 3


def test_line_inside_zero_set():
    config = Configuration([Point(0, 0), Point(0, 1)], [Line(1, 0, 0)])
    tree = manual_tree([BisectingFactor(1, (1, 1, 0))], config)  # x + 1, fine
    assert line_crossings(config.lines[0], tree, config) == 0
    bad = PartitionTree([BisectingFactor(1, (0, 1, 0))], {0: None, 1: None}, Fraction(0), 0)
    with pytest.raises(LineInZeroSet):
        line_crossings(config.lines[0], bad, config)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.fractions(-5, 5, max_denominator=5), min_size=6, max_size=6).filter(any),
       st.fractions(-5, 5, max_denominator=3), st.fractions(-5, 5, max_denominator=3),
       st.fractions(1, 5, max_denominator=3), st.integers(-4, 4), st.integers(-4, 4))
def test_expand_affine(coeffs, cx, cy, s, x, y):
    f_uv = BisectingFactor(2, tuple(coeffs))
    f_xy = BisectingFactor(2, tuple(expand_affine(coeffs, 2, cx, cy, s)))
    assert f_xy.evaluate(x, y) == f_uv.evaluate((x - cx) / s, (y - cy) / s)
