import statistics
from itertools import combinations

import pytest

from st_lab.generators import GeneratorSpec, gen_circle, gen_elekes, gen_random, gen_unbalanced
from st_lab.geometry import collinear
from st_lab.incidence import count_incidences


@pytest.mark.parametrize("N", range(1, 13))
def test_elekes_sizes(N):
    config = gen_elekes(N)
    stats = count_incidences(config)
    assert (config.n, config.m) == (2 * N**3, N**3)
    assert stats.total == N**4
    assert all(r == N for r in stats.per_line_richness.values())


def test_elekes_small_examples():
    c = gen_elekes(1)
    assert (c.n, c.m, count_incidences(c).total) == (2, 1, 1)


def test_unbalanced():
    assert gen_unbalanced(3, 2) == gen_elekes(3)
    c = gen_unbalanced(2, 1)
    assert c.m == 0 and count_incidences(c).total == 0
    c = gen_unbalanced(3, 4)
    stats = count_incidences(c)
    assert c.n == 3 * 4 * 9 and c.m == 3 * 3 * 9
    assert all(r == 3 for r in stats.per_line_richness.values())


def test_random_determinism_and_small():
    assert gen_random(30, 20, 5).dumps() == gen_random(30, 20, 5).dumps()
    c = gen_random(2, 1, 0)
    assert c.m == 1 and count_incidences(c).total == 2


def test_random_incidences_near_2m():
    totals = [count_incidences(gen_random(40, 20, s)).total for s in range(100)]
    assert abs(statistics.mean(totals) - 40) <= 0.2 * 40


def test_circle():
    c = gen_circle(3)
    assert len(set(c.points)) == 3 and not collinear(*c.points)
    c = gen_circle(50)
    assert all(p.x**2 + p.y**2 == 1 for p in c.points)
    assert not any(collinear(*t) for t in combinations(c.points, 3))
    assert c.m == 0


def test_spec_build():
    assert GeneratorSpec("elekes", {"N": 2}).build() == gen_elekes(2)
    assert GeneratorSpec("random", {"n": 5, "m": 3}, seed=1).build() == gen_random(5, 3, 1)
    with pytest.raises(ValueError):
        GeneratorSpec("spiral").build()
    with pytest.raises(ValueError):
        gen_elekes(0)
