import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from froglab.field import FieldSpec, RandomField
from froglab.lattice import SignedPermutation
from froglab.passage import Config
from froglab.shape import (as_set, compare_shapes, direction_grid, directed_deviation, hausdorff,
                           ray_reach, shape_estimate, visited_set)

from oracles import brute_hausdorff

points = st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=1, max_size=25)


def test_hausdorff_examples():
    assert hausdorff([(0, 0)], [(3, 0)]) == 3
    assert hausdorff([(1, 2), (3, 4)], [(3, 4), (1, 2)]) == 0
    with pytest.raises(ValueError):
        hausdorff([], [(0, 0)])


@settings(max_examples=60)
@given(a=points, b=points, c=points)
def test_hausdorff_is_a_metric(a, b, c):
    ab = hausdorff(a, b)
    assert ab == brute_hausdorff(a, b)
    assert ab == hausdorff(b, a)
    assert (ab == 0) == (set(a) == set(b))
    assert hausdorff(a, c) <= ab + hausdorff(b, c)


@given(a=points, b=points)
def test_nested_sets_use_directed_deviation(a, b):
    big = list(set(a) | set(b))
    assert hausdorff(a, big) == directed_deviation(a, big)


def test_visited_set_basics():
    f = RandomField(FieldSpec(4, 2, 30, 30))
    cfg = Config.at(f, 0.6)
    assert as_set(visited_set(f, cfg, 0)) == {(0, 0)}
    prev = set()
    for t in range(0, 25, 3):
        cur = as_set(visited_set(f, cfg, t))
        assert prev <= cur
        assert all(abs(x) + abs(y) <= t for x, y in cur)
        prev = cur
    with pytest.raises(ValueError):
        visited_set(f, cfg, 31)
    with pytest.raises(ValueError):
        visited_set(f, cfg, 20, H=30, W=10)


def test_visited_set_labels_are_passage_times():
    from froglab.passage import first_passage

    f = RandomField(FieldSpec(6, 2, 20, 20))
    cfg = Config.at(f, 0.8)
    sites, labels = visited_set(f, cfg, 12, with_labels=True)
    for s, t in list(zip(sites, labels))[:40]:
        assert first_passage(f, cfg, (0, 0), tuple(s)).value == t


@pytest.mark.parametrize("g", SignedPermutation.all(2))
def test_visited_set_symmetry(g):
    f = RandomField(FieldSpec(12, 2, 20, 20))
    fg = f.conjugate(g)
    a = as_set(visited_set(f, Config.at(f, 0.7), 15))
    b = as_set(visited_set(fg, Config.at(fg, 0.7), 15))
    assert {g.apply(x) for x in a} == b


def test_coupled_visited_sets_are_nested():
    for i in range(5):
        f = RandomField(FieldSpec(100, 2, 25, 25, i))
        lo = as_set(visited_set(f, Config.at(f, 0.4), 25))
        hi = as_set(visited_set(f, Config.at(f, 0.9), 25))
        assert lo <= hi


def test_ray_reach_and_directions():
    assert ray_reach({(1, 0), (3, 0), (2, 2)}, (1, 0), 5) == 3
    assert ray_reach({(1, 0), (3, 0), (2, 2)}, (1, 1), 5) == 4
    assert len(direction_grid(2)) == 8
    with pytest.raises(ValueError):
        direction_grid(2, 9)


def test_shape_estimate_bounds_and_comparison():
    est = shape_estimate(0.8, 30, 6, seed=3)
    for rec in est.radii:
        assert 0 < rec.estimate <= 1 + 2 / 30
    cmp_ = compare_shapes([0.5, 1.0], 30, 6, seed=3)
    assert cmp_.nested_all and cmp_.hausdorff[0].estimate > 0
