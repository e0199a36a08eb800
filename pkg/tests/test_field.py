import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from froglab.field import (ExplicitField, FieldSpec, RandomField, mix64, mix64_array,
                           step_direction, step_directions)
from froglab.lattice import Region, SignedPermutation, l1_norm


def test_mix64_scalar_and_vector_agree():
    xs = np.array([0, 1, 2**63, 2**64 - 1, 12345], dtype=np.uint64)
    assert [int(v) for v in mix64_array(xs)] == [mix64(int(v)) for v in xs]


def test_step_direction_scalar_and_vector_agree():
    key = 0xDEADBEEF
    vec = step_directions(key, 50, 3)
    assert list(vec) == [step_direction(key, k, 3) for k in range(1, 51)]


def test_determinism_and_replicate_independence():
    a = RandomField(FieldSpec(42, 2, 20, 20, 3))
    b = RandomField(FieldSpec(42, 2, 20, 20, 3))
    c = RandomField(FieldSpec(42, 2, 20, 20, 4))
    assert a.walk_prefix((1, 2), 20) == b.walk_prefix((1, 2), 20)
    assert a.mark((5, -1)) == b.mark((5, -1))
    assert a.walk_prefix((1, 2), 20) != c.walk_prefix((1, 2), 20)


def test_walk_prefix_shape_and_limits():
    f = RandomField(FieldSpec(1, 2, 10, 10))
    assert f.walk_prefix((3, 4), 0) == [(3, 4)]
    path = f.walk_prefix((3, 4), 10)
    assert path[0] == (3, 4) and len(path) == 11
    assert all(l1_norm((a[0] - b[0], a[1] - b[1])) == 1 for a, b in zip(path, path[1:]))
    with pytest.raises(ValueError):
        f.walk_prefix((0, 0), 11)
    # longer internal walks extend the cached prefix consistently
    assert [tuple(p) for p in f.walk_positions((3, 4), 30)[:11]] == path


def test_full_occupancy_and_monotone_coupling():
    f = RandomField(FieldSpec(9, 2, 30, 30))
    pts = Region.ball((0, 0), 30).enumerate()
    assert all(f.config_at(1.0).occupied(p) for p in pts)
    p, q = f.config_at(0.3), f.config_at(0.6)
    assert all(q.occupied(x) for x in pts if p.occupied(x))
    assert p.occupied((0, 0))
    with pytest.raises(ValueError):
        f.config_at(1.2)


def test_density_law_of_large_numbers():
    f = RandomField(FieldSpec(2024, 2, 710, 10))
    for r in (0.3, 0.7):
        dens = f.density(r, 707)  # about 10^6 sites
        n = 2 * 707 * 707 + 2 * 707
        assert abs(dens - r) <= 3 * np.sqrt(r * (1 - r) / n)


def test_step_frequencies():
    key_field = RandomField(FieldSpec(5, 2, 10, 10**6))
    dirs = step_directions(key_field.keys((0, 0))[1], 10**6, 2)
    counts = np.bincount(dirs, minlength=4)
    sigma = np.sqrt(10**6 * 0.25 * 0.75)
    assert np.all(np.abs(counts - 250000) <= 3 * sigma)


def test_cross_site_correlation():
    n = 10**5
    m1 = np.empty(n)
    m2 = np.empty(n)
    s1 = np.empty(n)
    s2 = np.empty(n)
    pts = np.array([[0, 1], [1, 0]])
    for i in range(n):
        f = RandomField(FieldSpec(77, 2, 4, 1, i))
        m1[i], m2[i] = f.marks(pts)
    for i in range(n):
        f = RandomField(FieldSpec(78, 2, 4, 1, i))
        s1[i] = step_direction(f.keys((0, 1))[1], 1, 2)
        s2[i] = step_direction(f.keys((1, 0))[1], 1, 2)
    assert abs(np.corrcoef(m1, m2)[0, 1]) < 0.02
    assert abs(np.corrcoef(s1, s2)[0, 1]) < 0.02


@settings(max_examples=25, deadline=None)
@given(g=st.sampled_from(SignedPermutation.all(2)), x=st.tuples(st.integers(-9, 9), st.integers(-9, 9)))
def test_conjugation_maps_marks_and_walks(g, x):
    f = RandomField(FieldSpec(31, 2, 20, 12))
    fg = f.conjugate(g)
    assert fg.mark(g.apply(x)) == f.mark(x)
    assert fg.walk_prefix(g.apply(x), 12) == [g.apply(p) for p in f.walk_prefix(x, 12)]
    back = fg.conjugate(g.inverse())
    assert back.walk_prefix(x, 12) == f.walk_prefix(x, 12) and back.mark(x) == f.mark(x)


def test_spec_roundtrip_and_validation():
    spec = FieldSpec(3, 2, 10, 20, 7)
    assert FieldSpec.from_dict(spec.to_dict()) == spec
    assert spec.with_replicate(8).replicate == 8
    with pytest.raises(ValueError):
        FieldSpec(-1)
    with pytest.raises(ValueError):
        FieldSpec(1, 2, -1)


def test_explicit_field_overrides():
    base = RandomField(FieldSpec(1, 2, 6, 6))
    f = ExplicitField(base, walks={(0, 0): [(0, 0), (0, 1), (0, 2)]}, marks={(2, 2): 0.99})
    assert f.walk_prefix((0, 0), 2) == [(0, 0), (0, 1), (0, 2)]
    tail = f.walk_prefix((0, 0), 6)
    assert all(l1_norm((a[0] - b[0], a[1] - b[1])) == 1 for a, b in zip(tail, tail[1:]))
    assert f.mark((2, 2)) == 0.99 and f.mark((1, 1)) == base.mark((1, 1))
