import math
import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from froglab import passage
from froglab._search import Heuristic, Target, search_py
from froglab.field import ExplicitField, FieldSpec, RandomField
from froglab.lattice import Region, SignedPermutation, l1_dist, l1_norm
from froglab.passage import (UNREACHABLE, Config, first_passage, first_passage_to_set,
                             forced_passage, geodesic_structure, hitting_time, is_finite,
                             run_search, truncated_passage)

from oracles import ball, chain_enumeration

BACKENDS = ["python"] + (["compiled"] if passage.compiled_available() else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    if request.param == "python":
        monkeypatch.setenv("FROGLAB_BACKEND", "python")
    else:
        monkeypatch.delenv("FROGLAB_BACKEND", raising=False)
    return request.param


def as_number(t):
    return t if is_finite(t) else math.inf


def tiny_instances(count=100, W=2, H=4):
    for i in range(count):
        r = 0.5 if i % 2 else 1.0
        f = RandomField(FieldSpec(1000 + i, 2, W, H))
        yield f, Config.at(f, r)


def test_tiny_instances_match_chain_enumeration(backend):
    checked = 0
    for f, cfg in tiny_instances():
        for y in ball(2, 2):
            got = first_passage(f, cfg, (0, 0), y).value
            want = chain_enumeration(f, cfg.occupied, (0, 0), y, 2, 4)
            assert as_number(got) == want, (f.spec, y)
            checked += 1
    assert checked == 100 * 13


def test_chain_enumeration_from_other_sources(backend):
    for f, cfg in tiny_instances(40):
        for x in ball(2, 1):
            if not cfg.occupied(x):
                continue
            for y in ball(2, 2):
                got = first_passage(f, cfg, x, y).value
                assert as_number(got) == chain_enumeration(f, cfg.occupied, x, y, 2, 4)


def test_set_target_is_minimum_with_lexicographic_tie_break(backend):
    for f, cfg in tiny_instances(60):
        for R in (1, 2):
            region = Region.sphere((0, 0), R)
            res = first_passage_to_set(f, cfg, (0, 0), region)
            vals = {y: chain_enumeration(f, cfg.occupied, (0, 0), y, 2, 4) for y in region.enumerate()}
            best = min(vals.values())
            assert as_number(res.value) == best
            if best < math.inf:
                assert res.target == min(y for y, v in vals.items() if v == best)


def test_backends_agree_on_larger_instances():
    if not passage.compiled_available():
        pytest.skip("compiled kernel not built")
    for i in range(25):
        f = RandomField(FieldSpec(77 + i, 2, 40, 40))
        for r in (0.3, 0.8):
            cfg = Config.at(f, r)
            kwargs = dict(heuristic=Heuristic(1, (9, 4)), target=Target(1, (9, 4)))
            c = run_search(cfg, (0, 0), **kwargs)
            os.environ["FROGLAB_BACKEND"] = "python"
            try:
                p = run_search(cfg, (0, 0), **kwargs)
            finally:
                del os.environ["FROGLAB_BACKEND"]
            assert c.target == p.target and c.events == p.events
            assert np.array_equal(c.sites, p.sites) and np.array_equal(c.labels, p.labels)
            assert np.array_equal(c.pred, p.pred) and np.array_equal(c.hop, p.hop)


def test_backends_agree_under_symmetry_and_in_three_dimensions():
    if not passage.compiled_available():
        pytest.skip("compiled kernel not built")
    g = SignedPermutation((2, 0, 1), (-1, 1, -1))
    for i in range(8):
        f = RandomField(FieldSpec(5 + i, 3, 12, 12), g)
        cfg = Config.at(f, 0.6)
        c = run_search(cfg, (0, 0, 0), cutoff=10, stop_mode=0)
        os.environ["FROGLAB_BACKEND"] = "python"
        try:
            p = run_search(cfg, (0, 0, 0), cutoff=10, stop_mode=0)
        finally:
            del os.environ["FROGLAB_BACKEND"]
        assert np.array_equal(c.sites, p.sites) and np.array_equal(c.labels, p.labels)


def test_geodesic_hops_are_hitting_times(backend):
    f = RandomField(FieldSpec(3, 2, 80, 80))
    cfg = Config.at(f, 0.7)
    for y in [(6, 2), (-5, 4), (0, -9)]:
        res = first_passage(f, cfg, (0, 0), y)
        assert is_finite(res.value)
        assert sum(res.hop_times) == res.value
        assert res.geodesic[0] == (0, 0) and res.geodesic[-1] == y
        for u, v, k in zip(res.geodesic, res.geodesic[1:], res.hop_times):
            assert cfg.occupied(u)
            assert hitting_time(f, u, v, 80, cfg) == k


def test_lower_bound_by_distance_and_source_cases(backend):
    f = RandomField(FieldSpec(4, 2, 30, 30))
    cfg = Config.at(f, 0.5)
    for y in ball(2, 6):
        t = first_passage(f, cfg, (0, 0), y).value
        if is_finite(t):
            assert t >= l1_norm(y)
    assert first_passage(f, cfg, (0, 0), (0, 0)).value == 0


def test_unoccupied_source_and_window_errors():
    f = RandomField(FieldSpec(4, 2, 10, 10))
    cfg = Config.at(f, 0.5).override((1, 0), 0)
    with pytest.raises(ValueError):
        first_passage(f, cfg, (1, 0), (3, 0))
    with pytest.raises(ValueError):
        first_passage(f, cfg, (0, 0), (11, 0))
    with pytest.raises(ValueError):
        Config.at(f, 0.0)


def test_unreachable_sentinel():
    assert UNREACHABLE > 10**9 and not UNREACHABLE < 3
    assert UNREACHABLE == UNREACHABLE and UNREACHABLE != 5
    with pytest.raises(TypeError):
        UNREACHABLE + 1
    f = RandomField(FieldSpec(2, 2, 10, 3))
    res = first_passage(f, Config.at(f, 1.0), (0, 0), (4, 0))
    assert res.value is UNREACHABLE and res.censored


def test_forced_configurations_order(backend):
    f = RandomField(FieldSpec(8, 2, 40, 40))
    cfg = Config.at(f, 0.6)
    y = (7, 3)
    for z in [(1, 0), (0, 1), (3, 2), (5, 3), (-1, 0)]:
        t0 = as_number(forced_passage(f, cfg, z, 0, (0, 0), y).value)
        t1 = as_number(forced_passage(f, cfg, z, 1, (0, 0), y).value)
        assert t0 >= t1


def test_truncated_passage():
    f = RandomField(FieldSpec(8, 2, 40, 40))
    cfg = Config.at(f, 0.8)
    y = (5, 0)
    t = first_passage(f, cfg, (0, 0), y).value
    for z in [(2, 2), (1, 0), (3, 0), (9, 9)]:
        for s in (0, 1):
            full = as_number(forced_passage(f, cfg, z, s, (0, 0), y).value)
            for N in (t - 1, t, t + 3, 40):
                want = full if full <= N else 0
                assert truncated_passage(f, cfg, z, s, y, N) == want
    with pytest.raises(ValueError):
        truncated_passage(f, cfg, (1, 1), 1, y, -1)


def test_explicit_walks_force_a_path():
    base = RandomField(FieldSpec(1, 2, 6, 6))
    walks = {(0, 0): [(0, 0), (1, 0)], (1, 0): [(1, 0), (1, 1), (2, 1)]}
    f = ExplicitField(base, walks=walks, marks={(1, 0): 0.0})
    cfg = Config.at(f, 0.01)
    res = first_passage(f, cfg, (0, 0), (2, 1))
    assert res.value == 3 and res.geodesic == [(0, 0), (1, 0), (2, 1)]
    with pytest.raises(ValueError):
        ExplicitField(base, walks={(0, 0): [(0, 0), (2, 0)]})


def test_geodesic_structure_far_points():
    f = RandomField(FieldSpec(11, 2, 200, 200))
    res = first_passage(f, Config.at(f, 1.0), (0, 0), (20, 0))
    info = geodesic_structure(res, 3)
    assert len(info) == len(res.geodesic) - 2
    for gs in info:
        if gs.far_found:
            assert l1_dist(gs.far, gs.site) > 3
        else:
            assert gs.far == (gs.site[0] + 9, gs.site[1])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), r=st.sampled_from([0.4, 0.7, 1.0]),
       y=st.tuples(st.integers(-6, 6), st.integers(-6, 6)),
       z=st.tuples(st.integers(-6, 6), st.integers(-6, 6)))
def test_triangle_inequality(seed, r, y, z):
    f = RandomField(FieldSpec(seed, 2, 40, 40))
    cfg = Config.at(f, r)
    if not cfg.occupied(y):
        cfg = cfg.override(y, 1)
    a = first_passage(f, cfg, (0, 0), y).value
    b = first_passage(f, cfg, y, z).value
    c = first_passage(f, cfg, (0, 0), z).value
    if is_finite(a) and is_finite(b) and a + b <= 40:
        assert is_finite(c) and c <= a + b


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), p=st.floats(0.1, 1.0), q=st.floats(0.1, 1.0),
       y=st.tuples(st.integers(-8, 8), st.integers(-8, 8)))
def test_monotone_in_r(seed, p, q, y):
    p, q = min(p, q), max(p, q)
    f = RandomField(FieldSpec(seed, 2, 40, 40))
    tp = as_number(first_passage(f, Config.at(f, p), (0, 0), y).value)
    tq = as_number(first_passage(f, Config.at(f, q), (0, 0), y).value)
    assert tq <= tp


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), g=st.sampled_from(SignedPermutation.all(2)),
       y=st.tuples(st.integers(-7, 7), st.integers(-7, 7)), r=st.sampled_from([0.5, 1.0]))
def test_symmetry_metamorphism(seed, g, y, r):
    f = RandomField(FieldSpec(seed, 2, 30, 30))
    fg = f.conjugate(g)
    a = first_passage(f, Config.at(f, r), (0, 0), y)
    b = first_passage(fg, Config.at(fg, r), (0, 0), g.apply(y))
    assert as_number(a.value) == as_number(b.value)


def test_search_python_matches_dispatch_semantics():
    f = RandomField(FieldSpec(13, 2, 10, 10))
    out = search_py(f, 1.0, {(0, 0): 1}, (0, 0), 0, 6, Heuristic(), Target(), 0, 10, 10)
    assert out.labels[0] == 0 and (np.diff(out.labels) >= 0).all()
    assert (out.labels <= 6).all()
