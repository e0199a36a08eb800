import math
from fractions import Fraction

import numpy as np
import pytest

from froglab import estimators as est
from froglab.errors import ConfigError, InfeasibleError
from froglab.exact import truncated_instance
from froglab.lattice import Region, SignedPermutation
from froglab.passage import Config, truncated_passage


def test_mu_samples_respect_distance_and_symmetry():
    out = est.estimate_mu(0.8, (1, 0), [3, 6], 30, seed=4)
    for rec in out["records"]:
        assert rec.params["min_sample"] >= 1
        assert rec.estimate >= 1
    g = SignedPermutation((1, 0), (-1, 1))
    other = est.estimate_mu(0.8, g.apply((1, 0)), [3, 6], 30, seed=4, symmetry=g)
    assert [r.estimate for r in other["records"]] == [r.estimate for r in out["records"]]


def test_mu_rejects_bad_input():
    with pytest.raises(ConfigError):
        est.estimate_mu(0.0, (1, 0), [2], 3)
    with pytest.raises(ConfigError):
        est.estimate_mu(0.5, (0, 0), [2], 3)
    with pytest.raises(InfeasibleError):
        est.estimate_mu(0.5, (1, 0), [10**5], 3)


def test_coupled_differences():
    same = est.estimate_mu_difference(0.6, 0.6, (1, 0), 5, 20, seed=1)
    assert same.record.estimate == 0 and same.negative_samples == 0
    rep = est.estimate_mu_difference(0.5, 0.9, (1, 0), 8, 40, seed=1)
    assert rep.negative_samples == 0 and rep.min_sample >= 0
    with pytest.raises(ConfigError):
        est.estimate_mu_difference(0.9, 0.5, (1, 0), 8, 4)
    with pytest.raises(ConfigError):
        est.estimate_mu_difference(0.1, 0.5, (1, 0), 8, 4)


def naive_influence(f, r, y, N):
    cfg = Config.at(f, r)
    out = {}
    for z in Region.ball((0, 0), N).enumerate():
        if z in ((0, 0), y):
            continue
        diff = truncated_passage(f, cfg, z, 0, y, N, N, N) - truncated_passage(f, cfg, z, 1, y, N, N, N)
        if diff:
            out[z] = diff
    return out


@pytest.mark.parametrize("r", [0.4, 0.8])
def test_influence_sample_matches_naive_recomputation(r):
    y, N = (3, 1), 10
    for i in range(12):
        f = est.make_field(55, 2, N, N, i)
        U, diffs = est.influence_sample(f, r, y, N)
        assert U == truncated_passage(f, Config.at(f, r), (0, 0), 1, y, N, N, N)
        assert diffs == naive_influence(f, r, y, N)


def test_influence_and_difference_converge_to_exact_tiny_instance():
    y, N, r, h = (1, 1), 2, 0.5, 0.1
    inst = truncated_instance(2, y, N)
    exact_influence = float(sum(inst.influence(Fraction(r)).values()))
    prof = est.influence_profile(r, y, N, 20000, seed=8, n_factor=1.0)
    assert abs(prof.total.estimate - exact_influence) <= 4 * prof.total.stderr
    assert abs(prof.u_record.estimate - float(inst.expectation(Fraction(r)))) <= 4 * prof.u_record.stderr
    fd = est.finite_difference(r, h, y, N, 20000, seed=9)
    lo, hi = Fraction(r) - Fraction(h), Fraction(r) + Fraction(h)
    exact_fd = float(-(inst.expectation(hi) - inst.expectation(lo)) / (2 * Fraction(h)))
    assert abs(fd.estimate - exact_fd) <= 4 * fd.stderr


def test_influence_rejects_small_N_and_zero_h():
    with pytest.raises(InfeasibleError):
        est.influence_profile(0.7, (10, 0), 12, 5)
    with pytest.raises(ConfigError):
        est.finite_difference(0.7, 0.0, (2, 0), 6, 5)
    with pytest.raises(ConfigError):
        est.russo_check(0.98, 0.05, (2, 0), 6, 5)


def test_delay_census_bookkeeping_and_degenerate_geometry():
    c = est.delay_census(1.0, 2, (12, 0), 30, seed=2)
    assert math.isclose(c.census_sum, c.total.estimate)
    assert all(0 <= v <= 1 for v in c.per_site.values())
    short = est.delay_census(1.0, 6, (4, 0), 30, seed=2)
    assert short.census_sum <= 0.2


def test_sphere_decay_first_radius_is_certain():
    s = est.sphere_decay([1, 2, 3], 300, seed=1)
    assert s.records[1].estimate == 1.0
    assert s.records[3].estimate <= s.records[2].estimate


def test_q_estimate_small_cases():
    rec = est.estimate_q(3, 3000, seed=4)
    assert abs(rec.estimate - 15 / 32) <= 4 * rec.stderr


def test_tail_report_shape():
    (rep,) = est.tail_fit(0.7, [(4, 0)], [0, 4, 8, 12, 16, 20, 24], 300, seed=3)
    assert rep.survival[0] == 1.0
    assert all(a >= b for a, b in zip(rep.survival, rep.survival[1:]))
    assert all(d <= s for d, s in zip(rep.direct, rep.survival))
