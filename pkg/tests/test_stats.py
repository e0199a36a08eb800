import math

import numpy as np
from hypothesis import given, strategies as st

from froglab.stats import (Moments, clopper_pearson, normal_record, proportion_record,
                           weighted_linear_fit)


@given(st.lists(st.integers(-100, 100), min_size=2, max_size=60), st.integers(0, 59))
def test_moment_merge_is_order_free(values, cut):
    cut = min(cut, len(values))
    a, b = Moments.of(values[:cut]), Moments.of(values[cut:])
    m = a + b
    assert (m.n, m.total, m.total_sq) == ((b + a).n, (b + a).total, (b + a).total_sq)
    assert math.isclose(m.mean, np.mean(values))
    assert math.isclose(m.variance, np.var(values, ddof=1), abs_tol=1e-9)


def test_normal_record_and_bias_flag():
    m = Moments.of([1, 2, 3, 4])
    m.add_censored(1)
    rec = normal_record(m)
    assert rec.ci[0] < 2.5 < rec.ci[1]
    assert rec.biased  # 1 of 5 censored


def test_clopper_pearson_edges():
    assert clopper_pearson(0, 10)[0] == 0.0
    assert clopper_pearson(10, 10)[1] == 1.0
    lo, hi = clopper_pearson(5, 10)
    assert lo < 0.5 < hi
    rec = proportion_record(3, 100)
    assert rec.method == "clopper-pearson" and rec.ci[0] < 0.03 < rec.ci[1]


def test_weighted_fit_recovers_line():
    x = np.arange(10)
    y = 2.0 - 0.5 * x
    a, b, sa, sb, r2 = weighted_linear_fit(x, y, np.ones(10))
    assert math.isclose(a, 2.0) and math.isclose(b, -0.5) and math.isclose(r2, 1.0)
