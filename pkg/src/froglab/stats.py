"""Estimate records, confidence intervals and order-independent aggregation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _sst

BIAS_THRESHOLD = 0.01


def z_value(level: float) -> float:
    return float(_sst.norm.ppf(0.5 + level / 2))


@dataclass
class Moments:
    """Count, sum and sum of squares; merging is commutative and associative.

    Sums are kept as Python ints when every sample is an integer, so merged
    results do not depend on merge order at all.
    """

    n: int = 0
    total: object = 0
    total_sq: object = 0
    censored: int = 0

    def add(self, x, weight: int = 1) -> None:
        self.n += weight
        self.total += x * weight
        self.total_sq += x * x * weight

    def add_censored(self, count: int = 1) -> None:
        self.censored += count

    def merge(self, other: "Moments") -> "Moments":
        return Moments(self.n + other.n, self.total + other.total,
                       self.total_sq + other.total_sq, self.censored + other.censored)

    __add__ = merge

    @classmethod
    def of(cls, values) -> "Moments":
        m = cls()
        for v in values:
            m.add(v)
        return m

    @property
    def mean(self) -> float:
        return float(self.total) / self.n if self.n else math.nan

    @property
    def variance(self) -> float:
        if self.n < 2:
            return math.nan
        # exact for integer sums
        num = self.total_sq * self.n - self.total * self.total
        return float(num) / (self.n * (self.n - 1))

    @property
    def stderr(self) -> float:
        v = self.variance
        return math.sqrt(max(v, 0.0) / self.n) if self.n >= 2 else math.nan


@dataclass
class EstimateRecord:
    estimate: float
    stderr: float
    n: int
    censored: int = 0
    level: float = 0.95
    ci: tuple = (math.nan, math.nan)
    method: str = "normal"
    field_spec: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @property
    def censored_fraction(self) -> float:
        total = self.n + self.censored
        return self.censored / total if total else 0.0

    @property
    def biased(self) -> bool:
        return self.censored_fraction > BIAS_THRESHOLD

    @property
    def halfwidth(self) -> float:
        return (self.ci[1] - self.ci[0]) / 2

    def excludes(self, value: float) -> bool:
        return not (self.ci[0] <= value <= self.ci[1])

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "n": self.n,
            "censored": self.censored,
            "level": self.level,
            "ci_low": self.ci[0],
            "ci_high": self.ci[1],
            "method": self.method,
            "biased": self.biased,
            "params": dict(self.params),
            "field_spec": dict(self.field_spec),
        }


def normal_record(m: Moments, level: float = 0.95, **kw) -> EstimateRecord:
    """Mean with a normal-approximation interval from the sample variance."""
    if m.n == 0:
        return EstimateRecord(math.nan, math.nan, 0, m.censored, level, (math.nan, math.nan), **kw)
    se = m.stderr if m.n >= 2 else math.inf
    if math.isnan(se):
        se = 0.0
    half = z_value(level) * se
    return EstimateRecord(m.mean, se, m.n, m.censored, level, (m.mean - half, m.mean + half), **kw)


def clopper_pearson(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    if n <= 0:
        raise ValueError("need at least one trial")
    if not 0 <= k <= n:
        raise ValueError("successes outside [0, n]")
    a = 1 - level
    lo = 0.0 if k == 0 else float(_sst.beta.ppf(a / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(_sst.beta.ppf(1 - a / 2, k + 1, n - k))
    return lo, hi


def proportion_record(k: int, n: int, level: float = 0.95, censored: int = 0, **kw) -> EstimateRecord:
    """Binomial proportion with an exact Clopper-Pearson interval."""
    if n == 0:
        return EstimateRecord(math.nan, math.nan, 0, censored, level, (math.nan, math.nan),
                              "clopper-pearson", **kw)
    p = k / n
    se = math.sqrt(p * (1 - p) / n)
    return EstimateRecord(p, se, n, censored, level, clopper_pearson(k, n, level),
                          "clopper-pearson", **kw)


def weighted_linear_fit(x, y, sigma):
    """Weighted least squares y = a + b x; returns (a, b, se_a, se_b, r2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = 1.0 / np.asarray(sigma, dtype=float) ** 2
    X = np.column_stack([np.ones_like(x), x])
    cov = np.linalg.inv(X.T @ (X * w[:, None]))
    coef = cov @ (X.T @ (w * y))
    resid = y - X @ coef
    ybar = np.sum(w * y) / np.sum(w)
    ss_tot = np.sum(w * (y - ybar) ** 2)
    r2 = 1.0 - np.sum(w * resid**2) / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), float(np.sqrt(cov[0, 0])), float(np.sqrt(cov[1, 1])), float(r2)
