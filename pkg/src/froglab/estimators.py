"""Monte Carlo estimators built on the passage engine.

Every estimator takes a master seed; replicate i uses substream i, so results
are reproducible and independent of the number of worker processes. The
origin is always forced occupied (conditioning on ``omega(0) = 1``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import curve_fit

from . import _search
from ._search import Heuristic, Target
from .errors import AllCensoredError, ConfigError, InfeasibleError
from .field import FieldSpec, RandomField
from .lattice import Region, SignedPermutation, Site, l1_dist, l1_norm, origin, scale
from .parallel import map_replicates
from .passage import Config, first_passage, hitting_time, is_finite, run_search
from .stats import (EstimateRecord, Moments, normal_record, proportion_record, weighted_linear_fit,
                    z_value)

DEFAULT_C0 = 8.0
DEFAULT_R0 = 0.3


def make_field(seed: int, d: int, window: int, horizon: int, replicate: int,
               symmetry: SignedPermutation | None = None) -> RandomField:
    return RandomField(FieldSpec(seed, d, window, horizon, replicate), symmetry)


def _check_r(r: float, name: str = "r") -> None:
    if not 0.0 < r <= 1.0:
        raise ConfigError(f"{name}={r} outside (0, 1]")


def _scaled(rec: EstimateRecord, factor: float) -> EstimateRecord:
    lo, hi = rec.ci[0] * factor, rec.ci[1] * factor
    return EstimateRecord(rec.estimate * factor, rec.stderr * abs(factor), rec.n, rec.censored,
                          rec.level, (min(lo, hi), max(lo, hi)), rec.method, rec.field_spec,
                          rec.params)


def _spec_echo(seed, d, window, horizon) -> dict:
    return {"master_seed": seed, "d": d, "window": window, "horizon": horizon}


# ------------------------------------------------------------------ time constant

def _mu_replicate(i, seed, d, r, x, ns, c0, sym):
    out = []
    for n in ns:
        y = scale(x, n)
        H = max(8, int(math.ceil(c0 * l1_norm(y))))
        f = make_field(seed, d, H, H, i, sym)
        res = first_passage(f, Config.at(f, r), origin(d), y)
        out.append(None if res.censored else res.value)
    return out


def estimate_mu(r: float, x: Sequence[int], n_ladder: Sequence[int], replicates: int, seed: int = 0,
                c0_factor: float = DEFAULT_C0, symmetry: SignedPermutation | None = None,
                threads: int | None = None, level: float = 0.95) -> dict:
    """T(0, n x)/n for each n of the ladder; the same replicate fields are reused across n.

    Returns ``{"records": [...], "decreasing": bool, "decreasing_within_ci": bool}``.
    """
    _check_r(r)
    x = tuple(int(c) for c in x)
    d = len(x)
    if l1_norm(x) == 0:
        raise ConfigError("x must be nonzero")
    ns = [int(n) for n in n_ladder]
    if not ns or min(ns) < 1:
        raise ConfigError("n_ladder needs positive integers")
    H_max = int(math.ceil(c0_factor * l1_norm(x) * max(ns)))
    if (2 * H_max + 1) ** d > 2 * 10**8:
        raise InfeasibleError(f"window {H_max} too large in d={d}")
    rows = map_replicates(_mu_replicate, replicates, (seed, d, r, x, ns, c0_factor, symmetry), threads)
    records = []
    for j, n in enumerate(ns):
        m = Moments()
        for row in rows:
            v = row[j]
            if v is None:
                m.add_censored()
            else:
                m.add(v)
        if m.n == 0:
            raise AllCensoredError(f"every replicate censored at n={n}")
        H = max(8, int(math.ceil(c0_factor * l1_norm(x) * n)))
        rec = _scaled(normal_record(m, level), 1.0 / n)
        rec.field_spec = _spec_echo(seed, d, H, H)
        rec.params = {"r": r, "x": list(x), "n": n, "min_sample": min(row[j] for row in rows
                                                                       if row[j] is not None) / n}
        records.append(rec)
    est = [rc.estimate for rc in records]
    dec = all(a >= b for a, b in zip(est, est[1:]))
    dec_ci = all(b.ci[0] <= a.ci[1] for a, b in zip(records, records[1:]))
    return {"records": records, "decreasing": dec, "decreasing_within_ci": dec_ci}


def _ladder_replicate(i, seed, d, rs, y, H):
    f = make_field(seed, d, H, H, i)
    out = []
    for r in rs:
        res = first_passage(f, Config.at(f, r), origin(d), y)
        out.append(None if res.censored else res.value)
    return out


@dataclass
class DifferenceReport:
    p: float
    q: float
    record: EstimateRecord  # (T_p - T_q)/n
    ratio: EstimateRecord  # record / ((q - p) ||x||)
    negative_samples: int
    min_sample: float

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "difference": self.record.to_dict(),
                "ratio": self.ratio.to_dict(), "negative_samples": self.negative_samples,
                "min_sample": self.min_sample}


def _difference_reports(rows, rs, pairs, x, n, level, spec_echo):
    out = []
    for p, q in pairs:
        a, b = rs.index(p), rs.index(q)
        m = Moments()
        neg = 0
        lo = math.inf
        for row in rows:
            if row[a] is None or row[b] is None:
                m.add_censored()
                continue
            diff = row[a] - row[b]
            neg += diff < 0
            lo = min(lo, diff / n)
            m.add(diff)
        if m.n == 0:
            raise AllCensoredError(f"every coupled replicate censored for ({p}, {q})")
        rec = _scaled(normal_record(m, level), 1.0 / n)
        rec.field_spec = spec_echo
        rec.params = {"p": p, "q": q, "x": list(x), "n": n}
        # the ratio is undefined for p == q
        ratio = _scaled(rec, 1.0 / ((q - p) * l1_norm(x)) if q > p else math.nan)
        ratio.params = dict(rec.params, quantity="ratio")
        out.append(DifferenceReport(p, q, rec, ratio, int(neg), lo))
    return out


def estimate_mu_difference(p: float, q: float, x: Sequence[int], n: int, replicates: int,
                           seed: int = 0, r0: float = DEFAULT_R0, c0_factor: float = DEFAULT_C0,
                           threads: int | None = None, level: float = 0.95) -> DifferenceReport:
    """Coupled (T_p(0,nx) - T_q(0,nx))/n on shared fields."""
    if not 0.0 < r0 < 1.0:
        raise ConfigError("r0 must lie in (0, 1)")
    if p > q:
        raise ConfigError("need p <= q")
    if p < r0 or q > 1.0:
        raise ConfigError(f"need r0={r0} <= p <= q <= 1")
    return lipschitz_ladder([p, q] if p != q else [p], x, n, replicates, seed, c0_factor,
                            threads, level, pairs=[(p, q)])[0]


def lipschitz_ladder(rs: Sequence[float], x: Sequence[int], n: int, replicates: int,
                     seed: int = 0, c0_factor: float = DEFAULT_C0, threads: int | None = None,
                     level: float = 0.95, pairs=None) -> list[DifferenceReport]:
    """Coupled differences for adjacent pairs of ``rs`` (or the given pairs), one pass per field."""
    rs = sorted(set(float(r) for r in rs))
    for r in rs:
        _check_r(r)
    x = tuple(int(c) for c in x)
    d = len(x)
    y = scale(x, n)
    H = max(8, int(math.ceil(c0_factor * l1_norm(y))))
    if pairs is None:
        pairs = list(zip(rs, rs[1:]))
    rows = map_replicates(_ladder_replicate, replicates, (seed, d, rs, y, H), threads)
    return _difference_reports(rows, rs, pairs, x, n, level, _spec_echo(seed, d, H, H))


def band_ratio(reports: Sequence[DifferenceReport]) -> float:
    vals = [rep.ratio.estimate for rep in reports]
    return max(vals) / min(vals) if min(vals) > 0 else math.inf


# ------------------------------------------------------------ influences / Russo

def _u_value(cfg: Config, y: Site, N: int) -> tuple[int, object]:
    """(U, search output) for the truncated passage time to y."""
    out = run_search(cfg, origin(len(y)), heuristic=Heuristic(_search.HEUR_POINT, y),
                     target=Target(_search.TGT_POINT, y), cutoff=N, window=N, horizon=N)
    return (int(out.labels[out.target]) if out.target >= 0 else 0), out


def influence_sample(f, r: float, y: Site, N: int) -> tuple[int, dict]:
    """One replicate: U_0^1(y,N) and the nonzero U_z^0 - U_z^1 keyed by z.

    Only two kinds of site can have a nonzero difference. An empty z whose
    label satisfies T(0,z) + ||y-z|| <= min(T-1, N) may shorten the passage
    once occupied; an occupied relay of the realized geodesic may lengthen it
    once removed. Every other z leaves U unchanged.
    """
    d = len(y)
    o = origin(d)
    cfg = Config.at(f, r)
    U, out = _u_value(cfg, y, N)
    T = U if out.target >= 0 else None
    bound = N if T is None else min(T - 1, N)
    diffs: dict = {}
    if bound >= 1:
        sweep = run_search(cfg, o, cutoff=bound - 1, stop_mode=_search.STOP_NEVER, window=N,
                           horizon=N)
        for idx in range(1, len(sweep.labels)):
            z = tuple(int(c) for c in sweep.sites[idx])
            if z == y:
                continue
            g0 = int(sweep.labels[idx])
            if g0 + l1_dist(z, y) > bound or cfg.occupied(z):
                continue
            s = run_search(cfg.override(z, 1), z, g0=g0, cutoff=bound,
                           heuristic=Heuristic(_search.HEUR_POINT, y),
                           target=Target(_search.TGT_POINT, y), window=N, horizon=N)
            if s.target >= 0:
                diffs[z] = U - int(s.labels[s.target])
    if T is not None:
        idx = int(out.pred[out.target])
        while idx > 0:
            z = tuple(int(c) for c in out.sites[idx])
            U0, _ = _u_value(cfg.override(z, 0), y, N)
            if U0 != U:
                diffs[z] = U0 - U
            idx = int(out.pred[idx])
    return U, diffs


def _influence_replicate(i, seed, r, y, N):
    f = make_field(seed, len(y), N, N, i)
    return influence_sample(f, r, y, N)


@dataclass
class InfluenceProfile:
    r: float
    y: Site
    N: int
    total: EstimateRecord
    per_site: dict  # z -> EstimateRecord over all replicates (zeros included)
    negative_samples: int
    u_record: EstimateRecord

    def nonzero_sites(self) -> list:
        return sorted(z for z, rec in self.per_site.items() if rec.estimate != 0)


def influence_profile(r: float, y: Sequence[int], N: int, replicates: int, seed: int = 0,
                      n_factor: float = 3.0, threads: int | None = None, level: float = 0.95,
                      replicate_offset: int = 0) -> InfluenceProfile:
    """Per-site estimates of E_r[U_z^0(y,N) - U_z^1(y,N)] over B(0,N) minus {0, y}, and their sum."""
    _check_r(r)
    y = tuple(int(c) for c in y)
    if l1_norm(y) == 0:
        raise ConfigError("y must be nonzero")
    if N < n_factor * l1_norm(y):
        raise InfeasibleError(f"N={N} below {n_factor} * ||y||")
    rows = map_replicates(_shifted, replicates,
                          (_influence_replicate, replicate_offset, seed, r, y, N), threads)
    total = Moments()
    u = Moments()
    sums: dict = {}
    sq: dict = {}
    neg = 0
    for U, diffs in rows:
        u.add(U)
        s = 0
        for z, v in diffs.items():
            sums[z] = sums.get(z, 0) + v
            sq[z] = sq.get(z, 0) + v * v
            s += v
            neg += v < 0
        total.add(s)
    n = len(rows)
    spec = _spec_echo(seed, len(y), N, N)
    per_site = {}
    for z in Region.ball(origin(len(y)), N).enumerate():
        if l1_norm(z) == 0 or z == y:
            continue
        per_site[z] = normal_record(Moments(n, sums.get(z, 0), sq.get(z, 0)), level,
                                    params={"z": list(z)})
    rec = normal_record(total, level, field_spec=spec, params={"r": r, "y": list(y), "N": N})
    urec = normal_record(u, level, field_spec=spec, params={"r": r, "y": list(y), "N": N})
    return InfluenceProfile(r, y, N, rec, per_site, int(neg), urec)


def _shifted(i, fn, offset, *args):
    return fn(i + offset, *args)


def _fd_replicate(i, seed, r_lo, r_hi, y, N):
    f = make_field(seed, len(y), N, N, i)
    lo, _ = _u_value(Config.at(f, r_lo), y, N)
    hi, _ = _u_value(Config.at(f, r_hi), y, N)
    return lo, hi


@dataclass
class RussoReport:
    r: float
    h: float
    derivative: EstimateRecord  # -(E_{r+h} U - E_{r-h} U) / 2h
    influence: EstimateRecord
    gap: float
    gap_se: float
    agree: bool
    level: float

    def to_dict(self) -> dict:
        return {"r": self.r, "h": self.h, "finite_difference": self.derivative.to_dict(),
                "influence_sum": self.influence.to_dict(), "gap": self.gap, "gap_se": self.gap_se,
                "agree": self.agree, "level": self.level}


def finite_difference(r: float, h: float, y: Sequence[int], N: int, replicates: int, seed: int = 0,
                      threads: int | None = None, level: float = 0.95) -> EstimateRecord:
    """-(E_{r+h}[U] - E_{r-h}[U])/(2h) with common fields on both sides."""
    if h <= 0:
        raise ConfigError("h must be positive")
    _check_r(r - h, "r-h")
    _check_r(r + h, "r+h")
    y = tuple(int(c) for c in y)
    rows = map_replicates(_fd_replicate, replicates, (seed, r - h, r + h, y, N), threads)
    m = Moments.of(lo - hi for lo, hi in rows)
    rec = _scaled(normal_record(m, level), 1.0 / (2 * h))
    rec.field_spec = _spec_echo(seed, len(y), N, N)
    rec.params = {"r": r, "h": h, "y": list(y), "N": N}
    return rec


def russo_check(r: float, h: float, y: Sequence[int], N: int, replicates: int, seed: int = 0,
                n_factor: float = 3.0, threads: int | None = None,
                level: float = 0.95) -> RussoReport:
    """Finite difference of E_r[U_0^1(y,N)] against the influence sum.

    The two sides use disjoint replicate substreams, so their errors are
    independent and the combined interval is the usual sqrt-sum of variances.
    """
    fd = finite_difference(r, h, y, N, replicates, seed, threads, level)
    inf = influence_profile(r, y, N, replicates, seed, n_factor, threads, level,
                            replicate_offset=replicates).total
    gap = fd.estimate - inf.estimate
    se = math.hypot(fd.stderr, inf.stderr)
    return RussoReport(r, h, fd, inf, gap, se, abs(gap) <= z_value(level) * se, level)


# ------------------------------------------------------------------- delay census

def _sphere_hit(cfg: Config, z: Site, L: int, W: int, H: int) -> bool:
    """T(z, D_L(z)) == L (it is never smaller)."""
    out = run_search(cfg, z, cutoff=L, heuristic=Heuristic(_search.HEUR_SPHERE, z, L),
                     target=Target(_search.TGT_SPHERE, z, L), stop_mode=_search.STOP_NOW,
                     window=W, horizon=H)
    return out.target >= 0


def _delay_replicate(i, seed, r, L, y, H, W, c0):
    d = len(y)
    f = make_field(seed, d, W, H, i)
    cfg = Config.at(f, r)
    res = first_passage(f, cfg, origin(d), y, H=H, W=W)
    if res.censored:
        return None
    g = res.geodesic
    hits = [_sphere_hit(cfg, w, L, W, H) for w in g]
    events = []
    for j in range(1, len(g) - 1):
        z = g[j]
        far = next((w for w in g[j + 1:] if l1_dist(w, z) > L), None)
        far_dist = l1_dist(far, z) if far is not None else 3 * L
        if not hits[j] and far_dist <= 2 * L:
            events.append(z)
    ny = l1_norm(y)
    within = res.value <= c0 * ny
    wander = sum(t for t in res.hop_times if t > L)
    e1 = within and sum(hits) < ny / (6 * L)
    e2 = within and wander < ny / L ** (d + 3)
    return res.value, tuple(events), sum(hits), wander, e1, e2


@dataclass
class DelayCensus:
    L: int
    y: Site
    replicates: int
    censored: int
    per_site: dict  # z -> frequency of E(L,y,z)
    counts: dict  # z -> raw count
    total: EstimateRecord  # mean of sum_z 1{E(L,y,z)}
    e1: EstimateRecord
    e2: EstimateRecord
    sphere_hits_mean: float
    wander_mean: float
    thresholds: dict

    @property
    def census_sum(self) -> float:
        return sum(self.per_site.values())

    def to_dict(self) -> dict:
        return {"L": self.L, "y": list(self.y), "replicates": self.replicates,
                "censored": self.censored, "sum": self.census_sum, "total": self.total.to_dict(),
                "e1": self.e1.to_dict(), "e2": self.e2.to_dict(),
                "sphere_hits_mean": self.sphere_hits_mean, "wander_mean": self.wander_mean,
                "thresholds": self.thresholds}


def delay_census(r: float, L: int, y: Sequence[int], replicates: int, seed: int = 0,
                 c0_factor: float = DEFAULT_C0, threads: int | None = None,
                 level: float = 0.95) -> DelayCensus:
    _check_r(r)
    if L < 1:
        raise ConfigError("L must be positive")
    y = tuple(int(c) for c in y)
    d = len(y)
    if l1_norm(y) == 0:
        raise ConfigError("y must be nonzero")
    H = max(8, int(math.ceil(c0_factor * l1_norm(y))))
    W = H + L
    rows = map_replicates(_delay_replicate, replicates, (seed, r, L, y, H, W, c0_factor), threads)
    kept = [row for row in rows if row is not None]
    cens = len(rows) - len(kept)
    if not kept:
        raise AllCensoredError("every replicate censored")
    n = len(kept)
    counts: dict = {}
    tot = Moments()
    for row in kept:
        for z in row[1]:
            counts[z] = counts.get(z, 0) + 1
        tot.add(len(row[1]))
    tot.censored = cens
    per_site = {z: c / n for z, c in sorted(counts.items())}
    params = {"r": r, "L": L, "y": list(y), "c0_factor": c0_factor}
    spec = _spec_echo(seed, d, W, H)
    e1 = proportion_record(sum(bool(row[4]) for row in kept), n, level, cens, params=params)
    e2 = proportion_record(sum(bool(row[5]) for row in kept), n, level, cens, params=params)
    return DelayCensus(
        L, y, len(rows), cens, per_site, counts,
        normal_record(tot, level, field_spec=spec, params=params), e1, e2,
        float(np.mean([row[2] for row in kept])), float(np.mean([row[3] for row in kept])),
        {"count_bound": l1_norm(y) / (6 * L), "wander_bound": l1_norm(y) / L ** (d + 3),
         "passage_bound": c0_factor * l1_norm(y), "target": l1_norm(y) / (4 * L)},
    )


# --------------------------------------------------------------- sphere decay

def sphere_reach(f, L_max: int) -> int:
    """Largest L <= L_max with T(0, D_L(0)) = L at r = 1.

    The events {T(0, D_L(0)) = L} are nested in L, because a chain reaching
    D_{L+1} at time L+1 crosses D_L at time L. The sphere heuristic with
    cutoff L_max keeps only cursors moving straight outward.
    """
    d = f.d
    o = origin(d)
    cfg = Config.at(f, 1.0)
    out = run_search(cfg, o, cutoff=L_max, heuristic=Heuristic(_search.HEUR_SPHERE, o, L_max),
                     stop_mode=_search.STOP_NEVER, window=L_max, horizon=L_max)
    norms = np.abs(out.sites).sum(axis=1)
    ok = norms == out.labels
    return int(norms[ok].max())


def _sphere_replicate(i, seed, d, L_max):
    return sphere_reach(make_field(seed, d, L_max, L_max, i), L_max)


@dataclass
class SphereDecay:
    d: int
    records: dict  # L -> EstimateRecord
    zero_cells: list
    slope: float
    slope_se: float
    intercept: float
    r2: float
    slope_negative: bool  # slope upper bound (two-sided, fit_level) below 0
    strictly_decreasing: bool
    fit_level: float

    def to_dict(self) -> dict:
        return {"d": self.d, "records": {str(L): rec.to_dict() for L, rec in self.records.items()},
                "zero_cells": self.zero_cells, "slope": self.slope, "slope_se": self.slope_se,
                "intercept": self.intercept, "r2": self.r2, "slope_negative": self.slope_negative,
                "strictly_decreasing": self.strictly_decreasing, "fit_level": self.fit_level}


def sphere_decay(L_list: Sequence[int], replicates: int, d: int = 2, seed: int = 0,
                 threads: int | None = None, level: float = 0.95,
                 fit_level: float = 0.99) -> SphereDecay:
    """P(T(0, D_L(0)) = L) at r = 1 for each L, with a weighted log-linear fit."""
    Ls = sorted(set(int(L) for L in L_list))
    if not Ls or Ls[0] < 1:
        raise ConfigError("L values must be positive")
    if replicates < 1:
        raise ConfigError("need at least one replicate")
    reach = np.asarray(map_replicates(_sphere_replicate, replicates, (seed, d, Ls[-1]), threads))
    records = {}
    zero = []
    xs, ys, sig = [], [], []
    spec = _spec_echo(seed, d, Ls[-1], Ls[-1])
    for L in Ls:
        k = int((reach >= L).sum())
        rec = proportion_record(k, replicates, level, field_spec=spec, params={"L": L, "d": d})
        records[L] = rec
        if k == 0:
            zero.append(L)
        elif k < replicates:
            xs.append(L)
            ys.append(math.log(rec.estimate))
            sig.append(math.sqrt((1 - rec.estimate) / k))
    if len(xs) >= 2:
        a, b, _, sb, r2 = weighted_linear_fit(xs, ys, sig)
        neg = b + z_value(fit_level) * sb < 0
    else:
        a = b = sb = r2 = math.nan
        neg = False
    est = [records[L].estimate for L in Ls]
    dec = all(p > q for p, q in zip(est, est[1:]))
    return SphereDecay(d, records, zero, b, sb, a, r2, bool(neg), dec, fit_level)


# ------------------------------------------------------------------- q_n by MC

def q_count(f, m: int) -> int:
    """#{y in R_{m-1} : T(0,y) + tau(y, Delta_m) = m} at r = 1."""
    d = f.d
    o = origin(d)
    out = run_search(Config.at(f, 1.0), o, cutoff=m, heuristic=Heuristic(_search.HEUR_SPHERE, o, m),
                     stop_mode=_search.STOP_NEVER, window=m, horizon=m)
    count = 0
    for site, lab in zip(out.sites, out.labels):
        n = int(np.abs(site).sum())
        if n >= m or int(lab) != n or site.min() < 0:
            continue
        k = m - n
        if k == 0:
            continue
        steps = np.diff(f.walk_positions(tuple(int(c) for c in site), k), axis=0)
        if (steps.sum(axis=1) == 1).all():
            count += 1
    return count


def _q_replicate(i, seed, d, m):
    return q_count(make_field(seed, d, m, m, i), m)


def estimate_q(m: int, replicates: int, d: int = 2, seed: int = 0, threads: int | None = None,
               level: float = 0.95) -> EstimateRecord:
    if m < 1:
        raise ConfigError("m must be positive")
    rows = map_replicates(_q_replicate, replicates, (seed, d, m), threads)
    return normal_record(Moments.of(rows), level, field_spec=_spec_echo(seed, d, m, m),
                         params={"m": m, "d": d})


# -------------------------------------------------------------------- tails

def _tail_replicate(i, seed, r, y, H):
    d = len(y)
    f = make_field(seed, d, H, H, i)
    cfg = Config.at(f, r)
    res = first_passage(f, cfg, origin(d), y, H=H, W=H, margin=0)
    T = res.value if is_finite(res.value) else None
    tau = hitting_time(f, origin(d), y, H, cfg)
    tau = tau if is_finite(tau) else None
    return T, tau


def _stretched(t, logc, cp, alpha):
    return logc - cp * np.power(t, alpha)


@dataclass
class TailReport:
    r: float
    y: Site
    t_grid: list
    survival: list  # P(T >= t)
    direct: list  # P(T = tau(0,y) >= t)
    n: int
    fit: dict | None
    note: str = ""

    def to_dict(self) -> dict:
        return {"r": self.r, "y": list(self.y), "t": self.t_grid, "survival": self.survival,
                "direct": self.direct, "n": self.n, "fit": self.fit, "note": self.note}


def tail_fit(r: float, y_list: Sequence[Sequence[int]], t_grid: Sequence[int], replicates: int,
             seed: int = 0, c_factor: float = 1.0, threads: int | None = None) -> list[TailReport]:
    """Empirical tails of T(0,y) with a least-squares fit of c exp(-c' t^alpha); descriptive."""
    _check_r(r)
    ts = sorted(set(int(t) for t in t_grid))
    if not ts or ts[0] < 0:
        raise ConfigError("t grid must be nonnegative")
    out = []
    for y in y_list:
        y = tuple(int(c) for c in y)
        if ts[-1] < c_factor * l1_norm(y):
            raise ConfigError("t grid must extend above c_factor * ||y||")
        H = ts[-1]
        rows = map_replicates(_tail_replicate, replicates, (seed, r, y, H), threads)
        T = np.array([H + 1 if a is None else a for a, _ in rows])
        direct = np.array([a is not None and b is not None and a == b for a, b in rows])
        surv = [float((T >= t).mean()) for t in ts]
        dsurv = [float((direct & (T >= t)).mean()) for t in ts]
        fit = None
        note = ""
        sel = [(t, s) for t, s in zip(ts, surv) if 0 < s < 1 and t > 0]
        if len(sel) < 3:
            note = "insufficient tail mass for a fit"
        else:
            tt = np.array([t for t, _ in sel], dtype=float)
            ll = np.log([s for _, s in sel])
            try:
                popt, _ = curve_fit(_stretched, tt, ll, p0=(0.0, 1.0 / tt.mean(), 1.0),
                                    bounds=([-50, 0, 0.05], [50, 50, 5]), maxfev=20000)
                resid = ll - _stretched(tt, *popt)
                fit = {"c": float(np.exp(popt[0])), "c_prime": float(popt[1]),
                       "alpha": float(popt[2]), "rmse_log": float(np.sqrt(np.mean(resid**2)))}
            except RuntimeError as exc:
                note = f"fit failed: {exc}"
        out.append(TailReport(r, y, ts, surv, dsurv, replicates, fit, note))
    return out
