"""Visited sets B(t) = {x : T(0,x) <= t} and their rescaled shapes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import _search
from .errors import ConfigError, InfeasibleError
from .estimators import make_field
from .parallel import map_replicates
from .passage import Config, run_search
from .lattice import origin
from .stats import Moments, normal_record


def visited_set(fld, config: Config, t: int, H: int | None = None, W: int | None = None,
                with_labels: bool = False):
    """Sites with T(0, x) <= t as an (n, d) int array, in finalization order."""
    H = fld.horizon if H is None else H
    W = fld.window if W is None else W
    if t < 0:
        raise ConfigError("t must be nonnegative")
    if t > H:
        raise InfeasibleError(f"t={t} exceeds the horizon {H}")
    if W < t:
        raise InfeasibleError(f"window {W} smaller than t={t}")
    out = run_search(config, origin(fld.d), cutoff=t, stop_mode=_search.STOP_NEVER, window=W,
                     horizon=H)
    return (out.sites, out.labels) if with_labels else out.sites


def as_set(points: np.ndarray) -> set:
    return {tuple(int(c) for c in p) for p in points}


def _directed(a: np.ndarray, b: np.ndarray) -> float:
    """max over a of the l1 distance to b."""
    dist, _ = cKDTree(b).query(a, k=1, p=1)
    return float(np.max(dist))


def hausdorff(A, B) -> float:
    """l1 Hausdorff distance between two finite nonempty point sets."""
    a = np.asarray(A, dtype=float)
    b = np.asarray(B, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("Hausdorff distance needs nonempty sets")
    if a.ndim == 1:
        a = a[None, :]
    if b.ndim == 1:
        b = b[None, :]
    return max(_directed(a, b), _directed(b, a))


def directed_deviation(A, B) -> float:
    """max over b in B of the l1 distance to A."""
    a = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.atleast_2d(np.asarray(B, dtype=float))
    return _directed(b, a)


def direction_grid(d: int, count: int = 8) -> list[tuple]:
    """Integer step vectors of unit l1 directions: the 2d axes, then diagonals."""
    dirs = []
    for a in range(d):
        for s in (1, -1):
            v = [0] * d
            v[a] = s
            dirs.append(tuple(v))
    if d >= 2:
        for sx in (1, -1):
            for sy in (1, -1):
                v = [0] * d
                v[0], v[1] = sx, sy
                dirs.append(tuple(v))
    if count > len(dirs):
        raise ConfigError(f"at most {len(dirs)} directions available in d={d}")
    return dirs[:count]


def ray_reach(points: set, step: tuple, limit: int) -> int:
    """Largest l1 norm of k*step in the set, k = 1..; 0 if none."""
    n = sum(abs(c) for c in step)
    best = 0
    for k in range(1, limit // n + 1):
        if tuple(k * c for c in step) in points:
            best = k * n
    return best


@dataclass
class ShapeEstimate:
    r: float
    t: int
    directions: list
    radii: list  # EstimateRecord per direction, reach / t
    asymmetric: list  # index pairs of symmetric directions whose radii differ by > 3 se
    cloud: np.ndarray = field(repr=False, default=None)  # B(t)/t of replicate 0

    def to_dict(self) -> dict:
        return {"r": self.r, "t": self.t, "directions": [list(v) for v in self.directions],
                "radii": [rec.to_dict() for rec in self.radii], "asymmetric": self.asymmetric}


def _shape_replicate(i, seed, d, t, rs, dirs):
    f = make_field(seed, d, t, t, i)
    sets = []
    reaches = []
    for r in rs:
        pts = visited_set(f, Config.at(f, r), t)
        s = as_set(pts)
        sets.append(pts)
        reaches.append([ray_reach(s, v, t) for v in dirs])
    nested = all(as_set(sets[j]) <= as_set(sets[j + 1]) for j in range(len(rs) - 1))
    dh = [hausdorff(sets[j] / t, sets[j + 1] / t) for j in range(len(rs) - 1)]
    clouds = sets if i == 0 else None
    return reaches, nested, dh, clouds


@dataclass
class ShapeComparison:
    rs: list
    t: int
    estimates: list  # ShapeEstimate per r
    nested_all: bool
    nested_failures: int
    hausdorff: list  # EstimateRecord per adjacent pair

    def to_dict(self) -> dict:
        return {"r": self.rs, "t": self.t, "estimates": [e.to_dict() for e in self.estimates],
                "nested_all": self.nested_all, "nested_failures": self.nested_failures,
                "hausdorff": [h.to_dict() for h in self.hausdorff]}


def _symmetry_pairs(dirs) -> list:
    """Pairs of directions related by a reflection or coordinate swap."""
    pairs = []
    for i, u in enumerate(dirs):
        for j in range(i + 1, len(dirs)):
            v = dirs[j]
            if sorted(map(abs, u)) == sorted(map(abs, v)):
                pairs.append((i, j))
    return pairs


def compare_shapes(rs: Sequence[float], t: int, replicates: int, d: int = 2, seed: int = 0,
                   direction_count: int = 8, threads: int | None = None,
                   level: float = 0.95) -> ShapeComparison:
    """Coupled visited sets for several r on shared fields."""
    rs = sorted(float(r) for r in rs)
    for r in rs:
        if not 0.0 < r <= 1.0:
            raise ConfigError(f"r={r} outside (0, 1]")
    if t < 1:
        raise ConfigError("t must be positive")
    dirs = direction_grid(d, direction_count)
    rows = map_replicates(_shape_replicate, replicates, (seed, d, t, rs, dirs), threads)
    estimates = []
    pairs = _symmetry_pairs(dirs)
    for j, r in enumerate(rs):
        recs = []
        for k in range(len(dirs)):
            recs.append(normal_record(Moments.of(row[0][j][k] for row in rows), level,
                                      params={"direction": list(dirs[k]), "r": r}))
        recs = [_rescale(rec, 1.0 / t) for rec in recs]
        asym = []
        for a, b in pairs:
            se = math.hypot(recs[a].stderr, recs[b].stderr)
            if se > 0 and abs(recs[a].estimate - recs[b].estimate) > 3 * se:
                asym.append([a, b])
        cloud = rows[0][3][j] / t if rows and rows[0][3] is not None else None
        estimates.append(ShapeEstimate(r, t, dirs, recs, asym, cloud))
    fails = sum(not row[1] for row in rows)
    hd = []
    for j in range(len(rs) - 1):
        rec = normal_record(Moments.of(row[2][j] for row in rows), level,
                            params={"p": rs[j], "q": rs[j + 1], "t": t})
        hd.append(rec)
    return ShapeComparison(rs, t, estimates, fails == 0, fails, hd)


def _rescale(rec, factor):
    from .estimators import _scaled

    out = _scaled(rec, factor)
    out.params = rec.params
    return out


def shape_estimate(r: float, t: int, replicates: int, direction_count: int = 8, d: int = 2,
                   seed: int = 0, threads: int | None = None) -> ShapeEstimate:
    return compare_shapes([r], t, replicates, d, seed, direction_count, threads).estimates[0]
