"""First-passage times of the frog model on a window/horizon-truncated instance.

``T(x, y)`` is the least total time over relay chains ``x = x_0, ..., x_m = y``
where hop i costs the hitting time of ``x_{i+1}`` by the frog sitting at
``x_i``. Walks are truncated at the horizon H and only sites within l1
distance W of the origin take part. Values larger than ``H`` are reported as
:data:`UNREACHABLE`.
"""
from __future__ import annotations

import functools
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _search
from ._search import Heuristic, SearchOutput, Target
from .field import RandomField
from .lattice import Region, Site, check_window, l1_dist, l1_norm, origin, unit

try:  # pragma: no cover - exercised implicitly when the extension is built
    from . import _ckernel
except ImportError:  # pragma: no cover
    _ckernel = None

MAX_PACKED = 32000
MAX_BOX_CELLS = 200_000_000


@functools.total_ordering
class _Unreachable:
    """Passage time beyond the horizon; compares above every finite time."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNREACHABLE"

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("UNREACHABLE")

    def __add__(self, other):
        raise TypeError("arithmetic on UNREACHABLE")

    __radd__ = __sub__ = __rsub__ = __add__


UNREACHABLE = _Unreachable()


def is_finite(t) -> bool:
    return t is not UNREACHABLE


def compiled_available() -> bool:
    return _ckernel is not None


def _backend_for(field_obj, d: int, window: int, horizon: int) -> str:
    forced = os.environ.get("FROGLAB_BACKEND", "").lower()
    if forced == "python" or _ckernel is None or type(field_obj) is not RandomField:
        return "python"
    if d > 4 or window + horizon >= MAX_PACKED or (2 * window + 1) ** d > MAX_BOX_CELLS:
        return "python"
    return "compiled"


@dataclass(frozen=True, eq=False)
class Config:
    """A Bernoulli(r) configuration read off a field's marks, plus overrides.

    The origin is forced occupied unless an override says otherwise.
    """

    field: object
    r: float
    forced: tuple = ()

    @classmethod
    def at(cls, field_obj, r: float, forced=None) -> "Config":
        if not 0.0 < r <= 1.0:
            raise ValueError(f"occupation parameter r={r} outside (0, 1]")
        d = field_obj.d
        merged = {origin(d): 1}
        for site, s in dict(forced or {}).items():
            if s not in (0, 1):
                raise ValueError("forced values must be 0 or 1")
            merged[tuple(int(c) for c in site)] = int(s)
        return cls(field_obj, float(r), tuple(sorted(merged.items())))

    def override(self, z: Sequence[int], s: int) -> "Config":
        forced = dict(self.forced)
        forced[tuple(int(c) for c in z)] = int(s)
        return Config.at(self.field, self.r, forced)

    def occupied(self, x: Sequence[int]) -> bool:
        x = tuple(int(c) for c in x)
        for site, s in self.forced:
            if site == x:
                return s == 1
        return self.field.mark(x) < self.r

    def sites(self, radius: int) -> list[Site]:
        """Occupied sites of the ball B(0, radius)."""
        return [x for x in Region.ball(origin(self.field.d), radius).enumerate() if self.occupied(x)]

    def __le__(self, other: "Config") -> bool:
        raise TypeError("compare configurations pointwise with occupied()")


def run_search(config: Config, source, *, g0: int = 0, cutoff: int | None = None,
               heuristic: Heuristic = Heuristic(), target: Target = Target(),
               stop_mode: int = _search.STOP_NOW, window: int | None = None,
               horizon: int | None = None) -> SearchOutput:
    """Dispatch one passage search to the compiled or pure-Python backend."""
    fld = config.field
    W = fld.window if window is None else window
    H = fld.horizon if horizon is None else horizon
    source = tuple(int(c) for c in source)
    d = len(source)
    if cutoff is None:
        cutoff = g0 + H
    if _backend_for(fld, d, W, H) == "python":
        return _search.search_py(fld, config.r, config.forced, source, g0, cutoff, heuristic,
                                 target, stop_mode, W, H)
    forced_sites = np.array([s for s, _ in config.forced], dtype=np.int64).reshape(-1, d)
    forced_vals = np.array([v for _, v in config.forced], dtype=np.int64)
    hc = np.array(heuristic.center or (0,) * d, dtype=np.int64)
    tc = np.array(target.center or (0,) * d, dtype=np.int64)
    mask = np.zeros(0, dtype=np.uint8)
    if target.kind == _search.TGT_SET:
        side = 2 * W + 1
        mask = np.zeros(side ** d, dtype=np.uint8)
        for s in target.sites:
            if l1_norm(s) <= W:
                idx = 0
                for c in s:
                    idx = idx * side + (c + W)
                mask[idx] = 1
    sym = fld.symmetry
    sites, labels, pred, hop, found, events = _ckernel.search_c(
        np.uint64(fld.base_key), d, W, H, config.r, forced_sites, forced_vals,
        np.array(sym.perm, dtype=np.int64), np.array(sym.signs, dtype=np.int64),
        np.array(source, dtype=np.int64), g0, cutoff,
        heuristic.kind, hc, heuristic.radius, target.kind, tc, target.radius, mask, stop_mode)
    return SearchOutput(sites, labels, pred, hop, int(found), int(events))


@dataclass
class PassageResult:
    source: Site
    target: Site | None
    value: object  # int or UNREACHABLE
    geodesic: list = field(default_factory=list)
    hop_times: list = field(default_factory=list)
    censored: bool = False
    window: int = 0
    horizon: int = 0

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "source": list(self.source),
            "target": list(self.target) if self.target is not None else None,
            "value": self.value if is_finite(self.value) else None,
            "unreachable": not is_finite(self.value),
            "censored": self.censored,
            "geodesic": [list(s) for s in self.geodesic],
            "hop_times": list(self.hop_times),
            "window": self.window,
            "horizon": self.horizon,
        }


def _trace(out: SearchOutput, idx: int) -> tuple[list[Site], list[int]]:
    path, hops = [], []
    while idx >= 0:
        path.append(tuple(int(c) for c in out.sites[idx]))
        if out.pred[idx] >= 0:
            hops.append(int(out.hop[idx]))
        idx = int(out.pred[idx])
    path.reverse()
    hops.reverse()
    return path, hops


def _resolve(fld, H, W):
    return (fld.horizon if H is None else H), (fld.window if W is None else W)


def _result(out: SearchOutput, idx: int, source, target, H, W, margin) -> PassageResult:
    if margin is None:
        margin = H // 4
    if idx < 0:
        return PassageResult(source, target, UNREACHABLE, [], [], True, W, H)
    value = int(out.labels[idx]) - int(out.labels[0])
    path, hops = _trace(out, idx)
    return PassageResult(source, path[-1] if target is None else target, value, path, hops,
                         value > H - margin, W, H)


def hitting_time(fld, x: Sequence[int], v: Sequence[int], H: int, config: Config | None = None):
    """First k <= H with S_k(x) = v, or UNREACHABLE (also when x's frog is absent)."""
    x, v = tuple(x), tuple(v)
    if config is not None and not config.occupied(x):
        return 0 if x == v else UNREACHABLE
    if l1_dist(x, v) > H:
        return UNREACHABLE
    pos = fld.walk_positions(x, H)
    hits = np.flatnonzero((pos == np.asarray(v, dtype=np.int64)).all(axis=1))
    return int(hits[0]) if len(hits) else UNREACHABLE


def first_passage(fld, config: Config, source, target, H: int | None = None,
                  W: int | None = None, margin: int | None = None) -> PassageResult:
    H, W = _resolve(fld, H, W)
    source, target = tuple(source), tuple(target)
    check_window(target, W)
    check_window(source, W)
    if not config.occupied(source):
        raise ValueError(f"source {source} is unoccupied")
    out = run_search(config, source, heuristic=Heuristic(_search.HEUR_POINT, target),
                     target=Target(_search.TGT_POINT, target), window=W, horizon=H)
    return _result(out, out.target, source, target, H, W, margin)


def _region_search_args(region: Region):
    if region.kind == "sphere":
        return (Heuristic(_search.HEUR_SPHERE, region.center, region.radius),
                Target(_search.TGT_SPHERE, region.center, region.radius))
    if region.kind == "orthant_shell":
        return (Heuristic(_search.HEUR_SPHERE, origin(region.d), region.radius),
                Target(_search.TGT_SHELL, origin(region.d), region.radius))
    if region.kind == "explicit" and len(region.sites) == 1:
        (pt,) = region.sites
        return Heuristic(_search.HEUR_POINT, pt), Target(_search.TGT_POINT, pt)
    return Heuristic(), Target(_search.TGT_SET, sites=frozenset(region.enumerate()))


def first_passage_to_set(fld, config: Config, source, region: Region, H: int | None = None,
                         W: int | None = None, margin: int | None = None,
                         cutoff: int | None = None) -> PassageResult:
    """T(source, region): minimum over the region; ties go to the lexicographically least site.

    ``cutoff`` bounds the search: values above it come back UNREACHABLE.
    """
    H, W = _resolve(fld, H, W)
    source = tuple(source)
    check_window(source, W)
    if not config.occupied(source) and source not in region:
        raise ValueError(f"source {source} is unoccupied")
    if region.kind != "explicit" and region.max_norm() > W:
        raise ValueError("region extends outside the window")
    heur, tgt = _region_search_args(region)
    out = run_search(config, source, heuristic=heur, target=tgt, stop_mode=_search.STOP_BUCKET,
                     cutoff=cutoff, window=W, horizon=H)
    idx = out.target
    if idx >= 0:
        best = int(out.labels[idx])
        ties = [i for i in np.flatnonzero(out.labels == best)
                if tuple(int(c) for c in out.sites[i]) in region]
        idx = min(ties, key=lambda i: tuple(int(c) for c in out.sites[i]))
    return _result(out, int(idx), source, None, H, W, margin)


def forced_passage(fld, config: Config, z, s: int, source, target, H: int | None = None,
                   W: int | None = None, margin: int | None = None) -> PassageResult:
    """T_z^s(source, target): same field, with the frog at z forced present/absent."""
    return first_passage(fld, config.override(z, s), source, target, H, W, margin)


def truncated_passage(fld, config: Config, z, s: int, y, N: int, H: int | None = None,
                      W: int | None = None) -> int:
    """U_z^s(y, N) = T(0, y) on <omega_z^s> times 1{T <= N}; 0 when censored."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    H, W = _resolve(fld, H, W)
    d = len(y)
    cfg = config.override(z, s).override(origin(d), 1)
    y = tuple(y)
    check_window(y, W)
    out = run_search(cfg, origin(d), heuristic=Heuristic(_search.HEUR_POINT, y),
                     target=Target(_search.TGT_POINT, y), cutoff=min(N, H), window=W, horizon=H)
    if out.target < 0:
        return 0
    return int(out.labels[out.target])


@dataclass(frozen=True)
class GeodesicSite:
    site: Site
    pred: Site
    succ: Site
    far: Site  # first later geodesic point at l1 distance > L, or site + 3L xi_1
    far_found: bool


def far_point(geodesic: Sequence[Site], i: int, L: int) -> tuple[Site, bool]:
    z = geodesic[i]
    for w in geodesic[i + 1:]:
        if l1_dist(w, z) > L:
            return w, True
    d = len(z)
    return tuple(a + b for a, b in zip(z, unit(d, 0, 3 * L))), False


def geodesic_structure(result: PassageResult, L: int) -> list[GeodesicSite]:
    """Predecessor, successor and far point of every interior geodesic site."""
    if result.censored or not is_finite(result.value):
        raise ValueError("geodesic structure needs an uncensored passage result")
    if L < 1:
        raise ValueError("L must be positive")
    g = result.geodesic
    out = []
    for i in range(1, len(g) - 1):
        far, found = far_point(g, i, L)
        out.append(GeodesicSite(g[i], g[i - 1], g[i + 1], far, found))
    return out


def default_horizon(target: Sequence[int], c0_factor: float = 8.0, minimum: int = 8) -> int:
    return max(minimum, int(np.ceil(c0_factor * l1_norm(target))))
