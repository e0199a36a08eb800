"""Reproducible randomness for the frog model.

Every random quantity is a pure function of ``(master_seed, replicate, site,
purpose, step)`` through a splitmix64-style hash, so any site's mark or walk
can be generated on demand in any order, in any process, with identical bits.
The compiled kernel reimplements exactly the same hash.

Marks ``U(x)`` are uniform on [0, 1) and the configuration at parameter r is
``1{U(x) < r}``, which couples all r monotonically.
"""
from __future__ import annotations

import threading
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .lattice import SignedPermutation, Site, l1_norm

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
REP_SALT = 0x632BE59BD9B4E019
TAG_MARK = 0x4D41524B4D41524B
TAG_WALK = 0x57414C4B57414C4B
INV_2_53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= np.uint64(0xBF58476D1CE4E5B9)
        z ^= z >> np.uint64(27)
        z *= np.uint64(0x94D049BB133111EB)
        z ^= z >> np.uint64(31)
    return z


def replicate_key(master_seed: int, replicate: int) -> int:
    k0 = mix64((master_seed & MASK64) ^ GOLDEN)
    return mix64(k0 ^ mix64((replicate + REP_SALT) & MASK64))


def site_keys(base_key: int, coords: Sequence[int]) -> tuple[int, int]:
    """(mark_key, walk_key) of a site in the unconjugated field."""
    h = base_key
    for c in coords:
        h = mix64(h ^ (int(c) & MASK64))
    return mix64(h ^ TAG_MARK), mix64(h ^ TAG_WALK)


def mark_from_key(mark_key: int) -> float:
    return (mark_key >> 11) * INV_2_53


def step_directions(walk_key: int, k: int, d: int) -> np.ndarray:
    """Base direction indices in [0, 2d) for steps 1..k.

    Index ``2a`` is ``+xi_a`` and ``2a+1`` is ``-xi_a``.
    """
    steps = np.arange(1, k + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        v = mix64_array(np.uint64(walk_key) + steps * np.uint64(GOLDEN))
        return (((v >> np.uint64(32)) * np.uint64(2 * d)) >> np.uint64(32)).astype(np.int64)


def step_direction(walk_key: int, k: int, d: int) -> int:
    v = mix64((walk_key + k * GOLDEN) & MASK64)
    return ((v >> 32) * (2 * d)) >> 32


@dataclass(frozen=True)
class FieldSpec:
    master_seed: int
    d: int = 2
    window: int = 64
    horizon: int = 64
    replicate: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be positive")
        if self.window < 0 or self.horizon < 0 or self.replicate < 0:
            raise ValueError("window, horizon and replicate must be nonnegative")
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError("master_seed must fit in 64 bits")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "FieldSpec":
        return cls(**data)

    def with_replicate(self, replicate: int) -> "FieldSpec":
        return FieldSpec(self.master_seed, self.d, self.window, self.horizon, replicate)


class RandomField:
    """Marks and walks of one replicate.

    ``symmetry`` conjugates the field by a signed permutation g: the mark at
    ``g.x`` is the base mark at ``x`` and the walk from ``g.x`` is the g-image
    of the base walk from ``x``.
    """

    def __init__(self, spec: FieldSpec, symmetry: SignedPermutation | None = None):
        self.spec = spec
        self.d = spec.d
        self.symmetry = symmetry if symmetry is not None else SignedPermutation.identity(spec.d)
        if self.symmetry.d != spec.d:
            raise ValueError("symmetry dimension mismatch")
        self.base_key = replicate_key(spec.master_seed, spec.replicate)
        self._inv = self.symmetry.inverse()
        self._walks: dict[Site, np.ndarray] = {}
        self._lock = threading.Lock()
        # direction index -> displacement after conjugation
        disp = np.zeros((2 * self.d, self.d), dtype=np.int64)
        for a in range(self.d):
            for s, off in ((1, 0), (-1, 1)):
                disp[2 * a + off, self.symmetry.perm[a]] = s * self.symmetry.signs[a]
        self._disp = disp

    @property
    def window(self) -> int:
        return self.spec.window

    @property
    def horizon(self) -> int:
        return self.spec.horizon

    def keys(self, x: Sequence[int]) -> tuple[int, int]:
        return site_keys(self.base_key, self._inv.apply(x))

    def mark(self, x: Sequence[int]) -> float:
        return mark_from_key(self.keys(x)[0])

    def marks(self, coords: np.ndarray) -> np.ndarray:
        """Vectorized marks for an (n, d) array of sites."""
        c = np.asarray(coords, dtype=np.int64).reshape(-1, self.d)
        base = np.empty_like(c)
        for i in range(self.d):
            base[:, i] = self.symmetry.signs[i] * c[:, self.symmetry.perm[i]]
        h = np.full(len(c), self.base_key, dtype=np.uint64)
        for i in range(self.d):
            h = mix64_array(h ^ base[:, i].astype(np.uint64))
        key = mix64_array(h ^ np.uint64(TAG_MARK))
        return (key >> np.uint64(11)).astype(np.float64) * INV_2_53

    def walk_positions(self, x: Sequence[int], k: int) -> np.ndarray:
        """Array of shape (k+1, d) holding S_0(x), ..., S_k(x)."""
        x = tuple(int(c) for c in x)
        cached = self._walks.get(x)
        if cached is not None and len(cached) > k:
            return cached[: k + 1]
        length = max(k, self.spec.horizon)
        dirs = step_directions(self.keys(x)[1], length, self.d)
        pos = np.empty((length + 1, self.d), dtype=np.int64)
        pos[0] = x
        np.cumsum(self._disp[dirs], axis=0, out=pos[1:])
        pos[1:] += pos[0]
        with self._lock:
            self._walks.setdefault(x, pos)
        return pos[: k + 1]

    def walk_prefix(self, x: Sequence[int], k: int) -> list[Site]:
        if k < 0 or k > self.spec.horizon:
            raise ValueError(f"walk prefix length {k} outside [0, horizon={self.spec.horizon}]")
        return [tuple(int(c) for c in row) for row in self.walk_positions(x, k)]

    def config_at(self, r: float, forced=None):
        from .passage import Config

        return Config.at(self, r, forced)

    def conjugate(self, g: SignedPermutation) -> "RandomField":
        return RandomField(self.spec, g.compose(self.symmetry))

    def symmetry_conjugate(self, g: SignedPermutation) -> "RandomField":
        return self.conjugate(g)

    def density(self, r: float, radius: int) -> float:
        """Fraction of sites of the l1 ball (origin excluded) with mark below r."""
        from .lattice import Region

        pts = np.array([p for p in Region.ball((0,) * self.d, radius).enumerate() if l1_norm(p)])
        return float((self.marks(pts) < r).mean())


class ExplicitField:
    """A field with hand-specified walks and marks layered over a base field.

    Used to build forced-path instances; only the pure-Python engine accepts it.
    ``walks`` maps a site to a list of positions starting at that site. Past
    the given prefix the walk continues with the base field's steps.
    """

    def __init__(self, base: RandomField, walks=None, marks=None):
        self.base = base
        self.spec = base.spec
        self.d = base.d
        self._walks = {tuple(k): [tuple(p) for p in v] for k, v in (walks or {}).items()}
        self._marks = {tuple(k): float(v) for k, v in (marks or {}).items()}
        for site, path in self._walks.items():
            if path[0] != site:
                raise ValueError(f"walk override for {site} must start at the site")
            for a, b in zip(path, path[1:]):
                if sum(abs(i - j) for i, j in zip(a, b)) != 1:
                    raise ValueError(f"walk override for {site} is not nearest-neighbour")

    @property
    def window(self) -> int:
        return self.spec.window

    @property
    def horizon(self) -> int:
        return self.spec.horizon

    def mark(self, x) -> float:
        x = tuple(x)
        return self._marks[x] if x in self._marks else self.base.mark(x)

    def walk_positions(self, x, k: int) -> np.ndarray:
        x = tuple(int(c) for c in x)
        path = self._walks.get(x)
        if path is None:
            return self.base.walk_positions(x, k)
        pos = np.empty((k + 1, self.d), dtype=np.int64)
        n = min(len(path), k + 1)
        pos[:n] = np.asarray(path[:n], dtype=np.int64)
        if n < k + 1:
            tail = self.base.walk_positions(x, k)
            steps = np.diff(tail, axis=0)[n - 1 : k]
            pos[n:] = pos[n - 1] + np.cumsum(steps, axis=0)
        return pos

    def walk_prefix(self, x, k: int) -> list[Site]:
        if k < 0 or k > self.spec.horizon:
            raise ValueError(f"walk prefix length {k} outside [0, horizon={self.spec.horizon}]")
        return [tuple(int(c) for c in row) for row in self.walk_positions(x, k)]

    def config_at(self, r: float, forced=None):
        from .passage import Config

        return Config.at(self, r, forced)
