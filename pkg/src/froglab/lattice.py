"""Integer-lattice geometry on Z^d with the l1 metric.

Sites are plain tuples of ints. Regions are small immutable descriptions that
can be tested for membership and enumerated in lexicographic order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

Site = tuple  # tuple[int, ...]


def l1_norm(x: Sequence[int]) -> int:
    return sum(abs(int(c)) for c in x)


def l1_dist(x: Sequence[int], y: Sequence[int]) -> int:
    return sum(abs(int(a) - int(b)) for a, b in zip(x, y))


def origin(d: int) -> Site:
    return (0,) * d


def unit(d: int, i: int, sign: int = 1) -> Site:
    """The coordinate vector ``sign * xi_{i+1}`` (axes are 0-based)."""
    return tuple(sign if j == i else 0 for j in range(d))


def add(x: Sequence[int], y: Sequence[int]) -> Site:
    return tuple(int(a) + int(b) for a, b in zip(x, y))


def sub(x: Sequence[int], y: Sequence[int]) -> Site:
    return tuple(int(a) - int(b) for a, b in zip(x, y))


def scale(x: Sequence[int], n: int) -> Site:
    return tuple(int(a) * n for a in x)


def neighbors(x: Sequence[int]) -> list[Site]:
    """The 2d nearest neighbours of ``x`` in lexicographic order."""
    out = []
    for i in range(len(x)):
        for s in (-1, 1):
            y = list(x)
            y[i] += s
            out.append(tuple(y))
    out.sort()
    return out


def check_window(x: Sequence[int], window: int) -> None:
    if l1_norm(x) > window:
        raise ValueError(f"site {tuple(x)} lies outside the window of l1 radius {window}")


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Nonnegative integer vectors of length ``parts`` summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _signed_sphere(center: Sequence[int], radius: int) -> list[Site]:
    d = len(center)
    if radius == 0:
        return [tuple(int(c) for c in center)]
    pts = set()
    for comp in _compositions(radius, d):
        nz = [i for i, a in enumerate(comp) if a]
        for signs in product((-1, 1), repeat=len(nz)):
            v = list(comp)
            for i, s in zip(nz, signs):
                v[i] *= s
            pts.add(add(center, v))
    return sorted(pts)


@dataclass(frozen=True)
class Region:
    """A finite subset of Z^d.

    ``kind`` is one of ``ball`` (B(center, radius)), ``sphere``
    (D_radius(center)), ``orthant_shell`` (Delta_radius, nonnegative
    coordinates with norm exactly ``radius``), ``orthant_ball`` (R_radius) or
    ``explicit`` (the given ``sites``).
    """

    kind: str
    d: int
    radius: int = 0
    center: Site | None = None
    sites: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kind not in ("ball", "sphere", "orthant_shell", "orthant_ball", "explicit"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.radius < 0:
            raise ValueError("negative radius")
        if self.center is None:
            object.__setattr__(self, "center", origin(self.d))
        if len(self.center) != self.d:
            raise ValueError("center dimension mismatch")

    @classmethod
    def ball(cls, center: Sequence[int], radius: int) -> "Region":
        return cls("ball", len(center), radius, tuple(center))

    @classmethod
    def sphere(cls, center: Sequence[int], radius: int) -> "Region":
        return cls("sphere", len(center), radius, tuple(center))

    @classmethod
    def orthant_shell(cls, d: int, m: int) -> "Region":
        return cls("orthant_shell", d, m)

    @classmethod
    def orthant_ball(cls, d: int, m: int) -> "Region":
        return cls("orthant_ball", d, m)

    @classmethod
    def explicit(cls, sites: Iterable[Sequence[int]]) -> "Region":
        pts = frozenset(tuple(int(c) for c in s) for s in sites)
        if not pts:
            raise ValueError("explicit region must be nonempty")
        d = len(next(iter(pts)))
        return cls("explicit", d, 0, None, pts)

    def __contains__(self, x) -> bool:
        x = tuple(x)
        if self.kind == "ball":
            return l1_dist(x, self.center) <= self.radius
        if self.kind == "sphere":
            return l1_dist(x, self.center) == self.radius
        if self.kind == "orthant_shell":
            return min(x) >= 0 and sum(x) == self.radius
        if self.kind == "orthant_ball":
            return min(x) >= 0 and sum(x) <= self.radius
        return x in self.sites

    def enumerate(self) -> list[Site]:
        if self.kind == "ball":
            out = []
            for rad in range(self.radius + 1):
                out.extend(_signed_sphere(self.center, rad))
            return sorted(out)
        if self.kind == "sphere":
            return _signed_sphere(self.center, self.radius)
        if self.kind == "orthant_shell":
            return sorted(_compositions(self.radius, self.d))
        if self.kind == "orthant_ball":
            out = []
            for m in range(self.radius + 1):
                out.extend(_compositions(m, self.d))
            return sorted(out)
        return sorted(self.sites)

    def max_norm(self) -> int:
        """Largest l1 norm of a member (used for window checks)."""
        if self.kind in ("ball", "sphere"):
            return l1_norm(self.center) + self.radius
        if self.kind in ("orthant_shell", "orthant_ball"):
            return self.radius
        return max(l1_norm(s) for s in self.sites)


def enumerate_region(region: Region) -> list[Site]:
    return region.enumerate()


def ball_size_2d(radius: int) -> int:
    return 2 * radius * radius + 2 * radius + 1


@dataclass(frozen=True)
class SignedPermutation:
    """Map sending axis ``i`` to axis ``perm[i]`` with sign ``signs[i]``.

    ``(g.x)[perm[i]] = signs[i] * x[i]``.
    """

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        d = len(self.perm)
        if sorted(self.perm) != list(range(d)):
            raise ValueError(f"not a permutation of the axes: {self.perm}")
        if len(self.signs) != d or any(s not in (-1, 1) for s in self.signs):
            raise ValueError(f"signs must be +-1 with length {d}")

    @classmethod
    def identity(cls, d: int) -> "SignedPermutation":
        return cls(tuple(range(d)), (1,) * d)

    @classmethod
    def swap(cls, d: int, i: int, j: int) -> "SignedPermutation":
        perm = list(range(d))
        perm[i], perm[j] = perm[j], perm[i]
        return cls(tuple(perm), (1,) * d)

    @classmethod
    def reflect(cls, d: int, i: int) -> "SignedPermutation":
        signs = [1] * d
        signs[i] = -1
        return cls(tuple(range(d)), tuple(signs))

    @property
    def d(self) -> int:
        return len(self.perm)

    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.d)) and all(s == 1 for s in self.signs)

    def apply(self, x: Sequence[int]) -> Site:
        if len(x) != self.d:
            raise ValueError("dimension mismatch")
        out = [0] * self.d
        for i, c in enumerate(x):
            out[self.perm[i]] = self.signs[i] * int(c)
        return tuple(out)

    def inverse(self) -> "SignedPermutation":
        perm = [0] * self.d
        signs = [1] * self.d
        for i, (p, s) in enumerate(zip(self.perm, self.signs)):
            perm[p] = i
            signs[p] = s
        return SignedPermutation(tuple(perm), tuple(signs))

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """``self o other``: apply ``other`` first."""
        perm = tuple(self.perm[other.perm[i]] for i in range(self.d))
        signs = tuple(self.signs[other.perm[i]] * other.signs[i] for i in range(self.d))
        return SignedPermutation(perm, signs)

    @classmethod
    def all(cls, d: int) -> list["SignedPermutation"]:
        from itertools import permutations

        return [cls(p, s) for p in permutations(range(d)) for s in product((-1, 1), repeat=d)]


def symmetry_apply(g: SignedPermutation, x: Sequence[int]) -> Site:
    return g.apply(x)
