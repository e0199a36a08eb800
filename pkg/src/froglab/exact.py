"""Exact probabilities for small-time frog events by exhaustive enumeration.

Events are declared over a finite set of frogs, each with a walk prefix
length; the probability is the fraction of the ``(2d)^(total length)`` joint
prefix assignments that satisfy the predicate, as an exact ``Fraction``.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import InfeasibleError
from .lattice import Region, Site, add, l1_dist, l1_norm, origin, unit

DEFAULT_BUDGET = 10**8


class BudgetExceeded(InfeasibleError):
    def __init__(self, required: int, cap: int):
        super().__init__(f"enumeration needs {required} assignments, cap is {cap}")
        self.required = required
        self.cap = cap


def _directions(d: int) -> list[Site]:
    out = []
    for a in range(d):
        out.append(unit(d, a, 1))
        out.append(unit(d, a, -1))
    return out


def _paths(start: Site, length: int, dirs: Sequence[Site]):
    """All nearest-neighbour paths of the given length from ``start``."""
    for steps in product(dirs, repeat=length):
        pos = [start]
        cur = start
        for s in steps:
            cur = add(cur, s)
            pos.append(cur)
        yield tuple(pos)


@dataclass
class EventSpec:
    """An event measurable with respect to the declared walk prefixes.

    ``predicate`` receives a dict ``site -> tuple of positions`` (prefix
    included, so length+1 entries). ``prune`` is called after each frog is
    assigned (frogs in sorted order) with the partial dict and may return
    False to discard the whole subtree.
    """

    d: int
    prefixes: Mapping[Site, int]
    predicate: Callable[[dict], bool]
    prune: Callable[[dict], bool] | None = None
    budget: int = DEFAULT_BUDGET
    label: str = ""

    def required_budget(self) -> int:
        return (2 * self.d) ** sum(self.prefixes.values())


def exact_prob(spec: EventSpec) -> Fraction:
    required = spec.required_budget()
    if required > spec.budget:
        raise BudgetExceeded(required, spec.budget)
    dirs = _directions(spec.d)
    frogs = sorted(spec.prefixes)
    options = [list(_paths(x, spec.prefixes[x], dirs)) for x in frogs]
    weights = [(2 * spec.d) ** spec.prefixes[x] for x in frogs]

    def rec(i: int, partial: dict) -> int:
        # number of satisfying completions, weighted by unexplored frogs
        if i == len(frogs):
            return 1 if spec.predicate(partial) else 0
        total = 0
        x = frogs[i]
        for path in options[i]:
            partial[x] = path
            if spec.prune is None or spec.prune(partial):
                total += rec(i + 1, partial)
        del partial[x]
        return total

    return Fraction(rec(0, {}), required)


# ---------------------------------------------------------------- evaluators

def first_hit(path: Sequence[Site], v: Site) -> float:
    for k, p in enumerate(path):
        if p == v:
            return k
    return math.inf


def first_hit_set(path: Sequence[Site], pred: Callable[[Site], bool]) -> float:
    for k, p in enumerate(path):
        if pred(p):
            return k
    return math.inf


def chain_passage(walks: Mapping[Site, Sequence[Site]], source: Site, target: Site) -> float:
    """Least relay time from source to target using only the given frogs' prefixes."""
    if source == target:
        return 0
    dist = {source: 0}
    heap = [(0, source)]
    done = set()
    while heap:
        t, u = heapq.heappop(heap)
        if u in done:
            continue
        if u == target:
            return t
        done.add(u)
        path = walks.get(u)
        if path is None:
            continue
        seen = set()
        for k, v in enumerate(path):
            if k == 0 or v in seen:
                continue
            seen.add(v)
            nt = t + k
            if nt < dist.get(v, math.inf):
                dist[v] = nt
                heapq.heappush(heap, (nt, v))
    return math.inf


def in_shell(m: int) -> Callable[[Site], bool]:
    return lambda p: min(p) >= 0 and sum(p) == m


def box_sites(y: Site) -> list[Site]:
    """Sites on monotone lattice paths from 0 to y (the l1 box), y excluded."""
    ranges = [range(0, c + 1) if c >= 0 else range(c, 1) for c in y]
    return [tuple(p) for p in product(*ranges) if tuple(p) != tuple(y)]


# ---------------------------------------------------------------- built-ins

def tau_shell_spec(d: int, m: int) -> EventSpec:
    """{tau(0, Delta_m) = m}."""
    return EventSpec(d, {origin(d): m},
                     lambda w: first_hit_set(w[origin(d)], in_shell(m)) == m,
                     label=f"tau(0,Delta_{m})={m}")


def two_step_events(d: int, i: int = 0) -> dict[str, EventSpec]:
    """The three disjoint pieces of {T(0, 2 xi_i) = 2} (i is 0-based)."""
    o, e1, e2 = origin(d), unit(d, i), unit(d, i, 2)
    pre = {o: 2, e1: 1}

    def parts(w):
        a = w[o][1] == e1
        b = w[o][2] == e2
        c = w[e1][1] == e2
        return a, b, c

    return {
        "S": EventSpec(d, pre, lambda w: (lambda a, b, c: a and b and not c)(*parts(w)), label="S"),
        "T": EventSpec(d, pre, lambda w: (lambda a, b, c: a and not b and c)(*parts(w)), label="T"),
        "U": EventSpec(d, pre, lambda w: (lambda a, b, c: a and b and c)(*parts(w)), label="U"),
    }


def geodesic_passage_spec(d: int, y: Site, extra: Mapping[Site, int] | None = None,
                          predicate=None) -> EventSpec:
    """{T(0,y) = ||y||} over the box frogs; optional extra frogs/predicate."""
    y = tuple(y)
    n = l1_norm(y)
    pre = {x: n - l1_norm(x) for x in box_sites(y)}
    for x, k in (extra or {}).items():
        pre[x] = max(pre.get(x, 0), k)
    o = origin(d)
    if predicate is None:
        predicate = lambda w: chain_passage({x: w[x] for x in w if x != y}, o, y) == n
    return EventSpec(d, pre, predicate, label=f"T(0,{y})={n}")


def passage_prob(d: int, y: Site) -> Fraction:
    """P(T(0,y) = ||y||) for r = 1."""
    return exact_prob(geodesic_passage_spec(d, y))


@dataclass
class Delta2Sum:
    d: int
    mixed: Fraction
    axis: Fraction

    @property
    def total(self) -> Fraction:
        return self.mixed + self.axis


def delta2_passage_sum(d: int) -> Delta2Sum:
    """Sum over y in Delta_2 of P(T(0,y)=2), split into xi_i+xi_j and 2 xi_i terms."""
    if d < 2:
        raise ValueError("d must be at least 2")
    mixed = Fraction(0)
    axis = Fraction(0)
    for y in Region.orthant_shell(d, 2).enumerate():
        p = passage_prob(d, y)
        if max(y) == 2:
            axis += p
        else:
            mixed += p
    return Delta2Sum(d, mixed, axis)


def q_event_spec(d: int, A: int, y: Site) -> EventSpec:
    """{T(0,y) + tau(y, Delta_A) = A} for y in R_{A-1}."""
    y = tuple(y)
    o = origin(d)
    shell = in_shell(A)
    need = A - l1_norm(y)

    def predicate(w):
        t = chain_passage({x: w[x] for x in w if x != y}, o, y)
        return t + first_hit_set(w[y], shell) == A

    return geodesic_passage_spec(d, y, extra={y: need}, predicate=predicate)


def q_small(A: int, d: int, budget: int = DEFAULT_BUDGET) -> Fraction:
    """q_A = E[#{y in R_{A-1} : T(0,y) + tau(y, Delta_A) = A}], exactly."""
    if A not in (2, 3):
        raise ValueError("exact q_A is only offered for A in {2, 3}")
    if d < 2:
        raise ValueError("d must be at least 2")
    total = Fraction(0)
    for y in Region.orthant_ball(d, A - 1).enumerate():
        spec = q_event_spec(d, A, y)
        spec.budget = budget
        total += exact_prob(spec)
    return total


@dataclass
class Q3Report:
    d: int
    q3: Fraction
    delta2: Delta2Sum
    tau_shell: Fraction

    @property
    def identity_holds(self) -> bool:
        return 2 * self.q3 == Fraction(1, 2) + self.delta2.total

    @property
    def bound(self) -> Fraction:
        return Fraction(1, 2) - Fraction(1, 8 * self.d * self.d)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "d": self.d,
            "q3": frac_json(self.q3),
            "two_q3": frac_json(2 * self.q3),
            "delta2_sum": frac_json(self.delta2.total),
            "delta2_mixed": frac_json(self.delta2.mixed),
            "delta2_axis": frac_json(self.delta2.axis),
            "tau_shell_3": frac_json(self.tau_shell),
            "identity_2q3_eq_half_plus_delta2": self.identity_holds,
            "two_q3_lt_1": 2 * self.q3 < 1,
            "delta2_le_bound": self.delta2.total <= self.bound,
            "bound": frac_json(self.bound),
        }


def q3_report(d: int) -> Q3Report:
    return Q3Report(d, q_small(3, d), delta2_passage_sum(d), exact_prob(tau_shell_spec(d, 3)))


def frac_json(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator, "float": float(x)}


# ------------------------------------------------- Bernoulli tiny instances

@dataclass
class TinyInstance:
    """Exact E_r of a functional of a few frogs, as a polynomial in r.

    The origin's frog is always present. ``frogs`` maps every other site that
    may matter to its prefix length; ``value`` receives the dict of walks of
    present frogs and returns a number.
    """

    d: int
    origin_prefix: int
    frogs: Mapping[Site, int]
    value: Callable[[dict], object]
    budget: int = 10**7
    _table: dict = field(default=None, repr=False)

    def _pattern_table(self) -> dict[tuple, Fraction]:
        if self._table is not None:
            return self._table
        dirs = _directions(self.d)
        sites = sorted(self.frogs)
        o = origin(self.d)
        cost = 0
        for pattern in product((0, 1), repeat=len(sites)):
            present = [s for s, b in zip(sites, pattern) if b]
            cost += (2 * self.d) ** (self.origin_prefix + sum(self.frogs[s] for s in present))
        if cost > self.budget:
            raise BudgetExceeded(cost, self.budget)
        table = {}
        for pattern in product((0, 1), repeat=len(sites)):
            present = [s for s, b in zip(sites, pattern) if b]
            frogs = [o] + present
            lens = [self.origin_prefix] + [self.frogs[s] for s in present]
            opts = [list(_paths(x, k, dirs)) for x, k in zip(frogs, lens)]
            acc = Fraction(0)
            count = 0
            for combo in product(*opts):
                acc += Fraction(self.value(dict(zip(frogs, combo))))
                count += 1
            table[pattern] = acc / count
        self._table = table
        return table

    @property
    def sites(self) -> list[Site]:
        return sorted(self.frogs)

    def expectation(self, r: Fraction) -> Fraction:
        r = Fraction(r)
        total = Fraction(0)
        for pattern, v in self._pattern_table().items():
            k = sum(pattern)
            total += v * r**k * (1 - r) ** (len(pattern) - k)
        return total

    def derivative(self, r: Fraction) -> Fraction:
        """d/dr E_r, exactly."""
        r = Fraction(r)
        total = Fraction(0)
        for pattern, v in self._pattern_table().items():
            n, k = len(pattern), sum(pattern)
            w = Fraction(0)
            if k:
                w += k * r ** (k - 1) * (1 - r) ** (n - k)
            if n - k:
                w -= (n - k) * r**k * (1 - r) ** (n - k - 1)
            total += v * w
        return total

    def influence(self, r: Fraction) -> dict[Site, Fraction]:
        """E_r[f(omega_z^0) - f(omega_z^1)] for every declared site z."""
        r = Fraction(r)
        table = self._pattern_table()
        sites = self.sites
        n = len(sites)
        out = {}
        for i, z in enumerate(sites):
            total = Fraction(0)
            for pattern, v in table.items():
                if pattern[i] == 1:
                    continue
                other = pattern[:i] + (1,) + pattern[i + 1:]
                k = sum(pattern)
                weight = r**k * (1 - r) ** (n - 1 - k)
                total += weight * (v - table[other])
            out[z] = total
        return out


def truncated_instance(d: int, y: Site, N: int, budget: int = 10**7) -> TinyInstance:
    """Exact instance for U_0^1(y, N) = T(0,y) 1{T(0,y) <= N}.

    Only frogs at l1 distance at most N-1 from the origin can take part in a
    chain of total time at most N, each needing N - ||x|| steps.
    """
    y = tuple(y)
    o = origin(d)
    frogs = {x: N - l1_norm(x) for x in Region.ball(o, N - 1).enumerate() if x != o and x != y}

    def value(walks):
        t = chain_passage({x: w for x, w in walks.items() if x != y}, o, y)
        return t if t <= N else 0

    return TinyInstance(d, N, frogs, value, budget)


def q_bound(qA: Fraction, n: int) -> Fraction:
    if n < 1:
        raise ValueError("the recursion bound is stated for n >= 1")
    return Fraction(1, 2) * (2 * qA) ** n


def walk_count_check(d: int, length: int) -> int:
    return sum(1 for _ in _paths(origin(d), length, _directions(d)))


def empirical_frequency(spec: EventSpec, samples: int, seed: int = 0) -> float:
    """Monte Carlo frequency of an EventSpec using numpy's generator (for agreement checks)."""
    rng = np.random.default_rng(seed)
    dirs = np.array(_directions(spec.d), dtype=np.int64)
    frogs = sorted(spec.prefixes)
    hits = 0
    for _ in range(samples):
        walks = {}
        for x in frogs:
            k = spec.prefixes[x]
            steps = dirs[rng.integers(0, 2 * spec.d, size=k)]
            pos = np.vstack([np.asarray(x, dtype=np.int64), np.asarray(x) + np.cumsum(steps, axis=0)]) if k else np.asarray([x])
            walks[x] = tuple(tuple(int(c) for c in p) for p in pos)
        hits += bool(spec.predicate(walks))
    return hits / samples


@dataclass
class RecursionReport:
    A: int
    n: int
    d: int
    q_A: Fraction
    bound: Fraction
    estimate: float
    stderr: float
    replicates: int
    level: float
    passed: bool

    @property
    def halfwidth(self) -> float:
        from .stats import z_value

        return z_value(self.level) * self.stderr

    def to_json(self) -> dict:
        return {"schema": 1, "A": self.A, "n": self.n, "d": self.d, "q_A": frac_json(self.q_A),
                "bound": frac_json(self.bound), "estimate": self.estimate, "stderr": self.stderr,
                "ci_low": self.estimate - self.halfwidth, "ci_high": self.estimate + self.halfwidth,
                "replicates": self.replicates, "level": self.level, "passed": self.passed}


def recursion_check(A: int, n: int, mc_budget: int, d: int = 2, seed: int = 0,
                    level: float = 0.99, target_halfwidth: float | None = None,
                    threads: int | None = None) -> RecursionReport:
    """Monte Carlo q_{An} against the exact bound (2q_A)^n / 2.

    Fails only when the estimate exceeds the bound by more than the one-sided
    ``level`` margin.
    """
    from scipy.stats import norm

    from .estimators import estimate_q

    if n < 1:
        raise ValueError("n must be at least 1")
    if mc_budget < 2:
        raise InfeasibleError("need at least two Monte Carlo replicates")
    qA = q_small(A, d)
    bound = q_bound(qA, n)
    rec = estimate_q(A * n, mc_budget, d, seed, threads, level)
    report = RecursionReport(A, n, d, qA, bound, rec.estimate, rec.stderr, rec.n, level, True)
    if target_halfwidth is not None and report.halfwidth > target_halfwidth:
        raise InfeasibleError(f"half-width {report.halfwidth:.4g} above target {target_halfwidth}"
                              f" with {mc_budget} replicates")
    report.passed = rec.estimate - float(norm.ppf(level)) * rec.stderr <= float(bound)
    return report
