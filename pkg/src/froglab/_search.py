"""Pure-Python passage search (fallback backend and reference semantics).

The search is label-setting over *walk cursors*. When a site u is finalized
with label t(u) and its frog is present, a cursor for u's walk is queued; the
cursor at step k stands for "u's frog is at S_k(u) at time t(u)+k". Popping a
cursor whose position is not yet finalized finalizes it with that time. Each
cursor is queued under priority ``f = time + h(position)`` where h is an l1
lower bound on the remaining distance to the target (zero for plain
Dijkstra); h is 1-Lipschitz so f never decreases along a walk and the first
pop of a site carries its exact passage time.

Priorities are integers, so the queue is a bucket array with FIFO order inside
a bucket. Ties are therefore broken by queueing order, which is a fixed
function of the instance. The compiled kernel follows the identical order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HEUR_ZERO, HEUR_POINT, HEUR_SPHERE = 0, 1, 2
TGT_NONE, TGT_POINT, TGT_SPHERE, TGT_SHELL, TGT_SET = 0, 1, 2, 3, 4
STOP_NEVER, STOP_NOW, STOP_BUCKET = 0, 1, 2


@dataclass
class SearchOutput:
    sites: np.ndarray  # (n, d) in finalization order
    labels: np.ndarray
    pred: np.ndarray  # index of the relaying site, -1 for the source
    hop: np.ndarray  # walk step at which the relaying frog first hit the site
    target: int  # index of the first finalized target site, -1 if none
    events: int


@dataclass(frozen=True)
class Heuristic:
    kind: int = HEUR_ZERO
    center: tuple = ()
    radius: int = 0

    def __call__(self, x) -> int:
        if self.kind == HEUR_ZERO:
            return 0
        dist = 0
        for a, b in zip(x, self.center):
            dist += abs(a - b)
        if self.kind == HEUR_POINT:
            return dist
        return abs(self.radius - dist)


@dataclass(frozen=True)
class Target:
    kind: int = TGT_NONE
    center: tuple = ()
    radius: int = 0
    sites: frozenset = frozenset()

    def __contains__(self, x) -> bool:
        if self.kind == TGT_NONE:
            return False
        if self.kind == TGT_POINT:
            return x == self.center
        if self.kind == TGT_SET:
            return x in self.sites
        dist = 0
        for a, b in zip(x, self.center):
            dist += abs(a - b)
        if self.kind == TGT_SPHERE:
            return dist == self.radius
        return min(x) >= 0 and dist == self.radius


def search_py(field, r, forced, source, g0, cutoff, heuristic, target, stop_mode,
              window, horizon) -> SearchOutput:
    d = len(source)
    forced = dict(forced)

    def occupied(x):
        s = forced.get(x)
        if s is not None:
            return s == 1
        return field.mark(x) < r

    sites = [source]
    labels = [g0]
    pred = [-1]
    hop = [0]
    walks = [None]
    index = {source: 0}
    buckets: dict[int, list] = {}
    events = 0

    def push(o, k):
        g = labels[o] + k
        if k > horizon or g - g0 > horizon:
            return
        pos = walks[o][k]
        f = g + heuristic(pos)
        if f <= cutoff:
            buckets.setdefault(f, []).append((o, k))

    found = -1
    if source in target:
        found = 0
    if not (found == 0 and stop_mode) and occupied(source) and horizon >= 1:
        walks[0] = [tuple(int(c) for c in row) for row in field.walk_positions(source, horizon)]
        push(0, 1)

    cur = min(buckets) if buckets else cutoff + 1
    done = found == 0 and stop_mode != 0
    last = -1
    while not done and cur <= cutoff:
        bucket = buckets.pop(cur, None)
        if bucket is None:
            cur += 1
            continue
        i = 0
        while i < len(bucket):
            o, k = bucket[i]
            i += 1
            events += 1
            pos = walks[o][k]
            if pos not in index and sum(abs(c) for c in pos) <= window:
                n = len(sites)
                index[pos] = n
                sites.append(pos)
                labels.append(labels[o] + k)
                pred.append(o)
                hop.append(k)
                walks.append(None)
                if found < 0 and pos in target:
                    found = n
                    if stop_mode == STOP_NOW:
                        done = True
                        break
                    if stop_mode == STOP_BUCKET:
                        last = cur
                if occupied(pos) and horizon >= 1:
                    walks[n] = [tuple(int(c) for c in row)
                                for row in field.walk_positions(pos, horizon)]
                    # cursors appended to the bucket being drained are picked up below
                    g = labels[n] + 1
                    if g - g0 <= horizon:
                        f = g + heuristic(walks[n][1])
                        if f <= cutoff:
                            (bucket if f == cur else buckets.setdefault(f, [])).append((n, 1))
            if k < horizon:
                g = labels[o] + k + 1
                if g - g0 <= horizon:
                    f = g + heuristic(walks[o][k + 1])
                    if f <= cutoff:
                        (bucket if f == cur else buckets.setdefault(f, [])).append((o, k + 1))
        cur += 1

    return SearchOutput(
        sites=np.asarray(sites, dtype=np.int64).reshape(len(sites), d),
        labels=np.asarray(labels, dtype=np.int64),
        pred=np.asarray(pred, dtype=np.int64),
        hop=np.asarray(hop, dtype=np.int64),
        target=found,
        events=events,
    )
