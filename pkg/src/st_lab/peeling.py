"""Threshold peeling to the maximal core.

An element survives while the number of its *live* supports is at least
its threshold; a support is live while all of its members survive.  The
survival operator is monotone, so the greatest fixpoint is unique and any
removal order reaches it.
"""

from __future__ import annotations

import heapq
import random
from typing import Callable, Hashable, Iterable, Mapping, Sequence


class Peeler:
    """Incremental bookkeeping shared by the round and sequential drivers.

    ``supports[s]`` lists the members of support ``s``; ``owners[s]`` lists
    the elements whose count includes ``s``.
    """

    def __init__(
        self,
        elements: Iterable[Hashable],
        supports: Sequence[Sequence[Hashable]],
        owners: Sequence[Sequence[Hashable]],
        below: Callable[[Hashable, int], bool],
    ):
        self.alive = set(elements)
        self.supports = supports
        self.owners = owners
        self.below = below
        self.support_alive = [all(x in self.alive for x in members) for members in supports]
        self.count = {e: 0 for e in self.alive}
        self.member_of: dict[Hashable, list[int]] = {e: [] for e in self.alive}
        for s, members in enumerate(supports):
            for x in members:
                if x in self.member_of:
                    self.member_of[x].append(s)
            if self.support_alive[s]:
                for e in owners[s]:
                    if e in self.count:
                        self.count[e] += 1

    def doomed(self) -> list[Hashable]:
        return [e for e in self.alive if self.below(e, self.count[e])]

    def is_doomed(self, e) -> bool:
        return e in self.alive and self.below(e, self.count[e])

    def remove(self, e) -> list[int]:
        """Remove ``e``; return the supports that died as a result."""
        self.alive.discard(e)
        dead = []
        for s in self.member_of[e]:
            if self.support_alive[s]:
                self.support_alive[s] = False
                dead.append(s)
                for o in self.owners[s]:
                    if o in self.count:
                        self.count[o] -= 1
        return dead


def peel_rounds(peeler: Peeler, sort_key=None) -> int:
    """Remove every below-threshold element simultaneously until stable.

    Returns the number of rounds that removed something.
    """
    rounds = 0
    while True:
        batch = peeler.doomed()
        if not batch:
            return rounds
        rounds += 1
        for e in sorted(batch, key=sort_key):
            peeler.remove(e)


def peel_sequential(peeler: Peeler, rng: random.Random | None = None, sort_key=None) -> int:
    """Remove one below-threshold element at a time.

    With ``rng`` the element is chosen uniformly among the current
    candidates; otherwise the smallest by ``sort_key``.  Returns the
    number of removals.  Counts only ever drop, so a candidate stays a
    candidate until removed and the pool is maintained incrementally.
    """
    key = sort_key if sort_key is not None else (lambda e: e)
    pool = sorted(peeler.doomed(), key=key)
    queued = set(pool)
    if rng is None:
        pool = [(key(e), k, e) for k, e in enumerate(pool)]
        heapq.heapify(pool)
    tick = len(queued)
    removed = 0
    while pool:
        if rng is None:
            e = heapq.heappop(pool)[2]
        else:
            k = rng.randrange(len(pool))
            pool[k], pool[-1] = pool[-1], pool[k]
            e = pool.pop()
        for s in peeler.remove(e):
            for o in peeler.owners[s]:
                if o not in queued and peeler.is_doomed(o):
                    queued.add(o)
                    if rng is None:
                        heapq.heappush(pool, (key(o), tick, o))
                        tick += 1
                    else:
                        pool.append(o)
        removed += 1
    return removed


def thresholds_below(thresholds: Mapping[Hashable, object]) -> Callable[[Hashable, int], bool]:
    """Strict "fewer than" test against per-element thresholds."""
    return lambda e, c: c < thresholds[e]
