"""Irving's proposal-and-reduction algorithm, extended to incomplete lists.

Phase 1 runs proposals with symmetric deletions and yields the phase-1
table; every stable matching is contained in it, and agents whose list
empties are unmatched in every stable matching.  Phase 2 eliminates exposed
rotations until each list has at most one entry; an emptied list in phase 2
means no stable matching exists.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .model import Instance, Matching


class _Table:
    """Preference lists with symmetric deletion and cached heads/tails."""

    def __init__(self, inst: Instance):
        self.prefs = inst.prefs
        self.rank = [inst.rank_dict(a) for a in range(inst.n)]
        self.alive = [set(lst) for lst in inst.prefs]
        self.head = [0] * inst.n
        self.tail = [len(lst) - 1 for lst in inst.prefs]

    def delete(self, a: int, b: int) -> None:
        self.alive[a].discard(b)
        self.alive[b].discard(a)

    def first(self, a: int) -> Optional[int]:
        lst, alive = self.prefs[a], self.alive[a]
        i = self.head[a]
        while i < len(lst) and lst[i] not in alive:
            i += 1
        self.head[a] = i
        return lst[i] if i < len(lst) else None

    def last(self, a: int) -> Optional[int]:
        lst, alive = self.prefs[a], self.alive[a]
        i = self.tail[a]
        while i >= 0 and lst[i] not in alive:
            i -= 1
        self.tail[a] = i
        return lst[i] if i >= 0 else None

    def second(self, a: int) -> Optional[int]:
        lst, alive = self.prefs[a], self.alive[a]
        seen = 0
        for i in range(self.head[a], len(lst)):
            if lst[i] in alive:
                seen += 1
                if seen == 2:
                    return lst[i]
        return None

    def delete_successors(self, a: int, b: int) -> list[int]:
        """a drops everyone it ranks below b; returns the dropped agents."""
        lst, alive = self.prefs[a], self.alive[a]
        dropped = [c for c in lst[self.rank[a][b]:] if c in alive]
        for c in dropped:
            self.delete(a, c)
        return dropped

    def lists(self) -> list[list[int]]:
        return [[b for b in lst if b in self.alive[a]] for a, lst in enumerate(self.prefs)]


def _phase_one(t: _Table, n: int) -> None:
    holder: list[Optional[int]] = [None] * n
    free = deque(range(n))
    while free:
        x = free.popleft()
        y = t.first(x)
        if y is None:
            continue
        prev = holder[y]
        holder[y] = x
        t.delete_successors(y, x)
        if prev is not None:
            free.append(prev)


@dataclass(frozen=True)
class IrvingResult:
    phase_one_table: tuple[tuple[int, ...], ...]
    matching: Optional[Matching]

    @property
    def solvable(self) -> bool:
        return self.matching is not None


def phase_one_table(inst: Instance) -> list[list[int]]:
    t = _Table(inst)
    _phase_one(t, inst.n)
    return t.lists()


def irving(inst: Instance) -> IrvingResult:
    n = inst.n
    t = _Table(inst)
    _phase_one(t, n)
    table = tuple(tuple(lst) for lst in t.lists())
    nonempty = [a for a in range(n) if t.alive[a]]

    while True:
        start = next((a for a in nonempty if len(t.alive[a]) >= 2), None)
        if start is None:
            break
        # walk p -> last(second(p)) until an agent repeats; the cycle is the rotation
        seq: list[int] = []
        pos: dict[int, int] = {}
        p = start
        while p not in pos:
            pos[p] = len(seq)
            seq.append(p)
            q = t.second(p)
            if q is None:
                return IrvingResult(table, None)
            p = t.last(q)
        xs = seq[pos[p]:]
        ys = [t.second(x) for x in xs]
        for i, x in enumerate(xs):
            # x moves to its second choice, which drops everyone it ranks below x
            t.delete_successors(ys[i], x)
        if any(not t.alive[a] for a in nonempty):
            return IrvingResult(table, None)

    partner: list[Optional[int]] = [None] * n
    for a in nonempty:
        b = next(iter(t.alive[a]))
        partner[a] = b
    for a in nonempty:
        if partner[partner[a]] != a:
            return IrvingResult(table, None)
    return IrvingResult(table, Matching(tuple(partner)))


def stable_matching(inst: Instance) -> Optional[Matching]:
    return irving(inst).matching
