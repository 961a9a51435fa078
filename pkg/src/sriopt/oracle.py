"""Brute-force ground truth for small instances.

Nothing here shares code with the search engine: enumeration walks the
lowest-numbered undecided agent through its options (each acceptable
undecided partner in increasing index order, then "unmatched") and prunes
as soon as two decided agents form a blocking pair.  That visit order is
the canonical matching order, so results come out sorted by
``Matching.key()``.
"""

from __future__ import annotations

from typing import Optional

from .errors import BudgetExceededError
from .irving import stable_matching
from .model import Instance, Matching

DEFAULT_NODE_LIMIT = 10**8

_UNDECIDED = -2
_SINGLE = -1


class _Walker:
    def __init__(self, inst: Instance, node_limit: int):
        self.inst = inst
        self.n = inst.n
        self.rank = [inst.rank_dict(a) for a in range(inst.n)]
        self.options = [sorted(lst) for lst in inst.prefs]
        self.state = [_UNDECIDED] * inst.n
        self.node_limit = node_limit
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise BudgetExceededError(f"oracle node budget of {self.node_limit} exceeded", self.nodes)

    def held(self, a: int) -> int:
        """Rank a gives its decided partner; list length + 1 when single."""
        s = self.state[a]
        return len(self.inst.prefs[a]) + 1 if s == _SINGLE else self.rank[a][s]

    def new_blocks(self, a: int) -> int:
        """Blocking pairs between a (just decided) and other decided agents."""
        state, rank = self.state, self.rank
        mine = self.held(a)
        count = 0
        for b in self.inst.prefs[a][: mine - 1]:
            if state[b] != _UNDECIDED and rank[b][a] < self.held(b):
                count += 1
        return count


def _to_matching(state) -> Matching:
    return Matching(tuple(None if s == _SINGLE else s for s in state))


def enumerate_stable(inst: Instance, node_limit: int = DEFAULT_NODE_LIMIT) -> list[Matching]:
    """Every stable matching, in canonical order."""
    w = _Walker(inst, node_limit)
    state = w.state
    out: list[Matching] = []

    def rec(start: int):
        a = start
        while a < w.n and state[a] != _UNDECIDED:
            a += 1
        if a == w.n:
            out.append(_to_matching(state))
            return
        for b in w.options[a]:
            if state[b] != _UNDECIDED:
                continue
            w.tick()
            state[a], state[b] = b, a
            if not w.new_blocks(a) and not w.new_blocks(b):
                rec(a + 1)
            state[a] = state[b] = _UNDECIDED
        w.tick()
        state[a] = _SINGLE
        if not w.new_blocks(a):
            rec(a + 1)
        state[a] = _UNDECIDED

    rec(0)
    return out


def min_blocking_over_all_matchings(
    inst: Instance, node_limit: int = DEFAULT_NODE_LIMIT
) -> tuple[Matching, int]:
    """A canonical-first matching with the fewest blocking pairs, and that count."""
    w = _Walker(inst, node_limit)
    state = w.state
    best: list = [None, len(inst.edges()) + 1]

    def rec(start: int, count: int):
        if count >= best[1]:
            return
        a = start
        while a < w.n and state[a] != _UNDECIDED:
            a += 1
        if a == w.n:
            best[0], best[1] = _to_matching(state), count
            return
        for b in w.options[a]:
            if state[b] != _UNDECIDED:
                continue
            w.tick()
            state[a], state[b] = b, a
            rec(a + 1, count + w.new_blocks(a) + w.new_blocks(b))
            state[a] = state[b] = _UNDECIDED
        w.tick()
        state[a] = _SINGLE
        rec(a + 1, count + w.new_blocks(a))
        state[a] = _UNDECIDED

    rec(0, 0)
    return best[0], best[1]


def all_matchings(inst: Instance, node_limit: int = DEFAULT_NODE_LIMIT) -> list[Matching]:
    """Every matching over acceptable pairs, in canonical order (tiny instances only)."""
    w = _Walker(inst, node_limit)
    state = w.state
    out: list[Matching] = []

    def rec(start: int):
        a = start
        while a < w.n and state[a] != _UNDECIDED:
            a += 1
        if a == w.n:
            out.append(_to_matching(state))
            return
        for b in w.options[a]:
            if state[b] == _UNDECIDED:
                w.tick()
                state[a], state[b] = b, a
                rec(a + 1)
                state[a] = state[b] = _UNDECIDED
        w.tick()
        state[a] = _SINGLE
        rec(a + 1)
        state[a] = _UNDECIDED

    rec(0)
    return out


def exists_stable(inst: Instance) -> bool:
    return stable_matching(inst) is not None


def any_stable(inst: Instance) -> Optional[Matching]:
    return stable_matching(inst)
