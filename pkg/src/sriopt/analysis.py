"""Measurements of a matching against an instance.

Blocking pairs are unordered and counted once.  Profiles and costs are
taken over the matched set A* (agents matched in every stable matching)
unless the caller asks for the all-matched scope, which is what makes sense
for unstable matchings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .irving import stable_matching
from .model import Instance, Matching, check_matching

ASTAR = "astar"
ALL_MATCHED = "all-matched"


def blocking_pairs(inst: Instance, m: Matching) -> set[tuple[int, int]]:
    check_matching(inst, m)
    partner = m.partner
    # rank each agent gives its partner; unmatched agents accept anyone
    cur = [inst.rank(a, b) if b is not None else len(inst.prefs[a]) + 1 for a, b in enumerate(partner)]
    out = set()
    for a, lst in enumerate(inst.prefs):
        for b in lst[: cur[a] - 1]:
            if inst.rank(b, a) < cur[b]:
                out.add((a, b) if a < b else (b, a))
    return out


def count_blocking(inst: Instance, m: Matching) -> int:
    return len(blocking_pairs(inst, m))


def is_stable(inst: Instance, m: Matching) -> bool:
    return not blocking_pairs(inst, m)


@dataclass(frozen=True)
class Profile:
    """counts[k-1] is the number of in-scope agents matched to their k-th choice."""

    counts: tuple[int, ...]
    scope: str = ASTAR

    @property
    def length(self) -> int:
        return len(self.counts)

    def __getitem__(self, k: int) -> int:
        """1-based rank lookup."""
        return self.counts[k - 1]

    def reverse(self) -> tuple[int, ...]:
        return tuple(reversed(self.counts))

    def total(self) -> int:
        return sum(self.counts)

    def cost(self) -> int:
        return sum(k * c for k, c in enumerate(self.counts, start=1))

    def regret(self) -> int:
        return max((k for k, c in enumerate(self.counts, start=1) if c), default=0)

    def as_list(self) -> list[int]:
        return list(self.counts)


def matched_set(inst: Instance) -> Optional[frozenset]:
    """A*, or None when the instance has no stable matching."""
    m = stable_matching(inst)
    return None if m is None else m.matched_agents()


def profile(inst: Instance, m: Matching, scope: str = ASTAR, astar: Optional[frozenset] = None) -> Profile:
    check_matching(inst, m)
    if scope == ASTAR:
        if astar is None:
            astar = matched_set(inst)
            if astar is None:
                raise ValueError("A* is undefined: the instance admits no stable matching")
        members = astar
    elif scope == ALL_MATCHED:
        members = m.matched_agents()
    else:
        raise ValueError(f"unknown profile scope {scope!r}")
    counts = [0] * inst.max_list_len
    for a in members:
        b = m.partner[a]
        if b is not None:
            counts[inst.rank(a, b) - 1] += 1
    return Profile(tuple(counts), scope)


@dataclass(frozen=True)
class CostSummary:
    cost: int
    regret: int
    blocking_count: int


def cost_summary(inst: Instance, m: Matching) -> CostSummary:
    """Cost and regret over matched agents; for a stable matching those are exactly A*."""
    check_matching(inst, m)
    ranks = [inst.rank(a, b) for a, b in enumerate(m.partner) if b is not None]
    return CostSummary(sum(ranks), max(ranks, default=0), count_blocking(inst, m))


def first_choice_count(inst: Instance, m: Matching) -> int:
    return sum(1 for a, b in enumerate(m.partner) if b is not None and inst.prefs[a][0] == b)
