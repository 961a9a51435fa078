"""LC-SRI via min-regret truncation, and the XP algorithm for first choices.

LC-SRI asks, among stable matchings whose regret is the minimum regret R,
for one that puts the fewest agents at their R-th choice.  Cutting the
list of every agent in A* after position R leaves an instance I' whose
stable matchings are exactly the min-regret stable matchings of I (lists
of agents outside A* stay whole); an indicator cost on R-th
choices then turns LC-SRI into optimal SRI on I'.  The cost rows are
U-shaped, which is what a 2-approximation for optimal SRI needs.  Here the
inner problem is solved exactly by the engine, so the ratio is always 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from .criteria import Criterion, solve_criterion
from .engine import MINIMIZE_WEIGHT, OPTIMAL, Objective, SearchProblem, solve
from .errors import NoStableMatchingError
from .irving import irving
from .model import Instance, Matching


@dataclass(frozen=True)
class TruncatedInstance:
    base: Instance
    R: int
    instance: Instance
    astar: frozenset = frozenset()


@dataclass(frozen=True)
class CostFunction:
    """rows[a][i] is the cost to a of its i-th entry in ``instance``."""

    instance: Instance
    rows: tuple[tuple[float, ...], ...]

    def cost(self, a: int, b: int) -> float:
        return self.rows[a][self.instance.rank(a, b) - 1]


def truncate_at_min_regret(inst: Instance) -> TruncatedInstance:
    res = solve_criterion(inst, Criterion.MIN_REGRET)
    if res.status != OPTIMAL:
        raise NoStableMatchingError("instance admits no stable matching")
    R = res.objective
    astar = res.matching.matched_agents()
    # Only agents in A* get cut.  An agent outside A* is single in every
    # stable matching, so trimming its list could delete a pair that blocks.
    return TruncatedInstance(
        inst, R, inst.restrict(lambda a, b: a not in astar or inst.rank(a, b) <= R), astar
    )


def build_lc_cost(t: TruncatedInstance) -> CostFunction:
    """Cost 1 exactly on entries an agent of A* ranks R-th in the base instance.

    After symmetric deletion an agent's list in I' can have holes, so its
    I' positions need not equal its base ranks; LC-SRI counts base ranks.
    Agents outside A* are never matched and get all-zero rows.
    """
    base, astar = t.base, t.astar
    rows = tuple(
        tuple(1 if a in astar and base.rank(a, b) == t.R else 0 for b in lst)
        for a, lst in enumerate(t.instance.prefs)
    )
    cf = CostFunction(t.instance, rows)
    validate_u_shape(cf)
    return cf


def is_u_shaped(row: Sequence[float]) -> bool:
    """Non-increasing up to some pivot, non-decreasing after it."""
    i = 1
    while i < len(row) and row[i] <= row[i - 1]:
        i += 1
    while i < len(row) and row[i] >= row[i - 1]:
        i += 1
    return i >= len(row)


def validate_u_shape(cf: CostFunction) -> None:
    for a, row in enumerate(cf.rows):
        if not is_u_shaped(row):
            raise ValueError(f"cost row of agent {a + 1} is not U-shaped: {list(row)}")


def solve_lc(inst: Instance) -> tuple[Matching, int]:
    """A min-regret stable matching with the fewest R-th choices, and that count."""
    t = truncate_at_min_regret(inst)
    cf = build_lc_cost(t)
    out = solve(SearchProblem(t.instance, Objective(MINIMIZE_WEIGHT, weights=cf.rows)))
    if out.status != OPTIMAL:
        raise NoStableMatchingError("truncated instance admits no stable matching")
    return out.matching, int(out.objective_value)


def check_ratio(candidate_count: int, inst: Instance) -> bool:
    _, opt = solve_lc(inst)
    return candidate_count <= 2 * opt


def fc_xp(inst: Instance, k: int) -> Optional[Matching]:
    """A stable matching giving at least k agents their first choice, or None.

    Tries size-k agent sets in lexicographic order and forces each member
    onto its first choice.  Agents whose first choice is already gone from
    the phase-1 table can never get it in a stable matching, so sets that
    contain one are skipped without a solve; the first success is the same.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    res = irving(inst)
    if not res.solvable:
        return None
    table = res.phase_one_table
    hopeful = [a for a in range(inst.n) if inst.prefs[a] and table[a] and table[a][0] == inst.prefs[a][0]]
    for group in combinations(hopeful, k):
        pairs = []
        used: dict[int, int] = {}
        ok = True
        for a in group:
            b = inst.prefs[a][0]
            if used.get(a, b) != b or used.get(b, a) != a:
                ok = False
                break
            if a not in used:
                used[a], used[b] = b, a
                pairs.append((a, b))
        if not ok:
            continue
        out = solve(SearchProblem(inst, Objective(), forced_pairs=pairs))
        if out.status == OPTIMAL:
            return out.matching
    return None
