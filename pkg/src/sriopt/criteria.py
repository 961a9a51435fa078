"""Optimality criteria as sequences of engine solves.

Stable-restricted criteria first run Irving's algorithm: an unsolvable
instance is reported unsat straight away, and the phase-1 table gives cheap
bounds on the ranks any stable matching can use.  Rank-maximal and generous
are lexicographic loops that rebuild the engine for every level and carry
the committed level values as floors or ceilings.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from .analysis import ALL_MATCHED, ASTAR, CostSummary, Profile, cost_summary, profile
from .engine import (
    BUDGET_EXCEEDED,
    DEFAULT_NODE_LIMIT,
    FEASIBILITY,
    MAXIMIZE_LEVEL,
    MINIMIZE_BLOCKING,
    MINIMIZE_COST,
    MINIMIZE_LEVEL,
    OPTIMAL,
    UNSAT,
    Objective,
    SearchProblem,
    SearchStats,
    SolveOutcome,
    solve,
)
from .errors import NoStableMatchingError
from .irving import irving, stable_matching
from .model import Instance, Matching


class Criterion(str, Enum):
    ANY_STABLE = "any-stable"
    EGALITARIAN = "egalitarian"
    FC_MAX = "fc-max"
    RANK_MAXIMAL = "rank-maximal"
    GENEROUS = "generous"
    MIN_REGRET = "min-regret"
    ALMOST_STABLE = "almost-stable"


CRITERIA = tuple(c.value for c in Criterion)


@dataclass
class LexState:
    """Committed per-level values of a lexicographic loop, in commit order."""

    bounds: dict = field(default_factory=dict)
    current_level: Optional[int] = None

    def commit(self, level: int, value: int) -> None:
        if level in self.bounds:
            raise ValueError(f"level {level} already committed")
        self.bounds[level] = value
        self.current_level = level


@dataclass
class CriterionResult:
    criterion: Criterion
    outcome: SolveOutcome
    profile: Optional[Profile] = None
    summary: Optional[CostSummary] = None
    trace: list = field(default_factory=list)
    # ASTAR for stable outputs; ALL_MATCHED for almost-stable, where A* may not exist
    scope: str = ASTAR

    @property
    def status(self) -> str:
        return self.outcome.status

    @property
    def matching(self) -> Optional[Matching]:
        return self.outcome.matching

    @property
    def objective(self) -> Any:
        return self.outcome.objective_value


class _Timeout(Exception):
    def __init__(self, outcome: SolveOutcome):
        self.outcome = outcome


class _Runner:
    """Shares one node budget and one deadline across the solves of a criterion."""

    def __init__(self, inst: Instance, node_limit: int, time_limit_ms: Optional[float]):
        self.inst = inst
        self.node_limit = node_limit
        self.t0 = time.perf_counter()
        self.deadline = None if time_limit_ms is None else self.t0 + time_limit_ms / 1000.0
        self.stats = SearchStats()

    def run(self, objective: Objective, **kw) -> SolveOutcome:
        left_ms = None
        if self.deadline is not None:
            left_ms = max(0.0, (self.deadline - time.perf_counter()) * 1000.0)
        p = SearchProblem(
            self.inst,
            objective,
            node_limit=max(1, self.node_limit - self.stats.nodes),
            time_limit_ms=left_ms,
            **kw,
        )
        out = solve(p)
        self.stats.nodes += out.stats.nodes
        self.stats.backtracks += out.stats.backtracks
        if out.status == BUDGET_EXCEEDED:
            raise _Timeout(out)
        return out

    def outcome(self, status, matching=None, value=None) -> SolveOutcome:
        self.stats.millis = (time.perf_counter() - self.t0) * 1000.0
        return SolveOutcome(status, matching, value, self.stats)


def _table_rank_bounds(inst: Instance, table, astar) -> tuple[int, int]:
    """(lower, upper) bounds on the regret of any stable matching.

    Every stable matching lives inside the phase-1 table, so agent a gets at
    best the rank of its first table entry and at worst that of its last.
    """
    lo = hi = 0
    for a in astar:
        row = table[a]
        lo = max(lo, inst.rank(a, row[0]))
        hi = max(hi, inst.rank(a, row[-1]))
    return lo, hi


def solve_criterion(
    inst: Instance,
    criterion,
    node_limit: int = DEFAULT_NODE_LIMIT,
    time_limit_ms: Optional[float] = None,
) -> CriterionResult:
    c = Criterion(criterion)
    run = _Runner(inst, node_limit, time_limit_ms)
    try:
        if c is Criterion.ALMOST_STABLE:
            return _almost_stable(inst, run)
        res = irving(inst)
        if not res.solvable:
            return CriterionResult(c, run.outcome(UNSAT))
        astar = res.matching.matched_agents()
        table = res.phase_one_table
        trace: list = []
        if c is Criterion.ANY_STABLE:
            m, value = run.run(Objective()).matching, None
        elif c is Criterion.EGALITARIAN:
            out = run.run(Objective(MINIMIZE_COST))
            m, value = out.matching, out.objective_value
        elif c is Criterion.FC_MAX:
            out = run.run(Objective(MAXIMIZE_LEVEL, level=1))
            m, value = out.matching, out.objective_value
        elif c is Criterion.RANK_MAXIMAL:
            m, trace = _rank_maximal(inst, run, len(astar))
            value = tuple(v for _, v in trace)
        elif c is Criterion.GENEROUS:
            m, trace = _generous(inst, run, table, astar)
            value = tuple(v for _, v in sorted(trace))
        else:
            m, value = _min_regret(inst, run, table, astar)
    except _Timeout as t:
        return CriterionResult(c, run.outcome(BUDGET_EXCEEDED, t.outcome.matching))
    return CriterionResult(
        c,
        run.outcome(OPTIMAL, m, value),
        profile(inst, m, ASTAR, astar),
        cost_summary(inst, m),
        trace,
    )


def _rank_maximal(inst: Instance, run: _Runner, total: int):
    state = LexState()
    m = None
    for k in range(1, inst.max_list_len + 1):
        if sum(state.bounds.values()) == total:
            # every agent in A* is accounted for; the remaining levels are empty
            state.commit(k, 0)
            continue
        out = run.run(Objective(MAXIMIZE_LEVEL, level=k, profile_floor=dict(state.bounds)))
        state.commit(k, out.objective_value)
        m = out.matching
    if m is None:
        m = run.run(Objective()).matching
    return m, list(state.bounds.items())


def _generous(inst: Instance, run: _Runner, table, astar):
    L = inst.max_list_len
    _, top = _table_rank_bounds(inst, table, astar)
    state = LexState()
    m = None
    for k in range(L, 1, -1):
        if k > top:
            state.commit(k, 0)
            continue
        out = run.run(Objective(MINIMIZE_LEVEL, level=k, profile_ceiling=dict(state.bounds)))
        state.commit(k, out.objective_value)
        m = out.matching
    if m is None:
        m = run.run(Objective(FEASIBILITY, profile_ceiling=dict(state.bounds))).matching
    trace = list(state.bounds.items())
    if L >= 1:
        # level 1 is whatever is left once the higher levels are pinned
        trace.append((1, len(astar) - sum(state.bounds.values())))
    return m, trace


def _min_regret(inst: Instance, run: _Runner, table, astar):
    if not astar:
        return run.run(Objective()).matching, 0
    lo, hi = _table_rank_bounds(inst, table, astar)
    for r in range(lo, hi + 1):
        out = run.run(Objective(), rank_cap=r)
        if out.status == OPTIMAL:
            return out.matching, r
    raise AssertionError("no cap up to the phase-1 table bound admits a stable matching")


def _almost_stable(inst: Instance, run: _Runner) -> CriterionResult:
    """Fewest blocking pairs over all matchings.

    A matching whose blocking pairs are S is stable in the instance with S
    deleted, and a stable matching of I - S blocks in I only on S.  So the
    optimum is 0 iff I is solvable, 1 iff some single-edge deletion is
    solvable, and only otherwise does the relaxed search run.
    """
    c = Criterion.ALMOST_STABLE
    if stable_matching(inst) is not None:
        out = run.run(Objective())
        m, value = out.matching, 0
    else:
        m = None
        for a, b in inst.edges():
            m = stable_matching(inst.restrict(lambda x, y: not (x in (a, b) and y in (a, b))))
            if m is not None:
                value = 1
                break
        if m is None:
            out = run.run(Objective(MINIMIZE_BLOCKING), relax_stability=True, lower_bound=2)
            m, value = out.matching, out.objective_value
    return CriterionResult(
        c,
        run.outcome(OPTIMAL, m, value),
        profile(inst, m, ALL_MATCHED),
        cost_summary(inst, m),
        scope=ALL_MATCHED,
    )


def lex_trace(inst: Instance, criterion) -> list[tuple[int, int]]:
    c = Criterion(criterion)
    if c not in (Criterion.RANK_MAXIMAL, Criterion.GENEROUS):
        raise ValueError(f"lex_trace needs rank-maximal or generous, got {c.value}")
    res = solve_criterion(inst, c)
    if res.status == UNSAT:
        raise NoStableMatchingError("instance admits no stable matching")
    return res.trace
