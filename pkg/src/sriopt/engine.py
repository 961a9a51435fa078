"""Branch-and-bound search over per-agent rank variables.

Each agent ``a`` owns a variable over ``1 .. len(prefs[a]) + 1``: value ``r``
means "matched to my r-th choice", and the extra top value means "matched
to myself", i.e. unmatched.  Two constraint families tie the variables
together:

* pairing: ``agent[i] = rank(i, j)`` iff ``agent[j] = rank(j, i)``;
* stability (strict mode only): ``agent[i] > rank(i, j)`` implies
  ``agent[j] < rank(j, i)``.

Propagation is bounds reasoning on the stability implications plus the
pairing channel, with extra pruning from profile floors and ceilings.
With ``presolve`` on, domains are first cut down to Irving's phase-1 table
and the matched set A* is fixed; both cuts keep every stable matching.

Optimisation runs in two passes.  The first pass is plain branch and bound
and finds the optimal value.  The second pass is a depth-first search in
canonical order (lowest-numbered open agent first, partners by increasing
index, "unmatched" last) restricted to that value, so the first leaf it
reaches is the canonically smallest optimal matching.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

from .irving import irving
from .model import Instance, Matching

FEASIBILITY = "feasibility"
MINIMIZE_COST = "minimize-cost"
MAXIMIZE_LEVEL = "maximize-profile-level"
MINIMIZE_LEVEL = "minimize-profile-level"
MINIMIZE_BLOCKING = "minimize-blocking"
MINIMIZE_WEIGHT = "minimize-weight"

OBJECTIVE_KINDS = (FEASIBILITY, MINIMIZE_COST, MAXIMIZE_LEVEL, MINIMIZE_LEVEL, MINIMIZE_BLOCKING, MINIMIZE_WEIGHT)

OPTIMAL = "optimal"
UNSAT = "unsat"
BUDGET_EXCEEDED = "budget-exceeded"

DEFAULT_NODE_LIMIT = 10**8


@dataclass(frozen=True)
class Objective:
    """What to optimise.

    ``level`` is the 1-based rank for the profile-level kinds.  ``weights``
    (for ``minimize-weight``) gives, per agent, the cost of being matched to
    each position of its list; being unmatched costs nothing.  Floors and
    ceilings map a rank to a bound on how many agents get that rank.
    """

    kind: str = FEASIBILITY
    level: Optional[int] = None
    profile_floor: Mapping[int, int] = field(default_factory=dict)
    profile_ceiling: Mapping[int, int] = field(default_factory=dict)
    weights: Optional[Sequence[Sequence[float]]] = None

    def __post_init__(self):
        if self.kind not in OBJECTIVE_KINDS:
            raise ValueError(f"unknown objective kind {self.kind!r}")
        if self.kind in (MAXIMIZE_LEVEL, MINIMIZE_LEVEL) and (self.level is None or self.level < 1):
            raise ValueError(f"{self.kind} needs a level >= 1")
        if self.kind == MINIMIZE_WEIGHT and self.weights is None:
            raise ValueError("minimize-weight needs weights")


@dataclass
class SearchProblem:
    instance: Instance
    objective: Objective = field(default_factory=Objective)
    forced_pairs: Sequence[tuple[int, int]] = ()
    # an int caps every agent's partner rank; a sequence caps per agent (None = no cap)
    rank_cap: Union[None, int, Sequence[Optional[int]]] = None
    relax_stability: bool = False
    node_limit: int = DEFAULT_NODE_LIMIT
    time_limit_ms: Optional[float] = None
    presolve: bool = True
    # known bounds on the optimum (objective units); the search stops once it meets lower_bound
    upper_bound: Optional[float] = None
    lower_bound: Optional[float] = None

    def self_rank(self, a: int) -> int:
        return len(self.instance.prefs[a]) + 1

    def cap_of(self, a: int) -> Optional[int]:
        if self.rank_cap is None:
            return None
        if isinstance(self.rank_cap, int):
            return self.rank_cap
        return self.rank_cap[a]


@dataclass
class SearchStats:
    nodes: int = 0
    backtracks: int = 0
    millis: float = 0.0


@dataclass
class SolveOutcome:
    status: str
    matching: Optional[Matching] = None
    objective_value: Optional[float] = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Budget(Exception):
    pass


class _Search:
    def __init__(self, p: SearchProblem):
        inst = p.instance
        self.p = p
        self.n = n = inst.n
        self.strict = not p.relax_stability
        self.L = [len(lst) for lst in inst.prefs]
        self.at = [(None,) + lst for lst in inst.prefs]  # at[a][r] = partner of rank r
        self.rk = [inst.rank_dict(a) for a in range(n)]
        self.dom = [bytearray([0]) + bytearray([1]) * (self.L[a] + 1) for a in range(n)]
        self.size = [self.L[a] + 1 for a in range(n)]
        self.lo = [1] * n
        self.hi = [self.L[a] + 1 for a in range(n)]
        self.trail: list[tuple[int, int]] = []
        self.queue: deque = deque()
        self.inq = [False] * n
        self.stats = SearchStats()
        self.t0 = time.perf_counter()
        self.deadline = None if p.time_limit_ms is None else self.t0 + p.time_limit_ms / 1000.0

        obj = p.objective
        self.kind = obj.kind
        self.floor = {k: v for k, v in obj.profile_floor.items()}
        self.ceiling = {k: v for k, v in obj.profile_ceiling.items()}
        self.weights = self._weights(obj)
        self.edges = inst.edges() if self.kind == MINIMIZE_BLOCKING else []

    def _weights(self, obj: Objective):
        n, L = self.n, self.L
        if obj.kind == MINIMIZE_COST:
            return [list(range(L[a] + 1)) + [0] for a in range(n)]
        if obj.kind in (MAXIMIZE_LEVEL, MINIMIZE_LEVEL):
            sign = -1 if obj.kind == MAXIMIZE_LEVEL else 1
            return [[sign if r == obj.level else 0 for r in range(L[a] + 1)] + [0] for a in range(n)]
        if obj.kind == MINIMIZE_WEIGHT:
            out = []
            for a in range(n):
                w = list(obj.weights[a])
                if len(w) != L[a]:
                    raise ValueError(f"weights for agent {a + 1} must have {L[a]} entries")
                out.append([0] + w + [0])
            return out
        return None

    # -- domain operations -------------------------------------------------

    def remove(self, a: int, r: int) -> bool:
        d = self.dom[a]
        if not d[r]:
            return True
        d[r] = 0
        self.size[a] -= 1
        self.trail.append((a, r))
        if self.size[a] == 0:
            return False
        if r == self.lo[a]:
            lo = r + 1
            while not d[lo]:
                lo += 1
            self.lo[a] = lo
        if r == self.hi[a]:
            hi = r - 1
            while not d[hi]:
                hi -= 1
            self.hi[a] = hi
        if not self.inq[a]:
            self.inq[a] = True
            self.queue.append(a)
        if r <= self.L[a]:
            b = self.at[a][r]
            return self.remove(b, self.rk[b][a])
        return True

    def assign(self, a: int, r: int) -> bool:
        d = self.dom[a]
        if not d[r]:
            return False
        for v in range(self.lo[a], self.hi[a] + 1):
            if v != r and d[v] and not self.remove(a, v):
                return False
        return True

    def undo(self, mark: int) -> None:
        trail, dom, size, lo, hi = self.trail, self.dom, self.size, self.lo, self.hi
        while len(trail) > mark:
            a, r = trail.pop()
            dom[a][r] = 1
            size[a] += 1
            if r < lo[a] or size[a] == 1:
                lo[a] = r
            if r > hi[a] or size[a] == 1:
                hi[a] = r
        for a in self.queue:
            self.inq[a] = False
        self.queue.clear()

    def propagate(self) -> bool:
        queue, L, at, rk, lo, hi, size = self.queue, self.L, self.at, self.rk, self.lo, self.hi, self.size
        while True:
            while queue:
                a = queue.popleft()
                self.inq[a] = False
                if size[a] == 1 and lo[a] <= L[a]:
                    b = at[a][lo[a]]
                    if size[b] > 1 and not self.assign(b, rk[b][a]):
                        return False
                if self.strict:
                    top = min(lo[a], L[a] + 1)
                    row = at[a]
                    for r in range(1, top):
                        j = row[r]
                        rj = rk[j][a]
                        while hi[j] >= rj:
                            if not self.remove(j, hi[j]):
                                return False
            if not self.floor and not self.ceiling:
                return True
            changed = self._profile_bounds()
            if changed is None:
                return False
            if not changed:
                return True

    def _profile_bounds(self):
        """Floors and ceilings on rank counts; None on conflict, else whether domains changed."""
        before = len(self.trail)
        n, L, dom, size, lo = self.n, self.L, self.dom, self.size, self.lo
        for k, f in self.floor.items():
            holders = [a for a in range(n) if k <= L[a] and dom[a][k]]
            if len(holders) < f:
                return None
            if len(holders) == f:
                for a in holders:
                    if size[a] > 1 and not self.assign(a, k):
                        return None
        for k, c in self.ceiling.items():
            fixed = sum(1 for a in range(n) if size[a] == 1 and lo[a] == k and k <= L[a])
            if fixed > c:
                return None
            if fixed == c:
                for a in range(n):
                    if size[a] > 1 and k <= L[a] and dom[a][k] and not self.remove(a, k):
                        return None
        return len(self.trail) != before

    # -- objective ---------------------------------------------------------

    def bound(self) -> float:
        """Lower bound on the objective over the current subtree."""
        if self.kind == MINIMIZE_BLOCKING:
            lo, rk = self.lo, self.rk
            return sum(1 for i, j in self.edges if lo[i] > rk[i][j] and lo[j] > rk[j][i])
        w = self.weights
        if w is None:
            return 0
        if self.kind == MINIMIZE_COST:
            # increasing in rank, except that being unmatched costs nothing
            L, lo, dom = self.L, self.lo, self.dom
            return sum(0 if dom[a][L[a] + 1] else lo[a] for a in range(self.n))
        total = 0
        for a in range(self.n):
            d, wa = self.dom[a], w[a]
            total += min(wa[r] for r in range(self.lo[a], self.hi[a] + 1) if d[r])
        return total

    def matching(self) -> Matching:
        partner = []
        for a in range(self.n):
            r = self.lo[a]
            partner.append(self.at[a][r] if r <= self.L[a] else None)
        return Matching(tuple(partner))

    # -- search ------------------------------------------------------------

    def tick(self):
        st = self.stats
        st.nodes += 1
        if st.nodes > self.p.node_limit:
            raise _Budget()
        if self.deadline is not None and st.nodes % 256 == 0 and time.perf_counter() > self.deadline:
            raise _Budget()

    def root(self, presolve_table=None, astar=None) -> bool:
        p = self.p
        if presolve_table is not None:
            for a in range(self.n):
                keep = set(presolve_table[a])
                for r in range(1, self.L[a] + 1):
                    if self.at[a][r] not in keep and not self.remove(a, r):
                        return False
        if astar is not None:
            for a in range(self.n):
                s = self.L[a] + 1
                if a in astar:
                    if not self.remove(a, s):
                        return False
                elif not self.assign(a, s):
                    return False
        for a in range(self.n):
            cap = p.cap_of(a)
            if cap is not None:
                for r in range(max(cap + 1, 1), self.L[a] + 1):
                    if not self.remove(a, r):
                        return False
        for a, b in p.forced_pairs:
            if b not in self.rk[a] or not self.assign(a, self.rk[a][b]):
                return False
        return self.propagate()

    def _select(self, canonical: bool) -> Optional[int]:
        size = self.size
        if canonical:
            for a in range(self.n):
                if size[a] > 1:
                    return a
            return None
        best, best_size = None, None
        for a in range(self.n):
            s = size[a]
            if s > 1 and (best is None or s < best_size):
                best, best_size = a, s
                if s == 2:
                    break
        return best

    def _values(self, a: int, canonical: bool) -> list[int]:
        d = self.dom[a]
        vals = [r for r in range(self.lo[a], self.hi[a] + 1) if d[r]]
        if canonical:
            n, L, at = self.n, self.L[a], self.at[a]
            return sorted(vals, key=lambda r: at[r] if r <= L else n)
        if self.weights is not None:
            w = self.weights[a]
            return sorted(vals, key=lambda r: (w[r], r))
        return vals

    def branch_and_bound(self, incumbent_value: Optional[float], stop_at: Optional[float]) -> None:
        """First pass; leaves the optimum in ``best_value`` / ``best_matching``."""
        self.best_value = incumbent_value
        self.best_matching = None

        def dfs():
            self.tick()
            lb = self.bound()
            if self.best_value is not None and lb >= self.best_value:
                return
            a = self._select(False)
            if a is None:
                self.best_value, self.best_matching = lb, self.matching()
                if stop_at is not None and lb <= stop_at:
                    raise _Stop()
                return
            for r in self._values(a, False):
                if not self.dom[a][r]:
                    continue
                mark = len(self.trail)
                if self.assign(a, r) and self.propagate():
                    dfs()
                self.undo(mark)
                self.stats.backtracks += 1
                if not self.remove(a, r) or not self.propagate():
                    return
                if self.best_value is not None and self.bound() >= self.best_value:
                    return

        mark = len(self.trail)
        try:
            dfs()
        except _Stop:
            pass
        self.undo(mark)

    def canonical_first(self, limit: Optional[float]) -> Optional[Matching]:
        """Second pass: canonically smallest leaf whose objective is at most ``limit``."""
        found = []

        def dfs():
            self.tick()
            if limit is not None and self.bound() > limit:
                return False
            a = self._select(True)
            if a is None:
                found.append(self.matching())
                return True
            for r in self._values(a, True):
                if not self.dom[a][r]:
                    continue
                mark = len(self.trail)
                if self.assign(a, r) and self.propagate() and dfs():
                    return True
                self.undo(mark)
                self.stats.backtracks += 1
                if not self.remove(a, r) or not self.propagate():
                    return False
                if limit is not None and self.bound() > limit:
                    return False
            return False

        mark = len(self.trail)
        dfs()
        self.undo(mark)
        return found[0] if found else None


class _Stop(Exception):
    pass


def _validate(p: SearchProblem) -> list[str]:
    inst = p.instance
    issues = []
    if p.relax_stability and p.objective.kind not in (FEASIBILITY, MINIMIZE_BLOCKING):
        issues.append(f"objective {p.objective.kind!r} is not supported with relaxed stability")
    if not p.relax_stability and p.objective.kind == MINIMIZE_BLOCKING:
        issues.append("minimize-blocking needs relax_stability")
    if p.relax_stability and (p.objective.profile_floor or p.objective.profile_ceiling):
        issues.append("profile floors/ceilings are not supported with relaxed stability")
    seen = set()
    for a, b in p.forced_pairs:
        if not (0 <= a < inst.n and 0 <= b < inst.n) or not inst.acceptable(a, b):
            issues.append(f"forced pair ({a + 1},{b + 1}) is not acceptable")
            continue
        for x in (a, b):
            if x in seen:
                issues.append(f"agent {x + 1} appears in two forced pairs")
            seen.add(x)
        for x, y in ((a, b), (b, a)):
            cap = p.cap_of(x)
            if cap is not None and inst.rank(x, y) > cap:
                issues.append(f"forced pair ({a + 1},{b + 1}) exceeds the rank cap of agent {x + 1}")
    return issues


def check_consistency(p: SearchProblem) -> list[str]:
    """Contradictions visible without search: malformed extras, or a root wipe-out under propagation alone."""
    issues = _validate(p)
    if issues:
        return issues
    s = _Search(p)
    if not s.root():
        issues.append("propagation empties a domain at the root")
    return issues


def solve(p: SearchProblem) -> SolveOutcome:
    issues = _validate(p)
    if any("not supported" in i or "needs" in i for i in issues):
        raise ValueError("; ".join(issues))
    s = _Search(p)
    t0 = time.perf_counter()

    def done(status, m=None, value=None):
        s.stats.millis = (time.perf_counter() - t0) * 1000.0
        if value is not None and p.objective.kind == MAXIMIZE_LEVEL:
            value = -value
        if value is not None and float(value).is_integer():
            value = int(value)
        return SolveOutcome(status, m, value, s.stats)

    if issues:
        return done(UNSAT)

    table = astar = None
    if p.presolve and s.strict:
        res = irving(p.instance)
        if not res.solvable:
            return done(UNSAT)
        table, astar = res.phase_one_table, res.matching.matched_agents()
    if not s.root(table, astar):
        return done(UNSAT)

    upper = p.upper_bound
    lower = p.lower_bound
    if s.kind == MAXIMIZE_LEVEL:
        upper = None if upper is None else -upper
        lower = None if lower is None else -lower
    s.best_matching = None
    try:
        if s.kind == FEASIBILITY:
            m = s.canonical_first(None)
            return done(OPTIMAL, m) if m is not None else done(UNSAT)
        # the first pass only accepts strict improvements, so nudge the inclusive upper bound
        s.branch_and_bound(None if upper is None else upper + 0.5, lower)
        if s.best_matching is None:
            return done(UNSAT)
        m = s.canonical_first(s.best_value)
        return done(OPTIMAL, m, _value(s, p, m))
    except _Budget:
        m = s.best_matching
        return done(BUDGET_EXCEEDED, m, None if m is None else _value(s, p, m))


def _value(s: _Search, p: SearchProblem, m: Matching) -> float:
    inst = p.instance
    if s.kind == MINIMIZE_BLOCKING:
        from .analysis import count_blocking

        return count_blocking(inst, m)
    total = 0
    for a, b in enumerate(m.partner):
        r = inst.rank(a, b) if b is not None else len(inst.prefs[a]) + 1
        total += s.weights[a][r]
    return total
