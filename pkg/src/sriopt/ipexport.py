"""The stable-matching integer program and an LP-format writer.

Variables are x_u_v for every ordered acceptable pair (both directions are
kept and tied by a symmetry row), plus b_u_v per unordered pair in
almost-stable mode.  Rows:

* capacity:  sum over u in N(v) of x_u_v <= 1, for each agent with a list;
* stability: for each pair {u,v}, x over u's partners better than v, plus
  x over v's partners better than u, plus x_u_v (plus b_u_v) >= 1;
* symmetry:  x_u_v - x_v_u = 0.

Unacceptable pairs simply have no variable.  An objective over ordered
pairs already counts each agent once (the pair {u,v} contributes
rank(u,v) + rank(v,u)), so the egalitarian objective is the cost as is.

Names in exported files are 1-based.  The 0/1 enumerator at the bottom only
reads the generic rows, so a deliberately broken model is judged on what it
actually says.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

from .errors import BudgetExceededError, ValidationError
from .model import Instance, Matching
from .oracle import DEFAULT_NODE_LIMIT, enumerate_stable

EGALITARIAN = "egalitarian"
FC = "fc"
LEVEL = "level"
ALMOST_STABLE = "almost-stable"
NONE = "none"
OBJECTIVES = (EGALITARIAN, FC, LEVEL, ALMOST_STABLE, NONE)

LE, GE, EQ = "<=", ">=", "="


@dataclass(frozen=True)
class Constraint:
    name: str
    family: str
    terms: tuple[tuple[str, int], ...]
    sense: str
    rhs: int


@dataclass
class IpModel:
    n: int
    sense: str = "minimize"
    objective: list = field(default_factory=list)  # (var, coef)
    variables: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    x: dict = field(default_factory=dict)  # (u, v) -> name
    b: dict = field(default_factory=dict)  # (u, v) with u < v -> name

    def add(self, name: str, family: str, terms, sense: str, rhs: int) -> None:
        self.constraints.append(Constraint(name, family, tuple(terms), sense, rhs))

    def families(self) -> dict:
        out: dict = {}
        for c in self.constraints:
            out[c.family] = out.get(c.family, 0) + 1
        return out


def _xname(u: int, v: int) -> str:
    return f"x_{u + 1}_{v + 1}"


def build_ip(
    inst: Instance,
    objective: str = NONE,
    level: Optional[int] = None,
    sense: Optional[str] = None,
    profile_floor: Mapping[int, int] = None,
    profile_ceiling: Mapping[int, int] = None,
    drop_stability: bool = False,
) -> IpModel:
    """Build the model.

    ``level`` objectives take a rank ``level`` and ``sense`` ("maximize" for
    rank-maximal steps, "minimize" for generous ones).  Floors and ceilings
    add the per-rank rows used by the lexicographic iterations.
    ``drop_stability`` omits the stability rows; it exists to test the tests.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown IP objective {objective!r}")
    if objective == LEVEL and (level is None or level < 1):
        raise ValueError("level objective needs a level >= 1")
    m = IpModel(inst.n)
    for u, lst in enumerate(inst.prefs):
        for v in sorted(lst):
            m.x[(u, v)] = _xname(u, v)
    m.variables = list(m.x.values())
    edges = inst.edges()
    if objective == ALMOST_STABLE:
        for u, v in edges:
            m.b[(u, v)] = f"b_{u + 1}_{v + 1}"
        m.variables += list(m.b.values())

    for v in range(inst.n):
        if inst.prefs[v]:
            m.add(f"cap_{v + 1}", "capacity", [(m.x[(u, v)], 1) for u in sorted(inst.prefs[v])], LE, 1)
    if not drop_stability:
        for u, v in edges:
            terms = [(m.x[(u, i)], 1) for i in inst.prefs[u][: inst.rank(u, v) - 1]]
            terms += [(m.x[(v, j)], 1) for j in inst.prefs[v][: inst.rank(v, u) - 1]]
            terms.append((m.x[(u, v)], 1))
            if m.b:
                terms.append((m.b[(u, v)], 1))
            m.add(f"stab_{u + 1}_{v + 1}", "stability", terms, GE, 1)
    for u, v in edges:
        m.add(f"sym_{u + 1}_{v + 1}", "symmetry", [(m.x[(u, v)], 1), (m.x[(v, u)], -1)], EQ, 0)

    def delta(r):
        return [(name, 1) for (u, v), name in m.x.items() if inst.rank(u, v) == r]

    for r, y in sorted((profile_floor or {}).items()):
        m.add(f"floor_{r}", "profile", delta(r), GE, y)
    for r, y in sorted((profile_ceiling or {}).items()):
        m.add(f"ceil_{r}", "profile", delta(r), LE, y)

    if objective == EGALITARIAN:
        m.sense, m.objective = "minimize", [(name, inst.rank(u, v)) for (u, v), name in m.x.items()]
    elif objective == FC:
        m.sense, m.objective = "maximize", delta(1)
    elif objective == LEVEL:
        m.sense, m.objective = sense or "maximize", delta(level)
    elif objective == ALMOST_STABLE:
        m.sense, m.objective = "minimize", [(name, 1) for name in m.b.values()]
    if m.sense not in ("minimize", "maximize"):
        raise ValueError(f"sense must be 'minimize' or 'maximize', got {m.sense!r}")
    return m


# -- LP format ----------------------------------------------------------------

_WIDTH = 78


def _expr(terms) -> list[str]:
    out = []
    for i, (name, coef) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = name if mag == 1 else f"{mag} {name}"
        out.append(body if i == 0 and sign == "+" else f"{sign} {body}")
    return out


def _wrap(head: str, tokens: list[str], tail: str = "") -> list[str]:
    lines, cur = [], head
    for tok in tokens + ([tail] if tail else []):
        if len(cur) + 1 + len(tok) > _WIDTH and cur.strip():
            lines.append(cur)
            cur = "   " + tok
        else:
            cur = f"{cur} {tok}" if cur else tok
    lines.append(cur)
    return lines


def export_lp(m: IpModel) -> str:
    out = [f"\\ stable roommates model, {m.n} agents", "Minimize" if m.sense == "minimize" else "Maximize"]
    out += _wrap(" obj:", _expr(m.objective))
    out.append("Subject To")
    for c in m.constraints:
        # a row with no terms still needs a left-hand side
        lhs = _expr(c.terms) or [f"0 {m.variables[0]}" if m.variables else "0"]
        out += _wrap(f" {c.name}:", lhs, f"{c.sense} {c.rhs}")
    out.append("Binary")
    out += _wrap("", m.variables) if m.variables else []
    out.append("End")
    return "\n".join(out) + "\n"


# -- 0/1 enumeration ----------------------------------------------------------


def feasible_assignments(m: IpModel, node_limit: int = DEFAULT_NODE_LIMIT) -> Iterator[dict]:
    """Every 0/1 point satisfying the model's rows.

    Backtracking over the variables in order; after each choice, any row
    whose slack is used up forces its free variables, and a row whose
    bounds can no longer reach its right-hand side fails the branch.
    """
    index = {v: i for i, v in enumerate(m.variables)}
    rows = [([(index[v], c) for v, c in con.terms], con.sense, con.rhs) for con in m.constraints]
    watch: list[list[int]] = [[] for _ in m.variables]
    for k, (terms, _, _) in enumerate(rows):
        for i, _ in terms:
            watch[i].append(k)
    val: list = [None] * len(m.variables)
    trail: list[int] = []
    nodes = [0]

    def fix(i: int, x: int, queue: list) -> None:
        val[i] = x
        trail.append(i)
        queue.extend(watch[i])

    def propagate(queue: list) -> bool:
        while queue:
            terms, sense, rhs = rows[queue.pop()]
            lo = hi = 0
            for i, c in terms:
                x = val[i]
                if x is None:
                    if c > 0:
                        hi += c
                    else:
                        lo += c
                else:
                    lo += c * x
                    hi += c * x
            if (sense != GE and lo > rhs) or (sense != LE and hi < rhs):
                return False
            for i, c in terms:
                if val[i] is not None:
                    continue
                # setting i the "raising" way adds |c| to lo; the other way takes |c| off hi
                if sense != GE and lo + abs(c) > rhs:
                    fix(i, 0 if c > 0 else 1, queue)
                elif sense != LE and hi - abs(c) < rhs:
                    fix(i, 1 if c > 0 else 0, queue)
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            val[trail.pop()] = None

    def rec(i: int):
        while i < len(val) and val[i] is not None:
            i += 1
        if i == len(val):
            yield {v: val[j] for j, v in enumerate(m.variables)}
            return
        for x in (0, 1):
            nodes[0] += 1
            if nodes[0] > node_limit:
                raise BudgetExceededError(f"0/1 enumeration exceeded {node_limit} nodes", nodes[0])
            mark = len(trail)
            queue: list = []
            fix(i, x, queue)
            if propagate(queue):
                yield from rec(i + 1)
            undo(mark)

    if propagate(list(range(len(rows)))):
        yield from rec(0)


def induced_matching(m: IpModel, point: Mapping[str, int]) -> Optional[Matching]:
    """The matching an assignment describes, or None if its x values are not a matching."""
    partner: list = [None] * m.n
    for (u, v), name in m.x.items():
        if point[name]:
            if partner[u] is not None:
                return None
            partner[u] = v
    try:
        return Matching(tuple(partner))
    except ValidationError:
        return None


def objective_value(m: IpModel, point: Mapping[str, int]) -> int:
    return sum(c * point[v] for v, c in m.objective)


def feasible_set_equals_stable_set(inst: Instance, model: Optional[IpModel] = None, node_limit: int = DEFAULT_NODE_LIMIT) -> bool:
    m = model if model is not None else build_ip(inst)
    seen = []
    for point in feasible_assignments(m, node_limit):
        mt = induced_matching(m, point)
        if mt is None:
            return False
        seen.append(mt)
    stable = enumerate_stable(inst, node_limit)
    return len(seen) == len(set(seen)) and set(seen) == set(stable)
