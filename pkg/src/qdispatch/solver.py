"""Exact solver for the constrained assignment stage of the auction.

Edge costs are converted to strictly positive profits by an order-reversing
shift (profit = B - cost with B one unit above the dearest edge), then the
binary program is solved exactly: maximize the number of assigned pairs
first and total profit among max-cardinality solutions second, subject to

  * each agent takes at most one task,
  * each task goes to at most one agent,
  * at most m_i assigned tasks per station i (locked tasks carry no station).

Cardinality is optimized explicitly rather than through the size of B: a
constant shift alone cannot dominate cardinality on sparse instances where
one lucrative edge competes with two modest ones.

All arithmetic is integer fixed-point (costs rounded to 1e-6) so optimality
comparisons against the brute-force oracle are exact. Ties are broken by the
lexicographically smallest set of (agent, task) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bidding import EdgeCost

SCALE = 10**6  # fixed-point resolution: one cost unit = SCALE profit units

ORACLE_MAX_AGENTS = 5
ORACLE_MAX_TASKS = 8


@dataclass(frozen=True)
class ProblemEdge:
    agent: int
    task: int
    profit: int  # integer, in SCALE units, always >= SCALE > 0
    cost: float = 0.0  # original edge cost, for reporting only


@dataclass
class AssignmentProblem:
    agents: list[int]
    tasks: list[tuple[int, int | None]]  # (task id, station id or None)
    edges: list[ProblemEdge]
    queue_caps: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.agents = sorted(self.agents)
        self.tasks = sorted(self.tasks, key=lambda t: t[0])
        self.edges = sorted(self.edges, key=lambda e: (e.agent, e.task))
        seen = set()
        stations = dict(self.tasks)
        agent_set = set(self.agents)
        for e in self.edges:
            if (e.agent, e.task) in seen:
                raise ValueError(f"duplicate edge ({e.agent}, {e.task})")
            seen.add((e.agent, e.task))
            if e.profit <= 0:
                raise ValueError(f"non-positive profit on edge ({e.agent}, {e.task})")
            if e.agent not in agent_set:
                raise ValueError(f"edge references unknown agent {e.agent}")
            if e.task not in stations:
                raise ValueError(f"edge references unknown task {e.task}")
        for st, cap in self.queue_caps.items():
            if cap < 1:
                raise ValueError(f"station {st}: cap must be >= 1")

    def station_of(self, task: int) -> int | None:
        return dict(self.tasks)[task]


@dataclass(frozen=True)
class Assignment:
    pairs: tuple[tuple[int, int], ...]  # sorted (agent, task)
    objective: int  # total profit, SCALE units
    total_cost: float  # sum of original edge costs over chosen pairs


def to_profits(edges: list[EdgeCost]) -> list[tuple[int, int, int]]:
    """Order-reversing cost -> profit conversion.

    profit = B - cost with B = 1 + max cost (in cost units), computed in
    integer fixed-point, so cheaper edges get strictly larger profits and
    every profit is at least one full cost unit.
    """
    if not edges:
        return []
    scaled = [(e.agent, e.task, round(e.C * SCALE)) for e in edges]
    base = SCALE + max(c for _, _, c in scaled)
    return [(a, t, base - c) for a, t, c in scaled]


def build_problem(edges: list[EdgeCost], queue_caps: dict[int, int]) -> AssignmentProblem:
    """Assemble an AssignmentProblem from raw edge costs."""
    profits = {(a, t): p for a, t, p in to_profits(edges)}
    agents = sorted({e.agent for e in edges})
    tasks = sorted({(e.task, e.station) for e in edges}, key=lambda t: t[0])
    task_ids = [t for t, _ in tasks]
    if len(set(task_ids)) != len(task_ids):
        raise ValueError("task listed with two different stations")
    return AssignmentProblem(
        agents=agents,
        tasks=tasks,
        edges=[ProblemEdge(e.agent, e.task, profits[(e.agent, e.task)], e.C)
               for e in edges],
        queue_caps=dict(queue_caps),
    )


def _feasible(pairs, problem: AssignmentProblem) -> bool:
    agents = [a for a, _ in pairs]
    tasks = [t for _, t in pairs]
    if len(set(agents)) != len(agents) or len(set(tasks)) != len(tasks):
        return False
    per_station: dict[int, int] = {}
    stations = dict(problem.tasks)
    for _, t in pairs:
        st = stations[t]
        if st is None:
            continue
        per_station[st] = per_station.get(st, 0) + 1
        if per_station[st] > problem.queue_caps.get(st, 1):
            return False
    return True


def check_assignment(problem: AssignmentProblem, assignment: Assignment) -> None:
    """Assert the three constraint families on a solver output."""
    if not _feasible(assignment.pairs, problem):
        raise AssertionError(f"infeasible assignment {assignment.pairs}")


def _finish(problem: AssignmentProblem, pairs: tuple[tuple[int, int], ...]) -> Assignment:
    profit_of = {(e.agent, e.task): e.profit for e in problem.edges}
    cost_of = {(e.agent, e.task): e.cost for e in problem.edges}
    return Assignment(
        pairs=tuple(sorted(pairs)),
        objective=sum(profit_of[p] for p in pairs),
        total_cost=sum(cost_of[p] for p in pairs),
    )


def solve(problem: AssignmentProblem,
          prefer: frozenset[tuple[int, int]] = frozenset()) -> Assignment:
    """Exact branch-and-bound over the binary assignment variables.

    Agents are branched in id order, each trying its edges in ascending task
    order and finally the unassigned option; strictly-better updates make the
    first optimum found the lexicographically smallest pair set. The bound
    adds each remaining agent's best edge profit plus the cardinality boost,
    which dominates any true completion.

    ``prefer`` marks incumbent (agent, task) pairs: among optima of equal
    cardinality and profit, assignments keeping more incumbents win, which
    stops zero-gain reshuffles from bouncing agents between symmetric
    targets. With no preferences the tie-break is purely lexicographic.
    """
    # three-tier integer objective: cardinality >> profit >> incumbency
    unit = len(prefer) + 1
    by_agent: dict[int, list[tuple[int, int]]] = {a: [] for a in problem.agents}
    for e in problem.edges:
        bonus = 1 if (e.agent, e.task) in prefer else 0
        by_agent[e.agent].append((e.task, e.profit * unit + bonus))
    for lst in by_agent.values():
        lst.sort()
    stations = dict(problem.tasks)

    # fold cardinality in as well: any extra assigned pair outweighs every
    # possible profit reshuffle
    boost = 1 + sum(w for options in by_agent.values() for _, w in options)
    agents = problem.agents
    best_weight = -1
    best_pairs: tuple[tuple[int, int], ...] = ()

    suffix_best = [0] * (len(agents) + 1)
    for i in range(len(agents) - 1, -1, -1):
        options = by_agent[agents[i]]
        top = max((p for _, p in options), default=0)
        suffix_best[i] = suffix_best[i + 1] + (boost + top if options else 0)

    used_tasks: set[int] = set()
    cap_left = dict(problem.queue_caps)
    chosen: list[tuple[int, int]] = []

    def dfs(i: int, weight: int) -> None:
        nonlocal best_weight, best_pairs
        if weight + suffix_best[i] <= best_weight:
            return
        if i == len(agents):
            if weight > best_weight:
                best_weight = weight
                best_pairs = tuple(chosen)
            return
        agent = agents[i]
        for task, profit in by_agent[agent]:
            if task in used_tasks:
                continue
            st = stations[task]
            if st is not None:
                if cap_left.get(st, 1) <= 0:
                    continue
                cap_left[st] = cap_left.get(st, 1) - 1
            used_tasks.add(task)
            chosen.append((agent, task))
            dfs(i + 1, weight + boost + profit)
            chosen.pop()
            used_tasks.remove(task)
            if st is not None:
                cap_left[st] += 1
        dfs(i + 1, weight)  # leave this agent unassigned

    dfs(0, 0)
    return _finish(problem, best_pairs)


def brute_force_oracle(problem: AssignmentProblem,
                       prefer: frozenset[tuple[int, int]] = frozenset()) -> Assignment:
    """Ground truth by exhaustive enumeration of every feasible pair set.

    Guarded to oracle scale; collects all optima under the same
    (cardinality, profit, incumbency) order as solve and picks the smallest
    pair set explicitly, independent of enumeration order.
    """
    if len(problem.agents) > ORACLE_MAX_AGENTS or len(problem.tasks) > ORACLE_MAX_TASKS:
        raise ValueError(
            f"oracle guard exceeded: {len(problem.agents)} agents, "
            f"{len(problem.tasks)} tasks"
        )
    profit_of = {(e.agent, e.task): e.profit for e in problem.edges}
    by_agent: dict[int, list[int]] = {a: [] for a in problem.agents}
    for e in problem.edges:
        by_agent[e.agent].append(e.task)

    all_sets: list[list[tuple[int, int]]] = [[]]
    for agent in problem.agents:
        extended = []
        for pairs in all_sets:
            extended.append(pairs)  # agent unassigned
            taken = {t for _, t in pairs}
            for task in by_agent[agent]:
                if task not in taken:
                    extended.append(pairs + [(agent, task)])
        all_sets = extended

    best: tuple[tuple[int, int, int], tuple] | None = None
    for pairs in all_sets:
        if not _feasible(pairs, problem):
            continue
        key = (len(pairs), sum(profit_of[p] for p in pairs),
               sum(1 for p in pairs if p in prefer))
        srt = tuple(sorted(pairs))
        if best is None or key > best[0] or (key == best[0] and srt < best[1]):
            best = (key, srt)

    assert best is not None  # the empty set is always feasible
    return _finish(problem, best[1])


def max_cardinality(problem: AssignmentProblem) -> int:
    """Maximum feasible assignment size via unit-capacity flow.

    Network: source -> agent (cap 1) -> task (per edge) -> station (cap m_i)
    -> sink; station-less tasks connect straight to the sink with cap 1.
    """
    nid = 2  # 0 = source, 1 = sink
    agent_node = {}
    for a in problem.agents:
        agent_node[a] = nid
        nid += 1
    task_node = {}
    for t, _ in problem.tasks:
        task_node[t] = nid
        nid += 1
    station_node = {}
    for st in sorted({s for _, s in problem.tasks if s is not None}):
        station_node[st] = nid
        nid += 1

    cap: dict[tuple[int, int], int] = {}
    adj: dict[int, list[int]] = {}

    def add(u: int, v: int, c: int) -> None:
        cap[(u, v)] = cap.get((u, v), 0) + c
        cap.setdefault((v, u), 0)
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)

    for a in problem.agents:
        add(0, agent_node[a], 1)
    for e in problem.edges:
        add(agent_node[e.agent], task_node[e.task], 1)
    for t, st in problem.tasks:
        if st is None:
            add(task_node[t], 1, 1)
        else:
            add(task_node[t], station_node[st], 1)
    for st, node in station_node.items():
        add(node, 1, problem.queue_caps.get(st, 1))

    flow = 0
    while True:
        prev = {0: 0}
        queue = [0]
        while queue and 1 not in prev:
            u = queue.pop(0)
            for v in adj.get(u, []):
                if v not in prev and cap.get((u, v), 0) > 0:
                    prev[v] = u
                    queue.append(v)
        if 1 not in prev:
            return flow
        v = 1
        while v != 0:
            u = prev[v]
            cap[(u, v)] -= 1
            cap[(v, u)] += 1
            v = u
        flow += 1


def serialize_instance(problem: AssignmentProblem) -> str:
    """Line-oriented text form: cap directives then one edge per line."""
    lines = ["# qdispatch assignment instance", "# cap <station> <m>"]
    for st in sorted(problem.queue_caps):
        lines.append(f"cap {st} {problem.queue_caps[st]}")
    lines.append("# agent task station cost")
    stations = dict(problem.tasks)
    for e in problem.edges:
        st = stations[e.task]
        st_txt = "-" if st is None else str(st)
        lines.append(f"{e.agent} {e.task} {st_txt} {e.cost:.6f}")
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> AssignmentProblem:
    """Parse the serialize_instance format into a ready-to-solve problem."""
    caps: dict[int, int] = {}
    raw: list[EdgeCost] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "cap":
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: cap directive needs station and m")
            caps[int(parts[1])] = int(parts[2])
            continue
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 'agent task station cost'")
        agent, task = int(parts[0]), int(parts[1])
        station = None if parts[2] == "-" else int(parts[2])
        cost = float(parts[3])
        raw.append(EdgeCost(agent=agent, task=task, c=cost, penalty=0.0, station=station))
    return build_problem(raw, caps)
