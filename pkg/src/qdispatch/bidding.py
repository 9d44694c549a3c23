"""Bid computation and edge-cost assembly for the auction.

An agent's bid for a task is the planned travel cost of completing it:
agent -> pickup plus pickup -> drop-off, zeroed by the lock factor once the
agent is already carrying that task's item.

The full edge cost combines the bid with the queue-length and waiting-time
penalties of the task's station. The penalties price the cost of leaving
work unserved, so they enter with negative sign: a task from a long queue,
or one that has waited long, makes a cheaper (more attractive) edge. With
both weights at zero the edge cost reduces to the pure path cost.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import planner
from .model import Agent, GridMap, Station, Task, TaskState, WorldState


@dataclass(frozen=True)
class PenaltyParams:
    q: float = 10000.0  # queue-length weight
    tau: float = 100.0  # waiting-time weight
    tau_mode: str = "elapsed_time"  # or "total_count"

    def __post_init__(self):
        if self.q < 0 or self.tau < 0:
            raise ValueError("penalty weights must be non-negative")
        if self.tau_mode not in ("elapsed_time", "total_count"):
            raise ValueError(f"unknown tau_mode {self.tau_mode!r}")


@dataclass(frozen=True)
class Bid:
    agent: int
    task: int
    c: float  # path-based completion cost, grid-distance units
    lock_factor: int  # 0 iff the agent is carrying this task's item, else 1


@dataclass(frozen=True)
class EdgeCost:
    agent: int
    task: int
    c: float  # bid component
    penalty: float  # q*|queue| + tau*wait of the task
    station: int | None  # capacity group; None for picked-up (locked) tasks

    @property
    def C(self) -> float:
        """Net edge cost: bid minus service-priority credit."""
        return self.c - self.penalty


def compute_bid(agent: Agent, task: Task, grid: GridMap) -> Bid | None:
    """Path-cost bid for one (agent, task) pair; None when unreachable."""
    if agent.carrying and agent.assigned_task == task.id:
        return Bid(agent=agent.id, task=task.id, c=0.0, lock_factor=0)
    leg1 = planner.reachable_cost(grid, agent.position, task.pickup)
    if leg1 is None:
        return None
    leg2 = planner.reachable_cost(grid, task.pickup, task.dropoff)
    if leg2 is None:
        return None
    return Bid(agent=agent.id, task=task.id, c=leg1 + leg2, lock_factor=1)


def queue_penalty(station: Station, params: PenaltyParams) -> float:
    """q times the station's current queue length (queued + assigned tasks)."""
    return params.q * len(station.queue)


def waiting_penalty(task: Task, clock: int, params: PenaltyParams,
                    total_tasks: int | None = None) -> float:
    """tau times the task's waiting duration in ticks.

    With tau_mode="total_count" the literal task-count form tau * |T| is used
    instead; it is identical for every task, so it cannot prioritize older
    work, and is kept only as a runnable alternative.
    """
    if task.state is TaskState.DELIVERED:
        raise ValueError(f"task {task.id} already delivered")
    if params.tau_mode == "total_count":
        if total_tasks is None:
            raise ValueError("total_count mode requires total_tasks")
        return params.tau * total_tasks
    return params.tau * (clock - task.arrival_time)


def assemble_edges(world: WorldState, params: PenaltyParams) -> list[EdgeCost]:
    """One edge per eligible (agent, task) pair, sorted by (agent, task).

    Free agents bid on every open (queued or assigned) task they can reach.
    An agent carrying an item emits exactly one zero-bid edge to its own
    picked-up task; that task is out of its station's queue, so the edge
    carries no capacity group.
    """
    open_tasks = world.open_tasks()
    total = len(open_tasks) + sum(1 for a in world.agents if a.carrying)
    q_by_station = {st.id: queue_penalty(st, params) for st in world.stations}

    edges: list[EdgeCost] = []
    for agent in sorted(world.agents, key=lambda a: a.id):
        if agent.carrying:
            task = world.tasks[agent.assigned_task]
            wait = waiting_penalty(task, world.clock, params, total_tasks=total)
            edges.append(EdgeCost(agent=agent.id, task=task.id, c=0.0,
                                  penalty=q_by_station[task.station] + wait,
                                  station=None))
            continue
        for task in open_tasks:
            bid = compute_bid(agent, task, world.map)
            if bid is None:
                continue
            wait = waiting_penalty(task, world.clock, params, total_tasks=total)
            edges.append(EdgeCost(agent=agent.id, task=task.id, c=bid.c,
                                  penalty=q_by_station[task.station] + wait,
                                  station=task.station))
    edges.sort(key=lambda e: (e.agent, e.task))
    return edges
