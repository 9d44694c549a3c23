"""World entities: grid map, stations, tasks, agents, and their lifecycle rules.

All other modules operate on the types defined here. Mutation is single
threaded: the simulation loop owns the WorldState and everything else reads
snapshots.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

Cell = tuple[int, int]  # (x, y), x = column, y = row


class SimulationError(Exception):
    """Base class for all simulator faults."""


class ConfigError(SimulationError):
    """Invalid scenario / world configuration."""


class TransitionError(SimulationError):
    """Illegal task lifecycle transition; indicates a logic fault."""


class TaskState(enum.Enum):
    QUEUED = "queued"
    ASSIGNED = "assigned"
    PICKED_UP = "picked_up"
    DELIVERED = "delivered"


# Legal lifecycle edges. Picking up is irreversible; an assigned task may be
# returned to the queue by a reallocation before pickup.
_LEGAL_TRANSITIONS = {
    (TaskState.QUEUED, TaskState.ASSIGNED),
    (TaskState.ASSIGNED, TaskState.QUEUED),
    (TaskState.ASSIGNED, TaskState.PICKED_UP),
    (TaskState.PICKED_UP, TaskState.DELIVERED),
}


@dataclass
class GridMap:
    """Static occupancy grid with a derived per-cell risk layer.

    ``occupied`` and ``risk`` are (height, width) arrays indexed ``[y, x]``.
    The risk layer is zero until :func:`qdispatch.planner.build_risk_layer`
    fills it in.
    """

    width: int
    height: int
    occupied: np.ndarray
    risk: np.ndarray
    # planner memo: start cell -> (distance field, parent field); never part
    # of equality or serialization
    _plan_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def empty(cls, width: int, height: int) -> "GridMap":
        return cls(
            width=width,
            height=height,
            occupied=np.zeros((height, width), dtype=bool),
            risk=np.zeros((height, width), dtype=float),
        )

    @classmethod
    def from_text(cls, text: str) -> "GridMap":
        """Parse a plain-text grid: '#' occupied, '.' free, one row per line."""
        rows = [line for line in text.splitlines() if line.strip()]
        if not rows:
            raise ConfigError("empty map text")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ConfigError("ragged map: all rows must have equal length")
        bad = sorted({ch for r in rows for ch in r} - {"#", "."})
        if bad:
            raise ConfigError(f"unknown map characters: {bad}")
        occ = np.array([[ch == "#" for ch in r] for r in rows], dtype=bool)
        return cls(width=width, height=len(rows), occupied=occ,
                   risk=np.zeros_like(occ, dtype=float))

    def to_text(self) -> str:
        return "\n".join(
            "".join("#" if self.occupied[y, x] else "." for x in range(self.width))
            for y in range(self.height)
        )

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def is_free(self, cell: Cell) -> bool:
        x, y = cell
        return self.in_bounds(cell) and not self.occupied[y, x]

    def risk_at(self, cell: Cell) -> float:
        x, y = cell
        return float(self.risk[y, x])


@dataclass
class Station:
    """A picking station holding a FIFO-ordered queue of task ids."""

    id: int
    location: Cell
    queue: list[int] = field(default_factory=list)
    arrival_prob: float = 0.0
    capacity: int = 1  # max agents concurrently assigned to this queue

    def __post_init__(self):
        if self.capacity < 1:
            raise ConfigError(f"station {self.id}: capacity must be >= 1")
        if not 0.0 <= self.arrival_prob <= 1.0:
            raise ConfigError(f"station {self.id}: arrival_prob not in [0,1]")


@dataclass
class Task:
    id: int
    station: int
    pickup: Cell
    dropoff: Cell
    arrival_time: int
    state: TaskState = TaskState.QUEUED
    completion_time: int | None = None


@dataclass
class Agent:
    id: int
    position: Cell
    home: Cell
    speed: int = 2  # cells advanced per tick along the planned path
    assigned_task: int | None = None
    carrying: bool = False
    current_path: list[Cell] | None = None
    # behavior-tree flags for the task in progress
    item_picked_up: bool = False
    item_delivered: bool = False


@dataclass
class WorldState:
    map: GridMap
    stations: list[Station]
    agents: list[Agent]
    tasks: dict[int, Task] = field(default_factory=dict)
    clock: int = 0
    _next_task_id: int = 0

    def station_by_id(self, station_id: int) -> Station:
        for st in self.stations:
            if st.id == station_id:
                return st
        raise ConfigError(f"unknown station id {station_id}")

    def agent_by_id(self, agent_id: int) -> Agent:
        for ag in self.agents:
            if ag.id == agent_id:
                return ag
        raise ConfigError(f"unknown agent id {agent_id}")

    def agent_for_task(self, task_id: int) -> Agent | None:
        for ag in self.agents:
            if ag.assigned_task == task_id:
                return ag
        return None

    def open_tasks(self) -> list[Task]:
        """Tasks available for (re)allocation: queued or assigned, not picked up."""
        return [t for t in sorted(self.tasks.values(), key=lambda t: t.id)
                if t.state in (TaskState.QUEUED, TaskState.ASSIGNED)]

    def active_task_count(self) -> int:
        """Number of not-yet-delivered tasks (the global-cap quantity)."""
        return sum(1 for t in self.tasks.values() if t.state is not TaskState.DELIVERED)

    def counts_by_state(self) -> dict[TaskState, int]:
        counts = {s: 0 for s in TaskState}
        for t in self.tasks.values():
            counts[t.state] += 1
        return counts


def spawn_task(world: WorldState, station_id: int, dropoff: Cell) -> int:
    """Create a queued task at a station; returns the fresh task id."""
    station = world.station_by_id(station_id)
    if not world.map.is_free(dropoff):
        raise ConfigError(f"drop-off cell {dropoff} is occupied or out of bounds")
    task_id = world._next_task_id
    world._next_task_id += 1
    task = Task(
        id=task_id,
        station=station_id,
        pickup=station.location,
        dropoff=dropoff,
        arrival_time=world.clock,
    )
    world.tasks[task_id] = task
    station.queue.append(task_id)
    return task_id


def transition_task(world: WorldState, task_id: int, new_state: TaskState) -> None:
    """Advance a task along its lifecycle, keeping queue/assignment structures in sync."""
    task = world.tasks.get(task_id)
    if task is None:
        raise TransitionError(f"unknown task id {task_id}")
    if (task.state, new_state) not in _LEGAL_TRANSITIONS:
        raise TransitionError(
            f"task {task_id}: illegal transition {task.state.value} -> {new_state.value}"
        )

    old = task.state
    task.state = new_state

    if new_state is TaskState.QUEUED:
        # returned to queue by reallocation: free the agent that held it
        agent = world.agent_for_task(task_id)
        if agent is not None:
            agent.assigned_task = None
            agent.current_path = None
    elif new_state is TaskState.PICKED_UP:
        # leaves the waiting queue at pickup, not at assignment
        station = world.station_by_id(task.station)
        if task_id in station.queue:
            station.queue.remove(task_id)
    elif new_state is TaskState.DELIVERED:
        task.completion_time = world.clock
        station = world.station_by_id(task.station)
        if task_id in station.queue:  # defensive: gone since pickup
            station.queue.remove(task_id)
        agent = world.agent_for_task(task_id)
        if agent is not None:
            agent.assigned_task = None
            agent.carrying = False
            agent.current_path = None
    del old


def queue_length(world: WorldState, station_id: int) -> int:
    """Number of waiting tasks at a station: queued or assigned, not yet picked up."""
    station = world.station_by_id(station_id)
    return len(station.queue)


def check_world_invariants(world: WorldState) -> None:
    """Cheap structural consistency checks; raises SimulationError on violation."""
    seen_assignees: set[int] = set()
    for ag in world.agents:
        if ag.assigned_task is not None:
            if ag.assigned_task in seen_assignees:
                raise SimulationError(f"task {ag.assigned_task} held by two agents")
            seen_assignees.add(ag.assigned_task)
            task = world.tasks.get(ag.assigned_task)
            if task is None:
                raise SimulationError(f"agent {ag.id} holds unknown task")
            if ag.carrying and task.state is not TaskState.PICKED_UP:
                raise SimulationError(f"agent {ag.id} carrying a non-picked-up task")
    for st in world.stations:
        for tid in st.queue:
            task = world.tasks.get(tid)
            if task is None or task.station != st.id:
                raise SimulationError(f"queue of station {st.id} holds foreign task {tid}")
            if task.state not in (TaskState.QUEUED, TaskState.ASSIGNED):
                raise SimulationError(
                    f"queue of station {st.id} holds task {tid} in state {task.state.value}"
                )
