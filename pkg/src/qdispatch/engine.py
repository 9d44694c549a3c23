"""Discrete-time reactive simulation loop.

Each tick: (1) stochastic task arrivals under the global cap, (2) a re-auction
when anything changed (new task, or an agent finished a delivery since the
last auction), (3) one behavior-tree tick per agent, which moves agents and
fires pickup/delivery transitions.

Everything is deterministic given the scenario seed: per-station RNG streams
are derived from the master seed with fixed spawn keys, and all iteration
orders are pinned.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
import yaml

from . import bt, planner
from .bidding import PenaltyParams, assemble_edges
from .model import (
    Agent,
    Cell,
    ConfigError,
    GridMap,
    SimulationError,
    Station,
    TaskState,
    WorldState,
    check_world_invariants,
    queue_length,
    spawn_task,
    transition_task,
)
from .solver import Assignment, build_problem, solve

# event kinds
TASK_SPAWNED = "task_spawned"
AUCTION_RUN = "auction_run"
TASK_ASSIGNED = "task_assigned"
TASK_REASSIGNED = "task_reassigned"
TASK_PICKED_UP = "task_picked_up"
TASK_DELIVERED = "task_delivered"
AGENT_IDLE = "agent_idle"


@dataclass(frozen=True)
class SimEvent:
    time: int
    kind: str
    payload: dict

    def to_json(self) -> str:
        record = {"t": self.time, "kind": self.kind}
        record.update(self.payload)
        return json.dumps(record, sort_keys=True, separators=(",", ":"))


@dataclass
class SimTrace:
    """Complete record of one run: audit log plus live per-tick queue samples."""

    config: dict
    station_ids: list[int]
    horizon: int
    events: list[SimEvent]
    live_queue_samples: list[list[int]]
    summary: dict


@dataclass
class StationSpec:
    location: Cell
    arrival_prob: float = 0.0
    initial_tasks: int = 0
    capacity: int = 1


@dataclass
class AgentSpec:
    home: Cell
    speed: int = 2


@dataclass
class ScenarioConfig:
    name: str
    map_text: str
    stations: list[StationSpec]
    dropoffs: list[Cell]
    agents: list[AgentSpec]
    q: float = 10000.0
    tau: float = 100.0
    tau_mode: str = "elapsed_time"
    task_cap: int = 40
    horizon: int = 3000
    seed: int = 0
    inflation_radius: int = 2
    risk_weight: float = 0.5

    def build_map(self) -> GridMap:
        grid = GridMap.from_text(self.map_text)
        return planner.build_risk_layer(grid, self.inflation_radius, self.risk_weight)

    def validate(self) -> None:
        if self.horizon <= 0:
            raise ConfigError("horizon must be > 0")
        if self.task_cap < 0:
            raise ConfigError("task_cap must be >= 0")
        if not self.stations:
            raise ConfigError("at least one station required")
        if not self.dropoffs:
            raise ConfigError("at least one drop-off cell required")
        if not self.agents:
            raise ConfigError("at least one agent required")
        try:
            PenaltyParams(q=self.q, tau=self.tau, tau_mode=self.tau_mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        grid = self.build_map()
        for spec in self.stations:
            if not 0.0 <= spec.arrival_prob <= 1.0:
                raise ConfigError(f"arrival_prob {spec.arrival_prob} not in [0,1]")
            if spec.initial_tasks < 0:
                raise ConfigError("initial_tasks must be >= 0")
            if spec.capacity < 1:
                raise ConfigError("station capacity must be >= 1")
            if not grid.is_free(tuple(spec.location)):
                raise ConfigError(f"station cell {spec.location} is occupied")
        for cell in self.dropoffs:
            if not grid.is_free(tuple(cell)):
                raise ConfigError(f"drop-off cell {cell} is occupied")
        for spec in self.agents:
            if spec.speed < 1:
                raise ConfigError("agent speed must be >= 1")
            if not grid.is_free(tuple(spec.home)):
                raise ConfigError(f"agent home {spec.home} is occupied")

    def to_dict(self) -> dict:
        data = asdict(self)
        data["dropoffs"] = [list(c) for c in self.dropoffs]
        for st in data["stations"]:
            st["location"] = list(st["location"])
        for ag in data["agents"]:
            ag["home"] = list(ag["home"])
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        data = dict(data)
        if "map_file" in data and "map_text" not in data:
            with open(data.pop("map_file"), encoding="utf-8") as fh:
                data["map_text"] = fh.read()
        try:
            stations = [StationSpec(location=tuple(s["location"]),
                                    arrival_prob=s.get("arrival_prob", 0.0),
                                    initial_tasks=s.get("initial_tasks", 0),
                                    capacity=s.get("capacity", 1))
                        for s in data["stations"]]
            agents = [AgentSpec(home=tuple(a["home"]), speed=a.get("speed", 2))
                      for a in data["agents"]]
            dropoffs = [tuple(c) for c in data["dropoffs"]]
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed scenario config: {exc}") from exc
        kwargs = {k: data[k] for k in ("q", "tau", "tau_mode", "task_cap", "horizon",
                                       "seed", "inflation_radius", "risk_weight")
                  if k in data}
        return cls(name=data.get("name", "custom"), map_text=data["map_text"],
                   stations=stations, dropoffs=dropoffs, agents=agents, **kwargs)

    @classmethod
    def from_yaml(cls, path: str) -> "ScenarioConfig":
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a mapping at top level")
        return cls.from_dict(data)


class _AgentContext:
    """Adapter between behavior-tree leaves and the engine/world state."""

    def __init__(self, sim: "_Simulation", agent: Agent):
        self.sim = sim
        self.agent = agent

    @property
    def item_picked_up(self) -> bool:
        return self.agent.item_picked_up

    @property
    def item_delivered(self) -> bool:
        return self.agent.item_delivered

    @property
    def at_home(self) -> bool:
        return self.agent.position == self.agent.home

    def follow_to_pickup(self) -> bt.TickStatus:
        task = self.sim.world.tasks[self.agent.assigned_task]
        return self._follow(task.pickup, self._arrive_pickup)

    def follow_to_dropoff(self) -> bt.TickStatus:
        task = self.sim.world.tasks[self.agent.assigned_task]
        return self._follow(task.dropoff, self._arrive_dropoff)

    def follow_home(self) -> bt.TickStatus:
        return self._follow(self.agent.home, None)

    def _follow(self, goal: Cell, on_arrival) -> bt.TickStatus:
        agent = self.agent
        grid = self.sim.world.map
        if agent.position != goal:
            if agent.current_path is None or agent.current_path[-1] != goal:
                try:
                    agent.current_path = planner.plan(grid, agent.position, goal).path
                except planner.Unreachable:
                    agent.current_path = None
                    return bt.TickStatus.FAILURE
            steps = agent.speed
            path = agent.current_path
            while steps > 0 and len(path) > 1:
                path.pop(0)
                steps -= 1
            agent.position = path[0]
        if agent.position == goal:
            agent.current_path = None
            if on_arrival is not None:
                on_arrival()
        # the arrival tick is consumed by the pickup/drop action itself, so a
        # single action leaf runs per tick even when a leg completes
        return bt.TickStatus.RUNNING

    def _arrive_pickup(self) -> None:
        sim, agent = self.sim, self.agent
        task = sim.world.tasks[agent.assigned_task]
        transition_task(sim.world, task.id, TaskState.PICKED_UP)
        agent.carrying = True
        agent.item_picked_up = True
        sim.emit(TASK_PICKED_UP, task=task.id, agent=agent.id, station=task.station)
        # the station's capacity slot is free again and its queue shrank, so
        # the next tick must re-auction or a long queue sits underserved
        sim.needs_auction = True

    def _arrive_dropoff(self) -> None:
        sim, agent = self.sim, self.agent
        task = sim.world.tasks[agent.assigned_task]
        transition_task(sim.world, task.id, TaskState.DELIVERED)
        agent.item_delivered = True
        sim.emit(TASK_DELIVERED, task=task.id, agent=agent.id, station=task.station,
                 wait=task.completion_time - task.arrival_time)
        sim.emit(AGENT_IDLE, agent=agent.id)
        sim.needs_auction = True


class _Simulation:
    def __init__(self, config: ScenarioConfig):
        config.validate()
        self.config = config
        grid = config.build_map()
        stations = [Station(id=i, location=tuple(s.location),
                            arrival_prob=s.arrival_prob, capacity=s.capacity)
                    for i, s in enumerate(config.stations)]
        agents = [Agent(id=i, position=tuple(a.home), home=tuple(a.home), speed=a.speed)
                  for i, a in enumerate(config.agents)]
        self.world = WorldState(map=grid, stations=stations, agents=agents)
        self.params = PenaltyParams(q=config.q, tau=config.tau, tau_mode=config.tau_mode)
        self.rngs = [
            np.random.Generator(np.random.PCG64(
                np.random.SeedSequence(entropy=config.seed, spawn_key=(i,))))
            for i in range(len(stations))
        ]
        self.events: list[SimEvent] = []
        self.samples: list[list[int]] = []
        self.needs_auction = True  # agents start idle
        self.spawned_total = 0
        self.pickup_tree = bt.build_pickup_deliver_tree()
        self.home_tree = bt.build_go_home_tree()

    def emit(self, kind: str, **payload) -> None:
        self.events.append(SimEvent(time=self.world.clock, kind=kind, payload=payload))

    def run(self) -> SimTrace:
        world = self.world
        for agent in world.agents:
            self.emit(AGENT_IDLE, agent=agent.id)
        for t in range(self.config.horizon):
            world.clock = t
            spawned = self._spawn_phase(t)
            if (spawned or self.needs_auction) and world.open_tasks():
                self._run_auction()
                self.needs_auction = False
            for agent in world.agents:
                self._tick_agent(agent)
            self.samples.append([queue_length(world, st.id) for st in world.stations])
            self._check_conservation()
        return self._finish()

    def _spawn_one(self, station: Station, rng) -> int:
        dropoff = self.config.dropoffs[int(rng.integers(len(self.config.dropoffs)))]
        task_id = spawn_task(self.world, station.id, tuple(dropoff))
        self.spawned_total += 1
        task = self.world.tasks[task_id]
        self.emit(TASK_SPAWNED, task=task_id, station=station.id,
                  dropoff=list(task.dropoff))
        return task_id

    def _spawn_phase(self, t: int) -> bool:
        spawned = False
        cap = self.config.task_cap
        if t == 0:
            for station, spec, rng in zip(self.world.stations, self.config.stations,
                                          self.rngs):
                for _ in range(spec.initial_tasks):
                    if self.world.active_task_count() >= cap:
                        break
                    self._spawn_one(station, rng)
                    spawned = True
        for station, rng in zip(self.world.stations, self.rngs):
            if station.arrival_prob <= 0.0:
                continue
            if self.world.active_task_count() >= cap:
                continue
            if rng.random() < station.arrival_prob:
                self._spawn_one(station, rng)
                spawned = True
        return spawned

    def _run_auction(self) -> None:
        world = self.world
        edges = assemble_edges(world, self.params)
        caps = {st.id: st.capacity for st in world.stations}
        problem = build_problem(edges, caps)
        incumbents = frozenset((ag.id, ag.assigned_task) for ag in world.agents
                               if ag.assigned_task is not None)
        assignment = solve(problem, prefer=incumbents)
        self.emit(AUCTION_RUN, edges=len(edges),
                  pairs=[list(p) for p in assignment.pairs])
        self.events.extend(apply_assignment(world, assignment))

    def _tick_agent(self, agent: Agent) -> None:
        ctx = _AgentContext(self, agent)
        tree = self.pickup_tree if agent.assigned_task is not None else self.home_tree
        bt.tick(tree, ctx)

    def _check_conservation(self) -> None:
        counts = self.world.counts_by_state()
        total = sum(counts.values())
        if total != self.spawned_total:
            raise SimulationError(
                f"tick {self.world.clock}: task conservation broken "
                f"({total} != {self.spawned_total})"
            )
        waiting = sum(queue_length(self.world, st.id) for st in self.world.stations)
        if waiting != counts[TaskState.QUEUED] + counts[TaskState.ASSIGNED]:
            raise SimulationError(
                f"tick {self.world.clock}: queue contents disagree with task states"
            )
        if self.world.active_task_count() > self.config.task_cap:
            raise SimulationError(f"tick {self.world.clock}: global task cap exceeded")
        check_world_invariants(self.world)

    def _finish(self) -> SimTrace:
        world = self.world
        delivered = [t for t in world.tasks.values() if t.state is TaskState.DELIVERED]
        waits = [t.completion_time - t.arrival_time for t in delivered]
        summary = {
            "spawned": self.spawned_total,
            "delivered": len(delivered),
            "undelivered": self.spawned_total - len(delivered),
            "final_queue_lengths": [queue_length(world, st.id) for st in world.stations],
            "mean_wait": (sum(waits) / len(waits)) if waits else None,
            "max_wait": max(waits) if waits else None,
        }
        return SimTrace(
            config=self.config.to_dict(),
            station_ids=[st.id for st in world.stations],
            horizon=self.config.horizon,
            events=self.events,
            live_queue_samples=self.samples,
            summary=summary,
        )


def run_scenario(config: ScenarioConfig) -> SimTrace:
    """Execute a full scenario; deterministic for a fixed (config, seed)."""
    return _Simulation(config).run()


def apply_assignment(world: WorldState, assignment: Assignment) -> list[SimEvent]:
    """Apply a solved assignment to the world, emitting change events.

    Previously assigned (never picked up) tasks may move between agents or
    fall back to the queue; picked-up tasks must stay with their carrier,
    enforced here as a defensive check on top of the bid-level lock.
    """
    new_by_agent = {a: t for a, t in assignment.pairs}
    new_by_task = {t: a for a, t in assignment.pairs}
    old_assignee = {ag.assigned_task: ag.id for ag in world.agents
                    if ag.assigned_task is not None}

    for task_id, agent_id in new_by_task.items():
        task = world.tasks[task_id]
        if task.state is TaskState.PICKED_UP and old_assignee.get(task_id) != agent_id:
            raise SimulationError(
                f"assignment moves picked-up task {task_id} to agent {agent_id}"
            )

    events: list[SimEvent] = []
    clock = world.clock

    # release phase: agents whose (unpicked) task changed hands or was dropped
    for agent in sorted(world.agents, key=lambda a: a.id):
        old = agent.assigned_task
        if old is None:
            continue
        if world.tasks[old].state is TaskState.PICKED_UP:
            continue
        if new_by_agent.get(agent.id) == old:
            continue
        transition_task(world, old, TaskState.QUEUED)

    # assign phase
    for agent_id, task_id in sorted(assignment.pairs):
        agent = world.agent_by_id(agent_id)
        task = world.tasks[task_id]
        if task.state is TaskState.PICKED_UP:
            continue  # carrier keeps its own task
        if agent.assigned_task == task_id:
            continue
        previous = old_assignee.get(task_id)
        transition_task(world, task_id, TaskState.ASSIGNED)
        agent.assigned_task = task_id
        agent.current_path = None
        agent.item_picked_up = False
        agent.item_delivered = False
        if previous is not None and previous != agent_id:
            events.append(SimEvent(clock, TASK_REASSIGNED, {
                "task": task_id, "from_agent": previous, "to_agent": agent_id,
            }))
        else:
            events.append(SimEvent(clock, TASK_ASSIGNED, {
                "task": task_id, "agent": agent_id,
            }))

    # agents that lost their task and got nothing switch to going home
    for agent in sorted(world.agents, key=lambda a: a.id):
        had = agent.id in {v for v in old_assignee.values()}
        if had and agent.assigned_task is None:
            events.append(SimEvent(clock, AGENT_IDLE, {"agent": agent.id}))

    return events
