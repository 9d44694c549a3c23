"""qdispatch: deterministic multi-agent pick-up-and-deliver simulator with an
auction-based, queue-balancing task allocator."""

from .bidding import Bid, EdgeCost, PenaltyParams, assemble_edges, compute_bid
from .bt import TickStatus, build_go_home_tree, build_pickup_deliver_tree, tick
from .engine import (
    AgentSpec,
    ScenarioConfig,
    SimEvent,
    SimTrace,
    StationSpec,
    apply_assignment,
    run_scenario,
)
from .metrics import QueueSeries, WaitStats, export, queue_series, wait_stats
from .model import (
    Agent,
    GridMap,
    Station,
    Task,
    TaskState,
    WorldState,
    queue_length,
    spawn_task,
    transition_task,
)
from .planner import PlanResult, Unreachable, build_risk_layer, path_cost, plan
from .scenarios import get_preset, scenario_presets
from .solver import (
    Assignment,
    AssignmentProblem,
    brute_force_oracle,
    build_problem,
    max_cardinality,
    solve,
    to_profits,
)

__version__ = "0.1.0"
