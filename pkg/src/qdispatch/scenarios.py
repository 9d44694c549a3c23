"""Built-in evaluation scenarios.

All five presets share one compact warehouse map: three picking stations on
the left wall, three shared drop-off cells on the right wall, two agents
homed near the bottom center, and a few shelf blocks in the middle so the
risk layer and path planning have something to work around. Station-to-drop
distances are deliberately comparable so no queue is starved by geometry.
"""

from __future__ import annotations

from .engine import AgentSpec, ScenarioConfig, StationSpec

DEFAULT_MAP = """\
##############
#............#
#.....##.....#
#............#
#............#
#............#
#.....##.....#
#............#
##############
"""

_STATION_CELLS = [(2, 2), (2, 4), (2, 6)]
_DROPOFF_CELLS = [(10, 4), (11, 4), (12, 4)]
_AGENT_HOMES = [(6, 4), (7, 4)]


def _base(name: str, **overrides) -> ScenarioConfig:
    defaults = dict(
        name=name,
        map_text=DEFAULT_MAP,
        stations=[StationSpec(location=c) for c in _STATION_CELLS],
        dropoffs=list(_DROPOFF_CELLS),
        agents=[AgentSpec(home=c) for c in _AGENT_HOMES],
        q=10000.0,
        tau=100.0,
        tau_mode="elapsed_time",
        task_cap=40,
        horizon=3000,
        seed=0,
    )
    defaults.update(overrides)
    return ScenarioConfig(**defaults)


def _with_stations(cfg: ScenarioConfig, initial: list[int],
                   probs: list[float]) -> ScenarioConfig:
    cfg.stations = [
        StationSpec(location=c, initial_tasks=n, arrival_prob=p)
        for c, n, p in zip(_STATION_CELLS, initial, probs)
    ]
    return cfg


def scenario_presets() -> dict[str, ScenarioConfig]:
    """The five evaluation scenarios, keyed S1..S5."""
    s1 = _with_stations(_base("S1", horizon=1200), [10, 10, 10], [0.0, 0.0, 0.0])
    s2 = _with_stations(_base("S2", horizon=1500), [10, 10, 15], [0.0, 0.0, 0.0])
    arrivals = [0.05, 0.15, 0.15]
    s3 = _with_stations(_base("S3", tau=0.0), [0, 0, 0], arrivals)
    s4 = _with_stations(_base("S4"), [0, 0, 0], arrivals)
    s5 = _with_stations(_base("S5", q=0.0), [0, 0, 0], arrivals)
    return {"S1": s1, "S2": s2, "S3": s3, "S4": s4, "S5": s5}


def get_preset(name: str, seed: int | None = None) -> ScenarioConfig:
    presets = scenario_presets()
    if name not in presets:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(presets)}")
    cfg = presets[name]
    if seed is not None:
        cfg.seed = seed
    return cfg
