"""Command-line entry point.

Subcommands:
  run <preset|config.yaml>   execute a scenario and export metrics
  solve <instance.txt>       solve a standalone assignment instance
  presets                    list built-in scenarios and their parameters
  validate <config.yaml>     check a scenario config without running it

Exit codes: 0 success, 1 usage/config error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .engine import ScenarioConfig, run_scenario
from .metrics import export, wait_stats
from .model import ConfigError, SimulationError
from .scenarios import scenario_presets
from .solver import parse_instance, solve


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdispatch")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a preset or YAML scenario config")
    run_p.add_argument("scenario", help="preset name (S1..S5) or config file path")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--horizon", type=int, default=None)
    run_p.add_argument("--out", default=None, help="export directory")
    run_p.add_argument("--q", type=float, default=None, help="queue-length weight")
    run_p.add_argument("--tau", type=float, default=None, help="waiting-time weight")
    run_p.add_argument("--tau-mode", choices=["elapsed_time", "total_count"],
                       default=None)
    run_p.add_argument("--m", type=int, default=None,
                       help="per-station agent cap override")

    solve_p = sub.add_parser("solve", help="solve an assignment instance file")
    solve_p.add_argument("instance", help="instance file path")

    sub.add_parser("presets", help="list built-in scenarios")

    val_p = sub.add_parser("validate", help="validate a scenario config file")
    val_p.add_argument("config", help="config file path")

    return parser


def _load_scenario(args) -> ScenarioConfig:
    presets = scenario_presets()
    if args.scenario in presets:
        config = presets[args.scenario]
    else:
        path = Path(args.scenario)
        if not path.exists():
            raise ConfigError(
                f"unknown preset or missing config file: {args.scenario!r}"
            )
        config = ScenarioConfig.from_yaml(str(path))
    if args.seed is not None:
        config.seed = args.seed
    if args.horizon is not None:
        config.horizon = args.horizon
    if args.q is not None:
        config.q = args.q
    if args.tau is not None:
        config.tau = args.tau
    if args.tau_mode is not None:
        config.tau_mode = args.tau_mode
    if args.m is not None:
        for st in config.stations:
            st.capacity = args.m
    return config


def _cmd_run(args) -> int:
    config = _load_scenario(args)
    trace = run_scenario(config)
    out_dir = args.out if args.out is not None else f"out/{config.name}"
    files = export(trace, out_dir)
    stats = wait_stats(trace)
    mean = f"{stats.mean:.1f}" if stats.mean is not None else "n/a"
    peak = stats.max if stats.max is not None else "n/a"
    print(
        f"{config.name} seed={config.seed} q={config.q:g} tau={config.tau:g} "
        f"tau_mode={config.tau_mode} horizon={config.horizon}: "
        f"delivered={trace.summary['delivered']}/{trace.summary['spawned']} "
        f"mean_wait={mean} max_wait={peak} "
        f"final_queues={trace.summary['final_queue_lengths']}"
    )
    print(f"wrote {len(files)} files to {out_dir}")
    return 0


def _cmd_solve(args) -> int:
    path = Path(args.instance)
    if not path.exists():
        raise ConfigError(f"no such instance file: {args.instance}")
    problem = parse_instance(path.read_text(encoding="utf-8"))
    assignment = solve(problem)
    for agent, task in assignment.pairs:
        print(f"agent {agent} -> task {task}")
    print(f"pairs={len(assignment.pairs)} "
          f"profit={assignment.objective} total_cost={assignment.total_cost:.6f}")
    return 0


def _cmd_presets() -> int:
    for name, cfg in scenario_presets().items():
        initial = [s.initial_tasks for s in cfg.stations]
        probs = [s.arrival_prob for s in cfg.stations]
        print(
            f"{name}: stations={len(cfg.stations)} agents={len(cfg.agents)} "
            f"initial={initial} arrival_probs={probs} q={cfg.q:g} tau={cfg.tau:g} "
            f"cap={cfg.task_cap} horizon={cfg.horizon}"
        )
    return 0


def _cmd_validate(args) -> int:
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"no such config file: {args.config}")
    config = ScenarioConfig.from_yaml(str(path))
    config.validate()
    print(f"{args.config}: OK ({config.name}, {len(config.stations)} stations, "
          f"{len(config.agents)} agents, horizon {config.horizon})")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "presets":
            return _cmd_presets()
        if args.command == "validate":
            return _cmd_validate(args)
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SimulationError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
