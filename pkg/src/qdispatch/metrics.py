"""Post-processing of simulation traces into queue series, wait statistics,
and exported CSV/JSON files.

Everything here replays the event log rather than reading live world state,
so the exports can be regenerated from a stored trace and cross-checked
against the live per-tick samples the engine also records.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .engine import (
    TASK_DELIVERED,
    TASK_PICKED_UP,
    TASK_SPAWNED,
    SimTrace,
)


class TraceError(ValueError):
    """Malformed trace: events that do not form a consistent task history."""


@dataclass
class QueueSeries:
    station_ids: list[int]
    # per station id: list of (tick, length), one sample per tick
    series: dict[int, list[tuple[int, int]]] = field(default_factory=dict)

    def lengths_at(self, tick: int) -> list[int]:
        return [self.series[s][tick][1] for s in self.station_ids]


@dataclass
class TaskWait:
    task: int
    station: int
    arrival: int
    completion: int | None
    wait: int


@dataclass
class WaitStats:
    delivered: list[TaskWait]
    censored: list[TaskWait]  # still open at horizon; wait = horizon - arrival
    bin_width: int
    mean: float | None
    max: int | None
    histogram: list[tuple[int, int]]  # (bin lower edge, count), delivered only

    def observed_waits(self) -> list[int]:
        """Waits of all spawned tasks, censored ones counted at horizon."""
        return [w.wait for w in self.delivered] + [w.wait for w in self.censored]


def _spawn_times(trace: SimTrace) -> dict[int, tuple[int, int]]:
    """task id -> (arrival tick, station); validates event ordering."""
    spawns: dict[int, tuple[int, int]] = {}
    for ev in trace.events:
        if ev.kind == TASK_SPAWNED:
            spawns[ev.payload["task"]] = (ev.time, ev.payload["station"])
        elif "task" in ev.payload and ev.payload["task"] not in spawns:
            raise TraceError(f"event {ev} references task before its spawn")
    return spawns


def queue_series(trace: SimTrace) -> QueueSeries:
    """Reconstruct per-tick queue lengths by replaying spawn/pickup events."""
    _spawn_times(trace)  # validation
    lengths = {s: 0 for s in trace.station_ids}
    out = QueueSeries(station_ids=list(trace.station_ids),
                      series={s: [] for s in trace.station_ids})
    by_tick: dict[int, list] = {}
    for ev in trace.events:
        by_tick.setdefault(ev.time, []).append(ev)
    for tick in range(trace.horizon):
        for ev in by_tick.get(tick, ()):
            if ev.kind == TASK_SPAWNED:
                lengths[ev.payload["station"]] += 1
            elif ev.kind == TASK_PICKED_UP:
                lengths[ev.payload["station"]] -= 1
        for s in trace.station_ids:
            if lengths[s] < 0:
                raise TraceError(f"negative queue length at station {s}, tick {tick}")
            out.series[s].append((tick, lengths[s]))
    return out


def wait_stats(trace: SimTrace, bin_width: int = 20) -> WaitStats:
    """Per-task waiting times (arrival to delivery) from the event log."""
    if bin_width <= 0:
        raise ValueError("bin_width must be > 0")
    spawns = _spawn_times(trace)
    completions: dict[int, int] = {}
    for ev in trace.events:
        if ev.kind == TASK_DELIVERED:
            completions[ev.payload["task"]] = ev.time

    delivered: list[TaskWait] = []
    censored: list[TaskWait] = []
    for task_id in sorted(spawns):
        arrival, station = spawns[task_id]
        done = completions.get(task_id)
        if done is not None:
            delivered.append(TaskWait(task_id, station, arrival, done, done - arrival))
        else:
            censored.append(TaskWait(task_id, station, arrival, None,
                                     trace.horizon - arrival))

    waits = [w.wait for w in delivered]
    histogram: dict[int, int] = {}
    for w in waits:
        histogram[(w // bin_width) * bin_width] = \
            histogram.get((w // bin_width) * bin_width, 0) + 1
    return WaitStats(
        delivered=delivered,
        censored=censored,
        bin_width=bin_width,
        mean=(sum(waits) / len(waits)) if waits else None,
        max=max(waits) if waits else None,
        histogram=sorted(histogram.items()),
    )


def export(trace: SimTrace, out_dir: str | Path) -> list[Path]:
    """Write queues.csv, waits.csv, events.jsonl and summary.json.

    Stable column order, header rows, UTF-8, LF line endings; same trace in,
    identical bytes out.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    series = queue_series(trace)
    queues_path = out / "queues.csv"
    with open(queues_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("tick,station,length\n")
        for tick in range(trace.horizon):
            for s in series.station_ids:
                fh.write(f"{tick},{s},{series.series[s][tick][1]}\n")
    written.append(queues_path)

    stats = wait_stats(trace)
    waits_path = out / "waits.csv"
    with open(waits_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("task,station,arrival,completion,wait\n")
        for w in stats.delivered:
            fh.write(f"{w.task},{w.station},{w.arrival},{w.completion},{w.wait}\n")
    written.append(waits_path)

    events_path = out / "events.jsonl"
    with open(events_path, "w", encoding="utf-8", newline="\n") as fh:
        for ev in trace.events:
            fh.write(ev.to_json() + "\n")
    written.append(events_path)

    summary_path = out / "summary.json"
    payload = {
        "config": trace.config,
        "summary": trace.summary,
        "wait_mean": stats.mean,
        "wait_max": stats.max,
        "delivered": len(stats.delivered),
        "censored": len(stats.censored),
        "histogram_bin_width": stats.bin_width,
        "histogram": [[lo, n] for lo, n in stats.histogram],
    }
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2))
        fh.write("\n")
    written.append(summary_path)
    return written


def read_queue_series(path: str | Path) -> QueueSeries:
    """Parse queues.csv back into a QueueSeries (export round-trip)."""
    rows: list[tuple[int, int, int]] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "tick,station,length":
            raise TraceError(f"{path}: unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise TraceError(f"{path}:{lineno}: expected 3 columns")
            rows.append((int(parts[0]), int(parts[1]), int(parts[2])))
    station_ids = sorted({s for _, s, _ in rows})
    out = QueueSeries(station_ids=station_ids, series={s: [] for s in station_ids})
    for tick, station, length in rows:
        out.series[station].append((tick, length))
    return out
