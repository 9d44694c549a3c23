"""Risk-aware shortest paths on the grid map.

Costs combine travelled distance (diagonal steps weigh sqrt(2)) and a risk
term that grows near occupied cells. A move u -> v costs
``step(u, v) + (risk(u) + risk(v)) / 2``; splitting the cell risk between the
two endpoints keeps costs symmetric in travel direction while a degenerate
path (start == goal) still costs zero.

The map is static, so plain Dijkstra from each start cell is optimal and the
(distance, parent) fields are memoized on the map for reuse by bidding.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import distance_transform_cdt

from .model import Cell, GridMap

SQRT2 = math.sqrt(2.0)

# 8-connected neighborhood and step lengths
_STEPS = [
    (-1, -1, SQRT2), (0, -1, 1.0), (1, -1, SQRT2),
    (-1, 0, 1.0), (1, 0, 1.0),
    (-1, 1, SQRT2), (0, 1, 1.0), (1, 1, SQRT2),
]


class Unreachable(Exception):
    """Raised when no obstacle-free path connects start and goal."""


@dataclass
class PlanResult:
    path: list[Cell]
    dist_cost: float
    risk_cost: float

    @property
    def total_cost(self) -> float:
        return self.dist_cost + self.risk_cost


def build_risk_layer(grid: GridMap, inflation_radius: int, risk_weight: float) -> GridMap:
    """Fill the map's risk layer: weight * max(0, radius - d) with d the
    Chebyshev distance to the nearest occupied cell. Returns the same map."""
    if inflation_radius < 0:
        raise ValueError("inflation_radius must be >= 0")
    if risk_weight < 0:
        raise ValueError("risk_weight must be >= 0")
    if not grid.occupied.any() or inflation_radius == 0 or risk_weight == 0:
        grid.risk = np.zeros_like(grid.occupied, dtype=float)
        return grid
    # chessboard distance of each free cell to the nearest occupied cell
    d = distance_transform_cdt(~grid.occupied, metric="chessboard")
    risk = risk_weight * np.maximum(0.0, inflation_radius - d.astype(float))
    risk[grid.occupied] = 0.0  # occupied cells are non-traversable, not risky
    grid.risk = risk
    grid._plan_cache.clear()
    return grid


def _dijkstra_fields(grid: GridMap, start: Cell):
    """Single-source Dijkstra over the weighted 8-connected grid.

    Returns (dist, risk_sum, parent) dicts keyed by cell. Heap keys carry the
    cell so equal-cost expansions pop in lexicographic (x, y) order, making
    paths reproducible.
    """
    cached = grid._plan_cache.get(start)
    if cached is not None:
        return cached

    dist: dict[Cell, float] = {start: 0.0}
    risk_sum: dict[Cell, float] = {start: 0.0}
    parent: dict[Cell, Cell] = {}
    heap: list[tuple[float, int, int]] = [(0.0, start[0], start[1])]
    done: set[Cell] = set()
    occ = grid.occupied
    risk = grid.risk
    width, height = grid.width, grid.height

    while heap:
        d, x, y = heapq.heappop(heap)
        u = (x, y)
        if u in done:
            continue
        done.add(u)
        half_ru = 0.5 * risk[y, x]
        for dx, dy, step in _STEPS:
            nx, ny = x + dx, y + dy
            if not (0 <= nx < width and 0 <= ny < height) or occ[ny, nx]:
                continue
            v = (nx, ny)
            if v in done:
                continue
            half_rv = 0.5 * risk[ny, nx]
            nd = d + step + half_ru + half_rv
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                risk_sum[v] = risk_sum[u] + half_ru + half_rv
                parent[v] = u
                heapq.heappush(heap, (nd, nx, ny))

    fields = (dist, risk_sum, parent)
    grid._plan_cache[start] = fields
    return fields


def plan(grid: GridMap, start: Cell, goal: Cell) -> PlanResult:
    """Minimum-cost obstacle-free path from start to goal.

    Raises Unreachable when no path exists; ValueError on occupied endpoints.
    """
    if not grid.is_free(start):
        raise ValueError(f"start cell {start} is occupied or out of bounds")
    if not grid.is_free(goal):
        raise ValueError(f"goal cell {goal} is occupied or out of bounds")

    dist, risk_sum, parent = _dijkstra_fields(grid, start)
    if goal not in dist:
        raise Unreachable(f"no path from {start} to {goal}")

    path = [goal]
    while path[-1] != start:
        path.append(parent[path[-1]])
    path.reverse()

    total_risk = risk_sum[goal]
    return PlanResult(path=path, dist_cost=dist[goal] - total_risk, risk_cost=total_risk)


def path_cost(grid: GridMap, start: Cell, goal: Cell) -> float:
    """Total path cost only; equals plan(...).total_cost."""
    if not grid.is_free(start):
        raise ValueError(f"start cell {start} is occupied or out of bounds")
    if not grid.is_free(goal):
        raise ValueError(f"goal cell {goal} is occupied or out of bounds")
    dist, _, _ = _dijkstra_fields(grid, start)
    if goal not in dist:
        raise Unreachable(f"no path from {start} to {goal}")
    return dist[goal]


def reachable_cost(grid: GridMap, start: Cell, goal: Cell) -> float | None:
    """path_cost returning None instead of raising on unreachable goals."""
    dist, _, _ = _dijkstra_fields(grid, start)
    return dist.get(goal)
