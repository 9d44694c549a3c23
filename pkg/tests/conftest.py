"""Shared test helpers: independent oracles and random generators.

The oracles here deliberately avoid the package's own implementations:
the Dijkstra oracle is a heap-free textbook version over an explicitly
materialized weighted graph, and the risk oracle is a full per-cell scan
over every obstacle.
"""

from __future__ import annotations

import math
import random

import numpy as np

from qdispatch.bidding import EdgeCost
from qdispatch.model import GridMap
from qdispatch.solver import build_problem

SQRT2 = math.sqrt(2.0)


def oracle_risk_layer(grid: GridMap, radius: int, weight: float) -> np.ndarray:
    """O(cells x obstacles) exhaustive nearest-obstacle scan."""
    obstacles = [(x, y) for y in range(grid.height) for x in range(grid.width)
                 if grid.occupied[y, x]]
    risk = np.zeros((grid.height, grid.width), dtype=float)
    if not obstacles:
        return risk
    for y in range(grid.height):
        for x in range(grid.width):
            if grid.occupied[y, x]:
                continue
            d = min(max(abs(x - ox), abs(y - oy)) for ox, oy in obstacles)
            risk[y, x] = weight * max(0.0, radius - d)
    return risk


def oracle_dijkstra(grid: GridMap, start, goal):
    """Heap-free Dijkstra over the explicit weighted graph; None if unreachable.

    Edge weight u->v = step length + (risk(u) + risk(v)) / 2, matching the
    planner's metric definition.
    """
    cells = [(x, y) for y in range(grid.height) for x in range(grid.width)
             if not grid.occupied[y, x]]
    adj = {c: [] for c in cells}
    for (x, y) in cells:
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                v = (x + dx, y + dy)
                if v in adj:
                    step = SQRT2 if dx != 0 and dy != 0 else 1.0
                    w = step + 0.5 * grid.risk[y, x] + 0.5 * grid.risk[v[1], v[0]]
                    adj[(x, y)].append((v, w))

    dist = {c: math.inf for c in cells}
    dist[start] = 0.0
    unvisited = set(cells)
    while unvisited:
        u = min(unvisited, key=lambda c: (dist[c], c))
        if dist[u] == math.inf:
            break
        unvisited.remove(u)
        if u == goal:
            return dist[u]
        for v, w in adj[u]:
            if v in unvisited and dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
    return None if dist[goal] == math.inf else dist[goal]


def random_map(rng: random.Random, max_cells: int = 400,
               density: float = 0.2) -> GridMap:
    """Random occupancy grid with at least two free cells."""
    while True:
        width = rng.randint(4, 20)
        height = rng.randint(4, max_cells // width)
        occ = np.array([[rng.random() < density for _ in range(width)]
                        for _ in range(height)])
        if (~occ).sum() >= 2:
            return GridMap(width=width, height=height, occupied=occ,
                           risk=np.zeros_like(occ, dtype=float))


def free_cells(grid: GridMap):
    return [(x, y) for y in range(grid.height) for x in range(grid.width)
            if not grid.occupied[y, x]]


def random_instance(rng: random.Random, dense: bool = False):
    """Random assignment problem within the oracle guard.

    Mixes dense and sparse bipartite structures, signed costs on the scale
    the simulator produces, station-less locked tasks, and m in {1, 2}.
    """
    n_agents = rng.randint(1, 5)
    n_tasks = rng.randint(1, 8)
    n_stations = rng.randint(1, 3)
    caps = {s: rng.choice([1, 2]) for s in range(n_stations)}
    stations = {}
    for t in range(n_tasks):
        # small chance of a locked (capacity-exempt) task
        stations[t] = None if rng.random() < 0.1 else rng.randrange(n_stations)

    edges = []
    keep = 1.0 if dense else rng.uniform(0.35, 1.0)
    for a in range(n_agents):
        for t in range(n_tasks):
            if rng.random() > keep:
                continue
            cost = rng.uniform(0.0, 60.0) - rng.choice([0.0, 1.0, 2.0, 3.0]) * 10000.0
            edges.append(EdgeCost(agent=a, task=t, c=max(cost, 0.0),
                                  penalty=max(-cost, 0.0), station=stations[t]))
    return build_problem(edges, caps)
