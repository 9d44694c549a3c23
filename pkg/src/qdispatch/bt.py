"""Minimal reactive behavior-tree runtime plus the two concrete agent trees.

Control nodes are memory-less: every tick restarts at the root. Leaves are
bound by name at construction time against a registry of callables that take
the agent context, so a misspelled leaf fails when the tree is built, never
mid-simulation.

The agent context is duck-typed; it must expose the attributes/methods the
standard leaves use (item_picked_up, item_delivered, at_home, and the three
follow_* actions returning TickStatus).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable


class TickStatus(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    RUNNING = "running"


@dataclass
class BTNode:
    kind: str  # "sequence" | "fallback" | "condition" | "action"
    name: str = ""
    children: list["BTNode"] = field(default_factory=list)
    binding: Callable | None = None  # resolved leaf behavior


def sequence(*children: BTNode) -> BTNode:
    return BTNode(kind="sequence", children=list(children))


def fallback(*children: BTNode) -> BTNode:
    return BTNode(kind="fallback", children=list(children))


def condition(name: str, registry: dict[str, Callable]) -> BTNode:
    if name not in registry:
        raise KeyError(f"unbound condition leaf: {name!r}")
    return BTNode(kind="condition", name=name, binding=registry[name])


def action(name: str, registry: dict[str, Callable]) -> BTNode:
    if name not in registry:
        raise KeyError(f"unbound action leaf: {name!r}")
    return BTNode(kind="action", name=name, binding=registry[name])


def tick(node: BTNode, ctx) -> TickStatus:
    """Propagate a tick through the tree; mutation happens only via ctx."""
    if node.kind == "condition":
        return TickStatus.SUCCESS if node.binding(ctx) else TickStatus.FAILURE
    if node.kind == "action":
        return node.binding(ctx)
    if node.kind == "sequence":
        for child in node.children:
            status = tick(child, ctx)
            if status is not TickStatus.SUCCESS:
                return status
        return TickStatus.SUCCESS
    if node.kind == "fallback":
        for child in node.children:
            status = tick(child, ctx)
            if status is not TickStatus.FAILURE:
                return status
        return TickStatus.FAILURE
    raise ValueError(f"unknown node kind {node.kind!r}")


# Standard leaf bindings for the two agent trees. Conditions read flags off
# the context; actions delegate to it and report their movement status.
STANDARD_LEAVES: dict[str, Callable] = {
    "item_picked_up": lambda ctx: ctx.item_picked_up,
    "item_delivered": lambda ctx: ctx.item_delivered,
    "at_home": lambda ctx: ctx.at_home,
    "follow_path_to_pickup": lambda ctx: ctx.follow_to_pickup(),
    "follow_path_to_dropoff": lambda ctx: ctx.follow_to_dropoff(),
    "follow_path_home": lambda ctx: ctx.follow_home(),
}


def build_pickup_deliver_tree(registry: dict[str, Callable] | None = None) -> BTNode:
    """Tree driving an agent through pickup then delivery of its task."""
    reg = STANDARD_LEAVES if registry is None else registry
    return sequence(
        fallback(
            condition("item_picked_up", reg),
            action("follow_path_to_pickup", reg),
        ),
        fallback(
            condition("item_delivered", reg),
            action("follow_path_to_dropoff", reg),
        ),
    )


def build_go_home_tree(registry: dict[str, Callable] | None = None) -> BTNode:
    """Tree driving an unassigned agent back to its home cell.

    Realized as fallback(at_home, follow_path_home): keep walking home until
    the at-home condition holds, then report success without moving.
    """
    reg = STANDARD_LEAVES if registry is None else registry
    return fallback(
        condition("at_home", reg),
        action("follow_path_home", reg),
    )
