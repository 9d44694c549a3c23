import pytest

from qdispatch.bt import (
    TickStatus,
    action,
    build_go_home_tree,
    build_pickup_deliver_tree,
    condition,
    fallback,
    sequence,
    tick,
)


def leaf(status):
    return action("stub", {"stub": lambda ctx: status})


def test_sequence_semantics():
    assert tick(sequence(leaf(TickStatus.SUCCESS), leaf(TickStatus.SUCCESS)), None) \
        is TickStatus.SUCCESS
    assert tick(sequence(leaf(TickStatus.FAILURE), leaf(TickStatus.SUCCESS)), None) \
        is TickStatus.FAILURE
    assert tick(sequence(leaf(TickStatus.SUCCESS), leaf(TickStatus.RUNNING)), None) \
        is TickStatus.RUNNING


def test_fallback_semantics():
    assert tick(fallback(leaf(TickStatus.FAILURE), leaf(TickStatus.RUNNING)), None) \
        is TickStatus.RUNNING
    assert tick(fallback(leaf(TickStatus.SUCCESS), leaf(TickStatus.FAILURE)), None) \
        is TickStatus.SUCCESS
    assert tick(fallback(leaf(TickStatus.FAILURE), leaf(TickStatus.FAILURE)), None) \
        is TickStatus.FAILURE


def test_sequence_stops_at_first_non_success():
    calls = []
    reg = {
        "a": lambda ctx: calls.append("a") or TickStatus.RUNNING,
        "b": lambda ctx: calls.append("b") or TickStatus.SUCCESS,
    }
    tick(sequence(action("a", reg), action("b", reg)), None)
    assert calls == ["a"]


def test_unbound_leaf_fails_at_construction():
    with pytest.raises(KeyError):
        condition("no_such_condition", {})
    with pytest.raises(KeyError):
        action("no_such_action", {})


class FakeContext:
    """Records which movement actions get ticked."""

    def __init__(self, picked=False, delivered=False, home=False,
                 move_status=TickStatus.RUNNING):
        self.item_picked_up = picked
        self.item_delivered = delivered
        self.at_home = home
        self.move_status = move_status
        self.actions = []

    def follow_to_pickup(self):
        self.actions.append("pickup")
        return self.move_status

    def follow_to_dropoff(self):
        self.actions.append("dropoff")
        return self.move_status

    def follow_home(self):
        self.actions.append("home")
        return self.move_status


def test_pickup_tree_routes_to_pickup_leg():
    ctx = FakeContext(picked=False)
    status = tick(build_pickup_deliver_tree(), ctx)
    assert ctx.actions == ["pickup"]
    assert status is TickStatus.RUNNING


def test_pickup_tree_routes_to_dropoff_leg():
    ctx = FakeContext(picked=True, delivered=False)
    status = tick(build_pickup_deliver_tree(), ctx)
    assert ctx.actions == ["dropoff"]
    assert status is TickStatus.RUNNING


def test_pickup_tree_success_when_complete():
    ctx = FakeContext(picked=True, delivered=True)
    status = tick(build_pickup_deliver_tree(), ctx)
    assert ctx.actions == []
    assert status is TickStatus.SUCCESS


def test_exactly_one_action_per_tick_while_incomplete():
    for picked, delivered in ((False, False), (True, False)):
        ctx = FakeContext(picked=picked, delivered=delivered)
        tick(build_pickup_deliver_tree(), ctx)
        assert len(ctx.actions) == 1
        assert "pickup" not in ctx.actions or not picked


def test_go_home_tree_at_home():
    ctx = FakeContext(home=True)
    assert tick(build_go_home_tree(), ctx) is TickStatus.SUCCESS
    assert ctx.actions == []


def test_go_home_tree_walks_home():
    ctx = FakeContext(home=False)
    assert tick(build_go_home_tree(), ctx) is TickStatus.RUNNING
    assert ctx.actions == ["home"]


def test_go_home_tree_propagates_failure():
    ctx = FakeContext(home=False, move_status=TickStatus.FAILURE)
    assert tick(build_go_home_tree(), ctx) is TickStatus.FAILURE


def test_tick_is_pure_on_tree_structure():
    tree = build_pickup_deliver_tree()
    before = repr(tree)
    ctx = FakeContext()
    tick(tree, ctx)
    tick(tree, ctx)
    assert repr(tree) == before


def test_deterministic_given_same_context():
    results = {tick(build_pickup_deliver_tree(), FakeContext(picked=True)).value
               for _ in range(5)}
    assert len(results) == 1
