"""Minimal reactive behavior-tree engine.

Trees are re-ticked from the root every control step (no per-node memory):
a Sequence ticks children left to right and stops at the first non-SUCCESS
result; a Fallback stops at the first non-FAILURE result; an Inverter swaps
SUCCESS and FAILURE and lets RUNNING through.  Conditions return
SUCCESS/FAILURE only; Actions may return any status.

Leaves are looked up by name in registries so trees can also be described
in a JSON file (one nested object per node) and swapped without code.
"""

from __future__ import annotations

import enum
import json
from typing import Callable


class BtStatus(enum.Enum):
    SUCCESS = "SUCCESS"
    FAILURE = "FAILURE"
    RUNNING = "RUNNING"


SUCCESS = BtStatus.SUCCESS
FAILURE = BtStatus.FAILURE
RUNNING = BtStatus.RUNNING


class Node:
    """Base node; subclasses implement tick(ctx) -> BtStatus."""

    def tick(self, ctx) -> BtStatus:  # pragma: no cover - abstract
        raise NotImplementedError

    def describe(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError


class Sequence(Node):
    def __init__(self, *children: Node):
        self.children = list(children)

    def tick(self, ctx) -> BtStatus:
        for child in self.children:
            status = child.tick(ctx)
            if status is not SUCCESS:
                return status
        return SUCCESS

    def describe(self) -> dict:
        return {"type": "sequence", "children": [c.describe() for c in self.children]}


class Fallback(Node):
    def __init__(self, *children: Node):
        self.children = list(children)

    def tick(self, ctx) -> BtStatus:
        for child in self.children:
            status = child.tick(ctx)
            if status is not FAILURE:
                return status
        return FAILURE

    def describe(self) -> dict:
        return {"type": "fallback", "children": [c.describe() for c in self.children]}


class Inverter(Node):
    def __init__(self, child: Node):
        self.child = child

    def tick(self, ctx) -> BtStatus:
        status = self.child.tick(ctx)
        if status is SUCCESS:
            return FAILURE
        if status is FAILURE:
            return SUCCESS
        return status

    def describe(self) -> dict:
        return {"type": "inverter", "children": [self.child.describe()]}


class Condition(Node):
    def __init__(self, name: str, fn: Callable):
        self.name = name
        self.fn = fn

    def tick(self, ctx) -> BtStatus:
        return SUCCESS if self.fn(ctx) else FAILURE

    def describe(self) -> dict:
        return {"type": "condition", "name": self.name}


class Action(Node):
    def __init__(self, name: str, fn: Callable):
        self.name = name
        self.fn = fn

    def tick(self, ctx) -> BtStatus:
        status = self.fn(ctx)
        return status if isinstance(status, BtStatus) else SUCCESS

    def describe(self) -> dict:
        return {"type": "action", "name": self.name}


def tick(tree: Node, ctx) -> BtStatus:
    """Run one reactive tick of the whole tree."""
    return tree.tick(ctx)


def build_tree(desc: dict, conditions: dict, actions: dict) -> Node:
    """Build a tree from a nested description dict.

    ``conditions`` and ``actions`` map leaf names to callables; unknown
    names or node types raise ValueError naming the offender.
    """
    ntype = desc.get("type")
    if ntype == "sequence":
        return Sequence(*(build_tree(c, conditions, actions) for c in desc.get("children", [])))
    if ntype == "fallback":
        return Fallback(*(build_tree(c, conditions, actions) for c in desc.get("children", [])))
    if ntype == "inverter":
        children = desc.get("children", [])
        if len(children) != 1:
            raise ValueError("inverter takes exactly one child")
        return Inverter(build_tree(children[0], conditions, actions))
    if ntype == "condition":
        name = desc.get("name")
        if name not in conditions:
            raise ValueError(f"unknown condition {name!r}; known: {sorted(conditions)}")
        return Condition(name, conditions[name])
    if ntype == "action":
        name = desc.get("name")
        if name not in actions:
            raise ValueError(f"unknown action {name!r}; known: {sorted(actions)}")
        return Action(name, actions[name])
    raise ValueError(f"unknown node type {ntype!r}")


def load_tree(path, conditions: dict, actions: dict) -> Node:
    """Load a JSON tree description from a file path."""
    with open(path, "r", encoding="utf-8") as fh:
        desc = json.load(fh)
    return build_tree(desc, conditions, actions)
