from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from ..errors import TopologyError

ROOT = 0


@dataclass(frozen=True)
class Topology:
    """Routing tree rooted at the base station (node 0)."""

    parent: tuple[Optional[int], ...]

    def __post_init__(self):
        if not self.parent or self.parent[ROOT] is not None:
            raise TopologyError("node 0 must be the parentless base station")
        n = len(self.parent)
        for v, p in enumerate(self.parent[1:], 1):
            if p is None or not 0 <= p < n or p == v:
                raise TopologyError(f"node {v} has invalid parent {p!r}")
        self.hops  # raises on cycles

    @classmethod
    def from_parents(cls, parent: Sequence[Optional[int]]) -> "Topology":
        return cls(tuple(parent))

    @property
    def n_nodes(self) -> int:
        return len(self.parent)

    @property
    def motes(self) -> range:
        return range(1, len(self.parent))

    @cached_property
    def hops(self) -> tuple[int, ...]:
        out = [0] * len(self.parent)
        for v in range(1, len(self.parent)):
            h, u, seen = 0, v, set()
            while u != ROOT:
                if u in seen:
                    raise TopologyError(f"routing cycle through node {u}")
                seen.add(u)
                u = self.parent[u]
                h += 1
            out[v] = h
        return tuple(out)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in self.parent]
        for v in range(1, len(self.parent)):
            kids[self.parent[v]].append(v)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def bottom_up(self) -> tuple[int, ...]:
        """Motes ordered deepest first, so children precede their parent."""
        return tuple(sorted(self.motes, key=lambda v: (-self.hops[v], v)))

    def relays(self) -> list[int]:
        return [v for v in range(len(self.parent)) if self.children[v]]

    def path_to_root(self, v: int) -> list[int]:
        path = [v]
        while path[-1] != ROOT:
            path.append(self.parent[path[-1]])
        return path


def build_tree(n_nodes: int, branching: int = 2, seed: Optional[int] = None) -> Topology:
    """Balanced ``branching``-ary tree in breadth-first order.

    With a seed the mote labels are shuffled; the shape is unchanged.
    """
    if n_nodes < 1:
        raise TopologyError("a network needs at least the base station")
    if branching < 1:
        raise TopologyError("branching factor must be positive")
    slots = list(range(n_nodes))
    if seed is not None:
        rest = slots[1:]
        random.Random(seed).shuffle(rest)
        slots = [0] + rest
    parent: list[Optional[int]] = [None] * n_nodes
    for pos in range(1, n_nodes):
        parent[slots[pos]] = slots[(pos - 1) // branching]
    return Topology(tuple(parent))


def line(n_nodes: int) -> Topology:
    return Topology(tuple([None] + list(range(n_nodes - 1))))
