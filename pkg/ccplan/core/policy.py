from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from ccplan.core.history import StateHistory


@dataclass(slots=True)
class PolicyNode[S, A]:
    history: StateHistory[S, A]
    action: A | None = None
    action_index: int | None = None
    # safe branch indices of the chosen action, whether or not a child exists for each
    branches: tuple[int, ...] = ()
    value: float | None = None
    visits: int = 0
    children: dict[int, PolicyNode[S, A]] = field(default_factory=dict)

    @property
    def is_terminal(self) -> bool:
        return self.action is None

    def iter_nodes(self) -> Iterator[PolicyNode[S, A]]:
        stack: list[PolicyNode[S, A]] = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children[b] for b in sorted(node.children, reverse=True))


@dataclass(slots=True)
class PolicyTree[S, A]:
    """A deterministic history-dependent policy over the safe histories reachable from ``root``."""

    root: PolicyNode[S, A]
    horizon: int

    def nodes(self) -> Iterator[PolicyNode[S, A]]:
        return self.root.iter_nodes()

    def leaves(self) -> Iterator[PolicyNode[S, A]]:
        return (node for node in self.nodes() if node.is_terminal)

    @property
    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    @property
    def depth(self) -> int:
        return max(node.history.t for node in self.nodes()) - self.root.history.t

    @property
    def complete(self) -> bool:
        for node in self.nodes():
            if node.history.t > self.horizon:
                return False
            if node.is_terminal:
                if node.history.t < self.horizon:
                    return False
            elif set(node.children) != set(node.branches):
                return False
        return True

    def node_at(self, key: str) -> PolicyNode[S, A] | None:
        for node in self.nodes():
            if node.history.render_key() == key:
                return node
        return None

    def action_map(self) -> dict[str, int]:
        return {
            node.history.render_key(): node.action_index
            for node in self.nodes()
            if node.action_index is not None
        }
