from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from ccplan.core.history import StateHistory
from ccplan.core.model import Outcome, OutcomeSet
from ccplan.core.policy import PolicyNode, PolicyTree
from ccplan.core.risk_bound import ConstantBound, RiskBound


def create_arm(risk: float, *branches: tuple[float, float], failure_reward: float = 0.0) -> OutcomeSet[int]:
    """Create an outcome set whose safe branches split 1 - risk by the given (weight, reward) pairs."""
    return OutcomeSet(
        safe_outcomes=tuple(Outcome(b, (1.0 - risk) * w, r) for b, (w, r) in enumerate(branches)),
        failure_probability=risk,
        failure_reward=failure_reward,
    )


@dataclass(frozen=True)
class TableModel:
    """The same actions with the same outcomes at every history."""

    arms: tuple[OutcomeSet[int], ...]
    horizon: int
    risk_bound: RiskBound = field(default_factory=lambda: ConstantBound(delta=1.0))
    discount: float = 1.0
    initial_state: int = 0

    def actions(self, history: StateHistory[int, int]) -> list[int]:
        return list(range(len(self.arms)))

    def outcomes(self, history: StateHistory[int, int], action: int) -> OutcomeSet[int]:
        return self.arms[action]


def create_chain(horizon: int, risk: float = 0.0, reward: float = 1.0, **kwargs: object) -> TableModel:
    """Create a model with one action and one safe outcome at every step."""
    return TableModel(arms=(create_arm(risk, (1.0, reward)),), horizon=horizon, **kwargs)  # type: ignore[arg-type]


def walk(model: Any, steps: Sequence[tuple[int, int]]) -> StateHistory[int, int]:
    """Follow (action, branch) pairs from the initial state."""
    history: StateHistory[int, int] = StateHistory.initial(model.initial_state)
    for action, branch in steps:
        history = history.extend(action, action, model.outcomes(history, action), branch)
    return history


def build_policy[S, A](model: object, choose: Callable[[StateHistory[S, A]], int] = lambda _: 0) -> PolicyTree[S, A]:
    """Build the complete policy taking action ``choose(history)`` everywhere."""

    def build(history: StateHistory[S, A]) -> PolicyNode[S, A]:
        if history.failed or history.t >= model.horizon:  # type: ignore[attr-defined]
            return PolicyNode(history=history)
        actions = list(model.actions(history))  # type: ignore[attr-defined]
        index = choose(history)
        outcomes = model.outcomes(history, actions[index])  # type: ignore[attr-defined]
        node = PolicyNode(
            history=history,
            action=actions[index],
            action_index=index,
            branches=tuple(range(len(outcomes.safe_outcomes))),
        )
        for branch in node.branches:
            node.children[branch] = build(history.extend(actions[index], index, outcomes, branch))
        return node

    root = build(StateHistory.initial(model.initial_state))  # type: ignore[attr-defined]
    return PolicyTree(root=root, horizon=model.horizon)  # type: ignore[attr-defined]
