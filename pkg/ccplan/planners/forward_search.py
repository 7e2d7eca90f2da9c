"""Exhaustive forward search under the local risk constraint.

Every history up to the horizon is visited once. Horizon histories that violate
``ser(h) <= Delta(f(h))`` are infeasible, and an action is infeasible as soon as any
of its safe outcomes is. The result is the best policy built only from histories
satisfying the constraint, which is the policy tree search converges to.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

from ccplan.core.history import StateHistory
from ccplan.core.model import CcmdpModel
from ccplan.core.policy import PolicyNode, PolicyTree
from ccplan.core.rewards import RewardFunctional, f_one
from ccplan.errors import BudgetExceeded, DegenerateRisk
from ccplan.risk import local_constraint_holds

logger = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 5_000_000


@dataclass(slots=True)
class ForwardSearchResult[S, A]:
    policy: PolicyTree[S, A] | None
    # None stands for the -infinity of an infeasible root: no policy satisfies the constraint
    root_value: float | None
    explored_history_count: int

    @property
    def has_solution(self) -> bool:
        return self.root_value is not None


class _Counter:
    count: int
    limit: int

    def __init__(self, limit: int) -> None:
        self.count = 0
        self.limit = limit

    def tick(self) -> None:
        self.count += 1
        if self.count > self.limit:
            raise BudgetExceeded("explored histories", self.count, self.limit)


def forward_search[S, A](
    model: CcmdpModel[S, A],
    f: RewardFunctional = f_one,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> ForwardSearchResult[S, A]:
    horizon = model.horizon
    gamma = model.discount
    counter = _Counter(node_budget)

    def leaf_holds(history: StateHistory[S, A]) -> bool:
        try:
            return local_constraint_holds(history, model, f)
        except DegenerateRisk:
            return False

    def search(history: StateHistory[S, A]) -> PolicyNode[S, A] | None:
        counter.tick()
        if history.t >= horizon:
            return PolicyNode(history=history, value=0.0) if leaf_holds(history) else None

        best: PolicyNode[S, A] | None = None
        best_value = 0.0
        for index, action in enumerate(model.actions(history)):
            outcomes = model.outcomes(history, action)
            q = outcomes.failure_probability * outcomes.failure_reward
            children: dict[int, PolicyNode[S, A]] = {}
            for branch, outcome in enumerate(outcomes.safe_outcomes):
                child = search(history.extend(action, index, outcomes, branch))
                if child is None:
                    break
                assert child.value is not None
                q += outcome.probability * (outcome.reward + gamma * child.value)
                children[branch] = child
            else:
                # strict comparison keeps the lowest action index on ties
                if best is None or q > best_value:
                    best_value = q
                    best = PolicyNode(
                        history=history,
                        action=action,
                        action_index=index,
                        branches=tuple(range(len(outcomes.safe_outcomes))),
                        value=q,
                        children=children,
                    )
        return best

    root = search(StateHistory.initial(model.initial_state))
    logger.info(
        "forward search explored %d histories, root value %s",
        counter.count,
        "infeasible" if root is None else f"{root.value:.6g}",
    )
    if root is None:
        return ForwardSearchResult(policy=None, root_value=None, explored_history_count=counter.count)
    return ForwardSearchResult(
        policy=PolicyTree(root=root, horizon=horizon),
        root_value=root.value,
        explored_history_count=counter.count,
    )


def count_reachable_histories(model: CcmdpModel[Any, Any], node_budget: int = DEFAULT_NODE_BUDGET) -> int:
    """Number of safe histories of every length from 0 to the horizon."""
    counter = _Counter(node_budget)
    stack: list[StateHistory[Any, Any]] = [StateHistory.initial(model.initial_state)]
    while stack:
        history = stack.pop()
        counter.tick()
        if history.t >= model.horizon:
            continue
        for index, action in enumerate(model.actions(history)):
            outcomes = model.outcomes(history, action)
            for branch in range(len(outcomes.safe_outcomes)):
                stack.append(history.extend(action, index, outcomes, branch))
    return counter.count
