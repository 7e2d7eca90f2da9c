"""Exhaustive enumeration of deterministic history-dependent policies.

Only usable on tiny instances: the number of policies grows doubly exponentially
with the horizon, so the count is computed first and checked against a budget.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator

from ccplan.core.history import StateHistory
from ccplan.core.model import CcmdpModel
from ccplan.core.policy import PolicyNode, PolicyTree
from ccplan.errors import BudgetExceeded
from ccplan.risk import CONSTRAINT_SLACK, execution_risk_exact, expected_reward_exact

logger = logging.getLogger(__name__)

DEFAULT_POLICY_BUDGET = 1_000_000


@dataclass(frozen=True, slots=True)
class PolicyEvaluation:
    expected_reward: float
    execution_risk: float
    # Delta(E[g]) for the model the policy was evaluated on
    risk_limit: float

    @property
    def feasible(self) -> bool:
        return self.execution_risk <= self.risk_limit + CONSTRAINT_SLACK


def evaluate_policy[S, A](model: CcmdpModel[S, A], policy: PolicyTree[S, A]) -> PolicyEvaluation:
    expected = expected_reward_exact(model, policy)
    return PolicyEvaluation(
        expected_reward=expected,
        execution_risk=execution_risk_exact(model, policy),
        risk_limit=model.risk_bound(expected),
    )


def count_policies[S, A](model: CcmdpModel[S, A], history: StateHistory[S, A] | None = None) -> int:
    """Number of complete deterministic policies from ``history`` (the initial state by default)."""

    def count(current: StateHistory[S, A]) -> int:
        if current.failed or current.t >= model.horizon:
            return 1
        total = 0
        for index, action in enumerate(model.actions(current)):
            outcomes = model.outcomes(current, action)
            product = 1
            for branch in range(len(outcomes.safe_outcomes)):
                product *= count(current.extend(action, index, outcomes, branch))
                if product == 0:
                    break
            total += product
        return total

    return count(history if history is not None else StateHistory.initial(model.initial_state))


def enumerate_policies[S, A](
    model: CcmdpModel[S, A],
    budget: int = DEFAULT_POLICY_BUDGET,
) -> Iterator[PolicyTree[S, A]]:
    """Every complete policy exactly once, depth first with actions in model order."""
    total = count_policies(model)
    if total > budget:
        raise BudgetExceeded("policies", total, budget)
    logger.debug("enumerating %d policies", total)

    def subpolicies(history: StateHistory[S, A]) -> Iterator[PolicyNode[S, A]]:
        if history.failed or history.t >= model.horizon:
            yield PolicyNode(history=history, value=0.0)
            return
        for index, action in enumerate(model.actions(history)):
            outcomes = model.outcomes(history, action)
            branches = tuple(range(len(outcomes.safe_outcomes)))
            options = [list(subpolicies(history.extend(action, index, outcomes, b))) for b in branches]
            for combination in itertools.product(*options):
                yield PolicyNode(
                    history=history,
                    action=action,
                    action_index=index,
                    branches=branches,
                    children=dict(zip(branches, combination)),
                )

    for root in subpolicies(StateHistory.initial(model.initial_state)):
        yield PolicyTree(root=root, horizon=model.horizon)
