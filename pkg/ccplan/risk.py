"""Sequence execution risk, the local constraint and exact policy risk.

For a safe history the sequence execution risk is ``(1 - P) / P`` where ``P`` is the
probability of surviving every action taken along it; failing histories have zero
sequence execution risk. Its expectation under any policy equals the policy's
execution risk, which is what lets a per-history test bound a policy-level risk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterator

from ccplan.core.history import FAILURE_BRANCH, StateHistory
from ccplan.core.model import CcmdpModel, OutcomeSet
from ccplan.core.policy import PolicyNode, PolicyTree
from ccplan.core.rewards import RewardFunctional
from ccplan.errors import BudgetExceeded, DegenerateRisk, IncompletePolicy

CONSTRAINT_SLACK = 1e-12
DEFAULT_COMPLETION_BUDGET = 1_000_000


@dataclass(frozen=True, slots=True)
class SerValue:
    value: float
    is_failing_history: bool


def sequence_execution_risk(history: StateHistory[Any, Any], model: CcmdpModel[Any, Any], start: int = 0) -> SerValue:
    """ser of the suffix of ``history`` beginning at step ``start``."""
    if history.failed:
        return SerValue(0.0, True)

    log_survival = 0.0
    for step in history.steps[start:]:
        if step.risk >= 1.0:
            raise DegenerateRisk(history.render_key())
        log_survival += math.log1p(-step.risk)

    # 1/P - 1 without the cancellation of (1 - P) / P for small risks
    return SerValue(math.expm1(-log_survival), False)


def local_constraint_holds(
    history: StateHistory[Any, Any],
    model: CcmdpModel[Any, Any],
    f: RewardFunctional,
) -> bool:
    if history.failed:
        return True
    ser = sequence_execution_risk(history, model).value
    return ser <= model.risk_bound(f(history, model)) + CONSTRAINT_SLACK


def _start_node[S, A](policy: PolicyTree[S, A], history: StateHistory[S, A] | None) -> PolicyNode[S, A]:
    if history is None:
        return policy.root
    node = policy.node_at(history.render_key())
    if node is None:
        raise IncompletePolicy(history.render_key())
    return node


def _policy_step[S, A](model: CcmdpModel[S, A], node: PolicyNode[S, A]) -> tuple[A, int, OutcomeSet[S]]:
    if node.action is None or node.action_index is None:
        raise IncompletePolicy(node.history.render_key())
    return node.action, node.action_index, model.outcomes(node.history, node.action)


def _child[S, A](node: PolicyNode[S, A], branch: int) -> PolicyNode[S, A]:
    child = node.children.get(branch)
    if child is None:
        raise IncompletePolicy(f"{node.history.render_key()}/{node.action_index}.{branch}")
    return child


def execution_risk_exact[S, A](
    model: CcmdpModel[S, A],
    policy: PolicyTree[S, A],
    history: StateHistory[S, A] | None = None,
) -> float:
    """er(h, pi) = r + sum over safe outcomes of p * er(child), zero at the horizon."""

    def er(node: PolicyNode[S, A]) -> float:
        if node.history.failed or node.history.t >= model.horizon:
            return 0.0
        _, _, outcomes = _policy_step(model, node)
        safe = math.fsum(
            outcome.probability * er(_child(node, branch)) for branch, outcome in enumerate(outcomes.safe_outcomes)
        )
        return outcomes.failure_probability + safe

    return er(_start_node(policy, history))


def expected_reward_exact[S, A](
    model: CcmdpModel[S, A],
    policy: PolicyTree[S, A],
    history: StateHistory[S, A] | None = None,
) -> float:
    """Expected discounted reward to go, failure-branch rewards included."""
    gamma = model.discount

    def value(node: PolicyNode[S, A]) -> float:
        if node.history.failed or node.history.t >= model.horizon:
            return 0.0
        _, _, outcomes = _policy_step(model, node)
        safe = math.fsum(
            outcome.probability * (outcome.reward + gamma * value(_child(node, branch)))
            for branch, outcome in enumerate(outcomes.safe_outcomes)
        )
        return outcomes.failure_probability * outcomes.failure_reward + safe

    return value(_start_node(policy, history))


def completions[S, A](
    model: CcmdpModel[S, A],
    policy: PolicyTree[S, A],
    history: StateHistory[S, A] | None = None,
    budget: int = DEFAULT_COMPLETION_BUDGET,
) -> Iterator[StateHistory[S, A]]:
    """Every full history (safe at the horizon, or failing) the policy can produce from ``history``."""
    stack = [_start_node(policy, history)]
    produced = 0

    while stack:
        node = stack.pop()
        current = node.history
        if current.failed or current.t >= model.horizon:
            produced += 1
            if produced > budget:
                raise BudgetExceeded("policy completions", produced, budget)
            yield current
            continue

        action, action_index, outcomes = _policy_step(model, node)
        if outcomes.failure_probability > 0.0:
            produced += 1
            if produced > budget:
                raise BudgetExceeded("policy completions", produced, budget)
            yield current.extend(action, action_index, outcomes, FAILURE_BRANCH)
        for branch in reversed(range(len(outcomes.safe_outcomes))):
            stack.append(_child(node, branch))


def ser_expectation[S, A](
    model: CcmdpModel[S, A],
    policy: PolicyTree[S, A],
    history: StateHistory[S, A] | None = None,
    budget: int = DEFAULT_COMPLETION_BUDGET,
) -> float:
    """E[ser(H_{t:n}) | h_{0:t}, pi] by exhaustive enumeration of completions."""
    start = _start_node(policy, history).history
    return math.fsum(
        leaf.path_probability(start.t) * sequence_execution_risk(leaf, model, start.t).value
        for leaf in completions(model, policy, start, budget)
    )


def normalized_safe_mass[S, A](
    model: CcmdpModel[S, A],
    policy: PolicyTree[S, A],
    history: StateHistory[S, A] | None = None,
    budget: int = DEFAULT_COMPLETION_BUDGET,
) -> float:
    """Sum over safe completions of p(h) / prod(1 - r_i); identically 1 for any policy."""
    start = _start_node(policy, history).history
    total: list[float] = []
    for leaf in completions(model, policy, start, budget):
        if leaf.failed:
            continue
        survival = math.prod(1.0 - step.risk for step in leaf.steps[start.t :])
        if survival <= 0.0:
            raise DegenerateRisk(leaf.render_key())
        total.append(leaf.path_probability(start.t) / survival)
    return math.fsum(total)


def audit_policy[S, A](model: CcmdpModel[S, A], policy: PolicyTree[S, A], f: RewardFunctional) -> list[str]:
    """Keys of policy leaves whose (possibly partial) history violates the local constraint."""
    violations: list[str] = []
    for leaf in policy.leaves():
        try:
            holds = local_constraint_holds(leaf.history, model, f)
        except DegenerateRisk:
            holds = False
        if not holds:
            violations.append(leaf.history.render_key())
    return violations
