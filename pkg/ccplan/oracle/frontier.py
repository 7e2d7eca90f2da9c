"""Exact chance-constrained optimisation over the Pareto frontier of (E[g], er).

Both the expected reward and the execution risk of a policy are positively weighted
sums of the same quantities at its children. Replacing a sub-policy with one that
has at least its reward and at most its risk therefore never hurts the root under a
nondecreasing risk bound, so each history only needs to keep its nondominated pairs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import numpy.typing as npt

from ccplan.core.history import StateHistory
from ccplan.core.model import CcmdpModel, OutcomeSet
from ccplan.core.policy import PolicyNode, PolicyTree
from ccplan.core.risk_bound import RiskBound
from ccplan.errors import BudgetExceeded, Infeasible
from ccplan.oracle.enumeration import PolicyEvaluation
from ccplan.risk import CONSTRAINT_SLACK

logger = logging.getLogger(__name__)

DEFAULT_FRONTIER_BUDGET = 5_000_000

type FloatArray = npt.NDArray[np.float64]
# (action index, frontier point chosen at each safe branch)
type Choice = tuple[int, tuple[int, ...]]


@dataclass(slots=True)
class _FrontierNode[S, A]:
    history: StateHistory[S, A]
    rewards: FloatArray
    risks: FloatArray
    choices: list[Choice] = field(default_factory=list)
    actions: list[A] = field(default_factory=list)
    outcomes: dict[int, OutcomeSet[S]] = field(default_factory=dict)
    children: dict[int, list[_FrontierNode[S, A]]] = field(default_factory=dict)


def prune(rewards: FloatArray, risks: FloatArray) -> npt.NDArray[np.intp]:
    """Indices of the nondominated points, highest reward first.

    Equal points keep the earliest occurrence.
    """
    if rewards.size == 0:
        return np.zeros(0, dtype=np.intp)
    order = np.lexsort((risks, -rewards))
    sorted_risks = risks[order]
    running_min = np.minimum.accumulate(sorted_risks)
    previous = np.concatenate(([np.inf], running_min[:-1]))
    return order[sorted_risks < previous]


class ParetoFrontier[S, A]:
    _model: CcmdpModel[S, A]
    _root: _FrontierNode[S, A]

    def __init__(self, model: CcmdpModel[S, A], root: _FrontierNode[S, A]) -> None:
        self._model = model
        self._root = root

    def __len__(self) -> int:
        return int(self._root.rewards.size)

    def points(self) -> list[tuple[float, float]]:
        """(E[g], er) of every nondominated policy, highest reward first."""
        return [(float(e), float(r)) for e, r in zip(self._root.rewards, self._root.risks)]

    def best(self, bound: RiskBound | None = None) -> tuple[PolicyTree[S, A], PolicyEvaluation]:
        """Highest-reward policy with er <= Delta(E[g]); ``bound`` defaults to the model's."""
        delta = bound if bound is not None else self._model.risk_bound
        for index, (reward, risk) in enumerate(self.points()):
            limit = delta(reward)
            if risk <= limit + CONSTRAINT_SLACK:
                evaluation = PolicyEvaluation(expected_reward=reward, execution_risk=risk, risk_limit=limit)
                return self.policy(index), evaluation
        raise Infeasible("no policy satisfies the risk bound")

    def policy(self, index: int) -> PolicyTree[S, A]:
        return PolicyTree(root=self._rebuild(self._root, index), horizon=self._model.horizon)

    def _rebuild(self, node: _FrontierNode[S, A], index: int) -> PolicyNode[S, A]:
        result = PolicyNode(history=node.history, value=float(node.rewards[index]))
        if not node.choices:
            return result
        action_index, picks = node.choices[index]
        result.action = node.actions[action_index]
        result.action_index = action_index
        result.branches = tuple(range(len(picks)))
        children = node.children[action_index]
        for branch, pick in enumerate(picks):
            result.children[branch] = self._rebuild(children[branch], pick)
        return result


def _combine(
    base_reward: float,
    base_risk: float,
    weights: Sequence[float],
    rewards: Sequence[FloatArray],
    risks: Sequence[FloatArray],
) -> tuple[FloatArray, FloatArray, list[tuple[int, ...]]]:
    """Nondominated (reward, risk) pairs of ``base + sum_b w_b * child_b`` over every pick of child points."""
    acc_reward = np.array([base_reward])
    acc_risk = np.array([base_risk])
    picks: list[tuple[int, ...]] = [()]
    for weight, child_rewards, child_risks in zip(weights, rewards, risks):
        sum_reward = np.add.outer(acc_reward, weight * child_rewards).ravel()
        sum_risk = np.add.outer(acc_risk, weight * child_risks).ravel()
        width = child_rewards.size
        keep = prune(sum_reward, sum_risk)
        acc_reward = sum_reward[keep]
        acc_risk = sum_risk[keep]
        picks = [picks[int(k) // width] + (int(k) % width,) for k in keep]
    return acc_reward, acc_risk, picks


def pareto_frontier[S, A](model: CcmdpModel[S, A], node_budget: int = DEFAULT_FRONTIER_BUDGET) -> ParetoFrontier[S, A]:
    gamma = model.discount
    visited = 0

    def build(history: StateHistory[S, A]) -> _FrontierNode[S, A]:
        nonlocal visited
        visited += 1
        if visited > node_budget:
            raise BudgetExceeded("frontier histories", visited, node_budget)
        if history.t >= model.horizon:
            return _FrontierNode(history=history, rewards=np.zeros(1), risks=np.zeros(1))

        node: _FrontierNode[S, A] = _FrontierNode(history=history, rewards=np.zeros(0), risks=np.zeros(0))
        node.actions = list(model.actions(history))
        all_rewards: list[FloatArray] = []
        all_risks: list[FloatArray] = []
        for index, action in enumerate(node.actions):
            outcomes = model.outcomes(history, action)
            node.outcomes[index] = outcomes
            children = [
                build(history.extend(action, index, outcomes, branch)) for branch in range(len(outcomes.safe_outcomes))
            ]
            node.children[index] = children
            if any(child.rewards.size == 0 for child in children):
                continue
            probabilities = [o.probability for o in outcomes.safe_outcomes]
            rewards, risks, picks = _combine(
                base_reward=outcomes.failure_probability * outcomes.failure_reward
                + sum(p * o.reward for p, o in zip(probabilities, outcomes.safe_outcomes)),
                base_risk=outcomes.failure_probability,
                weights=probabilities,
                rewards=[gamma * child.rewards for child in children],
                risks=[child.risks for child in children],
            )
            all_rewards.append(rewards)
            all_risks.append(risks)
            node.choices.extend((index, pick) for pick in picks)

        if not all_rewards:
            node.choices = []
            return node

        rewards = np.concatenate(all_rewards)
        risks = np.concatenate(all_risks)
        keep = prune(rewards, risks)
        node.rewards = rewards[keep]
        node.risks = risks[keep]
        node.choices = [node.choices[int(k)] for k in keep]
        return node

    root = build(StateHistory.initial(model.initial_state))
    logger.debug("pareto frontier over %d histories has %d root points", visited, root.rewards.size)
    return ParetoFrontier(model, root)
