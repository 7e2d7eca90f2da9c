"""The penalty method: fold risk into reward as R - M r and solve without a constraint.

Kept as a comparator. Some instances have a best constrained action that no
penalty weight ever selects.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from ccplan.core.history import StateHistory
from ccplan.core.model import CcmdpModel
from ccplan.core.policy import PolicyNode, PolicyTree
from ccplan.errors import BudgetExceeded, Infeasible, InvalidConfig
from ccplan.oracle.optimal import optimal_policy

logger = logging.getLogger(__name__)

DEFAULT_PENALTY_BUDGET = 1_000_000
TIE_TOLERANCE = 1e-9


@dataclass(frozen=True, slots=True)
class PenaltyChoice[S, A]:
    m: float
    policy: PolicyTree[S, A]
    # value of the policy under the penalised reward
    value: float

    @property
    def root_action_index(self) -> int | None:
        return self.policy.root.action_index


@dataclass(slots=True)
class PenaltyGap:
    optimal_action_index: int | None
    selections: list[tuple[float, int | None]] = field(default_factory=list)
    # (M, action before, action after) wherever the selected root action changes
    transitions: list[tuple[float, int | None, int | None]] = field(default_factory=list)
    # M values at which two root actions are within TIE_TOLERANCE of each other
    ties: list[float] = field(default_factory=list)

    @property
    def selected_actions(self) -> set[int | None]:
        return {index for _, index in self.selections}

    @property
    def recovers_optimum(self) -> bool:
        return self.optimal_action_index in self.selected_actions

    def never_selected(self, action_count: int) -> list[int]:
        return [index for index in range(action_count) if index not in self.selected_actions]


def parse_m_range(text: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included, e.g. ``0:300:1``."""
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise InvalidConfig(f"penalty range must look like start:stop:step, got {text!r}") from exc
    if step <= 0 or stop < start:
        raise InvalidConfig(f"penalty range {text!r} is empty")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def _penalised_policy[S, A](model: CcmdpModel[S, A], m: float, budget: int) -> tuple[PolicyNode[S, A], list[float]]:
    gamma = model.discount
    visited = 0

    def solve(history: StateHistory[S, A]) -> tuple[PolicyNode[S, A], list[float]] | None:
        nonlocal visited
        visited += 1
        if visited > budget:
            raise BudgetExceeded("penalised histories", visited, budget)
        if history.failed or history.t >= model.horizon:
            return PolicyNode(history=history, value=0.0), []

        best: PolicyNode[S, A] | None = None
        best_value = 0.0
        q_values: list[float] = []
        for index, action in enumerate(model.actions(history)):
            outcomes = model.outcomes(history, action)
            # every outcome reward, failure included, loses M r
            q = outcomes.expected_reward - m * outcomes.failure_probability
            children: dict[int, PolicyNode[S, A]] = {}
            for branch, outcome in enumerate(outcomes.safe_outcomes):
                solved = solve(history.extend(action, index, outcomes, branch))
                if solved is None:
                    break
                child = solved[0]
                assert child.value is not None
                q += outcome.probability * gamma * child.value
                children[branch] = child
            else:
                q_values.append(q)
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
        if best is None:
            return None
        return best, q_values

    solved = solve(StateHistory.initial(model.initial_state))
    if solved is None:
        raise Infeasible("every action leads to a dead end")
    return solved


def penalty_sweep[S, A](
    model: CcmdpModel[S, A],
    m_values: Iterable[float],
    budget: int = DEFAULT_PENALTY_BUDGET,
) -> list[PenaltyChoice[S, A]]:
    """Optimal unconstrained policy under R - M r for each M, ties to the lowest action index."""
    choices: list[PenaltyChoice[S, A]] = []
    for m in m_values:
        root, _ = _penalised_policy(model, m, budget)
        assert root.value is not None
        choices.append(PenaltyChoice(m=m, policy=PolicyTree(root=root, horizon=model.horizon), value=root.value))
    return choices


def penalty_gap(model: CcmdpModel[Any, Any], m_values: Sequence[float], budget: int = DEFAULT_PENALTY_BUDGET) -> PenaltyGap:
    """Compare the root actions chosen across a penalty sweep with the constrained optimum."""
    try:
        optimal, _ = optimal_policy(model)
        gap = PenaltyGap(optimal_action_index=optimal.root.action_index)
    except Infeasible:
        gap = PenaltyGap(optimal_action_index=None)

    previous: int | None = None
    for position, m in enumerate(m_values):
        root, q_values = _penalised_policy(model, m, budget)
        index = root.action_index
        gap.selections.append((m, index))
        if position > 0 and index != previous:
            gap.transitions.append((m, previous, index))
        top = sorted(q_values, reverse=True)
        if len(top) > 1 and top[0] - top[1] <= TIE_TOLERANCE:
            gap.ties.append(m)
        previous = index

    logger.info(
        "penalty sweep over %d values selected %s; constrained optimum %s",
        len(gap.selections),
        sorted(i for i in gap.selected_actions if i is not None),
        gap.optimal_action_index,
    )
    return gap
