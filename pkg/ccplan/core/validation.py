from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ccplan.core.history import StateHistory
from ccplan.core.model import CcmdpModel
from ccplan.errors import BudgetExceeded

DEFAULT_NODE_BUDGET = 1_000_000


@dataclass(frozen=True, slots=True)
class Violation:
    history: str
    action: str | None
    message: str


def validate_model(
    model: CcmdpModel[Any, Any],
    max_depth: int | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> list[Violation]:
    """Walk every safe history up to ``max_depth`` and report contract violations."""
    depth = model.horizon if max_depth is None else max_depth
    if depth > model.horizon:
        raise ValueError(f"max_depth {depth} exceeds horizon {model.horizon}")

    violations: list[Violation] = []
    stack: list[StateHistory[Any, Any]] = [StateHistory.initial(model.initial_state)]
    visited = 0

    while stack:
        history = stack.pop()
        visited += 1
        if visited > node_budget:
            raise BudgetExceeded("validated histories", visited, node_budget)
        if history.t >= depth:
            continue

        key = history.render_key()
        actions = list(model.actions(history))
        if list(model.actions(history)) != actions:
            violations.append(Violation(key, None, "actions() is not deterministic"))

        for index, action in enumerate(actions):
            outcomes = model.outcomes(history, action)
            if model.outcomes(history, action) != outcomes:
                violations.append(Violation(key, repr(action), "outcomes() is not deterministic"))
            problems = outcomes.problems()
            violations.extend(Violation(key, repr(action), problem) for problem in problems)
            if problems:
                continue
            for branch in range(len(outcomes.safe_outcomes)):
                stack.append(history.extend(action, index, outcomes, branch))

    return violations
