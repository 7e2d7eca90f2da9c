from __future__ import annotations

import logging
import statistics
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from ccplan.core.rewards import functional
from ccplan.core.risk_bound import LinearBound
from ccplan.errors import BudgetExceeded, Infeasible
from ccplan.harness.config import RunConfig, build_model
from ccplan.harness.results import PolicyRecord, RunResult
from ccplan.harness.runner import run_replicates
from ccplan.oracle.frontier import pareto_frontier
from ccplan.oracle.penalty import PenaltyGap, parse_m_range, penalty_gap
from ccplan.planners.budget import SampleBudget
from ccplan.planners.forward_search import forward_search

logger = logging.getLogger(__name__)

ALPHA_COLUMNS = ["alpha", "optimal_reward", "forward_search_reward", "suboptimality_percent", "status"]
CONVERGENCE_COLUMNS = [
    "budget",
    "replicates",
    "mean_relative_error",
    "policy_match_rate",
    "complete_rate",
    "no_solution_rate",
]
PENALTY_COLUMNS = ["m", "selected_action", "optimal_action"]

type ReplicateRunner = Callable[[RunConfig], list[RunResult]]


def alpha_grid(start: float, stop: float, count: int) -> list[float]:
    return [float(a) for a in np.linspace(start, stop, count)]


def sweep_alpha(config: RunConfig, alphas: Sequence[float]) -> list[dict[str, Any]]:
    """Oracle optimum against forward search for each linear bound ``Delta(x) = alpha x``.

    The Pareto frontier does not depend on the bound, so it is built once.
    """
    f = functional(config.functional)
    rows: list[dict[str, Any]] = []
    try:
        frontier = pareto_frontier(build_model(config))
    except BudgetExceeded as exc:
        logger.warning("alpha sweep: %s", exc)
        return [{"alpha": alpha, "status": "budget-exceeded"} for alpha in alphas]

    for alpha in alphas:
        bound = LinearBound(alpha=alpha)
        row: dict[str, Any] = {"alpha": alpha}
        try:
            _, best = frontier.best(bound)
        except Infeasible:
            row["status"] = "infeasible"
            rows.append(row)
            continue
        found = forward_search(build_model(config.model_copy(update={"delta": bound})), f)
        row["optimal_reward"] = best.expected_reward
        if found.root_value is None:
            row["status"] = "no-solution"
        else:
            row["forward_search_reward"] = found.root_value
            gap = best.expected_reward - found.root_value
            row["suboptimality_percent"] = 100.0 * gap / best.expected_reward if best.expected_reward else 0.0
            row["status"] = "ok"
        rows.append(row)
        logger.debug("alpha %.6g: %s", alpha, row)
    return rows


def _action_map(record: PolicyRecord | None) -> dict[str, int]:
    if record is None:
        return {}
    found: dict[str, int] = {}
    stack = [record]
    while stack:
        node = stack.pop()
        if node.action_index is not None:
            found[node.key] = node.action_index
        stack.extend(node.children.values())
    return found


@dataclass(frozen=True, slots=True)
class ConvergenceRow:
    budget: int
    replicates: int
    mean_relative_error: float
    policy_match_rate: float
    complete_rate: float
    no_solution_rate: float


def convergence(
    config: RunConfig,
    budgets: Sequence[int],
    runner: ReplicateRunner = run_replicates,
) -> list[ConvergenceRow]:
    """Tree search error against the forward search value as the sample budget grows.

    Complete policies are scored by their exact expected reward and incomplete ones
    by the root estimate; a run without any policy counts as a full miss.
    """
    model = build_model(config)
    truth = forward_search(model, functional(config.functional))
    if truth.policy is None or truth.root_value is None:
        raise Infeasible("forward search has no solution, so there is nothing to converge to")
    reference = truth.policy.action_map()
    scale = abs(truth.root_value) or 1.0

    rows: list[ConvergenceRow] = []
    for budget in budgets:
        results = runner(config.model_copy(update={"planner": "mcts", "budget": SampleBudget.samples(budget)}))
        errors: list[float] = []
        matches = complete = missing = 0
        for result in results:
            if result.evaluation is not None:
                value: float | None = result.evaluation.expected_reward
            else:
                value = result.root_value
            if value is None:
                missing += 1
                errors.append(1.0)
                continue
            errors.append(abs(value - truth.root_value) / scale)
            complete += result.complete
            matches += result.complete and _action_map(result.policy) == reference
        count = len(results)
        rows.append(
            ConvergenceRow(
                budget=budget,
                replicates=count,
                mean_relative_error=statistics.fmean(errors) if errors else 1.0,
                policy_match_rate=matches / count,
                complete_rate=complete / count,
                no_solution_rate=missing / count,
            )
        )
        logger.info("budget %d: %s", budget, rows[-1])
    return rows


def penalty_report(config: RunConfig) -> tuple[PenaltyGap, list[dict[str, Any]]]:
    gap = penalty_gap(build_model(config), parse_m_range(config.m_range))
    rows = [
        {"m": m, "selected_action": "" if index is None else index, "optimal_action": gap.optimal_action_index}
        for m, index in gap.selections
    ]
    return gap, rows
