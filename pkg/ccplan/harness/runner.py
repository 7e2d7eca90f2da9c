from __future__ import annotations

import logging
import time
from dataclasses import asdict
from typing import Any

from ccplan.core.model import CcmdpModel
from ccplan.core.policy import PolicyTree
from ccplan.core.rewards import functional
from ccplan.errors import Infeasible, InvalidConfig, NoSolution, VerificationFailure
from ccplan.harness.config import RunConfig, build_model
from ccplan.harness.results import ExactEvaluation, PolicyRecord, RunResult
from ccplan.oracle.enumeration import evaluate_policy
from ccplan.oracle.optimal import optimal_policy
from ccplan.planners.forward_search import forward_search
from ccplan.planners.tree_search import TreeSearch
from ccplan.risk import audit_policy

logger = logging.getLogger(__name__)


def _base_fields(config: RunConfig, index: int) -> dict[str, Any]:
    return {
        "config": config.model_dump(mode="json"),
        "replicate": index,
        "seed": config.replicate_seed(index),
        "domain": config.domain.kind,
        "planner": config.planner,
        "horizon": config.horizon,
        "delta": config.risk_bound().describe(),
        "functional": config.functional,
        "budget": config.budget.describe(),
    }


def _evaluate(model: CcmdpModel[Any, Any], policy: PolicyTree[Any, Any]) -> ExactEvaluation:
    evaluation = evaluate_policy(model, policy)
    return ExactEvaluation(
        expected_reward=evaluation.expected_reward,
        execution_risk=evaluation.execution_risk,
        risk_limit=evaluation.risk_limit,
        feasible=evaluation.feasible,
    )


def run_replicate(config: RunConfig, index: int) -> RunResult:
    """Run the configured planner once with the replicate's seed."""
    model = build_model(config)
    f = functional(config.functional)
    fields = _base_fields(config, index)
    started = time.perf_counter()

    policy: PolicyTree[Any, Any] | None = None
    root_value: float | None = None
    complete = False
    stats: dict[str, float | int] = {}
    outcome = "ok"
    evaluation: ExactEvaluation | None = None

    match config.planner:
        case "forward-search":
            found = forward_search(model, f)
            stats["explored_histories"] = found.explored_history_count
            if found.policy is None:
                outcome = "no-solution"
            else:
                policy, root_value, complete = found.policy, found.root_value, True
        case "mcts":
            search = TreeSearch(model, f=f, c=config.c, seed=fields["seed"])
            try:
                result = search.run(config.budget)
                policy, root_value, complete = result.policy, result.root_value, result.complete
            except NoSolution:
                outcome = "no-solution"
            stats.update(asdict(search.stats))
        case "oracle":
            try:
                policy, exact = optimal_policy(model, method=config.oracle_method)
                root_value, complete = exact.expected_reward, True
            except Infeasible:
                outcome = "infeasible"
        case "penalty-sweep":
            raise InvalidConfig("the penalty sweep produces a report, not a policy; use the penalty-gap command")

    if policy is not None and complete and config.evaluate:
        evaluation = _evaluate(model, policy)
    # the oracle optimises the policy-level constraint only, so its leaves are not audited
    violations: list[str] = []
    if policy is not None and config.planner != "oracle":
        violations = audit_policy(model, policy, f)

    elapsed = time.perf_counter() - started
    logger.info("replicate %d (%s): outcome %s, root value %s", index, config.planner, outcome, root_value)
    return RunResult(
        **fields,
        root_value=root_value,
        complete=complete,
        policy=None if policy is None else PolicyRecord.from_policy(policy),
        evaluation=evaluation,
        audit_violations=violations,
        stats=stats,
        elapsed_seconds=elapsed,
        outcome=outcome,
    )


def check_result(result: RunResult) -> None:
    """A complete policy must satisfy the chance constraint when evaluated exactly."""
    if result.complete and result.evaluation is not None and not result.evaluation.feasible:
        raise VerificationFailure(
            f"replicate {result.replicate}: complete policy has er {result.evaluation.execution_risk:.6g} "
            f"above the bound {result.evaluation.risk_limit:.6g}"
        )
    if result.audit_violations:
        raise VerificationFailure(
            f"replicate {result.replicate}: policy leaves violate the local constraint: {result.audit_violations[:5]}"
        )


def run_replicates(config: RunConfig) -> list[RunResult]:
    return [run_replicate(config, index) for index in range(config.replicates)]
