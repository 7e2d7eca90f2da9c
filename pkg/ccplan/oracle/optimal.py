from __future__ import annotations

import logging
from typing import Literal

from ccplan.core.model import CcmdpModel
from ccplan.core.policy import PolicyTree
from ccplan.errors import Infeasible
from ccplan.oracle.enumeration import (
    DEFAULT_POLICY_BUDGET,
    PolicyEvaluation,
    count_policies,
    enumerate_policies,
    evaluate_policy,
)
from ccplan.oracle.frontier import DEFAULT_FRONTIER_BUDGET, pareto_frontier

logger = logging.getLogger(__name__)

type OracleMethod = Literal["auto", "enumerate", "frontier"]


def optimal_policy[S, A](
    model: CcmdpModel[S, A],
    method: OracleMethod = "auto",
    budget: int = DEFAULT_POLICY_BUDGET,
    node_budget: int = DEFAULT_FRONTIER_BUDGET,
) -> tuple[PolicyTree[S, A], PolicyEvaluation]:
    """argmax E[g] subject to er <= Delta(E[g]) over deterministic history-dependent policies.

    ``auto`` enumerates when the policy count fits ``budget`` and falls back to the
    Pareto frontier otherwise. Enumeration breaks ties by the first policy enumerated.
    """
    if method == "auto":
        method = "enumerate" if count_policies(model) <= budget else "frontier"
        logger.debug("oracle method %s", method)

    if method == "frontier":
        return pareto_frontier(model, node_budget=node_budget).best()

    best: tuple[PolicyTree[S, A], PolicyEvaluation] | None = None
    for policy in enumerate_policies(model, budget=budget):
        evaluation = evaluate_policy(model, policy)
        if not evaluation.feasible:
            continue
        if best is None or evaluation.expected_reward > best[1].expected_reward:
            best = (policy, evaluation)

    if best is None:
        raise Infeasible("no policy satisfies the risk bound")
    return best
