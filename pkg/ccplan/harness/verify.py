"""Randomised property suites run by ``ccplan verify``.

Each suite draws seeded random instances and checks one guarantee exactly:

- ``lemma1``: safe completions weighted by p(h) / prod(1 - r) sum to one
- ``lemma2``: the expected sequence execution risk equals the execution risk
- ``theorem1``: complete policies from both planners satisfy er <= Delta(E[g])
- ``counts``: tree search visit counts stay consistent after every sample and after cleanup
- ``dominance``: the oracle optimum is never below the forward search value
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Literal, Sequence

import numpy as np

from ccplan.core.history import StateHistory
from ccplan.core.model import CcmdpModel
from ccplan.core.policy import PolicyNode, PolicyTree
from ccplan.core.rewards import f_one
from ccplan.errors import BudgetExceeded, Infeasible, NoSolution
from ccplan.domains.random_instance import sample_random_model
from ccplan.oracle.enumeration import evaluate_policy
from ccplan.oracle.optimal import optimal_policy
from ccplan.planners.budget import SampleBudget
from ccplan.planners.forward_search import forward_search
from ccplan.planners.tree_search import TreeSearch
from ccplan.risk import (
    SerValue,
    completions,
    execution_risk_exact,
    normalized_safe_mass,
    sequence_execution_risk,
)

logger = logging.getLogger(__name__)

type SuiteName = Literal["lemma1", "lemma2", "theorem1", "counts", "dominance"]
type SerFunc = Callable[[StateHistory[Any, Any], CcmdpModel[Any, Any], int], SerValue]

SUITES: tuple[SuiteName, ...] = ("lemma1", "lemma2", "theorem1", "counts", "dominance")
TOLERANCE = 1e-9
MAX_COMPLETIONS = 500


def ser_without_denominator(history: StateHistory[Any, Any], model: CcmdpModel[Any, Any], start: int = 0) -> SerValue:
    """1 - prod(1 - r): a plausible but wrong sequence risk that ``lemma2`` must reject."""
    if history.failed:
        return SerValue(0.0, True)
    return SerValue(-math.expm1(math.fsum(math.log1p(-step.risk) for step in history.steps[start:])), False)


MUTANTS: dict[str, SerFunc] = {"ser-numerator": ser_without_denominator}


@dataclass(slots=True)
class SuiteReport:
    name: str
    instances: int = 0
    skipped: int = 0
    max_residual: float = 0.0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, residual: float, seed: int, what: str) -> None:
        self.max_residual = max(self.max_residual, residual)
        if residual > TOLERANCE:
            self.failures.append(f"seed {seed}: {what} off by {residual:.3g}")


def random_policy[S, A](model: CcmdpModel[S, A], rng: np.random.Generator) -> PolicyTree[S, A] | None:
    """A complete policy picking uniformly among actions; None if it runs into a dead end."""

    def build(history: StateHistory[S, A]) -> PolicyNode[S, A] | None:
        if history.failed or history.t >= model.horizon:
            return PolicyNode(history=history)
        actions = list(model.actions(history))
        if not actions:
            return None
        index = int(rng.integers(len(actions)))
        outcomes = model.outcomes(history, actions[index])
        node = PolicyNode(
            history=history,
            action=actions[index],
            action_index=index,
            branches=tuple(range(len(outcomes.safe_outcomes))),
        )
        for branch in node.branches:
            child = build(history.extend(actions[index], index, outcomes, branch))
            if child is None:
                return None
            node.children[branch] = child
        return node

    root = build(StateHistory.initial(model.initial_state))
    return None if root is None else PolicyTree(root=root, horizon=model.horizon)


def _random_case(seed: int) -> tuple[CcmdpModel[Any, Any], PolicyTree[Any, Any]] | None:
    model = sample_random_model(seed)
    policy = random_policy(model, np.random.default_rng(seed))
    if policy is None:
        return None
    try:
        count = sum(1 for _ in completions(model, policy, budget=MAX_COMPLETIONS))
    except BudgetExceeded:
        return None
    logger.debug("seed %d: horizon %d, %d completions", seed, model.horizon, count)
    return model, policy


def lemma1_suite(seeds: Sequence[int]) -> SuiteReport:
    report = SuiteReport("lemma1")
    for seed in seeds:
        case = _random_case(seed)
        if case is None:
            report.skipped += 1
            continue
        model, policy = case
        report.instances += 1
        report.record(abs(normalized_safe_mass(model, policy) - 1.0), seed, "normalised safe mass")
    return report


def lemma2_suite(seeds: Sequence[int], ser: SerFunc = sequence_execution_risk) -> SuiteReport:
    report = SuiteReport("lemma2")
    for seed in seeds:
        case = _random_case(seed)
        if case is None:
            report.skipped += 1
            continue
        model, policy = case
        report.instances += 1
        # the root plus every depth-one history, so conditioning on a prefix is exercised too
        for node in [policy.root, *policy.root.children.values()]:
            start = node.history
            expected = math.fsum(
                leaf.path_probability(start.t) * ser(leaf, model, start.t).value
                for leaf in completions(model, policy, start)
            )
            exact = execution_risk_exact(model, policy, start)
            report.record(abs(expected - exact), seed, f"E[ser] at {start.render_key() or 'root'}")
    return report


def theorem1_suite(seeds: Sequence[int], budget: SampleBudget) -> SuiteReport:
    report = SuiteReport("theorem1")
    for seed in seeds:
        model = sample_random_model(seed)
        report.instances += 1
        candidates: list[tuple[str, PolicyTree[Any, Any]]] = []
        found = forward_search(model, f_one)
        if found.policy is not None:
            candidates.append(("forward search", found.policy))
        try:
            searched = TreeSearch(model, f=f_one, seed=seed).run(budget)
            if searched.complete:
                candidates.append(("tree search", searched.policy))
        except NoSolution:
            pass
        for name, policy in candidates:
            evaluation = evaluate_policy(model, policy)
            excess = evaluation.execution_risk - evaluation.risk_limit
            report.record(max(excess, 0.0), seed, f"{name} execution risk")
    return report


def counts_suite(seeds: Sequence[int], max_samples: int = 300) -> SuiteReport:
    report = SuiteReport("counts")
    for seed in seeds:
        model = sample_random_model(seed)
        rng = np.random.default_rng(seed)
        search: TreeSearch[Any, Any] = TreeSearch(model, f=f_one, seed=seed)
        problems: list[str] = []
        search.on_sample(lambda _success, search=search, problems=problems: problems.extend(search.audit_counts()))
        report.instances += 1
        try:
            search.run(SampleBudget.samples(int(rng.integers(1, max_samples + 1))))
        except NoSolution:
            pass
        problems.extend(search.audit_counts())
        if problems:
            report.failures.append(f"seed {seed}: {problems[0]}")
    return report


def dominance_suite(seeds: Sequence[int]) -> SuiteReport:
    report = SuiteReport("dominance")
    for seed in seeds:
        model = sample_random_model(seed, max_horizon=3)
        found = forward_search(model, f_one)
        if found.root_value is None:
            report.skipped += 1
            continue
        report.instances += 1
        try:
            _, best = optimal_policy(model)
        except Infeasible:
            report.failures.append(f"seed {seed}: oracle found no feasible policy but forward search did")
            continue
        report.record(max(found.root_value - best.expected_reward, 0.0), seed, "forward search above the oracle")
    return report


def run_suites(
    suites: Sequence[SuiteName],
    seed: int = 0,
    instances: int = 50,
    budget: SampleBudget | None = None,
    mutant: str | None = None,
) -> list[SuiteReport]:
    seeds = [seed + i for i in range(instances)]
    budget = budget if budget is not None else SampleBudget.samples(2_000)
    ser = MUTANTS[mutant] if mutant is not None else sequence_execution_risk

    reports: list[SuiteReport] = []
    for name in suites:
        match name:
            case "lemma1":
                report = lemma1_suite(seeds)
            case "lemma2":
                report = lemma2_suite(seeds, ser)
            case "theorem1":
                report = theorem1_suite(seeds, budget)
            case "counts":
                report = counts_suite(seeds)
            case "dominance":
                report = dominance_suite(seeds)
        logger.info(
            "suite %s: %d instances, %d skipped, %d failures, max residual %.3g",
            report.name,
            report.instances,
            report.skipped,
            len(report.failures),
            report.max_residual,
        )
        reports.append(report)
    return reports
