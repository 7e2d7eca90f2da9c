"""Anytime Monte Carlo tree search under the local risk constraint.

Samples run all the way to the horizon and every visited history stays in the tree.
A horizon history violating ``ser(h) <= Delta(f(h))`` deletes the last action taken,
and so does a history whose actions have all been deleted. Once sampling stops,
cleanup checks the unexplored outcomes of the greedy policy so the returned policy
respects the risk bound over everything it has explored.
"""

from __future__ import annotations

import bisect
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ccplan.core.history import FAILURE_BRANCH, StateHistory
from ccplan.core.model import CcmdpModel, OutcomeSet
from ccplan.core.policy import PolicyNode, PolicyTree
from ccplan.core.rewards import RewardFunctional, f_one
from ccplan.errors import DegenerateRisk, NoActions, NoSolution
from ccplan.planners.budget import SampleBudget
from ccplan.planners.default_policy import DefaultPolicy, UniformRandomPolicy
from ccplan.risk import local_constraint_holds

logger = logging.getLogger(__name__)

DEFAULT_EXPLORATION = math.sqrt(2)


class SearchNode[S, A]:
    """Per-history sampling statistics.

    ``q_values`` only holds actions with at least one completed sample; the value of an
    action that was never sampled is unknown rather than zero.
    """

    __slots__ = (
        "history",
        "visits",
        "sampled",
        "policy_action",
        "deleted",
        "action_visits",
        "q_values",
        "children",
        "_actions",
        "_outcomes",
        "_cumulative",
    )

    history: StateHistory[S, A]
    visits: int
    sampled: bool
    policy_action: int | None
    deleted: set[int]
    action_visits: dict[int, int]
    q_values: dict[int, float]
    children: dict[int, dict[int, SearchNode[S, A]]]
    _actions: list[A] | None
    _outcomes: dict[int, OutcomeSet[S]]
    _cumulative: dict[int, tuple[list[float], list[int]]]

    def __init__(self, history: StateHistory[S, A]) -> None:
        self.history = history
        self.visits = 0
        self.sampled = False
        self.policy_action = None
        self.deleted = set()
        self.action_visits = {}
        self.q_values = {}
        self.children = {}
        self._actions = None
        self._outcomes = {}
        self._cumulative = {}

    def actions(self, model: CcmdpModel[S, A]) -> list[A]:
        if self._actions is None:
            self._actions = list(model.actions(self.history))
        return self._actions

    def outcomes(self, model: CcmdpModel[S, A], index: int) -> OutcomeSet[S]:
        outcomes = self._outcomes.get(index)
        if outcomes is None:
            outcomes = model.outcomes(self.history, self.actions(model)[index])
            self._outcomes[index] = outcomes
        return outcomes

    def remaining(self, model: CcmdpModel[S, A]) -> list[int]:
        return [i for i in range(len(self.actions(model))) if i not in self.deleted]

    def branch_table(self, model: CcmdpModel[S, A], index: int) -> tuple[list[float], list[int]]:
        table = self._cumulative.get(index)
        if table is None:
            outcomes = self.outcomes(model, index)
            weights = [o.probability for o in outcomes.safe_outcomes]
            branches = list(range(len(weights)))
            if outcomes.failure_probability > 0.0:
                weights.append(outcomes.failure_probability)
                branches.append(FAILURE_BRANCH)
            table = (list(np.cumsum(weights, dtype=float)), branches)
            self._cumulative[index] = table
        return table

    def best_action(self) -> int | None:
        """Argmax of Q over sampled actions that are not deleted, lowest index on ties."""
        best: int | None = None
        for index in sorted(self.q_values):
            if index in self.deleted:
                continue
            if best is None or self.q_values[index] > self.q_values[best]:
                best = index
        return best

    def value(self) -> float:
        best = self.best_action()
        return 0.0 if best is None else self.q_values[best]

    def refresh_visits(self) -> None:
        self.visits = sum(n for index, n in self.action_visits.items() if index not in self.deleted)


def uct_select[S, A](node: SearchNode[S, A], c: float) -> int:
    """argmax over non-deleted actions of Q + c * sqrt(log N_h / N_{h,a}), lowest index on ties."""
    candidates = [index for index in sorted(node.action_visits) if index not in node.deleted]
    if not candidates:
        raise NoActions(f"every action at {node.history.render_key()!r} has been deleted")

    log_total = math.log(node.visits) if node.visits > 0 else 0.0
    best = candidates[0]
    best_score = -math.inf
    for index in candidates:
        visits = node.action_visits[index]
        if visits == 0:
            return index
        score = node.q_values.get(index, 0.0) + c * math.sqrt(log_total / visits)
        if score > best_score:
            best, best_score = index, score
    return best


@dataclass(slots=True)
class SearchStats:
    samples: int = 0
    successful_samples: int = 0
    deletions: int = 0
    max_depth: int = 0
    nodes: int = 1
    elapsed_seconds: float = 0.0
    c: float = DEFAULT_EXPLORATION
    seed: int = 0


@dataclass(slots=True)
class TreeSearchResult[S, A]:
    policy: PolicyTree[S, A]
    # Q estimate at the root; None when no sample reached the horizon
    root_value: float | None
    complete: bool
    stats: SearchStats = field(default_factory=SearchStats)


type OnSampleFunc = Callable[[bool], None]
type OnDeleteFunc[S, A] = Callable[[SearchNode[S, A], int], None]


class TreeSearch[S, A]:
    _model: CcmdpModel[S, A]
    _f: RewardFunctional
    _c: float
    _rng: np.random.Generator
    _default_policy: DefaultPolicy[A]
    _root: SearchNode[S, A]
    _on_sample_funcs: list[OnSampleFunc]
    _on_delete_funcs: list[OnDeleteFunc[S, A]]
    stats: SearchStats

    def __init__(
        self,
        model: CcmdpModel[S, A],
        f: RewardFunctional = f_one,
        c: float = DEFAULT_EXPLORATION,
        default_policy: DefaultPolicy[A] | None = None,
        seed: int = 0,
    ) -> None:
        if c < 0:
            raise ValueError(f"exploration constant must be non-negative, got {c}")
        self._model = model
        self._f = f
        self._c = c
        self._rng = np.random.default_rng(seed)
        self._default_policy = default_policy if default_policy is not None else UniformRandomPolicy(self._rng)
        self._root = SearchNode(StateHistory.initial(model.initial_state))
        self._on_sample_funcs = []
        self._on_delete_funcs = []
        self.stats = SearchStats(c=c, seed=seed)

    @property
    def root(self) -> SearchNode[S, A]:
        return self._root

    def on_sample(self, func: OnSampleFunc) -> None:
        self._on_sample_funcs.append(func)

    def on_delete(self, func: OnDeleteFunc[S, A]) -> None:
        self._on_delete_funcs.append(func)

    def run(self, budget: SampleBudget) -> TreeSearchResult[S, A]:
        started = time.perf_counter()
        while not budget.exhausted(self.stats.samples, time.perf_counter() - started):
            if not self.sample_root():
                raise NoSolution("every action at the root has been deleted")

        if not self.cleanup(self._root):
            raise NoSolution("cleanup deleted every action at the root")

        self.stats.elapsed_seconds = time.perf_counter() - started
        policy = self.extract_policy()
        root_action = self._root.policy_action
        root_value = self._root.q_values.get(root_action) if root_action is not None else None
        logger.info(
            "tree search: %d samples, %d deletions, %d nodes, root value %s in %.3fs",
            self.stats.samples,
            self.stats.deletions,
            self.stats.nodes,
            root_value,
            self.stats.elapsed_seconds,
        )
        return TreeSearchResult(policy=policy, root_value=root_value, complete=policy.complete, stats=self.stats)

    def sample_root(self) -> bool:
        self.stats.samples += 1
        success = self.sample(self._root)
        if success:
            self.stats.successful_samples += 1
        for func in self._on_sample_funcs:
            func(success)
        return success

    def sample(self, node: SearchNode[S, A]) -> bool:
        history = node.history
        if history.failed:
            # a drawn failure ends the rollout; ser of a failing history is zero
            node.visits += 1
            node.sampled = True
            return True
        if history.t >= self._model.horizon:
            if not self._holds(history):
                return False
            node.visits += 1
            node.sampled = True
            return True

        while True:
            remaining = node.remaining(self._model)
            if not remaining:
                return False

            if not node.sampled:
                index = self._choose_default(node, remaining)
            else:
                untried = [i for i in remaining if node.action_visits.get(i, 0) == 0]
                index = self._choose_default(node, untried) if untried else uct_select(node, self._c)

            child = self._child(node, index, self._draw(node, index))
            if self.sample(child):
                self._backup(node, index)
                node.sampled = True
                node.policy_action = node.best_action()
                return True
            self._delete(node, index)

    def cleanup(self, node: SearchNode[S, A]) -> bool:
        history = node.history
        if history.failed:
            return True
        if not node.sampled:
            return self._holds(history)
        if history.t >= self._model.horizon:
            return True

        while True:
            index = node.policy_action
            if index is None:
                return False
            outcomes = node.outcomes(self._model, index)
            results = [self.cleanup(self._child(node, index, b)) for b in range(len(outcomes.safe_outcomes))]
            if all(results):
                self._backup(node, index)
                return True
            logger.debug("cleanup deletes action %d at %r", index, history.render_key())
            self._delete(node, index)

    def extract_policy(self) -> PolicyTree[S, A]:
        return PolicyTree(root=self._policy_node(self._root), horizon=self._model.horizon)

    def audit_counts(self) -> list[str]:
        """Keys of nodes where visit counts disagree with their children."""
        problems: list[str] = []
        stack = [self._root]
        while stack:
            node = stack.pop()
            key = node.history.render_key()
            live = {i: n for i, n in node.action_visits.items() if i not in node.deleted}
            if live and node.visits != sum(live.values()):
                problems.append(f"{key}: N_h={node.visits} but actions sum to {sum(live.values())}")
            for index, visits in live.items():
                children = node.children.get(index, {})
                total = sum(child.visits for child in children.values())
                if visits != total:
                    problems.append(f"{key}: N_h,{index}={visits} but children sum to {total}")
            for children in node.children.values():
                stack.extend(children.values())
        return problems

    def _holds(self, history: StateHistory[S, A]) -> bool:
        try:
            return local_constraint_holds(history, self._model, self._f)
        except DegenerateRisk:
            return False

    def _choose_default(self, node: SearchNode[S, A], candidates: list[int]) -> int:
        actions = node.actions(self._model)
        chosen = self._default_policy.choose(node.history, [actions[i] for i in candidates])
        for index in candidates:
            if actions[index] == chosen:
                return index
        raise ValueError(f"default policy returned {chosen!r}, which is not an available action")

    def _draw(self, node: SearchNode[S, A], index: int) -> int:
        cumulative, branches = node.branch_table(self._model, index)
        position = bisect.bisect_right(cumulative, float(self._rng.random()) * cumulative[-1])
        return branches[min(position, len(branches) - 1)]

    def _child(self, node: SearchNode[S, A], index: int, branch: int) -> SearchNode[S, A]:
        children = node.children.setdefault(index, {})
        child = children.get(branch)
        if child is None:
            action = node.actions(self._model)[index]
            history = node.history.extend(action, index, node.outcomes(self._model, index), branch)
            child = SearchNode(history)
            children[branch] = child
            self.stats.nodes += 1
            self.stats.max_depth = max(self.stats.max_depth, history.t)
        return child

    def _backup(self, node: SearchNode[S, A], index: int) -> None:
        children = node.children.get(index, {})
        total = sum(child.visits for child in children.values())
        node.action_visits[index] = total
        node.refresh_visits()
        if total == 0:
            return
        gamma = self._model.discount
        node.q_values[index] = math.fsum(
            child.visits / total * (child.history.steps[-1].reward + gamma * child.value())
            for child in children.values()
            if child.visits > 0
        )

    def _delete(self, node: SearchNode[S, A], index: int) -> None:
        node.deleted.add(index)
        node.refresh_visits()
        if node.policy_action == index or node.policy_action is None:
            node.policy_action = node.best_action()
        self.stats.deletions += 1
        logger.debug("deleted action %d at %r", index, node.history.render_key())
        for func in self._on_delete_funcs:
            func(node, index)

    def _policy_node(self, node: SearchNode[S, A]) -> PolicyNode[S, A]:
        history = node.history
        result = PolicyNode(history=history, visits=node.visits)
        index = node.policy_action
        if history.failed or history.t >= self._model.horizon or not node.sampled or index is None:
            if history.t >= self._model.horizon:
                result.value = 0.0
            return result

        outcomes = node.outcomes(self._model, index)
        result.action = node.actions(self._model)[index]
        result.action_index = index
        result.branches = tuple(range(len(outcomes.safe_outcomes)))
        result.value = node.q_values.get(index)
        for branch in result.branches:
            result.children[branch] = self._policy_node(self._child(node, index, branch))
        return result


def tree_search[S, A](
    model: CcmdpModel[S, A],
    budget: SampleBudget,
    f: RewardFunctional = f_one,
    c: float = DEFAULT_EXPLORATION,
    default_policy: DefaultPolicy[A] | None = None,
    seed: int = 0,
) -> TreeSearchResult[S, A]:
    return TreeSearch(model, f=f, c=c, default_policy=default_policy, seed=seed).run(budget)
