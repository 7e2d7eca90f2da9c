"""Randomly generated tree-shaped CCMDPs for property tests.

Nothing is stored: the actions available at a history and the outcomes of each
action are drawn from a generator seeded by the instance seed and the history key,
so repeated queries return identical answers and instances of any size cost nothing
until explored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ccplan.core.history import HistoryKey, StateHistory
from ccplan.core.model import Outcome, OutcomeSet
from ccplan.core.risk_bound import LinearBound, RiskBound


def _encode(key: HistoryKey) -> list[int]:
    # branches start at -1 for failure; seed sequences need non-negative entropy
    return [value for action, branch in key for value in (action, branch + 1)]


@dataclass(frozen=True, slots=True)
class RandomModel:
    seed: int
    horizon: int
    risk_bound: RiskBound
    max_actions: int = 3
    max_branches: int = 3
    max_risk: float = 0.1
    discount: float = 1.0
    reward_scale: float = 1.0

    @property
    def initial_state(self) -> HistoryKey:
        return ()

    def actions(self, history: StateHistory[HistoryKey, int]) -> list[int]:
        rng = np.random.default_rng([self.seed, 0, *_encode(history.key)])
        return list(range(int(rng.integers(1, self.max_actions + 1))))

    def outcomes(self, history: StateHistory[HistoryKey, int], action: int) -> OutcomeSet[HistoryKey]:
        key = history.key
        rng = np.random.default_rng([self.seed, action + 1, *_encode(key)])
        count = int(rng.integers(1, self.max_branches + 1))
        risk = float(rng.uniform(0.0, self.max_risk))
        weights = rng.dirichlet(np.ones(count))
        rewards = rng.uniform(0.0, self.reward_scale, size=count)
        safe = tuple(
            Outcome(key + ((action, branch),), (1.0 - risk) * float(weights[branch]), float(rewards[branch]))
            for branch in range(count)
        )
        return OutcomeSet(safe_outcomes=safe, failure_probability=risk, failure_reward=0.0)


def random_model(
    seed: int,
    horizon: int,
    max_actions: int = 3,
    max_branches: int = 3,
    max_risk: float = 0.1,
    delta: RiskBound | None = None,
    discount: float = 1.0,
) -> RandomModel:
    return RandomModel(
        seed=seed,
        horizon=horizon,
        risk_bound=delta if delta is not None else LinearBound(alpha=0.005),
        max_actions=max_actions,
        max_branches=max_branches,
        max_risk=max_risk,
        discount=discount,
    )


def sample_random_model(
    seed: int,
    max_horizon: int = 4,
    max_actions: int = 3,
    max_branches: int = 3,
    max_risk: float = 0.1,
    alpha_range: tuple[float, float] = (0.001, 0.01),
) -> RandomModel:
    """A random instance whose horizon and linear risk bound are also drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    horizon = int(rng.integers(1, max_horizon + 1))
    alpha = float(rng.uniform(*alpha_range))
    return random_model(
        seed=seed,
        horizon=horizon,
        max_actions=max_actions,
        max_branches=max_branches,
        max_risk=max_risk,
        delta=LinearBound(alpha=alpha),
    )
