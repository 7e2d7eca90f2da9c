from __future__ import annotations

from typing import Any, Protocol, Sequence

import numpy as np

from ccplan.core.history import StateHistory
from ccplan.core.model import CcmdpModel


class DefaultPolicy[A](Protocol):
    """Chooses the first action tried from a history that has never been sampled.

    Must return one of ``actions``, which holds only actions not yet deleted.
    """

    def choose(self, history: StateHistory[Any, A], actions: Sequence[A]) -> A: ...


class UniformRandomPolicy[A]:
    _rng: np.random.Generator

    def __init__(self, rng: np.random.Generator) -> None:
        self._rng = rng

    def choose(self, history: StateHistory[Any, A], actions: Sequence[A]) -> A:
        return actions[int(self._rng.integers(len(actions)))]


class GreedyPolicy[S, A]:
    """Prefers the action with the highest expected immediate reward, ties to the earliest."""

    _model: CcmdpModel[S, A]

    def __init__(self, model: CcmdpModel[S, A]) -> None:
        self._model = model

    def choose(self, history: StateHistory[S, A], actions: Sequence[A]) -> A:
        best = actions[0]
        best_reward = self._model.outcomes(history, best).expected_reward
        for action in actions[1:]:
            reward = self._model.outcomes(history, action).expected_reward
            if reward > best_reward:
                best, best_reward = action, reward
        return best
