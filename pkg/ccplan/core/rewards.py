from __future__ import annotations

import math
from typing import Any, Callable, Literal

from ccplan.core.history import StateHistory
from ccplan.core.model import CcmdpModel

type RewardFunctional = Callable[[StateHistory[Any, Any], CcmdpModel[Any, Any]], float]
type FunctionalName = Literal["g", "f1"]


def lifetime_reward(history: StateHistory[Any, Any], model: CcmdpModel[Any, Any]) -> float:
    """Discounted sum of the rewards received along the history, failure transition included."""
    gamma = model.discount
    return math.fsum(gamma**t * step.reward for t, step in enumerate(history.steps))


def f_g(history: StateHistory[Any, Any], model: CcmdpModel[Any, Any]) -> float:
    return lifetime_reward(history, model)


def f_one(history: StateHistory[Any, Any], model: CcmdpModel[Any, Any]) -> float:
    """Discounted sum of each taken action's expected immediate reward.

    The realised outcome does not matter, so a rare low-reward branch cannot by
    itself push a history over the risk bound.
    """
    gamma = model.discount
    return math.fsum(gamma**t * step.expected_reward for t, step in enumerate(history.steps))


FUNCTIONALS: dict[str, RewardFunctional] = {"g": f_g, "f1": f_one}


def functional(name: str) -> RewardFunctional:
    try:
        return FUNCTIONALS[name]
    except KeyError:
        raise ValueError(f"unknown reward functional {name!r}, expected one of {sorted(FUNCTIONALS)}") from None
