"""A single decision where the penalty method never picks the best constrained action.

Three actions succeed with probability 0.99, 0.98 and 0.95 and pay 5, 6 and 10
whether or not they fail. Under ``Delta(x) = 0.004 x`` only the first two satisfy the
chance constraint and the second is optimal, yet ``R - M r`` prefers the third for
small M and the first for large M.
"""

from __future__ import annotations

from dataclasses import dataclass

from ccplan.core.history import StateHistory
from ccplan.core.model import Outcome, OutcomeSet
from ccplan.core.risk_bound import LinearBound, RiskBound

DEFAULT_ARMS: tuple[tuple[float, float], ...] = ((0.99, 5.0), (0.98, 6.0), (0.95, 10.0))


@dataclass(frozen=True, slots=True)
class CounterexampleModel:
    arms: tuple[tuple[float, float], ...] = DEFAULT_ARMS
    risk_bound: RiskBound = LinearBound(alpha=0.004)
    initial_state: str = "start"
    horizon: int = 1
    discount: float = 1.0

    def actions(self, history: StateHistory[str, int]) -> list[int]:
        return list(range(len(self.arms))) if history.t == 0 else []

    def outcomes(self, history: StateHistory[str, int], action: int) -> OutcomeSet[str]:
        p_safe, reward = self.arms[action]
        return OutcomeSet(
            safe_outcomes=(Outcome(f"done:{action}", p_safe, reward),),
            failure_probability=1.0 - p_safe,
            failure_reward=reward,
        )


def counterexample_model(risk_bound: RiskBound | None = None) -> CounterexampleModel:
    if risk_bound is None:
        return CounterexampleModel()
    return CounterexampleModel(risk_bound=risk_bound)
