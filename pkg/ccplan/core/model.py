from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Protocol, Sequence

if TYPE_CHECKING:
    from ccplan.core.history import StateHistory
    from ccplan.core.risk_bound import RiskBound

PROBABILITY_TOLERANCE = 1e-9


@dataclass(frozen=True, slots=True)
class Outcome[S]:
    next_state: S
    probability: float
    reward: float


@dataclass(frozen=True, slots=True)
class OutcomeSet[S]:
    """Result of taking one action at one history.

    Failure states are not enumerated: every failing transition is lumped into a
    single branch with probability ``failure_probability`` and reward ``failure_reward``.
    """

    safe_outcomes: tuple[Outcome[S], ...]
    failure_probability: float = 0.0
    failure_reward: float = 0.0

    @property
    def expected_reward(self) -> float:
        safe = math.fsum(o.probability * o.reward for o in self.safe_outcomes)
        return safe + self.failure_probability * self.failure_reward

    @property
    def total_probability(self) -> float:
        return math.fsum(o.probability for o in self.safe_outcomes) + self.failure_probability

    def problems(self) -> list[str]:
        found: list[str] = []
        r = self.failure_probability
        if not 0.0 <= r <= 1.0:
            found.append(f"failure probability {r} outside [0, 1]")
        for branch, outcome in enumerate(self.safe_outcomes):
            if not 0.0 < outcome.probability <= 1.0:
                found.append(f"branch {branch} probability {outcome.probability} outside (0, 1]")
        total = self.total_probability
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            found.append(f"probabilities sum to {total}")
        if not self.safe_outcomes and r != 1.0:
            found.append("no safe outcomes but failure probability is not 1")
        return found


class CcmdpModel[S, A](Protocol):
    """A finite-horizon chance-constrained MDP.

    ``actions`` and ``outcomes`` must be pure functions of their arguments.
    An empty action list at a safe history before the horizon marks a dead end.
    """

    @property
    def initial_state(self) -> S: ...

    @property
    def horizon(self) -> int: ...

    @property
    def discount(self) -> float: ...

    @property
    def risk_bound(self) -> RiskBound: ...

    def actions(self, history: StateHistory[S, A]) -> Sequence[A]: ...

    def outcomes(self, history: StateHistory[S, A], action: A) -> OutcomeSet[S]: ...
