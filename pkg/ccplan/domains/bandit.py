"""Bayesian multi-armed bandit where every machine can break.

Each machine pays one of two rewards. Its payout probability is one of two known
values and the player keeps a belief over which one. Playing a machine breaks it
with a known probability, which ends the game with no reward for that play. Ending
the game voluntarily is risk-free and pays a fixed rate for every remaining step.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal, Self, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ccplan.core.history import StateHistory
from ccplan.core.model import Outcome, OutcomeSet
from ccplan.core.risk_bound import RiskBound
from ccplan.errors import InvalidConfig, UnknownReward

DEFAULT_END_REWARD = 0.25


class MachineParams(BaseModel):
    """A machine paying ``reward_1`` with probability ``p`` and ``reward_2`` otherwise.

    ``p`` is ``p1`` with prior probability ``theta0`` and ``p2`` otherwise.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    reward_1: float
    reward_2: float
    p1: float = Field(ge=0.0, le=1.0)
    p2: float = Field(ge=0.0, le=1.0)
    theta0: float = Field(ge=0.0, le=1.0)
    risk: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _distinct_rewards(self) -> Self:
        if self.reward_1 == self.reward_2:
            raise ValueError("the two rewards of a machine must differ to be told apart")
        return self

    def reward_likelihoods(self, reward: float) -> tuple[float, float]:
        """P[reward | p1] and P[reward | p2]."""
        if reward == self.reward_1:
            return self.p1, self.p2
        if reward == self.reward_2:
            return 1.0 - self.p1, 1.0 - self.p2
        raise UnknownReward(f"reward {reward} is neither {self.reward_1} nor {self.reward_2}")

    def reward_probability(self, theta: float, reward: float) -> float:
        """Marginal probability of ``reward`` under belief ``theta``, ignoring breakage."""
        under_p1, under_p2 = self.reward_likelihoods(reward)
        return under_p1 * theta + under_p2 * (1.0 - theta)


_THREE_MACHINES = (
    MachineParams(reward_1=0.0, reward_2=1.0, p1=0.3, p2=0.7, theta0=0.5, risk=0.001),
    MachineParams(reward_1=0.2, reward_2=0.5, p1=0.2, p2=0.5, theta0=0.6, risk=0.0005),
    MachineParams(reward_1=0.4, reward_2=0.6, p1=0.3, p2=0.6, theta0=0.3, risk=0.0015),
)

MACHINE_PRESETS: dict[str, tuple[MachineParams, ...]] = {
    "table1": _THREE_MACHINES,
    "three-machines": _THREE_MACHINES,
}


def machine_preset(name: str) -> tuple[MachineParams, ...]:
    try:
        return MACHINE_PRESETS[name]
    except KeyError:
        raise InvalidConfig(f"unknown machine preset {name!r}, expected one of {sorted(MACHINE_PRESETS)}") from None


def bandit_update(theta: float, machine: MachineParams, observed_reward: float) -> float:
    """Posterior probability that the machine uses ``p1`` after observing ``observed_reward``."""
    under_p1, under_p2 = machine.reward_likelihoods(observed_reward)
    evidence = under_p1 * theta + under_p2 * (1.0 - theta)
    if evidence == 0.0:
        # the observation is impossible under the belief; nothing to learn
        return theta
    return under_p1 * theta / evidence


@dataclass(frozen=True, slots=True)
class BanditState:
    theta: tuple[float, ...]
    ended: bool = False


@dataclass(frozen=True, slots=True)
class BanditAction:
    kind: Literal["play", "end", "noop"]
    machine: int = -1

    def __str__(self) -> str:
        return f"play:{self.machine}" if self.kind == "play" else self.kind


END_GAME = BanditAction("end")
NO_OP = BanditAction("noop")


class BanditModel:
    machines: tuple[MachineParams, ...]
    end_reward: float
    _horizon: int
    _discount: float
    _risk_bound: RiskBound

    def __init__(
        self,
        machines: Sequence[MachineParams],
        horizon: int,
        risk_bound: RiskBound,
        discount: float = 1.0,
        end_reward: float = DEFAULT_END_REWARD,
    ) -> None:
        if not machines:
            raise InvalidConfig("a bandit needs at least one machine")
        if horizon < 0:
            raise InvalidConfig(f"horizon must be non-negative, got {horizon}")
        self.machines = tuple(machines)
        self.end_reward = end_reward
        self._horizon = horizon
        self._discount = discount
        self._risk_bound = risk_bound

    @property
    def initial_state(self) -> BanditState:
        return BanditState(theta=tuple(m.theta0 for m in self.machines))

    @property
    def horizon(self) -> int:
        return self._horizon

    @property
    def discount(self) -> float:
        return self._discount

    @property
    def risk_bound(self) -> RiskBound:
        return self._risk_bound

    def actions(self, history: StateHistory[BanditState, BanditAction]) -> list[BanditAction]:
        if history.terminal_state.ended:
            return [NO_OP]
        return [BanditAction("play", i) for i in range(len(self.machines))] + [END_GAME]

    def outcomes(
        self,
        history: StateHistory[BanditState, BanditAction],
        action: BanditAction,
    ) -> OutcomeSet[BanditState]:
        state = history.terminal_state
        if action.kind == "noop":
            return OutcomeSet(safe_outcomes=(Outcome(state, 1.0, 0.0),))
        if action.kind == "end":
            # lump sum for the remaining steps, paid on the transition itself
            remaining = self._horizon - history.t
            return OutcomeSet(safe_outcomes=(Outcome(replace(state, ended=True), 1.0, self.end_reward * remaining),))

        machine = self.machines[action.machine]
        theta = state.theta[action.machine]
        survival = 1.0 - machine.risk
        safe: list[Outcome[BanditState]] = []
        for reward in (machine.reward_1, machine.reward_2):
            probability = survival * machine.reward_probability(theta, reward)
            if probability <= 0.0:
                continue
            beliefs = list(state.theta)
            beliefs[action.machine] = bandit_update(theta, machine, reward)
            safe.append(Outcome(BanditState(theta=tuple(beliefs)), probability, reward))
        return OutcomeSet(safe_outcomes=tuple(safe), failure_probability=machine.risk, failure_reward=0.0)


def bandit_model(
    machines: Sequence[MachineParams],
    horizon: int,
    risk_bound: RiskBound,
    discount: float = 1.0,
    end_reward: float = DEFAULT_END_REWARD,
) -> BanditModel:
    return BanditModel(machines, horizon, risk_bound, discount=discount, end_reward=end_reward)
