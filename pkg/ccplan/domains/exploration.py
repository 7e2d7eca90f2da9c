"""Grid exploration of a field modelled as a Gaussian process.

A vehicle moves between the 8 neighbouring cells of a grid. Its position is
uncertain and the uncertainty grows with every move, so moving next to an obstacle
risks hitting it. Each new cell yields a noiseless sample of the field taken at the
vehicle's mean position, and the sampled value is paid as reward.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Self

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ccplan.core.history import StateHistory
from ccplan.core.model import Outcome, OutcomeSet
from ccplan.core.risk_bound import RiskBound
from ccplan.domains.collision import Obstacle, collision_risk
from ccplan.domains.gp import (
    DEFAULT_QUADRATURE_DEGREE,
    GpHyperparameters,
    GpObservation,
    gauss_hermite_outcomes,
    gp_posterior,
)
from ccplan.errors import InvalidConfig

MOVES: tuple[tuple[int, int], ...] = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))

type Matrix2 = tuple[tuple[float, float], tuple[float, float]]
type Move = tuple[int, int]


def _diagonal(value: float) -> Matrix2:
    return ((value, 0.0), (0.0, value))


class GpExplorationConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    width: int = Field(default=6, ge=1)
    height: int = Field(default=6, ge=1)
    start: tuple[int, int] = (0, 0)
    # measurement taken at the start cell; the prior mean there when unset
    start_value: float | None = None
    obstacles: tuple[Obstacle, ...] = ()
    initial_covariance: Matrix2 = _diagonal(0.005)
    step_covariance: Matrix2 = _diagonal(0.0001)
    hyper: GpHyperparameters = GpHyperparameters()
    quadrature_degree: int = Field(default=DEFAULT_QUADRATURE_DEGREE, ge=1)

    @model_validator(mode="after")
    def _check_layout(self) -> Self:
        x, y = self.start
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise ValueError(f"start {self.start} is outside the {self.width}x{self.height} grid")
        for obstacle in self.obstacles:
            if obstacle.covers((x, y)):
                raise ValueError(f"start {self.start} lies in obstacle {obstacle.describe()}")
        for name in ("initial_covariance", "step_covariance"):
            matrix = np.asarray(getattr(self, name), dtype=float)
            if not np.allclose(matrix, matrix.T):
                raise ValueError(f"{name} is not symmetric")
            if np.any(np.linalg.eigvalsh(matrix) < 0.0):
                raise ValueError(f"{name} is not positive semi-definite")
        if np.any(np.linalg.eigvalsh(np.asarray(self.initial_covariance, dtype=float)) <= 0.0):
            raise ValueError("initial_covariance is not positive definite")
        return self

    def covariance_at(self, t: int) -> npt.NDArray[np.float64]:
        return np.asarray(self.initial_covariance, dtype=float) + t * np.asarray(self.step_covariance, dtype=float)

    def blocked(self, cell: tuple[int, int]) -> bool:
        x, y = cell
        if not (0 <= x < self.width and 0 <= y < self.height):
            return True
        return any(obstacle.covers(cell) for obstacle in self.obstacles)


@dataclass(frozen=True, slots=True)
class GpVehicleState:
    position: tuple[int, int]
    t: int
    covariance: Matrix2
    observations: tuple[GpObservation, ...]

    @property
    def visited(self) -> frozenset[tuple[int, int]]:
        return frozenset(o.location for o in self.observations)


class GpExplorationModel:
    config: GpExplorationConfig
    _horizon: int
    _discount: float
    _risk_bound: RiskBound

    def __init__(self, config: GpExplorationConfig, horizon: int, risk_bound: RiskBound, discount: float = 1.0) -> None:
        if horizon < 0:
            raise InvalidConfig(f"horizon must be non-negative, got {horizon}")
        self.config = config
        self._horizon = horizon
        self._discount = discount
        self._risk_bound = risk_bound

    @property
    def initial_state(self) -> GpVehicleState:
        config = self.config
        value = config.start_value
        if value is None:
            value = float(config.hyper.prior_mean(np.asarray([config.start], dtype=float))[0])
        return GpVehicleState(
            position=config.start,
            t=0,
            covariance=_as_matrix2(config.covariance_at(0)),
            observations=(GpObservation(config.start, value),),
        )

    @property
    def horizon(self) -> int:
        return self._horizon

    @property
    def discount(self) -> float:
        return self._discount

    @property
    def risk_bound(self) -> RiskBound:
        return self._risk_bound

    def actions(self, history: StateHistory[GpVehicleState, Move]) -> list[Move]:
        x, y = history.terminal_state.position
        return [(dx, dy) for dx, dy in MOVES if not self.config.blocked((x + dx, y + dy))]

    def outcomes(self, history: StateHistory[GpVehicleState, Move], action: Move) -> OutcomeSet[GpVehicleState]:
        state = history.terminal_state
        config = self.config
        destination = (state.position[0] + action[0], state.position[1] + action[1])
        covariance = config.covariance_at(state.t + 1)
        risk = collision_risk(destination, covariance, config.obstacles)
        survival = 1.0 - risk
        stepped = _as_matrix2(covariance)

        if survival <= 0.0:
            return OutcomeSet(safe_outcomes=(), failure_probability=1.0)

        if destination in state.visited:
            moved = GpVehicleState(destination, state.t + 1, stepped, state.observations)
            return OutcomeSet(safe_outcomes=(Outcome(moved, survival, 0.0),), failure_probability=risk)

        mean, variance = gp_posterior(config.hyper, state.observations, destination)
        safe = []
        for value, weight in gauss_hermite_outcomes(mean, variance, config.quadrature_degree):
            observed = state.observations + (GpObservation(destination, value),)
            safe.append(Outcome(GpVehicleState(destination, state.t + 1, stepped, observed), survival * weight, value))
        return OutcomeSet(safe_outcomes=tuple(safe), failure_probability=risk)


def _as_matrix2(matrix: npt.NDArray[np.float64]) -> Matrix2:
    return ((float(matrix[0, 0]), float(matrix[0, 1])), (float(matrix[1, 0]), float(matrix[1, 1])))


def gp_exploration_model(
    config: GpExplorationConfig | dict[str, object],
    horizon: int,
    risk_bound: RiskBound,
    discount: float = 1.0,
) -> GpExplorationModel:
    if not isinstance(config, GpExplorationConfig):
        try:
            config = GpExplorationConfig.model_validate(config)
        except ValidationError as exc:
            raise InvalidConfig(f"invalid exploration config: {exc}") from exc
    return GpExplorationModel(config, horizon, risk_bound, discount=discount)
