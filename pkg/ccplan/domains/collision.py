from __future__ import annotations

import math
from typing import Self, Sequence

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.stats import norm

from ccplan.errors import MeanInsideObstacle


class Obstacle(BaseModel):
    """Axis-aligned rectangle in grid units."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @model_validator(mode="after")
    def _positive_area(self) -> Self:
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValueError(f"obstacle {self.describe()} has no area")
        return self

    def describe(self) -> str:
        return f"[{self.x_min:g}, {self.x_max:g}] x [{self.y_min:g}, {self.y_max:g}]"

    def covers(self, point: tuple[float, float]) -> bool:
        """Closed-rectangle membership; covered grid cells are not reachable."""
        x, y = point
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def contains(self, point: tuple[float, float]) -> bool:
        x, y = point
        return self.x_min < x < self.x_max and self.y_min < y < self.y_max

    def crossing_probability(self, mean: tuple[float, float], covariance: npt.NDArray[np.float64]) -> float:
        """Smallest probability of crossing an edge that faces ``mean``."""
        x, y = mean
        sigma_x = math.sqrt(float(covariance[0, 0]))
        sigma_y = math.sqrt(float(covariance[1, 1]))

        # (distance from the mean to the edge line, standard deviation along the edge normal)
        facing: list[tuple[float, float]] = []
        if x <= self.x_min:
            facing.append((self.x_min - x, sigma_x))
        if x >= self.x_max:
            facing.append((x - self.x_max, sigma_x))
        if y <= self.y_min:
            facing.append((self.y_min - y, sigma_y))
        if y >= self.y_max:
            facing.append((y - self.y_max, sigma_y))
        if not facing:
            raise MeanInsideObstacle(f"mean ({x:g}, {y:g}) lies inside obstacle {self.describe()}")

        return min(float(norm.sf(distance / sigma)) for distance, sigma in facing)


def collision_risk(
    mean_position: tuple[float, float],
    covariance: npt.NDArray[np.float64],
    obstacles: Sequence[Obstacle],
) -> float:
    """Sum of per-obstacle crossing probabilities, clamped to 1."""
    total = math.fsum(obstacle.crossing_probability(mean_position, covariance) for obstacle in obstacles)
    return min(1.0, total)
