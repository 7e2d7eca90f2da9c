from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.spatial.distance import cdist

from ccplan.errors import SingularKernel

KERNEL_JITTER = 1e-9
# posterior variances at or below this are treated as a point mass
VARIANCE_FLOOR = 1e-12
DEFAULT_QUADRATURE_DEGREE = 4

type Location = tuple[float, float]


class GpHyperparameters(BaseModel):
    """Linear prior mean and squared-exponential kernel ``amplitude * exp(-d^2 / (2 l^2))``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    intercept: float = 1.0
    slope: tuple[float, float] = (0.05, 0.05)
    amplitude: float = Field(default=0.16, gt=0.0)
    length_scale: float = Field(default=2.0, gt=0.0)

    def prior_mean(self, points: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return self.intercept + points @ np.asarray(self.slope, dtype=float)

    def kernel(self, a: npt.NDArray[np.float64], b: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        squared = cdist(a, b, metric="sqeuclidean")
        return self.amplitude * np.exp(-squared / (2.0 * self.length_scale**2))


@dataclass(frozen=True, slots=True)
class GpObservation:
    location: tuple[int, int]
    value: float


def gp_posterior(
    hyper: GpHyperparameters,
    observations: Sequence[GpObservation],
    query: Location,
) -> tuple[float, float]:
    """Noiseless GP regression at ``query``: (posterior mean, posterior variance)."""
    q = np.asarray([query], dtype=float)
    prior = float(hyper.prior_mean(q)[0])
    if not observations:
        return prior, hyper.amplitude

    points = np.asarray([o.location for o in observations], dtype=float)
    values = np.asarray([o.value for o in observations], dtype=float)
    gram = hyper.kernel(points, points) + KERNEL_JITTER * np.eye(len(observations))
    cross = hyper.kernel(points, q)[:, 0]

    try:
        factor = cho_factor(gram, lower=True)
    except LinAlgError as exc:
        raise SingularKernel(f"kernel matrix over {len(observations)} observations is not positive definite") from exc

    mean = prior + float(cross @ cho_solve(factor, values - hyper.prior_mean(points)))
    variance = hyper.amplitude - float(cross @ cho_solve(factor, cross))
    return mean, max(variance, 0.0)


def gauss_hermite_outcomes(
    mean: float,
    variance: float,
    degree: int = DEFAULT_QUADRATURE_DEGREE,
) -> list[tuple[float, float]]:
    """Discretise N(mean, variance) into ``degree`` (value, probability) pairs."""
    if degree < 1:
        raise ValueError(f"quadrature degree must be positive, got {degree}")
    if variance <= VARIANCE_FLOOR:
        return [(mean, 1.0)]

    nodes, weights = np.polynomial.hermite.hermgauss(degree)
    values = mean + math.sqrt(2.0 * variance) * nodes
    probabilities = weights / math.sqrt(math.pi)
    return [(float(v), float(p)) for v, p in zip(values, probabilities)]
