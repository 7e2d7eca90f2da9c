from __future__ import annotations

import math
from typing import Annotated, Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from ccplan.errors import InvalidConfig

CONCAVITY_TOLERANCE = 1e-9


class RiskBound(BaseModel):
    """A concave nondecreasing map from expected reward to allowed failure probability.

    Calling the bound evaluates the family formula and clamps the result to [0, 1].
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    def __call__(self, x: float) -> float:
        return min(1.0, max(0.0, self.evaluate(x)))

    def evaluate(self, x: float) -> float:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


class ConstantBound(RiskBound):
    family: Literal["constant"] = "constant"
    delta: float = Field(ge=0.0, le=1.0)

    def evaluate(self, x: float) -> float:
        return self.delta

    def describe(self) -> str:
        return f"constant:{self.delta:g}"


class LinearBound(RiskBound):
    family: Literal["linear"] = "linear"
    alpha: float = Field(ge=0.0)

    def evaluate(self, x: float) -> float:
        return self.alpha * x

    def describe(self) -> str:
        return f"linear:{self.alpha:g}"


class SaturatingAffineBound(RiskBound):
    """(1 - exp(-a x)) (b + c x): starts at the origin and approaches the line b + c x."""

    family: Literal["saturating"] = "saturating"
    a: float = Field(gt=0.0)
    b: float = Field(ge=0.0)
    c: float = Field(ge=0.0)

    def evaluate(self, x: float) -> float:
        # the product turns positive again far left of the origin; the bound is 0 there
        x = max(x, 0.0)
        return -math.expm1(-self.a * x) * (self.b + self.c * x)

    def describe(self) -> str:
        return f"saturating:{self.a:g},{self.b:g},{self.c:g}"


type RiskBoundSpec = Annotated[ConstantBound | LinearBound | SaturatingAffineBound, Field(discriminator="family")]

_adapter: TypeAdapter[ConstantBound | LinearBound | SaturatingAffineBound] = TypeAdapter(RiskBoundSpec)


def parse_risk_bound(text: str) -> RiskBound:
    """Parse ``linear:0.002``, ``constant:0.01`` or ``saturating:0.4,0.015,0.001``."""
    family, _, raw = text.partition(":")
    try:
        values = [float(v) for v in raw.split(",")] if raw else []
    except ValueError as exc:
        raise InvalidConfig(f"risk bound parameters must be numbers: {text!r}") from exc

    fields: dict[str, dict[str, float]] = {
        "constant": dict(zip(["delta"], values)),
        "linear": dict(zip(["alpha"], values)),
        "saturating": dict(zip(["a", "b", "c"], values)),
    }
    expected = {"constant": 1, "linear": 1, "saturating": 3}
    if family not in fields or len(values) != expected[family]:
        raise InvalidConfig(f"unrecognised risk bound {text!r}")

    try:
        return _adapter.validate_python({"family": family, **fields[family]})
    except ValidationError as exc:
        raise InvalidConfig(f"invalid risk bound {text!r}: {exc}") from exc


def check_risk_bound(bound: RiskBound, grid: Sequence[float] | None = None) -> list[str]:
    """Grid test for monotonicity of the clamped bound and midpoint concavity of the formula."""
    points = sorted(grid) if grid is not None else [float(x) for x in np.linspace(0.0, 50.0, 201)]
    violations: list[str] = []

    for lo, hi in zip(points, points[1:]):
        if bound(lo) > bound(hi):
            violations.append(f"decreasing between {lo:g} and {hi:g}")

    for i, lo in enumerate(points):
        for hi in points[i + 1 :]:
            mid = bound.evaluate((lo + hi) / 2)
            chord = (bound.evaluate(lo) + bound.evaluate(hi)) / 2
            if mid < chord - CONCAVITY_TOLERANCE:
                violations.append(f"not concave between {lo:g} and {hi:g}")

    return violations
