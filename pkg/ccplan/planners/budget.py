from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ccplan.errors import InvalidConfig


class SampleBudget(BaseModel):
    """How long tree search may sample: a count of top-level samples or wall-clock seconds."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: Literal["samples", "seconds"] = "samples"
    # zero is accepted and yields an empty result
    limit: float = Field(ge=0.0)

    @classmethod
    def samples(cls, count: int) -> SampleBudget:
        return cls(mode="samples", limit=count)

    @classmethod
    def seconds(cls, limit: float) -> SampleBudget:
        return cls(mode="seconds", limit=limit)

    @classmethod
    def parse(cls, text: str) -> SampleBudget:
        mode, _, raw = text.partition(":")
        if mode not in ("samples", "seconds"):
            raise InvalidConfig(f"budget must look like samples:N or seconds:S, got {text!r}")
        try:
            limit = float(raw)
        except ValueError as exc:
            raise InvalidConfig(f"budget limit is not a number: {text!r}") from exc
        if limit < 0:
            raise InvalidConfig(f"budget limit must be non-negative: {text!r}")
        return cls(mode="samples" if mode == "samples" else "seconds", limit=limit)

    def exhausted(self, samples: int, elapsed: float) -> bool:
        if self.mode == "samples":
            return samples >= self.limit
        return elapsed >= self.limit

    def describe(self) -> str:
        if self.mode == "samples":
            return f"samples:{int(self.limit)}"
        return f"seconds:{self.limit:g}"
