from __future__ import annotations

import math
import os
from pathlib import Path
from typing import Annotated, Any, Literal, Mapping

import jiter
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ccplan.core.model import CcmdpModel
from ccplan.core.risk_bound import LinearBound, RiskBound, RiskBoundSpec, SaturatingAffineBound, parse_risk_bound
from ccplan.domains.bandit import DEFAULT_END_REWARD, MachineParams, bandit_model, machine_preset
from ccplan.domains.counterexample import counterexample_model
from ccplan.domains.exploration import GpExplorationConfig, gp_exploration_model
from ccplan.domains.random_instance import random_model
from ccplan.errors import InvalidConfig
from ccplan.planners.budget import SampleBudget

OUTPUT_DIR_ENV = "CCPLAN_OUTPUT_DIR"

type PlannerName = Literal["forward-search", "mcts", "oracle", "penalty-sweep"]

PLANNER_ALIASES: dict[str, str] = {"vulcanfs": "forward-search", "vulcan": "mcts"}
DOMAIN_ALIASES: dict[str, str] = {"fig2": "counterexample"}


class BanditDomain(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["bandit"] = "bandit"
    preset: str | None = "table1"
    # explicit machines take precedence over the preset
    machines: tuple[MachineParams, ...] | None = None
    end_reward: float = DEFAULT_END_REWARD

    def resolve_machines(self) -> tuple[MachineParams, ...]:
        if self.machines:
            return self.machines
        if self.preset is None:
            raise InvalidConfig("bandit domain needs either machines or a preset")
        return machine_preset(self.preset)


class GpDomain(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["gp"] = "gp"
    grid: GpExplorationConfig = GpExplorationConfig()


class CounterexampleDomain(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["counterexample"] = "counterexample"


class RandomDomain(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["random"] = "random"
    instance_seed: int = 0
    max_actions: int = Field(default=3, ge=1)
    max_branches: int = Field(default=3, ge=1)
    max_risk: float = Field(default=0.1, ge=0.0, le=1.0)


type DomainConfig = Annotated[BanditDomain | GpDomain | CounterexampleDomain | RandomDomain, Field(discriminator="kind")]


def default_risk_bound(domain: DomainConfig) -> RiskBound:
    match domain:
        case BanditDomain():
            return LinearBound(alpha=0.002)
        case GpDomain():
            return SaturatingAffineBound(a=0.4, b=0.015, c=0.001)
        case CounterexampleDomain():
            return LinearBound(alpha=0.004)
        case RandomDomain():
            return LinearBound(alpha=0.005)


class RunConfig(BaseModel):
    """Everything needed to reproduce a run; echoed into every result record."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    domain: DomainConfig = BanditDomain()
    planner: PlannerName = "forward-search"
    horizon: int = Field(default=2, ge=0)
    # None picks the domain's usual bound
    delta: RiskBoundSpec | None = None
    functional: Literal["g", "f1"] = "f1"
    discount: float = Field(default=1.0, ge=0.0, le=1.0)
    budget: SampleBudget = SampleBudget.samples(10_000)
    c: float = Field(default=math.sqrt(2), ge=0.0)
    seed: int = 0
    replicates: int = Field(default=1, ge=1)
    workers: int = Field(default=1, ge=1)
    oracle_method: Literal["auto", "enumerate", "frontier"] = "auto"
    m_range: str = "0:300:1"
    # exact E[g] and er of the returned policy, skipped when the policy tree is too large
    evaluate: bool = True
    output_dir: Path = Path("results")

    @field_validator("planner", mode="before")
    @classmethod
    def _planner_alias(cls, value: Any) -> Any:
        if isinstance(value, str):
            return PLANNER_ALIASES.get(value, value)
        return value

    def risk_bound(self) -> RiskBound:
        return self.delta if self.delta is not None else default_risk_bound(self.domain)

    def replicate_seed(self, index: int) -> int:
        return self.seed + index


def build_model(config: RunConfig) -> CcmdpModel[Any, Any]:
    bound = config.risk_bound()
    domain = config.domain
    match domain:
        case BanditDomain():
            return bandit_model(
                domain.resolve_machines(),
                config.horizon,
                bound,
                discount=config.discount,
                end_reward=domain.end_reward,
            )
        case GpDomain():
            return gp_exploration_model(domain.grid, config.horizon, bound, discount=config.discount)
        case CounterexampleDomain():
            return counterexample_model(bound)
        case RandomDomain():
            return random_model(
                domain.instance_seed,
                config.horizon,
                max_actions=domain.max_actions,
                max_branches=domain.max_branches,
                max_risk=domain.max_risk,
                delta=bound,
                discount=config.discount,
            )


def load_config_file(path: Path) -> dict[str, Any]:
    try:
        data = jiter.from_json(path.read_bytes())
    except OSError as exc:
        raise InvalidConfig(f"cannot read config file {path}: {exc}") from exc
    except ValueError as exc:
        raise InvalidConfig(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidConfig(f"config file {path} must hold a JSON object")
    return data


def parse_grid(text: str) -> tuple[int, int]:
    width, sep, height = text.lower().partition("x")
    try:
        if not sep:
            raise ValueError(text)
        return int(width), int(height)
    except ValueError as exc:
        raise InvalidConfig(f"grid must look like WxH, got {text!r}") from exc


def apply_overrides(base: Mapping[str, Any], flags: Mapping[str, Any]) -> dict[str, Any]:
    """Merge command-line flags over config-file values; unset flags are None and ignored."""
    data = dict(base)
    domain = dict(data.get("domain") or {})
    if "kind" in domain:
        domain["kind"] = DOMAIN_ALIASES.get(domain["kind"], domain["kind"])

    kind = flags.get("domain")
    if kind is not None:
        kind = DOMAIN_ALIASES.get(kind, kind)
        if kind != domain.get("kind", "bandit"):
            domain = {}
        domain["kind"] = kind

    if flags.get("preset") is not None:
        domain["preset"] = flags["preset"]
    if flags.get("grid") is not None:
        width, height = parse_grid(flags["grid"])
        grid = dict(domain.get("grid") or {})
        grid.update(width=width, height=height)
        domain["grid"] = grid
    if flags.get("instance_seed") is not None:
        domain["instance_seed"] = flags["instance_seed"]
    if domain:
        data["domain"] = domain

    if flags.get("delta") is not None:
        data["delta"] = parse_risk_bound(flags["delta"]).model_dump()
    if flags.get("budget") is not None:
        data["budget"] = SampleBudget.parse(flags["budget"]).model_dump()
    if flags.get("m") is not None:
        data["m_range"] = flags["m"]

    for name in ("planner", "horizon", "functional", "discount", "c", "seed", "replicates", "workers", "oracle_method"):
        if flags.get(name) is not None:
            data[name] = flags[name]

    env_output = os.environ.get(OUTPUT_DIR_ENV)
    if flags.get("output") is not None:
        data["output_dir"] = flags["output"]
    elif env_output:
        data["output_dir"] = env_output
    return data


def resolve_config(config_path: Path | None = None, **flags: Any) -> RunConfig:
    base = load_config_file(config_path) if config_path is not None else {}
    try:
        return RunConfig.model_validate(apply_overrides(base, flags))
    except ValidationError as exc:
        raise InvalidConfig(f"invalid run configuration:\n{exc}") from exc
