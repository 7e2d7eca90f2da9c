"""Result records written by the harness.

Each run writes one JSON document per replicate and one CSV summary per command.
The JSON layout is versioned by ``schema_version``; README.md documents both formats.
"""

from __future__ import annotations

import csv
import logging
from importlib import metadata
from pathlib import Path
from typing import Any, Sequence

from pydantic import BaseModel, ConfigDict, Field

from ccplan.core.policy import PolicyNode, PolicyTree
from ccplan.oracle.penalty import PenaltyGap

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"

SUMMARY_COLUMNS = [
    "replicate",
    "seed",
    "domain",
    "planner",
    "horizon",
    "delta",
    "functional",
    "budget",
    "root_value",
    "complete",
    "expected_reward",
    "execution_risk",
    "risk_limit",
    "feasible",
    "samples",
    "deletions",
    "nodes",
    "elapsed_seconds",
]


def library_version() -> str:
    try:
        return metadata.version("ccplan")
    except metadata.PackageNotFoundError:
        return "unknown"


class PolicyRecord(BaseModel):
    key: str
    action: str | None = None
    action_index: int | None = None
    value: float | None = None
    visits: int = 0
    children: dict[str, PolicyRecord] = Field(default_factory=dict)

    @classmethod
    def from_node(cls, node: PolicyNode[Any, Any]) -> PolicyRecord:
        return cls(
            key=node.history.render_key(),
            action=None if node.action is None else str(node.action),
            action_index=node.action_index,
            value=node.value,
            visits=node.visits,
            children={str(branch): cls.from_node(child) for branch, child in sorted(node.children.items())},
        )

    @classmethod
    def from_policy(cls, policy: PolicyTree[Any, Any]) -> PolicyRecord:
        return cls.from_node(policy.root)


class ExactEvaluation(BaseModel):
    expected_reward: float
    execution_risk: float
    risk_limit: float
    feasible: bool


class PenaltySummary(BaseModel):
    optimal_action: int | None
    never_selected: bool
    # (M, action before, action after)
    transitions: list[tuple[float, int | None, int | None]]
    ties: list[float]

    @classmethod
    def from_gap(cls, gap: PenaltyGap) -> PenaltySummary:
        return cls(
            optimal_action=gap.optimal_action_index,
            never_selected=not gap.recovers_optimum,
            transitions=gap.transitions,
            ties=gap.ties,
        )


class RunResult(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: str = SCHEMA_VERSION
    library_version: str = Field(default_factory=library_version)
    config: dict[str, Any]
    replicate: int
    seed: int
    domain: str
    planner: str
    horizon: int
    delta: str
    functional: str
    budget: str
    root_value: float | None
    complete: bool
    policy: PolicyRecord | None
    evaluation: ExactEvaluation | None = None
    # keys of policy leaves failing the local constraint on their partial history
    audit_violations: list[str] = Field(default_factory=list)
    stats: dict[str, float | int] = Field(default_factory=dict)
    elapsed_seconds: float = 0.0
    # why the run produced no policy, when it did not
    outcome: str = "ok"

    def summary_row(self) -> dict[str, Any]:
        row: dict[str, Any] = {
            "replicate": self.replicate,
            "seed": self.seed,
            "domain": self.domain,
            "planner": self.planner,
            "horizon": self.horizon,
            "delta": self.delta,
            "functional": self.functional,
            "budget": self.budget,
            "root_value": "" if self.root_value is None else self.root_value,
            "complete": self.complete,
            "samples": self.stats.get("samples", ""),
            "deletions": self.stats.get("deletions", ""),
            "nodes": self.stats.get("nodes", ""),
            "elapsed_seconds": self.elapsed_seconds,
        }
        if self.evaluation is not None:
            row.update(self.evaluation.model_dump())
        return row


def write_result(directory: Path, name: str, result: RunResult) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{name}.json"
    path.write_text(result.model_dump_json(indent=2), encoding="utf-8")
    logger.debug("wrote %s", path)
    return path


def write_csv(path: Path, fieldnames: Sequence[str], rows: Sequence[dict[str, Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in fieldnames})
    logger.debug("wrote %d rows to %s", len(rows), path)
    return path


def write_summary(path: Path, results: Sequence[RunResult]) -> Path:
    return write_csv(path, SUMMARY_COLUMNS, [result.summary_row() for result in results])
