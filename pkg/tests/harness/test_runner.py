import csv
from pathlib import Path

import jiter
import pytest

from ccplan.domains.counterexample import counterexample_model
from ccplan.errors import InvalidConfig, VerificationFailure
from ccplan.harness.config import resolve_config
from ccplan.harness.results import (
    SCHEMA_VERSION,
    SUMMARY_COLUMNS,
    ExactEvaluation,
    PolicyRecord,
    write_result,
    write_summary,
)
from ccplan.harness.runner import check_result, run_replicate, run_replicates
from tests.helpers import build_policy


# policy records
def test_policy_record_mirrors_the_tree() -> None:
    """Test that a policy record keeps keys, actions and children by branch."""
    model = counterexample_model()

    record = PolicyRecord.from_policy(build_policy(model, lambda _: 1))

    assert record.key == ""
    assert record.action == "1"
    assert record.action_index == 1
    assert list(record.children) == ["0"]
    assert record.children["0"].key == "1.0"
    assert record.children["0"].action is None


# replicates
def test_forward_search_replicate() -> None:
    """Test a forward search run on the counterexample."""
    result = run_replicate(resolve_config(domain="counterexample", planner="vulcanfs"), 0)

    assert result.outcome == "ok"
    assert result.root_value == pytest.approx(6.0)
    assert result.complete
    assert result.evaluation is not None
    assert result.evaluation.feasible
    assert result.audit_violations == []
    assert result.stats["explored_histories"] == 4
    assert result.delta == "linear:0.004"


def test_tree_search_replicates_use_consecutive_seeds() -> None:
    """Test that replicate i runs with seed + i and records sampling statistics."""
    config = resolve_config(domain="counterexample", planner="mcts", budget="samples:32", seed=7, replicates=3)

    results = run_replicates(config)

    assert [r.replicate for r in results] == [0, 1, 2]
    assert [r.seed for r in results] == [7, 8, 9]
    assert all(r.stats["samples"] == 32 for r in results)
    assert all(r.policy is not None and r.policy.action_index == 1 for r in results)


def test_oracle_replicate() -> None:
    """Test an oracle run on the counterexample."""
    result = run_replicate(resolve_config(domain="counterexample", planner="oracle"), 0)

    assert result.root_value == pytest.approx(6.0)
    assert result.evaluation is not None
    assert result.evaluation.expected_reward == pytest.approx(6.0)


@pytest.mark.parametrize(
    ("planner", "outcome"),
    [("forward-search", "no-solution"), ("mcts", "no-solution"), ("oracle", "infeasible")],
)
def test_unsolvable_runs_record_their_outcome(planner: str, outcome: str) -> None:
    """Test that planners without a solution produce a record instead of raising."""
    config = resolve_config(domain="counterexample", planner=planner, delta="constant:0", budget="samples:20")

    result = run_replicate(config, 0)

    assert result.outcome == outcome
    assert result.policy is None
    assert result.root_value is None


def test_penalty_sweep_is_not_a_replicate() -> None:
    """Test that the penalty sweep cannot be run as a replicate."""
    with pytest.raises(InvalidConfig):
        run_replicate(resolve_config(domain="counterexample", planner="penalty-sweep"), 0)


# verification of results
def test_check_result_flags_infeasible_complete_policy() -> None:
    """Test that an infeasible complete policy fails verification."""
    result = run_replicate(resolve_config(domain="counterexample", planner="vulcanfs"), 0)
    check_result(result)

    evaluation = ExactEvaluation(expected_reward=10.0, execution_risk=0.05, risk_limit=0.04, feasible=False)
    bad = result.model_copy(update={"evaluation": evaluation})
    with pytest.raises(VerificationFailure):
        check_result(bad)

    with pytest.raises(VerificationFailure):
        check_result(result.model_copy(update={"audit_violations": ["2.0"]}))


# writing
def test_result_and_summary_files(tmp_path: Path) -> None:
    """Test the JSON record and the CSV summary written for a run."""
    config = resolve_config(domain="counterexample", planner="mcts", budget="samples:16", replicates=2)
    results = run_replicates(config)

    path = write_result(tmp_path / "run", "replicate-000", results[0])
    summary = write_summary(tmp_path / "run" / "summary.csv", results)

    document = jiter.from_json(path.read_bytes())
    assert document["schema_version"] == SCHEMA_VERSION
    assert document["config"]["planner"] == "mcts"
    assert document["policy"]["action_index"] == 1

    with summary.open(newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 2
    assert list(rows[0]) == SUMMARY_COLUMNS
    assert rows[1]["seed"] == "1"
    assert rows[0]["feasible"] == "True"
