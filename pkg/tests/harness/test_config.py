import json
from pathlib import Path

import pytest

from ccplan.core.risk_bound import ConstantBound, LinearBound, SaturatingAffineBound
from ccplan.domains.bandit import BanditModel
from ccplan.domains.counterexample import CounterexampleModel
from ccplan.domains.exploration import GpExplorationModel
from ccplan.domains.random_instance import RandomModel
from ccplan.errors import InvalidConfig
from ccplan.harness.config import (
    OUTPUT_DIR_ENV,
    BanditDomain,
    GpDomain,
    RunConfig,
    build_model,
    parse_grid,
    resolve_config,
)
from ccplan.planners.budget import SampleBudget


@pytest.fixture(autouse=True)
def clear_output_env(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)


# defaults
def test_defaults() -> None:
    """Test the default run configuration."""
    config = resolve_config()

    assert config.domain == BanditDomain()
    assert config.planner == "forward-search"
    assert config.horizon == 2
    assert config.functional == "f1"
    assert config.budget == SampleBudget.samples(10_000)
    assert config.output_dir == Path("results")
    assert config.risk_bound() == LinearBound(alpha=0.002)


@pytest.mark.parametrize(
    ("domain", "bound"),
    [
        ("bandit", LinearBound(alpha=0.002)),
        ("gp", SaturatingAffineBound(a=0.4, b=0.015, c=0.001)),
        ("counterexample", LinearBound(alpha=0.004)),
        ("random", LinearBound(alpha=0.005)),
    ],
)
def test_domain_default_bounds(domain: str, bound: object) -> None:
    """Test that each domain brings its usual risk bound."""
    assert resolve_config(domain=domain).risk_bound() == bound


# flags
def test_flags_override_defaults() -> None:
    """Test that command-line flags are applied."""
    config = resolve_config(
        domain="counterexample",
        planner="vulcan",
        horizon=1,
        delta="constant:0.01",
        budget="seconds:2",
        seed=9,
        replicates=3,
        m="0:10:1",
    )

    assert config.domain.kind == "counterexample"
    assert config.planner == "mcts"
    assert config.horizon == 1
    assert config.risk_bound() == ConstantBound(delta=0.01)
    assert config.budget == SampleBudget.seconds(2.0)
    assert config.m_range == "0:10:1"
    assert [config.replicate_seed(i) for i in range(config.replicates)] == [9, 10, 11]


def test_planner_aliases() -> None:
    """Test that vulcanfs maps to forward search."""
    assert resolve_config(planner="vulcanfs").planner == "forward-search"


def test_fig2_is_the_counterexample_domain(tmp_path: Path) -> None:
    """Test that fig2 selects the counterexample from flags and from a config file."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"domain": {"kind": "fig2"}}))

    assert resolve_config(domain="fig2").domain.kind == "counterexample"
    assert resolve_config(path).domain.kind == "counterexample"
    assert isinstance(build_model(resolve_config(domain="fig2")), CounterexampleModel)


def test_table1_preset_is_the_default() -> None:
    """Test that table1 and three-machines name the same machines."""
    config = resolve_config(domain="bandit", preset="table1")

    assert isinstance(config.domain, BanditDomain)
    assert config.domain.resolve_machines() == BanditDomain(preset="three-machines").resolve_machines()
    assert BanditDomain().preset == "table1"


@pytest.mark.parametrize("discount", [0.0, 0.5, 1.0])
def test_discount_accepts_the_closed_unit_interval(discount: float) -> None:
    """Test that any discount in [0, 1] is accepted."""
    assert resolve_config(discount=discount).discount == discount


def test_grid_flag_sets_exploration_size() -> None:
    """Test that --grid sizes the exploration domain."""
    config = resolve_config(domain="gp", grid="5x4")

    assert isinstance(config.domain, GpDomain)
    assert (config.domain.grid.width, config.domain.grid.height) == (5, 4)


@pytest.mark.parametrize(
    "flags",
    [
        {"delta": "linear"},
        {"budget": "forever"},
        {"horizon": -1},
        {"planner": "astar"},
        {"domain": "chess"},
        {"discount": -0.1},
        {"discount": 1.5},
    ],
)
def test_bad_flags_raise_invalid_config(flags: dict[str, object]) -> None:
    """Test that invalid flag values raise InvalidConfig."""
    with pytest.raises(InvalidConfig):
        resolve_config(**flags)


def test_parse_grid() -> None:
    """Test parsing of WxH grid sizes."""
    assert parse_grid("6x6") == (6, 6)
    assert parse_grid("3X2") == (3, 2)
    with pytest.raises(InvalidConfig):
        parse_grid("six")


# files and environment
def test_file_values_with_flags_on_top(tmp_path: Path) -> None:
    """Test that a config file is read and flags win over it."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"domain": {"kind": "random", "instance_seed": 4}, "horizon": 3, "seed": 2}))

    config = resolve_config(path, seed=5)

    assert config.domain.kind == "random"
    assert config.horizon == 3
    assert config.seed == 5


def test_domain_flag_replaces_a_different_file_domain(tmp_path: Path) -> None:
    """Test that switching domain on the command line drops the file's domain settings."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"domain": {"kind": "random", "instance_seed": 4}}))

    assert resolve_config(path, domain="counterexample").domain.kind == "counterexample"


def test_unreadable_or_malformed_file(tmp_path: Path) -> None:
    """Test that missing files, bad JSON and unknown keys raise InvalidConfig."""
    with pytest.raises(InvalidConfig):
        resolve_config(tmp_path / "missing.json")

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidConfig):
        resolve_config(bad)

    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"horizn": 3}))
    with pytest.raises(InvalidConfig):
        resolve_config(unknown)


def test_output_dir_precedence(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    """Test that --output beats the environment, which beats the default."""
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env"))

    assert resolve_config().output_dir == tmp_path / "env"
    assert resolve_config(output=str(tmp_path / "flag")).output_dir == tmp_path / "flag"


# models
@pytest.mark.parametrize(
    ("domain", "model_type"),
    [
        ("bandit", BanditModel),
        ("gp", GpExplorationModel),
        ("counterexample", CounterexampleModel),
        ("random", RandomModel),
    ],
)
def test_build_model(domain: str, model_type: type) -> None:
    """Test that each domain config builds its model with the configured horizon and bound."""
    config = resolve_config(domain=domain, horizon=1, delta="linear:0.01")

    model = build_model(config)

    assert isinstance(model, model_type)
    assert model.horizon == 1
    assert model.risk_bound == LinearBound(alpha=0.01)


def test_explicit_machines_win_over_preset() -> None:
    """Test that machines given in the config replace the preset."""
    machine = {"reward_1": 0.0, "reward_2": 1.0, "p1": 0.1, "p2": 0.9, "theta0": 0.5, "risk": 0.0}
    config = RunConfig.model_validate({"domain": {"kind": "bandit", "machines": [machine]}})

    model = build_model(config)

    assert isinstance(model, BanditModel)
    assert len(model.machines) == 1
