"""Desk-scale reproductions on the bandit, random instances and the exploration grid. Run with ``pytest -m slow``."""

import pytest

from ccplan.core.rewards import f_one
from ccplan.core.risk_bound import LinearBound, SaturatingAffineBound
from ccplan.domains.bandit import bandit_model, machine_preset
from ccplan.domains.collision import Obstacle
from ccplan.domains.exploration import gp_exploration_model
from ccplan.errors import NoSolution
from ccplan.harness.config import resolve_config
from ccplan.harness.sweeps import alpha_grid, convergence, sweep_alpha
from ccplan.harness.verify import theorem1_suite
from ccplan.oracle.optimal import optimal_policy
from ccplan.planners.budget import SampleBudget
from ccplan.planners.forward_search import forward_search
from ccplan.planners.tree_search import tree_search
from ccplan.risk import audit_policy, execution_risk_exact, expected_reward_exact

# horizon: (optimal reward, forward search reward)
BANDIT_REWARDS = {
    2: (0.9906, 0.9906),
    3: (1.5280, 1.4892),
    4: (2.0627, 2.0167),
    5: (2.6068, 2.5201),
}


@pytest.mark.slow
@pytest.mark.parametrize("horizon", sorted(BANDIT_REWARDS))
def test_bandit_rewards_by_horizon(horizon: int) -> None:
    """Test the oracle and forward search values within 1% and a suboptimality of at most 4%."""
    optimal, searched = BANDIT_REWARDS[horizon]
    model = bandit_model(machine_preset("three-machines"), horizon, LinearBound(alpha=0.002))

    _, best = optimal_policy(model, method="frontier")
    found = forward_search(model)

    assert found.root_value is not None
    assert best.expected_reward == pytest.approx(optimal, rel=0.01)
    assert found.root_value == pytest.approx(searched, rel=0.01)
    assert (best.expected_reward - found.root_value) / best.expected_reward <= 0.04


@pytest.mark.slow
def test_alpha_sweep_against_the_optimum() -> None:
    """Test the suboptimality of forward search over 21 linear bounds at horizon 4."""
    rows = sweep_alpha(resolve_config(domain="bandit", horizon=4, functional="g"), alpha_grid(0.0005, 0.003, 21))

    assert len(rows) == 21
    assert all(row["status"] == "ok" for row in rows)
    assert rows[0]["suboptimality_percent"] == pytest.approx(0.0, abs=1e-9)
    assert rows[-1]["suboptimality_percent"] == pytest.approx(0.0, abs=1e-9)
    gaps = [row["suboptimality_percent"] for row in rows if row["suboptimality_percent"] > 1e-9]
    assert gaps
    assert sum(gaps) / len(gaps) == pytest.approx(4.45, abs=1.5)
    searched = [row["forward_search_reward"] for row in rows]
    assert all(later >= earlier - 1e-9 for earlier, later in zip(searched, searched[1:]))
    # piecewise constant: several bounds share one forward search policy
    assert len({round(value, 9) for value in searched}) < len(searched)


@pytest.mark.slow
def test_tree_search_converges_on_horizon_five() -> None:
    """Test that error shrinks with the budget and the final budget matches forward search."""
    config = resolve_config(domain="bandit", horizon=5, replicates=60)

    rows = convergence(config, [1000, 2000, 5000, 10000, 20000])

    errors = [row.mean_relative_error for row in rows]
    assert all(later <= earlier + 0.002 for earlier, later in zip(errors, errors[1:]))
    assert errors[-1] <= errors[0]
    assert errors[-1] <= 0.005
    assert rows[-1].policy_match_rate >= 0.9


@pytest.mark.slow
def test_execution_risk_within_bound_on_random_instances() -> None:
    """Test exact execution risk of forward search and tree search policies on 100 random instances."""
    report = theorem1_suite(range(100), SampleBudget.samples(100_000))

    assert report.instances == 100
    assert report.passed, report.failures


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_gp_tree_search_policies_are_feasible(seed: int) -> None:
    """Test seeded tree search on the 6x6 exploration grid with two obstacles at horizon 5."""
    bound = SaturatingAffineBound(a=0.4, b=0.015, c=0.001)
    obstacles = [
        Obstacle(x_min=1.1, y_min=1.1, x_max=1.9, y_max=2.9),
        Obstacle(x_min=3.1, y_min=2.1, x_max=4.9, y_max=2.9),
    ]
    model = gp_exploration_model({"width": 6, "height": 6, "obstacles": [o.model_dump() for o in obstacles]}, 5, bound)

    try:
        result = tree_search(model, SampleBudget.samples(5_000), seed=seed)
    except NoSolution:
        pytest.skip("no root action survived")

    assert audit_policy(model, result.policy, f_one) == []
    if result.complete:
        expected = expected_reward_exact(model, result.policy)
        assert execution_risk_exact(model, result.policy) <= bound(expected) + 1e-9
