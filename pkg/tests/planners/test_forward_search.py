import pytest

from ccplan.core.risk_bound import ConstantBound, LinearBound
from ccplan.core.rewards import f_g, f_one
from ccplan.domains.bandit import bandit_model, machine_preset
from ccplan.domains.counterexample import counterexample_model
from ccplan.errors import BudgetExceeded
from ccplan.planners.forward_search import count_reachable_histories, forward_search
from ccplan.risk import audit_policy
from tests.helpers import TableModel, create_arm, create_chain


# small models
def test_single_riskless_action() -> None:
    """Test that a one-step riskless model is solved with its reward."""
    result = forward_search(create_chain(1))

    assert result.has_solution
    assert result.root_value == pytest.approx(1.0)
    assert result.policy is not None
    assert result.policy.complete


def test_counterexample_picks_second_action() -> None:
    """Test that the riskiest action is excluded and the best remaining one is chosen."""
    result = forward_search(counterexample_model())

    assert result.root_value == pytest.approx(6.0)
    assert result.policy is not None
    assert result.policy.root.action_index == 1
    assert result.explored_history_count == 4


def test_no_solution_when_every_action_is_risky() -> None:
    """Test that a zero risk bound leaves no feasible policy."""
    result = forward_search(counterexample_model(ConstantBound(delta=0.0)))

    assert not result.has_solution
    assert result.root_value is None
    assert result.policy is None


def test_ties_keep_the_lowest_action_index() -> None:
    """Test that two equally good actions resolve to the first."""
    model = TableModel(arms=(create_arm(0.0, (1.0, 2.0)), create_arm(0.0, (1.0, 2.0))), horizon=2)

    result = forward_search(model)

    assert result.policy is not None
    assert set(result.policy.action_map().values()) == {0}


def test_risky_action_is_never_chosen() -> None:
    """Test that the best-paying action is dropped when it breaks the bound wherever it is taken."""
    model = TableModel(
        arms=(create_arm(0.0, (0.5, 1.0), (0.5, 1.0)), create_arm(0.0, (1.0, 0.5)), create_arm(0.2, (1.0, 3.0))),
        horizon=2,
        risk_bound=LinearBound(alpha=0.01),
    )

    result = forward_search(model)

    assert result.policy is not None
    assert result.root_value == pytest.approx(2.0)
    assert audit_policy(model, result.policy, f_one) == []


def test_discount_applies_to_later_rewards() -> None:
    """Test the root value of a discounted riskless chain."""
    result = forward_search(create_chain(3, discount=0.5))

    assert result.root_value == pytest.approx(1.0 + 0.5 + 0.25)


def test_functionals_agree_when_failure_pays_the_same() -> None:
    """Test that f_g and f_one agree on a deterministic-reward model."""
    model = counterexample_model()

    assert forward_search(model, f_g).root_value == pytest.approx(forward_search(model, f_one).root_value)


def test_node_budget_is_enforced() -> None:
    """Test that forward search stops with BudgetExceeded past its node budget."""
    model = TableModel(arms=(create_arm(0.0, (0.5, 1.0), (0.5, 0.0)),), horizon=12)

    with pytest.raises(BudgetExceeded):
        forward_search(model, node_budget=1000)


# bandit
def test_bandit_horizon_two_value() -> None:
    """Test the three-machine bandit at horizon 2 under Delta(x) = 0.002 x."""
    model = bandit_model(machine_preset("three-machines"), 2, LinearBound(alpha=0.002))

    result = forward_search(model)

    assert result.root_value == pytest.approx(0.9906, rel=1e-3)
    assert result.policy is not None
    assert str(result.policy.root.action) == "play:0"


# reachable histories
@pytest.mark.parametrize(
    ("model", "expected"),
    [
        (create_chain(3), 4),
        (TableModel(arms=(create_arm(0.0, (0.5, 1.0), (0.5, 0.0)),) * 2, horizon=2), 21),
        (counterexample_model(), 4),
        (create_chain(0), 1),
    ],
)
def test_count_reachable_histories(model: object, expected: int) -> None:
    """Test history counts on chains, a 2x2 tree and the counterexample."""
    assert count_reachable_histories(model) == expected  # type: ignore[arg-type]
