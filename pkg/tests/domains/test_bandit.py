import math

import pytest
from pydantic import ValidationError

from ccplan.core.history import StateHistory
from ccplan.core.risk_bound import LinearBound
from ccplan.core.validation import validate_model
from ccplan.domains.bandit import (
    END_GAME,
    NO_OP,
    BanditAction,
    BanditModel,
    BanditState,
    MachineParams,
    bandit_model,
    bandit_update,
    machine_preset,
)
from ccplan.errors import InvalidConfig, UnknownReward


def create_machine(**overrides: float) -> MachineParams:
    """Create a 0/1 machine with payout probability 0.3 or 0.7 and an even prior."""
    params = {"reward_1": 0.0, "reward_2": 1.0, "p1": 0.3, "p2": 0.7, "theta0": 0.5, "risk": 0.001}
    params.update(overrides)
    return MachineParams(**params)


def create_model(horizon: int = 3) -> BanditModel:
    """Create the three-machine bandit."""
    return bandit_model(machine_preset("three-machines"), horizon, LinearBound(alpha=0.002))


# belief updates
def test_update_after_each_reward() -> None:
    """Test the posterior after observing either reward from an even prior."""
    machine = create_machine()

    assert bandit_update(0.5, machine, 0.0) == pytest.approx(0.3)
    assert bandit_update(0.5, machine, 1.0) == pytest.approx(0.7)


def test_update_from_a_certain_belief_stays_put() -> None:
    """Test that a belief of 1 is not moved by evidence."""
    machine = create_machine()

    assert bandit_update(1.0, machine, 0.0) == 1.0
    assert bandit_update(0.0, machine, 1.0) == 0.0


def test_update_is_a_martingale() -> None:
    """Test that the expected posterior equals the prior."""
    machine = create_machine(p1=0.2, p2=0.5, reward_1=0.2, reward_2=0.5)
    for theta in (0.1, 0.6, 0.93):
        expected = math.fsum(
            machine.reward_probability(theta, r) * bandit_update(theta, machine, r) for r in (0.2, 0.5)
        )
        assert expected == pytest.approx(theta)


def test_unknown_reward_raises() -> None:
    """Test that a reward the machine cannot pay is rejected."""
    with pytest.raises(UnknownReward):
        bandit_update(0.5, create_machine(), 0.5)


def test_marginal_reward_probability() -> None:
    """Test the marginal probability of the high reward under an even prior."""
    assert create_machine().reward_probability(0.5, 1.0) == pytest.approx(0.5)


# machine parameters
def test_machine_rejects_equal_rewards() -> None:
    """Test that a machine needs two distinct rewards."""
    with pytest.raises(ValidationError):
        create_machine(reward_2=0.0)


def test_machine_rejects_probability_out_of_range() -> None:
    """Test that probabilities above 1 are rejected."""
    with pytest.raises(ValidationError):
        create_machine(risk=1.5)


def test_unknown_preset() -> None:
    """Test that an unknown preset name raises InvalidConfig."""
    with pytest.raises(InvalidConfig):
        machine_preset("four-machines")


# model
def test_initial_state_holds_priors() -> None:
    """Test that the initial beliefs are the machines' priors."""
    assert create_model().initial_state == BanditState(theta=(0.5, 0.6, 0.3))


def test_actions_are_machines_then_end() -> None:
    """Test the action list before and after ending the game."""
    model = create_model()
    root: StateHistory[BanditState, BanditAction] = StateHistory.initial(model.initial_state)
    actions = model.actions(root)

    assert [str(a) for a in actions] == ["play:0", "play:1", "play:2", "end"]

    ended = root.extend(END_GAME, 3, model.outcomes(root, END_GAME), 0)
    assert model.actions(ended) == [NO_OP]


def test_end_pays_for_every_remaining_step() -> None:
    """Test that ending at t pays 0.25 (n - t) and the no-op afterwards pays nothing."""
    model = create_model(horizon=3)
    root: StateHistory[BanditState, BanditAction] = StateHistory.initial(model.initial_state)
    outcomes = model.outcomes(root, END_GAME)

    assert outcomes.expected_reward == pytest.approx(0.75)
    assert outcomes.failure_probability == 0.0

    ended = root.extend(END_GAME, 3, outcomes, 0)
    assert model.outcomes(ended, NO_OP).expected_reward == 0.0


def test_play_splits_survival_between_rewards() -> None:
    """Test the outcomes of playing the first machine from the prior."""
    model = create_model()
    root: StateHistory[BanditState, BanditAction] = StateHistory.initial(model.initial_state)

    outcomes = model.outcomes(root, BanditAction("play", 0))

    assert outcomes.failure_probability == 0.001
    assert [o.probability for o in outcomes.safe_outcomes] == pytest.approx([0.999 * 0.5, 0.999 * 0.5])
    assert [o.next_state.theta[0] for o in outcomes.safe_outcomes] == pytest.approx([0.3, 0.7])
    assert outcomes.expected_reward == pytest.approx(0.999 * 0.5)
    assert outcomes.problems() == []


def test_bandit_model_is_valid() -> None:
    """Test that every outcome set of the horizon-3 bandit is well formed and deterministic."""
    assert validate_model(create_model(horizon=3)) == []


def test_model_rejects_bad_arguments() -> None:
    """Test that an empty machine list and a negative horizon are rejected."""
    with pytest.raises(InvalidConfig):
        BanditModel((), 2, LinearBound(alpha=0.002))
    with pytest.raises(InvalidConfig):
        create_model(horizon=-1)
