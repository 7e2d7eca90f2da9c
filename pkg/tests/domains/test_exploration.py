import math

import pytest

from ccplan.core.history import StateHistory
from ccplan.core.risk_bound import SaturatingAffineBound
from ccplan.core.validation import validate_model
from ccplan.domains.collision import Obstacle
from ccplan.domains.exploration import GpExplorationConfig, GpExplorationModel, GpVehicleState, gp_exploration_model
from ccplan.errors import InvalidConfig
from ccplan.planners.forward_search import forward_search

BOUND = SaturatingAffineBound(a=0.4, b=0.015, c=0.001)

type Move = tuple[int, int]


def create_model(horizon: int = 2, **config: object) -> GpExplorationModel:
    """Create an exploration model on a small grid."""
    settings: dict[str, object] = {"width": 4, "height": 4}
    settings.update(config)
    return gp_exploration_model(settings, horizon, BOUND)


def root_of(model: GpExplorationModel) -> StateHistory[GpVehicleState, Move]:
    """Create the initial history of a model."""
    return StateHistory.initial(model.initial_state)


# configuration
def test_defaults() -> None:
    """Test the default grid and covariances."""
    config = GpExplorationConfig()

    assert (config.width, config.height, config.start) == (6, 6, (0, 0))
    assert config.covariance_at(0)[0, 0] == pytest.approx(0.005)
    assert config.covariance_at(3)[1, 1] == pytest.approx(0.005 + 3 * 0.0001)


@pytest.mark.parametrize(
    "settings",
    [
        {"start": (9, 9)},
        {"start": (1, 1), "obstacles": [{"x_min": 0.5, "y_min": 0.5, "x_max": 1.5, "y_max": 1.5}]},
        {"initial_covariance": ((0.005, 0.001), (0.0, 0.005))},
        {"step_covariance": ((-0.1, 0.0), (0.0, 0.1))},
    ],
)
def test_invalid_layouts_are_rejected(settings: dict[str, object]) -> None:
    """Test that bad starts and covariances raise InvalidConfig."""
    with pytest.raises(InvalidConfig):
        gp_exploration_model(settings, 2, BOUND)


# actions
def test_corner_start_has_three_moves() -> None:
    """Test that only in-grid neighbours are offered at a corner."""
    model = create_model()

    assert model.actions(root_of(model)) == [(0, 1), (1, 0), (1, 1)]


def test_obstacle_cells_are_blocked() -> None:
    """Test that cells covered by an obstacle are not offered, boundary included."""
    obstacle = Obstacle(x_min=1.0, y_min=1.0, x_max=2.0, y_max=2.0)
    model = create_model(obstacles=[obstacle.model_dump()])

    assert model.actions(root_of(model)) == [(0, 1), (1, 0)]


# outcomes
def test_initial_state_observes_the_start_cell() -> None:
    """Test that the start cell is observed at its prior mean."""
    state = create_model().initial_state

    assert state.visited == frozenset({(0, 0)})
    assert state.observations[0].value == pytest.approx(1.0)


def test_new_cell_branches_over_quadrature_nodes() -> None:
    """Test that moving to a new cell yields four safe outcomes whose probabilities sum to one."""
    model = create_model()
    outcomes = model.outcomes(root_of(model), (1, 1))

    assert len(outcomes.safe_outcomes) == 4
    assert outcomes.problems() == []
    assert all(o.next_state.position == (1, 1) for o in outcomes.safe_outcomes)
    assert all(o.next_state.t == 1 for o in outcomes.safe_outcomes)


def test_revisit_pays_nothing() -> None:
    """Test that returning to a visited cell yields one outcome with zero reward."""
    model = create_model(horizon=3)
    root = root_of(model)
    there = model.outcomes(root, (1, 0))
    moved = root.extend((1, 0), 1, there, 0)

    back = model.outcomes(moved, (-1, 0))

    assert len(back.safe_outcomes) == 1
    assert back.safe_outcomes[0].reward == 0.0
    assert back.safe_outcomes[0].next_state.observations == moved.terminal_state.observations


def test_moving_next_to_an_obstacle_is_risky() -> None:
    """Test that a destination hugging an obstacle edge carries collision risk."""
    obstacle = Obstacle(x_min=1.05, y_min=-1.0, x_max=2.0, y_max=0.5)
    model = create_model(obstacles=[obstacle.model_dump()])

    outcomes = model.outcomes(root_of(model), (1, 0))
    safe = model.outcomes(root_of(model), (0, 1))

    assert outcomes.failure_probability > 0.1
    assert safe.failure_probability < 1e-12
    assert math.fsum(o.probability for o in outcomes.safe_outcomes) == pytest.approx(1.0 - outcomes.failure_probability)


def test_outcomes_are_deterministic_and_valid() -> None:
    """Test the whole horizon-2 model against the model contract."""
    assert validate_model(create_model(horizon=2, width=3, height=3)) == []


# planning
def test_forward_search_finds_a_policy() -> None:
    """Test that forward search plans a short exploration without obstacles."""
    result = forward_search(create_model(horizon=2, width=3, height=3))

    assert result.has_solution
    assert result.root_value is not None
    assert result.root_value > 2.0
