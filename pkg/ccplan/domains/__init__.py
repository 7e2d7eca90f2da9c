from .bandit import (
    MACHINE_PRESETS as MACHINE_PRESETS,
    BanditAction as BanditAction,
    BanditModel as BanditModel,
    BanditState as BanditState,
    MachineParams as MachineParams,
    bandit_model as bandit_model,
    bandit_update as bandit_update,
    machine_preset as machine_preset,
)
from .collision import Obstacle as Obstacle, collision_risk as collision_risk
from .counterexample import CounterexampleModel as CounterexampleModel, counterexample_model as counterexample_model
from .exploration import (
    GpExplorationConfig as GpExplorationConfig,
    GpExplorationModel as GpExplorationModel,
    GpVehicleState as GpVehicleState,
    gp_exploration_model as gp_exploration_model,
)
from .gp import (
    GpHyperparameters as GpHyperparameters,
    GpObservation as GpObservation,
    gauss_hermite_outcomes as gauss_hermite_outcomes,
    gp_posterior as gp_posterior,
)
from .random_instance import (
    RandomModel as RandomModel,
    random_model as random_model,
    sample_random_model as sample_random_model,
)
