from .core import (
    CcmdpModel as CcmdpModel,
    ConstantBound as ConstantBound,
    LinearBound as LinearBound,
    Outcome as Outcome,
    OutcomeSet as OutcomeSet,
    PolicyTree as PolicyTree,
    SaturatingAffineBound as SaturatingAffineBound,
    StateHistory as StateHistory,
    f_g as f_g,
    f_one as f_one,
)
from .oracle import evaluate_policy as evaluate_policy, optimal_policy as optimal_policy
from .planners import SampleBudget as SampleBudget, forward_search as forward_search, tree_search as tree_search
from .risk import (
    execution_risk_exact as execution_risk_exact,
    local_constraint_holds as local_constraint_holds,
    sequence_execution_risk as sequence_execution_risk,
)

__version__ = "0.1.0"
