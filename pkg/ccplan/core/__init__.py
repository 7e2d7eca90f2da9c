from .model import CcmdpModel as CcmdpModel, Outcome as Outcome, OutcomeSet as OutcomeSet
from .history import FAILURE_BRANCH as FAILURE_BRANCH, StateHistory as StateHistory, Step as Step
from .policy import PolicyNode as PolicyNode, PolicyTree as PolicyTree
from .rewards import f_g as f_g, f_one as f_one, functional as functional, lifetime_reward as lifetime_reward
from .risk_bound import (
    ConstantBound as ConstantBound,
    LinearBound as LinearBound,
    RiskBound as RiskBound,
    SaturatingAffineBound as SaturatingAffineBound,
    check_risk_bound as check_risk_bound,
    parse_risk_bound as parse_risk_bound,
)
from .validation import Violation as Violation, validate_model as validate_model
