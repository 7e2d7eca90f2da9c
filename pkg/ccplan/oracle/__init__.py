from .enumeration import (
    PolicyEvaluation as PolicyEvaluation,
    count_policies as count_policies,
    enumerate_policies as enumerate_policies,
    evaluate_policy as evaluate_policy,
)
from .frontier import ParetoFrontier as ParetoFrontier, pareto_frontier as pareto_frontier
from .optimal import optimal_policy as optimal_policy
from .penalty import (
    PenaltyChoice as PenaltyChoice,
    PenaltyGap as PenaltyGap,
    parse_m_range as parse_m_range,
    penalty_gap as penalty_gap,
    penalty_sweep as penalty_sweep,
)
