from .budget import SampleBudget as SampleBudget
from .default_policy import (
    DefaultPolicy as DefaultPolicy,
    GreedyPolicy as GreedyPolicy,
    UniformRandomPolicy as UniformRandomPolicy,
)
from .forward_search import (
    ForwardSearchResult as ForwardSearchResult,
    count_reachable_histories as count_reachable_histories,
    forward_search as forward_search,
)
from .tree_search import (
    SearchNode as SearchNode,
    SearchStats as SearchStats,
    TreeSearch as TreeSearch,
    TreeSearchResult as TreeSearchResult,
    tree_search as tree_search,
    uct_select as uct_select,
)
