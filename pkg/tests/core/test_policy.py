from ccplan.core.history import StateHistory
from ccplan.core.policy import PolicyNode, PolicyTree
from tests.helpers import TableModel, build_policy, create_arm


def create_model() -> TableModel:
    """Create a two-action, two-branch model of horizon 2."""
    return TableModel(arms=(create_arm(0.0, (0.5, 1.0), (0.5, 0.0)), create_arm(0.0, (1.0, 0.7))), horizon=2)


# shape
def test_complete_policy_covers_every_branch() -> None:
    """Test size, depth, leaves and completeness of a full policy."""
    policy = build_policy(create_model())

    assert policy.complete
    assert policy.size == 7
    assert policy.depth == 2
    assert len(list(policy.leaves())) == 4


def test_missing_child_makes_policy_incomplete() -> None:
    """Test that dropping a child leaves the policy incomplete."""
    policy = build_policy(create_model())
    del policy.root.children[1]

    assert not policy.complete


def test_terminal_node_before_horizon_is_incomplete() -> None:
    """Test that a policy ending early is incomplete."""
    policy: PolicyTree[int, int] = PolicyTree(root=PolicyNode(history=StateHistory.initial(0)), horizon=2)

    assert not policy.complete
    assert policy.depth == 0


# lookup
def test_action_map_and_node_lookup() -> None:
    """Test rendering of the policy as key -> action index and lookup by key."""
    policy = build_policy(create_model(), lambda h: 1 if h.t == 0 else 0)

    assert policy.action_map() == {"": 1, "1.0": 0}
    node = policy.node_at("1.0")
    assert node is not None
    assert node.action_index == 0
    assert policy.node_at("0.0") is None


def test_iteration_is_depth_first_in_branch_order() -> None:
    """Test that nodes are yielded depth first with lower branches first."""
    policy = build_policy(create_model())

    keys = [node.history.render_key() for node in policy.nodes()]

    assert keys == ["", "0.0", "0.0.0.0", "0.0.0.1", "0.1", "0.1.0.0", "0.1.0.1"]
