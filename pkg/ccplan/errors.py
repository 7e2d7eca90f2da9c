from __future__ import annotations


class CcplanError(Exception):
    pass


class DegenerateRisk(CcplanError):
    """A safe history contains an action whose immediate risk is 1, so ser is undefined."""

    def __init__(self, key: str) -> None:
        super().__init__(f"immediate risk of 1 on safe history {key!r}")
        self.key = key


class BudgetExceeded(CcplanError):
    def __init__(self, what: str, bound: int, limit: int) -> None:
        super().__init__(f"{what}: {bound} exceeds budget of {limit}")
        self.what = what
        self.bound = bound
        self.limit = limit


class NoSolution(CcplanError):
    pass


class Infeasible(CcplanError):
    pass


class IncompletePolicy(CcplanError):
    def __init__(self, key: str) -> None:
        super().__init__(f"policy has no action at reachable history {key!r}")
        self.key = key


class NoActions(CcplanError):
    pass


class UnknownReward(CcplanError):
    pass


class SingularKernel(CcplanError):
    pass


class MeanInsideObstacle(CcplanError):
    pass


class InvalidConfig(CcplanError, ValueError):
    pass


class VerificationFailure(CcplanError):
    pass
