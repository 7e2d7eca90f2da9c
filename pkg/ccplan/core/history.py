from __future__ import annotations

import math
from dataclasses import dataclass

from ccplan.core.model import OutcomeSet

FAILURE_BRANCH = -1

type HistoryKey = tuple[tuple[int, int], ...]


@dataclass(frozen=True, slots=True)
class Step[S, A]:
    state: S
    action: A
    action_index: int
    branch: int
    reward: float
    # immediate risk r(s_t, a_t) and expected immediate reward of the action taken
    risk: float
    expected_reward: float
    probability: float


@dataclass(frozen=True, slots=True)
class StateHistory[S, A]:
    """An append-only sequence of (state, action) steps ending in a state.

    A failing history ends in the failure branch; its ``terminal_state`` is the
    last safe state and it cannot be extended.
    """

    steps: tuple[Step[S, A], ...]
    terminal_state: S
    failed: bool = False

    @classmethod
    def initial(cls, state: S) -> StateHistory[S, A]:
        return cls(steps=(), terminal_state=state)

    @property
    def t(self) -> int:
        return len(self.steps)

    @property
    def key(self) -> HistoryKey:
        return tuple((step.action_index, step.branch) for step in self.steps)

    def render_key(self) -> str:
        return render_key(self.key)

    @property
    def actions(self) -> tuple[A, ...]:
        return tuple(step.action for step in self.steps)

    def state_at(self, t: int) -> S:
        if t == len(self.steps):
            return self.terminal_state
        return self.steps[t].state

    def prefix(self, t: int) -> StateHistory[S, A]:
        if t >= len(self.steps):
            return self
        return StateHistory(steps=self.steps[:t], terminal_state=self.steps[t].state)

    def path_probability(self, start: int = 0) -> float:
        return math.prod(step.probability for step in self.steps[start:])

    def extend(self, action: A, action_index: int, outcomes: OutcomeSet[S], branch: int) -> StateHistory[S, A]:
        if self.failed:
            raise ValueError(f"cannot extend failing history {self.render_key()!r}")

        if branch == FAILURE_BRANCH:
            reward = outcomes.failure_reward
            probability = outcomes.failure_probability
            next_state = self.terminal_state
        else:
            outcome = outcomes.safe_outcomes[branch]
            reward = outcome.reward
            probability = outcome.probability
            next_state = outcome.next_state

        step = Step(
            state=self.terminal_state,
            action=action,
            action_index=action_index,
            branch=branch,
            reward=reward,
            risk=outcomes.failure_probability,
            expected_reward=outcomes.expected_reward,
            probability=probability,
        )
        return StateHistory(
            steps=self.steps + (step,),
            terminal_state=next_state,
            failed=branch == FAILURE_BRANCH,
        )


def render_key(key: HistoryKey) -> str:
    parts: list[str] = []
    for action_index, branch in key:
        parts.append(str(action_index))
        parts.append("f" if branch == FAILURE_BRANCH else str(branch))
    return ".".join(parts)
