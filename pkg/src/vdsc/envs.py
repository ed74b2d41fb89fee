"""Small tabular environments, from dense/easy to sparse/hard exploration.

Each environment exposes an integer state index for the Q-table and a
normalized coordinate observation in [0, 1]^D for hashing. Dynamics are
tabulated in docs/environments.md.

Time limits are reported through ``truncated``; ``terminal`` is only set on
true termination so the learner keeps bootstrapping across a time limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class EnvSpec:
    name: str
    state_count: int
    action_count: int
    obs_dim: int
    max_episode_steps: int
    reward_min: float
    reward_max: float


class StepResult(NamedTuple):
    state: int
    observation: np.ndarray
    reward: float
    terminal: bool
    truncated: bool = False


class TabularEnv:
    spec: EnvSpec

    def __init__(self, seed: Optional[int] = None):
        self.rng = np.random.default_rng(seed)
        self._done = True
        self._t = 0

    def reset(self, seed: Optional[int] = None) -> Tuple[int, np.ndarray]:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        self._done = False
        self._t = 0
        self._reset()
        return self._state(), self._obs()

    def step(self, action: int) -> StepResult:
        if self._done:
            raise RuntimeError(f"{self.spec.name}: step() called on a finished episode; call reset()")
        if not 0 <= action < self.spec.action_count:
            raise ValueError(f"{self.spec.name}: action {action} out of range [0, {self.spec.action_count})")
        reward, terminal = self._step(int(action))
        self._t += 1
        truncated = not terminal and self._t >= self.spec.max_episode_steps
        self._done = terminal or truncated
        return StepResult(self._state(), self._obs(), reward, terminal, truncated)

    def _reset(self) -> None:
        raise NotImplementedError

    def _step(self, action: int) -> Tuple[float, bool]:
        raise NotImplementedError

    def _state(self) -> int:
        raise NotImplementedError

    def _obs(self) -> np.ndarray:
        raise NotImplementedError


class RiverSwim(TabularEnv):
    """Six-state chain. Action 0 swims left, action 1 swims right against the current."""

    LEFT, RIGHT = 0, 1
    N = 6
    P_SUCCESS = 0.35
    P_STAY = 0.60
    LEFT_REWARD = 0.005
    RIGHT_REWARD = 1.0

    def __init__(self, seed: Optional[int] = None, max_episode_steps: int = 200):
        super().__init__(seed)
        self.spec = EnvSpec("riverswim", self.N, 2, 1, max_episode_steps, 0.0, self.RIGHT_REWARD)
        self.pos = 0

    def _reset(self) -> None:
        self.pos = int(self.rng.integers(2))

    def _step(self, action):
        last = self.N - 1
        if action == self.LEFT:
            reward = self.LEFT_REWARD if self.pos == 0 else 0.0
            self.pos = max(self.pos - 1, 0)
            return reward, False
        u = self.rng.random()
        if u < self.P_SUCCESS:
            if self.pos == last:
                return self.RIGHT_REWARD, False
            self.pos += 1
        elif u >= self.P_SUCCESS + self.P_STAY:
            self.pos = max(self.pos - 1, 0)
        return 0.0, False

    def _state(self):
        return self.pos

    def _obs(self):
        return np.array([self.pos / (self.N - 1)])


class DeepSea(TabularEnv):
    """N x N grid descended one row per step. Action 0 = left, 1 = right.

    Every right move costs 0.01 / N. Moving right from the bottom-right
    cell pays 1. State index ``N * N`` is the absorbing end state.
    """

    LEFT, RIGHT = 0, 1

    def __init__(self, size: int = 10, seed: Optional[int] = None, max_episode_steps: Optional[int] = None):
        super().__init__(seed)
        if size < 2:
            raise ValueError("DeepSea size must be at least 2")
        self.size = int(size)
        self.move_cost = 0.01 / self.size
        steps = self.size if max_episode_steps is None else max_episode_steps
        self.spec = EnvSpec("deepsea", self.size * self.size + 1, 2, 2, steps, -self.move_cost, 1.0 - self.move_cost)
        self.row = 0
        self.col = 0

    def _reset(self):
        self.row = 0
        self.col = 0

    def _step(self, action):
        n = self.size
        reward = 0.0
        if action == self.RIGHT:
            reward -= self.move_cost
            if self.row == n - 1 and self.col == n - 1:
                reward += 1.0
            self.col = min(self.col + 1, n - 1)
        else:
            self.col = max(self.col - 1, 0)
        self.row += 1
        return reward, self.row == n

    def _state(self):
        if self.row == self.size:
            return self.size * self.size
        return self.row * self.size + self.col

    def _obs(self):
        return np.array([self.row / self.size, self.col / (self.size - 1)])


class GridWorld(TabularEnv):
    """W x H grid from the top-left corner to a goal in the bottom-right.

    Actions: 0 up, 1 down, 2 left, 3 right. With probability ``slip`` the
    previously executed action is repeated instead of the chosen one.
    Reaching the goal pays 1 and ends the episode. With ``dense=True`` each
    step also pays the decrease in Manhattan distance to the goal divided
    by ``W + H - 2``.
    """

    MOVES = ((0, -1), (0, 1), (-1, 0), (1, 0))

    def __init__(
        self,
        width: int = 8,
        height: int = 8,
        slip: float = 0.25,
        dense: bool = False,
        seed: Optional[int] = None,
        max_episode_steps: Optional[int] = None,
    ):
        super().__init__(seed)
        if width < 2 or height < 2:
            raise ValueError("grid needs width and height of at least 2")
        if not 0.0 <= slip <= 1.0:
            raise ValueError(f"slip must lie in [0, 1], got {slip!r}")
        self.width, self.height = int(width), int(height)
        self.slip = float(slip)
        self.dense = dense
        self.scale = 1.0 / (self.width + self.height - 2)
        steps = 4 * self.width * self.height if max_episode_steps is None else max_episode_steps
        name = "densegrid" if dense else "sparsegrid"
        rmin, rmax = (-self.scale, 1.0 + self.scale) if dense else (0.0, 1.0)
        self.spec = EnvSpec(name, self.width * self.height, 4, 2, steps, rmin, rmax)
        self.x = self.y = 0
        self.prev_action: Optional[int] = None

    def _distance(self) -> int:
        return (self.width - 1 - self.x) + (self.height - 1 - self.y)

    def _reset(self):
        self.x = self.y = 0
        self.prev_action = None

    def _step(self, action):
        if self.slip > 0.0 and self.rng.random() < self.slip and self.prev_action is not None:
            action = self.prev_action
        self.prev_action = action
        before = self._distance()
        dx, dy = self.MOVES[action]
        self.x = min(max(self.x + dx, 0), self.width - 1)
        self.y = min(max(self.y + dy, 0), self.height - 1)
        after = self._distance()
        reward = (before - after) * self.scale if self.dense else 0.0
        if after == 0:
            return reward + 1.0, True
        return reward, False

    def _state(self):
        return self.y * self.width + self.x

    def _obs(self):
        return np.array([self.x / (self.width - 1), self.y / (self.height - 1)])


ENVIRONMENTS = ("riverswim", "deepsea", "sparsegrid", "densegrid")


def make_env(
    name: str,
    seed: Optional[int] = None,
    size: int = 10,
    width: int = 8,
    height: int = 8,
    slip: float = 0.25,
    max_episode_steps: int = 0,
) -> TabularEnv:
    """Build an environment by name; ``max_episode_steps=0`` keeps its default."""
    limit = max_episode_steps or None
    if name == "riverswim":
        return RiverSwim(seed=seed, max_episode_steps=limit or 200)
    if name == "deepsea":
        return DeepSea(size=size, seed=seed, max_episode_steps=limit)
    if name in ("sparsegrid", "densegrid"):
        return GridWorld(width, height, slip=slip, dense=name == "densegrid", seed=seed, max_episode_steps=limit)
    raise ValueError(f"unknown environment {name!r}; choose from {', '.join(ENVIRONMENTS)}")
