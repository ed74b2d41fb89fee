"""Tabular Q-learning. V(s) is taken as max_a Q(s, a)."""

from __future__ import annotations

from pathlib import Path

import numpy as np


class QTable:
    def __init__(self, state_count: int, action_count: int, learning_rate: float = 0.1, discount: float = 0.99):
        if state_count < 1 or action_count < 1:
            raise ValueError("state_count and action_count must be positive")
        if not (0.0 < learning_rate <= 1.0):
            raise ValueError(f"learning_rate must lie in (0, 1], got {learning_rate!r}")
        if not (0.0 < discount <= 1.0):
            raise ValueError(f"discount must lie in (0, 1], got {discount!r}")
        self.state_count = int(state_count)
        self.action_count = int(action_count)
        self.learning_rate = float(learning_rate)
        self.discount = float(discount)
        self.values = np.zeros((self.state_count, self.action_count))

    def _check_state(self, s: int) -> None:
        if not 0 <= s < self.state_count:
            raise IndexError(f"state index {s} out of range [0, {self.state_count})")

    def _check_action(self, a: int) -> None:
        if not 0 <= a < self.action_count:
            raise IndexError(f"action index {a} out of range [0, {self.action_count})")

    def q_values(self, s: int) -> np.ndarray:
        self._check_state(s)
        return self.values[s]

    def state_value(self, s: int) -> float:
        self._check_state(s)
        return float(self.values[s].max())

    def update(self, s: int, a: int, r: float, s_next: int, terminal: bool) -> float:
        """One Q-learning backup; returns the TD error."""
        self._check_state(s)
        self._check_action(a)
        self._check_state(s_next)
        target = r if terminal else r + self.discount * float(self.values[s_next].max())
        td = target - float(self.values[s, a])
        self.values[s, a] += self.learning_rate * td
        return td

    def dump(self, path) -> None:
        lines = [
            f"{s} {a} {float(self.values[s, a])!r}"
            for s in range(self.state_count)
            for a in range(self.action_count)
        ]
        Path(path).write_text("".join(line + "\n" for line in lines))
