"""Value Promise Discrepancy over a sliding k-step window."""

from __future__ import annotations

from collections import deque
from typing import Optional


class VpdTracker:
    """Sliding window of value estimates and rewards.

    Each ``push`` takes the value estimate of the current state and the
    reward that came with the transition into it. Once ``k + 1`` values are
    buffered, the discrepancy between the value promised ``k`` steps ago and
    what was realized since then is returned::

        V(s_{t-k}) - sum_i gamma**i * r_{t-k+1+i} - gamma**k * V(s_t)

    Rewards are discounted forward in time (the first reward after
    ``s_{t-k}`` gets weight 1), so an exact value function of a
    deterministic policy yields a discrepancy of zero.
    """

    def __init__(self, k: int = 5, gamma: float = 0.99):
        if int(k) != k or k < 1:
            raise ValueError(f"horizon k must be a positive integer, got {k!r}")
        if not (0.0 < gamma <= 1.0):
            raise ValueError(f"discount gamma must lie in (0, 1], got {gamma!r}")
        self.k = int(k)
        self.gamma = float(gamma)
        self._weights = [self.gamma**i for i in range(self.k)]
        self._gamma_k = self.gamma**self.k
        self.value_window: deque[float] = deque(maxlen=self.k + 1)
        self.reward_window: deque[float] = deque(maxlen=self.k)
        self.steps_seen = 0

    @property
    def ready(self) -> bool:
        return len(self.value_window) == self.k + 1

    def push(self, value_estimate: float, reward: float) -> Optional[float]:
        self.value_window.append(float(value_estimate))
        self.reward_window.append(float(reward))
        self.steps_seen += 1
        if not self.ready:
            return None
        realized = 0.0
        for w, r in zip(self._weights, self.reward_window):
            realized += w * r
        return self.value_window[0] - realized - self._gamma_k * self.value_window[-1]

    def reset(self) -> None:
        self.value_window.clear()
        self.reward_window.clear()
        self.steps_seen = 0
