"""Unified homeostasis: trigger streams in, Bernoulli explore decisions out.

Every registered channel keeps exponential moving averages of its signal,
of the squared deviation from that mean, and of the exponentiated
standardized signal. The ratio of the latest exponentiated value to its
running average, scaled by the target rate, gives that channel's explore
probability; probabilities of the channels that produced a sample this step
are averaged and a single Bernoulli draw makes the decision.

The averaging weight is ``1 / min(t, 5 / rho)``, so early on each sample
is weighted like a plain running mean and later the memory settles at about
``5 / rho`` steps.
"""

from __future__ import annotations

import math
from typing import List, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

VPD = "vpd"
COUNT_BONUS = "counts"

EPS = 1e-8
Z_CLAMP = 20.0


class TriggerChannel:
    __slots__ = ("kind", "mean", "second_moment", "transformed_mean", "updates")

    def __init__(self, kind: str):
        self.kind = kind
        self.mean = 0.0
        self.second_moment = 0.0
        self.transformed_mean = 0.0
        self.updates = 0

    def __repr__(self) -> str:
        return (
            f"TriggerChannel({self.kind!r}, mean={self.mean:.6g}, "
            f"second_moment={self.second_moment:.6g}, transformed_mean={self.transformed_mean:.6g})"
        )


class Decision(NamedTuple):
    y: int
    p_bar: float
    per_channel_p: List[Optional[float]]


class Homeostat:
    def __init__(
        self,
        rng: Union[None, int, np.random.Generator] = None,
        eps: float = EPS,
        z_clamp: float = Z_CLAMP,
        kinds: Sequence[str] = (),
    ):
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self.eps = float(eps)
        self.z_clamp = float(z_clamp)
        self.channels: List[TriggerChannel] = []
        self.t = 1
        for kind in kinds:
            self.register_channel(kind)

    def register_channel(self, kind: str) -> int:
        if any(c.kind == kind for c in self.channels):
            raise ValueError(f"trigger channel {kind!r} is already registered")
        self.channels.append(TriggerChannel(kind))
        return len(self.channels) - 1

    @property
    def kinds(self) -> List[str]:
        return [c.kind for c in self.channels]

    def step(
        self,
        samples: Union[Sequence[Optional[float]], Mapping[str, Optional[float]]],
        rho: float,
    ) -> Decision:
        """Consume one sample per channel (``None`` skips a channel) and decide.

        When no channel has a sample the decision is exploit and no random
        number is drawn.
        """
        if not (0.0 < rho <= 1.0):
            raise ValueError(f"target rate rho must lie in (0, 1], got {rho!r}")
        if isinstance(samples, Mapping):
            unknown = set(samples) - set(self.kinds)
            if unknown:
                raise KeyError(f"unregistered trigger channel(s): {sorted(unknown)}")
            samples = [samples.get(c.kind) for c in self.channels]
        elif len(samples) != len(self.channels):
            raise ValueError(f"expected {len(self.channels)} samples, got {len(samples)}")

        tau = min(float(self.t), 5.0 / rho)
        alpha = 1.0 / tau
        keep = 1.0 - alpha
        eps = self.eps
        clamp = self.z_clamp

        probs: List[Optional[float]] = []
        total = 0.0
        n = 0
        for channel, x in zip(self.channels, samples):
            if x is None:
                probs.append(None)
                continue
            x = float(x)
            if not math.isfinite(x):
                raise ValueError(f"non-finite sample {x!r} for trigger channel {channel.kind!r}")
            channel.mean = keep * channel.mean + alpha * x
            dev = x - channel.mean
            channel.second_moment = keep * channel.second_moment + alpha * dev * dev
            z = dev / math.sqrt(channel.second_moment + eps)
            x_plus = math.exp(min(clamp, max(-clamp, z)))
            channel.transformed_mean = keep * channel.transformed_mean + alpha * x_plus
            channel.updates += 1
            if channel.transformed_mean < eps:
                p = min(1.0, rho)
            else:
                p = min(1.0, rho * x_plus / channel.transformed_mean)
            probs.append(p)
            total += p
            n += 1

        self.t += 1
        if n == 0:
            return Decision(0, 0.0, probs)
        p_bar = total / n
        y = 1 if self.rng.random() < p_bar else 0
        return Decision(y, p_bar, probs)
