"""When-to-explore policies behind one interface.

Every strategy maps a :class:`StrategyContext` to an action plus a
:class:`StepInfo` carrying the switching decision ``y`` (1 = explore) and
whatever trigger values it saw. Blind strategies (epsilon-greedy,
Boltzmann) switch by coin flip; the homeostasis-driven ones switch on
|VPD|, on the count bonus, or on both (VDSC).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .hashing import HashCountTable, SimHash
from .homeostasis import COUNT_BONUS, VPD, Homeostat
from .vpd import VpdTracker


@dataclass(frozen=True)
class DecaySchedule:
    """Linear interpolation from ``initial`` to ``final`` over ``decay_steps`` agent steps, then flat."""

    initial: float = 1.0
    final: float = 0.01
    decay_steps: int = 25_000

    def __post_init__(self):
        if self.decay_steps < 1:
            raise ValueError("decay_steps must be positive")

    def value(self, step: int) -> float:
        frac = min(1.0, step / self.decay_steps)
        return self.initial + (self.final - self.initial) * frac

    __call__ = value


@dataclass
class StrategyContext:
    q_values: np.ndarray
    state_value: float
    observation: np.ndarray
    reward_prev: float = 0.0
    episode_step: int = 0
    global_step: int = 0

    @classmethod
    def from_q(cls, q_values, observation, reward_prev=0.0, episode_step=0, global_step=0):
        q_values = np.asarray(q_values, dtype=np.float64)
        return cls(q_values, float(q_values.max()), observation, reward_prev, episode_step, global_step)


class StepInfo(NamedTuple):
    y: int
    p_bar: float
    vpd: Optional[float] = None
    bonus: Optional[float] = None


def greedy_action(q_values: np.ndarray) -> int:
    # np.argmax returns the first maximum: ties go to the lowest index
    return int(np.argmax(q_values))


def epsilon_greedy_act(ctx: StrategyContext, schedule: DecaySchedule, rng: np.random.Generator) -> Tuple[int, StepInfo]:
    eps = schedule.value(ctx.global_step)
    if rng.random() < eps:
        return int(rng.integers(len(ctx.q_values))), StepInfo(1, eps)
    return greedy_action(ctx.q_values), StepInfo(0, eps)


def softmax(q_values: np.ndarray, temperature: float) -> np.ndarray:
    z = (np.asarray(q_values, dtype=np.float64) - np.max(q_values)) / temperature
    e = np.exp(z)
    return e / e.sum()


def boltzmann_act(ctx: StrategyContext, schedule: DecaySchedule, rng: np.random.Generator) -> Tuple[int, StepInfo]:
    temperature = schedule.value(ctx.global_step)
    if temperature <= 0.0:
        raise ValueError(f"Boltzmann temperature must be positive, got {temperature!r}")
    probs = softmax(ctx.q_values, temperature)
    cdf = np.cumsum(probs)
    action = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    action = min(action, len(probs) - 1)
    greedy = greedy_action(ctx.q_values)
    return action, StepInfo(int(action != greedy), float(1.0 - probs[greedy]))


def vdsc_act(
    ctx: StrategyContext,
    vpd: Optional[VpdTracker],
    hashing: Optional[Tuple[SimHash, HashCountTable]],
    homeostat: Homeostat,
    rho_schedule: DecaySchedule,
    rng: np.random.Generator,
) -> Tuple[int, StepInfo]:
    """One step of VDSC; pass ``None`` for a signal to drop it (ablations).

    The homeostat's channels must match the signals supplied, in the order
    VPD first, count bonus second.
    """
    samples = []
    bonus = None
    if hashing is not None:
        encoder, table = hashing
        bonus = table.record_and_bonus(encoder.encode_key(ctx.observation))
    value_gap = None
    if vpd is not None:
        value_gap = vpd.push(ctx.state_value, ctx.reward_prev)
        samples.append(None if value_gap is None else abs(value_gap))
    if hashing is not None:
        samples.append(bonus)
    decision = homeostat.step(samples, rho_schedule.value(ctx.global_step))
    if decision.y:
        action = int(rng.integers(len(ctx.q_values)))
    else:
        action = greedy_action(ctx.q_values)
    return action, StepInfo(decision.y, decision.p_bar, value_gap, bonus)


class Strategy:
    name = "base"

    def begin_episode(self) -> None:
        pass

    def act(self, ctx: StrategyContext) -> Tuple[int, StepInfo]:
        raise NotImplementedError


class EpsilonGreedy(Strategy):
    name = "epsilon_greedy"

    def __init__(self, schedule: DecaySchedule, rng: np.random.Generator):
        self.schedule = schedule
        self.rng = rng

    def act(self, ctx):
        return epsilon_greedy_act(ctx, self.schedule, self.rng)


class Boltzmann(Strategy):
    name = "boltzmann"

    def __init__(self, schedule: DecaySchedule, rng: np.random.Generator):
        self.schedule = schedule
        self.rng = rng

    def act(self, ctx):
        return boltzmann_act(ctx, self.schedule, self.rng)


class Vdsc(Strategy):
    """Homeostasis-triggered exploration on |VPD| and/or the count bonus.

    The VPD window is episode-scoped; homeostat statistics and hash counts
    persist for the whole run.
    """

    def __init__(
        self,
        schedule: DecaySchedule,
        rng: np.random.Generator,
        homeostat: Homeostat,
        vpd: Optional[VpdTracker] = None,
        encoder: Optional[SimHash] = None,
        table: Optional[HashCountTable] = None,
    ):
        if vpd is None and encoder is None:
            raise ValueError("VDSC needs at least one trigger signal")
        expected = ([VPD] if vpd is not None else []) + ([COUNT_BONUS] if encoder is not None else [])
        for kind in expected:
            if kind not in homeostat.kinds:
                homeostat.register_channel(kind)
        if homeostat.kinds != expected:
            raise ValueError(f"homeostat channels {homeostat.kinds} do not match signals {expected}")
        self.schedule = schedule
        self.rng = rng
        self.homeostat = homeostat
        self.vpd = vpd
        self.encoder = encoder
        self.table = table if table is not None or encoder is None else HashCountTable()
        self.name = {2: "vdsc", 1: "vpd_only" if vpd is not None else "counts_only"}[len(expected)]

    def begin_episode(self):
        if self.vpd is not None:
            self.vpd.reset()

    def act(self, ctx):
        hashing = (self.encoder, self.table) if self.encoder is not None else None
        return vdsc_act(ctx, self.vpd, hashing, self.homeostat, self.schedule, self.rng)


def vpd_only_act(ctx, vpd, homeostat, rho_schedule, rng):
    return vdsc_act(ctx, vpd, None, homeostat, rho_schedule, rng)


def counts_only_act(ctx, hashing, homeostat, rho_schedule, rng):
    return vdsc_act(ctx, None, hashing, homeostat, rho_schedule, rng)


STRATEGIES = ("vdsc", "vpd_only", "counts_only", "epsilon_greedy", "boltzmann")
