import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdsc.hashing import HashCountTable, SimHash, centered_with_bias
from vdsc.homeostasis import COUNT_BONUS, VPD, Homeostat
from vdsc.strategies import (
    Boltzmann,
    DecaySchedule,
    EpsilonGreedy,
    StrategyContext,
    Vdsc,
    boltzmann_act,
    counts_only_act,
    epsilon_greedy_act,
    greedy_action,
    softmax,
    vdsc_act,
    vpd_only_act,
)
from vdsc.vpd import VpdTracker

OBS = np.array([0.5, 0.5])


def ctx(q, step=0, obs=OBS, reward=0.0):
    return StrategyContext.from_q(q, obs, reward_prev=reward, global_step=step)


def const(v):
    return DecaySchedule(v, v, 1)


def within_3_sigma(count, n, p):
    return abs(count - n * p) <= 3 * math.sqrt(n * p * (1 - p))


def test_schedule_linear_then_flat():
    s = DecaySchedule(1.0, 0.01, 100)
    assert s.value(0) == 1.0
    assert s.value(50) == pytest.approx(0.505)
    assert s.value(100) == pytest.approx(0.01)
    assert s.value(10**6) == pytest.approx(0.01)
    vals = [s.value(t) for t in range(120)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_greedy_ties_lowest_index():
    assert greedy_action(np.array([1.0, 3.0, 3.0])) == 1
    assert greedy_action(np.zeros(4)) == 0


def test_epsilon_zero_is_greedy():
    rng = np.random.default_rng(0)
    assert all(epsilon_greedy_act(ctx([0.1, 0.5, 0.2]), const(0.0), rng)[0] == 1 for _ in range(500))


def test_epsilon_one_is_uniform():
    rng = np.random.default_rng(1)
    acts = [epsilon_greedy_act(ctx([0.0, 1.0, 2.0]), const(1.0), rng)[0] for _ in range(10_000)]
    counts = np.bincount(acts, minlength=3)
    assert all(within_3_sigma(c, 10_000, 1 / 3) for c in counts)


def test_epsilon_half_mixture():
    rng = np.random.default_rng(2)
    n = 10_000
    ones = sum(epsilon_greedy_act(ctx([0.0, 1.0]), const(0.5), rng)[0] for _ in range(n))
    assert within_3_sigma(ones, n, 0.75)


def test_boltzmann_limits():
    rng = np.random.default_rng(3)
    n = 10_000
    acts = [boltzmann_act(ctx([5.0, 0.0, -3.0]), const(1e9), rng)[0] for _ in range(n)]
    assert all(within_3_sigma(c, n, 1 / 3) for c in np.bincount(acts, minlength=3))
    assert softmax(np.array([0.0, 0.0]), 0.3).tolist() == [0.5, 0.5]
    p0 = math.e / (math.e + 1)
    zeros = sum(boltzmann_act(ctx([1.0, 0.0]), const(1.0), rng)[0] == 0 for _ in range(n))
    assert within_3_sigma(zeros, n, p0)
    assert p0 == pytest.approx(0.7310585786, abs=1e-9)


def test_softmax_stable_for_huge_values():
    p = softmax(np.array([1e6, 1e6 - 1]), 1.0)
    assert np.all(np.isfinite(p)) and p[0] == pytest.approx(math.e / (math.e + 1))


def make_vdsc(seed=0, vpd=True, counts=True):
    h = Homeostat(np.random.default_rng(seed))
    return Vdsc(
        const(0.5),
        np.random.default_rng(seed + 1),
        h,
        vpd=VpdTracker(5, 0.99) if vpd else None,
        encoder=SimHash(64, 3, seed=seed, preprocessor=centered_with_bias, obs_dim=2) if counts else None,
    )


def test_vdsc_registers_channels_in_order():
    assert make_vdsc().homeostat.kinds == [VPD, COUNT_BONUS]
    assert make_vdsc(vpd=False).homeostat.kinds == [COUNT_BONUS]
    assert make_vdsc(counts=False).name == "vpd_only"
    with pytest.raises(ValueError):
        make_vdsc(vpd=False, counts=False)


def test_vdsc_tiny_rho_matches_greedy():
    rng = np.random.default_rng(5)
    strat = make_vdsc()
    strat.schedule = const(1e-12)
    for t in range(3000):
        q = rng.normal(size=4)
        obs = rng.random(2).round(1)
        a, info = strat.act(ctx(q, t, obs, reward=float(rng.random())))
        assert info.y == 0 and a == greedy_action(q)


def test_rho_one_explores_every_step_on_constant_triggers():
    h = Homeostat(0, kinds=[VPD, COUNT_BONUS])
    assert all(h.step([0.3, 0.2], 1.0).y for _ in range(2000))


def test_rho_one_with_varying_triggers_is_not_always_explore():
    # p_i = min(1, x+ / mean(x+)) drops below 1 whenever a signal is under its running average
    rng = np.random.default_rng(6)
    strat = make_vdsc()
    strat.schedule = const(1.0)
    ys = [strat.act(ctx(rng.normal(size=3), t, rng.random(2)))[1].y for t in range(2000)]
    assert 0.5 < sum(ys) / 2000 < 1.0


def test_vdsc_diagnostics_and_episode_reset():
    strat = make_vdsc()
    strat.begin_episode()
    infos = [strat.act(ctx([0.0, 0.0], t))[1] for t in range(7)]
    assert [i.vpd is None for i in infos] == [True] * 5 + [False] * 2
    assert infos[0].bonus == 1.0 and infos[3].bonus == 0.5
    strat.begin_episode()
    assert strat.act(ctx([0.0, 0.0], 7))[1].vpd is None


def test_counts_only_unique_states_converge_to_rho():
    h = Homeostat(0, kinds=[COUNT_BONUS])
    enc = SimHash(256, 16, seed=1)
    table = HashCountTable()
    rng = np.random.default_rng(0)
    for t in range(3000):
        obs = rng.standard_normal(16)
        _, info = counts_only_act(ctx([0.0, 1.0], t, obs), (enc, table), h, const(0.1), rng)
        assert info.bonus == 1.0
    assert info.p_bar == pytest.approx(0.1, abs=1e-12)


def test_vpd_only_warmup_is_greedy_without_draws():
    h = Homeostat(0, kinds=[VPD])
    state = h.rng.bit_generator.state
    rng = np.random.default_rng(0)
    tracker = VpdTracker(5, 0.9)
    for t in range(5):
        a, info = vpd_only_act(ctx([0.0, 2.0, 1.0], t), tracker, h, const(1.0), rng)
        assert a == 1 and info.y == 0
    assert h.rng.bit_generator.state == state


def test_vpd_only_on_exact_values_tracks_rho():
    # zero discrepancy each step is a constant stream
    h = Homeostat(1, kinds=[VPD])
    tracker = VpdTracker(5, 0.99)
    rng = np.random.default_rng(0)
    n, ys = 100_000, 0
    for t in range(n):
        _, info = vpd_only_act(ctx([1.0, 1.0], t), tracker, h, const(0.05), rng)
        ys += info.y
        if t >= 5:
            assert info.vpd == pytest.approx(1.0 - 0.99**5, abs=1e-12)
    assert abs(ys / n - 0.05) < 3 * math.sqrt(0.05 * 0.95 / n) + 0.005


def _strategies(seed):
    rng = np.random.default_rng
    return [
        EpsilonGreedy(const(0.3), rng(seed)),
        Boltzmann(const(0.7), rng(seed)),
        make_vdsc(seed),
        make_vdsc(seed, vpd=False),
        make_vdsc(seed, counts=False),
    ]


@settings(max_examples=30, deadline=None)
@given(n_actions=st.integers(1, 6), seed=st.integers(0, 10_000))
def test_actions_in_range(n_actions, seed):
    rng = np.random.default_rng(seed)
    for strat in _strategies(seed):
        for t in range(30):
            a, info = strat.act(ctx(rng.normal(size=n_actions), t, rng.random(2)))
            assert 0 <= a < n_actions and info.y in (0, 1) and 0.0 <= info.p_bar <= 1.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), shift=st.floats(-1e3, 1e3))
def test_exploit_branch_shift_invariant(seed, shift):
    rng = np.random.default_rng(seed)
    q = rng.normal(size=4)
    a0 = epsilon_greedy_act(ctx(q), const(0.0), np.random.default_rng(0))[0]
    a1 = epsilon_greedy_act(ctx(q + shift), const(0.0), np.random.default_rng(0))[0]
    assert a0 == a1 == greedy_action(q)
    s0, s1 = make_vdsc(seed), make_vdsc(seed)
    for s in (s0, s1):
        s.schedule = const(1e-12)
    for t in range(20):
        obs = rng.random(2)
        assert s0.act(ctx(q, t, obs))[0] == s1.act(ctx(q + shift, t, obs))[0]
