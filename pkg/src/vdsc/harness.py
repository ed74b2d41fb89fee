"""Deterministic experiment runner.

Each seed gets independent random streams for the environment, the
strategy's random actions, the homeostat's Bernoulli draws and the SimHash
projection. Child seeds are the first 8 bytes (little endian) of
``sha256(f"{master_seed}/{component}")``, components being ``env``,
``strategy``, ``homeostat`` and ``hash``.

The run stops after exactly ``total_steps`` agent steps. An episode still
in progress at that point is discarded from both the episode and the trace
files, so every trace row belongs to a recorded episode.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from .agent import QTable
from .config import ExperimentConfig, dumps
from .envs import TabularEnv, make_env
from .hashing import SimHash, centered_with_bias
from .homeostasis import Homeostat
from .strategies import Boltzmann, DecaySchedule, EpsilonGreedy, Strategy, StrategyContext, Vdsc
from .vpd import VpdTracker

log = logging.getLogger(__name__)

EPISODE_HEADER = ["seed", "episode", "return", "steps", "explore_fraction", "mean_abs_vpd", "mean_bonus", "mean_p_bar"]
TRACE_HEADER = ["seed", "global_step", "episode", "episode_step", "y", "p_bar", "vpd", "bonus"]
SUMMARY_HEADER = ["bin", "mean_return", "ci_low", "ci_high", "n_seeds"]
RASTER_HEADER = ["episode", "step_offset", "y"]


def derive_seed(master_seed: int, component: str) -> int:
    digest = hashlib.sha256(f"{master_seed}/{component}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass
class EpisodeRecord:
    seed: int
    episode: int
    ret: float
    steps: int
    explore_steps: int
    mean_abs_vpd: Optional[float]
    mean_bonus: Optional[float]
    mean_p_bar: float
    end_step: int

    @property
    def explore_fraction(self) -> float:
        return self.explore_steps / self.steps if self.steps else 0.0


class StepTraceRecord(NamedTuple):
    seed: int
    global_step: int
    episode: int
    episode_step: int
    y: int
    p_bar: float
    vpd: Optional[float]
    bonus: Optional[float]


@dataclass
class SeedResult:
    seed: int
    episodes: List[EpisodeRecord] = field(default_factory=list)
    trace: List[StepTraceRecord] = field(default_factory=list)
    total_steps: int = 0
    explore_steps: int = 0


class SummaryRow(NamedTuple):
    bin: int
    mean_return: float
    ci_low: float
    ci_high: float
    n_seeds: int


@dataclass
class RunSummary:
    config: ExperimentConfig
    seeds: List[SeedResult]
    summary: List[SummaryRow]
    output_dir: Optional[Path]

    @property
    def explore_fraction(self) -> float:
        steps = sum(r.total_steps for r in self.seeds)
        return sum(r.explore_steps for r in self.seeds) / steps if steps else 0.0


def build_env(cfg: ExperimentConfig, seed: int) -> TabularEnv:
    e = cfg.environment
    return make_env(
        e.name,
        seed=derive_seed(seed, "env"),
        size=e.size,
        width=e.width,
        height=e.height,
        slip=e.slip,
        max_episode_steps=e.max_episode_steps,
    )


def build_strategy(cfg: ExperimentConfig, env: TabularEnv, seed: int) -> Strategy:
    s = cfg.strategy
    schedule = DecaySchedule(s.rho_initial, s.rho_final, s.decay_steps)
    rng = np.random.default_rng(derive_seed(seed, "strategy"))
    if s.name == "epsilon_greedy":
        return EpsilonGreedy(schedule, rng)
    if s.name == "boltzmann":
        return Boltzmann(schedule, rng)
    homeostat = Homeostat(np.random.default_rng(derive_seed(seed, "homeostat")), eps=s.eps, z_clamp=s.z_clamp)
    vpd = VpdTracker(s.k, cfg.agent.discount) if s.name in ("vdsc", "vpd_only") else None
    encoder = None
    if s.name in ("vdsc", "counts_only"):
        encoder = SimHash(
            s.bits,
            env.spec.obs_dim + 1,
            seed=derive_seed(seed, "hash"),
            preprocessor=centered_with_bias,
            obs_dim=env.spec.obs_dim,
        )
    return Vdsc(schedule, rng, homeostat, vpd=vpd, encoder=encoder)


def _mean(values: List[float]) -> Optional[float]:
    return math.fsum(values) / len(values) if values else None


def run_seed(cfg: ExperimentConfig, seed: int) -> SeedResult:
    """Run one seed for ``run.total_steps`` agent steps."""
    env = build_env(cfg, seed)
    agent = QTable(env.spec.state_count, env.spec.action_count, cfg.agent.learning_rate, cfg.agent.discount)
    strategy = build_strategy(cfg, env, seed)
    r = cfg.run
    result = SeedResult(seed)
    global_step = 0
    episode = 0
    traced = 0
    tracing_all = r.trace and r.trace_episodes == 0
    q = agent.values

    while global_step < r.total_steps:
        state, obs = env.reset()
        strategy.begin_episode()
        trace_this = r.trace and global_step >= r.trace_start and (tracing_all or traced < r.trace_episodes)
        reward_prev = 0.0
        ep_return = 0.0
        explore = 0
        vpds: List[float] = []
        bonuses: List[float] = []
        p_bars: List[float] = []
        rows: List[StepTraceRecord] = []
        episode_step = 0
        finished = False
        while global_step < r.total_steps:
            q_s = q[state]
            ctx = StrategyContext(q_s, float(q_s.max()), obs, reward_prev, episode_step, global_step)
            action, info = strategy.act(ctx)
            step = env.step(action)
            agent.update(state, action, step.reward, step.state, step.terminal)

            explore += info.y
            p_bars.append(info.p_bar)
            if info.vpd is not None:
                vpds.append(abs(info.vpd))
            if info.bonus is not None:
                bonuses.append(info.bonus)
            if trace_this:
                rows.append(StepTraceRecord(seed, global_step, episode, episode_step, info.y, info.p_bar, info.vpd, info.bonus))

            ep_return += step.reward
            reward_prev = step.reward
            state, obs = step.state, step.observation
            global_step += 1
            episode_step += 1
            if step.terminal or step.truncated:
                finished = True
                break

        if not finished:
            break
        result.episodes.append(
            EpisodeRecord(seed, episode, ep_return, episode_step, explore, _mean(vpds), _mean(bonuses), _mean(p_bars), global_step)
        )
        result.total_steps += episode_step
        result.explore_steps += explore
        if trace_this:
            result.trace.extend(rows)
            traced += 1
        episode += 1

    log.debug("seed %d: %d episodes in %d steps", seed, episode, global_step)
    return result


def aggregate(runs: Sequence[Sequence[float]]) -> List[SummaryRow]:
    """Mean and normal-approximation 95% CI across seeds, per bin.

    Non-finite entries (bins a seed has no data for yet) are left out of
    that bin. With a single seed the interval collapses to the mean.
    """
    if not runs:
        raise ValueError("aggregate needs at least one seed series")
    lengths = {len(r) for r in runs}
    if len(lengths) != 1:
        raise ValueError(f"seed series have mismatched lengths {sorted(lengths)}")
    data = np.asarray(runs, dtype=np.float64)
    rows = []
    for b in range(data.shape[1]):
        col = data[:, b]
        col = col[np.isfinite(col)]
        n = len(col)
        if n == 0:
            rows.append(SummaryRow(b, math.nan, math.nan, math.nan, 0))
            continue
        mean = float(col.mean())
        half = 1.96 * float(col.std(ddof=1)) / math.sqrt(n) if n > 1 else 0.0
        rows.append(SummaryRow(b, mean, mean - half, mean + half, n))
    return rows


def binned_returns(episodes: Sequence[EpisodeRecord], total_steps: int, eval_interval: int, window: int) -> List[float]:
    """Trailing moving average of returns, sampled at the end of each step bin.

    Bin ``b`` reports the smoothed return of the last episode that ended at
    or before step ``(b + 1) * eval_interval``; NaN before the first episode.
    """
    n_bins = total_steps // eval_interval
    returns = np.array([e.ret for e in episodes], dtype=np.float64)
    ends = np.array([e.end_step for e in episodes], dtype=np.int64)
    if len(returns):
        csum = np.concatenate([[0.0], np.cumsum(returns)])
        idx = np.arange(1, len(returns) + 1)
        lo = np.maximum(0, idx - window)
        smoothed = (csum[idx] - csum[lo]) / (idx - lo)
    out = []
    for b in range(n_bins):
        last = np.searchsorted(ends, (b + 1) * eval_interval, side="right") - 1
        out.append(float(smoothed[last]) if len(returns) and last >= 0 else math.nan)
    return out


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "" if math.isnan(x) else repr(x)
    return str(x)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with path.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def episode_rows(result: SeedResult):
    for e in result.episodes:
        yield (e.seed, e.episode, float(e.ret), e.steps, e.explore_fraction, e.mean_abs_vpd, e.mean_bonus, e.mean_p_bar)


def trace_rows(result: SeedResult):
    for t in result.trace:
        yield (t.seed, t.global_step, t.episode, t.episode_step, t.y, float(t.p_bar), t.vpd, t.bonus)


def raster_rows(trace: Sequence[StepTraceRecord]):
    for t in trace:
        yield (t.episode, t.episode_step, t.y)


def write_outputs(out: Path, summary: RunSummary) -> None:
    cfg = summary.config
    try:
        out.mkdir(parents=True, exist_ok=True)
        for res in summary.seeds:
            seed_dir = out / f"seed_{res.seed}"
            seed_dir.mkdir(exist_ok=True)
            _write_csv(seed_dir / "episodes.csv", EPISODE_HEADER, episode_rows(res))
            if cfg.run.trace:
                _write_csv(seed_dir / "trace.csv", TRACE_HEADER, trace_rows(res))
        _write_csv(out / "episodes.csv", EPISODE_HEADER, (row for res in summary.seeds for row in episode_rows(res)))
        if cfg.run.trace:
            _write_csv(out / "trace.csv", TRACE_HEADER, (row for res in summary.seeds for row in trace_rows(res)))
        _write_csv(out / "summary.csv", SUMMARY_HEADER, summary.summary)
        meta = {
            "config": cfg.to_dict(),
            "smoothing": f"trailing moving average over {cfg.run.smoothing_window} episodes",
            "ci": "mean +/- 1.96 * sample std / sqrt(n_seeds); width 0 for a single seed",
            "bins": f"bin b ends at agent step (b + 1) * {cfg.run.eval_interval}",
            "sub_seeding": "sha256(f'{seed}/{component}')[:8] little-endian; components env, strategy, homeostat, hash",
            "explore_fraction": summary.explore_fraction,
            "episodes_per_seed": {str(r.seed): len(r.episodes) for r in summary.seeds},
        }
        (out / "run_meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        (out / "config.ini").write_text(dumps(cfg))
    except OSError as exc:
        raise OSError(f"cannot write results to {out}: {exc}") from exc


def run_experiment(cfg: ExperimentConfig, output_dir=None, parallel: int = 1, write: bool = True) -> RunSummary:
    """Run every seed in ``cfg.run.seeds`` and (optionally) write result files.

    ``output_dir`` defaults to ``cfg.run.output_dir``. Results do not depend
    on ``parallel``.
    """
    seeds = list(cfg.run.seeds)
    if parallel > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=min(parallel, len(seeds))) as pool:
            results = list(pool.map(run_seed, [cfg] * len(seeds), seeds))
    else:
        results = [run_seed(cfg, s) for s in seeds]
    r = cfg.run
    series = [binned_returns(res.episodes, r.total_steps, r.eval_interval, r.smoothing_window) for res in results]
    summary = RunSummary(cfg, results, aggregate(series) if series[0] else [], None)
    if write:
        out = Path(output_dir if output_dir is not None else r.output_dir)
        write_outputs(out, summary)
        summary.output_dir = out
    return summary


ABLATION_STRATEGIES = ("vdsc", "vpd_only", "counts_only", "epsilon_greedy")
ABLATION_HEADER = ["strategy"] + SUMMARY_HEADER
COMPARISON_HEADER = ["strategy", "n_seeds", "seeds_with_positive_return", "mean_return", "explore_fraction"]


def comparison_row(name: str, summary: RunSummary):
    """One line of the ablation comparison: how many seeds ever earned a positive return, etc."""
    positive = sum(any(e.ret > 0 for e in r.episodes) for r in summary.seeds)
    returns = [e.ret for r in summary.seeds for e in r.episodes]
    mean_ret = math.fsum(returns) / len(returns) if returns else math.nan
    return (name, len(summary.seeds), positive, mean_ret, summary.explore_fraction)


def run_ablation(cfg: ExperimentConfig, output_dir=None, parallel: int = 1, strategies=ABLATION_STRATEGIES) -> Dict[str, RunSummary]:
    """Run each strategy with the same seeds, schedule and budget.

    Writes one sub-directory per strategy plus ``ablation.csv`` (all
    summary rows, tagged by strategy) and ``comparison.csv``.
    """
    out = Path(output_dir if output_dir is not None else cfg.run.output_dir)
    results = {}
    for name in strategies:
        sub = cfg.replace(strategy={"name": name})
        results[name] = run_experiment(sub, out / name, parallel=parallel)
    _write_csv(out / "ablation.csv", ABLATION_HEADER, ((name,) + tuple(row) for name, s in results.items() for row in s.summary))
    _write_csv(out / "comparison.csv", COMPARISON_HEADER, (comparison_row(name, s) for name, s in results.items()))
    return results


def run_trace(cfg: ExperimentConfig, episodes: int = 20, start: Optional[int] = None, output_dir=None) -> RunSummary:
    """Trace ``episodes`` consecutive episodes of the first seed.

    Tracing begins with the first episode starting at or after ``start``
    agent steps (default: the end of the decay schedule). Besides the
    regular outputs, ``raster.csv`` holds one ``episode,step_offset,y`` row
    per traced step.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    start = cfg.strategy.decay_steps if start is None else start
    cfg = cfg.replace(run={"seeds": [cfg.run.seeds[0]], "trace": True, "trace_start": start, "trace_episodes": episodes})
    summary = run_experiment(cfg, output_dir)
    traced = sorted({t.episode for t in summary.seeds[0].trace})
    if len(traced) < episodes:
        log.warning("only %d of %d requested episodes could be traced; raise run.total_steps", len(traced), episodes)
    if summary.output_dir is not None:
        _write_csv(summary.output_dir / "raster.csv", RASTER_HEADER, raster_rows(summary.seeds[0].trace))
    return summary
