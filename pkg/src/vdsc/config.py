"""Experiment configuration: INI-style file with four sections.

    [environment]  name, size, width, height, slip, max_episode_steps
    [strategy]     name, k, bits, rho_initial, rho_final, decay_steps, eps, z_clamp
    [agent]        learning_rate, discount
    [run]          seeds, total_steps, eval_interval, trace, trace_start,
                   trace_episodes, smoothing_window, output_dir

``rho_*`` / ``decay_steps`` define the one exploration-rate schedule every
strategy uses: epsilon for epsilon-greedy, temperature for Boltzmann and the
target rate for the homeostasis-driven strategies. Unknown sections or keys
are rejected.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Tuple

from .envs import ENVIRONMENTS
from .strategies import STRATEGIES


class ConfigError(ValueError):
    def __init__(self, problems: Iterable[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


@dataclass
class EnvironmentConfig:
    name: str = "sparsegrid"
    size: int = 10
    width: int = 8
    height: int = 8
    slip: float = 0.25
    max_episode_steps: int = 0


@dataclass
class StrategyConfig:
    name: str = "vdsc"
    k: int = 5
    bits: int = 256
    rho_initial: float = 1.0
    rho_final: float = 0.01
    decay_steps: int = 25_000
    eps: float = 1e-8
    z_clamp: float = 20.0


@dataclass
class AgentConfig:
    learning_rate: float = 0.1
    discount: float = 0.99


@dataclass
class RunConfig:
    seeds: Tuple[int, ...] = tuple(range(10))
    total_steps: int = 50_000
    eval_interval: int = 1_000
    trace: bool = False
    trace_start: int = 0
    trace_episodes: int = 0
    smoothing_window: int = 10
    output_dir: str = "results"


@dataclass
class ExperimentConfig:
    environment: EnvironmentConfig = field(default_factory=EnvironmentConfig)
    strategy: StrategyConfig = field(default_factory=StrategyConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)
    run: RunConfig = field(default_factory=RunConfig)

    def to_dict(self) -> Dict[str, Dict[str, Any]]:
        d = dataclasses.asdict(self)
        d["run"]["seeds"] = list(d["run"]["seeds"])
        return d

    def replace(self, **sections: Dict[str, Any]) -> "ExperimentConfig":
        """Copy with some fields changed, e.g. ``cfg.replace(strategy={"name": "boltzmann"})``."""
        raw = {name: {k: v for k, v in vals.items()} for name, vals in self.to_dict().items()}
        for name, vals in sections.items():
            raw.setdefault(name, {}).update(vals)
        return from_dict(raw)


SECTIONS = {
    "environment": EnvironmentConfig,
    "strategy": StrategyConfig,
    "agent": AgentConfig,
    "run": RunConfig,
}


def _convert(raw: Any, default: Any) -> Any:
    if isinstance(default, bool):
        if isinstance(raw, bool):
            return raw
        text = str(raw).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if isinstance(default, tuple):
        if isinstance(raw, (list, tuple)):
            return tuple(int(x) for x in raw)
        return tuple(int(x) for x in str(raw).replace(";", ",").split(",") if x.strip())
    if isinstance(default, int):
        if isinstance(raw, float) and not raw.is_integer():
            raise ValueError(f"not an integer: {raw!r}")
        text = str(raw).strip().replace("_", "")
        try:
            return int(text)
        except ValueError:
            value = float(text)
            if not value.is_integer():
                raise ValueError(f"not an integer: {raw!r}") from None
            return int(value)
    if isinstance(default, float):
        return float(raw)
    return str(raw).strip()


def from_dict(raw: Dict[str, Dict[str, Any]]) -> ExperimentConfig:
    """Build and validate a config; every problem found is reported at once."""
    problems: List[str] = []
    built = {}
    for section in raw:
        if section not in SECTIONS:
            problems.append(f"unknown section [{section}]")
    for section, cls in SECTIONS.items():
        defaults = cls()
        values = {}
        for key, value in raw.get(section, {}).items():
            if not hasattr(defaults, key):
                problems.append(f"unknown key {section}.{key}")
                continue
            try:
                values[key] = _convert(value, getattr(defaults, key))
            except (TypeError, ValueError) as exc:
                problems.append(f"{section}.{key}: {exc}")
        built[section] = cls(**values)
    cfg = ExperimentConfig(**built)
    problems.extend(validate(cfg))
    if problems:
        raise ConfigError(problems)
    return cfg


def validate(cfg: ExperimentConfig) -> List[str]:
    p = []
    e, s, a, r = cfg.environment, cfg.strategy, cfg.agent, cfg.run
    if e.name not in ENVIRONMENTS:
        p.append(f"environment.name: unknown environment {e.name!r} (choose from {', '.join(ENVIRONMENTS)})")
    if e.size < 2:
        p.append("environment.size must be >= 2")
    if e.width < 2 or e.height < 2:
        p.append("environment.width and environment.height must be >= 2")
    if not 0.0 <= e.slip <= 1.0:
        p.append("environment.slip must lie in [0, 1]")
    if e.max_episode_steps < 0:
        p.append("environment.max_episode_steps must be >= 0 (0 = environment default)")
    if s.name not in STRATEGIES:
        p.append(f"strategy.name: unknown strategy {s.name!r} (choose from {', '.join(STRATEGIES)})")
    if s.k < 1:
        p.append("strategy.k must be >= 1")
    if s.bits < 1:
        p.append("strategy.bits must be >= 1")
    if s.name == "epsilon_greedy":
        lo, hi = 0.0, 1.0
        ok = lo <= s.rho_initial <= hi and lo <= s.rho_final <= hi
        if not ok:
            p.append("strategy.rho_initial/rho_final (epsilon) must lie in [0, 1]")
    elif s.name == "boltzmann":
        if s.rho_initial <= 0 or s.rho_final <= 0:
            p.append("strategy.rho_initial/rho_final (temperature) must be > 0")
    else:
        if not (0.0 < s.rho_initial <= 1.0 and 0.0 < s.rho_final <= 1.0):
            p.append("strategy.rho_initial/rho_final (target rate) must lie in (0, 1]")
    if s.decay_steps < 1:
        p.append("strategy.decay_steps must be >= 1")
    if s.eps <= 0:
        p.append("strategy.eps must be > 0")
    if s.z_clamp <= 0:
        p.append("strategy.z_clamp must be > 0")
    if not 0.0 < a.learning_rate <= 1.0:
        p.append("agent.learning_rate must lie in (0, 1]")
    if not 0.0 < a.discount <= 1.0:
        p.append("agent.discount must lie in (0, 1]")
    if not r.seeds:
        p.append("run.seeds must list at least one seed")
    if len(set(r.seeds)) != len(r.seeds):
        p.append("run.seeds contains duplicates")
    if r.total_steps < 0:
        p.append("run.total_steps must be >= 0")
    if r.eval_interval < 1:
        p.append("run.eval_interval must be >= 1")
    if r.trace_start < 0 or r.trace_episodes < 0:
        p.append("run.trace_start and run.trace_episodes must be >= 0")
    if r.smoothing_window < 1:
        p.append("run.smoothing_window must be >= 1")
    return p


def parse_overrides(pairs: Iterable[str]) -> Dict[str, Dict[str, str]]:
    out: Dict[str, Dict[str, str]] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot or not section or not name:
            raise ConfigError([f"malformed override {pair!r}; expected section.key=value"])
        out.setdefault(section, {})[name] = value.strip()
    return out


def read_raw(path) -> Dict[str, Dict[str, str]]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError([f"{path}: {exc}"]) from exc
    return {section: dict(parser.items(section)) for section in parser.sections()}


def load_config(path=None, overrides: Iterable[str] = ()) -> ExperimentConfig:
    """Read ``path`` (or start from defaults), apply ``section.key=value`` overrides, validate."""
    raw = read_raw(path) if path is not None else {}
    for section, values in parse_overrides(overrides).items():
        raw.setdefault(section, {}).update(values)
    return from_dict(raw)


def dumps(cfg: ExperimentConfig) -> str:
    lines = []
    for section, values in cfg.to_dict().items():
        lines.append(f"[{section}]")
        for key, value in values.items():
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            lines.append(f"{key} = {str(value).lower() if isinstance(value, bool) else value}")
        lines.append("")
    return "\n".join(lines)
