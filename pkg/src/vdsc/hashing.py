"""SimHash state codes, visit counting and the count-based bonus."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Callable, Dict, Iterable, Optional, Union

import numpy as np

MEMO_LIMIT = 1 << 18

Preprocessor = Callable[[np.ndarray], np.ndarray]


def centered_with_bias(obs: np.ndarray) -> np.ndarray:
    """Map coordinates in [0, 1] to [-1, 1] and append a constant 1.

    Sign hashing of raw non-negative coordinates only resolves the direction
    of the vector from the origin. Centering plus a bias component turns each
    projection row into an affine hyperplane cutting the unit box, so nearby
    grid cells share most bits while distant ones differ.
    """
    obs = np.asarray(obs, dtype=np.float64)
    return np.append(2.0 * obs - 1.0, 1.0)


class SimHash:
    """phi(s) = sgn(A g(s)) with A drawn once from N(0, 1).

    ``input_dim`` is the length of ``g(s)``; ``obs_dim`` (defaults to
    ``input_dim``) is the length of the raw observation, checked on every
    call. ``projection`` may be injected for tests.
    """

    def __init__(
        self,
        bits: int = 256,
        input_dim: int = 2,
        seed: Optional[int] = None,
        preprocessor: Optional[Preprocessor] = None,
        projection: Optional[np.ndarray] = None,
        obs_dim: Optional[int] = None,
    ):
        if bits < 1 or input_dim < 1:
            raise ValueError("bits and input_dim must be positive")
        self.bits = int(bits)
        self.input_dim = int(input_dim)
        self.obs_dim = int(obs_dim) if obs_dim is not None else self.input_dim
        self.preprocessor = preprocessor
        if projection is None:
            projection = np.random.default_rng(seed).standard_normal((self.bits, self.input_dim))
        projection = np.array(projection, dtype=np.float64)
        if projection.shape != (self.bits, self.input_dim):
            raise ValueError(
                f"projection must have shape {(self.bits, self.input_dim)}, got {projection.shape}"
            )
        projection.setflags(write=False)
        self.projection = projection
        self._keys: Dict[bytes, bytes] = {}

    def _prepare(self, obs) -> np.ndarray:
        obs = np.asarray(obs, dtype=np.float64)
        if obs.shape != (self.obs_dim,):
            raise ValueError(f"expected observation of length {self.obs_dim}, got shape {obs.shape}")
        g = obs if self.preprocessor is None else np.asarray(self.preprocessor(obs), dtype=np.float64)
        if g.shape != (self.input_dim,):
            raise ValueError(f"preprocessor output must have length {self.input_dim}, got shape {g.shape}")
        return g

    def encode(self, obs) -> np.ndarray:
        """Return the code as a uint8 array of ``bits`` zeros and ones (sgn(0) counts as +1)."""
        return (self.projection @ self._prepare(obs) >= 0.0).astype(np.uint8)

    def encode_key(self, obs) -> bytes:
        """Packed code for ``obs``, memoized on the observation bytes."""
        obs = np.asarray(obs, dtype=np.float64)
        raw = obs.tobytes()
        key = self._keys.get(raw)
        if key is None:
            key = code_key(self.encode(obs))
            if len(self._keys) < MEMO_LIMIT:
                self._keys[raw] = key
        return key

    def encode_many(self, observations) -> np.ndarray:
        observations = np.asarray(observations, dtype=np.float64)
        if observations.ndim != 2 or observations.shape[1] != self.obs_dim:
            raise ValueError(f"expected array of shape (n, {self.obs_dim}), got {observations.shape}")
        if self.preprocessor is not None:
            observations = np.stack([self._prepare(o) for o in observations])
        return (observations @ self.projection.T >= 0.0).astype(np.uint8)


def hamming(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))


CodeLike = Union[np.ndarray, bytes]


def code_key(code: CodeLike) -> bytes:
    if isinstance(code, bytes):
        return code
    return np.packbits(np.asarray(code, dtype=np.uint8)).tobytes()


class HashCountTable:
    """Exact visit counts per code.

    ``record_and_bonus`` increments first and then returns 1/sqrt(n), so a
    first visit has bonus 1 rather than dividing by zero.
    """

    def __init__(self) -> None:
        self.counts: Dict[bytes, int] = {}
        self.total_inserts = 0

    def __len__(self) -> int:
        return len(self.counts)

    def count(self, code: CodeLike) -> int:
        return self.counts.get(code_key(code), 0)

    def record_and_bonus(self, code: CodeLike) -> float:
        key = code_key(code)
        n = self.counts.get(key, 0) + 1
        self.counts[key] = n
        self.total_inserts += 1
        return 1.0 / math.sqrt(n)

    def dump_lines(self) -> Iterable[str]:
        for key in sorted(self.counts):
            yield f"{key.hex()} {self.counts[key]}"

    def dump(self, path) -> None:
        Path(path).write_text("".join(line + "\n" for line in self.dump_lines()))
