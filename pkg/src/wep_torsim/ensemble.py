"""Monte Carlo phase randomization and streaming statistics.

Random streams come from numpy's PCG64 bit generator, whose output for a
given seed is fixed across platforms and numpy versions. Independent
substreams for parallel workers are derived with ``SeedSequence.spawn``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

ALGORITHMS = {"pcg64": np.random.PCG64, "philox": np.random.Philox, "sfc64": np.random.SFC64}


@dataclass(frozen=True)
class RngSpec:
    seed: int = 0
    algorithm_id: str = "pcg64"

    def __post_init__(self):
        if self.algorithm_id not in ALGORITHMS:
            raise ValueError(f"unknown RNG algorithm {self.algorithm_id!r}; choose from {sorted(ALGORITHMS)}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(ALGORITHMS[self.algorithm_id](int(self.seed)))

    def substreams(self, count: int) -> list[np.random.Generator]:
        """Per-worker generators: children of ``SeedSequence(seed)``."""
        children = np.random.SeedSequence(int(self.seed)).spawn(count)
        return [np.random.Generator(ALGORITHMS[self.algorithm_id](c)) for c in children]


class RunningStats:
    """Single-pass mean/variance accumulator (Welford updates, Chan merges)."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0

    def push(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def extend(self, values) -> None:
        """Absorb a batch by merging its two-pass statistics."""
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            return
        batch = RunningStats()
        batch.count = values.size
        batch.mean = float(values.mean())
        batch.m2 = float(np.sum((values - batch.mean) ** 2))
        self.merge(batch)

    def merge(self, other: "RunningStats") -> None:
        if other.count == 0:
            return
        if self.count == 0:
            self.count, self.mean, self.m2 = other.count, other.mean, other.m2
            return
        n = self.count + other.count
        delta = other.mean - self.mean
        self.mean += delta * other.count / n
        self.m2 += other.m2 + delta * delta * self.count * other.count / n
        self.count = n

    @property
    def variance(self) -> float:
        if self.count < 2:
            raise ValueError("sample variance needs at least two values")
        return self.m2 / (self.count - 1)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    @property
    def stderr(self) -> float:
        return self.std / math.sqrt(self.count)

    def __repr__(self) -> str:
        return f"RunningStats(count={self.count}, mean={self.mean!r}, m2={self.m2!r})"


def sample_uniform_phase(rng: np.random.Generator, count: int, k: int | None = None) -> np.ndarray:
    """Phases uniform on [-pi, pi); shape ``(count,)`` or ``(count, k)``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    shape = (count,) if k is None else (count, k)
    return rng.uniform(-math.pi, math.pi, size=shape)


@dataclass
class CosGammaResult:
    mean: float
    stderr: float
    bin_edges: np.ndarray
    counts: np.ndarray


def cos_gamma_experiment(rng: np.random.Generator, count: int, bins: int = 50) -> CosGammaResult:
    """Statistics of ``cos(gamma)`` for uniformly random ``gamma``.

    ``stderr`` is the standard error of the mean (sample std / sqrt(count)).
    The histogram follows the arcsine density ``1 / (pi sqrt(1 - x^2))``.
    """
    if count < 2:
        raise ValueError("count must be >= 2")
    c = np.cos(sample_uniform_phase(rng, count))
    stats = RunningStats()
    stats.extend(c)
    counts, edges = np.histogram(c, bins=bins, range=(-1.0, 1.0))
    return CosGammaResult(stats.mean, stats.stderr, edges, counts)


def cos_gamma_convergence(rng: np.random.Generator, checkpoints) -> list[tuple[int, float, float]]:
    """Running ``(count, mean, stderr)`` of ``cos(gamma)`` at increasing sample counts."""
    checkpoints = sorted(int(c) for c in checkpoints)
    stats = RunningStats()
    out = []
    for target in checkpoints:
        if target > stats.count:
            stats.extend(np.cos(sample_uniform_phase(rng, target - stats.count)))
        out.append((stats.count, stats.mean, stats.stderr))
    return out


def ensemble_average(
    f: Callable[..., np.ndarray],
    rng: np.random.Generator,
    count: int,
    n_phases: int = 1,
    chunk: int = 65536,
) -> RunningStats:
    """Statistics of ``f(gamma_1, ..., gamma_k)`` over independent uniform phases.

    ``f`` is called with numpy arrays (one per phase) and must broadcast like a ufunc.
    """
    stats = RunningStats()
    remaining = count
    while remaining > 0:
        size = min(chunk, remaining)
        phases = sample_uniform_phase(rng, size, n_phases)
        values = np.broadcast_to(np.asarray(f(*phases.T), dtype=float), (size,))
        stats.extend(values)
        remaining -= size
    return stats


def merge_all(parts) -> RunningStats:
    """Combine worker results in the given order."""
    total = RunningStats()
    for part in parts:
        total.merge(part)
    return total
