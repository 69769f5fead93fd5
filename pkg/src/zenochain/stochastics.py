"""Discrete waiting-time distributions and reproducible sampling.

Sampling uses SplitMix64, a 64-bit mixing generator with fixed published
constants, rather than a platform RNG: identical seeds must give identical
interval sequences on every platform, since seeded runs are part of the
package contract.  Child streams for parallel realizations are derived with
``derive_seed(seed, index)`` built from the same mixing function.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix64(z: int) -> int:
    """SplitMix64 finalizer (Steele, Lea & Flood constants)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Deterministic child seed for realization `index` of a master seed."""
    return _mix64((seed & _MASK64) ^ _mix64((index + 1) & _MASK64))


class SeededSampler:
    """SplitMix64 stream: state advances by a fixed odd constant, output is mixed.

    Single-owner: do not share one instance between threads; use
    ``spawn(index)`` to derive independent per-realization streams.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._state = int(seed) & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix64(self._state)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_uint64() >> 11) * (2.0 ** -53)

    def spawn(self, index: int) -> "SeededSampler":
        return SeededSampler(derive_seed(self.seed, index))


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float
    kappa: float
    third_raw: float


@dataclass(frozen=True)
class IntervalDistribution:
    """Atomic waiting-time density: list of (mu in us > 0, probability)."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValueError("distribution needs at least one atom")
        total = 0.0
        seen = set()
        for mu, p in self.atoms:
            if not (mu > 0):
                raise ValueError(f"interval must be positive, got {mu}")
            if not (0 < p <= 1):
                raise ValueError(f"probability must lie in (0, 1], got {p}")
            if mu in seen:
                raise ValueError(f"duplicate atom at mu={mu}")
            seen.add(mu)
            total += p
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total}, expected 1")

    @classmethod
    def from_atoms(cls, pairs: Iterable[Sequence[float]]) -> "IntervalDistribution":
        return cls(tuple((float(mu), float(p)) for mu, p in pairs))

    @classmethod
    def deterministic(cls, mu: float) -> "IntervalDistribution":
        return cls(((float(mu), 1.0),))

    @classmethod
    def bimodal(cls, mu1: float, mu2: float, p1: float) -> "IntervalDistribution":
        if abs(mu1 - mu2) < 1e-15 or p1 >= 1.0:
            return cls.deterministic(mu1)
        return cls(((float(mu1), float(p1)), (float(mu2), 1.0 - float(p1))))

    @classmethod
    def from_literal(cls, text: str) -> "IntervalDistribution":
        """Parse the config literal form ``[(1.0, 0.5), (5.0, 0.5)]``."""
        try:
            value = ast.literal_eval(text.strip())
        except (ValueError, SyntaxError) as exc:
            raise ValueError(f"bad distribution literal: {text!r}") from exc
        if not isinstance(value, (list, tuple)):
            raise ValueError("distribution literal must be a list of (mu, prob) pairs")
        return cls.from_atoms(value)

    @property
    def values(self) -> np.ndarray:
        return np.array([mu for mu, _ in self.atoms])

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])


def moments(d: IntervalDistribution) -> Moments:
    """Mean, variance, relative variance kappa and raw third moment."""
    mu = d.values
    p = d.probabilities
    mean = float(np.dot(p, mu))
    variance = float(np.dot(p, (mu - mean) ** 2))
    third_raw = float(np.dot(p, mu**3))
    return Moments(mean=mean, variance=variance, kappa=variance / mean**2, third_raw=third_raw)


def sample_intervals(
    d: IntervalDistribution, sampler: SeededSampler, m: int
) -> np.ndarray:
    """Draw m i.i.d. waiting times by inverse CDF in atom order."""
    if m < 1:
        raise ValueError("m must be >= 1")
    cdf = np.cumsum(d.probabilities)
    cdf[-1] = 1.0
    values = d.values
    out = np.empty(m)
    for j in range(m):
        u = sampler.uniform()
        out[j] = values[np.searchsorted(cdf, u, side="right")]
    return out


def weak_zeno_margin(d: IntervalDistribution, m: int, c_bound: float) -> float:
    """Ratio r = m * C * <mu^3>; the quadratic truncation needs r << 1.

    Interpretation is left to the caller; r < 0.1 is the convention used
    in this package's reports.
    """
    if c_bound < 0:
        raise ValueError("remainder bound must be >= 0")
    return m * c_bound * moments(d).third_raw
