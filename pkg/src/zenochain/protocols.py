"""The three stochastic confinement protocols.

projective   -- free evolution for a random interval, then a projective
                check that the excitation is still inside the subspace.
                Default semantics are post-selected conditional evolution:
                the state is projected and renormalized while the survival
                probability accumulates as the product of the per-step
                factors q_j.  An optional Bernoulli mode draws the outcome
                instead and aborts the trajectory on the first failure.
pulsed       -- the check is replaced by an instantaneous unitary kick
                exp(-i H_c s) on the two sites outside the boundary.
continuous   -- a constant strong term g * H_c is added to the chain
                Hamiltonian; the evolution is evaluated exactly from one
                eigendecomposition of H + g*H_c.

All runners accept an optional explicit sector Hamiltonian to support
modified chains (for instance a severed boundary bond).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import linalg
from .chain import ChainSpec, coupling_hamiltonian, hamiltonian, zeno_hamiltonian
from .stochastics import IntervalDistribution, SeededSampler, moments, sample_intervals

NORM_TOL = 1e-10
DEAD_BRANCH = 1e-300


class InitialStateOutsideSubspaceError(ValueError):
    """psi0 must be normalized and supported on the confined sites."""


class ZeroSurvivalError(RuntimeError):
    """A survival factor underflowed; the conditional branch is numerically dead."""


class ProtocolKind(str, Enum):
    PROJECTIVE = "projective"
    PULSED = "pulsed"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class ProtocolConfig:
    kind: ProtocolKind
    num_intervals: int
    distribution: IntervalDistribution
    pulse_area: float = np.pi / 2  # pulsed only
    coupling: Optional[float] = None  # continuous only; None -> pi/(2*mean)
    record_states: bool = False
    bernoulli: bool = False  # projective only: sample outcomes instead of post-selecting

    def __post_init__(self) -> None:
        if self.num_intervals < 1:
            raise ValueError("num_intervals must be >= 1")
        if self.kind is ProtocolKind.PULSED and not (self.pulse_area > 0):
            raise ValueError("pulse_area must be positive")
        if (
            self.kind is ProtocolKind.CONTINUOUS
            and self.coupling is not None
            and not (self.coupling > 0)
        ):
            raise ValueError("coupling must be positive")

    def effective_coupling(self) -> float:
        """Continuous coupling strength; defaults to pi / (2 * mean interval)."""
        if self.coupling is not None:
            return self.coupling
        return np.pi / (2.0 * moments(self.distribution).mean)


@dataclass
class Trajectory:
    """One protocol realization.

    cumulative_survival for the projective protocol is the running product
    of the q_j; for the coherent protocols it is the instantaneous subspace
    population (those protocols are unitary, nothing is post-selected).
    survival_factors is None for the coherent protocols.  aborted_at is the
    1-based step of the first failed Bernoulli outcome, None otherwise.
    """

    kind: ProtocolKind
    intervals: np.ndarray
    times: np.ndarray
    cumulative_survival: np.ndarray
    subspace_population: np.ndarray
    final_state: np.ndarray
    survival_factors: Optional[np.ndarray] = None
    states: Optional[list[np.ndarray]] = None
    aborted_at: Optional[int] = None
    metadata: dict = field(default_factory=dict)

    @property
    def total_time(self) -> float:
        return float(self.times[-1]) if len(self.times) else 0.0

    @property
    def final_survival(self) -> float:
        return float(self.cumulative_survival[-1])

    @property
    def log_survival(self) -> float:
        return float(np.log(self.cumulative_survival[-1]))


def _check_initial_state(psi0: np.ndarray, subspace_size: int) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > NORM_TOL:
        raise InitialStateOutsideSubspaceError("initial state is not normalized")
    if np.linalg.norm(psi0[subspace_size:]) > NORM_TOL:
        raise InitialStateOutsideSubspaceError(
            "initial state has weight outside the subspace"
        )
    return psi0.copy()


def _cached_propagators(h: np.ndarray, d: IntervalDistribution) -> dict[float, np.ndarray]:
    # one matrix exponential per distinct atom; runs reuse them m times
    return {mu: linalg.propagator(h, mu) for mu in d.values}


def run_projective(
    spec: ChainSpec,
    psi0: np.ndarray,
    config: ProtocolConfig,
    sampler: SeededSampler,
    *,
    hamiltonian_override: Optional[np.ndarray] = None,
) -> Trajectory:
    """Random-interval projective protocol (post-selected by default)."""
    lam = spec.subspace_size
    psi = _check_initial_state(psi0, lam)
    h = hamiltonian(spec) if hamiltonian_override is None else hamiltonian_override
    props = _cached_propagators(h, config.distribution)
    intervals = sample_intervals(config.distribution, sampler, config.num_intervals)

    qs: list[float] = []
    cum: list[float] = []
    pops: list[float] = []
    states: list[np.ndarray] = []
    log_p = 0.0
    aborted_at: Optional[int] = None

    for j, mu in enumerate(intervals, start=1):
        psi = props[mu] @ psi
        q = float(np.sum(np.abs(psi[:lam]) ** 2))
        if q < DEAD_BRANCH:
            raise ZeroSurvivalError(f"survival factor underflow at step {j}")
        qs.append(q)
        if config.bernoulli and sampler.uniform() >= q:
            # failed outcome: collapse onto the complement and stop
            psi[:lam] = 0.0
            psi /= np.linalg.norm(psi)
            cum.append(0.0)
            pops.append(0.0)
            if config.record_states:
                states.append(psi.copy())
            aborted_at = j
            break
        log_p += np.log(q)
        psi[lam:] = 0.0
        psi /= np.sqrt(q)
        cum.append(1.0 if config.bernoulli else float(np.exp(log_p)))
        pops.append(float(np.sum(np.abs(psi[:lam]) ** 2)))
        if config.record_states:
            states.append(psi.copy())

    n = len(qs)
    intervals = intervals[:n]
    return Trajectory(
        kind=ProtocolKind.PROJECTIVE,
        intervals=intervals,
        times=np.cumsum(intervals),
        cumulative_survival=np.array(cum),
        subspace_population=np.array(pops),
        survival_factors=np.array(qs),
        states=states if config.record_states else None,
        final_state=psi,
        aborted_at=aborted_at,
        metadata={"log_survival_product": log_p},
    )


def run_pulsed(
    spec: ChainSpec,
    psi0: np.ndarray,
    config: ProtocolConfig,
    sampler: SeededSampler,
    *,
    hamiltonian_override: Optional[np.ndarray] = None,
) -> Trajectory:
    """Random-interval kick protocol: psi <- exp(-i H_c s) U(mu_j) psi."""
    lam = spec.subspace_size
    psi = _check_initial_state(psi0, lam)
    h = hamiltonian(spec) if hamiltonian_override is None else hamiltonian_override
    kick = linalg.propagator(coupling_hamiltonian(spec), config.pulse_area)
    props = _cached_propagators(h, config.distribution)
    intervals = sample_intervals(config.distribution, sampler, config.num_intervals)

    pops = np.empty(len(intervals))
    states: list[np.ndarray] = []
    for j, mu in enumerate(intervals):
        psi = kick @ (props[mu] @ psi)
        pops[j] = float(np.sum(np.abs(psi[:lam]) ** 2))
        if config.record_states:
            states.append(psi.copy())

    return Trajectory(
        kind=ProtocolKind.PULSED,
        intervals=intervals,
        times=np.cumsum(intervals),
        cumulative_survival=pops.copy(),
        subspace_population=pops,
        states=states if config.record_states else None,
        final_state=psi,
    )


def run_continuous(
    spec: ChainSpec,
    psi0: np.ndarray,
    total_time: float,
    coupling: float,
    sample_times: Optional[np.ndarray] = None,
    *,
    hamiltonian_override: Optional[np.ndarray] = None,
    record_states: bool = False,
) -> Trajectory:
    """Constant strong-coupling protocol, exact via one eigendecomposition."""
    if not (total_time > 0):
        raise ValueError("total_time must be positive")
    lam = spec.subspace_size
    psi = _check_initial_state(psi0, lam)
    h = hamiltonian(spec) if hamiltonian_override is None else hamiltonian_override
    h_tot = h + coupling * coupling_hamiltonian(spec)
    if sample_times is None:
        sample_times = np.linspace(0.0, total_time, 2001)
    sample_times = np.asarray(sample_times, dtype=float)
    if len(sample_times) and (
        sample_times.min() < -1e-12 or sample_times.max() > total_time + 1e-9
    ):
        raise ValueError("sample_times must lie inside [0, total_time]")

    dec = linalg.hermitian_eig(h_tot)
    coeff = dec.eigenvectors.conj().T @ psi
    # amplitudes for all sample times in one shot: dim x n_times
    amps = dec.eigenvectors @ (
        np.exp(-1j * np.outer(dec.eigenvalues, sample_times)) * coeff[:, None]
    )
    pops = np.sum(np.abs(amps[:lam, :]) ** 2, axis=0)
    final = dec.eigenvectors @ (np.exp(-1j * dec.eigenvalues * total_time) * coeff)

    return Trajectory(
        kind=ProtocolKind.CONTINUOUS,
        intervals=np.diff(sample_times, prepend=0.0),
        times=sample_times,
        cumulative_survival=pops.copy(),
        subspace_population=pops,
        states=[amps[:, k].copy() for k in range(amps.shape[1])] if record_states else None,
        final_state=final,
        metadata={"coupling": coupling, "total_time": float(total_time)},
    )


def run_exact_subspace(
    spec: ChainSpec, psi0: np.ndarray, t_grid: np.ndarray
) -> Trajectory:
    """Ideal confined evolution under the subspace Hamiltonian.

    This is the fidelity reference.  States are subspace_size-dimensional;
    psi0 may be given in full chain dimension as long as its support lies
    inside the subspace.
    """
    lam = spec.subspace_size
    psi0 = np.asarray(psi0, dtype=complex)
    if len(psi0) >= lam and np.linalg.norm(psi0[lam:]) > NORM_TOL:
        raise InitialStateOutsideSubspaceError(
            "initial state has weight outside the subspace"
        )
    psi_sub = psi0[:lam].copy()
    norm = np.linalg.norm(psi_sub)
    if abs(norm - 1.0) > NORM_TOL:
        raise InitialStateOutsideSubspaceError("initial state is not normalized")
    psi_sub /= norm

    t_grid = np.asarray(t_grid, dtype=float)
    dec = linalg.hermitian_eig(zeno_hamiltonian(spec))
    coeff = dec.eigenvectors.conj().T @ psi_sub
    amps = dec.eigenvectors @ (
        np.exp(-1j * np.outer(dec.eigenvalues, t_grid)) * coeff[:, None]
    )

    ones = np.ones(len(t_grid))
    return Trajectory(
        kind=ProtocolKind.PROJECTIVE,  # reference dynamics, no leakage by construction
        intervals=np.diff(t_grid, prepend=t_grid[0] if len(t_grid) else 0.0),
        times=t_grid,
        cumulative_survival=ones.copy(),
        subspace_population=ones,
        states=[amps[:, k].copy() for k in range(amps.shape[1])],
        final_state=amps[:, -1].copy() if len(t_grid) else psi_sub,
        metadata={"reference": True},
    )


def run_protocol(
    spec: ChainSpec,
    psi0: np.ndarray,
    config: ProtocolConfig,
    sampler: SeededSampler,
) -> Trajectory:
    """Dispatch one realization of the configured protocol.

    The continuous protocol is deterministic: it runs for the expected
    total time num_intervals * mean(mu) and reports the population on the
    same per-interval grid the stochastic protocols use.
    """
    if config.kind is ProtocolKind.PROJECTIVE:
        return run_projective(spec, psi0, config, sampler)
    if config.kind is ProtocolKind.PULSED:
        return run_pulsed(spec, psi0, config, sampler)
    mean = moments(config.distribution).mean
    total = config.num_intervals * mean
    grid = mean * np.arange(1, config.num_intervals + 1)
    return run_continuous(
        spec,
        psi0,
        total_time=total,
        coupling=config.effective_coupling(),
        sample_times=grid,
        record_states=config.record_states,
    )
