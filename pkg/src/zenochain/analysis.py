"""Fidelity against ideal confined evolution, ensemble statistics, and
excitation-front velocity extraction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .chain import ChainSpec, hopping_matrix, leftmost_excited
from .protocols import Trajectory
from .theory import TheoryPrediction

DM_TOL = 1e-10


class InvalidDensityMatrixError(ValueError):
    """Input is not a Hermitian PSD trace-one matrix."""


class TimeMismatchError(ValueError):
    """Protocol and reference trajectories ended at different times."""


class NoPeakFoundError(RuntimeError):
    """Edge population never formed a peak above the detection threshold."""


def density_matrix(psi: np.ndarray) -> np.ndarray:
    """Rank-1 density matrix |psi><psi|."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def _check_density_matrix(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDensityMatrixError("density matrix must be square")
    if not linalg.is_hermitian(rho, rtol=1e-9):
        raise InvalidDensityMatrixError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > DM_TOL:
        raise InvalidDensityMatrixError(f"trace is {np.trace(rho).real}, expected 1")
    w = np.linalg.eigvalsh(rho)
    if w.min() < -DM_TOL:
        raise InvalidDensityMatrixError(f"negative eigenvalue {w.min():.3e}")
    return rho


def uhlmann_fidelity(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """F = Tr sqrt(sqrt(rho_a) rho_b sqrt(rho_a)), clipped to [0, 1].

    Evaluated as the trace norm of sqrt(rho_a) sqrt(rho_b) (the same
    quantity), which avoids squaring eigenvalue noise for near-pure inputs.
    """
    rho_a = _check_density_matrix(rho_a)
    rho_b = _check_density_matrix(rho_b)
    product = linalg.sqrt_psd(rho_a) @ linalg.sqrt_psd(rho_b)
    f = float(np.sum(np.linalg.svd(product, compute_uv=False)))
    return float(np.clip(f, 0.0, 1.0))


def embed_state(psi_sub: np.ndarray, dim: int) -> np.ndarray:
    """Zero-pad a subspace state vector up to the full chain dimension."""
    psi_sub = np.asarray(psi_sub, dtype=complex)
    if len(psi_sub) > dim:
        raise ValueError("state longer than target dimension")
    out = np.zeros(dim, dtype=complex)
    out[: len(psi_sub)] = psi_sub
    return out


def protocol_fidelity(traj: Trajectory, reference: Trajectory) -> float:
    """Uhlmann fidelity of the final protocol state against the ideal one.

    The reference comes from run_exact_subspace and lives in the subspace;
    it is zero-padded to the protocol dimension before comparing.
    """
    t_a, t_b = traj.total_time, reference.total_time
    if abs(t_a - t_b) > 1e-9 * max(1.0, abs(t_a), abs(t_b)):
        raise TimeMismatchError(f"trajectory at t={t_a}, reference at t={t_b}")
    dim = len(traj.final_state)
    ref_full = embed_state(reference.final_state, dim)
    return uhlmann_fidelity(density_matrix(traj.final_state), density_matrix(ref_full))


@dataclass(frozen=True)
class EnsembleSummary:
    realization_count: int
    final_survival: np.ndarray
    log_mean: float
    log_std: float
    log_mode: float
    theory_pstar: Optional[float]


def aggregate(
    realizations: Sequence[Trajectory], theory: Optional[TheoryPrediction] = None
) -> EnsembleSummary:
    """Log-survival statistics over an ensemble of realizations.

    The most-probable-value estimate is the center of the tallest
    histogram bin of ln P, with bin width std/5 (the sample mean when the
    ensemble is degenerate).
    """
    if not realizations:
        raise ValueError("need at least one realization")
    finals = np.array([t.final_survival for t in realizations])
    logs = np.log(finals)
    mean = float(np.mean(logs))
    std = float(np.std(logs, ddof=1)) if len(logs) > 1 else 0.0
    if std > 0:
        width = std / 5.0
        nbins = max(1, int(np.ceil((logs.max() - logs.min()) / width)))
        counts, edges = np.histogram(logs, bins=nbins)
        k = int(np.argmax(counts))
        mode = float(0.5 * (edges[k] + edges[k + 1]))
    else:
        mode = mean
    return EnsembleSummary(
        realization_count=len(realizations),
        final_survival=finals,
        log_mean=mean,
        log_std=std,
        log_mode=mode,
        theory_pstar=theory.pstar if theory is not None else None,
    )


@dataclass(frozen=True)
class VelocityFit:
    subspace_sizes: np.ndarray
    peak_times: np.ndarray
    velocity: float  # sites/us
    bound: float  # e * beta, sites/us


def first_peak_time(
    t_grid: np.ndarray, values: np.ndarray, threshold: float
) -> float:
    """First strict local maximum above threshold, parabolically refined."""
    for k in range(1, len(values) - 1):
        if (
            values[k] > threshold
            and values[k] > values[k - 1]
            and values[k] > values[k + 1]
        ):
            # three-point parabola through (k-1, k, k+1)
            denom = values[k - 1] - 2 * values[k] + values[k + 1]
            shift = 0.0 if denom == 0 else 0.5 * (values[k - 1] - values[k + 1]) / denom
            return float(t_grid[k] + shift * (t_grid[1] - t_grid[0]))
    raise NoPeakFoundError(f"no local maximum above {threshold}")


def fit_velocity(
    spec: ChainSpec,
    subspace_sizes: Sequence[int] = tuple(range(2, 11)),
    threshold: float = 0.05,
    dt: float = 0.2,
) -> VelocityFit:
    """Excitation-front velocity from first edge-population peaks.

    For each subspace size the leftmost-excited state evolves under the
    corresponding chain Hamiltonian until |c_edge(t)|^2 first peaks; a line
    through (peak time, distance = size - 1) gives the velocity.  The
    comparison bound is e * beta (operator-norm bound on the front speed).
    """
    peaks = []
    for lam in subspace_sizes:
        h = hopping_matrix(lam, spec.alpha, spec.beta, spec.include_field_phase)
        dec = linalg.hermitian_eig(h)
        psi0 = leftmost_excited(lam)
        coeff = dec.eigenvectors.conj().T @ psi0
        t_max = np.pi * (lam + 2) / (2.0 * spec.beta)
        t_grid = np.arange(0.0, t_max, dt)
        amps = dec.eigenvectors[-1, :] @ (
            np.exp(-1j * np.outer(dec.eigenvalues, t_grid)) * coeff[:, None]
        )
        peaks.append(first_peak_time(t_grid, np.abs(amps) ** 2, threshold))
    peaks = np.array(peaks)
    distances = np.array([lam - 1 for lam in subspace_sizes], dtype=float)
    if len(peaks) == 1:
        slope = distances[0] / peaks[0]
    else:
        slope, _ = np.polyfit(peaks, distances, 1)
    return VelocityFit(
        subspace_sizes=np.array(subspace_sizes),
        peak_times=peaks,
        velocity=float(slope),
        bound=float(np.e * spec.beta),
    )


def local_maxima(values: np.ndarray, order: int = 1) -> np.ndarray:
    """Indices that are strict maxima of their +-order neighbourhood."""
    values = np.asarray(values)
    idx = []
    for k in range(len(values)):
        lo, hi = max(0, k - order), min(len(values), k + order + 1)
        window = values[lo:hi]
        if values[k] == window.max() and np.sum(window == values[k]) == 1:
            idx.append(k)
    return np.array(idx, dtype=int)
