"""Brute-force oracles used by the tests.

Everything here works in the full 2^n tensor-product space and never touches
the package's sector-reduced representations, so the two routes stay
independent.  Keep n <= 6.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)


def kron_all(ops: list[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, ops)


def site_op(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Operator on 1-based `site` of an n-qubit register."""
    ops = [ID2] * n
    ops[site - 1] = op
    return kron_all(ops)


def bond_op(op1: np.ndarray, op2: np.ndarray, site: int, n: int) -> np.ndarray:
    """op1 on `site`, op2 on `site`+1 (1-based)."""
    ops = [ID2] * n
    ops[site - 1] = op1
    ops[site] = op2
    return kron_all(ops)


def full_chain_hamiltonian(n: int, alpha: float, beta: float) -> np.ndarray:
    """alpha * sum sigma_z + (beta/2) * sum (sx sx + sy sy) on 2^n."""
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(1, n + 1):
        h += alpha * site_op(SZ, i, n)
    for i in range(1, n):
        h += 0.5 * beta * (bond_op(SX, SX, i, n) + bond_op(SY, SY, i, n))
    return h


def full_coupling_hamiltonian(n: int, lam: int) -> np.ndarray:
    """sx sx + sy sy on the bond (lam+1, lam+2), no beta/2 prefactor."""
    return bond_op(SX, SX, lam + 1, n) + bond_op(SY, SY, lam + 1, n)


def single_excitation_index(n: int, site: int) -> int:
    """Computational-basis index of |0..010..0> with the 1 at 1-based `site`.

    Qubit 1 is the leftmost (most significant) factor; |1> is the excited
    sigma_z = +1 state, i.e. computational |0>.
    """
    # all qubits in |1> (computational 1) except `site` in |0>
    bits = [1] * n
    bits[site - 1] = 0
    idx = 0
    for b in bits:
        idx = (idx << 1) | b
    return idx


def project_to_sector(op: np.ndarray, n: int) -> np.ndarray:
    """n x n sector matrix <1_i| op |1_j> from the full 2^n operator."""
    idx = [single_excitation_index(n, s) for s in range(1, n + 1)]
    return op[np.ix_(idx, idx)]


def sector_constant_shift(n: int, alpha: float) -> float:
    """Diagonal the field term contributes in the sector: alpha * (2 - n)."""
    return alpha * (2 - n)


def survival_trace_formula(
    h: np.ndarray, proj: np.ndarray, psi0: np.ndarray, intervals: np.ndarray
) -> float:
    """Survival probability from the raw operator product (independent route).

    Accumulates prod_j (P U(mu_j) P) applied to psi0 without renormalizing
    and reads the survival off the final norm.
    """
    from zenochain.linalg import propagator

    phi = proj @ np.asarray(psi0, dtype=complex)
    for mu in intervals:
        phi = proj @ (propagator(h, mu) @ phi)
    return float(np.real(np.vdot(phi, phi)))
