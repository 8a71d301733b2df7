"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written the slow, obvious way (explicit
loops, series sums, brute-force scans) so it shares no code paths with the
implementations under test.
"""

from __future__ import annotations

import math

import numpy as np


def kron_by_loops(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product via explicit index loops."""
    out = np.zeros(a.size * b.size, dtype=np.complex128)
    for i in range(a.size):
        for k in range(b.size):
            out[i * b.size + k] = a[i] * b[k]
    return out


def partial_trace_keep_first(amps: np.ndarray, dim_first: int) -> np.ndarray:
    """Reduced density matrix of the leading register of a bipartite state."""
    rest = amps.size // dim_first
    psi = amps.reshape(dim_first, rest)
    rho = np.zeros((dim_first, dim_first), dtype=np.complex128)
    for a in range(dim_first):
        for b in range(dim_first):
            for k in range(rest):
                rho[a, b] += psi[a, k] * np.conj(psi[b, k])
    return rho


def evolve_by_series(hamiltonian: np.ndarray, t: float, state: np.ndarray, order: int = 40) -> np.ndarray:
    """exp(-i H t) |state> via the truncated operator series."""
    out = state.astype(np.complex128).copy()
    term = state.astype(np.complex128).copy()
    for k in range(1, order + 1):
        term = (-1j * t / k) * (hamiltonian @ term)
        out = out + term
    return out


def min_taylor_order_bruteforce(x_bound: float, precision_q: int, cap: int = 400) -> int:
    """Smallest m with e^x_bound x_bound^(m+1)/(m+1)! < 10^-q, by direct floats."""
    target = 10.0 ** (-precision_q)
    for m in range(cap + 1):
        remainder = math.exp(x_bound) * x_bound ** (m + 1) / math.factorial(m + 1)
        if remainder < target:
            return m
    raise AssertionError("brute-force scan ran past its cap")


def gaussian_gram(vectors: np.ndarray, sigma: float) -> np.ndarray:
    """Classical RBF Gram matrix by explicit loops."""
    m = vectors.shape[0]
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            diff = vectors[i] - vectors[j]
            out[i, j] = math.exp(-float(diff @ diff) / (2.0 * sigma * sigma))
    return out


def lssvm_residual(
    k_matrix: np.ndarray, labels: np.ndarray, gamma: float, alphas: np.ndarray, bias: float
) -> float:
    """Max-norm residual of the saddle system at a proposed solution."""
    m = len(labels)
    top = abs(np.sum(alphas))
    rows = np.abs(
        bias + (k_matrix + np.eye(m) / gamma) @ alphas - labels
    ).max()
    return float(max(top, rows))
