"""Simulated QRAM over a classically stored dataset, with query accounting.

The store keeps the raw vectors and their norms on the classical side.  A
query materializes an amplitude-encoded state; the cost model charges one
query per state preparation, where each query takes ceil(log2 N) elementary
steps for N-dimensional payloads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AddressOutOfRange, NotNormalized, ZeroVector
from .statevec import QuantumState, RegisterLayout, amplitude_encode, pad_dim

# Accepted deviation from unit norm for caller-supplied address amplitudes.
ADDRESS_NORM_TOL = 1e-9


def step_cost(n_dim: int) -> int:
    """Elementary steps per query for an n_dim-dimensional payload: ceil(log2 n)."""
    if n_dim < 1:
        raise ValueError(f"dimension must be >= 1, got {n_dim}")
    return (n_dim - 1).bit_length()


@dataclass
class QueryCounter:
    """Tally of QRAM queries at a fixed per-query step cost."""

    step_cost_per_query: int
    queries: int = 0

    @property
    def total_steps(self) -> int:
        return self.queries * self.step_cost_per_query

    def add(self, n: int = 1) -> None:
        if n < 0:
            raise ValueError("cannot add a negative query count")
        self.queries += n


@dataclass(frozen=True)
class QramStore:
    """Read-only dataset of row vectors plus cached norms."""

    vectors: np.ndarray
    norms: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def n_dim(self) -> int:
        return self.vectors.shape[1]

    def counter(self) -> QueryCounter:
        """Fresh counter at this store's per-query step cost."""
        return QueryCounter(step_cost_per_query=step_cost(self.n_dim))


def load_dataset(rows: np.ndarray) -> QramStore:
    """Build a store from an (M, N) array of real row vectors.

    Every row must be finite with nonzero norm.
    """
    arr = np.array(rows, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-D array of rows, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite entry in dataset")
    norms = np.linalg.norm(arr, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroVector(f"row {int(zero[0])} has zero norm and cannot be encoded")
    arr.setflags(write=False)
    norms.setflags(write=False)
    return QramStore(vectors=arr, norms=norms)


def _check_address(store: QramStore, j: int) -> None:
    if not 0 <= j < store.m:
        raise AddressOutOfRange(f"address {j} outside store of {store.m} rows")


def fetch_state(store: QramStore, j: int, counter: QueryCounter) -> QuantumState:
    """One addressed query: returns |x_j / |x_j|> and charges a single query."""
    _check_address(store, j)
    state = amplitude_encode(store.vectors[j])
    counter.add(1)
    return state


def superposed_query(
    store: QramStore, address_amps: np.ndarray, counter: QueryCounter
) -> QuantumState:
    """Query in superposition: sum_j psi_j |j>|x_j / |x_j|>.

    address_amps has one complex amplitude per stored row and must be unit
    norm within 1e-9; the output is renormalized exactly.  Charged as one
    query regardless of how many addresses are in superposition.
    """
    psi = np.asarray(address_amps, dtype=np.complex128)
    if psi.ndim != 1 or psi.size != store.m:
        raise ValueError(f"expected {store.m} address amplitudes, got shape {psi.shape}")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > ADDRESS_NORM_TOL:
        raise NotNormalized(f"address amplitudes have norm {norm!r}")
    adr_dim = pad_dim(store.m)
    dat_dim = pad_dim(store.n_dim)
    out = np.zeros((adr_dim, dat_dim), dtype=np.complex128)
    out[: store.m, : store.n_dim] = (psi / norm)[:, None] * (
        store.vectors / store.norms[:, None]
    )
    counter.add(1)
    layout = RegisterLayout((("address", adr_dim), ("data", dat_dim)))
    return QuantumState(layout, out.reshape(-1))


def prep_psi(store: QramStore, i: int, j: int, counter: QueryCounter) -> QuantumState:
    """Prepare (|0>|x_i/|x_i|> + |1>|x_j/|x_j|>) / sqrt(2).  Charges 2 queries."""
    _check_address(store, i)
    _check_address(store, j)
    dat_dim = pad_dim(store.n_dim)
    out = np.zeros((2, dat_dim), dtype=np.complex128)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    out[0, : store.n_dim] = store.vectors[i] / store.norms[i] * inv_sqrt2
    out[1, : store.n_dim] = store.vectors[j] / store.norms[j] * inv_sqrt2
    counter.add(2)
    layout = RegisterLayout((("ancilla", 2), ("data", dat_dim)))
    return QuantumState(layout, out.reshape(-1))


def norms(store: QramStore, i: int, j: int) -> tuple[float, float, float]:
    """Classically stored norms (|x_i|, |x_j|) and Z = |x_i|^2 + |x_j|^2."""
    _check_address(store, i)
    _check_address(store, j)
    u = float(store.norms[i])
    v = float(store.norms[j])
    return u, v, u * u + v * v
