"""Complex statevector substrate with named register layouts.

States are immutable (layout, amplitudes) pairs.  A layout is an ordered
tuple of named registers, e.g. ancilla (dim 2) then data (dim 8); the flat
amplitude index runs fastest over the last register, matching a reshape to
the register dimensions.  Operations provided here are the ones the
estimation protocols need: amplitude encoding of classical vectors, tensor
products, inner products, Born-rule measurement of one register,
post-selection, and fidelity.

All amplitudes are complex128.  Data registers are padded to the next power
of two so their size always reads as a whole number of qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionOverflow, LayoutMismatch, ZeroBranch, ZeroVector

# Unit-norm slack accepted when constructing a state.
NORM_TOL = 1e-12
# Below this probability a post-selection branch counts as impossible.
ZERO_BRANCH_TOL = 1e-15
# Amplitude-count ceiling for tensor products; fail fast beyond it.
DEFAULT_DIM_CAP = 2 ** 24


def pad_dim(n: int) -> int:
    """Next power of two >= n."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return 1 << (n - 1).bit_length()


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered named registers.

    Every register needs dim >= 2 except the trailing one, which may be a
    degenerate dim-1 data register (a one-component vector still encodes).
    Names must be unique within a layout.
    """

    registers: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        if not self.registers:
            raise ValueError("layout needs at least one register")
        names = [name for name, _ in self.registers]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate register names: {names}")
        last = len(self.registers) - 1
        for k, (name, dim) in enumerate(self.registers):
            floor = 1 if k == last else 2
            if not isinstance(dim, int) or dim < floor:
                raise ValueError(f"register {name!r} has dim {dim}, needs an int >= {floor}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.registers)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.registers)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def axis(self, name: str) -> int:
        for k, (reg, _) in enumerate(self.registers):
            if reg == name:
                return k
        raise LayoutMismatch(f"no register named {name!r} in {self.names}")

    def dim(self, name: str) -> int:
        return self.registers[self.axis(name)][1]


@dataclass(frozen=True)
class QuantumState:
    """Unit-norm pure state over a register layout."""

    layout: RegisterLayout
    amps: np.ndarray

    def __post_init__(self) -> None:
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if amps.ndim != 1 or amps.size != self.layout.total_dim:
            raise ValueError(
                f"amplitude count {amps.size} does not match layout dim {self.layout.total_dim}"
            )
        if not np.all(np.isfinite(amps)):
            raise ValueError("non-finite amplitude")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond {NORM_TOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    def probabilities(self) -> np.ndarray:
        """Born probabilities over the full computational basis."""
        return np.abs(self.amps) ** 2


def pure_state(amps: np.ndarray, name: str = "q") -> QuantumState:
    """Wrap an already-normalized amplitude vector as a single-register state."""
    amps = np.asarray(amps, dtype=np.complex128)
    return QuantumState(RegisterLayout(((name, amps.size),)), amps)


def amplitude_encode(x: np.ndarray, name: str = "data") -> QuantumState:
    """Encode a real vector x as the normalized state x / |x|.

    The register is padded to the next power of two with zero amplitudes.
    Raises ZeroVector when |x| = 0.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"expected a nonempty 1-D vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite component in input vector")
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        raise ZeroVector("cannot amplitude-encode the zero vector")
    amps = np.zeros(pad_dim(x.size), dtype=np.complex128)
    amps[: x.size] = x / norm
    return QuantumState(RegisterLayout(((name, amps.size),)), amps)


def _extend_names(taken: set[str], name: str) -> str:
    # Deterministic rename on collision: data, data_2, data_3, ...
    candidate = name
    k = 2
    while candidate in taken:
        candidate = f"{name}_{k}"
        k += 1
    return candidate


def tensor(a: QuantumState, b: QuantumState, cap: int = DEFAULT_DIM_CAP) -> QuantumState:
    """Kronecker product a (x) b with layout concatenation.

    Register names from b that collide with names in a get a numeric suffix.
    Raises DimensionOverflow when the combined dimension exceeds cap.
    """
    total = a.layout.total_dim * b.layout.total_dim
    if total > cap:
        raise DimensionOverflow(f"tensor product dim {total} exceeds cap {cap}")
    regs = list(a.layout.registers)
    taken = set(a.layout.names)
    for name, dim in b.layout.registers:
        fresh = _extend_names(taken, name)
        taken.add(fresh)
        regs.append((fresh, dim))
    return QuantumState(RegisterLayout(tuple(regs)), np.kron(a.amps, b.amps))


def tensor_power(s: QuantumState, d: int, cap: int = DEFAULT_DIM_CAP) -> QuantumState:
    """d-fold tensor power of s (left-associated)."""
    if d < 1:
        raise ValueError(f"tensor power needs d >= 1, got {d}")
    out = s
    for _ in range(d - 1):
        out = tensor(out, s, cap=cap)
    return out


def inner_product(a: QuantumState, b: QuantumState) -> complex:
    """<a|b> with the first argument conjugated.  Layouts must be identical."""
    if a.layout != b.layout:
        raise LayoutMismatch(f"layouts differ: {a.layout.registers} vs {b.layout.registers}")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """|<a|b>|^2."""
    return float(abs(inner_product(a, b)) ** 2)


def register_probabilities(state: QuantumState, reg: str) -> np.ndarray:
    """Marginal Born probabilities of one register."""
    axis = state.layout.axis(reg)
    arr = np.abs(state.amps.reshape(state.layout.dims)) ** 2
    other = tuple(k for k in range(arr.ndim) if k != axis)
    return arr.sum(axis=other) if other else arr


def _project(state: QuantumState, axis: int, outcome: int, prob: float) -> QuantumState:
    if prob < ZERO_BRANCH_TOL:
        raise ZeroBranch(f"branch probability {prob!r} below {ZERO_BRANCH_TOL}")
    arr = state.amps.reshape(state.layout.dims)
    kept = np.zeros_like(arr)
    sel = [slice(None)] * arr.ndim
    sel[axis] = outcome
    kept[tuple(sel)] = arr[tuple(sel)]
    return QuantumState(state.layout, kept.reshape(-1) / math.sqrt(prob))


def measure_register(
    state: QuantumState, reg: str, rng: int | np.random.Generator
) -> tuple[int, QuantumState, float]:
    """Measure one register in the computational basis.

    Returns (outcome, post-measurement state, exact Born probability of the
    drawn outcome).  The draw uses inverse-CDF sampling from the marginal;
    the reported probability is the exact marginal, not an estimate.
    """
    gen = np.random.default_rng(rng)
    axis = state.layout.axis(reg)
    probs = register_probabilities(state, reg)
    cdf = np.cumsum(probs / probs.sum())
    outcome = int(np.searchsorted(cdf, gen.random(), side="right"))
    outcome = min(outcome, probs.size - 1)
    prob = float(probs[outcome])
    return outcome, _project(state, axis, outcome, prob), prob


def postselect(state: QuantumState, reg: str, outcome: int) -> tuple[QuantumState, float]:
    """Project one register onto a basis outcome and renormalize.

    Returns (projected state, branch probability).  Raises ZeroBranch when
    the branch probability is numerically zero.
    """
    axis = state.layout.axis(reg)
    dim = state.layout.dims[axis]
    if not 0 <= outcome < dim:
        raise ValueError(f"outcome {outcome} outside register of dim {dim}")
    probs = register_probabilities(state, reg)
    prob = float(probs[outcome])
    return _project(state, axis, outcome, prob), prob
