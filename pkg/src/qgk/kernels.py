"""Kernel functions: classical baselines and their estimated quantum versions.

Classical kernels operate on raw vectors.  The quantum versions work from
normalized encoded states, so the polynomial family returns powers of the
normalized overlap <x_i/|x_i| , x_j/|x_j|>; the Gaussian family uses the
estimated squared distance between the raw vectors.

The Gaussian kernel supports two evaluation modes:

- "closed_form": exp(-d2 / (2 sigma^2)) from the estimated distance.
- "series": the exponential of the estimated dot product is replaced by its
  Taylor partial sum S_m, with m chosen so the Lagrange remainder stays
  below 10^-q; the result is S_m(dot / sigma^2) * exp(-Z / (2 sigma^2)).

Gram assembly computes the upper triangle with per-pair derived seeds (so
threading cannot change values), mirrors it, forces exact unit diagonal,
and optionally repairs indefiniteness by clipping negative eigenvalues.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import qram
from .errors import OverflowGuard, TruncationTooTight
from .estimator import (
    PAIR_QUERIES_PER_SHOT,
    EstimateResult,
    EstimatorConfig,
    PairEstimate,
    _pipeline_for_state,
    derive_pair_config,
    pair_pipeline,
)
from .qram import QramStore
from .statevec import (
    DEFAULT_DIM_CAP,
    QuantumState,
    RegisterLayout,
    amplitude_encode,
    tensor_power,
)

GAUSSIAN_MODES = ("closed_form", "series")
POLY_MODES = ("power", "tensor_state")

# Hard cap on the truncation-order search.
TRUNCATION_ORDER_CAP = 500
# Eigenvalues of a Gram matrix below this count as indefinite and get clipped.
PSD_CLIP_TOL = -1e-10
# Positive floor for a clamped Gaussian kernel value.
_VALUE_FLOOR = 1e-300

_LOG10_E = math.log10(math.e)
_LN_10 = math.log(10.0)


@dataclass(frozen=True)
class KernelSpec:
    """Which kernel family to evaluate, with the family's parameters.

    family "linear" has no parameters; "polynomial" uses scale_a, offset_b
    and degree (the classical form is (A x.y + B)^d); "gaussian" uses sigma
    plus the series-mode knobs precision_q and mode.
    """

    family: str
    scale_a: float = 1.0
    offset_b: float = 0.0
    degree: int = 1
    sigma: float = 1.0
    precision_q: int = 6
    mode: str = "closed_form"

    def __post_init__(self) -> None:
        if self.family not in ("linear", "polynomial", "gaussian"):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "polynomial" and self.degree < 1:
            raise ValueError(f"polynomial degree must be >= 1, got {self.degree}")
        if self.family == "gaussian":
            if not (self.sigma > 0.0):
                raise ValueError(f"sigma must be positive, got {self.sigma}")
            if self.precision_q < 1:
                raise ValueError(f"precision_q must be >= 1, got {self.precision_q}")
            if self.mode not in GAUSSIAN_MODES:
                raise ValueError(f"unknown gaussian mode {self.mode!r}")

    @classmethod
    def linear(cls) -> KernelSpec:
        return cls(family="linear")

    @classmethod
    def polynomial(cls, degree: int, scale_a: float = 1.0, offset_b: float = 0.0) -> KernelSpec:
        return cls(family="polynomial", degree=degree, scale_a=scale_a, offset_b=offset_b)

    @classmethod
    def gaussian(cls, sigma: float, precision_q: int = 6, mode: str = "closed_form") -> KernelSpec:
        return cls(family="gaussian", sigma=sigma, precision_q=precision_q, mode=mode)

    def to_dict(self) -> dict:
        if self.family == "linear":
            return {"family": "linear"}
        if self.family == "polynomial":
            return {
                "family": "polynomial",
                "scale_a": self.scale_a,
                "offset_b": self.offset_b,
                "degree": self.degree,
            }
        return {
            "family": "gaussian",
            "sigma": self.sigma,
            "precision_q": self.precision_q,
            "mode": self.mode,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> KernelSpec:
        return cls(**payload)


@dataclass(frozen=True)
class TruncationPlan:
    """Chosen Taylor order m for exp on [-x_bound, x_bound] at 10^-q accuracy."""

    x_bound: float
    precision_q: int
    order: int
    remainder_bound: float


def truncation_order(x_bound: float, precision_q: int, cap: int = TRUNCATION_ORDER_CAP) -> TruncationPlan:
    """Smallest m with Lagrange remainder e^x_bound x_bound^(m+1)/(m+1)! < 10^-q.

    The search runs in log10 space so huge intermediate factorials cannot
    overflow.  Raises OverflowGuard when no m <= cap is small enough.
    """
    if x_bound < 0.0 or not math.isfinite(x_bound):
        raise ValueError(f"x_bound must be finite and >= 0, got {x_bound}")
    if precision_q < 1:
        raise ValueError(f"precision_q must be >= 1, got {precision_q}")
    if x_bound == 0.0:
        return TruncationPlan(x_bound, precision_q, 0, 0.0)
    for m in range(cap + 1):
        log10_rem = (
            x_bound * _LOG10_E
            + (m + 1) * math.log10(x_bound)
            - math.lgamma(m + 2) / _LN_10
        )
        if log10_rem < -precision_q:
            rem = 10.0 ** log10_rem if log10_rem > -300.0 else 0.0
            return TruncationPlan(x_bound, precision_q, m, rem)
    raise OverflowGuard(
        f"no truncation order <= {cap} reaches 10^-{precision_q} for x_bound {x_bound}"
    )


def exp_partial_sum(x: float, order: int) -> float:
    """Taylor partial sum S_m(x) = sum_{l=0}^{m} x^l / l!.

    Literal alternating sums cancel badly for large negative x; keep
    |x| modest (below roughly 30) when absolute accuracy matters.
    """
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    total = 1.0
    term = 1.0
    for l in range(1, order + 1):
        term *= x / l
        total += term
    return total


def classical_poly_kernel(
    x: np.ndarray, y: np.ndarray, degree: int, scale_a: float = 1.0, offset_b: float = 0.0
) -> float:
    """(A x.y + B)^d on raw vectors."""
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    return float((scale_a * np.dot(x, y) + offset_b) ** degree)


def classical_gaussian_kernel(x: np.ndarray, y: np.ndarray, sigma: float) -> float:
    """exp(-|x - y|^2 / (2 sigma^2)) on raw vectors."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    diff = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    return float(math.exp(-float(np.dot(diff, diff)) / (2.0 * sigma * sigma)))


def _normalized_overlap_estimate(pe: PairEstimate, u: float, v: float) -> tuple[float, float]:
    s_hat = pe.dot / (u * v)
    return s_hat, pe.dot_stderr / (u * v)


def quantum_poly_kernel(
    store: QramStore,
    i: int,
    j: int,
    degree: int,
    cfg: EstimatorConfig,
    mode: str = "power",
) -> EstimateResult:
    """Estimated <x_i/|x_i| , x_j/|x_j|>^degree.

    mode "power" estimates the base overlap once and raises it to the
    degree classically.  mode "tensor_state" runs the protocol directly on
    d-fold tensor powers of the encoded states, whose overlap already is
    the degree-th power; each query then walks d data registers, so the
    per-query step cost grows to d * ceil(log2 N).
    """
    if mode not in POLY_MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {POLY_MODES}")
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    u, v, _ = qram.norms(store, i, j)
    if mode == "power":
        pe = pair_pipeline(store, i, j, cfg)
        s_hat, s_err = _normalized_overlap_estimate(pe, u, v)
        value = s_hat ** degree
        stderr = degree * abs(s_hat) ** (degree - 1) * s_err
        return EstimateResult(
            value=float(value),
            stderr=float(stderr),
            shots_used=pe.shots,
            qram_queries=pe.qram_queries,
            total_steps=pe.total_steps,
            clamps=pe.clamps,
        )
    psi = _tensor_pair_state(store, i, j, degree)
    step_cost = degree * qram.step_cost(store.n_dim)
    pe = _pipeline_for_state(psi, 1.0, 1.0, cfg, step_cost)
    return EstimateResult(
        value=pe.dot,
        stderr=pe.dot_stderr,
        shots_used=pe.shots,
        qram_queries=pe.qram_queries,
        total_steps=pe.total_steps,
        clamps=pe.clamps,
    )


def _tensor_pair_state(store: QramStore, i: int, j: int, degree: int) -> QuantumState:
    """(|0>|a>^(x)d + |1>|b>^(x)d)/sqrt(2) for unit encodings a, b of rows i, j."""
    a = tensor_power(amplitude_encode(store.vectors[i]), degree)
    b = tensor_power(amplitude_encode(store.vectors[j]), degree)
    dim = a.layout.total_dim
    if 2 * dim > DEFAULT_DIM_CAP:
        raise OverflowGuard(f"pair state dim {2 * dim} exceeds cap {DEFAULT_DIM_CAP}")
    amps = np.concatenate([a.amps, b.amps]) / math.sqrt(2.0)
    layout = RegisterLayout((("ancilla", 2), ("data", dim)))
    return QuantumState(layout, amps)


def classical_x_bound(store: QramStore, sigma: float) -> float:
    """max over stored pairs of |x_i . x_j| / sigma^2, from the classical side."""
    gram = store.vectors @ store.vectors.T
    return float(np.abs(gram).max() / (sigma * sigma))


def _sampled_x_bound(pe: PairEstimate, sigma: float) -> float:
    return (abs(pe.dot) + 3.0 * pe.dot_stderr) / (sigma * sigma)


def _series_value(
    pe: PairEstimate, sigma: float, plan: TruncationPlan
) -> tuple[float, float, int]:
    sig2 = sigma * sigma
    arg = pe.dot / sig2
    damp = math.exp(-pe.z / (2.0 * sig2))
    value = exp_partial_sum(arg, plan.order) * damp
    slope = exp_partial_sum(arg, plan.order - 1) if plan.order >= 1 else 0.0
    stderr = math.hypot(
        slope * damp * pe.dot_stderr / sig2,
        value * pe.z_stderr / (2.0 * sig2),
    )
    clamps = 0
    if value <= 0.0:
        value = _VALUE_FLOOR
        clamps = 1
    elif value > 1.0:
        value = 1.0
    return value, abs(stderr), clamps


def quantum_gaussian_kernel(
    store: QramStore,
    i: int,
    j: int,
    spec: KernelSpec,
    cfg: EstimatorConfig,
    x_bound: float | None = None,
) -> EstimateResult:
    """Estimated exp(-|x_i - x_j|^2 / (2 sigma^2)), clamped into (0, 1].

    In series mode the truncation bound defaults to the classical dataset
    maximum of |x_i . x_j| / sigma^2 for the exact backend, and to this
    pair's |dot| + 3 stderr for the noisy backends.
    """
    if spec.family != "gaussian":
        raise ValueError(f"expected a gaussian KernelSpec, got family {spec.family!r}")
    pe = pair_pipeline(store, i, j, cfg)
    sig2 = spec.sigma * spec.sigma
    if spec.mode == "closed_form":
        value = min(math.exp(-pe.dist_sq / (2.0 * sig2)), 1.0)
        stderr = value * pe.dist_sq_stderr / (2.0 * sig2)
        return EstimateResult(
            value=value,
            stderr=stderr,
            shots_used=pe.shots,
            qram_queries=pe.qram_queries,
            total_steps=pe.total_steps,
            clamps=pe.clamps,
        )
    if x_bound is None:
        if cfg.backend == "exact":
            x_bound = classical_x_bound(store, spec.sigma)
        else:
            x_bound = _sampled_x_bound(pe, spec.sigma)
    try:
        plan = truncation_order(x_bound, spec.precision_q)
    except OverflowGuard as exc:
        raise TruncationTooTight(str(exc)) from exc
    value, stderr, extra_clamps = _series_value(pe, spec.sigma, plan)
    return EstimateResult(
        value=value,
        stderr=stderr,
        shots_used=pe.shots,
        qram_queries=pe.qram_queries,
        total_steps=pe.total_steps,
        clamps=pe.clamps + extra_clamps,
    )


def _pair_entry(
    store: QramStore, i: int, j: int, spec: KernelSpec, cfg: EstimatorConfig, poly_mode: str
) -> EstimateResult | PairEstimate:
    cfg_ij = derive_pair_config(cfg, i, j)
    if spec.family == "gaussian":
        if spec.mode == "series":
            # Series values need a dataset-wide truncation plan; return the
            # raw pipeline output and finish classically in a second pass.
            return pair_pipeline(store, i, j, cfg_ij)
        return quantum_gaussian_kernel(store, i, j, spec, cfg_ij)
    degree = spec.degree if spec.family == "polynomial" else 1
    return quantum_poly_kernel(store, i, j, degree, cfg_ij, mode=poly_mode)


def kernel_matrix(
    store: QramStore,
    spec: KernelSpec,
    cfg: EstimatorConfig,
    psd_repair: bool = True,
    threads: int = 1,
    poly_mode: str = "power",
) -> tuple[np.ndarray, dict]:
    """Estimated Gram matrix over all stored pairs, plus an assembly report.

    Entries are computed for i < j only and mirrored; the diagonal is the
    exact self-value 1 (all three families are normalized).  Per-pair seeds
    derive from (cfg.seed, i, j), so the result is independent of thread
    scheduling.  With psd_repair, eigenvalues below -1e-10 are clipped to
    zero and the matrix reassembled.

    The report carries min_eig_before, repair_applied, clipped_eigenvalues,
    total_shots, total_qram_queries, total_steps, clamps, and the series
    truncation plan when one was used.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    m = store.m
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]

    def run(pair: tuple[int, int]) -> EstimateResult | PairEstimate:
        return _pair_entry(store, pair[0], pair[1], spec, cfg, poly_mode)

    if threads == 1 or not pairs:
        raw = [run(p) for p in pairs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            raw = list(pool.map(run, pairs))

    report: dict = {}
    series = spec.family == "gaussian" and spec.mode == "series"
    if series:
        if cfg.backend == "exact":
            x_bound = classical_x_bound(store, spec.sigma)
        else:
            x_bound = max(
                (_sampled_x_bound(pe, spec.sigma) for pe in raw),
                default=classical_x_bound(store, spec.sigma),
            )
        try:
            plan = truncation_order(x_bound, spec.precision_q)
        except OverflowGuard as exc:
            raise TruncationTooTight(str(exc)) from exc
        report["truncation_order"] = plan.order
        report["truncation_x_bound"] = plan.x_bound
        report["truncation_remainder_bound"] = plan.remainder_bound

    k_matrix = np.eye(m, dtype=np.float64)
    total_shots = total_queries = total_steps = clamps = 0
    for (i, j), res in zip(pairs, raw):
        if series:
            value, _, extra = _series_value(res, spec.sigma, plan)
            clamps += res.clamps + extra
        else:
            value = res.value
            clamps += res.clamps
        k_matrix[i, j] = k_matrix[j, i] = value
        total_shots += res.shots if series else res.shots_used
        total_queries += res.qram_queries
        total_steps += res.total_steps

    min_eig = float(np.linalg.eigvalsh(k_matrix)[0]) if m > 0 else 0.0
    report.update(
        min_eig_before=min_eig,
        repair_applied=False,
        clipped_eigenvalues=0,
        total_shots=total_shots,
        total_qram_queries=total_queries,
        total_steps=total_steps,
        clamps=clamps,
        pairs=len(pairs),
    )
    if psd_repair and min_eig < PSD_CLIP_TOL:
        eigvals, eigvecs = np.linalg.eigh(k_matrix)
        bad = eigvals < PSD_CLIP_TOL
        eigvals = np.where(bad, 0.0, eigvals)
        k_matrix = (eigvecs * eigvals) @ eigvecs.T
        k_matrix = (k_matrix + k_matrix.T) / 2.0
        np.fill_diagonal(k_matrix, 1.0)
        report["repair_applied"] = True
        report["clipped_eigenvalues"] = int(bad.sum())
    return k_matrix, report
