"""Swap-test estimation of norms, distances, and dot products of stored pairs.

For a stored pair x_i, x_j with norms u = |x_i|, v = |x_j| the protocol runs
in two measured stages:

1. Norm stage.  An ancilla pair starts in |xi> = ((|0> - |1>)/sqrt(2))|0>
   and evolves for a short time t under H = (u|0><0| + v|1><1|) (x) sigma_x.
   The flag qubit then reads 1 with probability
   p1(t) = (sin^2(u t) + sin^2(v t)) / 2, and for t = theta / max(u, v) the
   small-angle inversion Z-hat = 2 p1 / t^2 recovers Z = u^2 + v^2 with
   relative bias below theta^2.  Post-selecting the flag on 1 leaves
   |phi> = (u|0> - v|1>) / sqrt(Z) up to O(t^2) corrections and a phase.

2. Overlap stage.  A swap test between |phi> and the ancilla of
   |psi> = (|0>|x_i/u> + |1>|x_j/v>)/sqrt(2) reads control 0 with
   probability P0 = (1 + <phi| rho_A |phi>)/2, and
   <phi| rho_A |phi> = |x_i - x_j|^2 / (2 Z).  So the squared distance is
   d2 = 2 Z (2 P0 - 1) and the dot product is (Z - d2)/2.

Measurement backends:

- "exact": closed-form probabilities, zero spread, shots default to 1.
- "sampling": each measured probability is a binomial draw over the shot
  budget; error falls as shots^(-1/2).  Default shots = ceil(epsilon^-2).
- "ae_model": Gaussian surrogate for amplitude estimation; the estimate is
  drawn with standard deviation value/shots, so error falls as shots^(-1).
  Default shots = ceil(epsilon^-1).

Costs are tracked per estimate: one QRAM query per shot for the norm stage,
two per shot (the pair preparation) for a standalone swap test, and three
per shot for the combined distance/dot pipeline.  Each query costs
ceil(log2 N) elementary steps.

Everything is a deterministic function of (store, indices, config): the
config seed spawns one independent stream per measured stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import qram
from .errors import LayoutMismatch, ZeroVector
from .qram import QramStore
from .statevec import QuantumState, RegisterLayout

BACKENDS = ("exact", "sampling", "ae_model")

# QRAM queries charged per shot, by estimate kind.
Z_QUERIES_PER_SHOT = 1
SWAP_QUERIES_PER_SHOT = 2
PAIR_QUERIES_PER_SHOT = 3

# Negative magnitudes smaller than this clamp silently (float dust); larger
# ones count as sampling-noise clamps in EstimateResult.clamps.
CLAMP_NOISE_TOL = 1e-12

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class EstimatorConfig:
    """Measurement backend, precision target, and seeding for one estimate.

    shots = None derives the budget from epsilon per backend; an explicit
    shot count overrides epsilon.  theta controls the norm-stage evolution
    angle: smaller theta means less bias but a weaker flag signal.
    """

    backend: str = "exact"
    epsilon: float = 0.01
    shots: int | None = None
    theta: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}, expected one of {BACKENDS}")
        if not (self.epsilon > 0.0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not (0.0 < self.theta <= 0.2):
            raise ValueError(f"theta must lie in (0, 0.2], got {self.theta}")
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")

    def resolved_shots(self) -> int:
        if self.shots is not None:
            return int(self.shots)
        if self.backend == "sampling":
            return math.ceil(self.epsilon ** -2)
        if self.backend == "ae_model":
            return math.ceil(self.epsilon ** -1)
        return 1


@dataclass(frozen=True)
class EstimateResult:
    """One estimated scalar with its spread and resource footprint."""

    value: float
    stderr: float
    shots_used: int
    qram_queries: int
    total_steps: int
    clamps: int = 0


def _spawn_rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _clamp_nonneg(value: float) -> tuple[float, int]:
    if value >= 0.0:
        return value, 0
    return 0.0, int(value < -CLAMP_NOISE_TOL)


def prep_xi() -> QuantumState:
    """Initial norm-stage state ((|0> - |1>)/sqrt(2)) (x) |0> on (norm_ancilla, flag)."""
    amps = np.array([_SQRT_HALF, 0.0, -_SQRT_HALF, 0.0], dtype=np.complex128)
    layout = RegisterLayout((("norm_ancilla", 2), ("flag", 2)))
    return QuantumState(layout, amps)


def evolve_xi(xi: QuantumState, norm_i: float, norm_j: float, t: float) -> QuantumState:
    """Evolve a (2, 2) ancilla-flag state under (u|0><0| + v|1><1|) (x) sigma_x.

    Block-diagonal in the ancilla: branch a sees the flag rotated by
    exp(-i w_a t sigma_x) with w_0 = norm_i, w_1 = norm_j.
    """
    if xi.layout.dims != (2, 2):
        raise LayoutMismatch(f"expected a (2, 2) layout, got dims {xi.layout.dims}")
    if t < 0.0:
        raise ValueError(f"evolution time must be >= 0, got {t}")
    arr = xi.amps.reshape(2, 2).copy()
    for a, w in enumerate((norm_i, norm_j)):
        c, s = math.cos(w * t), math.sin(w * t)
        rot = np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
        arr[a] = rot @ arr[a]
    return QuantumState(xi.layout, arr.reshape(-1))


def flag_one_probability(norm_i: float, norm_j: float, t: float) -> float:
    """Exact probability the evolved flag reads 1: (sin^2(ut) + sin^2(vt)) / 2."""
    return (math.sin(norm_i * t) ** 2 + math.sin(norm_j * t) ** 2) / 2.0


def choose_t(norm_i: float, norm_j: float, theta: float) -> float:
    """Evolution time keeping both rotation angles at most theta."""
    top = max(norm_i, norm_j)
    if top <= 0.0:
        raise ZeroVector("both norms are zero; nothing to estimate")
    return theta / top


def small_angle_z(norm_i: float, norm_j: float, t: float) -> float:
    """Small-angle inversion of the flag probability: Z-hat = 2 p1(t) / t^2."""
    if t <= 0.0:
        raise ValueError(f"need t > 0 to invert, got {t}")
    return 2.0 * flag_one_probability(norm_i, norm_j, t) / t ** 2


def make_phi(norm_i: float, norm_j: float) -> QuantumState:
    """Norm-carrying ancilla state (u|0> - v|1>) / sqrt(u^2 + v^2)."""
    z = norm_i * norm_i + norm_j * norm_j
    if z <= 0.0:
        raise ZeroVector("both norms are zero; phi is undefined")
    amps = np.array([norm_i, -norm_j], dtype=np.complex128) / math.sqrt(z)
    return QuantumState(RegisterLayout((("phi", 2),)), amps)


def swap_circuit_p0(psi: QuantumState, phi: QuantumState, ancilla: str = "ancilla") -> float:
    """Exact control-0 probability of a swap test.

    The circuit: control in |+>, controlled-SWAP between phi and the named
    register of psi, Hadamard on the control, then measure the control.
    """
    if len(phi.layout.registers) != 1:
        raise LayoutMismatch("phi must live on a single register")
    a_axis = psi.layout.axis(ancilla)
    a_dim = psi.layout.dims[a_axis]
    if phi.layout.total_dim != a_dim:
        raise LayoutMismatch(
            f"phi dim {phi.layout.total_dim} does not match register {ancilla!r} dim {a_dim}"
        )
    joint = np.kron(psi.amps, phi.amps).reshape(psi.layout.dims + (a_dim,))
    swapped = np.swapaxes(joint, a_axis, joint.ndim - 1)
    # Control branches after the final Hadamard; the overall 1/2 from the
    # two Hadamards sits in the probability below.
    branch0 = joint + swapped
    return float(np.sum(np.abs(branch0) ** 2)) / 4.0


def _measured_probability(
    p_true: float, cfg: EstimatorConfig, shots: int, rng: np.random.Generator | None
) -> tuple[float, float]:
    """Estimate of one probability under the configured backend."""
    if cfg.backend == "exact":
        return p_true, 0.0
    gen = rng if rng is not None else np.random.default_rng(cfg.seed)
    if cfg.backend == "sampling":
        hits = int(gen.binomial(shots, p_true))
        p_hat = hits / shots
        return p_hat, math.sqrt(p_hat * (1.0 - p_hat) / shots)
    sd = p_true / shots
    return float(gen.normal(p_true, sd)), sd


def swap_test(
    psi: QuantumState,
    phi: QuantumState,
    cfg: EstimatorConfig,
    *,
    ancilla: str = "ancilla",
    queries_per_shot: int = SWAP_QUERIES_PER_SHOT,
    step_cost: int | None = None,
    rng: np.random.Generator | None = None,
) -> EstimateResult:
    """Estimate the control-0 probability of the swap test between psi and phi.

    Cost model: each shot re-prepares psi, charging queries_per_shot QRAM
    queries.  step_cost defaults to the qubit count of psi's data register.
    """
    shots = cfg.resolved_shots()
    if step_cost is None:
        try:
            step_cost = qram.step_cost(psi.layout.dim("data"))
        except LayoutMismatch:
            step_cost = 0
    p0 = swap_circuit_p0(psi, phi, ancilla=ancilla)
    value, stderr = _measured_probability(p0, cfg, shots, rng)
    queries = queries_per_shot * shots
    return EstimateResult(
        value=value,
        stderr=stderr,
        shots_used=shots,
        qram_queries=queries,
        total_steps=queries * step_cost,
    )


def _z_from_norms(
    norm_i: float,
    norm_j: float,
    cfg: EstimatorConfig,
    step_cost: int,
    rng: np.random.Generator | None,
) -> EstimateResult:
    shots = cfg.resolved_shots()
    queries = Z_QUERIES_PER_SHOT * shots
    z_true = norm_i * norm_i + norm_j * norm_j
    clamps = 0
    if cfg.backend == "exact":
        value, stderr = z_true, 0.0
    elif cfg.backend == "sampling":
        t = choose_t(norm_i, norm_j, cfg.theta)
        p_hat, p_err = _measured_probability(
            flag_one_probability(norm_i, norm_j, t), cfg, shots, rng
        )
        value = 2.0 * p_hat / t ** 2
        stderr = 2.0 * p_err / t ** 2
    else:
        gen = rng if rng is not None else np.random.default_rng(cfg.seed)
        stderr = z_true / shots
        value, clamps = _clamp_nonneg(float(gen.normal(z_true, stderr)))
    return EstimateResult(
        value=value,
        stderr=stderr,
        shots_used=shots,
        qram_queries=queries,
        total_steps=queries * step_cost,
        clamps=clamps,
    )


def estimate_Z(store: QramStore, i: int, j: int, cfg: EstimatorConfig) -> EstimateResult:
    """Estimate Z = |x_i|^2 + |x_j|^2 through the norm-stage flag probability.

    The exact backend inverts the closed-form flag probability and lands on
    Z itself; sampling draws the flag hits binomially and inverts the
    small-angle formula, inheriting its O(theta^2) relative bias.
    """
    u, v, _ = qram.norms(store, i, j)
    (rng,) = _spawn_rngs(cfg.seed, 1)
    return _z_from_norms(u, v, cfg, qram.step_cost(store.n_dim), rng)


@dataclass(frozen=True)
class PairEstimate:
    """Joint output of the two-stage pipeline for one stored pair."""

    z: float
    z_stderr: float
    p0: float
    p0_stderr: float
    dist_sq: float
    dist_sq_stderr: float
    dot: float
    dot_stderr: float
    shots: int
    qram_queries: int
    total_steps: int
    clamps: int


def _pipeline_for_state(
    psi: QuantumState,
    norm_i: float,
    norm_j: float,
    cfg: EstimatorConfig,
    step_cost: int,
) -> PairEstimate:
    """Run both measured stages against an already-prepared pair state."""
    rng_z, rng_swap = _spawn_rngs(cfg.seed, 2)
    zres = _z_from_norms(norm_i, norm_j, cfg, step_cost, rng_z)
    phi = make_phi(norm_i, norm_j)
    p0res = swap_test(psi, phi, cfg, step_cost=step_cost, rng=rng_swap)

    z_hat, z_err = zres.value, zres.stderr
    p0_hat, p0_err = p0res.value, p0res.stderr
    overlap = 2.0 * p0_hat - 1.0
    d2_raw = 2.0 * z_hat * overlap
    d2_err = math.hypot(2.0 * overlap * z_err, 4.0 * z_hat * p0_err)
    d2, d2_clamps = _clamp_nonneg(d2_raw)
    if d2_clamps or d2_raw < 0.0:
        dot = z_hat / 2.0
        dot_err = z_err / 2.0
    else:
        # dot = Z (3 - 4 P0) / 2 once d2 is substituted in (Z - d2)/2.
        coeff = (3.0 - 4.0 * p0_hat) / 2.0
        dot = z_hat * coeff
        dot_err = math.hypot(coeff * z_err, 2.0 * z_hat * p0_err)
    return PairEstimate(
        z=z_hat,
        z_stderr=z_err,
        p0=p0_hat,
        p0_stderr=p0_err,
        dist_sq=d2,
        dist_sq_stderr=d2_err,
        dot=dot,
        dot_stderr=dot_err,
        shots=zres.shots_used,
        qram_queries=zres.qram_queries + p0res.qram_queries,
        total_steps=zres.total_steps + p0res.total_steps,
        clamps=zres.clamps + d2_clamps,
    )


def pair_pipeline(store: QramStore, i: int, j: int, cfg: EstimatorConfig) -> PairEstimate:
    """Both stages for the stored pair (i, j): 3 QRAM queries per shot."""
    u, v, _ = qram.norms(store, i, j)
    counter = store.counter()
    psi = qram.prep_psi(store, i, j, counter)
    return _pipeline_for_state(psi, u, v, cfg, counter.step_cost_per_query)


def estimate_distance_sq(
    store: QramStore, i: int, j: int, cfg: EstimatorConfig
) -> EstimateResult:
    """Estimate |x_i - x_j|^2 = 2 Z (2 P0 - 1); negative noise clamps to 0."""
    pe = pair_pipeline(store, i, j, cfg)
    return EstimateResult(
        value=pe.dist_sq,
        stderr=pe.dist_sq_stderr,
        shots_used=pe.shots,
        qram_queries=pe.qram_queries,
        total_steps=pe.total_steps,
        clamps=pe.clamps,
    )


def estimate_dot(store: QramStore, i: int, j: int, cfg: EstimatorConfig) -> EstimateResult:
    """Estimate x_i . x_j = (Z - |x_i - x_j|^2) / 2, reusing one Z estimate."""
    pe = pair_pipeline(store, i, j, cfg)
    return EstimateResult(
        value=pe.dot,
        stderr=pe.dot_stderr,
        shots_used=pe.shots,
        qram_queries=pe.qram_queries,
        total_steps=pe.total_steps,
        clamps=pe.clamps,
    )


def derive_pair_config(cfg: EstimatorConfig, i: int, j: int) -> EstimatorConfig:
    """Config with a seed stably derived from (seed, i, j); order-sensitive."""
    child = np.random.SeedSequence(entropy=int(cfg.seed), spawn_key=(int(i), int(j)))
    return replace(cfg, seed=int(child.generate_state(1, dtype=np.uint64)[0]))
