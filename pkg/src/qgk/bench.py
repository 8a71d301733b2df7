"""Resource-growth series, error-scaling experiments, and cost conformance.

The growth series compare the classical cost proxy N^d / d! of a degree-d
tensor feature map against the quantum proxy d log2(N) / d!; the classical
one peaks near d = N before the factorial wins, while the quantum one
decays almost immediately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qram
from .estimator import (
    PAIR_QUERIES_PER_SHOT,
    Z_QUERIES_PER_SHOT,
    EstimateResult,
    EstimatorConfig,
    estimate_distance_sq,
    estimate_dot,
    estimate_Z,
)
from .kernels import quantum_poly_kernel
from .qram import QramStore

# A series value below this fraction of the series maximum counts as vanished.
VANISH_FRACTION = 1e-3
# Below this plateau the scaling fit is meaningless (exact backend).
DEGENERATE_RMSE = 1e-10


@dataclass(frozen=True)
class GrowthSeries:
    """One cost-proxy series over degrees d = 1..d_max."""

    kind: str
    n_dim: int
    degrees: np.ndarray
    values: np.ndarray
    log10_values: np.ndarray
    peak_d: int
    vanish_d: int | None


def _series(kind: str, n_dim: int, d_max: int, log_term) -> GrowthSeries:
    if n_dim < 2:
        raise ValueError(f"n_dim must be >= 2, got {n_dim}")
    if d_max < 1:
        raise ValueError(f"d_max must be >= 1, got {d_max}")
    degrees = np.arange(1, d_max + 1)
    logs = np.array([log_term(int(d)) for d in degrees])
    with np.errstate(over="ignore"):
        values = np.power(10.0, logs)
    peak_idx = int(np.argmax(logs))
    vanish_threshold = logs[peak_idx] + math.log10(VANISH_FRACTION)
    below = np.flatnonzero(logs < vanish_threshold)
    vanish_d = int(degrees[below[0]]) if below.size else None
    return GrowthSeries(
        kind=kind,
        n_dim=n_dim,
        degrees=degrees,
        values=values,
        log10_values=logs,
        peak_d=int(degrees[peak_idx]),
        vanish_d=vanish_d,
    )


def classical_growth(n_dim: int, d_max: int = 40) -> GrowthSeries:
    """N^d / d! in log10 form (raw values overflow to inf where needed)."""
    ln10 = math.log(10.0)

    def log_term(d: int) -> float:
        return (d * math.log(n_dim) - math.lgamma(d + 1)) / ln10

    return _series("classical", n_dim, d_max, log_term)


def quantum_growth(n_dim: int, d_max: int = 30) -> GrowthSeries:
    """d log2(N) / d! in log10 form."""
    ln10 = math.log(10.0)

    def log_term(d: int) -> float:
        return (math.log(d * math.log2(n_dim)) - math.lgamma(d + 1)) / ln10

    return _series("quantum", n_dim, d_max, log_term)


@dataclass(frozen=True)
class ScalingFit:
    """Log-log fit of RMSE against shots for one backend."""

    backend: str
    shots: np.ndarray
    rmse: np.ndarray
    slope: float
    intercept: float
    r2: float
    degenerate: bool


def scaling_experiment(
    store: QramStore,
    pair: tuple[int, int],
    backend: str,
    shot_grid: tuple[int, ...] = (100, 1000, 10000),
    n_seeds: int = 100,
    base_seed: int = 0,
    theta: float = 0.05,
) -> ScalingFit:
    """RMSE of the dot estimate over seeds, per shot budget, with a power fit.

    The exact backend plateaus at float precision; the fit is then flagged
    degenerate with slope 0.
    """
    i, j = pair
    truth = float(np.dot(store.vectors[i], store.vectors[j]))
    shots_arr = np.asarray(shot_grid, dtype=np.int64)
    rmse = np.empty(len(shots_arr), dtype=np.float64)
    for gi, shots in enumerate(shots_arr):
        errs = np.empty(n_seeds, dtype=np.float64)
        for k in range(n_seeds):
            seed = int(
                np.random.SeedSequence(
                    entropy=int(base_seed), spawn_key=(int(gi), int(k))
                ).generate_state(1, dtype=np.uint64)[0]
            )
            cfg = EstimatorConfig(backend=backend, shots=int(shots), theta=theta, seed=seed)
            errs[k] = estimate_dot(store, i, j, cfg).value - truth
        rmse[gi] = float(np.sqrt(np.mean(errs ** 2)))
    if float(rmse.max()) < DEGENERATE_RMSE:
        return ScalingFit(backend, shots_arr, rmse, 0.0, 0.0, 0.0, True)
    slope, intercept = np.polyfit(np.log10(shots_arr), np.log10(rmse), 1)
    fitted = slope * np.log10(shots_arr) + intercept
    resid = np.log10(rmse) - fitted
    total = np.log10(rmse) - np.log10(rmse).mean()
    ss_tot = float(total @ total)
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0.0 else 1.0
    return ScalingFit(
        backend, shots_arr, rmse, float(slope), float(intercept), min(max(r2, 0.0), 1.0), False
    )


@dataclass(frozen=True)
class CostEntry:
    """One estimate with the cost parameters its footprint must match."""

    label: str
    n_dim: int
    queries_per_shot: int
    result: EstimateResult
    step_multiplier: int = 1


def cost_report(entries: list[CostEntry]) -> tuple[list[dict], bool]:
    """Check each entry's footprint against queries_per_shot x shots x steps."""
    rows = []
    all_match = True
    for entry in entries:
        res = entry.result
        predicted_queries = entry.queries_per_shot * res.shots_used
        predicted_steps = predicted_queries * entry.step_multiplier * qram.step_cost(entry.n_dim)
        match = (
            res.qram_queries == predicted_queries and res.total_steps == predicted_steps
        )
        all_match = all_match and match
        rows.append(
            {
                "label": entry.label,
                "n_dim": entry.n_dim,
                "shots": res.shots_used,
                "queries_per_shot": entry.queries_per_shot,
                "qram_queries": res.qram_queries,
                "total_steps": res.total_steps,
                "predicted_queries": predicted_queries,
                "predicted_steps": predicted_steps,
                "match": match,
            }
        )
    return rows, all_match


def run_cost_experiment(
    store: QramStore, cfg: EstimatorConfig, pair: tuple[int, int] = (0, 1), tensor_degree: int = 2
) -> list[CostEntry]:
    """Canned cost-conformance run over the main estimate kinds."""
    i, j = pair
    n = store.n_dim
    entries = [
        CostEntry("estimate_Z", n, Z_QUERIES_PER_SHOT, estimate_Z(store, i, j, cfg)),
        CostEntry(
            "estimate_distance_sq",
            n,
            PAIR_QUERIES_PER_SHOT,
            estimate_distance_sq(store, i, j, cfg),
        ),
        CostEntry("estimate_dot", n, PAIR_QUERIES_PER_SHOT, estimate_dot(store, i, j, cfg)),
        CostEntry(
            "poly_power_d2",
            n,
            PAIR_QUERIES_PER_SHOT,
            quantum_poly_kernel(store, i, j, 2, cfg, mode="power"),
        ),
        CostEntry(
            f"poly_tensor_d{tensor_degree}",
            n,
            PAIR_QUERIES_PER_SHOT,
            quantum_poly_kernel(store, i, j, tensor_degree, cfg, mode="tensor_state"),
            step_multiplier=tensor_degree,
        ),
    ]
    return entries
