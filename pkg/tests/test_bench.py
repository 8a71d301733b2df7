"""Benchmark-layer tests: growth series, scaling fits, cost conformance."""

import math

import numpy as np
import pytest

from qgk import EstimateResult, EstimatorConfig, load_dataset
from qgk.bench import (
    CostEntry,
    classical_growth,
    cost_report,
    quantum_growth,
    run_cost_experiment,
    scaling_experiment,
)


def pair_store(seed=11, m=4, n=4):
    rng = np.random.default_rng(seed)
    return load_dataset(rng.uniform(-1.0, 1.0, size=(m, n)))


# ------------------------------------------------------------ growth series


def test_classical_growth_matches_direct_terms():
    series = classical_growth(10, d_max=20)
    assert series.values[0] == pytest.approx(10.0, rel=1e-12)
    for d in series.degrees:
        want = 10.0 ** d / math.factorial(int(d))
        assert series.values[d - 1] == pytest.approx(want, rel=1e-10)


def test_classical_growth_peak_at_n10():
    series = classical_growth(10, d_max=40)
    assert series.peak_d in (9, 10)
    # 10^10/10! equals 10^9/9!, so the two top terms tie.
    assert series.values[8] == pytest.approx(series.values[9], rel=1e-12)


def test_classical_growth_unimodal():
    series = classical_growth(10, d_max=40)
    diffs = np.diff(series.log10_values)
    # The d = 9 -> 10 step ties exactly; skip flat steps when counting flips.
    signs = np.sign(diffs[np.abs(diffs) > 1e-12])
    flips = np.count_nonzero(signs[:-1] != signs[1:])
    assert flips == 1
    # Ratio test: consecutive terms scale by N/(d+1).
    for d in range(1, 15):
        ratio = series.values[d] / series.values[d - 1]
        assert ratio == pytest.approx(10.0 / (d + 1), rel=1e-9)


def test_quantum_growth_first_term_and_vanish():
    series = quantum_growth(10, d_max=30)
    assert series.values[0] == pytest.approx(math.log2(10), rel=1e-12)
    assert np.all(series.values >= 0.0)
    assert series.vanish_d == 8


def test_quantum_growth_sum_identity():
    # sum_d d x / d! = e x, so partial sums converge there fast.
    for n_dim in (7, 10):
        series = quantum_growth(n_dim, d_max=20)
        total = float(series.values.sum())
        assert total == pytest.approx(math.e * math.log2(n_dim), abs=1e-12)


def test_classical_growth_huge_n_stays_finite_in_log_space():
    series = classical_growth(10 ** 6, d_max=100)
    assert np.all(np.isfinite(series.log10_values))
    assert np.isinf(series.values).any()
    assert series.peak_d == int(series.degrees[np.argmax(series.log10_values)])


def test_growth_input_checks():
    with pytest.raises(ValueError):
        classical_growth(1)
    with pytest.raises(ValueError):
        quantum_growth(10, d_max=0)


# ------------------------------------------------------------- scaling fits


def test_scaling_exact_backend_degenerate():
    fit = scaling_experiment(pair_store(), (0, 1), "exact", n_seeds=5)
    assert fit.degenerate
    assert fit.slope == 0.0
    assert np.all(fit.rmse < 1e-10)


def test_scaling_sampling_slope():
    fit = scaling_experiment(pair_store(), (0, 1), "sampling", n_seeds=30)
    assert not fit.degenerate
    assert -0.65 < fit.slope < -0.35
    assert fit.r2 > 0.9
    assert np.all(np.diff(fit.rmse) < 0.0)


def test_scaling_ae_model_slope():
    fit = scaling_experiment(pair_store(), (0, 1), "ae_model", n_seeds=30)
    assert not fit.degenerate
    assert -1.1 < fit.slope < -0.9
    assert fit.r2 > 0.99


# ---------------------------------------------------------- cost conformance


def _result(shots, queries, steps):
    return EstimateResult(
        value=1.0, stderr=0.0, shots_used=shots, qram_queries=queries, total_steps=steps
    )


def test_cost_report_flags_matches_and_mismatches():
    good = CostEntry("good", 16, 3, _result(50, 150, 600))
    bad = CostEntry("bad", 16, 3, _result(50, 150, 601))
    rows, all_match = cost_report([good, bad])
    assert rows[0]["match"] and not rows[1]["match"]
    assert not all_match
    assert rows[0]["predicted_queries"] == 150
    assert rows[0]["predicted_steps"] == 600
    rows_good, all_good = cost_report([good])
    assert all_good and rows_good[0]["label"] == "good"


def test_run_cost_experiment_ae_footprints():
    store = pair_store(seed=5, m=2, n=16)
    cfg = EstimatorConfig(backend="ae_model", epsilon=0.01, seed=0)
    entries = run_cost_experiment(store, cfg)
    rows, all_match = cost_report(entries)
    assert all_match
    by_label = {row["label"]: row for row in rows}
    assert by_label["estimate_Z"]["qram_queries"] == 100
    assert by_label["estimate_Z"]["total_steps"] == 400
    assert by_label["estimate_dot"]["qram_queries"] == 300
    assert by_label["estimate_dot"]["total_steps"] == 1200
    assert by_label["poly_tensor_d2"]["total_steps"] == 2400


def test_run_cost_experiment_exact_single_shot():
    store = pair_store(seed=5, m=2, n=8)
    entries = run_cost_experiment(store, EstimatorConfig(backend="exact"))
    rows, all_match = cost_report(entries)
    assert all_match
    assert all(row["shots"] == 1 for row in rows)
