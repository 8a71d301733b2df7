"""LS-SVM tests: the saddle solve, training, prediction, serialization."""

import numpy as np
import pytest

from oracles import gaussian_gram, lssvm_residual
from qgk import EstimatorConfig, KernelSpec, LabeledDataset, evaluate, predict, train
from qgk.data import xor_dataset
from qgk.errors import InvalidLabels, SingularSystem
from qgk.svm import (
    LSSVMModel,
    decision_scores,
    labels_from_scores,
    load_model,
    predict_batch,
    save_model,
    solve_lssvm,
)


EXACT = EstimatorConfig(backend="exact")
GAUSS = KernelSpec.gaussian(1.0)


def xor_labeled():
    return xor_dataset()


def random_labeled(seed, m, n):
    rng = np.random.default_rng(seed)
    vectors = rng.uniform(-1.0, 1.0, size=(m, n))
    vectors[np.linalg.norm(vectors, axis=1) < 1e-3] += 0.5
    labels = np.where(np.arange(m) % 2 == 0, 1, -1)
    return LabeledDataset(vectors, labels)


# ------------------------------------------------------------------- types


def test_labeled_dataset_rejects_bad_labels():
    with pytest.raises(InvalidLabels):
        LabeledDataset([[1.0, 0.0]], [0])
    with pytest.raises(InvalidLabels):
        LabeledDataset([[1.0, 0.0], [0.0, 1.0]], [1, 2])


def test_labeled_dataset_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        LabeledDataset([[1.0, 0.0], [0.0, 1.0]], [1])
    with pytest.raises(ValueError):
        LabeledDataset([1.0, 0.0], [1, -1])


def test_labeled_dataset_is_frozen():
    data = LabeledDataset([[1.0, 0.0], [0.0, 1.0]], [1, -1])
    assert data.m == 2
    with pytest.raises(ValueError):
        data.vectors[0, 0] = 5.0
    with pytest.raises(ValueError):
        data.labels[0] = -1


# -------------------------------------------------------------- the solve


def test_solve_identity_kernel_two_points():
    labels = np.array([1, -1])
    alphas, bias = solve_lssvm(np.eye(2), labels, gamma=10.0)
    assert alphas[0] == pytest.approx(10.0 / 11.0, abs=1e-12)
    assert alphas[1] == pytest.approx(-10.0 / 11.0, abs=1e-12)
    assert bias == pytest.approx(0.0, abs=1e-12)
    # In the hard-margin limit alpha approaches (y1 - y2)/2 * (1, -1).
    alphas_inf, _ = solve_lssvm(np.eye(2), labels, gamma=1e12)
    assert alphas_inf[0] == pytest.approx(1.0, abs=1e-9)


def test_solve_residual_on_random_gram():
    rng = np.random.default_rng(40)
    vectors = rng.uniform(-1.0, 1.0, size=(7, 3))
    k_matrix = gaussian_gram(vectors, 0.8)
    labels = rng.choice([-1, 1], size=7)
    labels[0], labels[1] = 1, -1  # keep both classes present
    alphas, bias = solve_lssvm(k_matrix, labels, gamma=5.0)
    assert lssvm_residual(k_matrix, labels, 5.0, alphas, bias) < 1e-8
    assert abs(alphas.sum()) < 1e-8


def test_solve_singular_kernel_raises():
    k_matrix = np.ones((2, 2))
    with pytest.raises(SingularSystem):
        solve_lssvm(k_matrix, np.array([1, -1]), gamma=1e16)


def test_solve_rejects_bad_gamma():
    with pytest.raises(ValueError):
        solve_lssvm(np.eye(2), np.array([1, -1]), gamma=0.0)


# ---------------------------------------------------------------- training


def test_train_xor_exact_classifies_all_points():
    data = xor_labeled()
    model, report = train(data, GAUSS, EXACT, gamma=10.0)
    assert report["pairs"] == 6
    assert abs(model.alphas.sum()) < 1e-8
    for x, y in zip(data.vectors, data.labels):
        _, label = predict(model, x, EXACT)
        assert label == y


def test_train_solution_satisfies_system():
    data = xor_labeled()
    model, _ = train(data, GAUSS, EXACT, gamma=10.0)
    k_matrix = gaussian_gram(data.vectors, 1.0)
    assert lssvm_residual(k_matrix, data.labels, 10.0, model.alphas, model.bias) < 1e-8


def test_train_input_validation():
    with pytest.raises(InvalidLabels):
        train(LabeledDataset([[1.0, 0.0]], [1]), GAUSS, EXACT, gamma=1.0)
    same_class = LabeledDataset([[1.0, 0.0], [0.0, 1.0]], [1, 1])
    with pytest.raises(InvalidLabels):
        train(same_class, GAUSS, EXACT, gamma=1.0)


def test_train_matches_classical_gram_solve():
    """Exact-backend training equals solving against the classical Gram."""
    data = random_labeled(15, 6, 3)
    model, _ = train(data, KernelSpec.gaussian(0.9), EXACT, gamma=4.0)
    k_classical = gaussian_gram(data.vectors, 0.9)
    alphas, bias = solve_lssvm(k_classical, data.labels, 4.0)
    assert np.max(np.abs(model.alphas - alphas)) < 1e-9
    assert abs(model.bias - bias) < 1e-9
    predicted = predict_batch(model, data.vectors, EXACT)
    scores = k_classical @ alphas + bias
    assert np.array_equal(predicted, labels_from_scores(scores))


def test_train_determinism_and_seed_sensitivity():
    data = random_labeled(16, 5, 2)
    cfg = EstimatorConfig(backend="sampling", shots=500, seed=3)
    m1, _ = train(data, GAUSS, cfg, gamma=2.0)
    m2, _ = train(data, GAUSS, cfg, gamma=2.0)
    assert np.array_equal(m1.alphas, m2.alphas) and m1.bias == m2.bias
    m3, _ = train(data, GAUSS, EstimatorConfig(backend="sampling", shots=500, seed=4), gamma=2.0)
    assert not np.array_equal(m1.alphas, m3.alphas)


# -------------------------------------------------------------- prediction


def test_predict_scores_match_manual_sum():
    data = random_labeled(15, 5, 3)
    sigma = 0.8
    model, _ = train(data, KernelSpec.gaussian(sigma), EXACT, gamma=3.0)
    rng = np.random.default_rng(99)
    for _ in range(3):
        x = rng.uniform(-1.0, 1.0, size=3)
        diffs = data.vectors - x
        kernel_row = np.exp(-np.sum(diffs * diffs, axis=1) / (2.0 * sigma * sigma))
        want = float(kernel_row @ model.alphas + model.bias)
        score, label = predict(model, x, EXACT)
        assert score == pytest.approx(want, abs=1e-10)
        assert label == (1 if score >= 0 else -1)


def test_predict_invariant_to_training_permutation():
    data = random_labeled(17, 6, 2)
    perm = np.array([3, 0, 5, 1, 4, 2])
    permuted = LabeledDataset(data.vectors[perm], data.labels[perm])
    m1, _ = train(data, GAUSS, EXACT, gamma=5.0)
    m2, _ = train(permuted, GAUSS, EXACT, gamma=5.0)
    probes = np.array([[0.2, -0.4], [-0.7, 0.1], [0.9, 0.9]])
    s1 = decision_scores(m1, probes, EXACT)
    s2 = decision_scores(m2, probes, EXACT)
    assert np.max(np.abs(s1 - s2)) < 1e-9


def test_predict_dimension_check():
    model, _ = train(xor_labeled(), GAUSS, EXACT, gamma=10.0)
    with pytest.raises(ValueError):
        predict(model, np.array([1.0, 1.0, 1.0]), EXACT)


def test_zero_alpha_model_ties_to_plus_one():
    model = LSSVMModel(
        alphas=np.zeros(2),
        bias=0.0,
        gamma=1.0,
        spec=GAUSS,
        vectors=np.array([[1.0, 0.0], [0.0, 1.0]]),
        labels=np.array([1, -1]),
    )
    score, label = predict(model, np.array([0.3, 0.3]), EXACT)
    assert score == 0.0
    assert label == 1


def test_labels_from_scores_tie_band():
    scores = np.array([-1e-13, 0.0, 1e-13, -1e-9, 2.0])
    assert labels_from_scores(scores).tolist() == [1, 1, 1, -1, 1]


# -------------------------------------------------------------- evaluation


def test_evaluate_training_set_and_label_flip():
    data = xor_labeled()
    model, _ = train(data, GAUSS, EXACT, gamma=10.0)
    accuracy, confusion = evaluate(model, data, EXACT)
    assert accuracy == 1.0
    assert confusion.tolist() == [[2, 0], [0, 2]]
    flipped = LabeledDataset(data.vectors, -data.labels)
    flipped_accuracy, flipped_confusion = evaluate(model, flipped, EXACT)
    assert flipped_accuracy == pytest.approx(1.0 - accuracy)
    assert flipped_confusion.sum() == 4


def test_evaluate_confusion_counts_sum_to_size():
    data = random_labeled(22, 6, 3)
    model, _ = train(data, GAUSS, EXACT, gamma=2.0)
    _, confusion = evaluate(model, data, EXACT)
    assert int(confusion.sum()) == data.m


# ------------------------------------------------------------ serialization


def test_model_roundtrip(tmp_path):
    data = xor_labeled()
    model, _ = train(data, KernelSpec.gaussian(1.0, precision_q=8), EXACT, gamma=10.0)
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    assert np.allclose(loaded.alphas, model.alphas, atol=0)
    assert loaded.bias == model.bias
    assert loaded.gamma == model.gamma
    assert loaded.spec == model.spec
    assert np.array_equal(loaded.vectors, model.vectors)
    assert np.array_equal(loaded.labels, model.labels)
    for x, y in zip(data.vectors, data.labels):
        _, label = predict(loaded, x, EXACT)
        assert label == y


# ---------------------------------------------------------- noise behavior


def test_xor_training_robust_to_sampling_noise():
    """Shot noise at 1e4 shots rarely flips any XOR training prediction."""
    data = xor_labeled()
    hits = 0
    for seed in range(20):
        cfg = EstimatorConfig(backend="sampling", shots=10_000, seed=seed)
        model, _ = train(data, GAUSS, cfg, gamma=10.0)
        predicted = predict_batch(model, data.vectors, cfg)
        hits += int(np.array_equal(predicted, data.labels))
    assert hits >= 17
