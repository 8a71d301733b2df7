"""Least-squares SVM trained on estimated kernel matrices.

Training solves the dense saddle system

    [ 0   1^T ] [ b     ]   [ 0 ]
    [ 1   K + I/gamma ] [ alpha ] = [ y ]

by LU factorization.  Prediction scores a point as
sum_i alpha_i k(x_i, x) + b, with kernel values estimated through the same
backend machinery used for training.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from . import qram
from .errors import InvalidLabels, SingularSystem
from .estimator import EstimatorConfig, derive_pair_config
from .kernels import KernelSpec, kernel_matrix, quantum_gaussian_kernel, quantum_poly_kernel
from .qram import QramStore

# A pivot of the LU factor below this magnitude counts as singular.
PIVOT_TOL = 1e-12
# Scores inside this band around zero resolve to the +1 class.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class LabeledDataset:
    """Row vectors with +1/-1 labels."""

    vectors: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        vectors = np.array(self.vectors, dtype=np.float64)
        labels = np.array(self.labels)
        if vectors.ndim != 2 or labels.ndim != 1 or vectors.shape[0] != labels.shape[0]:
            raise ValueError(
                f"shape mismatch: vectors {vectors.shape} vs labels {labels.shape}"
            )
        if labels.size and not np.all(np.isin(labels, (-1, 1))):
            raise InvalidLabels("labels must be exactly +1 or -1")
        labels = labels.astype(np.int64)
        vectors.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return self.vectors.shape[0]


def solve_lssvm(k_matrix: np.ndarray, labels: np.ndarray, gamma: float) -> tuple[np.ndarray, float]:
    """Solve the saddle system for (alphas, bias).  Raises SingularSystem."""
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    m = len(labels)
    system = np.zeros((m + 1, m + 1), dtype=np.float64)
    system[0, 1:] = 1.0
    system[1:, 0] = 1.0
    system[1:, 1:] = k_matrix + np.eye(m) / gamma
    rhs = np.concatenate([[0.0], np.asarray(labels, dtype=np.float64)])
    with warnings.catch_warnings():
        # Pivots are checked explicitly below; scipy's own singularity
        # warning would just duplicate the SingularSystem signal.
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(system)
    if float(np.abs(np.diag(lu)).min()) < PIVOT_TOL:
        raise SingularSystem("training system is singular within pivot tolerance")
    solution = scipy.linalg.lu_solve((lu, piv), rhs)
    return solution[1:], float(solution[0])


@dataclass(frozen=True)
class LSSVMModel:
    """Trained coefficients plus everything needed to score new points."""

    alphas: np.ndarray
    bias: float
    gamma: float
    spec: KernelSpec
    vectors: np.ndarray
    labels: np.ndarray


def train(
    data: LabeledDataset,
    spec: KernelSpec,
    cfg: EstimatorConfig,
    gamma: float,
    psd_repair: bool = True,
    threads: int = 1,
) -> tuple[LSSVMModel, dict]:
    """Train on an estimated Gram matrix; returns the model and the Gram report."""
    if data.m < 2:
        raise InvalidLabels(f"need at least 2 training rows, got {data.m}")
    if np.unique(data.labels).size < 2:
        raise InvalidLabels("training set contains a single class")
    store = qram.load_dataset(data.vectors)
    k_matrix, report = kernel_matrix(
        store, spec, cfg, psd_repair=psd_repair, threads=threads
    )
    alphas, bias = solve_lssvm(k_matrix, data.labels, gamma)
    model = LSSVMModel(
        alphas=alphas,
        bias=bias,
        gamma=gamma,
        spec=spec,
        vectors=data.vectors,
        labels=data.labels,
    )
    return model, report


def _cross_kernel_row(
    store: QramStore, t: int, m_train: int, spec: KernelSpec, cfg: EstimatorConfig
) -> np.ndarray:
    row = np.empty(m_train, dtype=np.float64)
    for i in range(m_train):
        cfg_pair = derive_pair_config(cfg, i, m_train + t)
        if spec.family == "gaussian":
            res = quantum_gaussian_kernel(store, i, m_train + t, spec, cfg_pair)
        else:
            degree = spec.degree if spec.family == "polynomial" else 1
            res = quantum_poly_kernel(store, i, m_train + t, degree, cfg_pair)
        row[i] = res.value
    return row


def decision_scores(model: LSSVMModel, points: np.ndarray, cfg: EstimatorConfig) -> np.ndarray:
    """Decision values for a batch of points (one estimated kernel row each)."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[None, :]
    if points.shape[1] != model.vectors.shape[1]:
        raise ValueError(
            f"point dim {points.shape[1]} does not match training dim {model.vectors.shape[1]}"
        )
    m_train = model.vectors.shape[0]
    store = qram.load_dataset(np.vstack([model.vectors, points]))
    scores = np.empty(points.shape[0], dtype=np.float64)
    for t in range(points.shape[0]):
        row = _cross_kernel_row(store, t, m_train, model.spec, cfg)
        scores[t] = float(row @ model.alphas + model.bias)
    return scores


def labels_from_scores(scores: np.ndarray) -> np.ndarray:
    """Class labels from decision scores; ties within 1e-12 resolve to +1."""
    scores = np.atleast_1d(np.asarray(scores, dtype=np.float64))
    return np.where(scores < -TIE_TOL, -1, 1).astype(np.int64)


def predict(model: LSSVMModel, x: np.ndarray, cfg: EstimatorConfig) -> tuple[float, int]:
    """Score one point and classify it."""
    score = float(decision_scores(model, np.asarray(x), cfg)[0])
    return score, int(labels_from_scores(score)[0])


def predict_batch(model: LSSVMModel, points: np.ndarray, cfg: EstimatorConfig) -> np.ndarray:
    """Labels for a batch of points."""
    return labels_from_scores(decision_scores(model, points, cfg))


def evaluate(
    model: LSSVMModel, data: LabeledDataset, cfg: EstimatorConfig
) -> tuple[float, np.ndarray]:
    """Accuracy and confusion matrix [[tn, fp], [fn, tp]] with -1 as negative."""
    predicted = predict_batch(model, data.vectors, cfg)
    actual = data.labels
    tn = int(np.sum((actual == -1) & (predicted == -1)))
    fp = int(np.sum((actual == -1) & (predicted == 1)))
    fn = int(np.sum((actual == 1) & (predicted == -1)))
    tp = int(np.sum((actual == 1) & (predicted == 1)))
    accuracy = (tn + tp) / actual.size if actual.size else 0.0
    return float(accuracy), np.array([[tn, fp], [fn, tp]], dtype=np.int64)


def save_model(model: LSSVMModel, path: str | Path) -> None:
    """Serialize a model to JSON (coefficients, kernel spec, training data)."""
    payload = {
        "alphas": model.alphas.tolist(),
        "bias": model.bias,
        "gamma": model.gamma,
        "kernel": model.spec.to_dict(),
        "vectors": model.vectors.tolist(),
        "labels": model.labels.tolist(),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def load_model(path: str | Path) -> LSSVMModel:
    payload = json.loads(Path(path).read_text())
    return LSSVMModel(
        alphas=np.asarray(payload["alphas"], dtype=np.float64),
        bias=float(payload["bias"]),
        gamma=float(payload["gamma"]),
        spec=KernelSpec.from_dict(payload["kernel"]),
        vectors=np.asarray(payload["vectors"], dtype=np.float64),
        labels=np.asarray(payload["labels"], dtype=np.int64),
    )
