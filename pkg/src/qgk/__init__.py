"""Simulated quantum estimation of Gaussian and polynomial kernels.

Classical vectors are amplitude-encoded through a simulated QRAM; pairwise
norms, distances, and dot products come out of a two-stage swap-test
protocol with exact, sampling, and amplitude-estimation-model backends.
On top sit truncated-series Gaussian kernels, Gram assembly with PSD
repair, a least-squares SVM, and resource benchmarks.
"""

from .errors import (
    AddressOutOfRange,
    DimensionOverflow,
    InvalidLabels,
    LayoutMismatch,
    NotNormalized,
    OverflowGuard,
    QgkError,
    SingularSystem,
    TruncationTooTight,
    ZeroBranch,
    ZeroVector,
)
from .estimator import (
    EstimateResult,
    EstimatorConfig,
    estimate_distance_sq,
    estimate_dot,
    estimate_Z,
)
from .kernels import (
    KernelSpec,
    TruncationPlan,
    classical_gaussian_kernel,
    classical_poly_kernel,
    classical_x_bound,
    exp_partial_sum,
    kernel_matrix,
    quantum_gaussian_kernel,
    quantum_poly_kernel,
    truncation_order,
)
from .qram import QramStore, QueryCounter, load_dataset
from .statevec import QuantumState, RegisterLayout, amplitude_encode
from .svm import LabeledDataset, LSSVMModel, evaluate, predict, train

__version__ = "0.1.0"

__all__ = [
    "AddressOutOfRange",
    "DimensionOverflow",
    "EstimateResult",
    "EstimatorConfig",
    "InvalidLabels",
    "KernelSpec",
    "LabeledDataset",
    "LayoutMismatch",
    "LSSVMModel",
    "NotNormalized",
    "OverflowGuard",
    "QgkError",
    "QramStore",
    "QuantumState",
    "QueryCounter",
    "RegisterLayout",
    "SingularSystem",
    "TruncationPlan",
    "TruncationTooTight",
    "ZeroBranch",
    "ZeroVector",
    "amplitude_encode",
    "classical_gaussian_kernel",
    "classical_poly_kernel",
    "classical_x_bound",
    "estimate_Z",
    "exp_partial_sum",
    "estimate_distance_sq",
    "estimate_dot",
    "evaluate",
    "kernel_matrix",
    "load_dataset",
    "predict",
    "quantum_gaussian_kernel",
    "quantum_poly_kernel",
    "train",
    "truncation_order",
]
