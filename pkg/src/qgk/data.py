"""Dataset ingestion, toy dataset generators, and deterministic CSV output."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .svm import LabeledDataset


def read_csv(
    path: str | Path, labeled: bool = False, has_header: bool = False
) -> tuple[np.ndarray, np.ndarray | None]:
    """Read row vectors from CSV, optionally with a trailing integer label.

    Returns (vectors, labels) where labels is None for unlabeled files.
    Raises ValueError on ragged rows, non-numeric fields, or non-integer
    labels.
    """
    rows: list[list[float]] = []
    labels: list[int] = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        for line_no, row in enumerate(reader, start=1):
            if line_no == 1 and has_header:
                continue
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                values = [float(cell) for cell in row]
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: non-numeric field ({exc})") from exc
            if labeled:
                label = values.pop()
                if label != int(label):
                    raise ValueError(f"{path}:{line_no}: label {label} is not an integer")
                labels.append(int(label))
            rows.append(values)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: ragged rows (widths {sorted(widths)})")
    vectors = np.asarray(rows, dtype=np.float64)
    return vectors, (np.asarray(labels, dtype=np.int64) if labeled else None)


def format_float(x: float) -> str:
    """17 significant digits: enough to round-trip a double exactly."""
    return format(float(x), ".17g")


def write_matrix_csv(path: str | Path, matrix: np.ndarray, comments: list[str] | None = None) -> None:
    """Write a matrix as CSV with optional '#' comment header lines."""
    lines = [f"# {c}" for c in (comments or [])]
    for row in np.atleast_2d(matrix):
        lines.append(",".join(format_float(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_table_csv(
    path: str | Path,
    columns: list[str],
    rows: list[list],
    comments: list[str] | None = None,
) -> None:
    """Write a column-named table as CSV; floats get 17 significant digits."""
    lines = [f"# {c}" for c in (comments or [])]
    lines.append(",".join(columns))
    for row in rows:
        cells = []
        for value in row:
            if isinstance(value, bool):
                cells.append(str(value).lower())
            elif isinstance(value, float):
                cells.append(format_float(value))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def xor_dataset() -> LabeledDataset:
    """The four XOR corners labeled by coordinate-product sign."""
    vectors = np.array(
        [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]], dtype=np.float64
    )
    labels = np.array([1, -1, -1, 1], dtype=np.int64)
    return LabeledDataset(vectors, labels)


def two_moons(n: int = 60, noise: float = 0.15, seed: int = 0) -> LabeledDataset:
    """Two interleaving half-circles with Gaussian noise, classes interleaved.

    The returned rows alternate classes, so any prefix split stays roughly
    balanced.
    """
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    rng = np.random.default_rng(seed)
    n_upper = (n + 1) // 2
    n_lower = n // 2
    t_upper = rng.uniform(0.0, math.pi, n_upper)
    t_lower = rng.uniform(0.0, math.pi, n_lower)
    upper = np.stack([np.cos(t_upper), np.sin(t_upper)], axis=1)
    lower = np.stack([1.0 - np.cos(t_lower), 0.5 - np.sin(t_lower)], axis=1)
    upper += rng.normal(0.0, noise, upper.shape)
    lower += rng.normal(0.0, noise, lower.shape)
    vectors = np.empty((n, 2), dtype=np.float64)
    labels = np.empty(n, dtype=np.int64)
    vectors[0::2] = upper
    labels[0::2] = 1
    vectors[1::2] = lower
    labels[1::2] = -1
    return LabeledDataset(vectors, labels)
