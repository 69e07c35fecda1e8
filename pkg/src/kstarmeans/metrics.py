"""Supervised partition-agreement metrics over a contingency table.

Conventions: accuracy is optimal one-to-one matching (assignment solver on
the zero-padded square table); the adjusted Rand index is the Hubert-Arabie
form; mutual information is normalized by the larger of the two partition
entropies, which penalizes cluster-count inflation.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class ContingencyTable:
    """Co-occurrence counts between true classes (rows) and predicted
    clusters (columns)."""

    counts: np.ndarray   # (r, c) int64
    row_sums: np.ndarray
    col_sums: np.ndarray
    n: int


def contingency(true_labels, pred_labels) -> ContingencyTable:
    """Build the co-occurrence table of two labelings of the same points."""
    true_labels = np.asarray(true_labels)
    pred_labels = np.asarray(pred_labels)
    if true_labels.shape != pred_labels.shape or true_labels.ndim != 1:
        raise ValueError(
            f"label vectors must be equal-length 1-D, got {true_labels.shape} "
            f"and {pred_labels.shape}"
        )
    if true_labels.size == 0:
        raise ValueError("label vectors are empty")
    _, ti = np.unique(true_labels, return_inverse=True)
    _, pi = np.unique(pred_labels, return_inverse=True)
    r = int(ti.max()) + 1
    c = int(pi.max()) + 1
    counts = np.zeros((r, c), dtype=np.int64)
    np.add.at(counts, (ti, pi), 1)
    return ContingencyTable(counts=counts, row_sums=counts.sum(axis=1),
                            col_sums=counts.sum(axis=0), n=int(counts.sum()))


def accuracy(table: ContingencyTable) -> float:
    """Fraction of points captured by the best one-to-one matching between
    predicted clusters and true classes."""
    r, c = table.counts.shape
    size = max(r, c)
    padded = np.zeros((size, size), dtype=np.int64)
    padded[:r, :c] = table.counts
    rows, cols = linear_sum_assignment(-padded)
    return float(padded[rows, cols].sum()) / table.n


def ari(table: ContingencyTable) -> float:
    """Adjusted Rand index in [-1, 1]; 1 for identical partitions, around 0
    for independent ones."""
    if table.n < 2:
        raise ValueError("ARI needs at least two points")
    sum_ij = _comb2(table.counts).sum()
    sum_a = _comb2(table.row_sums).sum()
    sum_b = _comb2(table.col_sums).sum()
    expected = sum_a * sum_b / _comb2(np.array([table.n]))[0]
    max_index = (sum_a + sum_b) / 2.0
    denom = max_index - expected
    if denom == 0:
        return 1.0 if _identical_partitions(table) else 0.0
    return float((sum_ij - expected) / denom)


def nmi(table: ContingencyTable) -> float:
    """Mutual information normalized by max(H(true), H(pred)), in [0, 1]."""
    n = table.n
    h_true = _entropy(table.row_sums, n)
    h_pred = _entropy(table.col_sums, n)
    if h_true == 0.0 and h_pred == 0.0:
        return 1.0  # both partitions trivial
    if h_true == 0.0 or h_pred == 0.0:
        return 0.0
    if _identical_partitions(table):
        return 1.0
    rows, cols = np.nonzero(table.counts)
    p = table.counts[rows, cols] / n
    pr = table.row_sums[rows] / n
    pc = table.col_sums[cols] / n
    mi = float(np.sum(p * np.log(p / (pr * pc))))
    value = mi / max(h_true, h_pred)
    return float(min(max(value, 0.0), 1.0))


def k_error(true_k: int, predicted_ks) -> tuple:
    """Exact-recovery fraction and mean squared error of predicted counts."""
    preds = np.asarray(list(predicted_ks), dtype=np.float64)
    if preds.size == 0:
        raise ValueError("predicted_ks is empty")
    acc = float(np.mean(preds == true_k))
    mse = float(np.mean((preds - true_k) ** 2))
    return acc, mse


def _comb2(values):
    v = values.astype(np.float64)
    return v * (v - 1.0) / 2.0


def _entropy(sums, n):
    p = sums[sums > 0] / n
    return float(-np.sum(p * np.log(p)))


def _identical_partitions(table) -> bool:
    # Identical up to relabeling: exactly one nonzero per row and per column.
    nz = table.counts > 0
    return bool(np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1))
