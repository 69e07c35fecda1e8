"""Description-length accounting for a clustering.

Total cost of encoding the data under a centroid model, in nats:

* model cost  k * d * m, with m the per-coordinate precision cost,
* index cost  n * ln(k), the cluster membership of every point,
* residual cost  (n * d * ln(2 pi) + sum of squared residuals) / 2, each
  point's displacement from its centroid under a unit-variance Gaussian code.

``split_delta`` and ``merge_delta`` are the exact total-cost changes of the
corresponding move, so performing a move with a negative delta is guaranteed
to lower the total. The residual constant n*d*ln(2 pi)/2 is kept (it cancels
in deltas but makes reported totals comparable across runs).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _core
from .dataset import Dataset, PrecisionInfo

_LN_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class MdlBreakdown:
    """Total description length and its three components, in nats."""

    model_cost: float
    index_cost: float
    residual_cost: float
    total: float


def total_ss(points) -> float:
    """Sum of squared Euclidean distances of a point set to its own mean.

    Equals |S| times the trace of the population covariance; 0 for a
    singleton set. The set must be nonempty.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] == 0:
        raise ValueError("total_ss of an empty set is undefined")
    diff = pts - pts.mean(axis=0)
    return float(np.einsum("ij,ij->", diff, diff))


def mdl_cost(data: Dataset, centroids, assignments, precision: PrecisionInfo) -> MdlBreakdown:
    """Exact description length of a clustering of ``data``.

    ``centroids`` is k-by-d, ``assignments`` maps each point to a centroid
    row. Raises if any assignment index is out of range.
    """
    centroids = np.asarray(centroids, dtype=np.float64)
    assignments = np.asarray(assignments, dtype=np.int64)
    k, d = centroids.shape
    n = data.n
    if k < 1:
        raise ValueError("need at least one cluster")
    if assignments.shape != (n,):
        raise ValueError(f"assignments shape {assignments.shape} does not match n={n}")
    if assignments.min() < 0 or assignments.max() >= k:
        raise ValueError(f"assignment index out of range for k={k}")
    residual_ss = float(_core.per_label_ss(data.points, centroids, assignments, k).sum())
    model = k * d * precision.bits_per_coord
    index = n * math.log(k)
    residual = (n * d * _LN_2PI + residual_ss) / 2.0
    return MdlBreakdown(model_cost=model, index_cost=index, residual_cost=residual,
                        total=model + index + residual)


def split_delta(parent_ss, sub1_ss, sub2_ss, k, n_total, precision: PrecisionInfo, d) -> float:
    """Exact total-cost change of replacing one cluster with its two subclusters.

    ``k`` is the cluster count before the split. Negative means splitting
    lowers the total description length.
    """
    return (
        d * precision.bits_per_coord
        + n_total * (math.log(k + 1) - math.log(k))
        - (parent_ss - sub1_ss - sub2_ss) / 2.0
    )


def merge_delta(merged_ss, c1_ss, c2_ss, k, n_total, precision: PrecisionInfo, d) -> float:
    """Exact total-cost change of replacing two clusters with their union.

    ``k`` is the cluster count before the merge (at least 2). Negative means
    merging lowers the total description length.
    """
    if k < 2:
        raise ValueError("merge requires at least two clusters")
    return (
        (merged_ss - c1_ss - c2_ss) / 2.0
        - n_total * (math.log(k) - math.log(k - 1))
        - d * precision.bits_per_coord
    )
