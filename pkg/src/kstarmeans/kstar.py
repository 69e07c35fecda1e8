"""Parameter-free centroid clustering by description-length minimization.

Starting from a single cluster, the fit cycles through assign and update
steps (applied to clusters and, independently, to a persistent two-way
subcluster partition living inside each cluster), then considers one split
per cycle and, when no split happened, one merge. A split promotes a
cluster's two subclusters to full clusters; a merge demotes the closest pair
of clusters to subclusters of their union. Moves are taken only when the
exact description-length change is negative, so the total cost never
increases and the cluster count is discovered rather than specified.
"""

import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import _core
from .dataset import Dataset, PrecisionInfo, precision_info
from .mdl import MdlBreakdown, mdl_cost, merge_delta, split_delta


class ConvergenceError(RuntimeError):
    """Safety valve: the cycle cap was reached without convergence."""


@dataclass
class ClusterModel:
    """Cluster state: centroids, assignments, and the subcluster bookkeeping.

    ``subcentroids[i]`` is the pair of subcentroids inside cluster i and
    ``subassignments`` gives each point's side ({0, 1}) within its assigned
    cluster, so the pair partitions exactly the points of that cluster.
    """

    centroids: np.ndarray      # (k, d)
    assignments: np.ndarray    # (n,) int64
    subcentroids: np.ndarray   # (k, 2, d)
    subassignments: np.ndarray # (n,) int64 in {0, 1}

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    def copy(self) -> "ClusterModel":
        return ClusterModel(
            centroids=self.centroids.copy(),
            assignments=self.assignments.copy(),
            subcentroids=self.subcentroids.copy(),
            subassignments=self.subassignments.copy(),
        )


@dataclass(frozen=True)
class FitConfig:
    """Fit options. The defaults give the patience-based early stop; set
    ``strict_convergence`` to run until a full cycle changes nothing."""

    seed: int = 0
    patience: int = 5
    min_improvement: float = 2.0
    strict_convergence: bool = False
    max_cycles: int = 10_000

    def __post_init__(self):
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.min_improvement < 0:
            raise ValueError("min_improvement must be >= 0")


@dataclass(frozen=True)
class FitResult:
    """Outcome of a fit: the minimum-cost model seen and the run's trace."""

    model: ClusterModel
    cost: MdlBreakdown
    cost_trace: list = field(default_factory=list)
    n_cycles: int = 0
    split_count: int = 0
    merge_count: int = 0
    runtime: float = 0.0

    @property
    def k(self) -> int:
        return self.model.k


class SplitOutcome(NamedTuple):
    model: ClusterModel
    did_split: bool
    delta: Optional[float]  # exact cost change of the executed split


class MergeOutcome(NamedTuple):
    model: ClusterModel
    did_merge: bool
    delta: Optional[float]


StepCallback = Callable[[str, ClusterModel, Optional[float]], None]


def init_subcentroids(points, rng) -> np.ndarray:
    """Draw a subcentroid pair from a nonempty point set, k-means++ style.

    The first is uniform over the points, the second is drawn with
    probability proportional to squared distance from the first. Degenerate
    sets (a single point, or all points coincident) yield that point twice
    and consume no random draws.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[0] == 0:
        raise ValueError("cannot initialize subcentroids from an empty set")
    if pts.shape[0] == 1 or np.all(pts == pts[0]):
        return np.stack([pts[0], pts[0]])
    first = pts[rng.integers(pts.shape[0])]
    diff = pts - first
    weights = np.einsum("ij,ij->i", diff, diff)
    second = pts[rng.choice(pts.shape[0], p=weights / weights.sum())]
    return np.stack([first, second])


def _partition_to_pair(pts, pair):
    """Side ({0,1}) of the nearer subcentroid for each point, ties to 0."""
    return _core.choose_subcluster(pts, pair[None, :, :], np.zeros(len(pts), dtype=np.int64))


def assign_step(data: Dataset, model: ClusterModel):
    """Reassign every point to its nearest centroid and subcentroid.

    Ties go to the lowest cluster index (subcluster 0 within a cluster).
    Clusters left empty are dropped and indices compacted in order. Returns
    the new model and whether any main or sub assignment changed.
    """
    X = data.points
    labels = _core.nearest_centroid(X, model.centroids)
    sub = _core.choose_subcluster(X, model.subcentroids, labels)
    changed = not (
        np.array_equal(labels, model.assignments)
        and np.array_equal(sub, model.subassignments)
    )
    counts = np.bincount(labels, minlength=model.k)
    centroids, subcentroids = model.centroids, model.subcentroids
    if np.any(counts == 0):
        keep = np.flatnonzero(counts > 0)
        remap = np.empty(model.k, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        labels = remap[labels]
        centroids = centroids[keep]
        subcentroids = subcentroids[keep]
    return ClusterModel(centroids.copy(), labels, subcentroids.copy(), sub), changed


def update_step(data: Dataset, model: ClusterModel, rng) -> ClusterModel:
    """Move centroids and subcentroids to the means of their members.

    A cluster whose subcluster pair no longer captures points on both sides
    gets a fresh pair via ``init_subcentroids``; its points are repartitioned
    to the new pair and the pair is then moved to the resulting means, so the
    post-update invariant (every nonempty subcentroid is a subcluster mean)
    holds throughout.
    """
    X = data.points
    k, d = model.centroids.shape
    sums, counts = _core.cluster_stats(X, model.assignments, k)
    centroids = sums / counts[:, None]

    combined = model.assignments * 2 + model.subassignments
    ssums, scounts = _core.cluster_stats(X, combined, 2 * k)
    ssums = ssums.reshape(k, 2, d)
    scounts = scounts.reshape(k, 2)

    subcentroids = np.empty_like(model.subcentroids)
    sub = model.subassignments.copy()
    for i in range(k):
        if scounts[i, 0] > 0 and scounts[i, 1] > 0:
            subcentroids[i] = ssums[i] / scounts[i][:, None]
            continue
        mask = model.assignments == i
        pts = X[mask]
        pair = init_subcentroids(pts, rng)
        side = _partition_to_pair(pts, pair)
        sub[mask] = side
        on_1 = side == 1
        if on_1.any() and not on_1.all():
            subcentroids[i, 0] = pts[~on_1].mean(axis=0)
            subcentroids[i, 1] = pts[on_1].mean(axis=0)
        else:
            subcentroids[i] = pair  # degenerate cluster, pair is that point
    return ClusterModel(centroids, model.assignments.copy(), subcentroids, sub)


def maybe_split(data: Dataset, model: ClusterModel, precision: PrecisionInfo,
                rng) -> SplitOutcome:
    """Split the cluster with the most negative exact split delta, if any.

    Only clusters with at least two points and two nonempty subclusters are
    candidates; ties go to the lowest index. On a split, subcluster 0
    replaces the parent in place, subcluster 1 is inserted directly after,
    and both new clusters get fresh subcentroid pairs.
    """
    X = data.points
    k, d = model.centroids.shape
    n = data.n
    counts = np.bincount(model.assignments, minlength=k)
    combined = model.assignments * 2 + model.subassignments
    scounts = np.bincount(combined, minlength=2 * k).reshape(k, 2)
    parent_ss = _core.per_label_ss(X, model.centroids, model.assignments, k)
    sub_ss = _core.per_label_ss(
        X, model.subcentroids.reshape(2 * k, d), combined, 2 * k
    ).reshape(k, 2)

    best_i = -1
    best_delta = 0.0
    for i in range(k):
        if counts[i] < 2 or scounts[i, 0] == 0 or scounts[i, 1] == 0:
            continue
        delta = split_delta(parent_ss[i], sub_ss[i, 0], sub_ss[i, 1], k, n, precision, d)
        if delta < best_delta:
            best_delta = delta
            best_i = i
    if best_i < 0:
        return SplitOutcome(model, False, None)

    i = best_i
    old_labels = model.assignments
    on_0 = (old_labels == i) & (model.subassignments == 0)
    on_1 = (old_labels == i) & (model.subassignments == 1)

    centroids = np.insert(model.centroids, i + 1, model.subcentroids[i, 1], axis=0)
    centroids[i] = model.subcentroids[i, 0]
    labels = old_labels.copy()
    labels[old_labels > i] += 1
    labels[on_1] = i + 1

    subcentroids = np.insert(model.subcentroids, i + 1, 0.0, axis=0)
    sub = model.subassignments.copy()
    for new_index, mask in ((i, on_0), (i + 1, on_1)):
        pts = X[mask]
        pair = init_subcentroids(pts, rng)
        subcentroids[new_index] = pair
        sub[mask] = _partition_to_pair(pts, pair)
    return SplitOutcome(
        ClusterModel(centroids, labels, subcentroids, sub), True, best_delta
    )


def maybe_merge(data: Dataset, model: ClusterModel,
                precision: PrecisionInfo) -> MergeOutcome:
    """Merge the closest pair of centroids when the exact delta is negative.

    The union takes the lower index with its centroid at the union mean; the
    two former clusters become its subclusters, keeping their centroids as
    the subcentroid pair.
    """
    k, d = model.centroids.shape
    if k < 2:
        return MergeOutcome(model, False, None)
    X = data.points
    n = data.n

    diff = model.centroids[:, None, :] - model.centroids[None, :, :]
    dist2 = np.einsum("ijk,ijk->ij", diff, diff)
    dist2[np.tril_indices(k)] = np.inf
    i, j = np.unravel_index(np.argmin(dist2), dist2.shape)  # first minimal pair, lex order

    mask_i = model.assignments == i
    mask_j = model.assignments == j
    sums, counts = _core.cluster_stats(X, model.assignments, k)
    merged_mean = (sums[i] + sums[j]) / (counts[i] + counts[j])
    union = X[mask_i | mask_j]
    udiff = union - merged_mean
    merged_ss = float(np.einsum("ij,ij->", udiff, udiff))
    c_ss = _core.per_label_ss(X, model.centroids, model.assignments, k)
    delta = merge_delta(merged_ss, c_ss[i], c_ss[j], k, n, precision, d)
    if delta >= 0:
        return MergeOutcome(model, False, None)

    centroids = np.delete(model.centroids, j, axis=0)
    centroids[i] = merged_mean
    subcentroids = np.delete(model.subcentroids, j, axis=0)
    subcentroids[i, 0] = model.centroids[i]
    subcentroids[i, 1] = model.centroids[j]
    labels = model.assignments.copy()
    labels[mask_j] = i
    labels[labels > j] -= 1
    sub = model.subassignments.copy()
    sub[mask_i] = 0
    sub[mask_j] = 1
    return MergeOutcome(ClusterModel(centroids, labels, subcentroids, sub), True, delta)


def seed_model(data: Dataset, centroids, rng) -> ClusterModel:
    """Build a valid model from given centroids: nearest assignments plus a
    fresh subcluster pair per cluster. Every centroid must capture at least
    one point."""
    X = data.points
    centroids = np.asarray(centroids, dtype=np.float64)
    labels = _core.nearest_centroid(X, centroids)
    counts = np.bincount(labels, minlength=centroids.shape[0])
    if np.any(counts == 0):
        raise ValueError("every seed centroid must capture at least one point")
    k, d = centroids.shape
    subcentroids = np.empty((k, 2, d))
    sub = np.zeros(data.n, dtype=np.int64)
    for i in range(k):
        mask = labels == i
        pair = init_subcentroids(X[mask], rng)
        subcentroids[i] = pair
        sub[mask] = _partition_to_pair(X[mask], pair)
    return ClusterModel(centroids.copy(), labels, subcentroids, sub)


def fit(data: Dataset, config: FitConfig = FitConfig(),
        on_step: Optional[StepCallback] = None) -> FitResult:
    """Cluster ``data``, discovering the cluster count along the way.

    Each cycle runs assign + update, then considers one split; when no split
    happened, runs assign + update again and considers one merge, then
    records the total cost. The run stops at a full fixpoint cycle (nothing
    changed) or, unless ``strict_convergence`` is set, once the best cost
    has not improved by ``min_improvement`` for ``patience`` consecutive
    cycles. The returned model is the minimum-cost state encountered, which
    is not necessarily the final one.

    ``on_step`` is called as ``on_step(step, model, delta)`` after every
    assign/update step and every executed split/merge (``delta`` is the
    move's exact cost change, None for assign/update); the model passed is
    live state and must not be mutated.
    """
    started = time.perf_counter()
    X = data.points
    precision = precision_info(data)
    rng = np.random.default_rng(config.seed)
    emit = on_step if on_step is not None else (lambda step, model, delta: None)

    labels = np.zeros(data.n, dtype=np.int64)
    pair = init_subcentroids(X, rng)
    model = ClusterModel(
        centroids=X.mean(axis=0)[None, :],
        assignments=labels,
        subcentroids=pair[None, :, :].copy(),
        subassignments=_partition_to_pair(X, pair),
    )

    best_total = np.inf
    best_model = None
    best_cost = None
    anchor = np.inf
    unimproved = 0
    trace = []
    split_count = 0
    merge_count = 0

    for cycle in range(1, config.max_cycles + 1):
        model, changed_1 = assign_step(data, model)
        emit("assign", model, None)
        model = update_step(data, model, rng)
        emit("update", model, None)
        model, did_split, delta = maybe_split(data, model, precision, rng)
        if did_split:
            split_count += 1
            emit("split", model, delta)
        changed_2 = False
        did_merge = False
        if not did_split:
            model, changed_2 = assign_step(data, model)
            emit("assign", model, None)
            model = update_step(data, model, rng)
            emit("update", model, None)
            model, did_merge, delta = maybe_merge(data, model, precision)
            if did_merge:
                merge_count += 1
                emit("merge", model, delta)

        cost = mdl_cost(data, model.centroids, model.assignments, precision)
        trace.append(cost.total)
        if cost.total < best_total:
            best_total = cost.total
            best_model = model.copy()
            best_cost = cost

        if not (changed_1 or changed_2 or did_split or did_merge):
            break  # full fixpoint cycle, nothing can change anymore
        if not config.strict_convergence:
            if anchor - cost.total >= config.min_improvement:
                anchor = cost.total
                unimproved = 0
            else:
                unimproved += 1
            if unimproved >= config.patience:
                break
    else:
        raise ConvergenceError(f"no convergence within max_cycles={config.max_cycles}")

    return FitResult(
        model=best_model,
        cost=best_cost,
        cost_trace=trace,
        n_cycles=cycle,
        split_count=split_count,
        merge_count=merge_count,
        runtime=time.perf_counter() - started,
    )
