"""Reference k-means (k-means++ seeding plus Lloyd iterations) and the
sweep-a-grid-of-k, pick-lowest-BIC model-selection baseline."""

import math
import time
from dataclasses import dataclass

import numpy as np

from . import _core
from .dataset import Dataset

SIGMA2_FLOOR = 1e-12


@dataclass(frozen=True)
class KmeansResult:
    centroids: np.ndarray   # (k, d)
    assignments: np.ndarray # (n,) int64
    inertia: float          # sum of squared distances to assigned centroids
    n_iters: int


@dataclass(frozen=True)
class SweepReport:
    candidate_ks: list
    bic_scores: list
    chosen_k: int
    chosen: KmeansResult
    runtime: float = 0.0


def kmeanspp_init(data: Dataset, k: int, rng) -> np.ndarray:
    """k-means++ seeding: first centroid uniform, each next one drawn with
    probability proportional to squared distance from the nearest chosen
    centroid. Never picks an already-covered point while uncovered points
    remain."""
    X = data.points
    n = data.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integers(n)
    diff = X - X[chosen[0]]
    closest = np.einsum("ij,ij->i", diff, diff)
    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = rng.choice(n, p=closest / total)
        else:
            # All remaining weight is zero (k exceeds the number of distinct
            # points); fall back to uniform among unchosen indices.
            unchosen = np.setdiff1d(np.arange(n), chosen[:c])
            idx = unchosen[rng.integers(unchosen.size)]
        chosen[c] = idx
        diff = X - X[idx]
        closest = np.minimum(closest, np.einsum("ij,ij->i", diff, diff))
    return X[chosen].copy()


def lloyd(data: Dataset, k: int, rng=None, max_iters: int = 300,
          init_centroids=None) -> KmeansResult:
    """Lloyd's algorithm: alternate nearest-centroid assignment (ties to the
    lowest index) and mean updates until assignments stop changing.

    A cluster left empty is re-seeded to the point currently farthest from
    its assigned centroid, keeping k fixed. ``init_centroids`` overrides the
    k-means++ seeding (then ``rng`` is unused).
    """
    X = data.points
    n = data.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if init_centroids is not None:
        centroids = np.array(init_centroids, dtype=np.float64)
    else:
        if rng is None:
            raise ValueError("either rng or init_centroids is required")
        centroids = kmeanspp_init(data, k, rng)

    labels = _assign_with_reseed(X, centroids, k)
    n_iters = 0
    for _ in range(max_iters):
        sums, counts = _core.cluster_stats(X, labels, k)
        centroids = sums / counts[:, None]
        new_labels = _assign_with_reseed(X, centroids, k)
        n_iters += 1
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    inertia = float(_core.per_label_ss(X, centroids, labels, k).sum())
    return KmeansResult(centroids=centroids, assignments=labels, inertia=inertia,
                        n_iters=n_iters)


def _assign_with_reseed(X, centroids, k):
    """Nearest-centroid labels; empty clusters get re-seeded in index order
    to the globally worst-fit point. Mutates ``centroids`` on re-seed."""
    labels = _core.nearest_centroid(X, centroids)
    counts = np.bincount(labels, minlength=k)
    empties = np.flatnonzero(counts == 0)
    if empties.size:
        diff = X - centroids[labels]
        dists = np.einsum("ij,ij->i", diff, diff)
        for c in empties:
            far = int(np.argmax(dists))
            centroids[c] = X[far]
            labels[far] = c
            dists[far] = 0.0
    return labels


def bic_score(data: Dataset, result: KmeansResult) -> float:
    """Bayesian information criterion of a hard spherical-Gaussian model;
    lower is better.

    Pooled variance sigma^2 = inertia / (d (n - k)), floored at 1e-12; the
    log-likelihood combines mixing proportions and the Gaussian residual
    term; the parameter count is (k - 1) + k d + 1.
    """
    X = data.points
    n, d = X.shape
    k = result.centroids.shape[0]
    if n <= k:
        raise ValueError(f"BIC undefined for n={n} <= k={k}")
    counts = np.bincount(result.assignments, minlength=k)
    sigma2 = max(result.inertia / (d * (n - k)), SIGMA2_FLOOR)
    nonzero = counts[counts > 0]
    loglik = (
        float(np.sum(nonzero * np.log(nonzero / n)))
        - n * d / 2.0 * math.log(2.0 * math.pi * sigma2)
        - result.inertia / (2.0 * sigma2)
    )
    n_params = (k - 1) + k * d + 1
    return n_params * math.log(n) - 2.0 * loglik


def default_sweep_grid(n: int) -> list:
    """Candidate cluster counts at 10% increments of the dataset size."""
    return sorted({max(1, math.ceil(j * n / 10)) for j in range(1, 11)})


def sweep_k_bic(data: Dataset, rng, grid=None) -> SweepReport:
    """Run k-means once per candidate k and keep the lowest-BIC model.

    Ties go to the smaller k. A candidate k = n cannot be scored (the
    variance estimate has no degrees of freedom) and gets an infinite score,
    so it is never chosen.
    """
    started = time.perf_counter()
    candidates = list(grid) if grid is not None else default_sweep_grid(data.n)
    scores = []
    results = []
    for k in candidates:
        result = lloyd(data, k, rng)
        results.append(result)
        scores.append(bic_score(data, result) if k < data.n else np.inf)
    best = int(np.argmin(scores))
    return SweepReport(
        candidate_ks=candidates,
        bic_scores=scores,
        chosen_k=candidates[best],
        chosen=results[best],
        runtime=time.perf_counter() - started,
    )
