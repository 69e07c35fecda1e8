"""Pure-numpy implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable.
Each function mirrors its Cython twin exactly, including tie-breaking and
accumulation order (squared distances accumulate dimension by dimension),
so results are bitwise interchangeable between backends.
"""

import numpy as np


def _sq_dist_to(points, center):
    """Row distances accumulated over dimensions, matching the C loop order."""
    acc = np.zeros(points.shape[0])
    for m in range(points.shape[1]):
        diff = points[:, m] - center[m]
        acc += diff * diff
    return acc


def nearest_centroid(points, centroids):
    """Index of the nearest centroid for every point, ties to the lowest index."""
    n = points.shape[0]
    k = centroids.shape[0]
    dists = np.empty((n, k))
    for j in range(k):
        dists[:, j] = _sq_dist_to(points, centroids[j])
    return np.argmin(dists, axis=1).astype(np.int64)


def choose_subcluster(points, subcentroids, labels):
    """Per point: 0 or 1 for the nearer of its cluster's two subcentroids.

    Ties go to subcluster 0.
    """
    pair = subcentroids[labels]
    d0 = np.zeros(points.shape[0])
    d1 = np.zeros(points.shape[0])
    for m in range(points.shape[1]):
        diff = points[:, m] - pair[:, 0, m]
        d0 += diff * diff
        diff = points[:, m] - pair[:, 1, m]
        d1 += diff * diff
    return (d1 < d0).astype(np.int64)


def cluster_stats(points, labels, k):
    """Per-label coordinate sums and member counts."""
    d = points.shape[1]
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    sums = np.empty((k, d))
    for m in range(d):
        sums[:, m] = np.bincount(labels, weights=points[:, m], minlength=k)
    return sums, counts


def per_label_ss(points, centers, labels, k):
    """Per-label sum of squared distances to the center indexed by the label."""
    gathered = centers[labels]
    sq = np.zeros(points.shape[0])
    for m in range(points.shape[1]):
        diff = points[:, m] - gathered[:, m]
        sq += diff * diff
    return np.bincount(labels, weights=sq, minlength=k)
