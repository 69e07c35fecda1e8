import numpy as np
import pytest

from kstarmeans.dataset import Dataset


@pytest.fixture
def two_pairs_1d():
    """Two far-separated tight pairs in 1-D; the canonical split fixture."""
    return Dataset(np.array([[0.0], [0.1], [10.0], [10.1]]))


def make_blobs(rng, n, d, k, spread=8.0):
    """Random Gaussian blobs: k unit-variance clusters with centers drawn
    uniformly in a box scaling with ``spread``."""
    centers = rng.uniform(-spread, spread, size=(k, d))
    counts = np.full(k, n // k)
    counts[: n % k] += 1
    points = np.concatenate(
        [rng.normal(loc=centers[i], scale=1.0, size=(counts[i], d)) for i in range(k)]
    )
    labels = np.repeat(np.arange(k), counts)
    return Dataset(points), labels


def set_partitions(n):
    """All partitions of range(n) as label tuples in restricted-growth form."""

    def grow(prefix, used):
        i = len(prefix)
        if i == n:
            yield tuple(prefix)
            return
        for label in range(used + 1):
            prefix.append(label)
            yield from grow(prefix, max(used, label + 1) if label == used else used)
            prefix.pop()

    yield from grow([], 0)


def partition_cost(points, labels, bits_per_coord):
    """Description length of a labeled partition with group-mean centroids,
    written out from the cost formula; independent of the library path."""
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    n, d = points.shape
    k = len(set(labels.tolist()))
    ss = 0.0
    for label in set(labels.tolist()):
        group = points[labels == label]
        ss += float(((group - group.mean(axis=0)) ** 2).sum())
    return (
        k * d * bits_per_coord
        + n * np.log(k)
        + (n * d * np.log(2.0 * np.pi) + ss) / 2.0
    )
