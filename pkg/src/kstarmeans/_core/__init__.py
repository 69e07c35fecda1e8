"""Kernel backend selection.

The compiled Cython kernels are preferred; if the extension was not built,
the numpy fallback is selected at import time. ``use_backend`` rebinds the
exported functions, which the equivalence tests and the kernel benchmark use
to compare both implementations.
"""

import numpy as np

from . import _pykernels

try:
    from . import _cykernels

    _DEFAULT = "cython"
except ImportError:  # extension not built
    _cykernels = None
    _DEFAULT = "numpy"

_BACKENDS = {"numpy": _pykernels}
if _cykernels is not None:
    _BACKENDS["cython"] = _cykernels

BACKEND = _DEFAULT


def _c_f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _c_i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def _bind(mod):
    # The Cython signatures need C-contiguous buffers; normalizing here keeps
    # callers free to pass views (no copy is made for compliant inputs).
    def nearest_centroid(points, centroids):
        return mod.nearest_centroid(_c_f64(points), _c_f64(centroids))

    def choose_subcluster(points, subcentroids, labels):
        return mod.choose_subcluster(_c_f64(points), _c_f64(subcentroids), _c_i64(labels))

    def cluster_stats(points, labels, k):
        return mod.cluster_stats(_c_f64(points), _c_i64(labels), k)

    def per_label_ss(points, centers, labels, k):
        return mod.per_label_ss(_c_f64(points), _c_f64(centers), _c_i64(labels), k)

    return nearest_centroid, choose_subcluster, cluster_stats, per_label_ss


def available_backends():
    return sorted(_BACKENDS)


def use_backend(name):
    """Select the kernel backend ("cython" or "numpy") for subsequent calls."""
    global BACKEND, nearest_centroid, choose_subcluster, cluster_stats, per_label_ss
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    BACKEND = name
    nearest_centroid, choose_subcluster, cluster_stats, per_label_ss = _bind(_BACKENDS[name])


use_backend(_DEFAULT)
