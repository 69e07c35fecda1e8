# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot kernels.

Same contracts as ``_pykernels``: tie-breaking toward the lowest index and
per-point sequential accumulation, so both backends give identical results.
"""

import numpy as np

from libc.stdint cimport int64_t


def nearest_centroid(const double[:, ::1] points, const double[:, ::1] centroids):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t d = points.shape[1]
    cdef Py_ssize_t k = centroids.shape[0]
    labels_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] labels = labels_arr
    cdef Py_ssize_t i, j, m, best_j
    cdef double best, acc, diff
    for i in range(n):
        best_j = 0
        best = np.inf
        for j in range(k):
            acc = 0.0
            for m in range(d):
                diff = points[i, m] - centroids[j, m]
                acc += diff * diff
            if acc < best:
                best = acc
                best_j = j
        labels[i] = best_j
    return labels_arr


def choose_subcluster(const double[:, ::1] points, const double[:, :, ::1] subcentroids,
                      const int64_t[::1] labels):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t d = points.shape[1]
    sub_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] sub = sub_arr
    cdef Py_ssize_t i, m
    cdef int64_t c
    cdef double d0, d1, diff
    for i in range(n):
        c = labels[i]
        d0 = 0.0
        d1 = 0.0
        for m in range(d):
            diff = points[i, m] - subcentroids[c, 0, m]
            d0 += diff * diff
            diff = points[i, m] - subcentroids[c, 1, m]
            d1 += diff * diff
        sub[i] = 1 if d1 < d0 else 0
    return sub_arr


def cluster_stats(const double[:, ::1] points, const int64_t[::1] labels, Py_ssize_t k):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t d = points.shape[1]
    sums_arr = np.zeros((k, d))
    counts_arr = np.zeros(k, dtype=np.int64)
    cdef double[:, ::1] sums = sums_arr
    cdef int64_t[::1] counts = counts_arr
    cdef Py_ssize_t i, m
    cdef int64_t c
    for i in range(n):
        c = labels[i]
        counts[c] += 1
        for m in range(d):
            sums[c, m] += points[i, m]
    return sums_arr, counts_arr


def per_label_ss(const double[:, ::1] points, const double[:, ::1] centers,
                 const int64_t[::1] labels, Py_ssize_t k):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t d = points.shape[1]
    out_arr = np.zeros(k)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, m
    cdef int64_t c
    cdef double acc, diff
    for i in range(n):
        c = labels[i]
        acc = 0.0
        for m in range(d):
            diff = points[i, m] - centers[c, m]
            acc += diff * diff
        out[c] += acc
    return out_arr
