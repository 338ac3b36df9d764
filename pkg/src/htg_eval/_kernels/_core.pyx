# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: edit-distance DP and witness edge relaxation."""

from libc.stdlib cimport free, malloc

import numpy as np


def levenshtein_counts(const int[::1] a, const int[::1] b):
    """See _pure.levenshtein_counts; identical contract and tie-breaking."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0:
        return m, 0, m, 0
    if m == 0:
        return n, 0, 0, n

    cdef Py_ssize_t stride = m + 1
    cdef int *cost = <int *> malloc(2 * stride * 4 * sizeof(int))
    if cost == NULL:
        raise MemoryError()
    # Row layout: [cost | subs | ins | dels], two rolling rows.
    cdef int *prev = cost
    cdef int *cur = cost + stride * 4
    cdef int *tmp
    cdef Py_ssize_t i, j
    cdef int ai, sub, diag, lc, uc
    try:
        for j in range(stride):
            prev[j] = <int> j
            prev[stride + j] = 0
            prev[2 * stride + j] = <int> j
            prev[3 * stride + j] = 0
        for i in range(1, n + 1):
            ai = a[i - 1]
            cur[0] = <int> i
            cur[stride] = 0
            cur[2 * stride] = 0
            cur[3 * stride] = <int> i
            for j in range(1, stride):
                sub = 0 if ai == b[j - 1] else 1
                diag = prev[j - 1] + sub
                lc = cur[j - 1] + 1
                uc = prev[j] + 1
                if diag <= lc and diag <= uc:
                    cur[j] = diag
                    cur[stride + j] = prev[stride + j - 1] + sub
                    cur[2 * stride + j] = prev[2 * stride + j - 1]
                    cur[3 * stride + j] = prev[3 * stride + j - 1]
                elif lc <= uc:
                    cur[j] = lc
                    cur[stride + j] = cur[stride + j - 1]
                    cur[2 * stride + j] = cur[2 * stride + j - 1] + 1
                    cur[3 * stride + j] = cur[3 * stride + j - 1]
                else:
                    cur[j] = uc
                    cur[stride + j] = prev[stride + j]
                    cur[2 * stride + j] = prev[2 * stride + j]
                    cur[3 * stride + j] = prev[3 * stride + j] + 1
            tmp = prev
            prev = cur
            cur = tmp
        return (
            int(prev[m]),
            int(prev[stride + m]),
            int(prev[2 * stride + m]),
            int(prev[3 * stride + m]),
        )
    finally:
        free(cost)


def witness_edge_times(const double[:, ::1] dist_wl, const double[::1] second_nearest):
    """See _pure.witness_edge_times; identical contract."""
    cdef Py_ssize_t n_w = dist_wl.shape[0]
    cdef Py_ssize_t n_l = dist_wl.shape[1]
    out_arr = np.full((n_l, n_l), np.inf)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t w, i, j
    cdef double d2, di, v
    for w in range(n_w):
        d2 = second_nearest[w]
        for i in range(n_l):
            di = dist_wl[w, i]
            for j in range(i + 1, n_l):
                v = di if di >= dist_wl[w, j] else dist_wl[w, j]
                v -= d2
                if v < out[i, j]:
                    out[i, j] = v
    for i in range(n_l):
        out[i, i] = 0.0
        for j in range(i + 1, n_l):
            if out[i, j] < 0.0:
                out[i, j] = 0.0
            out[j, i] = out[i, j]
    return out_arr
