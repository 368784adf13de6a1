# cython: language_level=3
"""Compiled hot kernels: fused affine+ReLU maps and symmetric sandwich
products for the covariance recursion.

Mirrors the signatures in ``_kernels_np``. The sandwich and gram kernels
compute only the upper triangle and mirror it, so outputs are exactly
symmetric; rows of ``a`` that are identically zero are skipped and yield
exactly zero rows/columns.
"""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()


def affine_relu(const double[:, ::1] w, const double[::1] b, const double[::1] x):
    """max(0, w @ x + b) for a single vector."""
    cdef Py_ssize_t m = w.shape[0]
    cdef Py_ssize_t n = w.shape[1]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i, j
    cdef double acc
    with nogil:
        for i in range(m):
            acc = b[i]
            for j in range(n):
                acc += w[i, j] * x[j]
            y[i] = acc if acc > 0.0 else 0.0
    return out


def affine_relu_batch(const double[:, ::1] w, const double[::1] b, const double[:, ::1] xs):
    """max(0, xs @ w.T + b) row-wise over a batch (n, d_in) -> (n, d_out)."""
    cdef Py_ssize_t m = w.shape[0]
    cdef Py_ssize_t n = w.shape[1]
    cdef Py_ssize_t k = xs.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((k, m), dtype=np.float64)
    cdef double[:, ::1] ys = out
    cdef Py_ssize_t s, i, j
    cdef double acc
    with nogil:
        for s in range(k):
            for i in range(m):
                acc = b[i]
                for j in range(n):
                    acc += w[i, j] * xs[s, j]
                ys[s, i] = acc if acc > 0.0 else 0.0
    return out


def sym_sandwich(const double[:, ::1] a, const double[:, ::1] s):
    """a @ s @ a.T, exactly symmetric; zero rows of a are skipped."""
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.zeros((m, m), dtype=np.float64)
    cdef double[:, ::1] c = out
    cdef cnp.ndarray[double, ndim=2] tbuf = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] t = tbuf
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] act = np.zeros(m, dtype=np.uint8)
    cdef cnp.uint8_t[::1] active = act
    cdef Py_ssize_t i, j, k2
    cdef double aij, acc
    with nogil:
        for i in range(m):
            for j in range(n):
                if a[i, j] != 0.0:
                    active[i] = 1
                    break
        # t = a @ s, accumulated row-wise so the inner loops stay contiguous
        for i in range(m):
            if not active[i]:
                continue
            for j in range(n):
                aij = a[i, j]
                if aij != 0.0:
                    for k2 in range(n):
                        t[i, k2] += aij * s[j, k2]
        # upper triangle of t @ a.T, mirrored
        for i in range(m):
            if not active[i]:
                continue
            for j in range(i, m):
                if not active[j]:
                    continue
                acc = 0.0
                for k2 in range(n):
                    acc += t[i, k2] * a[j, k2]
                c[i, j] = acc
                c[j, i] = acc
    return out


def centered_gram(const double[:, ::1] xs, const double[::1] mean):
    """sum_k outer(xs[k] - mean, xs[k] - mean), exactly symmetric."""
    cdef Py_ssize_t k = xs.shape[0]
    cdef Py_ssize_t n = xs.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] g = out
    cdef cnp.ndarray[double, ndim=1] dbuf = np.empty(n, dtype=np.float64)
    cdef double[::1] d = dbuf
    cdef Py_ssize_t s, i, j
    cdef double di
    with nogil:
        for s in range(k):
            for i in range(n):
                d[i] = xs[s, i] - mean[i]
            for i in range(n):
                di = d[i]
                for j in range(i, n):
                    g[i, j] += di * d[j]
        for i in range(n):
            for j in range(i + 1, n):
                g[j, i] = g[i, j]
    return out
