# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled counting kernels for the entropy and recurrence indicators.

Same contracts as _purekernels: integer counts only, the float ratio math
stays in the callers so both backends agree bitwise.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def apen_counts(x, int m, double r):
    """Template match counts for approximate entropy (self-match included)."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t nm = n - m + 1
    cdef Py_ssize_t nm1 = n - m
    cm_arr = np.ones(nm, dtype=np.int64)    # self-matches
    cm1_arr = np.ones(nm1, dtype=np.int64)
    cdef cnp.int64_t[::1] cm = cm_arr
    cdef cnp.int64_t[::1] cm1 = cm1_arr
    cdef Py_ssize_t i, j, k
    cdef double d, dd
    for i in range(nm):
        for j in range(i + 1, nm):
            d = 0.0
            for k in range(m):
                dd = fabs(xv[i + k] - xv[j + k])
                if dd > d:
                    d = dd
            if d <= r:
                cm[i] += 1
                cm[j] += 1
            if j < nm1:  # implies i < nm1 because i < j
                dd = fabs(xv[i + m] - xv[j + m])
                if dd > d:
                    d = dd
                if d <= r:
                    cm1[i] += 1
                    cm1[j] += 1
    return cm_arr, cm1_arr


def rqa_counts(x, int dim, int delay, double eps, int l_min):
    """Recurrence counts on a time-delay embedding (see _purekernels)."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t M = n - (dim - 1) * delay
    cdef double eps2 = eps * eps
    cdef Py_ssize_t k, i, c
    cdef Py_ssize_t recurrent = 0
    cdef Py_ssize_t diag_points = 0
    cdef Py_ssize_t run
    cdef double d2, diff
    cdef bint hit
    for k in range(1, M):
        run = 0
        for i in range(M - k):
            d2 = 0.0
            for c in range(dim):
                diff = xv[i + c * delay] - xv[i + k + c * delay]
                d2 += diff * diff
            hit = d2 <= eps2
            if hit:
                recurrent += 2
                run += 1
            if (not hit) or i == M - k - 1:
                if run >= l_min:
                    diag_points += 2 * run
                run = 0
    return M, recurrent, diag_points
