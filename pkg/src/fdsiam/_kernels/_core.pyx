# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lane of the numeric kernels; mirrors _pyref step for step."""

from libc.math cimport INFINITY, isnan, sqrt

import numpy as np

JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-12

cdef double _INV_2_53 = 2.0 ** -53


def cholesky_lower(double[:, ::1] a):
    cdef Py_ssize_t n = a.shape[0]
    low_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] low = low_arr
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(n):
        for j in range(i + 1):
            acc = a[i, j]
            for k in range(j):
                acc -= low[i, k] * low[j, k]
            if i == j:
                if acc <= 0.0 or isnan(acc):
                    return low_arr, i
                low[i, i] = sqrt(acc)
            else:
                low[i, j] = acc / low[j, j]
    return low_arr, -1


cdef double _off_diag_norm(double[:, ::1] a, Py_ssize_t n):
    cdef double total = 0.0
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            if i != j:
                total += a[i, j] * a[i, j]
    return sqrt(total)


def jacobi_eigh(double[:, ::1] a_in):
    cdef Py_ssize_t n = a_in.shape[0]
    a_arr = np.array(a_in, dtype=np.float64, copy=True)
    v_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = v_arr
    cdef double scale = 0.0
    cdef Py_ssize_t i, j, p, q, k
    for i in range(n):
        for j in range(n):
            scale += a[i, j] * a[i, j]
    scale = sqrt(scale)
    if scale == 0.0:
        return np.diagonal(a_arr).copy(), v_arr, 0
    cdef double tol = JACOBI_REL_TOL * scale
    cdef double prev_off = INFINITY
    cdef double off, apq, tau, t, c, s, xp, xq
    cdef int sweeps = 0
    while sweeps < JACOBI_MAX_SWEEPS:
        off = _off_diag_norm(a, n)
        if off <= tol or off >= prev_off:
            break
        prev_off = off
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = c * xp - s * xq
                    a[k, q] = s * xp + c * xq
                for k in range(n):
                    xp = a[p, k]
                    xq = a[q, k]
                    a[p, k] = c * xp - s * xq
                    a[q, k] = s * xp + c * xq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    xp = v[k, p]
                    xq = v[k, q]
                    v[k, p] = c * xp - s * xq
                    v[k, q] = s * xp + c * xq
    return np.diagonal(a_arr).copy(), v_arr, sweeps


def xoshiro_fill_uniform(unsigned long long[::1] state, double[::1] out):
    cdef unsigned long long s0 = state[0]
    cdef unsigned long long s1 = state[1]
    cdef unsigned long long s2 = state[2]
    cdef unsigned long long s3 = state[3]
    cdef unsigned long long r, t
    cdef Py_ssize_t i
    for i in range(out.shape[0]):
        r = s1 * 5ULL
        r = ((r << 7) | (r >> 57)) * 9ULL
        t = s1 << 17
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = (s3 << 45) | (s3 >> 19)
        out[i] = <double> (r >> 11) * _INV_2_53
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3


def nearest_ref_indices(double[:, ::1] ref_t, double[:, ::1] query_t, bint exclude_self):
    cdef Py_ssize_t n = ref_t.shape[0]
    cdef Py_ssize_t m = query_t.shape[0]
    cdef Py_ssize_t dim = ref_t.shape[1]
    out_arr = np.empty(m, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double best, d, diff
    cdef Py_ssize_t best_j
    for i in range(m):
        best = INFINITY
        best_j = 0
        for j in range(n):
            if exclude_self and j == i:
                continue
            d = 0.0
            for k in range(dim):
                diff = ref_t[j, k] - query_t[i, k]
                d += diff * diff
            if d < best:
                best = d
                best_j = j
        out[i] = best_j
    return out_arr
