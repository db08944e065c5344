# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for type-class hypothesis testing and binomial moments.

Each function mirrors one in :mod:`qdiv._kernels_py` with identical semantics.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, INFINITY, isinf

cnp.import_array()


cdef inline double _logaddexp(double a, double b) noexcept nogil:
    cdef double hi, lo
    if a == -INFINITY:
        return b
    if b == -INFINITY:
        return a
    if a > b:
        hi = a
        lo = b
    else:
        hi = b
        lo = a
    return hi + log1p(exp(lo - hi))


def log_binom_moments(double[::1] log_w, double[::1] log_lam, double[::1] log_1mlam, long n):
    cdef Py_ssize_t J = log_w.shape[0]
    cdef Py_ssize_t j
    cdef long k
    cdef double t, a, b, m
    out_arr = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] top = np.full(n + 1, -INFINITY)
    # two passes per k: max, then sum of shifted exponentials
    with nogil:
        for k in range(n + 1):
            m = -INFINITY
            for j in range(J):
                if log_w[j] == -INFINITY:
                    continue
                a = 0.0 if k == 0 else k * log_lam[j]
                b = 0.0 if k == n else (n - k) * log_1mlam[j]
                t = log_w[j] + a + b
                if t > m:
                    m = t
            top[k] = m
            if m == -INFINITY:
                out[k] = -INFINITY
                continue
            t = 0.0
            for j in range(J):
                if log_w[j] == -INFINITY:
                    continue
                a = 0.0 if k == 0 else k * log_lam[j]
                b = 0.0 if k == n else (n - k) * log_1mlam[j]
                t += exp(log_w[j] + a + b - m)
            out[k] = m + log(t)
    return out_arr


def greedy_fill(double[::1] log_p, double[::1] log_q, double log_budget):
    cdef Py_ssize_t N = log_p.shape[0]
    cdef Py_ssize_t i
    cdef double acc_p = -INFINITY
    cdef double acc_q = -INFINITY
    cdef double new_q, log_gamma
    cdef Py_ssize_t partial = -1
    cdef double gamma = 0.0
    with nogil:
        for i in range(N):
            new_q = _logaddexp(acc_q, log_q[i])
            if new_q <= log_budget:
                acc_q = new_q
                acc_p = _logaddexp(acc_p, log_p[i])
                continue
            log_gamma = (log_budget - log_q[i])
            if acc_q != -INFINITY:
                log_gamma += log1p(-exp(acc_q - log_budget))
            gamma = exp(log_gamma)
            partial = i
            if log_p[i] != -INFINITY:
                acc_p = _logaddexp(acc_p, log_gamma + log_p[i])
            acc_q = log_budget
            break
    return acc_p, acc_q, partial, gamma


def enumerate_types(long n, long m):
    if m < 1 or n < 0:
        raise ValueError("need m >= 1 and n >= 0")
    # number of compositions of n into m parts: C(n + m - 1, m - 1)
    cdef long long total = 1
    cdef long long i
    for i in range(1, m):
        total = total * (n + i) // i
    out_arr = np.zeros((total, m), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    cdef long long[::1] cur = np.zeros(m, dtype=np.int64)
    cdef long long row = 0, rest, j, pos
    cur[m - 1] = n
    with nogil:
        while True:
            for j in range(m):
                out[row, j] = cur[j]
            row += 1
            if row == total:
                break
            # next composition in lexicographic order of the first m-1 parts
            pos = m - 2
            while pos >= 0:
                rest = cur[m - 1]
                if rest > 0:
                    cur[pos] += 1
                    cur[m - 1] = rest - 1
                    break
                cur[m - 1] = cur[pos] + cur[m - 1]
                cur[pos] = 0
                pos -= 1
            # after carrying, the trailing part holds everything not fixed
            if pos < 0:
                break
    return out_arr
