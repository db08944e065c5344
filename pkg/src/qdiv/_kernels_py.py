"""Pure-Python reference versions of the compiled kernels in ``_kernels.pyx``."""

import math

import numpy as np


def _logaddexp(a, b):
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a > b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def log_binom_moments(log_w, log_lam, log_1mlam, n):
    """``log sum_j w_j lam_j^k (1 - lam_j)^(n - k)`` for ``k = 0..n``.

    ``lam^0 = 1`` also at ``lam = 0`` (likewise for ``1 - lam``).
    """
    log_w = np.asarray(log_w, dtype=np.float64)
    keep = log_w > -np.inf
    log_w = log_w[keep]
    log_lam = np.asarray(log_lam, dtype=np.float64)[keep]
    log_1mlam = np.asarray(log_1mlam, dtype=np.float64)[keep]
    out = np.full(n + 1, -np.inf)
    if log_w.size == 0:
        return out
    for k in range(n + 1):
        a = 0.0 if k == 0 else k * log_lam
        b = 0.0 if k == n else (n - k) * log_1mlam
        t = log_w + a + b
        m = t.max()
        if m == -np.inf:
            continue
        out[k] = m + math.log(np.exp(t - m).sum())
    return out


def greedy_fill(log_p, log_q, log_budget):
    """Fill a type-II budget with classes sorted by decreasing likelihood ratio.

    Returns ``(log success, log used budget, index of the fractional class or
    -1, fraction of that class)``.
    """
    acc_p = acc_q = -math.inf
    for i in range(len(log_p)):
        new_q = _logaddexp(acc_q, log_q[i])
        if new_q <= log_budget:
            acc_q = new_q
            acc_p = _logaddexp(acc_p, log_p[i])
            continue
        log_gamma = log_budget - log_q[i]
        if acc_q != -math.inf:
            log_gamma += math.log1p(-math.exp(acc_q - log_budget))
        if log_p[i] != -math.inf:
            acc_p = _logaddexp(acc_p, log_gamma + log_p[i])
        return acc_p, log_budget, i, math.exp(log_gamma)
    return acc_p, acc_q, -1, 0.0


def enumerate_types(n, m):
    """All compositions of ``n`` into ``m`` nonnegative parts, lexicographic in the leading parts."""
    if m < 1 or n < 0:
        raise ValueError("need m >= 1 and n >= 0")
    if m == 1:
        return np.array([[n]], dtype=np.int64)
    rows = []
    for first in range(n + 1):
        sub = enumerate_types(n - first, m - 1)
        rows.append(np.column_stack([np.full(len(sub), first, dtype=np.int64), sub]))
    return np.vstack(rows)
