"""Closed-form Renyi-type divergences of positive functionals on direct sums of matrix algebras.

Extended reals are plain Python floats: ``math.inf`` and ``-math.inf`` carry
the infinite branches. No normalization by ``rho(1)`` is applied, so all
quantities are defined for arbitrary positive functionals.

Conventions
-----------
``Q*_alpha(rho||sigma) = sum_k Tr (sigma_k^c rho_k sigma_k^c)^alpha`` with
``c = (1 - alpha) / (2 alpha)`` over the blocks ``k``, powers taken on supports,
and ``D*_alpha = log(Q*_alpha) / (alpha - 1)``. For ``alpha > 1`` a support
violation ``s(rho) !<= s(sigma)`` gives ``+inf`` before any power is evaluated.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from . import linalg as la
from .errors import BadAlpha, DimMismatch, ValidationError
from .linalg import HermMatrix

STATE_TOL = 1e-10


class FdState:
    """Positive functional on ``M_{d_1} + ... + M_{d_m}`` given by its PSD density blocks."""

    __slots__ = ("blocks",)

    def __init__(self, blocks: Sequence, check: bool = True, tol: float = la.DEFAULT_TOL):
        hb = tuple(la.as_herm(b, check=check) for b in blocks)
        if check:
            for b in hb:
                la._check_psd(b.eigenvalues, tol)
        self.blocks: tuple[HermMatrix, ...] = hb

    @classmethod
    def from_matrix(cls, matrix, check: bool = True) -> FdState:
        return cls([matrix], check=check)

    @property
    def algebra(self) -> tuple[int, ...]:
        return tuple(b.dim for b in self.blocks)

    @property
    def dim(self) -> int:
        return sum(self.algebra)

    @property
    def weight(self) -> float:
        return float(sum(b.trace() for b in self.blocks))

    def is_state(self, tol: float = STATE_TOL) -> bool:
        return abs(self.weight - 1.0) <= tol

    def dense(self) -> np.ndarray:
        """Block-diagonal density on ``C^{sum d_k}``."""
        return la.direct_sum(self.blocks).entries

    def scaled(self, factor: float) -> FdState:
        return FdState([b * factor for b in self.blocks], check=False)

    def __repr__(self):
        return f"FdState(algebra={self.algebra}, weight={self.weight:.6g})"


def as_state(x) -> FdState:
    if isinstance(x, FdState):
        return x
    return FdState.from_matrix(x)


def block_pairs(rho, sigma) -> list[tuple[HermMatrix, HermMatrix]]:
    rho, sigma = as_state(rho), as_state(sigma)
    if rho.algebra != sigma.algebra:
        raise DimMismatch(f"algebras {rho.algebra} and {sigma.algebra} differ")
    return list(zip(rho.blocks, sigma.blocks))


def _check_alpha(alpha: float, lo: float, name: str = "alpha") -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < lo or alpha == 1.0:
        raise BadAlpha(f"{name}={alpha} must lie in [{lo}, inf) without 1")
    return alpha


def support_leq(rho_k, sigma_k, tol: float = la.DEFAULT_TOL) -> bool:
    """``s(rho_k) <= s(sigma_k)`` for single blocks."""
    vr = la.support_basis(rho_k, tol)
    if vr.shape[1] == 0:
        return True
    vs = la.support_basis(sigma_k, tol)
    resid = vr - vs @ (vs.conj().T @ vr)
    return bool(np.linalg.norm(resid, 2) <= 1e-8)


def support_condition(rho, sigma) -> bool:
    """Absolute continuity ``s(rho) <= s(sigma)`` on every block."""
    return all(support_leq(r, s) for r, s in block_pairs(rho, sigma))


def renyi_from_q(q: float, alpha: float) -> float:
    """``log(q) / (alpha - 1)`` on the extended reals."""
    if q == math.inf:
        return math.inf if alpha > 1 else -math.inf
    if q <= 0.0:
        return -math.inf if alpha > 1 else math.inf
    return math.log(q) / (alpha - 1.0)


def sandwich_eigenvalues(rho_k, sigma_k, alpha: float) -> np.ndarray:
    """Eigenvalues of ``sigma^c rho sigma^c`` with ``c = (1 - alpha) / (2 alpha)``.

    Values below the support cutoff are set to 0; otherwise rounding noise
    would be amplified by the power ``alpha < 1``.
    """
    c = (1.0 - alpha) / (2.0 * alpha)
    S = la.power(sigma_k, c).entries
    A = S @ la.as_array(rho_k) @ S
    w = np.linalg.eigvalsh(0.5 * (A + A.conj().T))
    if w.size:
        w[w <= la.support_cutoff(w)] = 0.0
    return w


def sandwiched_q(rho, sigma, alpha: float) -> float:
    """Sandwiched quasi-entropy ``Q*_alpha``, ``alpha in [1/2, inf) minus {1}``."""
    alpha = _check_alpha(alpha, 0.5)
    total = 0.0
    for r, s in block_pairs(rho, sigma):
        if alpha > 1 and not support_leq(r, s):
            return math.inf
        w = sandwich_eigenvalues(r, s, alpha)
        total += float(np.sum(w[w > 0] ** alpha))
    return total


def log_sandwiched_q(rho, sigma, alpha: float) -> float:
    """``log Q*_alpha`` evaluated in the log domain; stable for very large ``alpha``."""
    alpha = _check_alpha(alpha, 0.5)
    logs = []
    for r, s in block_pairs(rho, sigma):
        if alpha > 1 and not support_leq(r, s):
            return math.inf
        w = sandwich_eigenvalues(r, s, alpha)
        w = w[w > 0]
        if w.size:
            logs.append(alpha * np.log(w))
    if not logs:
        return -math.inf
    return float(logsumexp(np.concatenate(logs)))


def sandwiched_d(rho, sigma, alpha: float) -> float:
    """Sandwiched Renyi divergence ``D*_alpha`` (natural log, unnormalized)."""
    alpha = _check_alpha(alpha, 0.5)
    return renyi_from_q(sandwiched_q(rho, sigma, alpha), alpha)


def standard_q(rho, sigma, alpha: float) -> float:
    """Petz quasi-entropy ``Tr rho^alpha sigma^(1-alpha)``, ``alpha in [0, inf) minus {1}``."""
    alpha = _check_alpha(alpha, 0.0)
    total = 0.0
    for r, s in block_pairs(rho, sigma):
        if alpha > 1 and not support_leq(r, s):
            return math.inf
        ra = la.power(r, alpha).entries
        sb = la.power(s, 1.0 - alpha).entries
        total += float(np.real(np.trace(ra @ sb)))
    return max(total, 0.0)


def standard_d(rho, sigma, alpha: float) -> float:
    alpha = _check_alpha(alpha, 0.0)
    return renyi_from_q(standard_q(rho, sigma, alpha), alpha)


def relative_entropy(rho, sigma) -> float:
    """Umegaki relative entropy ``Tr rho (log rho - log sigma)``."""
    total = 0.0
    for r, s in block_pairs(rho, sigma):
        if not support_leq(r, s):
            return math.inf
        w = r.eigenvalues
        w = w[w > la.support_cutoff(w)]
        total += float(np.sum(w * np.log(w)))
        total -= float(np.real(np.trace(la.as_array(r) @ la.logm(s).entries)))
    return total


def dmax(rho, sigma) -> float:
    """Max-relative entropy ``log min{phi : rho <= phi sigma}``."""
    best = -math.inf
    for r, s in block_pairs(rho, sigma):
        if not support_leq(r, s):
            return math.inf
        S = la.power(s, -0.5).entries
        A = S @ la.as_array(r) @ S
        top = float(np.linalg.eigvalsh(0.5 * (A + A.conj().T))[-1]) if A.size else 0.0
        if top > 0:
            best = max(best, math.log(top))
    return best


def fidelity(rho, sigma) -> float:
    """``|| sqrt(rho) sqrt(sigma) ||_1 = Tr (sigma^1/2 rho sigma^1/2)^1/2``."""
    total = 0.0
    for r, s in block_pairs(rho, sigma):
        S = la.power(s, 0.5).entries
        A = S @ la.as_array(r) @ S
        w = np.clip(np.linalg.eigvalsh(0.5 * (A + A.conj().T)), 0.0, None)
        total += float(np.sum(np.sqrt(w)))
    return total


def commuting(rho, sigma, tol: float = 1e-10) -> bool:
    """Blockwise ``||[rho, sigma]|| <= tol ||rho|| ||sigma||``."""
    return all(la.commute(r, s, tol) for r, s in block_pairs(rho, sigma))


# --- classical distributions -------------------------------------------------


def classical_q(p, q, alpha: float) -> float:
    """``sum p^alpha q^(1-alpha)`` with the 0-conventions of the quantum definitions.

    Entries with ``p = 0`` contribute nothing for ``alpha > 0``; for ``alpha = 0``
    the sum runs over the support of ``p``. For ``alpha > 1`` an entry with
    ``p > 0`` and ``q = 0`` gives ``+inf``; for ``alpha < 1`` it contributes 0.
    """
    alpha = float(alpha)
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DimMismatch(f"shapes {p.shape} and {q.shape} differ")
    if np.any(p < 0) or np.any(q < 0):
        raise ValidationError("distributions must be nonnegative")
    both = (p > 0) & (q > 0)
    if alpha > 1 and np.any((p > 0) & (q == 0)):
        return math.inf
    return float(np.sum(p[both] ** alpha * q[both] ** (1.0 - alpha)))


def classical_d(p, q, alpha: float) -> float:
    alpha = _check_alpha(alpha, 0.0)
    return renyi_from_q(classical_q(p, q, alpha), alpha)


def classical_relative_entropy(p, q) -> float:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if np.any((p > 0) & (q == 0)):
        return math.inf
    m = p > 0
    return float(np.sum(p[m] * (np.log(p[m]) - np.log(q[m]))))
