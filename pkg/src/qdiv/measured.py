"""Measured and test-measured Renyi divergences.

Both are suprema of classical Renyi divergences of outcome distributions, so
they sit below ``D*_alpha`` by data processing. The optimizers here are local
searches: rank-one projective measurements are parametrized by a unitary and
improved by Riemannian gradient steps ``U <- U exp(t K)`` with ``K`` the
anti-Hermitian gradient, and two-outcome tests by ``T = sigmoid(H)``.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.special

from . import linalg as la
from .algebra import MAX_TENSOR_DIM, pinch
from .divergences import _check_alpha, as_state, block_pairs, classical_d, sandwiched_d
from .errors import InvalidPovm, TooLarge
from .hypothesis_testing import TestOperator
from .linalg import HermMatrix
from .sampling import random_unitary

MAX_REGULARIZED_DIM = 2**12
_FLOOR = 1e-300


class Povm:
    """Finite family of PSD operators summing to the identity."""

    __slots__ = ("elements",)

    def __init__(self, elements, tol: float = 1e-10):
        mats = [la.as_array(m) for m in elements]
        if not mats:
            raise InvalidPovm("a POVM needs at least one element")
        d = mats[0].shape[0]
        if any(m.shape != (d, d) for m in mats):
            raise InvalidPovm("POVM elements must share one square shape")
        for m in mats:
            if np.abs(m - m.conj().T).max() > tol:
                raise InvalidPovm("POVM element is not Hermitian")
            if np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0] < -tol:
                raise InvalidPovm("POVM element is not positive")
        if np.abs(sum(mats) - np.eye(d)).max() > tol:
            raise InvalidPovm("POVM elements do not sum to the identity")
        self.elements = tuple(HermMatrix(m, check=False) for m in mats)

    @classmethod
    def from_basis(cls, U) -> Povm:
        U = np.asarray(U)
        return cls([np.outer(U[:, i], U[:, i].conj()) for i in range(U.shape[1])])

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def distribution(self, rho) -> np.ndarray:
        R = as_state(rho).dense()
        return np.clip([float(np.real(np.sum(R * m.entries.T))) for m in self.elements], 0.0, None)

    def __len__(self):
        return len(self.elements)


def measured_renyi_for_povm(rho, sigma, povm: Povm, alpha: float) -> float:
    """``D_alpha`` of the outcome distributions of ``povm`` on ``rho`` and ``sigma``."""
    alpha = _check_alpha(alpha, 0.5)
    if not isinstance(povm, Povm):
        povm = Povm(povm)
    return classical_d(povm.distribution(rho), povm.distribution(sigma), alpha)


def _dense_pair(rho, sigma):
    rho, sigma = as_state(rho), as_state(sigma)
    block_pairs(rho, sigma)
    return rho.dense(), sigma.dense()


# --- projective measurements ---------------------------------------------------


def _basis_value(R, S, U, alpha) -> float:
    p = np.clip(np.real(np.einsum("ij,ik,kj->j", U.conj(), R, U)), 0.0, None)
    q = np.clip(np.real(np.einsum("ij,ik,kj->j", U.conj(), S, U)), 0.0, None)
    return classical_d(p, q, alpha)


def _riemannian_ascent(R, S, U, alpha, max_iters: int = 400, tol: float = 1e-13):
    """Local maximization of the measured divergence over rank-one projective bases."""
    sign = 1.0 if alpha > 1 else -1.0
    value = _basis_value(R, S, U, alpha)
    if not math.isfinite(value):
        return U, value
    step = 0.5
    for _ in range(max_iters):
        Rt = U.conj().T @ R @ U
        St = U.conj().T @ S @ U
        p = np.maximum(np.real(np.diag(Rt)), _FLOOR)
        q = np.maximum(np.real(np.diag(St)), _FLOOR)
        a = alpha * p ** (alpha - 1) * q ** (1 - alpha)
        b = (1 - alpha) * p**alpha * q ** (-alpha)
        G = a[:, None] * Rt + b[:, None] * St
        K = sign * (G.conj().T - G)
        gnorm = np.linalg.norm(K)
        if gnorm < 1e-14:
            break
        K /= gnorm
        improved = False
        while step > 1e-12:
            Un = U @ scipy.linalg.expm(step * K)
            vn = _basis_value(R, S, Un, alpha)
            if vn > value:
                gain = vn - value
                U, value = Un, vn
                step *= 2.0
                improved = True
                break
            step *= 0.5
        if not improved or gain < tol:
            break
    return U, value


def _orthonormal(U):
    q, _ = np.linalg.qr(U)
    return q


def _initial_bases(R, S, alpha, seed, restarts):
    """Start bases, cheapest and most informative first; generated lazily."""
    rng = np.random.default_rng(seed)
    d = len(R)
    count = 0
    pinched = pinch(R, S).dense()
    yield la.joint_eigenbasis(pinched, S)
    yield np.linalg.eigh(R)[1]
    count += 2
    if la.support_projection(S).rank == d:
        # eigenbasis of the geometric mean sigma^-1 # rho: optimal at alpha = 1/2
        s_half, s_mhalf = la.power(S, 0.5).entries, la.power(S, -0.5).entries
        M = s_mhalf @ la.power(s_half @ R @ s_half, 0.5).entries @ s_mhalf
        yield np.linalg.eigh(0.5 * (M + M.conj().T))[1]
        count += 1
    if d > 1:
        _, witness = test_measured_opt(R, S, alpha, seed=seed)
        if witness.matrix is not None:
            yield np.linalg.eigh(witness.matrix.entries)[1]
            count += 1
    while count < restarts:
        yield random_unitary(d, rng)
        count += 1


def measured_opt(rho, sigma, alpha: float, seed=0, restarts: int = 16, inits=None) -> tuple[float, Povm]:
    """Best rank-one projective measurement found by local search with restarts."""
    alpha = _check_alpha(alpha, 0.5)
    R, S = _dense_pair(rho, sigma)
    starts = list(inits) if inits is not None else _initial_bases(R, S, alpha, seed, restarts)
    # measured <= D*_alpha, so reaching D*_alpha certifies a global optimum
    ceiling = sandwiched_d(as_state(rho), as_state(sigma), alpha)
    best_v, best_U = -math.inf, None
    for U0 in starts:
        U, v = _riemannian_ascent(R, S, _orthonormal(np.asarray(U0, dtype=np.complex128)), alpha)
        if v > best_v:
            best_v, best_U = v, U
        if best_v >= ceiling - 1e-13 * max(1.0, abs(ceiling)):
            break
    return best_v, Povm.from_basis(best_U)


# --- two-outcome tests ---------------------------------------------------------


def _test_value(R, S, T, alpha) -> float:
    # rounding residues on a near-empty outcome would read as a support violation
    C = np.eye(len(T)) - T
    p = np.array([np.real(np.sum(R * T.T)), np.real(np.sum(R * C.T))])
    q = np.array([np.real(np.sum(S * T.T)), np.real(np.sum(S * C.T))])
    p = np.where(p > 1e-14 * np.real(np.trace(R)), p, 0.0)
    q = np.where(q > 1e-14 * np.real(np.trace(S)), q, 0.0)
    return classical_d(p, q, alpha)


def _lambda_grid(R, S) -> np.ndarray:
    lam = np.logspace(-6, 6, 121)
    try:
        gev = scipy.linalg.eigvals(R, S)
    except (np.linalg.LinAlgError, ValueError):
        gev = np.array([])
    gev = np.real(gev[np.isfinite(gev)])
    gev = np.sort(gev[gev > 0])
    extra = [gev, 0.5 * (gev[1:] + gev[:-1])] if gev.size else []
    return np.unique(np.concatenate([lam, *extra, [0.0]]))


def _sigmoid_test(theta, d):
    H = np.zeros((d, d), dtype=np.complex128)
    iu = np.triu_indices(d, 1)
    m = len(iu[0])
    H[np.diag_indices(d)] = theta[:d]
    H[iu] = theta[d:d + m] + 1j * theta[d + m:]
    H = H + np.triu(H, 1).conj().T
    h, v = np.linalg.eigh(H)
    return (v * scipy.special.expit(h)) @ v.conj().T


def test_measured_opt(rho, sigma, alpha: float, seed=0) -> tuple[float, TestOperator]:
    """Best two-outcome test: Neyman-Pearson scan over ``lambda``, then a sigmoid refinement."""
    alpha = _check_alpha(alpha, 0.5)
    R, S = _dense_pair(rho, sigma)
    d = len(R)
    best_v, best_T, best_lam = -math.inf, np.zeros((d, d), dtype=np.complex128), None
    for lam in _lambda_grid(R, S):
        w, v = np.linalg.eigh(R - lam * S)
        scale = max(float(np.abs(w).max(initial=0.0)), 1e-300)
        V = v[:, w > 1e-13 * scale]
        T = V @ V.conj().T
        val = _test_value(R, S, T, alpha)
        if val > best_v:
            best_v, best_T, best_lam = val, T, float(lam)
    if math.isfinite(best_v) and d > 1:
        rng = np.random.default_rng(seed)
        # start from a smoothed version of the best projection
        w, v = np.linalg.eigh(best_T)
        h = np.where(w > 0.5, 4.0, -4.0)
        H0 = (v * h) @ v.conj().T
        iu = np.triu_indices(d, 1)
        theta0 = np.concatenate([np.real(np.diag(H0)), np.real(H0[iu]), np.imag(H0[iu])])
        theta0 += 1e-3 * rng.standard_normal(theta0.size)

        def neg(theta):
            v_ = _test_value(R, S, _sigmoid_test(theta, d), alpha)
            return -v_ if math.isfinite(v_) else 1e300

        res = scipy.optimize.minimize(neg, theta0, method="L-BFGS-B",
                                       options={"maxiter": 500, "ftol": 1e-15, "gtol": 1e-12})
        if -res.fun > best_v:
            best_v, best_T, best_lam = -res.fun, _sigmoid_test(res.x, d), None
    T = HermMatrix(0.5 * (best_T + best_T.conj().T), check=False)
    return best_v, TestOperator(matrix=T, threshold=best_lam)


test_measured_opt.__test__ = False  # not a pytest test despite the name


# --- regularization over tensor powers -----------------------------------------


def regularized_estimate(rho, sigma, alpha: float, n_max: int, seed=0, restarts: int = 4) -> list[float]:
    """``(1/n)`` times the best measured divergence found on ``n`` copies, ``n = 1..n_max``.

    Each level starts from the pinching basis of ``sigma^{(x) n}``, from the
    product of the best ``(n-1)``-copy basis with the 1-copy basis (slightly
    perturbed), and from a few random bases.
    """
    alpha = _check_alpha(alpha, 0.5)
    R1, S1 = _dense_pair(rho, sigma)
    d = len(R1)
    if d**n_max > min(MAX_REGULARIZED_DIM, MAX_TENSOR_DIM):
        raise TooLarge(f"dimension {d}^{n_max} exceeds the guard {MAX_REGULARIZED_DIM}")
    rng = np.random.default_rng(seed)
    out = []
    Rn, Sn = R1, S1
    best_one = best_prev = None
    for n in range(1, n_max + 1):
        if n > 1:
            Rn, Sn = np.kron(Rn, R1), np.kron(Sn, S1)
        D = len(Rn)
        inits = [la.joint_eigenbasis(pinch(Rn, Sn).dense(), Sn)]
        if n == 1:
            inits += [np.linalg.eigh(R1)[1]]
        else:
            prod = np.kron(best_prev, best_one)
            inits.append(prod)
            G = random_unitary(D, rng)
            inits.append(prod @ scipy.linalg.expm(1e-3 * (G - G.conj().T)))
        inits += [random_unitary(D, rng) for _ in range(max(restarts - len(inits), 0))]
        value, povm = measured_opt(Rn, Sn, alpha, inits=inits)
        U = np.column_stack([_rank_one_vector(m.entries) for m in povm.elements])
        if n == 1:
            best_one = U
        best_prev = U
        out.append(value / n)
    return out


def _rank_one_vector(P: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(P)
    return v[:, -1]
