"""Variational characterizations of the sandwiched quasi-entropy.

For ``alpha > 1``::

    Q*_alpha = sup_{x >= 0}  alpha rho(x) - (alpha - 1) Tr (s' x s')^(alpha / (alpha - 1)),
    s' = sigma^((alpha - 1) / (2 alpha))

and for ``alpha in [1/2, 1)``::

    Q*_alpha = inf_{x > 0}   alpha rho(x) + (1 - alpha) Tr (s x^-1 s)^(alpha / (1 - alpha)),
    s = sigma^((1 - alpha) / (2 alpha)).

:func:`closed_form_optimizer` builds a maximizer/minimizer from the sandwich
``A = s rho s``; :func:`iterative_solve` is an independent gradient method on
``x = exp(H)`` used to cross-check it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from . import linalg as la
from .divergences import _check_alpha, as_state, sandwiched_q, support_condition
from .errors import NegativeSpectrum, NotConverged, NotPositiveDefinite, SupportViolation
from .linalg import HermMatrix

# stand-in for the zero eigenvalues of A in the alpha < 1 optimizer; each one
# costs about (1 - alpha) * REGULARIZATION**alpha in the objective
REGULARIZATION = 1e-17


@dataclass
class VariationalResult:
    value: float
    optimizer: HermMatrix
    iterations: int
    converged: bool


def _dense_pair(rho, sigma):
    rho, sigma = as_state(rho), as_state(sigma)
    if rho.algebra != sigma.algebra:
        from .errors import DimMismatch

        raise DimMismatch(f"algebras {rho.algebra} and {sigma.algebra} differ")
    return rho.dense(), sigma.dense()


def _trace_power(b: np.ndarray, p: float) -> float:
    w = np.clip(np.linalg.eigvalsh(0.5 * (b + b.conj().T)), 0.0, None)
    return float(np.sum(w[w > 0] ** p))


def objective(rho, sigma, alpha: float, x) -> float:
    """Value of the variational functional at ``x``."""
    alpha = _check_alpha(alpha, 0.5)
    R, S = _dense_pair(rho, sigma)
    X = la.as_array(x)
    wx, vx = np.linalg.eigh(0.5 * (X + X.conj().T))
    scale = max(float(np.abs(wx).max(initial=0.0)), 1.0)
    lin = alpha * float(np.real(np.sum(R * X.T)))
    if alpha > 1:
        if wx[0] < -1e-10 * scale:
            raise NegativeSpectrum(f"x has negative eigenvalue {wx[0]:.3g}")
        sp = la.power(S, (alpha - 1) / (2 * alpha)).entries
        return lin - (alpha - 1) * _trace_power(sp @ X @ sp, alpha / (alpha - 1))
    if wx[0] <= 1e-10:
        raise NotPositiveDefinite(f"x has minimum eigenvalue {wx[0]:.3g}")
    xinv = (vx / wx) @ vx.conj().T
    sp = la.power(S, (1 - alpha) / (2 * alpha)).entries
    return lin + (1 - alpha) * _trace_power(sp @ xinv @ sp, alpha / (1 - alpha))


def closed_form_optimizer(rho, sigma, alpha: float, eps: float = REGULARIZATION) -> VariationalResult:
    """Optimizer ``x* = s A^(alpha - 1) s`` with ``A = s rho s`` and ``s = sigma^((1 - alpha) / (2 alpha))``.

    Substituting ``x*`` turns both terms of the functional into ``Tr A^alpha``.
    For ``alpha < 1`` the kernel of ``A`` inside the support of ``sigma`` gets
    the eigenvalue ``eps`` before the negative power, and ``x*`` is completed
    to an invertible operator off that support.
    """
    alpha = _check_alpha(alpha, 0.5)
    if alpha > 1 and not support_condition(rho, sigma):
        raise SupportViolation("alpha > 1 needs s(rho) <= s(sigma)")
    R, S = _dense_pair(rho, sigma)
    c = (1 - alpha) / (2 * alpha)
    sc = la.power(S, c).entries
    A = sc @ R @ sc
    if alpha > 1:
        xs = sc @ la.power(A, alpha - 1).entries @ sc
    else:
        V = la.support_basis(S)
        a, u = np.linalg.eigh(V.conj().T @ A @ V)
        a = np.where(a > la.support_cutoff(a), a, eps) if a.size else a
        w = V @ u
        inner = (w * a ** (alpha - 1)) @ w.conj().T
        xs = sc @ inner @ sc
        off = np.eye(len(S)) - V @ V.conj().T
        leak = float(np.real(np.trace(R @ off)))
        xs = xs + (1.0 if leak <= 1e-14 * max(np.real(np.trace(R)), 1e-300) else eps) * off
    x = HermMatrix(0.5 * (xs + xs.conj().T), check=False)
    return VariationalResult(objective(rho, sigma, alpha, x), x, 0, True)


# --- iterative solver on x = exp(H) -----------------------------------------


def _herm_from_params(theta: np.ndarray, d: int) -> np.ndarray:
    H = np.zeros((d, d), dtype=np.complex128)
    iu = np.triu_indices(d, 1)
    m = len(iu[0])
    H[np.diag_indices(d)] = theta[:d]
    H[iu] = theta[d:d + m] + 1j * theta[d + m:]
    return H + np.triu(H, 1).conj().T


def _params_from_herm(G: np.ndarray) -> np.ndarray:
    """Gradient coordinates matching :func:`_herm_from_params` under ``Re Tr(G dH)``."""
    d = G.shape[0]
    iu = np.triu_indices(d, 1)
    off = G[iu] + G.T[iu]
    return np.concatenate([np.real(np.diag(G)), np.real(off), -np.imag(G[iu]) + np.imag(G.T[iu])])


def _exp_frechet_adjoint(h: np.ndarray, v: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Directional-derivative adjoint of ``exp`` at ``H = v diag(h) v^dagger`` applied to ``G``."""
    eh = np.exp(h)
    dh = h[:, None] - h[None, :]
    de = eh[:, None] - eh[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = np.where(np.abs(dh) > 1e-12, de / dh, 0.5 * (eh[:, None] + eh[None, :]))
    Gt = v.conj().T @ G @ v
    return v @ (kernel * Gt) @ v.conj().T


def _value_and_grad(R, S, alpha, H):
    h, v = np.linalg.eigh(H)
    X = (v * np.exp(h)) @ v.conj().T
    if alpha > 1:
        sp = la.power(S, (alpha - 1) / (2 * alpha)).entries
        B = sp @ X @ sp
        wb, vb = np.linalg.eigh(0.5 * (B + B.conj().T))
        wb = np.clip(wb, 0.0, None)
        p = alpha / (alpha - 1)
        val = alpha * np.real(np.sum(R * X.T)) - (alpha - 1) * np.sum(wb ** p)
        inner = (vb * wb ** (p - 1)) @ vb.conj().T
        G = alpha * R - (alpha - 1) * p * (sp @ inner @ sp)
        sign = -1.0
    else:
        sp = la.power(S, (1 - alpha) / (2 * alpha)).entries
        xinv = (v * np.exp(-h)) @ v.conj().T
        C = sp @ xinv @ sp
        wc, vc = np.linalg.eigh(0.5 * (C + C.conj().T))
        wc = np.clip(wc, 0.0, None)
        p = alpha / (1 - alpha)
        val = alpha * np.real(np.sum(R * X.T)) + (1 - alpha) * np.sum(wc ** p)
        with np.errstate(divide="ignore"):
            wpow = np.where(wc > 0, wc ** (p - 1), 0.0)
        inner = (vc * wpow) @ vc.conj().T
        G = alpha * R - (1 - alpha) * p * (xinv @ sp @ inner @ sp @ xinv)
        sign = 1.0
    grad_h = _exp_frechet_adjoint(h, v, G)
    # scipy minimizes: flip sign for the sup problem
    return sign * float(val), sign * _params_from_herm(grad_h.T)


def iterative_solve(rho, sigma, alpha: float, max_iters: int = 2000, seed: int = 0) -> VariationalResult:
    """Optimize the functional over ``x = exp(H)`` with L-BFGS and analytic gradients.

    Raises :class:`NotConverged` (carrying the best result) when successive
    objective values have not settled below ``1e-10`` within ``max_iters``.
    """
    alpha = _check_alpha(alpha, 0.5)
    if alpha > 1 and not support_condition(rho, sigma):
        raise SupportViolation("alpha > 1 needs s(rho) <= s(sigma)")
    R, S = _dense_pair(rho, sigma)
    d = len(R)
    rng = np.random.default_rng(seed)
    theta0 = 0.01 * rng.standard_normal(d * d)
    history: list[float] = []

    def fun(theta):
        f, g = _value_and_grad(R, S, alpha, _herm_from_params(theta, d))
        history.append(f)
        return f, g

    res = scipy.optimize.minimize(
        fun, theta0, jac=True, method="L-BFGS-B",
        options={"maxiter": max_iters, "ftol": 1e-15, "gtol": 1e-11, "maxcor": 30},
    )
    sign = -1.0 if alpha > 1 else 1.0
    H = _herm_from_params(res.x, d)
    h, v = np.linalg.eigh(H)
    x = HermMatrix((v * np.exp(h)) @ v.conj().T, check=False)
    value = sign * float(res.fun)
    change = abs(history[-1] - history[-2]) if len(history) > 1 else np.inf
    converged = bool(res.success or change < 1e-10)
    result = VariationalResult(value, x, int(res.nit), converged)
    if not converged:
        raise NotConverged(f"iterative solver stopped after {res.nit} iterations", best=result)
    return result


def feasible_bound_gap(rho, sigma, alpha: float, x) -> float:
    """Signed violation of the variational bound at ``x`` (positive means violated)."""
    q = sandwiched_q(rho, sigma, alpha)
    val = objective(rho, sigma, alpha, x)
    return val - q if alpha > 1 else q - val
