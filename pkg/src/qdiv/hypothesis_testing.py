"""Asymptotic binary state discrimination: optimal tests, strong converse exponents, anti-divergences.

For i.i.d. pairs ``rho_n = rho^{(x) n}``, ``sigma_n = sigma^{(x) n}`` the minimal
type-I error under a type-II budget ``exp(-n r)`` is computed exactly (up to
bisection precision) and compared against the Hoeffding anti-divergence

    H*_r = sup_{u in [0, 1]} { u r - psi~(u) },   psi~(u) = (1 - u) log Q*_{1/(1-u)},

with the endpoint values ``psi~(0) = log rho(1)`` and ``psi~(1) = D_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import kernels
from . import linalg as la
from .algebra import MAX_TENSOR_DIM
from .divergences import (
    as_state,
    block_pairs,
    commuting,
    dmax,
    log_sandwiched_q,
    relative_entropy,
    sandwiched_d,
    support_condition,
)
from .errors import BadKappa, BadU, InfiniteDivergence, TooLarge, ValidationError
from .linalg import HermMatrix

MAX_TYPE_CLASSES = 5_000_000
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class TestOperator:
    """``0 <= T <= 1``. The classical fast path only records the threshold class and its weight."""

    matrix: HermMatrix | None = None
    threshold: float | None = None
    threshold_index: int | None = None
    gamma: float = 0.0

    __test__ = False  # keep pytest from collecting this class


@dataclass
class ErrorPair:
    type1: float
    type2: float


@dataclass
class TypeIResult:
    """Outcome of the constrained Neyman-Pearson problem at one ``(n, r)``."""

    n: int
    r: float
    alpha_star: float
    log_success: float
    type2: float
    method: str
    test: TestOperator = field(default_factory=TestOperator)


def _state_pair(rho, sigma):
    rho, sigma = as_state(rho), as_state(sigma)
    block_pairs(rho, sigma)
    return rho.dense(), sigma.dense()


def _real_if_possible(a: np.ndarray) -> np.ndarray:
    if np.abs(a.imag).max(initial=0.0) == 0.0:
        return np.ascontiguousarray(a.real)
    return a


def _positive_part_projection(R: np.ndarray, S: np.ndarray, lam: float):
    """Basis of the spectral subspace ``{R - lam S > 0}`` and the masses ``(R(P), S(P))``."""
    M = R - lam * S
    w, v = np.linalg.eigh(M)
    scale = max(float(np.abs(w).max(initial=0.0)), 1e-300)
    V = v[:, w > 1e-13 * scale]
    rp = float(np.real(np.einsum("ij,ik,kj->", V.conj(), R, V))) if V.size else 0.0
    sp = float(np.real(np.einsum("ij,ik,kj->", V.conj(), S, V))) if V.size else 0.0
    return V, rp, sp


def neyman_pearson(rho, sigma, lam: float) -> tuple[TestOperator, ErrorPair]:
    """Projection test ``{rho - lam sigma > 0}`` and its two error probabilities."""
    if lam < 0:
        raise ValidationError("the multiplier must be nonnegative")
    R, S = _state_pair(rho, sigma)
    V, rp, sp = _positive_part_projection(R, S, lam)
    T = HermMatrix(V @ V.conj().T, check=False)
    weight = float(np.real(np.trace(R)))
    return TestOperator(matrix=T, threshold=lam), ErrorPair(type1=max(weight - rp, 0.0), type2=sp)


# --- minimal type-I error -----------------------------------------------------


def _quantum_min_type1(rho, sigma, n: int, r: float, max_iters: int = 80) -> TypeIResult:
    rs, ss = as_state(rho), as_state(sigma)
    if rs.dim**n > MAX_TENSOR_DIM:
        raise TooLarge(f"dimension {rs.dim}^{n} exceeds the guard {MAX_TENSOR_DIM}")
    R1, S1 = _state_pair(rs, ss)
    R, S = _real_if_possible(R1), _real_if_possible(S1)
    Rn, Sn = R, S
    for _ in range(n - 1):
        Rn, Sn = np.kron(Rn, R), np.kron(Sn, S)
    log_budget = -n * r
    budget = math.exp(log_budget)

    def probe(lam):
        V, rp, sp = _positive_part_projection(Rn, Sn, lam)
        return V, rp, sp

    # T = s(rho_n) already fits the budget
    V0, r0, s0 = probe(0.0)
    if s0 <= budget:
        res = TypeIResult(n, r, max(1.0 - r0, 0.0), math.log(r0) if r0 > 0 else -math.inf, s0, "quantum")
        res.test = TestOperator(matrix=HermMatrix(V0 @ V0.conj().T, check=False), threshold=0.0)
        return res

    # bracket in log(lambda): lo infeasible (type-II mass above budget), hi feasible
    lo, hi = -1.0, 1.0
    while probe(math.exp(hi))[2] > budget:
        lo, hi = hi, 2.0 * hi
        if hi > 745.0:
            break
    while probe(math.exp(lo))[2] <= budget and lo > -745.0:
        hi, lo = lo, 2.0 * lo
    for _ in range(max_iters):
        if hi - lo < 1e-13:
            break
        mid = 0.5 * (lo + hi)
        if probe(math.exp(mid))[2] > budget:
            lo = mid
        else:
            hi = mid
    V_lo, r_lo, s_lo = probe(math.exp(lo))
    V_hi, r_hi, s_hi = probe(math.exp(hi))
    gamma = 0.0 if s_lo <= s_hi else min(max((budget - s_hi) / (s_lo - s_hi), 0.0), 1.0)
    success = gamma * r_lo + (1.0 - gamma) * r_hi
    T = gamma * (V_lo @ V_lo.conj().T) + (1.0 - gamma) * (V_hi @ V_hi.conj().T)
    res = TypeIResult(
        n, r, max(1.0 - success, 0.0), math.log(success) if success > 0 else -math.inf,
        gamma * s_lo + (1.0 - gamma) * s_hi, "quantum",
    )
    res.test = TestOperator(matrix=HermMatrix(T, check=False), threshold=math.exp(hi), gamma=gamma)
    return res


def joint_distributions(rho, sigma) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalue distributions of a commuting pair in a common eigenbasis."""
    if not commuting(rho, sigma):
        raise ValidationError("the classical path needs commuting inputs")
    ps, qs = [], []
    for r, s in block_pairs(rho, sigma):
        U = la.joint_eigenbasis(r, s)
        ps.append(np.real(np.einsum("ij,ik,kj->j", U.conj(), r.entries, U)))
        qs.append(np.real(np.einsum("ij,ik,kj->j", U.conj(), s.entries, U)))
    p = np.clip(np.concatenate(ps), 0.0, None)
    q = np.clip(np.concatenate(qs), 0.0, None)
    return p, q


def merge_by_ratio(p, q, rel_tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Merge outcomes with equal likelihood ratio; the optimal test only sees the ratio."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    keep = (p > 0) | (q > 0)
    p, q = p[keep], q[keep]
    with np.errstate(divide="ignore"):
        lr = np.where(q > 0, np.where(p > 0, np.log(p) - np.log(q), -np.inf), np.inf)
    order = np.argsort(-lr, kind="stable")
    P, Q, last = [], [], None
    for i in order:
        same = last is not None and (
            lr[i] == last or (np.isfinite(lr[i]) and abs(lr[i] - last) <= rel_tol * max(1.0, abs(last)))
        )
        if same:
            P[-1] += p[i]
            Q[-1] += q[i]
        else:
            P.append(p[i])
            Q.append(q[i])
            last = lr[i]
    return np.array(P), np.array(Q)


def type_class_masses(p, q, n: int, max_classes: int = MAX_TYPE_CLASSES):
    """Log probability masses of all type classes of length-``n`` sequences, sorted by decreasing ratio."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    m = len(p)
    count = math.comb(n + m - 1, m - 1)
    if count > max_classes:
        raise TooLarge(f"{count} type classes exceed the guard {max_classes}")
    types = kernels.enumerate_types(n, m)
    log_mult = gammaln(n + 1) - gammaln(types + 1).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        lp = np.log(p)
        lq = np.log(q)
        tp = np.where(types > 0, types * lp, 0.0).sum(axis=1)
        tq = np.where(types > 0, types * lq, 0.0).sum(axis=1)
    log_p = log_mult + tp
    log_q = log_mult + tq
    keep = np.isfinite(log_p)
    log_p, log_q = log_p[keep], log_q[keep]
    with np.errstate(invalid="ignore"):
        ratio = np.where(np.isfinite(log_q), log_p - log_q, np.inf)
    order = np.argsort(-ratio, kind="stable")
    return np.ascontiguousarray(log_p[order]), np.ascontiguousarray(log_q[order])


def classical_min_type1(p, q, n: int, r: float) -> TypeIResult:
    """Minimal type-I error for distributions ``p``, ``q`` by greedy filling of type classes."""
    P, Q = merge_by_ratio(p, q)
    log_p, log_q = type_class_masses(P, Q, n)
    log_success, log_used, idx, gamma = kernels.greedy_fill(log_p, log_q, float(-n * r))
    alpha_star = -math.expm1(log_success) if log_success > -math.inf else 1.0
    type2 = math.exp(log_used) if log_used > -math.inf else 0.0
    test = TestOperator(threshold_index=int(idx) if idx >= 0 else None, gamma=float(gamma))
    return TypeIResult(n, r, alpha_star, log_success, type2, "classical", test)


def min_type1_result(rho, sigma, n: int, r: float, method: str = "auto") -> TypeIResult:
    if n < 1:
        raise ValidationError("n must be at least 1")
    if method not in ("auto", "quantum", "classical"):
        raise ValidationError(f"unknown method {method!r}")
    rs, ss = as_state(rho), as_state(sigma)
    if r <= 0:
        return TypeIResult(n, r, 0.0, math.log(rs.weight) if rs.weight > 0 else -math.inf, ss.weight,
                           method, TestOperator(threshold=0.0))
    if method == "classical" or (method == "auto" and commuting(rs, ss)):
        p, q = joint_distributions(rs, ss)
        return classical_min_type1(p, q, n, r)
    return _quantum_min_type1(rs, ss, n, r)


def min_type1(rho, sigma, n: int, r: float, method: str = "auto") -> float:
    """``min { rho_n(1 - T) : sigma_n(T) <= exp(-n r), 0 <= T <= 1 }``."""
    return min_type1_result(rho, sigma, n, r, method).alpha_star


def sce_sequence(rho, sigma, r: float, n_list, method: str = "auto") -> list[float]:
    """``-(1/n) log(1 - alpha*_n)`` for each ``n`` in ``n_list``."""
    out = []
    for n in n_list:
        res = min_type1_result(rho, sigma, int(n), r, method)
        out.append(-res.log_success / res.n if res.log_success > -math.inf else math.inf)
    return out


def nagaoka_slack(rho, sigma, n: int, test_type1: float, test_type2: float, u: float) -> float:
    """``-(1/n) log rho_n(T) - (u r_n - psi~(u))`` for a test with the given errors; nonnegative for every test."""
    success = 1.0 - test_type1
    if success <= 0:
        return math.inf
    r_n = -math.log(test_type2) / n if test_type2 > 0 else math.inf
    if not math.isfinite(r_n):
        return math.inf
    return -math.log(success) / n - (u * r_n - psi_tilde(rho, sigma, u))


# --- psi, psi~, anti-divergence -------------------------------------------------


def psi_tilde(rho, sigma, u: float) -> float:
    """``(1 - u) log Q*_{1/(1-u)}`` with its limits at ``u = 0`` and ``u = 1``."""
    u = float(u)
    if not 0.0 <= u <= 1.0:
        raise BadU(f"u={u} must lie in [0, 1]")
    if u == 1.0:
        return dmax(rho, sigma)
    if 1.0 / (1.0 - u) == 1.0:
        # u = 0, or u below rounding where the correction u * D is invisible
        w = as_state(rho).weight
        return math.log(w) if w > 0 else -math.inf
    alpha = 1.0 / (1.0 - u)
    lq = log_sandwiched_q(rho, sigma, alpha)
    if not math.isfinite(lq):
        return lq
    return (1.0 - u) * lq


@dataclass
class PsiCurve:
    alphas: np.ndarray
    psi_values: np.ndarray
    finite_up_to: float

    def second_differences(self) -> np.ndarray:
        """Divided second differences of ``psi`` along the (non-uniform) alpha grid."""
        a, y = self.alphas, self.psi_values
        fin = np.isfinite(y)
        a, y = a[fin], y[fin]
        s = np.diff(y) / np.diff(a)
        return np.diff(s)

    def is_convex(self, tol: float = 1e-8) -> bool:
        return bool(np.all(self.second_differences() >= -tol))

    def tilde(self) -> tuple[np.ndarray, np.ndarray]:
        """``(u, psi~(u))`` on the image grid ``u = 1 - 1/alpha``."""
        u = 1.0 - 1.0 / self.alphas
        return u, (1.0 - u) * self.psi_values


def psi_curve(rho, sigma, alpha_max: float = 64.0, k_max: int = 12, n_linear: int = 64) -> PsiCurve:
    """``psi(alpha) = log Q*_alpha`` on ``{1 + 2^-k} U linspace(2, alpha_max)``."""
    geo = 1.0 + 2.0 ** -np.arange(k_max, 0, -1)
    lin = np.linspace(2.0, alpha_max, n_linear)
    alphas = np.unique(np.concatenate([geo, lin]))
    vals = np.array([log_sandwiched_q(rho, sigma, a) for a in alphas])
    fin = np.isfinite(vals)
    finite_up_to = float(alphas[fin][-1]) if fin.any() else 1.0
    return PsiCurve(alphas, vals, finite_up_to)


def _finiteness_endpoint(rho, sigma) -> float | None:
    """Largest ``u`` with ``psi~`` finite on ``[0, u)``; ``None`` if infinite on all of (0, 1).

    In finite dimensions ``Q*_alpha < inf`` for one ``alpha > 1`` iff for all of
    them iff ``s(rho) <= s(sigma)``, so the endpoint is 1 or nothing.
    """
    return 1.0 if support_condition(rho, sigma) else None


def _golden_max(f, a: float, b: float, tol: float = 1e-11, max_iter: int = 200):
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def hoeffding_maximizer(rho, sigma, r: float) -> tuple[float, float]:
    """``(H*_r, u*)``: the anti-divergence and a maximizing ``u`` in ``[0, 1]``."""
    rho, sigma = as_state(rho), as_state(sigma)
    u_max = _finiteness_endpoint(rho, sigma)
    if u_max is None:
        return -math.inf, float("nan")

    def phi(u):
        return u * r - psi_tilde(rho, sigma, u)

    candidates = [(phi(0.0), 0.0), (phi(u_max), u_max)]
    u_in, v_in = _golden_max(phi, 0.0, u_max)
    candidates.append((v_in, u_in))
    best = max(candidates)
    return best[0], best[1]


def hoeffding_anti_divergence(rho, sigma, r: float) -> float:
    """``H*_r = sup_{u in (0,1)} { u r - psi~(u) }``; ``-inf`` when ``D*_alpha = inf`` for all ``alpha > 1``."""
    return hoeffding_maximizer(rho, sigma, r)[0]


def hoeffding_curve(rho, sigma, r_grid, n_grid: int = 1025) -> np.ndarray:
    """``H*_r`` for many ``r`` from one table of ``psi~`` on a uniform ``u`` grid.

    Each maximum is located on the grid and refined by the vertex of the
    parabola through the three neighbouring points (concavity keeps the vertex
    inside the bracket). Agrees with :func:`hoeffding_anti_divergence` to
    about ``h^3`` with ``h = 1 / (n_grid - 1)``.
    """
    rho, sigma = as_state(rho), as_state(sigma)
    r_grid = np.asarray(r_grid, dtype=np.float64)
    if _finiteness_endpoint(rho, sigma) is None:
        return np.full(r_grid.shape, -math.inf)
    u = np.linspace(0.0, 1.0, n_grid)
    psi = np.array([psi_tilde(rho, sigma, x) for x in u])
    out = np.empty(r_grid.shape)
    for j, r in enumerate(r_grid.flat):
        phi = u * r - psi
        i = int(np.argmax(phi))
        best = phi[i]
        if 0 < i < n_grid - 1:
            y0, y1, y2 = phi[i - 1], phi[i], phi[i + 1]
            curv = y0 - 2.0 * y1 + y2
            if curv < 0:
                best = max(best, y1 - 0.125 * (y2 - y0) ** 2 / curv)
        out.flat[j] = best
    return out


def cutoff_rate(rho, sigma, kappa: float) -> float:
    """Generalized kappa-cutoff rate ``C_kappa = D*_{1/(1-kappa)}``."""
    kappa = float(kappa)
    if not 0.0 < kappa < 1.0:
        raise BadKappa(f"kappa={kappa} must lie in (0, 1)")
    value = sandwiched_d(rho, sigma, 1.0 / (1.0 - kappa))
    if not math.isfinite(value):
        raise InfiniteDivergence(f"D*_{1 / (1 - kappa):g} is infinite")
    return value


def supporting_line_slack(rho, sigma, kappa: float, r_grid) -> np.ndarray:
    """``H*_r - kappa (r - C_kappa)`` on ``r_grid``; nonnegative with minimum 0 at the touching point."""
    c = cutoff_rate(rho, sigma, kappa)
    r_grid = np.asarray(r_grid, dtype=np.float64)
    return hoeffding_curve(rho, sigma, r_grid) - kappa * (r_grid - c)


# --- degenerate pairs -----------------------------------------------------------


@dataclass
class DegeneracyReport:
    applicable: bool
    is_degenerate: bool = False
    gamma: float | None = None
    cond_b: bool = False
    cond_c: bool = False
    cond_d: bool = False
    relative_entropy: float = math.nan
    dmax: float = math.nan
    hoeffding_max_error: float | None = None

    @property
    def flags_agree(self) -> bool:
        return self.cond_b == self.cond_c == self.cond_d


def degenerate_check(rho, sigma, r_grid=None, tol: float = 1e-9) -> DegeneracyReport:
    """Test the equivalent conditions for ``D(rho||sigma) = D_max(rho||sigma)``.

    (b) ``D = D_max``; (c) ``[rho, sigma] = 0`` and ``rho sigma^-1 = gamma s(rho)``;
    (d) ``[s(rho), sigma] = 0`` and ``rho = gamma sigma s(rho)``. When the pair
    is degenerate, ``H*_r = (r - D)_+`` is checked on ``r_grid`` (default
    ``{0, D/2, D, 2D, 2D + 1}``) and the largest deviation is reported.
    """
    rho, sigma = as_state(rho), as_state(sigma)
    if not support_condition(rho, sigma):
        return DegeneracyReport(applicable=False)
    R, S = _state_pair(rho, sigma)
    D = relative_entropy(rho, sigma)
    Dm = dmax(rho, sigma)
    cond_b = abs(D - Dm) <= tol

    s_rho = la.support_projection(R).entries
    nR = max(np.linalg.norm(R, 2), 1e-300)
    nS = max(np.linalg.norm(S, 2), 1e-300)

    s_inv = la.power(S, -1.0).entries
    M = R @ s_inv
    rank = max(np.real(np.trace(s_rho)), 1e-300)
    gamma_c = float(np.real(np.trace(M))) / rank
    cond_c = la.commute(R, S, 1e-10) and (
        np.linalg.norm(M - gamma_c * s_rho, 2) <= tol * max(1.0, np.linalg.norm(M, 2))
    )

    sig_on = float(np.real(np.trace(S @ s_rho)))
    gamma_d = float(np.real(np.trace(R))) / sig_on if sig_on > 0 else math.inf
    comm = np.linalg.norm(s_rho @ S - S @ s_rho, 2)
    cond_d = bool(comm <= 1e-10 * nS) and math.isfinite(gamma_d) and (
        np.linalg.norm(R - gamma_d * S @ s_rho, 2) <= tol * nR
    )

    rep = DegeneracyReport(
        applicable=True, is_degenerate=bool(cond_b and cond_c and cond_d),
        gamma=gamma_d if cond_d else (gamma_c if cond_c else None),
        cond_b=bool(cond_b), cond_c=bool(cond_c), cond_d=bool(cond_d),
        relative_entropy=D, dmax=Dm,
    )
    if rep.is_degenerate:
        grid = [0.0, D / 2, D, 2 * D, 2 * D + 1] if r_grid is None else list(r_grid)
        rep.hoeffding_max_error = max(
            abs(hoeffding_anti_divergence(rho, sigma, r) - max(r - D, 0.0)) for r in grid
        )
    return rep
