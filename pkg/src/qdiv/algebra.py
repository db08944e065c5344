"""Finite-dimensional *-subalgebras, trace-preserving conditional expectations and restrictions.

A :class:`Subalgebra` of ``M_d`` is ``U (M_{m_1} (x) 1_{n_1} + ... + M_{m_K} (x) 1_{n_K}) U^dagger``:
in the basis given by the columns of ``U`` the blocks are consecutive, block
``k`` has size ``m_k n_k`` and its elements are ``a (x) 1_{n_k}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .divergences import FdState, as_state, sandwiched_d, sandwiched_q
from .errors import DimMismatch, TooLarge, ValidationError
from .linalg import HermMatrix, Projection

MAX_TENSOR_DIM = 2**14


@dataclass(frozen=True)
class Subalgebra:
    ambient_dim: int
    basis_change: np.ndarray
    pattern: tuple[tuple[int, int], ...]

    def __post_init__(self):
        U = np.asarray(self.basis_change, dtype=np.complex128)
        d = self.ambient_dim
        if U.shape != (d, d):
            raise DimMismatch(f"basis change has shape {U.shape}, expected {(d, d)}")
        if np.abs(U.conj().T @ U - np.eye(d)).max() > 1e-10:
            raise ValidationError("basis change is not unitary")
        pattern = tuple((int(m), int(n)) for m, n in self.pattern)
        if any(m <= 0 or n <= 0 for m, n in pattern):
            raise ValidationError("pattern entries must be positive")
        if sum(m * n for m, n in pattern) != d:
            raise ValidationError(f"pattern {pattern} does not cover dimension {d}")
        U.setflags(write=False)
        object.__setattr__(self, "basis_change", U)
        object.__setattr__(self, "pattern", pattern)

    @classmethod
    def full(cls, d: int, unitary=None) -> Subalgebra:
        return cls(d, np.eye(d) if unitary is None else unitary, ((d, 1),))

    @classmethod
    def scalars(cls, d: int) -> Subalgebra:
        return cls(d, np.eye(d), ((1, d),))

    @classmethod
    def diagonal(cls, d: int, unitary=None) -> Subalgebra:
        return cls(d, np.eye(d) if unitary is None else unitary, tuple((1, 1) for _ in range(d)))

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.pattern)

    def _offsets(self):
        o = 0
        for m, n in self.pattern:
            yield o, m, n
            o += m * n

    def matrix_units(self) -> list[np.ndarray]:
        """Ambient images of the matrix units ``e_ij (x) 1_n`` of every block (a linear basis)."""
        U = self.basis_change
        units = []
        for o, m, n in self._offsets():
            for i in range(m):
                for j in range(m):
                    e = np.zeros((m, m))
                    e[i, j] = 1.0
                    full = np.zeros((self.ambient_dim,) * 2, dtype=np.complex128)
                    full[o:o + m * n, o:o + m * n] = np.kron(e, np.eye(n))
                    units.append(U @ full @ U.conj().T)
        return units

    def to_json(self) -> dict:
        U = self.basis_change
        return {
            "dim": self.ambient_dim,
            "unitary": [[[float(z.real), float(z.imag)] for z in row] for row in U],
            "pattern": [list(p) for p in self.pattern],
        }

    @classmethod
    def from_json(cls, obj: dict) -> Subalgebra:
        d = int(obj["dim"])
        U = obj.get("unitary")
        U = np.eye(d) if U is None else np.array([[complex(re, im) for re, im in row] for row in U])
        return cls(d, U, tuple(tuple(p) for p in obj["pattern"]))


def _block_partial_traces(x: np.ndarray, N: Subalgebra) -> list[np.ndarray]:
    """``Tr_{n_k}`` of every diagonal block of ``U^dagger x U`` (not normalized)."""
    U = N.basis_change
    y = U.conj().T @ x @ U
    out = []
    for o, m, n in N._offsets():
        blk = y[o:o + m * n, o:o + m * n].reshape(m, n, m, n)
        out.append(np.einsum("iljl->ij", blk))
    return out


def conditional_expectation(x, N: Subalgebra) -> HermMatrix:
    """Trace-preserving conditional expectation of ``M_d`` onto ``N``."""
    X = la.as_array(x)
    if X.shape != (N.ambient_dim,) * 2:
        raise DimMismatch(f"matrix of shape {X.shape} on subalgebra of M_{N.ambient_dim}")
    U = N.basis_change
    blocks = [np.kron(a / n, np.eye(n)) for a, (_, n) in zip(_block_partial_traces(X, N), N.pattern)]
    y = la.direct_sum(blocks).entries
    return HermMatrix(U @ y @ U.conj().T, check=False)


def restrict_state(rho, N: Subalgebra) -> FdState:
    """Restriction of ``rho`` to ``N`` as a functional on ``M_{m_1} + ... + M_{m_K}``.

    The density of block ``k`` is ``Tr_{n_k}`` of the compressed block, so that
    ``rho(a (x) 1_n) = Tr(rho_k a)``.
    """
    R = as_state(rho).dense()
    if R.shape != (N.ambient_dim,) * 2:
        raise DimMismatch(f"state on C^{len(R)} restricted to subalgebra of M_{N.ambient_dim}")
    return FdState(_block_partial_traces(R, N), check=False)


def restrict_ambient(rho, N: Subalgebra) -> FdState:
    """``E_N(rho)`` as a state on the ambient ``M_d``."""
    return FdState.from_matrix(conditional_expectation(as_state(rho).dense(), N), check=False)


def corner_restrict(rho, e) -> FdState:
    """Restriction to ``eMe + C(1 - e)``: blocks ``e rho e`` (on the range of ``e``) and ``rho(1 - e)``."""
    R = as_state(rho).dense()
    E = la.as_array(e)
    if E.shape != R.shape:
        raise DimMismatch(f"projection of shape {E.shape} for state on C^{len(R)}")
    P = Projection(E)
    w, v = P.eigh()
    V = v[:, w > 0.5]
    comp = np.eye(len(R)) - P.entries
    blocks = []
    if V.shape[1]:
        blocks.append(V.conj().T @ R @ V)
    blocks.append(np.array([[max(float(np.real(np.trace(R @ comp))), 0.0)]]))
    return FdState(blocks, check=False)


def corner_decomposition_terms(rho, sigma, e, alpha: float) -> tuple[float, float]:
    """Both sides of ``Q*(rho_e||sigma_e) = Q*(e rho e||e sigma e) + rho(1-e)^alpha sigma(1-e)^(1-alpha)``."""
    lhs = sandwiched_q(corner_restrict(rho, e), corner_restrict(sigma, e), alpha)
    R, S = as_state(rho).dense(), as_state(sigma).dense()
    P = la.as_array(e)
    comp = np.eye(len(R)) - P
    a = max(float(np.real(np.trace(R @ comp))), 0.0)
    b = max(float(np.real(np.trace(S @ comp))), 0.0)
    compressed = sandwiched_q(P @ R @ P, P @ S @ P, alpha)
    if a == 0.0:
        scalar = 0.0
    elif b == 0.0:
        scalar = np.inf if alpha > 1 else 0.0
    else:
        scalar = a**alpha * b ** (1 - alpha)
    return lhs, compressed + scalar


def pinch(rho, sigma, rel_gap: float = 1e-10) -> FdState:
    """Pinching ``sum_j P_j rho P_j`` over the spectral projections ``P_j`` of ``sigma``."""
    R = as_state(rho).dense()
    S = as_state(sigma).dense()
    if R.shape != S.shape:
        raise DimMismatch(f"shapes {R.shape} and {S.shape} differ")
    _, groups = la.spectral_projections(S, rel_gap)
    out = np.zeros_like(R)
    for g in groups:
        P = g @ g.conj().T
        out += P @ R @ P
    return FdState.from_matrix(0.5 * (out + out.conj().T), check=False)


def distinct_eigenvalue_count(sigma, rel_gap: float = 1e-10) -> int:
    values, _ = la.spectral_projections(as_state(sigma).dense(), rel_gap)
    return len(values)


def tensor_power_state(rho, n: int, max_dim: int = MAX_TENSOR_DIM) -> FdState:
    """``rho^{(x) n}`` with the block structure of the tensor-power algebra."""
    rho = as_state(rho)
    if n < 1:
        raise ValidationError("n must be at least 1")
    if rho.dim**n > max_dim:
        raise TooLarge(f"dimension {rho.dim}^{n} exceeds the guard {max_dim}")
    blocks = []
    for combo in itertools.product(rho.blocks, repeat=n):
        acc = np.ones((1, 1), dtype=np.complex128)
        for b in combo:
            acc = np.kron(acc, b.entries)
        blocks.append(acc)
    return FdState(blocks, check=False)


@dataclass
class SubalgebraChain:
    """Increasing sequence of subalgebras of ``M_d``; inclusion is verified on construction."""

    ambient_dim: int
    links: list[Subalgebra] = field(default_factory=list)
    tol: float = 1e-9

    def __post_init__(self):
        for N in self.links:
            if N.ambient_dim != self.ambient_dim:
                raise DimMismatch("all links must live in the same ambient algebra")
        for small, big in zip(self.links, self.links[1:]):
            if not contained_in(small, big, self.tol):
                raise ValidationError(f"link with pattern {small.pattern} is not contained in {big.pattern}")

    def to_json(self) -> dict:
        return {"dim": self.ambient_dim, "links": [N.to_json() for N in self.links]}

    @classmethod
    def from_json(cls, obj) -> SubalgebraChain:
        links = obj["links"] if isinstance(obj, dict) else obj
        subs = [Subalgebra.from_json(x) for x in links]
        d = obj["dim"] if isinstance(obj, dict) and "dim" in obj else subs[0].ambient_dim
        return cls(int(d), subs)


def contained_in(small: Subalgebra, big: Subalgebra, tol: float = 1e-9) -> bool:
    """``small`` is a subalgebra of ``big``: ``E_big`` fixes the matrix units of ``small``."""
    for u in small.matrix_units():
        uh = 0.5 * (u + u.conj().T)
        ua = 0.5j * (u.conj().T - u)
        for part in (uh, ua):
            if np.abs(conditional_expectation(part, big).entries - part).max() > tol:
                return False
    return True


def martingale_sequence(rho, sigma, chain: SubalgebraChain, alpha: float) -> list[float]:
    """``D*_alpha(E_i(rho) || E_i(sigma))`` along the links of ``chain``."""
    return [
        sandwiched_d(restrict_ambient(rho, N), restrict_ambient(sigma, N), alpha)
        for N in chain.links
    ]


CHAIN_PATTERNS_M4 = (
    (((1, 2), (1, 2)), ((1, 1), (1, 1), (1, 2)), ((1, 1), (1, 1), (2, 1)), ((4, 1),)),
    (((1, 4),), ((1, 2), (1, 2)), ((2, 2),), ((4, 1),)),
    (((1, 4),), ((1, 1), (1, 3)), ((1, 1), (1, 1), (2, 1)), ((4, 1),)),
)


def nested_chain_m4(unitary=None, variant: int = 0) -> SubalgebraChain:
    """One of a few fixed 4-link chains in ``M_4`` ending at ``M_4``, rotated by ``unitary``.

    Variant 0 is ``diag(a,a,b,b) < diag(a,b,c,c) < diag(a,b) + M_2 < M_4``;
    variant 1 is ``C1 < diag(a,b) (x) 1_2 < M_2 (x) 1_2 < M_4``.
    """
    U = np.eye(4) if unitary is None else unitary
    patterns = CHAIN_PATTERNS_M4[variant % len(CHAIN_PATTERNS_M4)]
    return SubalgebraChain(4, [Subalgebra(4, U, p) for p in patterns])
