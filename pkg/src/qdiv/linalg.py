"""Hermitian matrix calculus on dense complex arrays.

Everything in the package that touches a density operator goes through
:class:`HermMatrix`, which validates hermiticity once and caches its spectral
decomposition. Functions of a positive semidefinite matrix are always taken
on its support: eigenvalues below ``tol * max(lambda_max, 1)`` are mapped to 0,
so ``fn_on_support(A, lambda t: t**-1)`` is the Moore-Penrose pseudo-inverse.
"""

from __future__ import annotations

from functools import reduce
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import DimMismatch, NegativeSpectrum, NonHermitian, NotProjection

DEFAULT_TOL = 1e-12
HERMITICITY_TOL = 1e-12


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Make the first non-negligible component of every column real positive."""
    vecs = vecs.copy()
    mags = np.abs(vecs)
    for j in range(vecs.shape[1]):
        col_max = mags[:, j].max()
        if col_max == 0.0:
            continue
        i = int(np.argmax(mags[:, j] > 1e-8 * col_max))
        vecs[:, j] *= np.conj(vecs[i, j]) / mags[i, j]
    return vecs


class HermMatrix:
    """Immutable dense Hermitian matrix with a lazily filled eigendecomposition.

    Parameters
    ----------
    entries : array_like
        Square complex matrix. It is stored as a read-only ``complex128`` copy.
    check : bool
        Verify hermiticity (relative to the largest absolute entry).
    """

    __slots__ = ("_entries", "_spectrum")

    def __init__(self, entries, check: bool = True):
        if isinstance(entries, HermMatrix):
            self._entries = entries._entries
            self._spectrum = entries._spectrum
            return
        arr = np.array(entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimMismatch(f"expected a square matrix, got shape {arr.shape}")
        if check:
            scale = max(np.abs(arr).max(initial=0.0), 1e-300)
            asym = np.abs(arr - arr.conj().T).max(initial=0.0)
            if asym > HERMITICITY_TOL * scale:
                raise NonHermitian(f"matrix is not Hermitian (asymmetry {asym:.3e})")
        arr = 0.5 * (arr + arr.conj().T)
        arr.setflags(write=False)
        self._entries = arr
        self._spectrum = None

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    @property
    def spectral_cache(self):
        return self._spectrum

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(eigenvalues ascending, unitary eigenvectors)``; cached."""
        spec = self._spectrum
        if spec is None:
            w, v = np.linalg.eigh(self._entries)
            v = _fix_phases(v)
            w.setflags(write=False)
            v.setflags(write=False)
            spec = (w, v)
            # idempotent fill: concurrent callers compute identical tuples
            self._spectrum = spec
        return spec

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eigh()[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self._entries)))

    def max_abs(self) -> float:
        return float(np.abs(self._entries).max(initial=0.0))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries.copy() if copy else self._entries
        return self._entries.astype(dtype)

    def __add__(self, other):
        return HermMatrix(self._entries + as_array(other), check=False)

    def __sub__(self, other):
        return HermMatrix(self._entries - as_array(other), check=False)

    def __mul__(self, scalar):
        if np.iscomplexobj(scalar) and np.imag(scalar) != 0:
            raise NonHermitian("only real scalars preserve hermiticity")
        return HermMatrix(self._entries * float(np.real(scalar)), check=False)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return self._entries @ as_array(other)

    def __repr__(self):
        return f"HermMatrix(dim={self.dim})"


class Projection(HermMatrix):
    """Orthogonal projection: ``P @ P == P == P^dagger`` within 1e-10."""

    __slots__ = ()

    def __init__(self, entries, check: bool = True):
        super().__init__(entries, check=check)
        if check:
            arr = self._entries
            if np.abs(arr @ arr - arr).max(initial=0.0) > 1e-10:
                raise NotProjection("P @ P differs from P")
            w = self.eigenvalues
            if np.any(np.minimum(np.abs(w), np.abs(w - 1.0)) > 1e-8):
                raise NotProjection("eigenvalues are not in {0, 1}")

    @property
    def rank(self) -> int:
        return int(round(self.trace()))


def as_array(a) -> np.ndarray:
    if isinstance(a, HermMatrix):
        return a.entries
    return np.asarray(a, dtype=np.complex128)


def as_herm(a, check: bool = True) -> HermMatrix:
    if isinstance(a, HermMatrix):
        return a
    return HermMatrix(a, check=check)


def eig_hermitian(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and phase-fixed unitary eigenvectors of ``a``."""
    return as_herm(a).eigh()


def support_cutoff(eigenvalues: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    top = float(eigenvalues[-1]) if eigenvalues.size else 0.0
    return tol * max(top, 1.0)


def _check_psd(w: np.ndarray, tol: float) -> None:
    if w.size == 0:
        return
    scale = max(float(np.abs(w).max()), 1.0)
    if w[0] < -tol * scale:
        raise NegativeSpectrum(f"negative eigenvalue {w[0]:.6g} below tolerance")


def fn_on_support(a, f: Callable[[np.ndarray], np.ndarray], tol: float = DEFAULT_TOL) -> HermMatrix:
    """Apply ``f`` to the eigenvalues of a PSD matrix on its support.

    ``f`` receives a 1-d array of the strictly-supported eigenvalues and must
    return an array of the same shape. Eigenvalues at or below the support
    cutoff contribute nothing.
    """
    A = as_herm(a)
    w, v = A.eigh()
    _check_psd(w, tol)
    keep = w > support_cutoff(w, tol)
    if not keep.any():
        return HermMatrix(np.zeros_like(A.entries), check=False)
    vk = v[:, keep]
    fw = np.asarray(f(w[keep]), dtype=np.float64)
    return HermMatrix((vk * fw) @ vk.conj().T, check=False)


def power(a, p: float, tol: float = DEFAULT_TOL) -> HermMatrix:
    """Pseudo-power ``a**p`` on the support (negative ``p`` allowed)."""
    return fn_on_support(a, lambda t: t**p, tol)


def logm(a, tol: float = DEFAULT_TOL) -> HermMatrix:
    """Logarithm on the support (zero on the kernel)."""
    return fn_on_support(a, np.log, tol)


def support_projection(a, tol: float = DEFAULT_TOL) -> Projection:
    A = as_herm(a)
    w, v = A.eigh()
    _check_psd(w, tol)
    vk = v[:, w > support_cutoff(w, tol)]
    return Projection(vk @ vk.conj().T, check=False)


def support_basis(a, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal columns spanning the support of a PSD matrix."""
    A = as_herm(a)
    w, v = A.eigh()
    _check_psd(w, tol)
    return v[:, w > support_cutoff(w, tol)]


def loewner_leq(a, b, tol: float = 1e-10) -> bool:
    """``a <= b`` in the Loewner order, i.e. ``min eig(b - a) >= -tol``."""
    A, B = as_array(a), as_array(b)
    if A.shape != B.shape:
        raise DimMismatch(f"shapes {A.shape} and {B.shape} differ")
    w = np.linalg.eigvalsh(B - A)
    return bool(w[0] >= -tol)


def projection_leq(p, q, tol: float = 1e-8) -> bool:
    """Range inclusion for projections: ``p <= q`` iff ``(1 - q) p = 0``."""
    P, Q = as_array(p), as_array(q)
    if P.shape != Q.shape:
        raise DimMismatch(f"shapes {P.shape} and {Q.shape} differ")
    if P.size == 0:
        return True
    return bool(np.linalg.norm(P - Q @ P, 2) <= tol)


def tensor(a, b) -> HermMatrix:
    return HermMatrix(np.kron(as_array(a), as_array(b)), check=False)


def tensor_power(a, n: int) -> HermMatrix:
    arr = as_array(a)
    return HermMatrix(reduce(np.kron, [arr] * n), check=False)


def direct_sum(blocks: Sequence) -> HermMatrix:
    arrs = [as_array(b) for b in blocks]
    if not arrs:
        return HermMatrix(np.zeros((0, 0)), check=False)
    return HermMatrix(scipy.linalg.block_diag(*arrs), check=False)


def commutator_norm(a, b) -> float:
    """Spectral norm of ``[a, b]``."""
    A, B = as_array(a), as_array(b)
    c = A @ B - B @ A
    return float(np.linalg.norm(c, 2)) if c.size else 0.0


def commute(a, b, tol: float = 1e-10) -> bool:
    """``||[a, b]|| <= tol * ||a|| * ||b||``."""
    A, B = as_array(a), as_array(b)
    if A.size == 0:
        return True
    na, nb = np.linalg.norm(A, 2), np.linalg.norm(B, 2)
    return commutator_norm(A, B) <= tol * max(na * nb, 1e-300)


def spectral_projections(a, rel_gap: float = 1e-10) -> tuple[np.ndarray, list[np.ndarray]]:
    """Group eigenvalues within ``rel_gap`` relative spacing.

    Returns the representative eigenvalue of each group and the matching
    orthonormal bases (columns).
    """
    A = as_herm(a)
    w, v = A.eigh()
    scale = max(float(np.abs(w).max(initial=0.0)), 1e-300)
    groups, values = [], []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > rel_gap * scale:
            groups.append(v[:, start:i])
            values.append(float(np.mean(w[start:i])))
            start = i
    return np.array(values), groups


def joint_eigenbasis(a, b, rel_gap: float = 1e-10) -> np.ndarray:
    """Unitary that diagonalizes ``b`` and, inside each eigenspace of ``b``, the compression of ``a``.

    For commuting ``a``, ``b`` this is a common eigenbasis.
    """
    _, groups = spectral_projections(b, rel_gap)
    A = as_array(a)
    cols = []
    for g in groups:
        if g.shape[1] == 1:
            cols.append(g)
            continue
        _, u = np.linalg.eigh(g.conj().T @ A @ g)
        cols.append(g @ u)
    return np.hstack(cols) if cols else np.zeros((0, 0), dtype=np.complex128)
