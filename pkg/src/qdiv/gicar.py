"""Classical Renyi quantities for measures on [0, 1] and the GICAR binomial-mixture limit.

A trace state of the level-``n`` GICAR algebra is a mixture of binomial
product states, so its sandwiched quasi-entropy against another one is

    sum_k C(n, k) m1(n, k)^alpha m2(n, k)^(1 - alpha),   m(n, k) = int lam^k (1 - lam)^(n - k) dmu,

which tends to the classical ``int (dmu1/dnu)^alpha (dmu2/dnu)^(1 - alpha) dnu`` as
``n`` grows. Everything is evaluated in the log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from . import kernels
from .divergences import _check_alpha, classical_q
from .errors import BadIndex, ValidationError

QUADRATURE_NODES = 256
_ATOM_TOL = 1e-12


def gauss_legendre_01(n: int = QUADRATURE_NODES) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


_NODES, _WEIGHTS = gauss_legendre_01()


@dataclass(frozen=True)
class UnitIntervalMeasure:
    """Finite positive measure on ``[0, 1]``: atoms plus a density sampled at the shared Gauss-Legendre nodes."""

    atoms: tuple[tuple[float, float], ...] = ()
    density: np.ndarray | None = None

    def __post_init__(self):
        atoms = tuple(sorted((float(x), float(m)) for x, m in self.atoms))
        for x, m in atoms:
            if not 0.0 <= x <= 1.0:
                raise ValidationError(f"atom location {x} outside [0, 1]")
            if m <= 0:
                raise ValidationError(f"atom mass {m} must be positive")
        locs = [x for x, _ in atoms]
        if any(b - a <= _ATOM_TOL for a, b in zip(locs, locs[1:])):
            raise ValidationError("atom locations must be distinct")
        dens = None
        if self.density is not None:
            dens = np.asarray(self.density, dtype=np.float64)
            if dens.shape != _NODES.shape:
                raise ValidationError(f"density must be sampled at the {QUADRATURE_NODES} shared nodes")
            if np.any(dens < 0):
                raise ValidationError("density values must be nonnegative")
            dens.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "density", dens)

    @classmethod
    def dirac(cls, x: float) -> UnitIntervalMeasure:
        return cls(atoms=((x, 1.0),))

    @classmethod
    def uniform(cls, mass: float = 1.0) -> UnitIntervalMeasure:
        return cls(density=np.full(_NODES.shape, float(mass)))

    @classmethod
    def from_function(cls, f, atoms=()) -> UnitIntervalMeasure:
        return cls(atoms=tuple(atoms), density=np.asarray(f(_NODES), dtype=np.float64))

    @property
    def total_mass(self) -> float:
        m = sum(a for _, a in self.atoms)
        if self.density is not None:
            m += float(_WEIGHTS @ self.density)
        return m

    def is_probability(self, tol: float = 1e-10) -> bool:
        return abs(self.total_mass - 1.0) <= tol

    def weighted_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Locations and weights of the discretized measure (atoms, then quadrature nodes)."""
        xs = [x for x, _ in self.atoms]
        ws = [m for _, m in self.atoms]
        if self.density is not None:
            xs.extend(_NODES)
            ws.extend(_WEIGHTS * self.density)
        return np.asarray(xs, dtype=np.float64), np.asarray(ws, dtype=np.float64)

    def to_json(self) -> dict:
        out: dict = {"atoms": [[x, m] for x, m in self.atoms]}
        if self.density is not None:
            out["density"] = {"kind": "samples", "nodes": _NODES.tolist(), "values": self.density.tolist()}
        return out

    @classmethod
    def from_json(cls, obj: dict) -> UnitIntervalMeasure:
        atoms = tuple((float(x), float(m)) for x, m in obj.get("atoms", []))
        spec = obj.get("density")
        if spec is None:
            return cls(atoms=atoms)
        kind = spec.get("kind")
        if kind == "uniform":
            mass = spec.get("mass", 1.0 - sum(m for _, m in atoms))
            return cls(atoms=atoms, density=np.full(_NODES.shape, float(mass)))
        if kind == "samples":
            nodes = np.asarray(spec["nodes"], dtype=np.float64)
            vals = np.asarray(spec["values"], dtype=np.float64)
            if nodes.shape != vals.shape or nodes.ndim != 1 or nodes.size < 2:
                raise ValidationError("density samples need matching 1-d node and value lists")
            order = np.argsort(nodes)
            return cls(atoms=atoms, density=np.interp(_NODES, nodes[order], vals[order]))
        raise ValidationError(f"unknown density kind {kind!r}")


def _log_moments(mu: UnitIntervalMeasure, n: int) -> np.ndarray:
    x, w = mu.weighted_points()
    keep = w > 0
    x, w = x[keep], w[keep]
    with np.errstate(divide="ignore"):
        return np.asarray(kernels.log_binom_moments(
            np.log(w), np.log(x), np.log1p(-x), int(n)
        ))


def binom_moment(mu: UnitIntervalMeasure, n: int, k: int) -> float:
    """``log int lam^k (1 - lam)^(n - k) dmu``; ``-inf`` when the integral vanishes."""
    if n < 0 or not 0 <= k <= n:
        raise BadIndex(f"need 0 <= k <= n, got k={k}, n={n}")
    return float(_log_moments(mu, n)[k])


def log_binomials(n: int) -> np.ndarray:
    k = np.arange(n + 1)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def gicar_q(mu1: UnitIntervalMeasure, mu2: UnitIntervalMeasure, n: int, alpha: float) -> float:
    """Level-``n`` quasi-entropy ``sum_k C(n,k) m1^alpha m2^(1-alpha)``."""
    alpha = _check_alpha(alpha, 0.0)
    if n < 0:
        raise BadIndex(f"n={n} must be nonnegative")
    m1 = _log_moments(mu1, n)
    m2 = _log_moments(mu2, n)
    lc = log_binomials(n)
    pos1 = m1 > -np.inf
    pos2 = m2 > -np.inf
    if alpha > 1 and np.any(pos1 & ~pos2):
        return math.inf
    both = pos1 & pos2
    if alpha == 0.0:
        # 0-convention: sum over the support of the first argument
        terms = lc[both] + m2[both]
    else:
        terms = lc[both] + alpha * m1[both] + (1.0 - alpha) * m2[both]
    if terms.size == 0:
        return 0.0
    with np.errstate(over="ignore"):
        return float(np.exp(logsumexp(terms)))


def _merge_atoms(mu1: UnitIntervalMeasure, mu2: UnitIntervalMeasure) -> tuple[np.ndarray, np.ndarray]:
    locs = sorted({x for x, _ in mu1.atoms} | {x for x, _ in mu2.atoms})
    merged: list[float] = []
    for x in locs:
        if not merged or x - merged[-1] > _ATOM_TOL:
            merged.append(x)
    a1 = np.zeros(len(merged))
    a2 = np.zeros(len(merged))
    idx = np.asarray(merged)
    for arr, mu in ((a1, mu1), (a2, mu2)):
        for x, m in mu.atoms:
            arr[int(np.argmin(np.abs(idx - x)))] += m
    return a1, a2


def classical_renyi_q(mu1: UnitIntervalMeasure, mu2: UnitIntervalMeasure, alpha: float) -> float:
    """``int (dmu1/dnu)^alpha (dmu2/dnu)^(1-alpha) dnu`` with ``nu = mu1 + mu2``.

    Atoms and densities are mutually singular parts; atoms are compared on
    the merged location set and densities pointwise at the shared nodes.
    """
    alpha = _check_alpha(alpha, 0.0)
    a1, a2 = _merge_atoms(mu1, mu2)
    total = classical_q(a1, a2, alpha) if a1.size else 0.0
    if math.isinf(total):
        return total
    f1 = mu1.density if mu1.density is not None else np.zeros_like(_NODES)
    f2 = mu2.density if mu2.density is not None else np.zeros_like(_NODES)
    if mu1.density is not None or mu2.density is not None:
        if alpha > 1 and np.any((f1 > 0) & (f2 == 0)):
            return math.inf
        both = (f1 > 0) & (f2 > 0)
        if alpha == 0.0:
            total += float(_WEIGHTS[both] @ f2[both])
        else:
            total += float(_WEIGHTS[both] @ (f1[both] ** alpha * f2[both] ** (1.0 - alpha)))
    return total


def gicar_convergence(mu1, mu2, alpha: float, n_list) -> list[tuple[int, float, float]]:
    """``(n, gicar_q(n), |gicar_q(n) - classical_renyi_q|)`` for each ``n``."""
    target = classical_renyi_q(mu1, mu2, alpha)
    out = []
    for n in n_list:
        q = gicar_q(mu1, mu2, int(n), alpha)
        gap = abs(q - target) if math.isfinite(target) and math.isfinite(q) else (
            0.0 if q == target else math.inf
        )
        out.append((int(n), q, gap))
    return out
