"""Random test objects: unitaries, density matrices, channels, PSD matrices."""

from __future__ import annotations

import numpy as np


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def ginibre(d: int, k: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    return (rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))) / np.sqrt(2)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar unitary via QR with the sign correction of Mezzadri."""
    z = ginibre(d, d, seed)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def random_density(d: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Density matrix ``G G^dagger / Tr`` with ``G`` a ``d x rank`` Ginibre matrix."""
    rank = d if rank is None else rank
    g = ginibre(d, rank, seed)
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.real(np.trace(rho))


def random_density_on(basis: np.ndarray, seed=None) -> np.ndarray:
    """Full-rank density supported exactly on the span of the orthonormal ``basis`` columns."""
    k = basis.shape[1]
    inner = random_density(k, seed=seed)
    rho = basis @ inner @ basis.conj().T
    return 0.5 * (rho + rho.conj().T)


def random_psd(d: int, seed=None) -> np.ndarray:
    g = ginibre(d, d, seed)
    return g @ g.conj().T


def random_hermitian(d: int, seed=None) -> np.ndarray:
    g = ginibre(d, d, seed)
    return 0.5 * (g + g.conj().T)


def random_kraus(d_in: int, d_out: int, rank: int, seed=None) -> list[np.ndarray]:
    """Kraus operators ``K_i`` (``d_out x d_in``) with ``sum K_i^dagger K_i = 1``."""
    rng = _rng(seed)
    g = ginibre(d_out * rank, d_in, rng)
    v, _ = np.linalg.qr(g)
    return [v[i * d_out:(i + 1) * d_out, :] for i in range(rank)]


def apply_channel(kraus, rho) -> np.ndarray:
    rho = np.asarray(rho)
    out = sum(k @ rho @ k.conj().T for k in kraus)
    return 0.5 * (out + out.conj().T)


def random_commuting_pair(d: int, seed=None, rank_rho: int | None = None):
    """Two densities diagonal in a common random basis."""
    rng = _rng(seed)
    u = random_unitary(d, rng)
    p = rng.random(d) + 0.05
    if rank_rho is not None:
        p[rank_rho:] = 0.0
    q = rng.random(d) + 0.05
    p, q = p / p.sum(), q / q.sum()
    rho = (u * p) @ u.conj().T
    sigma = (u * q) @ u.conj().T
    return 0.5 * (rho + rho.conj().T), 0.5 * (sigma + sigma.conj().T), p, q


def random_degenerate_pair(d: int, seed=None):
    """``(rho, sigma, gamma)`` with ``rho = gamma sigma s(rho)`` and ``[s(rho), sigma] = 0``.

    ``sigma`` puts a random mass ``c`` on a random subspace of random rank and
    ``rho`` is its normalized compression there, so ``gamma = 1 / c``.
    """
    rng = _rng(seed)
    u = random_unitary(d, rng)
    k = int(rng.integers(1, d + 1))
    c = 1.0 if k == d else float(rng.uniform(0.05, 0.95))
    inner = random_density(k, seed=rng)
    blocks = np.zeros((d, d), dtype=complex)
    blocks[:k, :k] = c * inner
    if k < d:
        blocks[k:, k:] = (1 - c) * random_density(d - k, seed=rng)
    sigma = u @ blocks @ u.conj().T
    rho = u[:, :k] @ inner @ u[:, :k].conj().T
    return 0.5 * (rho + rho.conj().T), 0.5 * (sigma + sigma.conj().T), 1.0 / c
