"""Seeded random generators for states, unitaries, observables and channels."""

from __future__ import annotations

import numpy as np

from .types import ChannelKraus, DensityOperator, Observable, Povm, PureState


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(dim: int, rng) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    rng = rng_from(rng)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pure_state(site_dims, rng) -> PureState:
    rng = rng_from(rng)
    dim = int(np.prod(site_dims))
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v), site_dims)


def random_density(site_dims, rng, rank: int | None = None) -> DensityOperator:
    """Mixed state from a normalized Ginibre product G G†."""
    rng = rng_from(rng)
    dim = int(np.prod(site_dims))
    k = rank or dim
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m), site_dims)


def random_dichotomic(dim: int, rng, n_plus: int | None = None) -> Observable:
    """Random ±1 observable U diag(±1) U† with a random (or given) signature."""
    rng = rng_from(rng)
    u = haar_unitary(dim, rng)
    if n_plus is None:
        n_plus = int(rng.integers(1, dim)) if dim > 1 else 1
    signs = np.array([1.0] * n_plus + [-1.0] * (dim - n_plus))
    return Observable((u * signs) @ u.conj().T)


def random_povm(dim: int, n_outcomes: int, rng) -> Povm:
    """Random POVM from normalized Wishart blocks."""
    rng = rng_from(rng)
    blocks = []
    for _ in range(n_outcomes):
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        blocks.append(g @ g.conj().T)
    total = sum(blocks)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.conj().T
    return Povm([inv_sqrt @ b @ inv_sqrt for b in blocks])


def random_channel(in_dim: int, out_dim: int, n_kraus: int, rng) -> ChannelKraus:
    """Random CPTP map from the first in_dim columns of a Haar unitary."""
    rng = rng_from(rng)
    big = haar_unitary(out_dim * n_kraus, rng)
    iso = big[:, :in_dim]
    ops = [iso[k * out_dim:(k + 1) * out_dim, :] for k in range(n_kraus)]
    return ChannelKraus(ops)
