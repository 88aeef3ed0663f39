"""Quantum operations: Kraus application, Choi-Jamiolkowski form, composition.

The Choi operator is J(Φ) = Σ_{x,y} Φ(|x⟩⟨y|) ⊗ |x⟩⟨y|, living on out ⊗ in
with the output space as the slow factor.  J(Φ) is rank 1 exactly when Φ is
unitary.
"""

from __future__ import annotations

import numpy as np

from .linalg import partial_trace_matrix
from .types import ChannelKraus, ChoiMatrix, DensityOperator, as_matrix


def apply_channel(ch: ChannelKraus, rho: DensityOperator) -> DensityOperator:
    if rho.dim != ch.in_dim:
        raise ValueError("state dimension does not match channel input")
    out = np.zeros((ch.out_dim, ch.out_dim), dtype=complex)
    for k in ch.kraus_ops:
        out += k @ rho.matrix @ k.conj().T
    return DensityOperator(out)


def apply_channel_matrix(ch: ChannelKraus, m: np.ndarray) -> np.ndarray:
    """Kraus action on an arbitrary (not necessarily normalized) operator."""
    m = as_matrix(m)
    return sum(k @ m @ k.conj().T for k in ch.kraus_ops)


def choi(ch: ChannelKraus) -> ChoiMatrix:
    """J(Φ) = Σ_k vec(K_k) vec(K_k)† with row-major vec."""
    j = np.zeros((ch.out_dim * ch.in_dim,) * 2, dtype=complex)
    for k in ch.kraus_ops:
        w = k.reshape(-1)
        j += np.outer(w, w.conj())
    return ChoiMatrix(j, ch.in_dim, ch.out_dim)


def choi_of_unitary(u: np.ndarray) -> ChoiMatrix:
    u = as_matrix(u)
    w = u.reshape(-1)
    return ChoiMatrix(np.outer(w, w.conj()), u.shape[0], u.shape[0])


def choi_apply(j: ChoiMatrix, rho: DensityOperator) -> DensityOperator:
    """Apply a channel given in Choi form: Φ(ρ) = Tr_in[J (I ⊗ ρᵀ)]."""
    if rho.dim != j.in_dim:
        raise ValueError("state dimension does not match Choi input")
    big = j.matrix @ np.kron(np.eye(j.out_dim), rho.matrix.T)
    out = partial_trace_matrix(big, (j.out_dim, j.in_dim), keep=(0,))
    return DensityOperator(out)


def compose(second: ChannelKraus, first: ChannelKraus) -> ChannelKraus:
    """Channel composition second ∘ first."""
    if first.out_dim != second.in_dim:
        raise ValueError("channel dimensions do not compose")
    ops = [k2 @ k1 for k2 in second.kraus_ops for k1 in first.kraus_ops]
    return ChannelKraus(ops)


def identity_channel(dim: int) -> ChannelKraus:
    return ChannelKraus([np.eye(dim, dtype=complex)])


def unitary_channel(u: np.ndarray) -> ChannelKraus:
    return ChannelKraus([as_matrix(u)])


def depolarizing_channel(dim: int, p: float) -> ChannelKraus:
    """ρ ↦ (1−p)ρ + p·I/dim in Kraus form (Heisenberg-Weyl twirl)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("depolarizing strength must be in [0, 1]")
    omega = np.exp(2j * np.pi / dim)
    shift = np.roll(np.eye(dim, dtype=complex), 1, axis=0)
    clock = np.diag(omega ** np.arange(dim))
    ops = []
    for a in range(dim):
        for b in range(dim):
            w = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            weight = np.sqrt(1 - p + p / dim**2) if (a, b) == (0, 0) else np.sqrt(p) / dim
            ops.append(weight * w)
    return ChannelKraus(ops)
