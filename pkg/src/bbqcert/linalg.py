"""Dense linear algebra: tensor products, partial traces, Schmidt form,
fidelity and trace distance.

Index convention: the first listed factor is the slow (leftmost) one.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .types import TOL_PSD, DensityOperator, PureState, as_matrix


def tensor(a, b) -> np.ndarray:
    """Kronecker product with the first argument as the slow factor."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def tensor_all(mats: Iterable) -> np.ndarray:
    out = None
    for m in mats:
        out = np.asarray(m, dtype=complex) if out is None else tensor(out, m)
    if out is None:
        raise ValueError("tensor_all needs at least one factor")
    return out


def partial_trace_matrix(m: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out all sites not in ``keep`` from a square matrix over ``dims``."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or any(k < 0 or k >= n for k in keep):
        raise ValueError(f"invalid site index set {keep} for {n} sites")
    m = as_matrix(m)
    if m.shape[0] != int(np.prod(dims)):
        raise ValueError("matrix dimension does not match site dimensions")
    t = m.reshape(dims + dims)
    # Contract row/column axes of traced-out sites from the right; walking in
    # decreasing site order keeps axis `site` and its column twin at
    # `site + ndim//2` valid at every step.
    for site in reversed(range(n)):
        if site not in keep:
            t = np.trace(t, axis1=site, axis2=site + t.ndim // 2)
    d_keep = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d_keep, d_keep)


def partial_trace(rho: DensityOperator, keep: Sequence[int]) -> DensityOperator:
    """Reduced density operator on the kept sites (trace preserved)."""
    red = partial_trace_matrix(rho.matrix, rho.site_dims, keep)
    keep = sorted(set(int(k) for k in keep))
    return DensityOperator(red, [rho.site_dims[k] for k in keep])


def schmidt(psi: PureState):
    """Schmidt decomposition of a bipartite pure state.

    Returns ``(coeffs, basis_a, basis_b)`` with coefficients sorted in
    decreasing order, ``basis_a``/``basis_b`` column matrices, and the phase of
    each Schmidt vector fixed so its first non-negligible A-side component is
    positive real.  Reconstruction: ``psi = Σ_i coeffs[i] a_i ⊗ b_i``.
    """
    if len(psi.site_dims) != 2:
        raise ValueError("schmidt requires exactly two sites")
    da, db = psi.site_dims
    m = psi.amplitudes.reshape(da, db)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    for i in range(s.size):
        col = u[:, i]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            phase = col[nz[0]] / abs(col[nz[0]])
            u[:, i] = col * phase.conj()
            vh[i, :] = vh[i, :] * phase
    return s.copy(), u, vh.T.copy()


def sqrt_psd(m: np.ndarray, tol: float = TOL_PSD) -> np.ndarray:
    """Hermitian square root with slightly negative eigenvalues clamped to 0."""
    m = as_matrix(m)
    vals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    if vals[0] < -tol:
        raise ValueError(f"matrix has eigenvalue {vals[0]} < -{tol}, not PSD")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Uhlmann fidelity (tr√(√ρ σ √ρ))², in [0, 1]."""
    if rho.dim != sigma.dim:
        raise ValueError("fidelity requires equal dimensions")
    r = sqrt_psd(rho.matrix)
    inner = r @ sigma.matrix @ r
    vals = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    f = float(np.sum(np.sqrt(np.clip(vals, 0.0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def fidelity_with_pure(psi: np.ndarray, sigma: np.ndarray) -> float:
    """⟨ψ|σ|ψ⟩ shortcut for a pure reference state."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return float(np.real(psi.conj() @ (np.asarray(sigma, dtype=complex) @ psi)))


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """(1/2) tr|ρ − σ|."""
    if rho.dim != sigma.dim:
        raise ValueError("trace_distance requires equal dimensions")
    return trace_norm(rho.matrix - sigma.matrix) / 2


def trace_norm(m: np.ndarray) -> float:
    m = as_matrix(m)
    if np.max(np.abs(m - m.conj().T)) <= 1e-12:
        return float(np.sum(np.abs(np.linalg.eigvalsh(m))))
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential (scipy's scaling-and-squaring Padé approximant)."""
    return scipy.linalg.expm(np.asarray(m, dtype=complex))


def evolve_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """exp(−iHt) for Hermitian H via eigendecomposition."""
    h = as_matrix(h)
    vals, vecs = np.linalg.eigh((h + h.conj().T) / 2)
    return (vecs * np.exp(-1j * vals * t)) @ vecs.conj().T


def purify(rho: DensityOperator) -> PureState:
    """Purification Σ √λ_i |e_i⟩|i⟩ with the reference register as site 2."""
    vals, vecs = np.linalg.eigh(rho.matrix)
    vals = np.clip(vals, 0.0, None)
    keep = vals > 1e-15
    vals, vecs = vals[keep], vecs[:, keep]
    r = vals.size
    amps = np.zeros(rho.dim * r, dtype=complex)
    for i in range(r):
        amps += np.sqrt(vals[i]) * np.kron(vecs[:, i], _basis_vec(r, i))
    amps /= np.linalg.norm(amps)
    return PureState(amps, (rho.dim, r))


def _basis_vec(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


def basis_vector(dim: int, i: int) -> np.ndarray:
    return _basis_vec(dim, i)


# Pauli matrices and common observables.
I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
XZ = PAULI_X @ PAULI_Z  # [[0, -1], [1, 0]]


def bell_phi_plus(n_pairs: int = 1) -> PureState:
    """Maximally entangled Σ_x |x⟩|x⟩/√d grouped as (A qubits | B qubits)."""
    d = 2 ** n_pairs
    m = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return PureState(m, (d, d))
