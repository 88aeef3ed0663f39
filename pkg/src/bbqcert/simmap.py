"""Real-Hilbert-space and conjugation-mixture simulations of experiments.

Two families of transforms, both preserving all outcome statistics:

* the real simulation, built on the embedding a ↦ aᴿ·I + aᴵ·XZ that doubles
  the dimension and removes every imaginary entry, and
* the conjugation simulation C(M) = |0⟩⟨0|⊗M + |1⟩⟨1|⊗M*, which mixes an
  experiment with its complex conjugate under control of one extra qubit.

The extra qubit (or, for multiparty systems, the block of per-party qubits)
is always the slow tensor factor.  Complex conjugation is taken in the stored
computational basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (I2, PAULI_Z, XZ, basis_vector, tensor, tensor_all)
from .types import (ChannelKraus, DensityOperator, Experiment, Observable,
                    Povm, PureState, as_matrix)


@dataclass(frozen=True)
class SimulationParams:
    """Weight a on the reference branch and cross term c, |c| ≤ √(a(1−a))."""

    a: float
    c: complex = 0.0

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise ValueError(f"branch weight a={self.a} outside [0, 1]")
        limit = np.sqrt(self.a * (1.0 - self.a))
        if abs(self.c) > limit + 1e-12:
            raise ValueError(f"|c|={abs(self.c)} exceeds sqrt(a(1-a))={limit}")


# ---------------------------------------------------------------------------
# Real simulation R(·)
# ---------------------------------------------------------------------------

def real_map_operator(m) -> np.ndarray:
    """R(M) = I⊗Re(M) + XZ⊗Im(M): a real matrix of doubled dimension."""
    m = as_matrix(m)
    return tensor(I2, m.real) + tensor(XZ, m.imag)


def real_map_density(rho: DensityOperator) -> DensityOperator:
    """Simulation state R(ρ)/2 (trace renormalized)."""
    return DensityOperator(real_map_operator(rho.matrix) / 2,
                           (2,) + tuple(rho.site_dims))


def real_map_povm(p: Povm) -> Povm:
    return Povm([real_map_operator(e) for e in p.elements])


def real_map_kraus(ch: ChannelKraus) -> ChannelKraus:
    ops = []
    for k in ch.kraus_ops:
        ops.append(np.block([[k.real, -k.imag], [k.imag, k.real]]))
    return ChannelKraus(ops)


def real_map_hamiltonian_generator(h: Observable | np.ndarray) -> np.ndarray:
    """Generator G of the real-side evolution exp(Gt), G = −(XZ⊗I)·R(H).

    G is real antisymmetric, so exp(Gt) is real orthogonal and tracks
    exp(−iHt) on the doubled space.
    """
    hm = h.matrix if isinstance(h, Observable) else as_matrix(h)
    return -tensor(XZ, hm.real) + tensor(I2, hm.imag)


def real_pure_split(psi: PureState) -> tuple[PureState, PureState]:
    """The two orthonormal columns of R(|ψ⟩), each a valid simulation state."""
    amps = psi.amplitudes
    dims = (2,) + tuple(psi.site_dims)
    u = np.concatenate([amps.real, amps.imag]).astype(complex)
    v = np.concatenate([-amps.imag, amps.real]).astype(complex)
    return PureState(u, dims), PureState(v, dims)


def multiparty_real_state(k: int) -> tuple[PureState, PureState]:
    """Encoded qubit pair (|0̄⟩, |1̄⟩) on k ancilla qubits.

    The span is stabilized by −(XZ)_m(XZ)_n for all m ≠ n, and XZ applied to
    any single qubit acts as the logical XZ: |0̄⟩ → |1̄⟩, |1̄⟩ → −|0̄⟩.
    """
    if k < 1:
        raise ValueError("need at least one party")
    dim = 2 ** k
    zero = np.zeros(dim, dtype=complex)
    one = np.zeros(dim, dtype=complex)
    for x in range(dim):
        h = bin(x).count("1")
        if h % 2 == 0:
            zero[x] = (-1.0) ** (h // 2)
        else:
            one[x] = (-1.0) ** ((h - 1) // 2)
    norm = np.sqrt(2.0 ** (k - 1))
    dims = (2,) * k
    return PureState(zero / norm, dims), PureState(one / norm, dims)


def _embed(op: np.ndarray, site: int, dims) -> np.ndarray:
    mats = [np.eye(d, dtype=complex) for d in dims]
    mats[site] = op
    return tensor_all(mats)


def multiparty_real_operator(m, party: int, site_dims) -> np.ndarray:
    """Local real-simulation operator for one party of a k-party system.

    Acts on the ancilla block (k qubits, slow factor) tensored with the full
    system: I⊗Re(M)_party + (XZ)_party⊗Im(M)_party.
    """
    m = as_matrix(m)
    k = len(site_dims)
    anc_dim = 2 ** k
    re_part = _embed(m.real, party, site_dims)
    im_part = _embed(m.imag, party, site_dims)
    xz_anc = _embed(XZ, party, (2,) * k)
    return tensor(np.eye(anc_dim), re_part) + tensor(xz_anc, im_part)


def multiparty_real_sim_state(psi: PureState) -> PureState:
    """Encoded simulation state |0̄⟩⊗Re(ψ) + |1̄⟩⊗Im(ψ) for k = #sites parties."""
    k = len(psi.site_dims)
    zero_bar, one_bar = multiparty_real_state(k)
    amps = (np.kron(zero_bar.amplitudes, psi.amplitudes.real)
            + np.kron(one_bar.amplitudes, psi.amplitudes.imag)).astype(complex)
    return PureState(amps, (2,) * k + tuple(psi.site_dims))


# ---------------------------------------------------------------------------
# Conjugation simulation C(·)
# ---------------------------------------------------------------------------

def conj_map_operator(m) -> np.ndarray:
    """C(M) = |0⟩⟨0|⊗M + |1⟩⟨1|⊗M* = I⊗Re(M) + iZ⊗Im(M)."""
    m = as_matrix(m)
    return tensor(I2, m.real) + tensor(1j * PAULI_Z, m.imag)


def conj_sim_state(psi: PureState, params: SimulationParams) -> DensityOperator:
    """Four-term mixture of |0⟩|ψ⟩ and |1⟩|ψ*⟩ with weights (a, 1−a, c, c*)."""
    v0 = np.kron(basis_vector(2, 0), psi.amplitudes)
    v1 = np.kron(basis_vector(2, 1), psi.amplitudes.conj())
    a, c = params.a, complex(params.c)
    rho = (a * np.outer(v0, v0.conj()) + (1 - a) * np.outer(v1, v1.conj())
           + c * np.outer(v0, v1.conj()) + np.conj(c) * np.outer(v1, v0.conj()))
    return DensityOperator(rho, (2,) + tuple(psi.site_dims))


def conj_sim_povm(p: Povm) -> Povm:
    return Povm([conj_map_operator(e) for e in p.elements])


def conj_sim_hamiltonian(h: Observable | np.ndarray) -> np.ndarray:
    """H' = |0⟩⟨0|⊗H − |1⟩⟨1|⊗H*, so exp(−iH't) = C(exp(−iHt))."""
    hm = h.matrix if isinstance(h, Observable) else as_matrix(h)
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return tensor(p0, hm) - tensor(p1, hm.conj())


def conj_sim_multiparty_state(psi: PureState, alpha: complex, beta: complex,
                              k: int | None = None) -> PureState:
    """GHZ-like α|0…0⟩|ψ⟩ + β|1…1⟩|ψ*⟩ with one control qubit per party."""
    if k is None:
        k = len(psi.site_dims)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-9:
        raise ValueError("|alpha|^2 + |beta|^2 must be 1")
    dim = 2 ** k
    amps = (alpha * np.kron(basis_vector(dim, 0), psi.amplitudes)
            + beta * np.kron(basis_vector(dim, dim - 1), psi.amplitudes.conj()))
    return PureState(amps, (2,) * k + tuple(psi.site_dims))


def conj_multiparty_operator(m, party: int, site_dims) -> np.ndarray:
    """Local conjugation-simulation operator: I⊗Re(M) + i·Z_party⊗Im(M)."""
    m = as_matrix(m)
    k = len(site_dims)
    re_part = _embed(m.real, party, site_dims)
    im_part = _embed(m.imag, party, site_dims)
    z_anc = _embed(PAULI_Z, party, (2,) * k)
    return tensor(np.eye(2 ** k), re_part) + 1j * tensor(z_anc, im_part)


def real_from_conj_basis_change(k: int = 1) -> np.ndarray:
    """Per-qubit unitary (1/√2)[[1, 1], [−i, i]], tensored over k ancillas.

    Conjugating C-simulation operators by (U ⊗ I_system) produces the real
    simulation operators, and maps the α=β=1/√2 GHZ-like state to the
    encoded real simulation state.
    """
    if k < 1:
        raise ValueError("need at least one ancilla qubit")
    u1 = np.array([[1, 1], [-1j, 1j]], dtype=complex) / np.sqrt(2)
    return tensor_all([u1] * k)


# ---------------------------------------------------------------------------
# Bipartite experiment-level wrappers
# ---------------------------------------------------------------------------

def _reorder_vector(v: np.ndarray, dims, perm) -> np.ndarray:
    return v.reshape(tuple(dims)).transpose(perm).reshape(-1)


def _reorder_matrix(m: np.ndarray, dims, perm) -> np.ndarray:
    n = len(dims)
    full = m.reshape(tuple(dims) * 2)
    axes = list(perm) + [p + n for p in perm]
    d = int(np.prod(dims))
    return full.transpose(axes).reshape(d, d)


def _pure_state_of(exp: Experiment) -> PureState:
    vals, vecs = np.linalg.eigh(exp.state.matrix)
    if vals[-1] < 1.0 - 1e-9:
        raise ValueError("experiment state is not pure")
    return PureState(vecs[:, -1], exp.state.site_dims)


def conj_sim_bipartite_experiment(exp: Experiment, params: SimulationParams) -> Experiment:
    """C-simulation of a bipartite experiment with a pure state.

    Each site gains one control qubit (slow factor within the site); the
    logical control is shared across the two sites, so all operators stay
    local.  Site dimensions double.
    """
    psi = _pure_state_of(exp)
    da, db = psi.site_dims
    # Build in layout (qA, qB, A, B), then group per site: (qA, A, qB, B).
    v0 = np.kron(basis_vector(4, 0), psi.amplitudes)
    v1 = np.kron(basis_vector(4, 3), psi.amplitudes.conj())
    perm, dims = (0, 2, 1, 3), (2, 2, da, db)
    v0 = _reorder_vector(v0, dims, perm)
    v1 = _reorder_vector(v1, dims, perm)
    a, c = params.a, complex(params.c)
    rho = (a * np.outer(v0, v0.conj()) + (1 - a) * np.outer(v1, v1.conj())
           + c * np.outer(v0, v1.conj()) + np.conj(c) * np.outer(v1, v0.conj()))
    state = DensityOperator(rho, (2 * da, 2 * db))
    obs_a = [Observable(conj_map_operator(o.matrix)) for o in exp.obs_a]
    obs_b = [Observable(conj_map_operator(o.matrix)) for o in exp.obs_b]
    return Experiment(state, obs_a, obs_b)


def real_sim_bipartite_experiment(exp: Experiment) -> Experiment:
    """Two-party real simulation of a bipartite experiment with a pure state."""
    psi = _pure_state_of(exp)
    da, db = psi.site_dims
    zero_bar, one_bar = multiparty_real_state(2)
    amps = (np.kron(zero_bar.amplitudes, psi.amplitudes.real)
            + np.kron(one_bar.amplitudes, psi.amplitudes.imag)).astype(complex)
    perm, dims = (0, 2, 1, 3), (2, 2, da, db)
    amps = _reorder_vector(amps, dims, perm)
    state = PureState(amps, (2 * da, 2 * db)).to_density()
    def local(o):
        return Observable(tensor(I2, o.matrix.real) + tensor(XZ, o.matrix.imag))
    return Experiment(state, [local(o) for o in exp.obs_a],
                      [local(o) for o in exp.obs_b])
