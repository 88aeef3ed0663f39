"""Validated quantum data model shared by every other module.

Matrices are plain complex numpy arrays (row-major); the classes below wrap
them with invariant checks and freeze the underlying buffers.  Tensor-product
index convention, used everywhere in the package: site A is the slow
(leftmost) Kronecker factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Default tolerances (double-precision spectral error budgets).  Every check
# that uses one accepts an override.
TOL_NORM = 1e-9
TOL_HERM = 1e-9
TOL_PSD = 1e-9
TOL_EIG = 1e-7
TOL_NS = 1e-9


def as_matrix(m, square: bool = True) -> np.ndarray:
    """Coerce to a finite complex 2-D array (the ComplexMatrix contract)."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains NaN or Inf entries")
    return arr


def as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector contains NaN or Inf entries")
    return arr


def is_hermitian(m: np.ndarray, tol: float = TOL_HERM) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def min_eig(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(m)[0])


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def _site_dims(dims: Sequence[int] | None, dim: int) -> tuple[int, ...]:
    if dims is None:
        return (dim,)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError("site dimensions must be positive")
    if int(np.prod(dims)) != dim:
        raise ValueError(f"site_dims {dims} do not multiply to dim {dim}")
    return dims


@dataclass(frozen=True)
class PureState:
    """Normalized state vector with a declared site split."""

    amplitudes: np.ndarray
    site_dims: tuple[int, ...] = ()

    def __init__(self, amplitudes, site_dims=None, tol: float = TOL_NORM):
        amps = as_vector(amplitudes)
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > tol:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {tol}")
        object.__setattr__(self, "amplitudes", _freeze(amps))
        object.__setattr__(self, "site_dims", _site_dims(site_dims, amps.size))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def to_density(self) -> "DensityOperator":
        rho = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityOperator(rho, self.site_dims)

    def conj(self) -> "PureState":
        return PureState(self.amplitudes.conj(), self.site_dims)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace, positive-semidefinite operator."""

    matrix: np.ndarray
    site_dims: tuple[int, ...] = ()

    def __init__(self, matrix, site_dims=None, tol_herm: float = TOL_HERM,
                 tol_norm: float = TOL_NORM, tol_psd: float = TOL_PSD):
        m = as_matrix(matrix)
        if not is_hermitian(m, tol_herm):
            raise ValueError("density matrix is not Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > tol_norm:
            raise ValueError(f"density matrix trace {tr} deviates from 1")
        lo = min_eig(m)
        if lo < -tol_psd:
            raise ValueError(f"density matrix has eigenvalue {lo} < -{tol_psd}")
        object.__setattr__(self, "matrix", _freeze(m))
        object.__setattr__(self, "site_dims", _site_dims(site_dims, m.shape[0]))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class Observable:
    """Hermitian measurement observable, optionally constrained to ±1 spectrum."""

    matrix: np.ndarray
    dichotomic: bool = True

    def __init__(self, matrix, dichotomic: bool = True,
                 tol_herm: float = TOL_HERM, tol_eig: float = TOL_EIG):
        m = as_matrix(matrix)
        if not is_hermitian(m, tol_herm):
            raise ValueError("observable is not Hermitian")
        if dichotomic:
            eigs = np.linalg.eigvalsh(m)
            off = np.minimum(np.abs(eigs - 1.0), np.abs(eigs + 1.0))
            if np.max(off) > tol_eig:
                raise ValueError(
                    f"dichotomic observable has eigenvalue off ±1 by {np.max(off)}")
        object.__setattr__(self, "matrix", _freeze(m))
        object.__setattr__(self, "dichotomic", bool(dichotomic))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Povm:
    """Finite POVM: PSD elements summing to the identity."""

    elements: tuple[np.ndarray, ...]

    def __init__(self, elements, tol_psd: float = TOL_PSD, tol_norm: float = TOL_NORM):
        mats = tuple(as_matrix(e) for e in elements)
        if not mats:
            raise ValueError("POVM needs at least one element")
        dim = mats[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for e in mats:
            if e.shape != (dim, dim):
                raise ValueError("POVM elements have mismatched dimensions")
            if min_eig((e + e.conj().T) / 2) < -tol_psd or not is_hermitian(e, tol_psd * 10):
                raise ValueError("POVM element is not PSD")
            total += e
        if np.max(np.abs(total - np.eye(dim))) > tol_norm:
            raise ValueError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", tuple(_freeze(e) for e in mats))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class ChannelKraus:
    """Completely positive trace-preserving map in Kraus form."""

    kraus_ops: tuple[np.ndarray, ...]
    in_dim: int
    out_dim: int

    def __init__(self, kraus_ops, tol: float = TOL_NORM):
        ops = tuple(as_matrix(k, square=False) for k in kraus_ops)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        out_dim, in_dim = ops[0].shape
        total = np.zeros((in_dim, in_dim), dtype=complex)
        for k in ops:
            if k.shape != (out_dim, in_dim):
                raise ValueError("Kraus operators have mismatched shapes")
            total += k.conj().T @ k
        if np.max(np.abs(total - np.eye(in_dim))) > tol:
            raise ValueError("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus_ops", tuple(_freeze(k) for k in ops))
        object.__setattr__(self, "in_dim", int(in_dim))
        object.__setattr__(self, "out_dim", int(out_dim))


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi-Jamiolkowski operator on the out (slow) ⊗ in (fast) space."""

    matrix: np.ndarray
    in_dim: int
    out_dim: int

    def __init__(self, matrix, in_dim: int, out_dim: int):
        m = as_matrix(matrix)
        if m.shape[0] != in_dim * out_dim:
            raise ValueError("Choi matrix dimension does not match in_dim*out_dim")
        object.__setattr__(self, "matrix", _freeze(m))
        object.__setattr__(self, "in_dim", int(in_dim))
        object.__setattr__(self, "out_dim", int(out_dim))

    def is_completely_positive(self, tol: float = TOL_PSD) -> bool:
        return min_eig((self.matrix + self.matrix.conj().T) / 2) >= -tol

    def is_trace_preserving(self, tol: float = TOL_NORM) -> bool:
        from .linalg import partial_trace_matrix
        red = partial_trace_matrix(self.matrix, (self.out_dim, self.in_dim), keep=(1,))
        return bool(np.max(np.abs(red - np.eye(self.in_dim))) <= tol)

    def numerical_rank(self, threshold: float = 1e-8) -> int:
        svals = np.linalg.svd(self.matrix, compute_uv=False)
        return int(np.sum(svals > threshold * svals[0]))


@dataclass(frozen=True)
class Experiment:
    """Bipartite state plus per-site families of dichotomic observables."""

    state: DensityOperator
    obs_a: tuple[Observable, ...]
    obs_b: tuple[Observable, ...]

    def __init__(self, state: DensityOperator, obs_a, obs_b):
        if len(state.site_dims) != 2:
            raise ValueError("experiment state must declare exactly two sites")
        da, db = state.site_dims
        obs_a = tuple(o if isinstance(o, Observable) else Observable(o) for o in obs_a)
        obs_b = tuple(o if isinstance(o, Observable) else Observable(o) for o in obs_b)
        if any(o.dim != da for o in obs_a) or any(o.dim != db for o in obs_b):
            raise ValueError("observable dimensions do not match the site dimensions")
        object.__setattr__(self, "state", state)
        object.__setattr__(self, "obs_a", obs_a)
        object.__setattr__(self, "obs_b", obs_b)

    @classmethod
    def from_pure(cls, psi: PureState, obs_a, obs_b) -> "Experiment":
        return cls(psi.to_density(), obs_a, obs_b)

    @property
    def dims(self) -> tuple[int, int]:
        return self.state.site_dims  # type: ignore[return-value]


@dataclass(frozen=True)
class Statistics:
    """Joint conditional outcome table P(x,y|a,b) for dichotomic outcomes.

    ``table[a, b, i, j]`` is the probability of outcomes x=(+1 if i==0 else −1)
    and y=(+1 if j==0 else −1) given settings (a, b).  Construction validates
    normalization, range and the non-signalling conditions.
    """

    table: np.ndarray

    def __init__(self, table, tol_norm: float = TOL_NORM, tol_ns: float = TOL_NS):
        t = np.asarray(table, dtype=float)
        if t.ndim != 4 or t.shape[2:] != (2, 2):
            raise ValueError("statistics table must have shape (na, nb, 2, 2)")
        if np.min(t) < -tol_norm or np.max(t) > 1 + tol_norm:
            raise ValueError("probabilities out of [0, 1] range")
        sums = t.sum(axis=(2, 3))
        if np.max(np.abs(sums - 1.0)) > tol_norm:
            raise ValueError("conditional distributions do not sum to 1")
        ma = t.sum(axis=3)   # P(x|a,b)
        mb = t.sum(axis=2)   # P(y|a,b)
        if (np.max(np.abs(ma - ma.mean(axis=1, keepdims=True))) > tol_ns
                or np.max(np.abs(mb - mb.mean(axis=0, keepdims=True))) > tol_ns):
            raise ValueError("statistics violate the non-signalling conditions")
        frozen = np.array(t, copy=True)
        frozen.setflags(write=False)
        object.__setattr__(self, "table", frozen)

    @property
    def num_settings_a(self) -> int:
        return self.table.shape[0]

    @property
    def num_settings_b(self) -> int:
        return self.table.shape[1]

    def correlation(self, a: int, b: int) -> float:
        t = self.table[a, b]
        return float(t[0, 0] - t[0, 1] - t[1, 0] + t[1, 1])

    def marginal_a(self, a: int) -> float:
        """⟨A_a⟩, independent of b by non-signalling (averaged over b)."""
        t = self.table[a].mean(axis=0)
        return float(t[0, 0] + t[0, 1] - t[1, 0] - t[1, 1])

    def marginal_b(self, b: int) -> float:
        t = self.table[:, b].mean(axis=0)
        return float(t[0, 0] - t[0, 1] + t[1, 0] - t[1, 1])
