"""Outcome statistics of bipartite experiments with dichotomic observables."""

from __future__ import annotations

import numpy as np

from .linalg import tensor
from .types import TOL_EIG, Experiment, Observable, Statistics


def dichotomic_projectors(obs: Observable, tol_eig: float = TOL_EIG):
    """Eigenprojectors (P₊, P₋) of a ±1 observable.

    Each eigenvalue is classified to the nearest of {+1, −1}; an eigenvalue
    farther than ``tol_eig`` from both raises.  Either projector may be zero
    (e.g. the identity observable has an empty −1 sector).
    """
    vals, vecs = np.linalg.eigh(obs.matrix)
    off = np.minimum(np.abs(vals - 1.0), np.abs(vals + 1.0))
    if np.max(off) > tol_eig:
        raise ValueError(
            f"eigenvalue {vals[int(np.argmax(off))]} not within {tol_eig} of ±1")
    plus = vecs[:, vals > 0]
    minus = vecs[:, vals < 0]
    dim = obs.dim
    p_plus = plus @ plus.conj().T if plus.size else np.zeros((dim, dim), dtype=complex)
    p_minus = minus @ minus.conj().T if minus.size else np.zeros((dim, dim), dtype=complex)
    return p_plus, p_minus


def statistics_of(exp: Experiment, tol_eig: float = TOL_EIG) -> Statistics:
    """P(x,y|a,b) = tr(ρ · Π_x^{A_a} ⊗ Π_y^{B_b}) over the ±1 eigenprojectors."""
    proj_a = [dichotomic_projectors(o, tol_eig) for o in exp.obs_a]
    proj_b = [dichotomic_projectors(o, tol_eig) for o in exp.obs_b]
    rho = exp.state.matrix
    table = np.zeros((len(proj_a), len(proj_b), 2, 2))
    for a, pa in enumerate(proj_a):
        for b, pb in enumerate(proj_b):
            for i in range(2):
                for j in range(2):
                    table[a, b, i, j] = max(
                        0.0, float(np.real(np.trace(rho @ tensor(pa[i], pb[j])))))
    return Statistics(table)


def correlation_of(exp: Experiment, a: int, b: int) -> float:
    """tr(ρ · A_a ⊗ B_b) without eigenprojector classification."""
    m = tensor(exp.obs_a[a].matrix, exp.obs_b[b].matrix)
    return float(np.real(np.trace(exp.state.matrix @ m)))


def max_table_deviation(s1: Statistics, s2: Statistics) -> float:
    if s1.table.shape != s2.table.shape:
        raise ValueError("statistics tables have different shapes")
    return float(np.max(np.abs(s1.table - s2.table)))
