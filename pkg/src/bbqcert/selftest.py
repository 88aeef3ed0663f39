"""Mayers-Yao style self-tests: statistics checks, SWAP-isometry extraction,
gate-test verification, and the extended six-setting test."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import (bell_phi_plus, fidelity_with_pure, purify, tensor,
                     tensor_all, trace_norm)
from .rand import rng_from
from .simmap import SimulationParams
from .statistics import statistics_of
from .types import DensityOperator, Experiment, Statistics

INV_SQRT2 = 1.0 / np.sqrt(2.0)


# ---------------------------------------------------------------------------
# Mayers-Yao statistics check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MyReport:
    """Residuals of the Mayers-Yao statistics, settings ordered (X, Z, D)."""

    residuals: dict
    tol: float
    passed: bool
    anticommutator_a: Optional[float] = None
    anticommutator_b: Optional[float] = None

    def max_residual(self) -> float:
        return max(self.residuals.values())


def my_check(stats: Statistics, tol: float = 1e-6) -> MyReport:
    """Verify the Mayers-Yao statistics from outcome data alone.

    Expects three settings per side in the order (X, Z, D) and checks: all
    marginals vanish, same-setting outcomes are perfectly correlated, X and Z
    across sides are uncorrelated, and every X/Z-vs-D correlation is 1/√2.
    """
    if stats.num_settings_a != 3 or stats.num_settings_b != 3:
        raise ValueError("Mayers-Yao statistics need three settings per side")
    names = ("X", "Z", "D")
    res = {}
    for i, n in enumerate(names):
        res[f"marginal_a_{n}"] = abs(stats.marginal_a(i))
        res[f"marginal_b_{n}"] = abs(stats.marginal_b(i))
        res[f"corr_{n}{n}"] = abs(stats.correlation(i, i) - 1.0)
    res["uncorr_XZ"] = abs(stats.correlation(0, 1))
    res["uncorr_ZX"] = abs(stats.correlation(1, 0))
    res["overlap_XD"] = abs(stats.correlation(0, 2) - INV_SQRT2)
    res["overlap_ZD"] = abs(stats.correlation(1, 2) - INV_SQRT2)
    res["overlap_DX"] = abs(stats.correlation(2, 0) - INV_SQRT2)
    res["overlap_DZ"] = abs(stats.correlation(2, 1) - INV_SQRT2)
    return MyReport(res, tol, passed=all(v <= tol for v in res.values()))


def my_check_experiment(exp: Experiment, tol: float = 1e-6) -> MyReport:
    """my_check on the experiment's statistics, with anticommutator residuals."""
    base = my_check(statistics_of(exp), tol)
    return MyReport(base.residuals, tol, base.passed,
                    anticommutator_a=anticommutator_residual(exp, "a"),
                    anticommutator_b=anticommutator_residual(exp, "b"))


def anticommutator_residual(exp: Experiment, side: str = "a") -> float:
    """‖(XZ + ZX) ⊗ I |ψ⟩‖ on a purification, settings (X, Z) = (0, 1)."""
    if side not in ("a", "b"):
        raise ValueError("side must be 'a' or 'b'")
    obs = exp.obs_a if side == "a" else exp.obs_b
    x, z = obs[0].matrix, obs[1].matrix
    anti = x @ z + z @ x
    psi = purify(exp.state)
    da, db = exp.dims
    r = psi.site_dims[1]
    if side == "a":
        op = tensor(anti, np.eye(db * r))
    else:
        op = tensor_all([np.eye(da), anti, np.eye(r)])
    return float(np.linalg.norm(op @ psi.amplitudes))


# ---------------------------------------------------------------------------
# SWAP isometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsometryResult:
    extracted: DensityOperator
    junk: DensityOperator
    fidelity_epr: float


def _apply_site(op: np.ndarray, state: np.ndarray, axis: int) -> np.ndarray:
    """Apply a square operator to one tensor axis of a state array."""
    moved = np.tensordot(op, state, axes=([1], [axis]))
    return np.moveaxis(moved, 0, axis)


def _apply_controlled(op: np.ndarray, state: np.ndarray, ctrl_axis: int,
                      target_axis: int) -> np.ndarray:
    out = state.copy()
    sel = [slice(None)] * state.ndim
    sel[ctrl_axis] = 1
    sub = out[tuple(sel)]
    tgt = target_axis - (1 if target_axis > ctrl_axis else 0)
    out[tuple(sel)] = _apply_site(op, sub, tgt)
    return out


_HAD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)


def swap_isometry(exp: Experiment) -> IsometryResult:
    """Apply the SWAP-gate isometry built from the X and Z observables.

    Per side: attach an ancilla |0⟩, then Hadamard, controlled-Z_site,
    Hadamard, controlled-X_site.  Mixed states are purified first, with the
    purification register riding along side A.  Returns the reduced two-qubit
    state on the ancillas, the junk state on the original registers (grouped
    (A, R | B)), and its EPR fidelity.
    """
    da, db = exp.dims
    for obs in (exp.obs_a[0], exp.obs_a[1], exp.obs_b[0], exp.obs_b[1]):
        m = obs.matrix
        if np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) > 1e-7:
            raise ValueError("swap isometry needs unitary Hermitian observables")
    xa, za = exp.obs_a[0].matrix, exp.obs_a[1].matrix
    xb, zb = exp.obs_b[0].matrix, exp.obs_b[1].matrix

    psi = purify(exp.state)
    r = psi.site_dims[1]
    # Axes: (ancA, ancB, A, B, R)
    state = np.zeros((2, 2, da, db, r), dtype=complex)
    state[0, 0] = psi.amplitudes.reshape(da, db, r)

    for anc, ops, axis in ((0, (za, xa), 2), (1, (zb, xb), 3)):
        state = _apply_site(_HAD, state, anc)
        state = _apply_controlled(ops[0], state, anc, axis)
        state = _apply_site(_HAD, state, anc)
        state = _apply_controlled(ops[1], state, anc, axis)

    extracted = np.einsum("ijabr,klabr->ijkl", state, state.conj()).reshape(4, 4)
    extracted_op = DensityOperator(extracted, (2, 2))
    junk = np.einsum("ijabr,ijcds->arbcsd", state, state.conj())
    junk = junk.reshape(da * r * db, da * r * db)
    tr = np.trace(junk)
    junk_op = DensityOperator(junk / tr, (da * r, db))
    fid = fidelity_with_pure(bell_phi_plus().amplitudes, extracted)
    return IsometryResult(extracted_op, junk_op, float(fid))


# ---------------------------------------------------------------------------
# Pauli moments and PSD completion
# ---------------------------------------------------------------------------

def _ixz_strings(n: int) -> list[str]:
    return ["".join(s) for s in itertools.product("IXZ", repeat=n)]


def _pauli_matrix(label: str) -> np.ndarray:
    from .reference import OBSERVABLE_MATRICES
    return tensor_all([OBSERVABLE_MATRICES[ch] for ch in label])


def _setting_index(label: str) -> int:
    """Index of an I/X/Z/D string in the base-4 gate-test enumeration."""
    digits = {"I": 0, "X": 1, "Z": 2, "D": 3}
    idx = 0
    for ch in label:
        idx = idx * 4 + digits[ch]
    return idx


def real_pauli_moments(exp: Experiment, stats: Statistics | None = None) -> dict:
    """Correlations tr(ρ M⊗N) for M, N ∈ {I, X, Z}^⊗n, read from statistics.

    The experiment must carry the full gate-test setting enumeration (all
    {I, X, Z, D}^n products per side, base-4 order).  Returns a dict keyed by
    label pairs, e.g. ("XZ", "IX").
    """
    da, _ = exp.dims
    n = int(round(np.log2(da)))
    if len(exp.obs_a) != 4 ** n or len(exp.obs_b) != 4 ** n:
        raise ValueError("experiment does not carry the gate-test setting grid")
    if stats is None:
        stats = statistics_of(exp)
    moments = {}
    for la in _ixz_strings(n):
        for lb in _ixz_strings(n):
            moments[(la, lb)] = stats.correlation(_setting_index(la),
                                                  _setting_index(lb))
    return moments


def _measured_basis(moments: dict, dim: int):
    ops = []
    vals = []
    for (la, lb), v in moments.items():
        ops.append(tensor(_pauli_matrix(la), _pauli_matrix(lb)))
        vals.append(float(v))
    return np.array(ops), np.array(vals)


def psd_completion(moments: dict, dim: int, start: np.ndarray | None = None,
                   tol: float = 1e-13, max_iter: int = 20000) -> np.ndarray:
    """PSD, trace-1 matrix matching the given Pauli moments.

    Dykstra alternating projections between the affine moment-matching set
    and the PSD cone.  The {I,X,Z}-moment uniqueness lemmas make the
    intersection a single state for honest gate-test data, so the iteration
    converges to it regardless of the start.
    """
    ops, vals = _measured_basis(moments, dim)

    def project_affine(x):
        coeffs = np.real(np.einsum("kij,ji->k", ops, x))
        return x + np.einsum("k,kij->ij", (vals - coeffs) / dim, ops)

    def project_psd(x):
        w, v = np.linalg.eigh((x + x.conj().T) / 2)
        w = np.clip(w, 0.0, None)
        return (v * w) @ v.conj().T

    x = project_affine(np.zeros((dim, dim), dtype=complex) if start is None
                       else start)
    p = np.zeros_like(x)
    for _ in range(max_iter):
        y = project_psd(x + p)
        p = x + p - y
        x_new = project_affine(y)
        if np.max(np.abs(x_new - x)) < tol and np.max(np.abs(y - x_new)) < 1e-10:
            x = x_new
            break
        x = x_new
    return x


def _largest_psd_step(sigma: np.ndarray, delta: np.ndarray,
                      floor: float = -1e-11) -> float:
    """Largest t in [0, 1] with σ + tΔ PSD (σ itself PSD, λ_min concave in t)."""
    def ok(t):
        m = sigma + t * delta
        return np.linalg.eigvalsh((m + m.conj().T) / 2)[0] >= floor
    if ok(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def moments_determine_state_check(sigma: DensityOperator, moments: dict,
                                  tol_recon: float = 1e-6, n_starts: int = 20,
                                  seed=0) -> bool:
    """Numerically confirm that the {I,X,Z} moments pin the state to σ.

    Pushes ``n_starts`` spread-out Hermitian completions of the moment data
    toward the feasible set (PSD ∩ moments) with alternating projections,
    then takes the farthest exactly-feasible point on the segment from σ to
    each result.  True when every such point stays within ``tol_recon`` trace
    distance of σ; a fat feasible set is detected because projections of
    far-out starts land on its boundary away from σ.
    """
    rng = rng_from(seed)
    dim = sigma.dim
    ops, _ = _measured_basis(moments, dim)
    worst = 0.0
    for k in range(n_starts):
        if k == 0:
            start = None
        else:
            g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            g = (g + g.conj().T) / 2
            # Remove measured components so the perturbation explores only the
            # unmeasured directions of the affine set.
            coeffs = np.real(np.einsum("kij,ji->k", ops, g))
            g = g - np.einsum("k,kij->ij", coeffs / dim, ops)
            norm = np.linalg.norm(g)
            start = sigma.matrix + (3.0 / norm) * g if norm > 1e-12 else sigma.matrix
        rec = psd_completion(moments, dim, start=start, max_iter=4000)
        t = _largest_psd_step(sigma.matrix, rec - sigma.matrix)
        worst = max(worst, t * trace_norm(rec - sigma.matrix) / 2)
    return worst <= tol_recon


# ---------------------------------------------------------------------------
# Gate test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GateTestReport:
    sim_residuals: tuple[float, float, float]
    choi_distance: float
    tol: float
    passed: bool


def _validate_gate(t: np.ndarray) -> int:
    dim = t.shape[0]
    n = int(round(np.log2(dim)))
    if 2 ** n != dim or n < 1:
        raise ValueError("gate dimension must be a power of 2")
    if np.max(np.abs(t.imag)) > 1e-10:
        raise ValueError("gate test supports real gates only")
    if np.max(np.abs(t @ t.conj().T - np.eye(dim))) > 1e-9:
        raise ValueError("gate is not unitary")
    if n > 2:
        raise ValueError("gate test supports at most two qubits")
    return n


def gate_test(exp1: Experiment, exp2: Experiment, exp3: Experiment,
              t_ref: np.ndarray, tol: float = 1e-9) -> GateTestReport:
    """Verify a gate-test device triple against reference gate T.

    Checks each experiment's statistics against its reference (the bare EPR
    test, the test after T⊗T, and the gate test with T on side A), then
    reconstructs J(Φ)/dim from the third experiment's {I, X, Z} moments and
    reports its trace distance to J(T)/dim.
    """
    from .reference import build_gate_test_experiments
    t = np.asarray(t_ref, dtype=complex)
    n = _validate_gate(t)
    ref1, ref2, ref3 = build_gate_test_experiments(t)
    residuals = []
    stats3 = None
    for phys, ref in ((exp1, ref1), (exp2, ref2), (exp3, ref3)):
        s_phys = statistics_of(phys)
        s_ref = statistics_of(ref)
        if s_phys.table.shape != s_ref.table.shape:
            raise ValueError("experiment setting grid does not match the reference")
        residuals.append(float(np.max(np.abs(s_phys.table - s_ref.table))))
        if phys is exp3:
            stats3 = s_phys
    moments = real_pauli_moments(exp3, stats3)
    dim = 4 ** n
    rec = psd_completion(moments, dim)
    phi = bell_phi_plus(n).amplitudes
    target = np.kron(t, np.eye(2 ** n, dtype=complex)) @ phi
    sigma = np.outer(target, target.conj())
    dist = trace_norm(rec - sigma) / 2
    passed = bool(all(r <= tol for r in residuals) and dist <= tol)
    return GateTestReport(tuple(residuals), float(dist), tol, passed)


# ---------------------------------------------------------------------------
# Extended Mayers-Yao test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtMyReport:
    base_reports: tuple[MyReport, MyReport, MyReport]
    conj_params: Optional[SimulationParams]
    passed: bool


_SUB_TRIPLES = ((0, 1, 2), (0, 3, 4), (3, 1, 5))  # (X,Z,D), (X,Y,E), (Y,Z,F)


def ext_my_check(exp: Experiment, tol: float = 1e-6) -> ExtMyReport:
    """Extended Mayers-Yao check with settings ordered (X, Z, D, Y, E, F).

    Runs the three embedded Mayers-Yao sub-tests; when all pass, estimates
    the conjugation-simulation parameters (a, c) of the equivalent
    simulation.  The weight a comes from the logical-ancilla operator
    −i·Y·Z·X (+i on Bob's side, absorbing the −Y convention); |c| is the
    trace norm of the state block linking its ±1 eigenspaces.  Only the
    magnitude of c is identifiable.
    """
    if len(exp.obs_a) != 6 or len(exp.obs_b) != 6:
        raise ValueError("extended test needs six settings per side")
    reports = []
    for triple in _SUB_TRIPLES:
        sub = Experiment(exp.state,
                         [exp.obs_a[i] for i in triple],
                         [exp.obs_b[i] for i in triple])
        reports.append(my_check(statistics_of(sub), tol))
    all_pass = all(r.passed for r in reports)
    params = None
    if all_pass:
        xa, za, ya = (exp.obs_a[0].matrix, exp.obs_a[1].matrix, exp.obs_a[3].matrix)
        xb, zb, yb = (exp.obs_b[0].matrix, exp.obs_b[1].matrix, exp.obs_b[3].matrix)
        ka = -1j * ya @ za @ xa
        kb = 1j * yb @ zb @ xb
        ka = (ka + ka.conj().T) / 2
        kb = (kb + kb.conj().T) / 2
        rho = exp.state.matrix
        da, db = exp.dims
        mean_k = (np.real(np.trace(rho @ tensor(ka, np.eye(db))))
                  + np.real(np.trace(rho @ tensor(np.eye(da), kb)))) / 2
        a_hat = min(max((1.0 + mean_k) / 2.0, 0.0), 1.0)
        proj = {}
        for name, k in (("a", ka), ("b", kb)):
            w, v = np.linalg.eigh(k)
            plus = v[:, w >= 0]
            minus = v[:, w < 0]
            dloc = k.shape[0]
            proj[name] = (
                plus @ plus.conj().T if plus.size else np.zeros((dloc, dloc)),
                minus @ minus.conj().T if minus.size else np.zeros((dloc, dloc)))
        q0 = tensor(proj["a"][0], proj["b"][0])
        q1 = tensor(proj["a"][1], proj["b"][1])
        c_hat = trace_norm(q0 @ rho @ q1)
        limit = np.sqrt(max(a_hat * (1.0 - a_hat), 0.0))
        if c_hat <= limit + 1e-6:
            params = SimulationParams(a_hat, min(c_hat, limit))
        else:
            all_pass = False
    return ExtMyReport(tuple(reports), params, passed=all_pass)
