"""CHSH value, closed-form maxima, and optimal-measurement construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rand import random_dichotomic, rng_from
from .statistics import correlation_of
from .types import DensityOperator, Experiment, Observable

SQRT2 = float(np.sqrt(2.0))
PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class ChshValue:
    """CHSH correlation value S and the matching win probability p = (S+4)/8."""

    s: float
    p: float

    def __init__(self, s: float):
        object.__setattr__(self, "s", float(s))
        object.__setattr__(self, "p", (float(s) + 4.0) / 8.0)


@dataclass(frozen=True)
class MeasurementAngles:
    """Bloch angles of the four qubit observables cosθ·Z + sinθcosφ·X + sinθsinφ·Y."""

    theta_a0: float
    phi_a0: float
    theta_a1: float
    phi_a1: float
    theta_b0: float
    phi_b0: float
    theta_b1: float
    phi_b1: float


def bloch_observable(theta: float, phi: float) -> Observable:
    m = (np.cos(theta) * PAULI["Z"] + np.sin(theta) * np.cos(phi) * PAULI["X"]
         + np.sin(theta) * np.sin(phi) * PAULI["Y"])
    return Observable(m)


def correlation_matrix(rho: DensityOperator) -> np.ndarray:
    """3×3 matrix R'_{UV} = tr(ρ U⊗V) over U,V ∈ (X, Y, Z)."""
    if rho.dim != 4:
        raise ValueError("correlation matrix requires a two-qubit state")
    labels = ("X", "Y", "Z")
    r = np.zeros((3, 3))
    for i, u in enumerate(labels):
        for j, v in enumerate(labels):
            r[i, j] = float(np.real(np.trace(rho.matrix @ np.kron(PAULI[u], PAULI[v]))))
    if np.max(np.abs(r)) > 1.0 + 1e-9:
        raise ValueError("correlation entries exceed [-1, 1]")
    return r


def chsh_value(exp: Experiment) -> ChshValue:
    """S = Σ_{a,b} tr(A_a ⊗ B_b ρ) (−1)^{ab} for a 2×2-setting experiment."""
    if len(exp.obs_a) != 2 or len(exp.obs_b) != 2:
        raise ValueError("CHSH needs exactly two settings per side")
    s = 0.0
    for a in range(2):
        for b in range(2):
            s += correlation_of(exp, a, b) * (-1.0) ** (a * b)
    return ChshValue(s)


def s_max_two_qubit(rho: DensityOperator) -> float:
    """Horodecki criterion: 2√(u² + v²) with u, v the top singular values of R'."""
    svals = np.linalg.svd(correlation_matrix(rho), compute_uv=False)
    return float(2.0 * np.sqrt(svals[0] ** 2 + svals[1] ** 2))


def s_max_bell_diagonal(lambdas) -> float:
    """Maximal CHSH value of a Bell-diagonal state from its spectrum.

    2√2·√((λ_a−λ_b)² + (λ_c−λ_d)²), maximized over the three ways of pairing
    the four eigenvalues; this equals the Horodecki value for the matching
    Bell-diagonal state.
    """
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (4,) or np.min(lam) < -1e-12 or abs(lam.sum() - 1.0) > 1e-9:
        raise ValueError("need four nonnegative eigenvalues summing to 1")
    best = 0.0
    for (i, j, k, l) in ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)):
        val = 2.0 * SQRT2 * np.sqrt((lam[i] - lam[j]) ** 2 + (lam[k] - lam[l]) ** 2)
        best = max(best, float(val))
    return best


def _paired(coeffs) -> list[tuple[float, float]]:
    lam = [float(x) for x in coeffs]
    if any(x < -1e-12 for x in lam):
        raise ValueError("Schmidt coefficients must be nonnegative")
    if abs(sum(x * x for x in lam) - 1.0) > 1e-9:
        raise ValueError("squared Schmidt coefficients must sum to 1")
    if len(lam) % 2:
        lam.append(0.0)
    return [(lam[2 * j], lam[2 * j + 1]) for j in range(len(lam) // 2)]


def gisin_peres_s_max(coeffs) -> float:
    """CHSH value of the Gisin-Peres block measurements on a pure state.

    Consecutive coefficients are paired as given (odd lengths are padded with
    a zero): Σ_j p_j·2√(1 + 4c_j²s_j²) with p_j = λ_{2j}² + λ_{2j+1}².  With
    coefficients in decreasing order this is the conjectured S_max; it is a
    certified achievable value for any ordering.
    """
    total = 0.0
    for l0, l1 in _paired(coeffs):
        p = l0 * l0 + l1 * l1
        total += 2.0 * np.sqrt(p * p + 4.0 * (l0 * l1) ** 2)
    return float(total)


def gisin_peres_measurements(coeffs):
    """Block observables achieving gisin_peres_s_max on the padded pure state.

    Returns ``(obs_a, obs_b)`` lists of two dichotomic observables each, built
    per 2×2 Schmidt block as A₀=Z, A₁=X, B_b = cosφ·Z ± sinφ·X with
    tanφ = 2c_j s_j.  Odd-length inputs act on one extra (zero-amplitude)
    dimension per side.
    """
    pairs = _paired(coeffs)
    z, x = PAULI["Z"], PAULI["X"]
    blocks_a0, blocks_a1, blocks_b0, blocks_b1 = [], [], [], []
    for l0, l1 in pairs:
        p = l0 * l0 + l1 * l1
        phi = np.arctan2(2.0 * l0 * l1, p) if p > 0 else 0.0
        blocks_a0.append(z)
        blocks_a1.append(x)
        blocks_b0.append(np.cos(phi) * z + np.sin(phi) * x)
        blocks_b1.append(np.cos(phi) * z - np.sin(phi) * x)
    import scipy.linalg
    make = lambda blocks: Observable(scipy.linalg.block_diag(*blocks))
    return ([make(blocks_a0), make(blocks_a1)], [make(blocks_b0), make(blocks_b1)])


# ---------------------------------------------------------------------------
# Numerical maximization
# ---------------------------------------------------------------------------

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _line_max(f, x0: float, tol: float = 1e-8) -> tuple[float, float]:
    """Maximize a 2π-periodic sinusoid-like profile: coarse scan then golden."""
    grid = x0 + np.linspace(-np.pi, np.pi, 13)
    vals = [f(x) for x in grid]
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    return _golden_max(f, lo, hi, tol)


def _direction(theta: float, phi: float):
    # (X, Y, Z) components of cosθ·Z + sinθcosφ·X + sinθsinφ·Y
    from math import cos, sin
    st = sin(theta)
    return (st * cos(phi), st * sin(phi), cos(theta))


def _qubit_s(r, params) -> float:
    n0 = _direction(params[0], params[1])
    n1 = _direction(params[2], params[3])
    m0 = _direction(params[4], params[5])
    m1 = _direction(params[6], params[7])
    plus = tuple(m0[i] + m1[i] for i in range(3))
    minus = tuple(m0[i] - m1[i] for i in range(3))
    s = 0.0
    for i in range(3):
        for j in range(3):
            s += r[i][j] * (n0[i] * plus[j] + n1[i] * minus[j])
    return s


def _apply3(r, v):
    return tuple(r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2] for i in range(3))


def _dot3(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _optimize_s_qubit(rho: DensityOperator, restarts: int, rng) -> tuple[ChshValue, MeasurementAngles]:
    from math import cos, sin
    rmat = correlation_matrix(rho)
    r = [[float(rmat[i, j]) for j in range(3)] for i in range(3)]
    rt = [[r[j][i] for j in range(3)] for i in range(3)]
    best_val, best_params = -np.inf, None
    for _ in range(max(1, restarts)):
        params = [float(x) for x in rng.uniform(0.0, 2 * np.pi, size=8)]
        prev = _qubit_s(r, params)
        for _sweep in range(100):
            for idx in range(8):
                obs, comp = divmod(idx, 2)
                n = [_direction(params[0], params[1]),
                     _direction(params[2], params[3]),
                     _direction(params[4], params[5]),
                     _direction(params[6], params[7])]
                # The objective along one angle is w·direction(x) plus a
                # constant; precontract everything else into w.
                if obs == 0:
                    w = _apply3(r, tuple(n[2][i] + n[3][i] for i in range(3)))
                    const = _dot3(n[1], _apply3(r, tuple(n[2][i] - n[3][i] for i in range(3))))
                elif obs == 1:
                    w = _apply3(r, tuple(n[2][i] - n[3][i] for i in range(3)))
                    const = _dot3(n[0], _apply3(r, tuple(n[2][i] + n[3][i] for i in range(3))))
                elif obs == 2:
                    w = _apply3(rt, tuple(n[0][i] + n[1][i] for i in range(3)))
                    const = _dot3(_apply3(rt, tuple(n[0][i] - n[1][i] for i in range(3))), n[3])
                else:
                    w = _apply3(rt, tuple(n[0][i] - n[1][i] for i in range(3)))
                    const = _dot3(_apply3(rt, tuple(n[0][i] + n[1][i] for i in range(3))), n[2])
                theta0, phi0 = params[2 * obs], params[2 * obs + 1]
                if comp == 0:
                    cp, sp = cos(phi0), sin(phi0)

                    def f(x):
                        sx = sin(x)
                        return (w[0] * sx * cp + w[1] * sx * sp
                                + w[2] * cos(x) + const)
                else:
                    st, ct = sin(theta0), cos(theta0)

                    def f(x):
                        return (w[0] * st * cos(x) + w[1] * st * sin(x)
                                + w[2] * ct + const)
                params[idx], _ = _line_max(f, params[idx])
            cur = _qubit_s(r, params)
            if cur - prev < 1e-12:
                break
            prev = cur
        val = _qubit_s(r, params)
        if val > best_val + 1e-15:
            best_val, best_params = val, list(params)
    angles = MeasurementAngles(best_params[0], best_params[1], best_params[2],
                               best_params[3], best_params[4], best_params[5],
                               best_params[6], best_params[7])
    return ChshValue(best_val), angles


def _sign_observable(c: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((c + c.conj().T) / 2)
    signs = np.where(vals >= 0, 1.0, -1.0)
    return (vecs * signs) @ vecs.conj().T


def _optimize_s_generic(rho: DensityOperator, restarts: int, rng) -> tuple[ChshValue, None]:
    da, db = rho.site_dims
    t = rho.matrix.reshape(da, db, da, db)
    best = -np.inf
    for _ in range(max(1, restarts)):
        obs_b = [random_dichotomic(db, rng).matrix for _ in range(2)]
        prev = -np.inf
        for _it in range(300):
            obs_a = []
            for a in range(2):
                m = obs_b[0] + (-1) ** a * obs_b[1]
                c = np.einsum("ijkl,lj->ik", t, m)  # tr(ρ A⊗B) = tr(A·C)
                obs_a.append(_sign_observable(c))
            obs_b = []
            for b in range(2):
                m = obs_a[0] + (-1) ** b * obs_a[1]
                c = np.einsum("ijkl,ki->jl", t, m)
                obs_b.append(_sign_observable(c))
            s = sum((-1.0) ** (a * b)
                    * float(np.real(np.einsum("ijkl,ki,lj->", t, obs_a[a], obs_b[b])))
                    for a in range(2) for b in range(2))
            if s - prev < 1e-12:
                break
            prev = s
        best = max(best, prev)
    return ChshValue(best), None


def optimize_s(rho: DensityOperator, restarts: int = 8, seed=0):
    """Numerically maximize S over local dichotomic measurements.

    Qubit states (both sites of dimension 2) use golden-section coordinate
    descent over the eight Bloch angles and return those angles; other
    dimensions use a see-saw over exact single-side eigen-updates and return
    ``None`` for the angles.  Deterministic given the seed, and the best value
    found is monotone in ``restarts``.
    """
    if len(rho.site_dims) != 2:
        raise ValueError("optimize_s requires a bipartite state")
    rng = rng_from(seed)
    if rho.site_dims == (2, 2):
        return _optimize_s_qubit(rho, restarts, rng)
    return _optimize_s_generic(rho, restarts, rng)
