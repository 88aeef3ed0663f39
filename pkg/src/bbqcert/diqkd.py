"""DIQKD analysis: Jordan block reduction, parameter-estimation tail bound,
Eve's conditional entropy, and the asymptotic key rate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statistics import statistics_of
from .types import DensityOperator, Experiment, Observable

COS4_PI8 = float(np.cos(np.pi / 8) ** 4)
S_QUANTUM_MAX = float(2.0 * np.sqrt(2.0))


def binary_entropy(x: float) -> float:
    """Shannon entropy of a bit in bits; h(0) = h(1) = 0 by continuity."""
    if x < -1e-9 or x > 1 + 1e-9:
        raise ValueError(f"binary entropy argument {x} outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    if x in (0.0, 1.0):
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


# ---------------------------------------------------------------------------
# Jordan block reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JordanBlock:
    """One invariant block: 2×2 observables for both settings.

    ``original_size`` 1 marks a promoted fixed-outcome block: the conjugated
    operators act on a single dimension with values (s₀, s₁); the promoted
    observables are s_a·Z with the branch state pinned to |0⟩.
    """

    obs0: np.ndarray
    obs1: np.ndarray
    original_size: int


@dataclass(frozen=True)
class JordanDecomposition:
    basis_change: np.ndarray
    blocks: tuple[JordanBlock, ...]
    block_sizes: tuple[int, ...]

    def block_indices(self, z: int) -> tuple[int, ...]:
        start = sum(self.block_sizes[:z])
        return tuple(range(start, start + self.block_sizes[z]))


def _check_dichotomic(obs: Observable) -> np.ndarray:
    m = obs.matrix
    if np.max(np.abs(m @ m - np.eye(m.shape[0]))) > 1e-7:
        raise ValueError("observable is not a ±1 (unitary Hermitian) operator")
    return m


def jordan_blocks(a0: Observable, a1: Observable, tol: float = 1e-8) -> JordanDecomposition:
    """Simultaneous 2×2 / 1×1 block diagonalization of two ±1 observables.

    The product W = A⁰A¹ is unitary with eigenvalues in conjugate pairs
    e^{±iθ}; for θ ∉ {0, π} each eigenvector v pairs with A⁰v to span a
    two-dimensional invariant subspace on which A⁰ = X and
    A¹ = [[0, e^{−iθ}], [e^{iθ}, 0]].  On the ±1 eigenspaces of W the two
    observables agree up to sign and split into 1×1 blocks.
    """
    m0, m1 = _check_dichotomic(a0), _check_dichotomic(a1)
    if m0.shape != m1.shape:
        raise ValueError("observables must share a dimension")
    w = m0 @ m1
    import scipy.linalg
    tmat, q = scipy.linalg.schur(w, output="complex")
    phases = np.angle(np.diagonal(tmat))

    cols: list[np.ndarray] = []
    blocks: list[JordanBlock] = []
    sizes: list[int] = []
    x_block = np.array([[0, 1], [1, 0]], dtype=complex)
    used = np.zeros(phases.size, dtype=bool)

    # Rotation pairs: one representative v per eigenvector with phase in
    # (0, π); A⁰v spans its e^{−iθ} partner, whose Schur column is consumed.
    for i in range(phases.size):
        th = phases[i]
        if used[i] or not (tol < th < np.pi - tol):
            continue
        partner = None
        for j in range(phases.size):
            if not used[j] and j != i and abs(phases[j] + th) <= 1e-6:
                partner = j if partner is None or (
                    abs(phases[j] + th) < abs(phases[partner] + th)) else partner
        if partner is None:
            raise ValueError("unpaired rotation eigenvalue in jordan_blocks")
        used[i] = used[partner] = True
        v = q[:, i]
        u = m0 @ v
        cols.extend([v, u])
        a1_block = np.array([[0, np.exp(-1j * th)], [np.exp(1j * th), 0]])
        blocks.append(JordanBlock(x_block, a1_block, original_size=2))
        sizes.append(2)

    # ±1 eigenspaces of W (phase near 0 or ±π): A¹ = ±A⁰ there; diagonalize
    # A⁰ restricted to the subspace into 1×1 blocks.
    for plus_space, sign in ((True, 1.0), (False, -1.0)):
        sel = [i for i in range(phases.size)
               if not used[i] and (abs(phases[i]) < np.pi / 2) == plus_space]
        if not sel:
            continue
        for i in sel:
            used[i] = True
        sub = q[:, sel]
        a0_sub = sub.conj().T @ m0 @ sub
        vals, vecs = np.linalg.eigh((a0_sub + a0_sub.conj().T) / 2)
        for j in range(vals.size):
            vec = sub @ vecs[:, j]
            s0 = 1.0 if vals[j] >= 0 else -1.0
            s1 = s0 * sign
            cols.append(vec)
            z = np.diag([1.0, -1.0]).astype(complex)
            blocks.append(JordanBlock(s0 * z, s1 * z, original_size=1))
            sizes.append(1)

    basis = np.column_stack(cols)
    return JordanDecomposition(basis, tuple(blocks), tuple(sizes))


def block_residual(jd: JordanDecomposition, a0: Observable, a1: Observable) -> float:
    """Off-block Frobenius mass of the conjugated observables."""
    u = jd.basis_change
    total = 0.0
    for m in (a0.matrix, a1.matrix):
        conj = u.conj().T @ m @ u
        mask = np.ones_like(conj)
        for z in range(len(jd.block_sizes)):
            idx = jd.block_indices(z)
            for r in idx:
                for c in idx:
                    mask[r, c] = 0
        total += float(np.linalg.norm(conj * mask))
    return total


# ---------------------------------------------------------------------------
# Strategy decomposition into qubit branches
# ---------------------------------------------------------------------------

def decompose_strategy(exp: Experiment):
    """Split a 2×2-setting experiment into a mixture of qubit strategies.

    Returns a list of ``(probability, two_qubit_experiment)``; probabilities
    sum to 1 and the probability-weighted branch statistics reproduce the
    original statistics table.
    """
    if len(exp.obs_a) != 2 or len(exp.obs_b) != 2:
        raise ValueError("decompose_strategy needs two settings per side")
    jd_a = jordan_blocks(exp.obs_a[0], exp.obs_a[1])
    jd_b = jordan_blocks(exp.obs_b[0], exp.obs_b[1])
    da, db = exp.dims
    u = np.kron(jd_a.basis_change, jd_b.basis_change)
    rho = u.conj().T @ exp.state.matrix @ u

    def embed(vecs_dim: int, idx):
        e = np.zeros((2, len(idx)), dtype=complex)
        for col in range(len(idx)):
            e[col, col] = 1.0
        return e

    branches = []
    for z in range(len(jd_a.blocks)):
        ia = jd_a.block_indices(z)
        for w in range(len(jd_b.blocks)):
            ib = jd_b.block_indices(w)
            rows = [a * db + b for a in ia for b in ib]
            sub = rho[np.ix_(rows, rows)]
            p = float(np.real(np.trace(sub)))
            if p < 1e-12:
                continue
            ea, eb = embed(2, ia), embed(2, ib)
            lift = np.kron(ea, eb)
            state = DensityOperator(lift @ (sub / p) @ lift.conj().T, (2, 2))
            ba, bb = jd_a.blocks[z], jd_b.blocks[w]
            branch = Experiment(state,
                                [Observable(ba.obs0), Observable(ba.obs1)],
                                [Observable(bb.obs0), Observable(bb.obs1)])
            branches.append((p, branch))
    return branches


def recombined_statistics_table(branches) -> np.ndarray:
    table = None
    for p, exp in branches:
        t = statistics_of(exp).table
        table = p * t if table is None else table + p * t
    return table


# ---------------------------------------------------------------------------
# Parameter estimation tail bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailBoundInput:
    n: int
    m: int
    r: int
    p: float
    mu: float

    def __post_init__(self):
        if not 0 <= self.r <= self.m:
            raise ValueError("need 0 <= r <= m")
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be a probability")
        if self.mu <= 0:
            raise ValueError("mu must be positive")


def tail_bound(inp: TailBoundInput) -> float:
    """P(Y/m > p + μ) bound for CHSH tests on near-product symmetric states.

    exp(−2(mμ − r(1−p))² / ((m−r)cos⁴(π/8)) + (n+m)·h(r/(n+m))·ln 2), clamped
    to 1.  The denominator is (m−r), following the Hoeffding application in
    the derivation; r = m is degenerate and rejected.
    """
    if inp.m == inp.r:
        raise ValueError("m == r leaves no Hoeffding trials (degenerate bound)")
    gap = inp.m * inp.mu - inp.r * (1.0 - inp.p)
    exponent = -2.0 * gap * gap / ((inp.m - inp.r) * COS4_PI8)
    if inp.r > 0:
        exponent += (inp.n + inp.m) * binary_entropy(inp.r / (inp.n + inp.m)) * np.log(2.0)
    return float(min(1.0, np.exp(exponent)))


def monte_carlo_exceedance(m: int, p: float, mu: float, runs: int, seed=0) -> float:
    """Empirical P(Y/m > p + μ) for honest i.i.d. devices at win probability p."""
    rng = np.random.default_rng(seed)
    wins = rng.binomial(m, p, size=runs)
    return float(np.mean(wins / m > p + mu))


def mu_for_epsilon(n: int, m: int, r: int, p: float, epsilon: float,
                   tol: float = 1e-12) -> float:
    """Smallest slack μ whose tail bound is at most ε, by monotone bisection.

    The closed-form inversion printed alongside the bound is unreliable;
    bisection against tail_bound itself is exact by construction.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    lo, hi = 1e-15, 1.0
    if tail_bound(TailBoundInput(n, m, r, p, hi)) > epsilon:
        raise ValueError("no slack mu <= 1 reaches the requested epsilon")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if tail_bound(TailBoundInput(n, m, r, p, mid)) <= epsilon:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# Eve's eigenvalues and entropy bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BellSpectrum:
    """Bell-diagonal spectrum (λφ+, λψ−, λφ−, λψ+) plus Bob's measurement angle."""

    lambdas: tuple[float, float, float, float]
    theta: float = 0.0

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.shape != (4,) or np.min(lam) < -1e-12 or abs(lam.sum() - 1) > 1e-9:
            raise ValueError("lambdas must be a probability 4-vector")


def eve_eigenvalues(spec: BellSpectrum) -> tuple[float, float]:
    """Eigenvalues (Λ₀, Λ₁) of each block of ρ_YE; Λ₀ + Λ₁ = 1/2.

    Λ_w = ¼(1 + (−1)^w √(u² + v² + 2cos4θ·uv)) with u = λφ+ − λψ− and
    v = λφ− − λψ+; each occurs with multiplicity 2 (the two outcomes y).
    """
    lp, lm, fp, fm = spec.lambdas  # (λφ+, λψ−, λφ−, λψ+)
    u = lp - lm
    v = fp - fm
    disc = u * u + v * v + 2.0 * np.cos(4.0 * spec.theta) * u * v
    if disc < -1e-12:
        raise ValueError("negative discriminant: invalid Bell spectrum")
    root = np.sqrt(max(disc, 0.0))
    return (0.25 * (1.0 + root), 0.25 * (1.0 - root))


def hye_direct(spec: BellSpectrum) -> float:
    """H(Y|E) computed from Eve's eigenvalues: 1 + h(2Λ₀) − H(λ̄)."""
    lam0, _ = eve_eigenvalues(spec)
    return 1.0 + binary_entropy(min(1.0, 2.0 * lam0)) - shannon_entropy(spec.lambdas)


def hye_bound(s: float) -> float:
    """1 − h((1 + √((s/2)² − 1))/2), the entropy bound at CHSH value s."""
    if not 2.0 - 1e-9 <= s <= S_QUANTUM_MAX + 1e-9:
        raise ValueError(f"CHSH value {s} outside [2, 2*sqrt(2)]")
    arg = (1.0 + np.sqrt(max((s / 2.0) ** 2 - 1.0, 0.0))) / 2.0
    return 1.0 - binary_entropy(min(arg, 1.0))


@dataclass(frozen=True)
class KeyRateInput:
    s: float
    q: float

    def __post_init__(self):
        if not 2.0 - 1e-9 <= self.s <= S_QUANTUM_MAX + 1e-9:
            raise ValueError("CHSH value outside [2, 2*sqrt(2)]")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("bit error rate outside [0, 1]")


@dataclass(frozen=True)
class KeyRate:
    raw: float
    clamped: float
    hye: float


def key_rate(inp: KeyRateInput) -> KeyRate:
    """Asymptotic secure key rate hye_bound(S) − h(q), also clamped at 0."""
    hye = hye_bound(inp.s)
    raw = hye - binary_entropy(inp.q)
    return KeyRate(raw=raw, clamped=max(0.0, raw), hye=hye)
