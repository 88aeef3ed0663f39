import numpy as np
import pytest
import scipy.linalg

from bbqcert.diqkd import (BellSpectrum, KeyRateInput, TailBoundInput,
                           binary_entropy, block_residual, decompose_strategy,
                           eve_eigenvalues, hye_bound, hye_direct,
                           jordan_blocks, key_rate, monte_carlo_exceedance,
                           recombined_statistics_table, tail_bound)
from bbqcert.chsh import chsh_value, s_max_bell_diagonal
from bbqcert.linalg import PAULI_X, PAULI_Z
from bbqcert.rand import random_density, random_dichotomic, rng_from
from bbqcert.reference import named_observable
from bbqcert.statistics import statistics_of
from bbqcert.types import Experiment, Observable, PureState

SQRT2 = np.sqrt(2.0)
COS4 = np.cos(np.pi / 8) ** 4


class TestJordanBlocks:
    def test_single_qubit_pair(self):
        jd = jordan_blocks(named_observable("X"), named_observable("Z"))
        assert jd.block_sizes == (2,)
        assert block_residual(jd, named_observable("X"), named_observable("Z")) < 1e-12

    def test_direct_sum_pair(self):
        a0 = Observable(scipy.linalg.block_diag(PAULI_X, PAULI_Z))
        a1 = Observable(scipy.linalg.block_diag(PAULI_Z, PAULI_X))
        jd = jordan_blocks(a0, a1)
        assert sorted(jd.block_sizes) == [2, 2]
        assert block_residual(jd, a0, a1) < 1e-10

    def test_commuting_pair_gives_singletons(self):
        z = named_observable("Z")
        jd = jordan_blocks(z, z)
        assert jd.block_sizes == (1, 1)

    def test_random_dim6_pairs(self):
        rng = rng_from(1)
        for _ in range(50):
            a0 = random_dichotomic(6, rng)
            a1 = random_dichotomic(6, rng)
            jd = jordan_blocks(a0, a1)
            assert block_residual(jd, a0, a1) <= 1e-9
            u = jd.basis_change
            assert np.max(np.abs(u.conj().T @ u - np.eye(6))) < 1e-10
            # conjugation preserves the spectra
            for m in (a0.matrix, a1.matrix):
                before = np.sort(np.linalg.eigvalsh(m))
                after = np.sort(np.linalg.eigvalsh(u.conj().T @ m @ u))
                assert np.max(np.abs(before - after)) < 1e-9


class TestDecomposeStrategy:
    def test_two_qubit_single_branch(self):
        exp = Experiment(random_density((2, 2), rng_from(2)),
                         [named_observable("X"), named_observable("Z")],
                         [named_observable("D"), named_observable("Dm")])
        branches = decompose_strategy(exp)
        assert len(branches) == 1
        assert branches[0][0] == pytest.approx(1.0, abs=1e-10)

    def test_direct_sum_two_branches(self):
        # state |00⟩⊕-embedded across two 2-dim blocks per side
        a0 = Observable(scipy.linalg.block_diag(PAULI_X, PAULI_X))
        a1 = Observable(scipy.linalg.block_diag(PAULI_Z, PAULI_Z))
        amps = np.zeros(16, dtype=complex)
        # weight 0.6 on block (0,0): |00⟩; weight 0.4 on block (1,1): |22⟩
        amps[0 * 4 + 0] = np.sqrt(0.6)
        amps[2 * 4 + 2] = np.sqrt(0.4)
        exp = Experiment(PureState(amps, (4, 4)).to_density(),
                         [a0, a1], [a0, a1])
        branches = decompose_strategy(exp)
        probs = sorted(p for p, _ in branches)
        assert probs == pytest.approx([0.4, 0.6], abs=1e-10)

    def test_random_recombination(self):
        rng = rng_from(3)
        for _ in range(5):
            exp = Experiment(random_density((4, 4), rng),
                             [random_dichotomic(4, rng) for _ in range(2)],
                             [random_dichotomic(4, rng) for _ in range(2)])
            branches = decompose_strategy(exp)
            assert sum(p for p, _ in branches) == pytest.approx(1.0, abs=1e-10)
            table = recombined_statistics_table(branches)
            assert np.max(np.abs(table - statistics_of(exp).table)) < 1e-9
            s_total = chsh_value(exp).s
            s_mix = sum(p * chsh_value(b).s for p, b in branches)
            assert abs(s_total - s_mix) < 1e-8


class TestTailBound:
    def test_r_zero_reduces_to_hoeffding(self):
        inp = TailBoundInput(n=1000, m=100, r=0, p=np.cos(np.pi / 8) ** 2, mu=0.1)
        # independent scalar oracle: plain Hoeffding, no entropy term at r=0
        oracle = np.exp(-2 * 100 * 0.1 ** 2 / COS4)
        assert tail_bound(inp) == pytest.approx(oracle, rel=1e-12)

    def test_frozen_scalar_value(self):
        inp = TailBoundInput(n=1000, m=100, r=0, p=np.cos(np.pi / 8) ** 2, mu=0.1)
        # frozen from the oracle: exp(−2·100·0.01/cos⁴(π/8)) = exp(−2.745163…)
        assert tail_bound(inp) == pytest.approx(0.06423763635084, rel=1e-10)

    def test_monotone_in_mu_and_m(self):
        p = np.cos(np.pi / 8) ** 2
        bounds_mu = [tail_bound(TailBoundInput(1000, 100, 5, p, mu))
                     for mu in (0.05, 0.1, 0.2)]
        assert bounds_mu[0] >= bounds_mu[1] >= bounds_mu[2]
        bounds_m = [tail_bound(TailBoundInput(1000, m, 5, p, 0.1))
                    for m in (50, 100, 200)]
        assert bounds_m[0] >= bounds_m[1] >= bounds_m[2]

    def test_entropy_term_active_for_positive_r(self):
        p = np.cos(np.pi / 8) ** 2
        with_r = tail_bound(TailBoundInput(1000, 100, 5, p, 0.2))
        gap = 100 * 0.2 - 5 * (1 - p)
        oracle = np.exp(-2 * gap ** 2 / (95 * COS4)
                        + 1100 * binary_entropy(5 / 1100) * np.log(2))
        assert with_r == pytest.approx(min(1.0, oracle), rel=1e-12)

    def test_degenerate_denominator(self):
        with pytest.raises(ValueError):
            tail_bound(TailBoundInput(10, 5, 5, 0.5, 0.1))

    def test_clamped_at_one(self):
        # entropy term dominates a vanishing Hoeffding gap
        assert tail_bound(TailBoundInput(10, 20, 10, 0.5, 0.2500001)) == 1.0

    def test_mu_inversion_by_bisection(self):
        from bbqcert.diqkd import mu_for_epsilon
        p = np.cos(np.pi / 8) ** 2
        for eps in (1e-2, 1e-6):
            mu = mu_for_epsilon(1000, 200, 3, p, eps)
            assert tail_bound(TailBoundInput(1000, 200, 3, p, mu)) <= eps
            # one bisection step below, the bound must exceed epsilon
            assert tail_bound(TailBoundInput(1000, 200, 3, p, mu - 1e-9)) > eps

    def test_monte_carlo_validity(self):
        p = np.cos(np.pi / 8) ** 2
        for mu in (0.05, 0.1):
            emp = monte_carlo_exceedance(100, p, mu, runs=20000, seed=9)
            bound = tail_bound(TailBoundInput(1000, 100, 0, p, mu))
            assert emp <= bound


def _bell_state_vectors():
    phip = np.array([1, 0, 0, 1]) / SQRT2
    phim = np.array([1, 0, 0, -1]) / SQRT2
    psip = np.array([0, 1, 1, 0]) / SQRT2
    psim = np.array([0, 1, -1, 0]) / SQRT2
    return phip, psim, phim, psip  # BellSpectrum field order


def _eve_block_eigs_oracle(lambdas, theta):
    """Purification + measurement + eigenvalue oracle for Λ_w."""
    vecs = _bell_state_vectors()
    psi = np.zeros(4 * 4, dtype=complex)  # (AB, E)
    for idx, (lam, v) in enumerate(zip(lambdas, vecs)):
        e = np.zeros(4)
        e[idx] = 1.0
        psi += np.sqrt(lam) * np.kron(v, e)
    psi = psi.reshape(2, 2, 4)  # (A, B, E)
    q0, q1 = np.cos(theta), np.sin(theta)
    basis = [np.array([q0, q1]), np.array([q1, -q0])]
    out = []
    for y in range(2):
        block = np.zeros((4, 4), dtype=complex)
        for x in range(2):  # Alice's discarded Z outcome
            e_state = np.einsum("abe,b->ae", psi, basis[y])[x]
            block += np.outer(e_state, e_state.conj())
        out.append(np.sort(np.linalg.eigvalsh(block))[::-1][:2])
    return out


class TestEveEigenvalues:
    def test_pure_epr(self):
        lam = eve_eigenvalues(BellSpectrum((1, 0, 0, 0), theta=0.0))
        assert lam == pytest.approx((0.5, 0.0), abs=1e-12)

    def test_theta_pi8_cross_term_independent(self):
        lam = (0.5, 0.2, 0.2, 0.1)
        swapped = (0.5, 0.2, 0.1, 0.2)  # flips the sign of the cross product
        a = eve_eigenvalues(BellSpectrum(lam, theta=np.pi / 8))
        b = eve_eigenvalues(BellSpectrum(swapped, theta=np.pi / 8))
        assert a == pytest.approx(b, abs=1e-12)

    def test_sum_is_half(self):
        rng = rng_from(4)
        for _ in range(20):
            lam = tuple(rng.dirichlet(np.ones(4)))
            theta = rng.uniform(0, np.pi)
            l0, l1 = eve_eigenvalues(BellSpectrum(lam, theta))
            assert l0 + l1 == pytest.approx(0.5, abs=1e-12)

    def test_matches_purification_oracle(self):
        rng = rng_from(5)
        for _ in range(20):
            lam = tuple(rng.dirichlet(np.ones(4)))
            theta = rng.uniform(0, np.pi)
            formula = eve_eigenvalues(BellSpectrum(lam, theta))
            for block_eigs in _eve_block_eigs_oracle(lam, theta):
                assert block_eigs == pytest.approx(formula, abs=1e-10)


class TestEntropyBounds:
    def test_key_rate_endpoints(self):
        kr = key_rate(KeyRateInput(2 * SQRT2, 0.0))
        assert kr.raw == 1.0
        assert hye_bound(2.0) == pytest.approx(0.0, abs=1e-12)
        kr = key_rate(KeyRateInput(2.0, 0.11))
        assert kr.raw == pytest.approx(-binary_entropy(0.11), abs=1e-12)
        assert kr.clamped == 0.0

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            hye_bound(1.5)
        with pytest.raises(ValueError):
            hye_bound(3.0)

    def test_key_rate_monotonicity(self):
        rates_s = [key_rate(KeyRateInput(s, 0.02)).raw for s in (2.2, 2.5, 2.8)]
        assert rates_s[0] < rates_s[1] < rates_s[2]
        rates_q = [key_rate(KeyRateInput(2.6, q)).raw for q in (0.0, 0.05, 0.1)]
        assert rates_q[0] > rates_q[1] > rates_q[2]

    def test_hye_direct_minimized_at_grid_ends(self):
        rng = rng_from(6)
        thetas = np.linspace(0, np.pi / 4, 41)
        for _ in range(10):
            lam = tuple(rng.dirichlet(np.ones(4)))
            vals = [hye_direct(BellSpectrum(lam, th)) for th in thetas]
            i_min = int(np.argmin(vals))
            assert i_min in (0, len(thetas) - 1)

    def test_direct_entropy_dominates_bound(self):
        rng = rng_from(7)
        for _ in range(100):
            lam = tuple(rng.dirichlet(np.ones(4)))
            s = s_max_bell_diagonal(lam)
            if s < 2.0:
                continue
            direct = min(hye_direct(BellSpectrum(lam, th))
                         for th in (0.0, np.pi / 4))
            assert direct >= hye_bound(s) - 1e-9
