import itertools

import numpy as np
import pytest

from bbqcert.channels import apply_channel
from bbqcert.linalg import (I2, PAULI_Y, PAULI_Z, XZ, evolve_hermitian, expm,
                            tensor, tensor_all)
from bbqcert.channels import choi_of_unitary
from bbqcert.rand import (haar_unitary, random_povm, random_pure_state, rng_from)
from bbqcert.reference import my_reference_experiment
from bbqcert.simmap import (SimulationParams, conj_map_operator,
                            conj_multiparty_operator, conj_sim_bipartite_experiment,
                            conj_sim_hamiltonian, conj_sim_multiparty_state,
                            conj_sim_povm, conj_sim_state, multiparty_real_operator,
                            multiparty_real_sim_state, multiparty_real_state,
                            real_from_conj_basis_change, real_map_density,
                            real_map_hamiltonian_generator, real_map_kraus,
                            real_map_operator, real_map_povm, real_pure_split,
                            real_sim_bipartite_experiment)
from bbqcert.statistics import max_table_deviation, statistics_of
from bbqcert.types import ChoiMatrix, Observable, Povm, PureState


def _rand_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


class TestRealMapOperator:
    def test_imaginary_unit(self):
        assert np.allclose(real_map_operator(np.array([[1j]])), XZ, atol=1e-14)

    def test_identity(self):
        assert np.allclose(real_map_operator(np.eye(3)), np.eye(6), atol=1e-14)

    def test_output_real(self):
        m = _rand_complex(rng_from(1), 4)
        assert np.max(np.abs(real_map_operator(m).imag)) <= 1e-14

    def test_ring_homomorphism(self):
        rng = rng_from(2)
        for _ in range(5):
            a, b = _rand_complex(rng, 3), _rand_complex(rng, 3)
            assert np.max(np.abs(real_map_operator(a @ b)
                                 - real_map_operator(a) @ real_map_operator(b))) < 1e-12
            assert np.max(np.abs(real_map_operator(a + b)
                                 - real_map_operator(a) - real_map_operator(b))) < 1e-12

    def test_eigenvalue_doubling(self):
        rng = rng_from(3)
        u = haar_unitary(3, rng)
        m = u @ np.diag(rng.standard_normal(3) + 1j * rng.standard_normal(3)) @ u.conj().T
        ref = np.linalg.eigvals(m)
        expect = list(np.concatenate([ref, ref.conj()]))
        got = list(np.linalg.eigvals(real_map_operator(m)))
        for e in expect:  # greedy multiset matching
            j = int(np.argmin([abs(g - e) for g in got]))
            assert abs(got[j] - e) < 1e-9
            got.pop(j)

    def test_unitary_to_orthogonal(self):
        u = haar_unitary(4, rng_from(4))
        r = real_map_operator(u)
        assert np.max(np.abs(r.imag)) < 1e-14
        assert np.max(np.abs(r @ r.T - np.eye(8))) < 1e-12

    def test_hermitian_trace_doubling(self):
        m = _rand_complex(rng_from(5), 3)
        h = (m + m.conj().T) / 2
        r = real_map_operator(h)
        assert np.max(np.abs(r - r.conj().T)) < 1e-12
        assert abs(np.trace(r) - 2 * np.trace(h)) < 1e-12


class TestRealMapStatesAndMeasurements:
    def test_plus_state_computational_povm(self):
        plus = PureState(np.array([1, 1]) / np.sqrt(2))
        povm = Povm([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        rho2 = real_map_density(plus.to_density())
        povm2 = real_map_povm(povm)
        for k in range(2):
            p = np.real(np.trace(rho2.matrix @ povm2.elements[k]))
            assert p == pytest.approx(0.5, abs=1e-12)

    def test_y_basis_probabilities_preserved(self):
        psi = PureState(np.array([1, 1j]) / np.sqrt(2))
        vecs = np.linalg.eigh(PAULI_Y)[1]
        povm = Povm([np.outer(vecs[:, k], vecs[:, k].conj()) for k in range(2)])
        # complex-side oracle
        expect = [np.real(psi.amplitudes.conj() @ e @ psi.amplitudes)
                  for e in povm.elements]
        rho2 = real_map_density(psi.to_density())
        povm2 = real_map_povm(povm)
        got = [np.real(np.trace(rho2.matrix @ e)) for e in povm2.elements]
        assert np.allclose(got, expect, atol=1e-10)

    def test_random_povm_statistics(self):
        rng = rng_from(6)
        for _ in range(10):
            psi = random_pure_state((3,), rng)
            povm = random_povm(3, 3, rng)
            rho2 = real_map_density(psi.to_density())
            povm2 = real_map_povm(povm)
            for k in range(3):
                expect = np.real(psi.amplitudes.conj() @ povm.elements[k] @ psi.amplitudes)
                got = np.real(np.trace(rho2.matrix @ povm2.elements[k]))
                assert abs(got - expect) < 1e-10

    def test_kraus_map(self):
        rng = rng_from(7)
        from bbqcert.rand import random_channel, random_density
        ch = random_channel(3, 3, 2, rng)
        rch = real_map_kraus(ch)
        rho = random_density((3,), rng)
        out = apply_channel(ch, rho)
        rout = apply_channel(rch, real_map_density(rho))
        assert np.max(np.abs(rout.matrix - real_map_density(out).matrix)) < 1e-12

    def test_hamiltonian_generator(self):
        # H = Y, t = π/4: real-side statistics equal complex-side within 1e−10
        psi = PureState([1, 0])
        t = np.pi / 4
        evolved = evolve_hermitian(PAULI_Y, t) @ psi.amplitudes
        povm = Povm([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        gen = real_map_hamiltonian_generator(Observable(PAULI_Y, dichotomic=True))
        orth = expm(gen * t)
        assert np.max(np.abs(orth.imag)) < 1e-13
        assert np.max(np.abs(orth @ orth.T - np.eye(4))) < 1e-11
        u, _ = real_pure_split(psi)
        evolved_sim = orth @ u.amplitudes
        povm2 = real_map_povm(povm)
        for k in range(2):
            expect = np.real(evolved.conj() @ povm.elements[k] @ evolved)
            got = np.real(evolved_sim.conj() @ povm2.elements[k] @ evolved_sim)
            assert abs(got - expect) < 1e-10

    def test_generator_orthogonal_for_sampled_times(self):
        rng = rng_from(8)
        m = _rand_complex(rng, 3)
        h = (m + m.conj().T) / 2
        gen = real_map_hamiltonian_generator(h)
        for t in (0.1, 1.0, 3.0):
            orth = expm(gen * t)
            assert np.max(np.abs(orth.imag)) < 1e-12
            assert np.max(np.abs(orth @ orth.T - np.eye(6))) < 1e-11


class TestRealPureSplit:
    def test_zero_state(self):
        u, v = real_pure_split(PureState([1, 0]))
        assert np.allclose(u.amplitudes, [1, 0, 0, 0], atol=1e-14)
        assert np.allclose(v.amplitudes, [0, 0, 1, 0], atol=1e-14)

    def test_orthogonality(self):
        rng = rng_from(9)
        for _ in range(50):
            psi = random_pure_state((3,), rng)
            u, v = real_pure_split(psi)
            assert abs(np.vdot(u.amplitudes, v.amplitudes)) < 1e-12

    def test_both_columns_reproduce_statistics(self):
        rng = rng_from(10)
        psi = random_pure_state((3,), rng)
        povm = random_povm(3, 2, rng)
        povm2 = real_map_povm(povm)
        u, v = real_pure_split(psi)
        for k in range(2):
            expect = np.real(psi.amplitudes.conj() @ povm.elements[k] @ psi.amplitudes)
            for col in (u, v):
                got = np.real(col.amplitudes.conj() @ povm2.elements[k] @ col.amplitudes)
                assert abs(got - expect) < 1e-10


class TestMultipartyRealStates:
    def test_k2_formula(self):
        zero, one = multiparty_real_state(2)
        assert np.allclose(zero.amplitudes,
                           np.array([1, 0, 0, -1]) / np.sqrt(2), atol=1e-14)
        assert np.allclose(one.amplitudes,
                           np.array([0, 1, 1, 0]) / np.sqrt(2), atol=1e-14)

    def test_stabilizers_all_pairs_k4(self):
        zero, one = multiparty_real_state(4)
        for m, n in itertools.combinations(range(4), 2):
            ops = [I2] * 4
            ops[m] = XZ
            ops[n] = XZ
            stab = -tensor_all(ops)
            for ket in (zero, one):
                assert np.linalg.norm(stab @ ket.amplitudes - ket.amplitudes) < 1e-10

    def test_logical_xz_action(self):
        zero, one = multiparty_real_state(3)
        for q in range(3):
            ops = [I2] * 3
            ops[q] = XZ
            op = tensor_all(ops)
            assert np.linalg.norm(op @ zero.amplitudes - one.amplitudes) < 1e-12
            assert np.linalg.norm(op @ one.amplitudes + zero.amplitudes) < 1e-12

    def test_multiparty_statistics_match_reference(self):
        rng = rng_from(11)
        dims = (2, 3)
        psi = random_pure_state(dims, rng)
        povms = [random_povm(d, 2, rng) for d in dims]
        sim_state = multiparty_real_sim_state(psi)
        for k0 in range(2):
            for k1 in range(2):
                ref_op = tensor(povms[0].elements[k0], povms[1].elements[k1])
                expect = np.real(psi.amplitudes.conj() @ ref_op @ psi.amplitudes)
                op = (multiparty_real_operator(povms[0].elements[k0], 0, dims)
                      @ multiparty_real_operator(povms[1].elements[k1], 1, dims))
                got = np.real(sim_state.amplitudes.conj() @ op @ sim_state.amplitudes)
                assert abs(got - expect) < 1e-10


class TestConjugationSimulation:
    def test_c_map_forms(self):
        m = _rand_complex(rng_from(12), 3)
        c = conj_map_operator(m)
        direct = tensor(np.diag([1.0, 0.0]), m) + tensor(np.diag([0.0, 1.0]), m.conj())
        assert np.max(np.abs(c - direct)) < 1e-13

    def test_c_homomorphism_and_unitarity(self):
        rng = rng_from(13)
        for _ in range(5):
            a, b = _rand_complex(rng, 3), _rand_complex(rng, 3)
            assert np.max(np.abs(conj_map_operator(a @ b)
                                 - conj_map_operator(a) @ conj_map_operator(b))) < 1e-12
        u = haar_unitary(3, rng)
        cu = conj_map_operator(u)
        assert np.max(np.abs(cu @ cu.conj().T - np.eye(6))) < 1e-12

    def test_state_embedding_limits(self):
        psi = PureState([0.6, 0.8j])
        rho1 = conj_sim_state(psi, SimulationParams(1.0, 0.0))
        expect = tensor(np.diag([1.0, 0.0]),
                        np.outer(psi.amplitudes, psi.amplitudes.conj()))
        assert np.max(np.abs(rho1.matrix - expect)) < 1e-13
        rho0 = conj_sim_state(psi, SimulationParams(0.0, 0.0))
        conj_branch = np.outer(psi.amplitudes.conj(), psi.amplitudes)
        assert np.max(np.abs(rho0.matrix - tensor(np.diag([0.0, 1.0]), conj_branch))) < 1e-13

    def test_params_invariant(self):
        with pytest.raises(ValueError):
            SimulationParams(0.5, 0.6)
        with pytest.raises(ValueError):
            SimulationParams(1.2, 0.0)

    def test_statistics_preserved_pure_superposition(self):
        rng = rng_from(14)
        psi = random_pure_state((3,), rng)
        params = SimulationParams(0.5, 0.5)
        rho = conj_sim_state(psi, params)
        for _ in range(20):
            povm = random_povm(3, 2, rng)
            sim = conj_sim_povm(povm)
            for k in range(2):
                expect = np.real(psi.amplitudes.conj() @ povm.elements[k] @ psi.amplitudes)
                got = np.real(np.trace(rho.matrix @ sim.elements[k]))
                assert abs(got - expect) < 1e-10

    def test_projection_recovers_branches(self):
        rng = rng_from(15)
        psi = random_pure_state((3,), rng)
        rho = conj_sim_state(psi, SimulationParams(0.7, 0.1 + 0.2j))
        for branch, vec in ((0, psi.amplitudes), (1, psi.amplitudes.conj())):
            proj = tensor(np.diag([1.0 - branch, float(branch)]), np.eye(3))
            sub = proj @ rho.matrix @ proj
            p = np.real(np.trace(sub))
            sub = sub / p
            target = np.kron([1 - branch, branch], vec)
            fid = np.real(target.conj() @ sub @ target)
            assert fid >= 1 - 1e-12

    def test_hamiltonian_two_path(self):
        # branch check at H = Z, t = π: C(e^{−iπZ}) = C(−I·phase) structure
        hz = conj_sim_hamiltonian(PAULI_Z)
        u1 = expm(-1j * hz * np.pi)
        u2 = conj_map_operator(evolve_hermitian(PAULI_Z, np.pi))
        assert np.max(np.abs(u1 - u2)) < 1e-10
        rng = rng_from(16)
        m = _rand_complex(rng, 4)
        h = (m + m.conj().T) / 2
        hp = conj_sim_hamiltonian(h)
        for t in (0.1, 1.0, 3.0):
            assert np.max(np.abs(expm(-1j * hp * t)
                                 - conj_map_operator(evolve_hermitian(h, t)))) < 1e-9

    def test_multiparty_ghz_statistics(self):
        rng = rng_from(17)
        dims = (2, 2, 2)
        psi = random_pure_state(dims, rng)
        alpha = beta = 1 / np.sqrt(2)
        sim = conj_sim_multiparty_state(psi, alpha, beta, 3)
        povms = [random_povm(2, 2, rng) for _ in range(3)]
        unitaries = [haar_unitary(2, rng) for _ in range(3)]
        # evolve each party by a local unitary, then measure: direct-evolution oracle
        ref = tensor_all(unitaries) @ psi.amplitudes
        sim_vec = sim.amplitudes
        for party in range(3):
            sim_vec = conj_multiparty_operator(unitaries[party], party, dims) @ sim_vec
        for ks in itertools.product(range(2), repeat=3):
            ref_op = tensor_all([povms[i].elements[ks[i]] for i in range(3)])
            expect = np.real(ref.conj() @ ref_op @ ref)
            op = np.eye(2 ** 3 * 8, dtype=complex)
            for party in range(3):
                op = op @ conj_multiparty_operator(povms[party].elements[ks[party]],
                                                   party, dims)
            got = np.real(sim_vec.conj() @ op @ sim_vec)
            assert abs(got - expect) < 1e-10


class TestRealFromConjBasisChange:
    def test_scalar_i(self):
        u = real_from_conj_basis_change(1)
        ci = conj_map_operator(np.array([[1j]]))
        assert np.max(np.abs(u @ ci @ u.conj().T - XZ)) < 1e-12

    def test_random_operator(self):
        rng = rng_from(18)
        m = _rand_complex(rng, 3)
        u = tensor(real_from_conj_basis_change(1), np.eye(3))
        lhs = u @ conj_map_operator(m) @ u.conj().T
        assert np.max(np.abs(lhs - real_map_operator(m))) < 1e-12

    def test_k2_state_map(self):
        rng = rng_from(19)
        psi = random_pure_state((2, 2), rng)
        ghz = conj_sim_multiparty_state(psi, 1 / np.sqrt(2), 1 / np.sqrt(2), 2)
        u = tensor(real_from_conj_basis_change(2), np.eye(4))
        mapped = u @ ghz.amplitudes
        target = multiparty_real_sim_state(psi).amplitudes
        assert np.linalg.norm(mapped - target) < 1e-12


class TestChoiRankObstruction:
    def test_r_of_choi_has_rank_two(self):
        u = haar_unitary(2, rng_from(20))
        j = choi_of_unitary(u)
        r_j = ChoiMatrix(real_map_operator(j.matrix), 2 * j.in_dim, 2)
        assert r_j.numerical_rank(1e-8) == 2
        j_r = choi_of_unitary(real_map_operator(u))
        assert j_r.numerical_rank(1e-8) == 1


class TestExperimentLevelSimulations:
    def test_bipartite_sims_reproduce_statistics(self):
        exp = my_reference_experiment()
        ref = statistics_of(exp)
        for params in (SimulationParams(1.0, 0.0), SimulationParams(0.3, 0.0),
                       SimulationParams(0.5, 0.5), SimulationParams(0.7, 0.2 + 0.3j)):
            sim = conj_sim_bipartite_experiment(exp, params)
            assert max_table_deviation(statistics_of(sim), ref) < 1e-10
        rsim = real_sim_bipartite_experiment(exp)
        assert max_table_deviation(statistics_of(rsim), ref) < 1e-10
