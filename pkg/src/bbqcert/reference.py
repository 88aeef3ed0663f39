"""Canonical reference experiments: CHSH, Mayers-Yao, extended Mayers-Yao,
and the gate-test experiment triples."""

from __future__ import annotations

import numpy as np

from .linalg import I2, PAULI_X, PAULI_Y, PAULI_Z, bell_phi_plus, tensor_all
from .types import Experiment, Observable

_S2 = np.sqrt(2.0)

OBSERVABLE_MATRICES = {
    "I": I2,
    "X": PAULI_X,
    "Y": PAULI_Y,
    "Z": PAULI_Z,
    "Yb": -PAULI_Y,
    "D": (PAULI_X + PAULI_Z) / _S2,
    "Dm": (PAULI_X - PAULI_Z) / _S2,
    "E": (PAULI_X + PAULI_Y) / _S2,
    "Em": (PAULI_X - PAULI_Y) / _S2,
    "F": (PAULI_Y + PAULI_Z) / _S2,
    "Fm": (PAULI_Z - PAULI_Y) / _S2,
}


def named_observable(name: str) -> Observable:
    try:
        return Observable(OBSERVABLE_MATRICES[name])
    except KeyError:
        raise ValueError(f"unknown observable name {name!r}") from None


def chsh_reference_experiment() -> Experiment:
    """EPR pair with A = (X, Z), B = ((X+Z)/√2, (X−Z)/√2); S = 2√2."""
    return Experiment.from_pure(bell_phi_plus(),
                                [named_observable("X"), named_observable("Z")],
                                [named_observable("D"), named_observable("Dm")])


def my_reference_experiment() -> Experiment:
    """Mayers-Yao test: EPR pair measured with X, Z, D on both sides."""
    obs = [named_observable(n) for n in ("X", "Z", "D")]
    return Experiment.from_pure(bell_phi_plus(), obs, obs)


def extended_my_reference_experiment() -> Experiment:
    """Six-setting extended Mayers-Yao test, ordered (X, Z, D, Y, E, F).

    Bob's Y-flavored settings carry the −1 phase so that same-setting
    outcomes correlate on the EPR pair: Y_B = −Y, E_B = (X−Y)/√2,
    F_B = (Z−Y)/√2.
    """
    obs_a = [named_observable(n) for n in ("X", "Z", "D", "Y", "E", "F")]
    obs_b = [named_observable(n) for n in ("X", "Z", "D", "Yb", "Em", "Fm")]
    return Experiment.from_pure(bell_phi_plus(), obs_a, obs_b)


# ---------------------------------------------------------------------------
# Gate testing
# ---------------------------------------------------------------------------

def gate_test_observables(n_qubits: int) -> list[Observable]:
    """All tensor products over (I, X, Z, D), enumerated base-4.

    Setting index Σ_q digit_q·4^(n−1−q) encodes the operator string with
    digit alphabet (I, X, Z, D) and qubit 0 as the most significant digit.
    """
    base = [OBSERVABLE_MATRICES[n] for n in ("I", "X", "Z", "D")]
    obs = []
    for idx in range(4 ** n_qubits):
        digits = []
        rem = idx
        for _ in range(n_qubits):
            digits.append(rem % 4)
            rem //= 4
        digits.reverse()
        obs.append(Observable(tensor_all([base[d] for d in digits])))
    return obs


def hadamard_gate() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=complex) / _S2


def ctrl_z_gate() -> np.ndarray:
    return np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def rotation_gate(theta: float) -> np.ndarray:
    """Real planar rotation [[cos θ, −sin θ], [sin θ, cos θ]]."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def build_gate_test_experiments(t: np.ndarray, corruption: float = 0.0):
    """Device triple for testing gate T, optionally corrupted.

    Returns (experiment 1, 2, 3): the bare state test, the test after T⊗T,
    and the gate test with T on side A only.  A nonzero ``corruption`` angle
    composes the physical gate G' with a planar rotation on its first qubit.
    """
    t = np.asarray(t, dtype=complex)
    dim = t.shape[0]
    n = int(round(np.log2(dim)))
    if 2 ** n != dim:
        raise ValueError("gate dimension must be a power of 2")
    g = t
    if corruption:
        err = tensor_all([rotation_gate(corruption)] + [I2] * (n - 1))
        g = t @ err
    phi = bell_phi_plus(n)
    obs = gate_test_observables(n)
    from .types import PureState
    def evolved(u_a, u_b):
        big = np.kron(u_a, u_b)
        return PureState(big @ phi.amplitudes, phi.site_dims).to_density()
    eye = np.eye(dim, dtype=complex)
    exp1 = Experiment(evolved(eye, eye), obs, obs)
    exp2 = Experiment(evolved(g, t), obs, obs)
    exp3 = Experiment(evolved(g, eye), obs, obs)
    return exp1, exp2, exp3
