"""Quaternion arithmetic, quaternionic matrices, and the time-ordered
quaternionic non-local box.

Conventions: q = a + ib + jc + kd with i² = j² = k² = ijk = −1, so ij = k and
ji = −k.  Quaternionic amplitudes multiply on the left of basis kets, and a
gate applied later multiplies amplitudes further to the left; this ordering
is what makes the box work.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rand import rng_from


@dataclass(frozen=True)
class Quaternion:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __add__(self, q: "Quaternion") -> "Quaternion":
        return Quaternion(self.a + q.a, self.b + q.b, self.c + q.c, self.d + q.d)

    def __sub__(self, q: "Quaternion") -> "Quaternion":
        return Quaternion(self.a - q.a, self.b - q.b, self.c - q.c, self.d - q.d)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, q):
        if isinstance(q, (int, float)):
            return Quaternion(self.a * q, self.b * q, self.c * q, self.d * q)
        return qmul(self, q)

    def __rmul__(self, r):
        if isinstance(r, (int, float)):
            return Quaternion(self.a * r, self.b * r, self.c * r, self.d * r)
        return NotImplemented

    def conj(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def norm_sq(self) -> float:
        return self.a ** 2 + self.b ** 2 + self.c ** 2 + self.d ** 2

    def approx_eq(self, q: "Quaternion", tol: float = 1e-12) -> bool:
        return (self - q).norm() <= tol


Q_ONE = Quaternion(1.0)
Q_I = Quaternion(0.0, 1.0)
Q_J = Quaternion(0.0, 0.0, 1.0)
Q_K = Quaternion(0.0, 0.0, 0.0, 1.0)
Q_ZERO = Quaternion()


def qmul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product (non-commutative; |pq| = |p||q|)."""
    return Quaternion(
        p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
        p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
        p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
        p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
    )


def qconj(q: Quaternion) -> Quaternion:
    return q.conj()


@dataclass(frozen=True)
class QuatMatrix:
    """Matrix with quaternion entries, stored as a (rows, cols) grid."""

    entries: tuple[tuple[Quaternion, ...], ...]

    def __init__(self, entries):
        rows = tuple(tuple(_as_quat(e) for e in row) for row in entries)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("entries must form a non-empty rectangular grid")
        object.__setattr__(self, "entries", rows)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, idx) -> Quaternion:
        return self.entries[idx[0]][idx[1]]


def _as_quat(x) -> Quaternion:
    if isinstance(x, Quaternion):
        return x
    if isinstance(x, (int, float)):
        return Quaternion(float(x))
    raise TypeError(f"cannot interpret {x!r} as a quaternion")


def qmat_mul(m: QuatMatrix, n: QuatMatrix) -> QuatMatrix:
    if m.cols != n.rows:
        raise ValueError("matrix dimensions do not match")
    out = []
    for i in range(m.rows):
        row = []
        for j in range(n.cols):
            acc = Q_ZERO
            for k in range(m.cols):
                acc = acc + qmul(m[i, k], n[k, j])
            row.append(acc)
        out.append(row)
    return QuatMatrix(out)


def qmat_dagger(m: QuatMatrix) -> QuatMatrix:
    return QuatMatrix([[m[j, i].conj() for j in range(m.rows)]
                       for i in range(m.cols)])


def is_quat_unitary(m: QuatMatrix, tol: float = 1e-12) -> bool:
    if m.rows != m.cols:
        return False
    prod = qmat_mul(m, qmat_dagger(m))
    for i in range(m.rows):
        for j in range(m.cols):
            target = Q_ONE if i == j else Q_ZERO
            if not prod[i, j].approx_eq(target, tol):
                return False
    return True


R_I = QuatMatrix([[Q_ONE, Q_ZERO], [Q_ZERO, Q_I]])
R_J = QuatMatrix([[Q_ONE, Q_ZERO], [Q_ZERO, Q_J]])


# ---------------------------------------------------------------------------
# Non-local box protocol
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoxTranscript:
    """One run of the box: inputs, outputs and the time-ordered gate log."""

    a: int
    b: int
    x: int
    y: int
    applied_times: tuple[tuple[int, str], ...]

    def __post_init__(self):
        times = [t for t, _ in self.applied_times]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValueError("gate log times must be strictly increasing")


class _QuatTwoQubitState:
    """State Σ q_{xy}|xy⟩ with quaternion amplitudes (left multiplication)."""

    def __init__(self, amps: dict[tuple[int, int], Quaternion]):
        self.amps = {key: amps.get(key, Q_ZERO) for key in
                     ((0, 0), (0, 1), (1, 0), (1, 1))}

    def apply_alice_phase(self, q: Quaternion) -> None:
        """Left-multiply the amplitude of every |1·⟩ component by q."""
        for y in (0, 1):
            self.amps[(1, y)] = qmul(q, self.amps[(1, y)])

    def apply_bob_phase(self, q: Quaternion) -> None:
        for x in (0, 1):
            self.amps[(x, 1)] = qmul(q, self.amps[(x, 1)])

    def plus_minus_probabilities(self) -> dict[tuple[int, int], float]:
        """Outcome probabilities after measuring both qubits in |±⟩.

        The Hadamard change of basis has real coefficients, which commute
        with quaternions, so amplitudes transform unambiguously; the usual
        norm-squared rule then applies.
        """
        probs = {}
        for s in (0, 1):
            for t in (0, 1):
                acc = Q_ZERO
                for (xx, yy), q in self.amps.items():
                    coeff = 0.5 * (-1.0) ** (s * xx + t * yy)
                    acc = acc + coeff * q
                probs[(s, t)] = acc.norm_sq()
        total = sum(probs.values())
        return {k: v / total for k, v in probs.items()}


def nonlocal_box_run(a: int, b: int, rng=0) -> BoxTranscript:
    """Simulate one run of the quaternionic non-local box.

    Alice and Bob share (|00⟩ + k|11⟩)/√2.  Alice applies diag(1, i) at time
    t1 if a = 0, else t3; Bob applies diag(1, j) at t4 if b = 0, else t2; both
    then measure in the |±⟩ basis at t5.  The outputs always satisfy
    x ⊕ y = a·b, while each output alone is a fair coin.
    """
    if a not in (0, 1) or b not in (0, 1):
        raise ValueError("inputs must be bits")
    rng = rng_from(rng)
    inv = 1.0 / np.sqrt(2.0)
    state = _QuatTwoQubitState({(0, 0): inv * Q_ONE, (1, 1): inv * Q_K})
    alice_time = 1 if a == 0 else 3
    bob_time = 4 if b == 0 else 2
    events = sorted([(alice_time, "alice:R_i"), (bob_time, "bob:R_j")])
    for t, label in events:
        if label.startswith("alice"):
            state.apply_alice_phase(Q_I)
        else:
            state.apply_bob_phase(Q_J)
    probs = state.plus_minus_probabilities()
    outcomes = list(probs.keys())
    weights = np.array([probs[o] for o in outcomes])
    pick = outcomes[int(rng.choice(len(outcomes), p=weights / weights.sum()))]
    log = tuple(events) + ((5, "measure:+/-"),)
    return BoxTranscript(a, b, pick[0], pick[1], log)


def box_chsh_value(samples_per_input: int = 250, seed=0) -> float:
    """S = 8p − 4 from the empirical win rate of the box over uniform inputs."""
    rng = rng_from(seed)
    wins = 0
    total = 0
    for a in (0, 1):
        for b in (0, 1):
            for _ in range(samples_per_input):
                t = nonlocal_box_run(a, b, rng)
                wins += int(t.x ^ t.y == a & b)
                total += 1
    return 8.0 * (wins / total) - 4.0
