"""Experiment construction from TOML configuration files.

Schema (all sections optional unless a command requires them)::

    seed = 7                       # top-level keys come first in TOML

    [state]
    family = "bell"                # bell | schmidt | werner | matrix
    theta = 0.5235987755982988     # schmidt: cos θ|00⟩ + sin θ|11⟩
    weight = 0.9                   # werner: w·φ+ + (1−w)·I/4
    site_dims = [2, 2]             # matrix family
    rows = [[[1.0, 0.0], ...]]     # matrix family, row-major [re, im] pairs

    [observables]
    a = ["X", "Z"]                 # names, {bloch=[θ, φ]} or {matrix=[...]}
    b = ["D", "Dm"]

    [noise]
    depolarizing = 0.0             # ρ ← (1−p)ρ + p·I/d
    rotation = 0.0                 # rotate every A-side observable about Y

    [diqkd]
    s = 2.8
    q = 0.01
    tail = [[1000, 100, 0, 0.1]]   # rows (n, m, r, mu)

    [gatetest]
    gate = "hadamard"              # hadamard | ctrlz | rot:<angle>
    corruption = 0.0

Named observables: I, X, Y, Z, Yb (−Y), D, Dm, E, Em, F, Fm.  Builtin config
names (usable instead of a path): reference, reference-my, reference-extended.
"""

from __future__ import annotations

import os

import numpy as np
import tomli

from .channels import apply_channel, depolarizing_channel
from .linalg import bell_phi_plus, evolve_hermitian, PAULI_Y
from .reference import OBSERVABLE_MATRICES, named_observable
from .types import DensityOperator, Experiment, Observable, PureState


class ConfigError(ValueError):
    """Malformed configuration; maps to CLI exit code 1."""


BUILTIN_CONFIGS = {
    "reference": {
        "state": {"family": "bell"},
        "observables": {"a": ["X", "Z"], "b": ["D", "Dm"]},
    },
    "reference-my": {
        "state": {"family": "bell"},
        "observables": {"a": ["X", "Z", "D"], "b": ["X", "Z", "D"]},
    },
    "reference-extended": {
        "state": {"family": "bell"},
        "observables": {"a": ["X", "Z", "D", "Y", "E", "F"],
                        "b": ["X", "Z", "D", "Yb", "Em", "Fm"]},
    },
}


def load_config(source: str | None, default: str = "reference") -> dict:
    """Load a TOML config from a path, or a builtin config by name."""
    if source is None:
        source = default
    if source in BUILTIN_CONFIGS:
        return {k: (dict(v) if isinstance(v, dict) else v)
                for k, v in BUILTIN_CONFIGS[source].items()}
    if not os.path.exists(source):
        raise ConfigError(f"config {source!r} is neither a file nor a builtin name")
    try:
        with open(source, "rb") as fh:
            return tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"TOML parse error in {source}: {exc}") from exc


def _complex_matrix(rows) -> np.ndarray:
    try:
        out = np.array([[complex(e[0], e[1]) for e in row] for row in rows])
    except (TypeError, IndexError) as exc:
        raise ConfigError(f"matrix rows must be [re, im] pair lists: {exc}") from exc
    return out


def build_state(section: dict) -> DensityOperator:
    family = section.get("family", "bell")
    if family == "bell":
        return bell_phi_plus().to_density()
    if family == "schmidt":
        theta = float(section.get("theta", np.pi / 4))
        amps = np.zeros(4, dtype=complex)
        amps[0], amps[3] = np.cos(theta), np.sin(theta)
        return PureState(amps, (2, 2)).to_density()
    if family == "werner":
        w = float(section.get("weight", 1.0))
        if not 0.0 <= w <= 1.0:
            raise ConfigError("werner weight must lie in [0, 1]")
        phi = bell_phi_plus().to_density().matrix
        return DensityOperator(w * phi + (1 - w) * np.eye(4) / 4, (2, 2))
    if family == "matrix":
        if "rows" not in section or "site_dims" not in section:
            raise ConfigError("matrix state needs 'rows' and 'site_dims'")
        m = _complex_matrix(section["rows"])
        try:
            return DensityOperator(m, tuple(section["site_dims"]))
        except ValueError as exc:
            raise ConfigError(f"invalid density matrix: {exc}") from exc
    raise ConfigError(f"unknown state family {family!r}")


def build_observable(spec) -> Observable:
    if isinstance(spec, str):
        if spec not in OBSERVABLE_MATRICES:
            raise ConfigError(f"unknown observable name {spec!r}")
        return named_observable(spec)
    if isinstance(spec, dict):
        if "bloch" in spec:
            theta, phi = (float(x) for x in spec["bloch"])
            from .chsh import bloch_observable
            return bloch_observable(theta, phi)
        if "matrix" in spec:
            try:
                return Observable(_complex_matrix(spec["matrix"]))
            except ValueError as exc:
                raise ConfigError(f"invalid observable matrix: {exc}") from exc
    raise ConfigError(f"cannot interpret observable spec {spec!r}")


def build_experiment(config: dict) -> Experiment:
    state = build_state(config.get("state", {}))
    obs_section = config.get("observables", {})
    if "a" not in obs_section or "b" not in obs_section:
        raise ConfigError("config needs [observables] with 'a' and 'b' lists")
    obs_a = [build_observable(s) for s in obs_section["a"]]
    obs_b = [build_observable(s) for s in obs_section["b"]]

    noise = config.get("noise", {})
    rot = float(noise.get("rotation", 0.0))
    if rot:
        if any(o.dim != 2 for o in obs_a):
            raise ConfigError("rotation noise supports qubit observables only")
        u = evolve_hermitian(PAULI_Y, rot / 2.0)
        obs_a = [Observable(u @ o.matrix @ u.conj().T) for o in obs_a]
    dep = float(noise.get("depolarizing", 0.0))
    if dep:
        mixed = apply_channel(depolarizing_channel(state.dim, dep),
                              DensityOperator(state.matrix))
        state = DensityOperator(mixed.matrix, state.site_dims)
    try:
        return Experiment(state, obs_a, obs_b)
    except ValueError as exc:
        raise ConfigError(f"inconsistent experiment: {exc}") from exc


def set_by_path(config: dict, path: str, value) -> None:
    """Set a dotted-path key, e.g. 'state.theta' or 'diqkd.s'."""
    parts = path.split(".")
    node = config
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"path {path!r} collides with a scalar")
    node[parts[-1]] = value
