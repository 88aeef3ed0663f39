"""Shared helpers for the test suite."""

import numpy as np

from bbqcert.types import DensityOperator

SQRT2 = np.sqrt(2.0)

BELL_VECTORS = {
    "phi+": np.array([1, 0, 0, 1]) / SQRT2,
    "phi-": np.array([1, 0, 0, -1]) / SQRT2,
    "psi+": np.array([0, 1, 1, 0]) / SQRT2,
    "psi-": np.array([0, 1, -1, 0]) / SQRT2,
}


def bell_diagonal_state(l_phip, l_psim, l_phim, l_psip) -> DensityOperator:
    """Bell-diagonal state with spectrum in (φ+, ψ−, φ−, ψ+) order."""
    m = (l_phip * np.outer(BELL_VECTORS["phi+"], BELL_VECTORS["phi+"])
         + l_psim * np.outer(BELL_VECTORS["psi-"], BELL_VECTORS["psi-"])
         + l_phim * np.outer(BELL_VECTORS["phi-"], BELL_VECTORS["phi-"])
         + l_psip * np.outer(BELL_VECTORS["psi+"], BELL_VECTORS["psi+"]))
    return DensityOperator(m.astype(complex), (2, 2))
