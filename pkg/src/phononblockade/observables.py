"""Quantities read off a steady state: g2(0), truncation fidelity, occupations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, ladder
from .errors import DimensionMismatch, InsufficientOccupation, NumericalError

OCCUPATION_FLOOR = 1e-12
POPULATION_CLIP = 1e-10


def _real_expect(rho: DensityMatrix, op) -> float:
    val = rho.expect(op)
    if abs(val.imag) > 1e-10:
        raise NumericalError(f"expectation value has imaginary part {val.imag:.3e}")
    return val.real


def g2_zero(rho: DensityMatrix) -> float:
    """Equal-time phonon correlation ``<b^dag b^dag b b> / <b^dag b>^2``."""
    b = ladder(rho.dims, "mechanical")
    bd = b.dag()
    n = _real_expect(rho, bd @ b)
    if n < OCCUPATION_FLOOR:
        raise InsufficientOccupation(f"mean phonon number {n:.3e} too small for g2(0)")
    return _real_expect(rho, bd @ bd @ b @ b) / n**2


def occupations(rho: DensityMatrix) -> tuple[float, float]:
    """Mean photon and phonon numbers."""
    a = ladder(rho.dims, "cavity")
    b = ladder(rho.dims, "mechanical")
    return _real_expect(rho, a.dag() @ a), _real_expect(rho, b.dag() @ b)


def populations(rho: DensityMatrix) -> dict[tuple[int, int], float]:
    """Fock populations keyed by ``(n_a, m_b)``; roundoff negatives clipped to zero."""
    p = np.real(np.diag(rho.data)).reshape(rho.dims.n_a, rho.dims.n_b)
    p = np.where((p < 0) & (p > -POPULATION_CLIP), 0.0, p)
    return {(i, j): float(p[i, j]) for i in range(rho.dims.n_a) for j in range(rho.dims.n_b)}


def fidelity_F(rho: DensityMatrix) -> float:
    """Weight of the state inside span{|00>, |01>, |02>, |10>}."""
    dims = rho.dims
    if dims.n_b < 3:
        raise DimensionMismatch(f"fidelity needs n_b >= 3, got {dims}")
    return _four_state_weight(populations(rho))


def _four_state_weight(p: dict) -> float:
    # a single-level cavity has no |1_a 0_b> component
    return p[(0, 0)] + p[(0, 1)] + p[(0, 2)] + p.get((1, 0), 0.0)


@dataclass(frozen=True)
class ObservableSet:
    g2: float | None  # None when the phonon occupation is too small
    mean_phonons: float
    mean_photons: float
    fidelity_F: float | None
    populations: dict

    @property
    def g2_defined(self) -> bool:
        return self.g2 is not None


def measure(rho: DensityMatrix) -> ObservableSet:
    try:
        g2 = g2_zero(rho)
    except InsufficientOccupation:
        g2 = None
    photons, phonons = occupations(rho)
    pops = populations(rho)
    fid = _four_state_weight(pops) if rho.dims.n_b >= 3 else None
    return ObservableSet(g2, phonons, photons, fid, pops)
