"""Closed-form weak-pump results in the four-state basis {|00>, |01>, |02>, |10>}.

These expressions are the independent oracle for the master-equation solver.
They assume a zero-temperature bath and the two-phonon resonance condition,
and are written out term by term rather than simplified, so the identity
checks between them exercise the algebra itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from . import kernels
from .errors import DegenerateDenominator, InvalidParameter, NegativeDenominator, NumericalError
from .model import SystemParams

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class AmplitudeSet:
    c00: complex
    c01: complex
    c02: complex
    c10: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c00, self.c01, self.c02, self.c10], dtype=complex)

    @classmethod
    def from_array(cls, v) -> AmplitudeSet:
        return cls(*(complex(x) for x in v))

    @classmethod
    def ground(cls) -> AmplitudeSet:
        return cls(1.0, 0.0, 0.0, 0.0)


def _bracket(sp: SystemParams) -> complex:
    g, k, gm, dp = sp.g, sp.kappa, sp.gamma, sp.delta_p
    return ((gm + 2j * dp) * (k / 2 + 2j * dp) + 2 * g**2) * (gm / 2 + 1j * dp)


def steady_amplitudes(sp: SystemParams) -> AmplitudeSet:
    """Leading-order steady amplitudes with the ground amplitude pinned to 1.

    ``c01`` is first order in the pump, ``c02`` and ``c10`` second order.
    """
    eps, k, gm, dp, g = sp.epsilon, sp.kappa, sp.gamma, sp.delta_p, sp.g
    denom = _bracket(sp)
    if denom == 0:
        raise DegenerateDenominator("amplitude denominator vanishes")
    c01 = -1j * eps / (gm / 2 + 1j * dp)
    c02 = -SQRT2 * eps**2 * (k / 2 + 2j * dp) / denom
    # sign fixed by the C10 equation of motion; only |c10| enters g2
    c10 = 2j * g * eps**2 / denom
    return AmplitudeSet(1.0 + 0j, c01, c02, c10)


def amplitude_generator(sp: SystemParams, pinned: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """``(A, b)`` with ``dc/dt = A c + b`` for the amplitude equations.

    Unpinned, ``c = (c00, c01, c02, c10)`` and ``b = 0``: the Schroedinger
    equation with the non-Hermitian Hamiltonian restricted to four states,
    including the pump feedback into c00. Pinned, ``c00 = 1`` is held fixed,
    ``c = (c01, c02, c10)``, and the third-order back-action of c02 on c01 is
    dropped, so the fixed point is exactly :func:`steady_amplitudes`.
    """
    eps, k, gm, dp, g = sp.epsilon, sp.kappa, sp.gamma, sp.delta_p, sp.g
    d01 = -1j * (dp - 0.5j * gm)
    d02 = -1j * (2 * dp - 1j * gm)
    d10 = -1j * (2 * dp - 0.5j * k)
    if not pinned:
        a = np.array(
            [
                [0, -1j * eps, 0, 0],
                [-1j * eps, d01, -1j * SQRT2 * eps, 0],
                [0, -1j * SQRT2 * eps, d02, -1j * SQRT2 * g],
                [0, 0, -1j * SQRT2 * g, d10],
            ],
            dtype=complex,
        )
        return a, np.zeros(4, dtype=complex)
    a = np.array(
        [
            [d01, 0, 0],
            [-1j * SQRT2 * eps, d02, -1j * SQRT2 * g],
            [0, -1j * SQRT2 * g, d10],
        ],
        dtype=complex,
    )
    return a, np.array([-1j * eps, 0, 0], dtype=complex)


def evolve_amplitudes(
    sp: SystemParams,
    init: AmplitudeSet,
    t_final: float,
    dt: float,
    pinned: bool = False,
) -> AmplitudeSet:
    """Fixed-step RK4 integration of the amplitude equations up to ``t_final``."""
    if not dt > 0:
        raise InvalidParameter(f"dt must be > 0, got {dt}")
    if t_final < 0:
        raise InvalidParameter(f"t_final must be >= 0, got {t_final}")
    nsteps = math.ceil(t_final / dt - 1e-12) if t_final > 0 else 0
    h = t_final / nsteps if nsteps else 0.0
    a, b = amplitude_generator(sp, pinned)
    if pinned:
        y = kernels.rk4_affine(a, b, init.as_array()[1:], h, nsteps)
        return AmplitudeSet(1.0 + 0j, *(complex(x) for x in y))
    y = kernels.rk4_affine(a, b, init.as_array(), h, nsteps)
    return AmplitudeSet.from_array(y)


def g2_from_amplitudes(amps: AmplitudeSet, exact: bool = False) -> float:
    """Correlation of the truncated wavefunction.

    The default drops ``2|c02|^2`` next to ``|c01|^2`` in the mean phonon
    number, matching the weak-pump closed forms; ``exact=True`` keeps it.
    """
    p01 = abs(amps.c01) ** 2
    p02 = abs(amps.c02) ** 2
    if exact:
        return 2 * p02 / (p01 + 2 * p02) ** 2
    return 2 * p02 / p01**2


def g2_analytic(sp: SystemParams) -> float:
    """Weak-pump g2(0) at arbitrary pump detuning."""
    g, k, gm, dp = sp.g, sp.kappa, sp.gamma, sp.delta_p
    prod = (gm / 2 + 1j * dp) * (k / 2 + 2j * dp)
    value = abs(prod) ** 2 / abs(prod + g**2) ** 2
    # consistency with the amplitude route; the ratio does not depend on epsilon
    unit = SystemParams(g=g, kappa=k, gamma=gm, epsilon=1.0, delta_p=dp, n_th=sp.n_th)
    via_amps = g2_from_amplitudes(steady_amplitudes(unit))
    if abs(via_amps - value) > 1e-12 * max(abs(value), 1e-300) + 1e-300:
        raise NumericalError(f"closed form {value!r} disagrees with amplitude route {via_amps!r}")
    return value


def cooperativity(sp: SystemParams) -> float:
    return 4 * sp.g**2 / (sp.kappa * sp.gamma)


def g2_resonant(sp: SystemParams) -> float:
    """g2(0) for a resonant pump (delta_p = 0)."""
    return 1.0 / (1.0 + 4 * sp.g**2 / (sp.kappa * sp.gamma)) ** 2


def g2_two_phonon_resonance(sp: SystemParams) -> float:
    """g2(0) with the pump on a two-phonon transition, delta_p = +-g/sqrt(2)."""
    g, k, gm = sp.g, sp.kappa, sp.gamma
    num = (gm**2 / 4 + g**2 / 2) * (k**2 / 4 + 2 * g**2)
    den = (gm**2 / 4 + g**2 / 2) * (k**2 / 4 + 2 * g**2) + g**2 * k * gm / 2 - g**4
    if den <= 0:
        raise NegativeDenominator(f"denominator {den!r} <= 0")
    return num / den


def thermal_occupation(omega_m_hz: float, temp_kelvin: float) -> float:
    """Bose-Einstein occupation of a mode at cyclic frequency ``omega_m_hz``."""
    if not (omega_m_hz > 0 and temp_kelvin > 0):
        raise InvalidParameter("frequency and temperature must be > 0")
    x = constants.h * omega_m_hz / (constants.k * temp_kelvin)
    return 1.0 / math.expm1(x)
