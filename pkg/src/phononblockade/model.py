"""Physical parameters, the effective two-phonon Hamiltonian and its dissipators.

Rates are dimensionless multiples of the cavity decay rate by default
(``kappa = 1``). The dropped second-order term ``g0 a^dag a (b + b^dag)^2`` is
not modelled.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, fields
from typing import Literal

import numpy as np

from .core import Operator, Truncation, ladder
from .errors import DegenerateDenominator, InvalidParameter

RWA_THRESHOLD = 0.05


@dataclass(frozen=True)
class SystemParams:
    """Rates and detunings of the effective model.

    Defaults are the baseline used throughout: g/kappa = 2, gamma/kappa = 0.01,
    epsilon/kappa = 0.1, delta_p = 0 and a zero-temperature bath.
    """

    g: float = 2.0
    kappa: float = 1.0
    gamma: float = 0.01
    epsilon: float = 0.1
    delta_p: float = 0.0
    n_th: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, numbers.Real) or not math.isfinite(v):
                raise InvalidParameter(f"{f.name} must be a finite real, got {v!r}")
            object.__setattr__(self, f.name, float(v))
        if self.kappa <= 0:
            raise InvalidParameter(f"kappa must be > 0, got {self.kappa}")
        if self.gamma <= 0:
            raise InvalidParameter(f"gamma must be > 0, got {self.gamma}")
        for name in ("g", "epsilon", "n_th"):
            if getattr(self, name) < 0:
                raise InvalidParameter(f"{name} must be >= 0, got {getattr(self, name)}")

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-frame frequencies (all in the same unit, e.g. Hz)."""

    g0: float
    omega_drive_amp: float
    omega_c: float
    omega_m: float
    omega_L: float
    omega_p: float
    kappa: float

    def __post_init__(self):
        if not self.omega_m > 0:
            raise InvalidParameter(f"omega_m must be > 0, got {self.omega_m}")

    @property
    def delta_c(self) -> float:
        return self.omega_c - self.omega_L

    @property
    def delta_p(self) -> float:
        return self.omega_m - self.omega_p


@dataclass(frozen=True)
class CollapseChannel:
    """Jump operator ``c`` contributing ``(rate/2)(2 c rho c^dag - c^dag c rho - rho c^dag c)``."""

    operator: Operator
    rate: float

    def __post_init__(self):
        if not self.rate >= 0:
            raise InvalidParameter(f"collapse rate must be >= 0, got {self.rate}")


def linearize(p: PhysicalParams) -> tuple[complex, float]:
    """Mean cavity amplitude and the enhanced coupling ``g0 |alpha|``.

    The phase of alpha is absorbed into the drive, so the effective coupling
    is real and non-negative.
    """
    denom = complex(-p.delta_c, p.kappa / 2)
    if denom == 0:
        raise DegenerateDenominator("delta_c = 0 and kappa = 0 give an unbounded cavity amplitude")
    alpha = p.omega_drive_amp / denom
    return alpha, p.g0 * abs(alpha)


def check_rwa(p: PhysicalParams, g_eff: float) -> Literal["ok", "warning"]:
    """``"warning"`` when g_eff / omega_m exceeds :data:`RWA_THRESHOLD`."""
    if not p.omega_m > 0:
        raise InvalidParameter("omega_m must be > 0")
    return "warning" if abs(g_eff) / p.omega_m > RWA_THRESHOLD else "ok"


def build_heff(sp: SystemParams, dims: Truncation, cavity_detuning: float | None = None) -> Operator:
    """Rotating-frame Hamiltonian with the two-phonon coupling and the mechanical pump.

    ``cavity_detuning`` overrides the photon-number coefficient, which is
    otherwise locked to ``2 * delta_p`` by the two-phonon resonance condition.
    """
    a = ladder(dims, "cavity")
    b = ladder(dims, "mechanical")
    ad, bd = a.dag(), b.dag()
    dc = 2.0 * sp.delta_p if cavity_detuning is None else float(cavity_detuning)
    h = (
        dc * (ad @ a)
        + sp.delta_p * (bd @ b)
        + sp.g * (ad @ b @ b + a @ bd @ bd)
        + sp.epsilon * (bd + b)
    )
    # enforce exact Hermiticity against roundoff in the products
    return Operator(dims, 0.5 * (h.data + h.data.conj().T))


def build_heff_nonhermitian(
    sp: SystemParams, dims: Truncation, cavity_detuning: float | None = None
) -> np.ndarray:
    """``H_eff - i(kappa/2) a^dag a - i(gamma/2) b^dag b`` as a plain matrix."""
    a = ladder(dims, "cavity")
    b = ladder(dims, "mechanical")
    h = build_heff(sp, dims, cavity_detuning).data
    return h - 0.5j * sp.kappa * (a.dag() @ a).data - 0.5j * sp.gamma * (b.dag() @ b).data


def collapse_channels(sp: SystemParams, dims: Truncation) -> list[CollapseChannel]:
    """Cavity decay, thermal phonon absorption and phonon emission, in that order."""
    a = ladder(dims, "cavity")
    b = ladder(dims, "mechanical")
    return [
        CollapseChannel(a, sp.kappa),
        CollapseChannel(b.dag(), sp.gamma * sp.n_th),
        CollapseChannel(b, sp.gamma * (sp.n_th + 1.0)),
    ]


def excitation_number(dims: Truncation) -> Operator:
    """``2 a^dag a + b^dag b``, conserved by the coupling when the pump is off."""
    a = ladder(dims, "cavity")
    b = ladder(dims, "mechanical")
    return 2.0 * (a.dag() @ a) + b.dag() @ b


def two_phonon_block(sp: SystemParams) -> np.ndarray:
    """Hamiltonian restricted to span{|0_a 2_b>, |1_a 0_b>} (pump dropped)."""
    dims = Truncation(2, 3)
    h = build_heff(SystemParams(g=sp.g, kappa=sp.kappa, gamma=sp.gamma, epsilon=0.0,
                                delta_p=sp.delta_p, n_th=sp.n_th), dims).data
    idx = [dims.index(0, 2), dims.index(1, 0)]
    return h[np.ix_(idx, idx)]


# Device preset selected by --preset paper-sec4; frequencies are cyclic (Hz), temperature in kelvin.
DEVICE_PRESET = {
    "g0": 245.0,
    "omega_m": 5.6e9,
    "gamma": 328.0,
    "kappa": 20e6,
    "temperature": 25e-3,
    "alpha_abs": 1e4,
    "omega_c": 193.4e12,
}


def device_preset_physical(preset: dict | None = None) -> PhysicalParams:
    """PhysicalParams for the device preset, driven on the red two-phonon sideband.

    The drive amplitude is chosen so that ``|alpha|`` equals the preset value.
    """
    ps = dict(DEVICE_PRESET if preset is None else preset)
    omega_m = ps["omega_m"]
    omega_l = ps["omega_c"] - 2.0 * omega_m
    drive = ps["alpha_abs"] * abs(complex(-2.0 * omega_m, ps["kappa"] / 2))
    return PhysicalParams(
        g0=ps["g0"],
        omega_drive_amp=drive,
        omega_c=ps["omega_c"],
        omega_m=omega_m,
        omega_L=omega_l,
        omega_p=omega_m,
        kappa=ps["kappa"],
    )

