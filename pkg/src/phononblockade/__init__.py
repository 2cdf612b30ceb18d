"""Phonon blockade in a quadratically coupled optomechanical system.

Steady states of the driven two-mode master equation, the phonon
correlation g2(0), closed-form weak-drive results and figure sweeps.
"""

from .core import DensityMatrix, Operator, Truncation, fock_state, ladder, number, vacuum
from .errors import PhononBlockadeError
from .kernels import BACKEND
from .liouville import SteadyStateReport, converge_truncation, solve, steady_state
from .model import SystemParams
from .observables import ObservableSet, g2_zero, measure

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DensityMatrix",
    "ObservableSet",
    "Operator",
    "PhononBlockadeError",
    "SteadyStateReport",
    "SystemParams",
    "Truncation",
    "converge_truncation",
    "fock_state",
    "g2_zero",
    "ladder",
    "measure",
    "number",
    "solve",
    "steady_state",
    "vacuum",
]
