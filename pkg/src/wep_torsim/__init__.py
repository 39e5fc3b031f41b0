"""Quantum weak-equivalence-principle tests with torsion balances.

Mass operators with non-commuting inertial and gravitational parts, the
resulting acceleration and torque statistics for qubit test masses, and the
sensitivity chain for a rotating-source torsion balance.
"""

__version__ = "0.1.0"

from .quantum_state import ArmState, BlochState
from .wep_core import (
    WepParams,
    form_factor_F,
    form_factor_G,
    phase_averaged_F,
    phase_averaged_G,
)

__all__ = [
    "__version__",
    "ArmState",
    "BlochState",
    "WepParams",
    "form_factor_F",
    "form_factor_G",
    "phase_averaged_F",
    "phase_averaged_G",
]
