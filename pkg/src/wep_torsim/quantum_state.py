"""Bloch-parametrized qubit preparations."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .linalg2 import DensityMatrix2


def wrap_pi(angle: float) -> float:
    """Map an angle into [-pi, pi)."""
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped < 0.0:
        wrapped += 2.0 * math.pi
    wrapped -= math.pi
    # fmod can land exactly on +pi after the shift
    return -math.pi if wrapped >= math.pi else wrapped


@dataclass(frozen=True)
class BlochState:
    """Qubit state ``rho = (I + n_vec . sigma) / 2`` with
    ``n_vec = n (sin theta cos phi, sin theta sin phi, cos theta)``.

    ``phi`` is kept as given; read the normalized value from :attr:`phase`.
    """

    n: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        for name in ("n", "theta", "phi"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not 0.0 <= self.n <= 1.0:
            raise ValueError(f"Bloch length n={self.n!r} violates 0 <= n <= 1")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"polar angle theta={self.theta!r} outside [0, pi]")

    @property
    def phase(self) -> float:
        return wrap_pi(self.phi)

    def bloch_vector(self) -> tuple[float, float, float]:
        st = math.sin(self.theta)
        return (
            self.n * st * math.cos(self.phi),
            self.n * st * math.sin(self.phi),
            self.n * math.cos(self.theta),
        )


@dataclass(frozen=True)
class ArmState:
    """``count`` identical, uncorrelated copies of ``qubit`` on one balance arm."""

    qubit: BlochState
    count: int = 1

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"arm qubit count must be an integer >= 1, got {self.count!r}")


def density_matrix(s: BlochState) -> DensityMatrix2:
    return DensityMatrix2.from_bloch_vector(*s.bloch_vector())


def coherence(s: BlochState) -> float:
    """Sum of off-diagonal moduli in the energy basis, ``n sin(theta)``."""
    return s.n * math.sin(s.theta)


def pure_state(theta: float, phi: float = 0.0) -> BlochState:
    return BlochState(1.0, theta, phi)


MAXIMALLY_MIXED = BlochState(0.0, 0.0, 0.0)
EXCITED = BlochState(1.0, 0.0, 0.0)
PLUS = BlochState(1.0, math.pi / 2, 0.0)
