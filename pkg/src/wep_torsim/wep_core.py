"""Mass-operator parametrization of WEP violations and free-fall acceleration statistics.

The free-fall acceleration operator is ``a = g * [[r1, r], [conj(r), r2]]`` in
the eigenbasis of the inertial internal Hamiltonian, with ``r = |r| exp(i phi_r)``.
The WEP holds iff ``r1 = r2 = 1`` and ``r = 0``.

``F`` and ``G`` below are the mean and variance of ``a / g`` in a Bloch state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .linalg2 import HermitianOp2
from .quantum_state import BlochState

TWO_PI = 2.0 * math.pi
SPEED_OF_LIGHT = 299_792_458.0
PERTURBATIVE_LIMIT = 1e-3


class PerturbativeRegimeError(ValueError):
    """Internal energies are not small compared with the rest energy."""


@dataclass(frozen=True)
class WepParams:
    """Matrix elements of ``M_g M_i^-1`` (dimensionless)."""

    r1: float = 1.0
    r2: float = 1.0
    r_abs: float = 0.0
    phi_r: float = 0.0

    def __post_init__(self):
        for name in ("r1", "r2", "r_abs", "phi_r"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.r_abs < 0.0:
            raise ValueError(f"|r| must be >= 0, got {self.r_abs!r}")
        phi = math.fmod(self.phi_r, TWO_PI)
        if phi < 0.0:
            phi += TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        object.__setattr__(self, "phi_r", phi)

    @property
    def r(self) -> complex:
        return cmath.rect(self.r_abs, self.phi_r)

    @property
    def half_diff(self) -> float:
        """``(r1 - r2) / 2``."""
        return 0.5 * (self.r1 - self.r2)

    @property
    def half_sum(self) -> float:
        return 0.5 * (self.r1 + self.r2)

    def holds_wep(self) -> bool:
        return self.r1 == 1.0 and self.r2 == 1.0 and self.r_abs == 0.0

    def matrix(self) -> HermitianOp2:
        """``M_g M_i^-1`` itself, i.e. the acceleration operator at ``g = 1``."""
        return HermitianOp2(self.r1, self.r2, self.r)

    def deviation(self) -> HermitianOp2:
        """``M_g M_i^-1 - I``: the per-qubit operator entering torque and angular acceleration."""
        return HermitianOp2(self.r1 - 1.0, self.r2 - 1.0, self.r)


WEP_HOLDS = WepParams()


@dataclass(frozen=True)
class MassHamiltonians:
    """Classical masses and internal Hamiltonians of one test body.

    ``H_i`` must be diagonal: the basis is the eigenbasis of the inertial
    internal Hamiltonian.
    """

    m_i: float
    m_g: float
    H_i: HermitianOp2
    H_g: HermitianOp2
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not (self.m_i > 0 and self.m_g > 0 and self.c > 0):
            raise ValueError("m_i, m_g and c must be positive")
        if self.H_i.a12 != 0:
            raise ValueError("H_i must be diagonal in the working basis (a12 == 0)")

    def check_perturbative(self, limit: float = PERTURBATIVE_LIMIT) -> None:
        c2 = self.c**2
        ratios = [
            abs(x) / (self.m_i * c2) for x in (self.H_i.a11, self.H_i.a22, self.H_i.a12)
        ] + [abs(x) / (self.m_g * c2) for x in (self.H_g.a11, self.H_g.a22, self.H_g.a12)]
        worst = max(ratios)
        if worst >= limit:
            raise PerturbativeRegimeError(
                f"perturbative regime exceeded: |E|/(m c^2) = {worst:.3g} >= {limit:g}"
            )

    def mass_operators(self) -> tuple[np.ndarray, np.ndarray]:
        """Full ``(M_i, M_g)`` matrices, no truncation."""
        c2 = self.c**2
        eye = np.eye(2)
        return self.m_i * eye + self.H_i.to_matrix() / c2, self.m_g * eye + self.H_g.to_matrix() / c2


def params_from_hamiltonians(mh: MassHamiltonians) -> WepParams:
    """Leading-order ``(r1, r2, |r|, phi_r)`` from the mass Hamiltonians."""
    mh.check_perturbative()
    c2 = mh.c**2
    ratio = mh.m_g / mh.m_i
    r1 = ratio * (1.0 + mh.H_g.a11 / (mh.m_g * c2) - mh.H_i.a11 / (mh.m_i * c2))
    r2 = ratio * (1.0 + mh.H_g.a22 / (mh.m_g * c2) - mh.H_i.a22 / (mh.m_i * c2))
    r = ratio * mh.H_g.a12 / (mh.m_g * c2)
    return WepParams(r1, r2, abs(r), cmath.phase(r) if r != 0 else 0.0)


def acceleration_operator(p: WepParams, g: float) -> HermitianOp2:
    if not g > 0:
        raise ValueError(f"g must be positive, got {g!r}")
    return p.matrix().scale(g)


def _bracket(p: WepParams, s: BlochState) -> float:
    # (r1-r2)/2 cos(theta) + |r| cos(phi_r + phi) sin(theta)
    return p.half_diff * math.cos(s.theta) + p.r_abs * math.cos(p.phi_r + s.phi) * math.sin(s.theta)


def form_factor_F(p: WepParams, s: BlochState) -> float:
    """Mean of ``a / g``."""
    return p.half_sum + s.n * _bracket(p, s)


def form_factor_G(p: WepParams, s: BlochState) -> float:
    """Variance of ``a / g``."""
    b = _bracket(p, s)
    return p.half_diff**2 + p.r_abs**2 - s.n**2 * b * b


def form_factor_G_expanded(p: WepParams, s: BlochState) -> float:
    """Same quantity as :func:`form_factor_G`, written with the diagonal,
    off-diagonal and interference contributions separated."""
    d = p.half_diff
    n2 = s.n**2
    ct, st = math.cos(s.theta), math.sin(s.theta)
    cphi = math.cos(p.phi_r + s.phi)
    return (
        d * d * (1.0 - n2 * ct * ct)
        + p.r_abs**2 * (1.0 - n2 * cphi * cphi * st * st)
        - 2.0 * n2 * p.r_abs * d * cphi * st * ct
    )


def phase_averaged_F(p: WepParams, n: float, theta: float) -> float:
    """Mean of F over a uniformly distributed Bloch phase ``phi``."""
    BlochState(n, theta)
    return p.half_sum + p.half_diff * n * math.cos(theta)


def phase_averaged_G(p: WepParams, n: float, theta: float) -> float:
    """Mean of G over a uniformly distributed Bloch phase ``phi``.

    This is the normalized average ``(1/2pi) int dphi``; the integrand is
    quadratic in ``cos(phi_r + phi)`` so the closed form is exact.
    """
    BlochState(n, theta)
    d = p.half_diff
    return d * d * (1.0 - n * n * math.cos(theta) ** 2) + p.r_abs**2 * (
        1.0 - 0.5 * n * n * math.sin(theta) ** 2
    )


def eotvos_ratio(p_A: WepParams, s_A: BlochState, p_B: WepParams, s_B: BlochState, g: float = 1.0) -> float:
    """``2 |<a>_A - <a>_B| / |<a>_A + <a>_B|`` for two preparations."""
    a_A = g * form_factor_F(p_A, s_A)
    a_B = g * form_factor_F(p_B, s_B)
    denom = abs(a_A + a_B)
    if denom == 0.0:
        raise ZeroDivisionError("Eotvos ratio undefined: mean accelerations sum to zero")
    return 2.0 * abs(a_A - a_B) / denom


# Preparation-error analysis. The random relative phase is called gamma here;
# it plays the role of the Bloch phase phi.

ROBUSTNESS_EPS_MAX = 0.3


def _check_eps(epsilon: float) -> None:
    if not abs(epsilon) < ROBUSTNESS_EPS_MAX:
        raise ValueError(f"|epsilon| must be < {ROBUSTNESS_EPS_MAX} (small-angle regime)")


def robustness_mean(p: WepParams, epsilon: float, gamma: float) -> float:
    """Mean of ``a / g`` for the pure state with polar angle ``pi/2 - epsilon``
    and relative phase ``gamma``."""
    _check_eps(epsilon)
    return (
        p.half_sum
        - 0.5 * (p.r2 - p.r1) * math.sin(epsilon)
        + p.r_abs * math.cos(p.phi_r + gamma) * math.cos(epsilon)
    )


def robustness_variance(p: WepParams, epsilon: float, gamma: float) -> float:
    """Variance of ``a / g`` for the pure state at polar angle ``pi/2 - epsilon``."""
    _check_eps(epsilon)
    theta = 0.5 * math.pi - epsilon
    return form_factor_G(p, BlochState(1.0, theta, gamma))


def robustness_variance_phase_avg(p: WepParams, epsilon: float) -> float:
    """Variance of ``a / g`` averaged over ``gamma`` for a pure state whose
    polar angle misses ``pi/2`` by ``epsilon`` (either sign; the result is even)."""
    _check_eps(epsilon)
    c2 = math.cos(epsilon) ** 2
    return p.half_diff**2 * c2 + p.r_abs**2 * (1.0 - 0.5 * c2)


def robustness_variance_expansion(p: WepParams, epsilon: float, factor: float = 1.0) -> float:
    """Quadratic small-``epsilon`` expansion of :func:`robustness_variance_phase_avg`.

    ``factor`` scales the ``epsilon**2`` coefficient; 1.0 is the exact Taylor
    coefficient ``-[((r1-r2)/2)^2 - |r|^2/2]``.
    """
    return p.half_diff**2 + 0.5 * p.r_abs**2 - factor * (p.half_diff**2 - 0.5 * p.r_abs**2) * epsilon**2
