"""Static torsion-balance torque with quantized inertial and gravitational masses.

Each arm carries ``N`` uncorrelated two-level systems. Arm operators are never
expanded on the ``2**N`` dimensional space: means and variances of sums over
product states are accumulated per qubit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geo_frames import (
    BalanceGeometry,
    EotvosGeometry,
    Vec3,
    beta_vector,
    gamma_vector,
    r_AB_vector,
)
from .linalg2 import HermitianOp2
from .quantum_state import ArmState
from .wep_core import (
    MassHamiltonians,
    WepParams,
    form_factor_F,
    form_factor_G,
    phase_averaged_F,
)


@dataclass(frozen=True)
class ArmMasses:
    m_A: float
    m_B: float

    def __post_init__(self):
        if not (self.m_A > 0 and self.m_B > 0):
            raise ValueError("arm masses must be > 0")

    @property
    def reduced(self) -> float:
        return self.m_A * self.m_B / (self.m_A + self.m_B)


@dataclass(frozen=True)
class TorqueScenario:
    geo: EotvosGeometry
    bg: BalanceGeometry
    masses: ArmMasses
    params: WepParams
    arm_A: ArmState
    arm_B: ArmState
    include_orbital: bool = True


def classical_torque_parallel(F_A: Vec3, F_B: Vec3, r_AB: Vec3) -> float:
    """Torque about the fiber, ``r_AB . (F_A x F_B) / |F_A + F_B|``."""
    net = np.linalg.norm(np.asarray(F_A) + np.asarray(F_B))
    if net == 0.0:
        raise ArithmeticError("zero net force: fiber tension undefined")
    return float(np.dot(r_AB, np.cross(F_A, F_B)) / net)


def torque_lever(geo: EotvosGeometry, bg: BalanceGeometry, t: float, include_orbital: bool = True) -> float:
    """``r_AB . (gamma x beta) / |beta + gamma|`` in m^2/s^2."""
    beta = beta_vector(geo, t, include_orbital)
    gamma = gamma_vector(geo, t)
    denom = np.linalg.norm(beta + gamma)
    if denom == 0.0:
        raise ArithmeticError(f"|beta + gamma| vanishes at t={t!r}")
    return float(np.dot(r_AB_vector(bg), np.cross(gamma, beta)) / denom)


def tau0(scenario: TorqueScenario, t: float) -> float:
    """Scalar prefactor of the torque operator, N m."""
    return scenario.masses.reduced * torque_lever(scenario.geo, scenario.bg, t, scenario.include_orbital)


def torque_mean(scenario: TorqueScenario, t: float) -> float:
    p = scenario.params
    a, b = scenario.arm_A, scenario.arm_B
    return tau0(scenario, t) * (a.count * form_factor_F(p, a.qubit) - b.count * form_factor_F(p, b.qubit))


def torque_variance(scenario: TorqueScenario, t: float) -> float:
    p = scenario.params
    a, b = scenario.arm_A, scenario.arm_B
    return tau0(scenario, t) ** 2 * (a.count * form_factor_G(p, a.qubit) + b.count * form_factor_G(p, b.qubit))


def phase_averaged_torque_mean(scenario: TorqueScenario, t: float) -> float:
    p = scenario.params
    a, b = scenario.arm_A.qubit, scenario.arm_B.qubit
    return tau0(scenario, t) * (
        scenario.arm_A.count * phase_averaged_F(p, a.n, a.theta)
        - scenario.arm_B.count * phase_averaged_F(p, b.n, b.theta)
    )


def torque_operator_single(scenario: TorqueScenario, t: float) -> np.ndarray:
    """4x4 torque operator on one qubit per arm, ``tau0 (D (x) I - I (x) D)`` with
    ``D = M_g M_i^-1 - I``. Used as a brute-force reference."""
    d = scenario.params.deviation().to_matrix()
    eye = np.eye(2)
    return tau0(scenario, t) * (np.kron(d, eye) - np.kron(eye, d))


@dataclass(frozen=True)
class TwoArmOp:
    """Operator ``a (x) I + I (x) b`` on one qubit per arm."""

    a: HermitianOp2 = field(default_factory=HermitianOp2.zero)
    b: HermitianOp2 = field(default_factory=HermitianOp2.zero)

    def to_matrix(self) -> np.ndarray:
        eye = np.eye(2)
        return np.kron(self.a.to_matrix(), eye) + np.kron(eye, self.b.to_matrix())

    def scale(self, alpha: float) -> "TwoArmOp":
        return TwoArmOp(self.a.scale(alpha), self.b.scale(alpha))

    def __add__(self, other: "TwoArmOp") -> "TwoArmOp":
        return TwoArmOp(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "TwoArmOp") -> "TwoArmOp":
        return TwoArmOp(self.a - other.a, self.b - other.b)


@dataclass(frozen=True)
class GeneralTorque:
    """``tau = N_tilde [ratio_diff (I + T1 - T2) + Delta]`` to first order in 1/c^2."""

    N_tilde: float
    ratio_diff: float
    T1: TwoArmOp
    T2: TwoArmOp
    Delta: TwoArmOp

    def operator(self) -> TwoArmOp:
        """The bracket times ``N_tilde``, as a two-arm operator (identity folded into arm A)."""
        ident = TwoArmOp(HermitianOp2.identity(), HermitianOp2.zero())
        inner = (ident + self.T1 - self.T2).scale(self.ratio_diff) + self.Delta
        return inner.scale(self.N_tilde)

    def to_matrix(self) -> np.ndarray:
        return self.operator().to_matrix()


def general_torque_operator(
    geo: EotvosGeometry,
    bg: BalanceGeometry,
    arm_A: MassHamiltonians,
    arm_B: MassHamiltonians,
    t: float,
    include_orbital: bool = True,
) -> GeneralTorque:
    """Torque operator with independent inertial/gravitational masses per arm.

    ``T2`` comes from expanding ``1 / |beta M_i,tot + gamma M_g,tot|`` to first
    order; ``N_tilde`` uses the classical masses only.
    """
    arm_A.check_perturbative()
    arm_B.check_perturbative()
    if arm_A.c != arm_B.c:
        raise ValueError("both arms must use the same speed of light")
    c2 = arm_A.c**2
    beta = beta_vector(geo, t, include_orbital)
    gamma = gamma_vector(geo, t)
    s_i = arm_A.m_i + arm_B.m_i
    s_g = arm_A.m_g + arm_B.m_g
    v0 = s_i * beta + s_g * gamma
    v0_sq = float(np.dot(v0, v0))
    if v0_sq == 0.0:
        raise ArithmeticError(f"net force vanishes at t={t!r}")
    n_tilde = arm_A.m_i * arm_B.m_i * float(np.dot(r_AB_vector(bg), np.cross(gamma, beta))) / math.sqrt(v0_sq)
    ratio_diff = arm_A.m_g / arm_A.m_i - arm_B.m_g / arm_B.m_i

    T1 = TwoArmOp(arm_A.H_i.scale(1.0 / (arm_A.m_i * c2)), arm_B.H_i.scale(1.0 / (arm_B.m_i * c2)))

    bb = float(np.dot(beta, beta))
    gg = float(np.dot(gamma, gamma))
    bgd = float(np.dot(beta, gamma))
    # v0 . (beta h_i + gamma h_g) split into the coefficients of h_i and h_g
    k_i = (bb * s_i + bgd * s_g) / (v0_sq * c2)
    k_g = (gg * s_g + bgd * s_i) / (v0_sq * c2)
    T2 = TwoArmOp(
        arm_A.H_i.scale(k_i) + arm_A.H_g.scale(k_g),
        arm_B.H_i.scale(k_i) + arm_B.H_g.scale(k_g),
    )

    def delta_arm(mh: MassHamiltonians) -> HermitianOp2:
        return (mh.H_g.scale(mh.m_i) - mh.H_i.scale(mh.m_g)).scale(1.0 / (mh.m_i**2 * c2))

    Delta = TwoArmOp(delta_arm(arm_A), delta_arm(arm_B).scale(-1.0))
    return GeneralTorque(n_tilde, ratio_diff, T1, T2, Delta)
