"""Thermal torque noise and the chain from torque sensitivity to a bound on |r|."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cavendish import CavendishConfig

K_BOLTZMANN = 1.380649e-23  # J/K


@dataclass(frozen=True)
class OscillatorNoise:
    omega_m: float
    Q: float
    I_moment: float
    T_temp: float = 300.0
    k_B: float = K_BOLTZMANN

    def __post_init__(self):
        for name in ("omega_m", "Q", "I_moment", "T_temp", "k_B"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    def damping_rate(self, omega: float) -> float:
        """Damping rate below the mode, ``omega_m^2 / (omega Q)``."""
        return self.omega_m**2 / (omega * self.Q)


@dataclass(frozen=True)
class SensitivityBudget:
    torque_asd: float  # N m / sqrt(Hz)
    integration_time: float  # s
    signal_freq: float  # rad/s

    def __post_init__(self):
        for name in ("torque_asd", "integration_time", "signal_freq"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


def thermal_torque_asd(noise: OscillatorNoise, omega: float) -> float:
    """Amplitude spectral density of thermal torque noise, N m / sqrt(Hz).

    Valid for ``omega << omega_m``.
    """
    if not omega > 0:
        raise ValueError("omega must be > 0")
    return math.sqrt(4.0 * noise.damping_rate(omega) * noise.I_moment * noise.k_B * noise.T_temp)


def quality_factor_for_asd(target_asd: float, omega: float, omega_m: float, I_moment: float, T_temp: float,
                           k_B: float = K_BOLTZMANN) -> float:
    """Invert :func:`thermal_torque_asd` for ``Q``."""
    return 4.0 * omega_m**2 * I_moment * k_B * T_temp / (omega * target_asd**2)


def acceleration_resolution(budget: SensitivityBudget, I_moment: float) -> float:
    """Angular-acceleration noise after averaging, ``ASD / (I sqrt(T_int))`` in rad/s^2."""
    return budget.torque_asd / (I_moment * math.sqrt(budget.integration_time))


def variance_prefactor_period_average(cfg: CavendishConfig, samples: int = 4096) -> float:
    """Period average of the single-pair ``[G m_s (R_s/R_t)(1/R_+^3 - 1/R_-^3) sin(Omega t - Theta)]^2``.

    Far from the sources this tends to ``(3 G_N m_s / R_s^3)^2 / 2``.
    """
    # uniform samples of a smooth periodic function: the rectangle rule is spectrally accurate
    angles = np.arange(samples) * (2.0 * math.pi / samples)
    c = np.cos(angles)
    base = cfg.R_t**2 + cfg.R_s**2
    cross = 2.0 * cfg.R_t * cfg.R_s * c
    k = cfg.G_N * cfg.m_s * (cfg.R_s / cfg.R_t) * ((base + cross) ** -1.5 - (base - cross) ** -1.5) * np.sin(angles)
    return float(np.mean(k * k))


def min_detectable_G(budget: SensitivityBudget, cfg: CavendishConfig, I_moment: float | None = None) -> float:
    """Smallest variance form factor ``G`` whose angular-acceleration variance reaches
    the averaged noise power ``ASD^2 / (I^2 T_int)``.

    ``I_moment`` defaults to the point-mass value ``2 N m R_t^2``.
    """
    if I_moment is None:
        I_moment = 2.0 * cfg.N * cfg.m * cfg.R_t**2
    noise_power = acceleration_resolution(budget, I_moment) ** 2
    return noise_power / (cfg.N * variance_prefactor_period_average(cfg))


def r_bound_from_Gmin(G_min: float, n: float, theta: float) -> float:
    """Largest ``|r|`` compatible with ``G_min`` for ``r1 = r2`` after phase averaging."""
    if G_min < 0:
        raise ValueError("G_min must be >= 0")
    if not 0.0 <= n <= 1.0:
        raise ValueError(f"Bloch length n={n!r} violates 0 <= n <= 1")
    denom = 1.0 - 0.5 * n * n * math.sin(theta) ** 2
    return math.sqrt(G_min / denom)


def scale_bound(bound: float, asd_old: float, asd_new: float) -> float:
    """Rescale an ``|r|`` bound for a new torque ASD (``|r|_max`` is linear in the ASD)."""
    return bound * asd_new / asd_old
