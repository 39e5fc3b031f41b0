"""Torsion balance driven by two rotating source masses.

Geometry (plane of the balance): test masses at ``+R_t`` (arm A) and ``-R_t``
(arm B) with ``R_t = R_t (cos Theta, sin Theta, 0)``; sources at ``+R_s`` and
``-R_s`` with ``R_s = R_s (cos Omega t, sin Omega t, 0)``.

Normalization follows the two-level-subsystem convention: every one of the
``N`` subsystems per arm carries mass ``m``, so the classical angular
acceleration is ``N`` times the single-pair value and the quantum variance is
``N`` times the single-pair variance.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geo_frames import G_NEWTON
from .quantum_state import BlochState
from .wep_core import WepParams, form_factor_F, form_factor_G

QSNR_CAP = 1e9
QSNR_FLOOR = 1e-300
FAR_FIELD_MAX_RATIO = 0.2


class SingularGeometryError(ArithmeticError):
    pass


@dataclass(frozen=True)
class CavendishConfig:
    m_s: float = 1.0
    R_s: float = 0.2
    R_t: float = 7.5e-3
    Omega_rot: float = 2.0 * math.pi * 50.0
    Theta: float = 0.0
    m: float = 5e-6
    N: int = 1
    G_N: float = G_NEWTON

    def __post_init__(self):
        for name in ("m_s", "R_s", "R_t", "m", "G_N"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.R_t == self.R_s:
            raise ValueError("R_t == R_s: test masses collide with the sources")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be an integer >= 1, got {self.N!r}")

    def test_position(self) -> np.ndarray:
        return self.R_t * np.array([math.cos(self.Theta), math.sin(self.Theta), 0.0])

    def source_position(self, t: float) -> np.ndarray:
        w = self.Omega_rot * t
        return self.R_s * np.array([math.cos(w), math.sin(w), 0.0])


def _relative_angle(cfg: CavendishConfig, t: float) -> float:
    return cfg.Omega_rot * t - cfg.Theta


def r_plus_minus(cfg: CavendishConfig, t: float) -> tuple[float, float]:
    """``R_pm = |R_t +- R_s|`` by the law of cosines."""
    c = math.cos(_relative_angle(cfg, t))
    base = cfg.R_t**2 + cfg.R_s**2
    cross = 2.0 * cfg.R_t * cfg.R_s * c
    r_plus = math.sqrt(max(base + cross, 0.0))
    r_minus = math.sqrt(max(base - cross, 0.0))
    if r_plus == 0.0 or r_minus == 0.0:
        raise SingularGeometryError(f"test mass coincides with a source at t={t!r}")
    return r_plus, r_minus


def g_fields(cfg: CavendishConfig, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Fields at arms A and B, each the sum over both sources of
    ``G m_s (x - x_src) / |x - x_src|^3``.

    The sign (pointing from source to test mass) is the one that makes the
    cross-product chain reproduce the ``sin(Omega t - Theta)`` angular
    acceleration; see :func:`alpha_classical`.
    """
    rt = cfg.test_position()
    rs = cfg.source_position(t)
    k = cfg.G_N * cfg.m_s

    def field_at(x: np.ndarray) -> np.ndarray:
        total = np.zeros(3)
        for src in (rs, -rs):
            sep = x - src
            dist = float(np.linalg.norm(sep))
            if dist == 0.0:
                raise SingularGeometryError(f"test mass coincides with a source at t={t!r}")
            total += sep / dist**3
        return k * total

    return field_at(rt), field_at(-rt)


def _radial_factor(cfg: CavendishConfig, t: float) -> float:
    """``G m_s (R_s / R_t) (1/R_+^3 - 1/R_-^3) sin(Omega t - Theta)``: single-pair acceleration."""
    r_plus, r_minus = r_plus_minus(cfg, t)
    return (
        cfg.G_N
        * cfg.m_s
        * (cfg.R_s / cfg.R_t)
        * (1.0 / r_plus**3 - 1.0 / r_minus**3)
        * math.sin(_relative_angle(cfg, t))
    )


def alpha_classical(cfg: CavendishConfig, t: float) -> float:
    """Classical angular acceleration (rad/s^2) when the WEP holds."""
    return cfg.N * _radial_factor(cfg, t)


def alpha_from_fields(cfg: CavendishConfig, t: float) -> float:
    """Classical angular acceleration from the torque ``m R_t x (g_A - g_B)`` and
    the moment of inertia ``2 m R_t^2``, scaled to ``N`` subsystems per arm."""
    g_A, g_B = g_fields(cfg, t)
    rt = cfg.test_position()
    torque_z = cfg.m * (np.cross(rt, g_A)[2] - np.cross(rt, g_B)[2])
    return cfg.N * torque_z / (2.0 * cfg.m * cfg.R_t**2)


def alpha_operator_single(cfg: CavendishConfig, p: WepParams, t: float) -> np.ndarray:
    """4x4 angular-acceleration operator for one subsystem per arm,
    ``(k/2) (A (x) I + I (x) A)`` with ``A = M_g M_i^-1``."""
    a = p.matrix().to_matrix()
    eye = np.eye(2)
    return 0.5 * _radial_factor(cfg, t) * (np.kron(a, eye) + np.kron(eye, a))


def alpha_mean(cfg: CavendishConfig, p: WepParams, s: BlochState, t: float) -> float:
    """Mean angular acceleration, both arms prepared in ``s``."""
    return alpha_classical(cfg, t) * form_factor_F(p, s)


def alpha_variance(cfg: CavendishConfig, p: WepParams, s: BlochState, t: float) -> float:
    """Quantum variance of the angular acceleration, both arms prepared in ``s``."""
    k = _radial_factor(cfg, t)
    return cfg.N * k * k * form_factor_G(p, s)


def alpha_far_field(cfg: CavendishConfig, p: WepParams, s: BlochState, t: float) -> tuple[float, float]:
    """Leading-order ``(mean, variance)`` for ``R_t << R_s``; the signal sits at ``2 Omega``."""
    ratio = cfg.R_t / cfg.R_s
    if ratio >= FAR_FIELD_MAX_RATIO:
        warnings.warn(
            f"far-field approximation used at R_t/R_s = {ratio:.3g} (>= {FAR_FIELD_MAX_RATIO})",
            stacklevel=2,
        )
    amp = 3.0 * cfg.G_N * cfg.m_s / cfg.R_s**3
    s2 = math.sin(2.0 * _relative_angle(cfg, t))
    mean = -cfg.N * amp * s2 * form_factor_F(p, s)
    var = cfg.N * amp * amp * s2 * s2 * form_factor_G(p, s)
    return mean, var


def qsnr_relative(p: WepParams, s: BlochState, N: int, rel_classical_noise: float) -> float:
    """Quantum signal-to-noise ratio with the classical noise given relative to ``alpha_cl``.

    Requires ``r1 == r2 == 1``. Returns ``QSNR_CAP`` when both the quantum and the
    classical variance vanish but the signal does not.
    """
    _require_off_diagonal_regime(p)
    c = math.cos(p.phi_r + s.phi) * math.sin(s.theta)
    signal = s.n * p.r_abs * abs(c)
    quantum = p.r_abs**2 / N * (1.0 - s.n**2 * c * c)
    total = max(quantum, 0.0) + rel_classical_noise**2
    if total < QSNR_FLOOR:
        return QSNR_CAP if signal > 0.0 else 0.0
    return min(signal / math.sqrt(total), QSNR_CAP)


def _require_off_diagonal_regime(p: WepParams) -> None:
    if p.r1 != 1.0 or p.r2 != 1.0:
        raise ValueError(
            f"qSNR closed form needs r1 == r2 == 1 (got r1={p.r1!r}, r2={p.r2!r})"
        )


def qsnr(cfg: CavendishConfig, p: WepParams, s: BlochState, t: float, delta_alpha_cl: float) -> float:
    """``|<alpha> - alpha_cl| / sqrt(var + delta_alpha_cl^2)``; cross-checked against
    the closed form in relative noise whenever ``alpha_cl(t) != 0``."""
    _require_off_diagonal_regime(p)
    if delta_alpha_cl < 0:
        raise ValueError("delta_alpha_cl must be >= 0")
    a_cl = alpha_classical(cfg, t)
    signal = abs(alpha_mean(cfg, p, s, t) - a_cl)
    total = alpha_variance(cfg, p, s, t) + delta_alpha_cl**2
    if total < QSNR_FLOOR:
        if signal == 0.0:
            return 0.0
        return QSNR_CAP
    direct = min(signal / math.sqrt(total), QSNR_CAP)
    if a_cl != 0.0:
        closed = qsnr_relative(p, s, cfg.N, delta_alpha_cl / abs(a_cl))
        if not math.isclose(direct, closed, rel_tol=1e-10, abs_tol=1e-12):
            raise ArithmeticError(f"qSNR forms disagree: {direct!r} vs {closed!r}")
    return direct


QSNR_COLUMNS = ("n", "theta", "phi", "r_abs", "phi_r", "qsnr")


def _qsnr_rows(points: np.ndarray, N: int, rel_noise: float) -> np.ndarray:
    out = np.empty((points.shape[0], 6))
    out[:, :5] = points
    for i, (n, theta, phi, r_abs, phi_r) in enumerate(points):
        out[i, 5] = qsnr_relative(WepParams(1.0, 1.0, r_abs, phi_r), BlochState(n, theta, phi), N, rel_noise)
    return out


def qsnr_sweep(
    n_values,
    theta_values,
    phi_values,
    r_abs_values,
    phi_r_values,
    N: int,
    rel_classical_noise: float,
    threads: int = 1,
) -> np.ndarray:
    """qSNR over the Cartesian grid of the five inputs (``r1 = r2 = 1``).

    Rows are ordered with the last argument varying fastest; columns are
    ``QSNR_COLUMNS``. The row order and values do not depend on ``threads``.
    """
    grids = np.meshgrid(
        np.asarray(n_values, float),
        np.asarray(theta_values, float),
        np.asarray(phi_values, float),
        np.asarray(r_abs_values, float),
        np.asarray(phi_r_values, float),
        indexing="ij",
    )
    points = np.column_stack([g.ravel() for g in grids])
    if threads <= 1 or len(points) < 2:
        return _qsnr_rows(points, N, rel_classical_noise)
    chunks = np.array_split(points, min(threads * 4, len(points)))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda c: _qsnr_rows(c, N, rel_classical_noise), chunks))
    return np.vstack(parts)
