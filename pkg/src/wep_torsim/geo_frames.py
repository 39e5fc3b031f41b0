"""Earth-Sun geometry for a torsion balance on the rotating Earth.

Frames
------
Co-orbiting frame: Earth-centred, x toward the Sun, z normal to the ecliptic.
Lab frame: centred on the balance, x due south, y due east, z up (local vertical).

Vectors are plain ``numpy`` arrays of shape (3,). Functions returning
"lab components" give the projections onto the lab unit vectors at time ``t``.
Daily phase is ``Omega * t``; ``orbital_phase`` rotates the Sun direction
about the ecliptic normal (0 places the Sun on +x with the northern winter
solstice geometry).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Vec3 = np.ndarray

EARTH_SPIN = 7.2921159e-5  # rad/s, sidereal
EARTH_ORBIT = 1.99102e-7  # rad/s
EARTH_RADIUS = 6.371e6  # m
ASTRONOMICAL_UNIT = 1.495978707e11  # m
EARTH_G = 9.81  # m/s^2
G_NEWTON = 6.67430e-11  # m^3 kg^-1 s^-2
SUN_MASS = 1.98847e30  # kg
AXIAL_TILT = math.radians(23.4)


def vec3(x: float, y: float, z: float) -> Vec3:
    v = np.array([x, y, z], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite vector components {v}")
    return v


@dataclass(frozen=True)
class EotvosGeometry:
    lambda_lat: float = math.radians(45.0)
    eps_tilt: float = AXIAL_TILT
    Omega: float = EARTH_SPIN
    Omega_bar: float = EARTH_ORBIT
    R_earth: float = EARTH_RADIUS
    R_sun_dist: float = ASTRONOMICAL_UNIT
    g_earth: float = EARTH_G
    G_N: float = G_NEWTON
    M_sun: float = SUN_MASS
    orbital_phase: float = 0.0

    def __post_init__(self):
        if abs(self.lambda_lat) > math.pi / 2:
            raise ValueError(f"latitude {self.lambda_lat!r} rad outside [-pi/2, pi/2]")
        # Omega, Omega_bar and M_sun may be zero to switch a contribution off
        for name in ("R_earth", "R_sun_dist", "g_earth", "G_N"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("Omega", "Omega_bar", "M_sun"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class BalanceGeometry:
    """Beam vector ``r_AB = ell (cos pt cos tt, cos pt sin tt, sin pt)`` in lab components,
    with ``tt = theta_tilde`` (azimuth from south) and ``pt = phi_tilde`` (fiber tilt)."""

    ell: float
    theta_tilde: float = 0.0
    phi_tilde: float = 0.0

    def __post_init__(self):
        if not self.ell > 0:
            raise ValueError(f"balance length must be > 0, got {self.ell!r}")


def _tilt_matrix(eps: float) -> np.ndarray:
    c, s = math.cos(eps), math.sin(eps)
    return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def _orbit_matrix(psi: float) -> np.ndarray:
    # inertial-ecliptic -> co-orbiting: rotate by -psi about the ecliptic normal
    c, s = math.cos(psi), math.sin(psi)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def lab_unit_vectors(geo: EotvosGeometry, t: float) -> tuple[Vec3, Vec3, Vec3]:
    """Lab (south, east, up) unit vectors in co-orbiting components."""
    lam = geo.lambda_lat
    w = geo.Omega * t
    sl, cl = math.sin(lam), math.cos(lam)
    sw, cw = math.sin(w), math.cos(w)
    rot = _orbit_matrix(geo.orbital_phase) @ _tilt_matrix(geo.eps_tilt)
    south = rot @ np.array([sl * cw, sl * sw, -cl])
    east = rot @ np.array([-sw, cw, 0.0])
    up = rot @ np.array([cl * cw, cl * sw, sl])
    return south, east, up


def lab_basis(geo: EotvosGeometry, t: float) -> np.ndarray:
    """Rows are the lab unit vectors; ``lab_basis @ v`` gives lab components."""
    return np.vstack(lab_unit_vectors(geo, t))


def sun_pointing_vectors(geo: EotvosGeometry, t: float) -> tuple[Vec3, Vec3]:
    """Balance-to-Sun vector ``d`` and Earth-to-Sun unit vector, both in lab components.

    At zero orbital phase these reduce to
    ``d_x = R [sin(lam) cos(eps) cos(wt) + cos(lam) sin(eps)]``,
    ``d_y = -R cos(eps) sin(wt)``,
    ``d_z = R [cos(lam) cos(eps) cos(wt) - sin(lam) sin(eps)] - R_earth``.
    """
    lam, eps = geo.lambda_lat, geo.eps_tilt
    w = geo.Omega * t
    sl, cl = math.sin(lam), math.cos(lam)
    se, ce = math.sin(eps), math.cos(eps)
    sw, cw = math.sin(w), math.cos(w)
    psi = geo.orbital_phase
    if psi == 0.0:
        sun_hat = np.array([ce * sl * cw + se * cl, -ce * sw, ce * cl * cw - se * sl])
    else:
        sun_hat = lab_basis(geo, t) @ np.array([1.0, 0.0, 0.0])
    d = geo.R_sun_dist * sun_hat - np.array([0.0, 0.0, geo.R_earth])
    return d, sun_hat


def beta_vector(geo: EotvosGeometry, t: float, include_orbital: bool = True) -> Vec3:
    """Inertial (centrifugal) acceleration per unit inertial mass, lab components.

    Spin part ``Omega^2 R cos(lam) (sin(lam) x + cos(lam) z)``; the orbital part
    points away from the Sun, ``-Omega_bar^2 R_sun sun_hat``.
    """
    lam = geo.lambda_lat
    a = geo.Omega**2 * geo.R_earth * math.cos(lam)
    beta = np.array([a * math.sin(lam), 0.0, a * math.cos(lam)])
    if include_orbital:
        _, sun_hat = sun_pointing_vectors(geo, t)
        beta = beta - geo.Omega_bar**2 * geo.R_sun_dist * sun_hat
    return beta


def gamma_vector(geo: EotvosGeometry, t: float) -> Vec3:
    """Gravitational acceleration per unit gravitational mass (Sun plus Earth), lab components."""
    d, _ = sun_pointing_vectors(geo, t)
    dist = float(np.linalg.norm(d))
    if dist == 0.0:
        raise ArithmeticError("balance coincides with the Sun")
    return geo.G_N * geo.M_sun / dist**3 * d - np.array([0.0, 0.0, geo.g_earth])


def r_AB_vector(bg: BalanceGeometry) -> Vec3:
    cp = math.cos(bg.phi_tilde)
    return bg.ell * np.array(
        [cp * math.cos(bg.theta_tilde), cp * math.sin(bg.theta_tilde), math.sin(bg.phi_tilde)]
    )


def fiber_tilt(F_A: Vec3, F_B: Vec3) -> float:
    """Angle between the fiber tension ``-(F_A + F_B)`` and the local vertical."""
    T = -(np.asarray(F_A) + np.asarray(F_B))
    norm = float(np.linalg.norm(T))
    if norm == 0.0:
        raise ArithmeticError("zero net force: fiber direction undefined")
    return math.acos(max(-1.0, min(1.0, T[2] / norm)))


def equilibrium_fiber_tilt(geo: EotvosGeometry, t: float, include_orbital: bool = True) -> float:
    """Fiber tilt for equal classical masses obeying the WEP (net force ~ beta + gamma)."""
    s = beta_vector(geo, t, include_orbital) + gamma_vector(geo, t)
    return fiber_tilt(0.5 * s, 0.5 * s)
