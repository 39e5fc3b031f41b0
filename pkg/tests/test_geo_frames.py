import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from wep_torsim.geo_frames import (
    AXIAL_TILT,
    BalanceGeometry,
    EotvosGeometry,
    beta_vector,
    equilibrium_fiber_tilt,
    fiber_tilt,
    gamma_vector,
    lab_basis,
    lab_unit_vectors,
    r_AB_vector,
    sun_pointing_vectors,
)

latitudes = st.floats(-math.pi / 2, math.pi / 2)
tilts = st.floats(-0.5, 0.5)
times = st.floats(0, 3 * 86400)
orbit_phases = st.floats(-math.pi, math.pi)


def oracle_frame(lam, eps, w, psi):
    """Lab (south, east, up) built in the equatorial frame and rotated with scipy."""
    up = np.array([math.cos(lam) * math.cos(w), math.cos(lam) * math.sin(w), math.sin(lam)])
    east = np.array([-math.sin(w), math.cos(w), 0.0])
    south = np.cross(east, up)
    rot = Rotation.from_euler("z", -psi) * Rotation.from_euler("y", -eps)
    return tuple(rot.apply(v) for v in (south, east, up))


def test_default_tilt():
    assert EotvosGeometry().eps_tilt == pytest.approx(math.radians(23.4))
    assert AXIAL_TILT == pytest.approx(0.4084070449666731)


def test_geometry_validation():
    with pytest.raises(ValueError):
        EotvosGeometry(lambda_lat=2.0)
    with pytest.raises(ValueError):
        EotvosGeometry(R_earth=0.0)
    with pytest.raises(ValueError):
        BalanceGeometry(0.0)


def test_equator_at_noon_frame():
    south, east, up = lab_unit_vectors(EotvosGeometry(lambda_lat=0.0, eps_tilt=0.0), 0.0)
    np.testing.assert_allclose(south, [0, 0, -1], atol=1e-15)
    # right-handed: east along +y of the co-orbiting frame
    np.testing.assert_allclose(east, [0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(up, [1, 0, 0], atol=1e-15)


@given(latitudes, tilts, times, orbit_phases)
def test_frame_orthonormal_and_right_handed(lam, eps, t, psi):
    x, y, z = lab_unit_vectors(EotvosGeometry(lambda_lat=lam, eps_tilt=eps, orbital_phase=psi), t)
    basis = np.vstack([x, y, z])
    np.testing.assert_allclose(basis @ basis.T, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(np.cross(x, y), z, atol=1e-12)


@given(latitudes, tilts, times, orbit_phases)
def test_frame_matches_rotation_oracle(lam, eps, t, psi):
    geo = EotvosGeometry(lambda_lat=lam, eps_tilt=eps, orbital_phase=psi)
    for got, want in zip(lab_unit_vectors(geo, t), oracle_frame(lam, eps, geo.Omega * t, psi)):
        np.testing.assert_allclose(got, want, atol=1e-12)


@given(latitudes, tilts, times)
def test_sun_components_match_rotation(lam, eps, t):
    geo = EotvosGeometry(lambda_lat=lam, eps_tilt=eps)
    d, sun_hat = sun_pointing_vectors(geo, t)
    np.testing.assert_allclose(sun_hat, lab_basis(geo, t) @ [1.0, 0.0, 0.0], atol=1e-12)
    # balance position relative to Earth's centre is R_earth * up
    up = lab_unit_vectors(geo, t)[2]
    d_direct = geo.R_sun_dist * np.array([1.0, 0.0, 0.0]) - geo.R_earth * up
    assert np.linalg.norm(d) == pytest.approx(np.linalg.norm(d_direct), rel=1e-9)
    np.testing.assert_allclose(d, lab_basis(geo, t) @ d_direct, rtol=0, atol=1e-9 * geo.R_sun_dist)


def test_sun_overhead_on_equator():
    geo = EotvosGeometry(lambda_lat=0.0, eps_tilt=0.0)
    d, _ = sun_pointing_vectors(geo, 0.0)
    np.testing.assert_allclose(d, [0, 0, geo.R_sun_dist - geo.R_earth], atol=1e-3)


def test_sun_east_west_component_crossings():
    geo = EotvosGeometry()
    day = 2 * math.pi / geo.Omega
    for t in (0.0, day / 2, day):
        assert abs(sun_pointing_vectors(geo, t)[0][1]) <= 1e-9 * geo.R_sun_dist
    assert sun_pointing_vectors(geo, day / 4)[0][1] < 0 < sun_pointing_vectors(geo, 3 * day / 4)[0][1]


def test_beta_vanishes_at_pole_without_orbit():
    np.testing.assert_allclose(
        beta_vector(EotvosGeometry(lambda_lat=math.pi / 2, Omega_bar=0.0), 1234.0), 0.0, atol=1e-16
    )


def test_beta_on_equator_is_spin_centrifugal():
    geo = EotvosGeometry(lambda_lat=0.0, Omega_bar=0.0)
    beta = beta_vector(geo, 500.0)
    np.testing.assert_allclose(beta, [0, 0, geo.Omega**2 * geo.R_earth], atol=1e-18)
    assert np.linalg.norm(beta) == pytest.approx(3.39e-2, rel=2e-3)


def test_orbital_and_solar_magnitudes():
    geo = EotvosGeometry()
    assert geo.Omega_bar**2 * geo.R_sun_dist == pytest.approx(5.93e-3, rel=2e-3)
    assert geo.G_N * geo.M_sun / geo.R_sun_dist**2 == pytest.approx(5.93e-3, rel=2e-3)


def test_earth_only_gravity():
    np.testing.assert_allclose(gamma_vector(EotvosGeometry(M_sun=0.0), 100.0), [0, 0, -9.81])


@given(latitudes, times)
def test_solar_pull_cancels_orbital_centrifugal(lam, t):
    geo = EotvosGeometry(lambda_lat=lam, Omega=0.0)
    beta = beta_vector(geo, t)
    residual = gamma_vector(geo, t) + beta + np.array([0, 0, geo.g_earth])
    assert np.linalg.norm(residual) < 1e-3 * np.linalg.norm(beta)


def test_orbital_term_switch():
    geo = EotvosGeometry(lambda_lat=0.3)
    _, sun_hat = sun_pointing_vectors(geo, 100.0)
    diff = beta_vector(geo, 100.0, True) - beta_vector(geo, 100.0, False)
    np.testing.assert_allclose(diff, -geo.Omega_bar**2 * geo.R_sun_dist * sun_hat)


@given(latitudes, times)
def test_daily_periodicity(lam, t):
    geo = EotvosGeometry(lambda_lat=lam)
    day = 2 * math.pi / geo.Omega
    np.testing.assert_allclose(beta_vector(geo, t + day), beta_vector(geo, t), atol=1e-12)
    np.testing.assert_allclose(gamma_vector(geo, t + day), gamma_vector(geo, t), atol=1e-12)


@pytest.mark.parametrize(
    "bg,expected",
    [(BalanceGeometry(1.0), [1, 0, 0]), (BalanceGeometry(2.0, math.pi / 2), [0, 2, 0])],
)
def test_beam_vector_examples(bg, expected):
    np.testing.assert_allclose(r_AB_vector(bg), expected, atol=1e-15)


@given(st.floats(1e-3, 10), st.floats(-4, 4), st.floats(-1.5, 1.5))
def test_beam_vector_length(ell, tt, pt):
    assert np.linalg.norm(r_AB_vector(BalanceGeometry(ell, tt, pt))) == pytest.approx(ell, rel=1e-14)


def test_fiber_tilt():
    down = np.array([0, 0, -1.0])
    assert fiber_tilt(down, down) == 0.0
    assert fiber_tilt(np.array([-1.0, 0, -1.0]), np.array([-1.0, 0, -1.0])) == pytest.approx(math.pi / 4)
    with pytest.raises(ArithmeticError):
        fiber_tilt(down, -down)
    # mid-latitude plumb line deviates by about 0.1 degree from the geocentric vertical
    assert 1e-3 < equilibrium_fiber_tilt(EotvosGeometry(), 0.0) < 3e-3
