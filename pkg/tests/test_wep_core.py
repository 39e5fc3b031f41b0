import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import bloch_states, random_params, random_state, wep_params
from wep_torsim.ensemble import ensemble_average
from wep_torsim.linalg2 import HermitianOp2, expectation, variance
from wep_torsim.quantum_state import MAXIMALLY_MIXED, PLUS, BlochState, density_matrix
from wep_torsim.wep_core import (
    WEP_HOLDS,
    MassHamiltonians,
    PerturbativeRegimeError,
    WepParams,
    acceleration_operator,
    eotvos_ratio,
    form_factor_F,
    form_factor_G,
    form_factor_G_expanded,
    params_from_hamiltonians,
    phase_averaged_F,
    phase_averaged_G,
    robustness_mean,
    robustness_variance,
    robustness_variance_expansion,
    robustness_variance_phase_avg,
)

C = 299_792_458.0


# -- parameters from Hamiltonians -------------------------------------------

def test_no_internal_energy_means_exact_wep():
    mh = MassHamiltonians(2.0, 2.0, HermitianOp2.zero(), HermitianOp2.zero())
    assert params_from_hamiltonians(mh) == WepParams(1.0, 1.0, 0.0, 0.0)


def test_diagonal_gravitational_energy():
    m, E = 1e-3, 1e6
    mh = MassHamiltonians(m, m, HermitianOp2.zero(), HermitianOp2(E, -E))
    p = params_from_hamiltonians(mh)
    eps = E / (m * C**2)
    assert p.r1 == pytest.approx(1 + eps, rel=1e-15)
    assert p.r2 == pytest.approx(1 - eps, rel=1e-15)
    assert p.r_abs == 0.0


def test_perturbative_guard():
    mh = MassHamiltonians(1e-20, 1e-20, HermitianOp2.zero(), HermitianOp2(1.0, 0.0))
    with pytest.raises(PerturbativeRegimeError, match="perturbative regime exceeded"):
        params_from_hamiltonians(mh)


def test_inertial_hamiltonian_must_be_diagonal():
    with pytest.raises(ValueError, match="diagonal"):
        MassHamiltonians(1.0, 1.0, HermitianOp2(0, 0, 1.0), HermitianOp2.zero())


def test_against_full_matrix_inverse(rng):
    # symmetrized M_g M_i^-1 keeps the oracle Hermitian beyond leading order
    for _ in range(300):
        m_i = rng.uniform(0.5, 2.0)
        m_g = m_i * (1 + rng.uniform(-1e-6, 1e-6))
        scale = 10.0 ** rng.uniform(-8, -4) * m_i * C**2
        H_i = HermitianOp2(*(scale * rng.uniform(-1, 1, 2)))
        H_g = HermitianOp2(*(scale * rng.uniform(-1, 1, 2)), scale * complex(*rng.uniform(-1, 1, 2)))
        mh = MassHamiltonians(m_i, m_g, H_i, H_g)
        M_i, M_g = mh.mass_operators()
        inv = np.linalg.inv(M_i)
        exact = 0.5 * (M_g @ inv + inv @ M_g)
        approx = params_from_hamiltonians(mh).matrix().to_matrix()
        small = max(abs(x) for x in (H_i.a11, H_i.a22, H_g.a11, H_g.a22, H_g.a12)) / (min(m_i, m_g) * C**2)
        assert np.max(np.abs(approx - exact)) <= 10 * small**2 + 1e-15


# -- acceleration operator --------------------------------------------------

def test_wep_operator_is_scaled_identity():
    assert acceleration_operator(WEP_HOLDS, 9.81) == HermitianOp2.identity(9.81)


def test_off_diagonal_construction():
    np.testing.assert_array_equal(
        acceleration_operator(WepParams(1, 1, 0.5, 0), 1.0).to_matrix(), [[1, 0.5], [0.5, 1]]
    )


def test_g_must_be_positive():
    with pytest.raises(ValueError):
        acceleration_operator(WEP_HOLDS, 0.0)


def test_phi_r_normalized():
    assert WepParams(1, 1, 0.1, -math.pi / 2).phi_r == pytest.approx(1.5 * math.pi)
    assert WepParams(1, 1, 0.1, 4 * math.pi).phi_r == 0.0


def test_negative_r_abs_rejected():
    with pytest.raises(ValueError):
        WepParams(1, 1, -1e-3)


# -- form factors -----------------------------------------------------------

@given(bloch_states)
def test_wep_form_factors(s):
    assert form_factor_F(WEP_HOLDS, s) == 1.0
    assert form_factor_G(WEP_HOLDS, s) == 0.0


def test_eigenstate_selects_r1():
    assert form_factor_F(WepParams(1.1, 0.9), BlochState(1, 0)) == pytest.approx(1.1, abs=1e-15)


@given(wep_params)
def test_incoherent_state_still_sees_off_diagonal(p):
    q = WepParams(1.0, 1.0, p.r_abs, p.phi_r)
    assert form_factor_G(q, MAXIMALLY_MIXED) == pytest.approx(p.r_abs**2, abs=1e-15)


@given(wep_params)
def test_plus_state_variance(p):
    expected = (p.r1 - p.r2) ** 2 / 4 + p.r_abs**2 * math.sin(p.phi_r) ** 2
    assert form_factor_G(p, PLUS) == pytest.approx(expected, abs=1e-12)


def test_form_factors_match_trace_oracle(rng):
    for _ in range(2000):
        p, s, g = random_params(rng, 0.5), random_state(rng), rng.uniform(0.1, 20)
        a, rho = acceleration_operator(p, g), density_matrix(s)
        assert g * form_factor_F(p, s) == pytest.approx(expectation(a, rho), rel=1e-12)
        assert g * g * form_factor_G(p, s) == pytest.approx(variance(a, rho), rel=1e-10, abs=1e-12 * g * g)


@given(wep_params, bloch_states)
def test_rearranged_variance_agrees(p, s):
    assert form_factor_G_expanded(p, s) == pytest.approx(form_factor_G(p, s), abs=1e-12)


@given(wep_params, bloch_states)
def test_variance_non_negative(p, s):
    assert form_factor_G(p, s) >= -1e-15


@given(wep_params, bloch_states)
def test_variance_exactly_quadratic_in_n(p, s):
    g0 = form_factor_G(p, BlochState(0.0, s.theta, s.phi))
    g1 = form_factor_G(p, BlochState(1.0, s.theta, s.phi))
    assert form_factor_G(p, s) == pytest.approx(g0 - s.n**2 * (g0 - g1), abs=1e-12)
    assert g1 <= g0 + 1e-15


@given(wep_params, bloch_states, st.integers(-3, 3))
def test_periodic_in_phases(p, s, k):
    shifted = BlochState(s.n, s.theta, s.phi + 2 * math.pi * k)
    q = WepParams(p.r1, p.r2, p.r_abs, p.phi_r + 2 * math.pi * k)
    assert form_factor_F(p, shifted) == pytest.approx(form_factor_F(p, s), abs=1e-12)
    assert form_factor_G(q, s) == pytest.approx(form_factor_G(p, s), abs=1e-12)


@given(wep_params, bloch_states, st.floats(-3, 3))
def test_depends_only_on_phase_sum(p, s, delta):
    moved_p = WepParams(p.r1, p.r2, p.r_abs, p.phi_r + delta)
    moved_s = BlochState(s.n, s.theta, s.phi - delta)
    assert form_factor_F(moved_p, moved_s) == pytest.approx(form_factor_F(p, s), abs=1e-12)
    assert form_factor_G(moved_p, moved_s) == pytest.approx(form_factor_G(p, s), abs=1e-12)


# -- phase averages ---------------------------------------------------------

@given(st.floats(0, 1), st.floats(0, math.pi))
def test_phase_averages_vanish_under_wep(n, theta):
    assert phase_averaged_F(WEP_HOLDS, n, theta) == 1.0
    assert phase_averaged_G(WEP_HOLDS, n, theta) == 0.0


def test_phase_averaged_F_monte_carlo(rng):
    p = WepParams(1.02, 0.97, 0.05, 0.7)
    n, theta = 0.8, 1.1
    stats = ensemble_average(lambda g: np.array([form_factor_F(p, BlochState(n, theta, x)) for x in g]),
                             rng, 10_000)
    assert abs(stats.mean - phase_averaged_F(p, n, theta)) <= 3 * stats.stderr


@given(wep_params, st.floats(0, 1), st.floats(0, math.pi))
def test_phase_averaged_F_is_dephased_state(p, n, theta):
    # the dephased state has Bloch vector (0, 0, n cos theta)
    nz = n * math.cos(theta)
    dephased = BlochState(abs(nz), 0.0 if nz >= 0 else math.pi)
    assert phase_averaged_F(p, n, theta) == pytest.approx(form_factor_F(p, dephased), abs=1e-12)


def test_phase_averaged_G_coherent_equal_diagonal():
    assert phase_averaged_G(WepParams(1.0, 1.0, 0.3), 1.0, math.pi / 2) == pytest.approx(0.045, abs=1e-15)


def test_phase_averaged_G_quadrature(rng):
    for _ in range(200):
        p, s = random_params(rng, 0.5), random_state(rng)
        avg, _ = quad(lambda x: form_factor_G(p, BlochState(s.n, s.theta, x)), -math.pi, math.pi,
                      epsabs=1e-14, epsrel=1e-13)
        assert avg / (2 * math.pi) == pytest.approx(phase_averaged_G(p, s.n, s.theta), abs=1e-10)


def test_phase_averages_validate_inputs():
    with pytest.raises(ValueError, match="0 <= n <= 1"):
        phase_averaged_G(WEP_HOLDS, 1.2, 0.0)


# -- Eotvos ratio -----------------------------------------------------------

@given(wep_params, bloch_states)
def test_identical_bodies_give_zero_ratio(p, s):
    assert eotvos_ratio(p, s, p, s) == 0.0


def test_eotvos_ratio_hand_value():
    eta = eotvos_ratio(WepParams(1.001, 1.001), MAXIMALLY_MIXED, WEP_HOLDS, MAXIMALLY_MIXED, 9.81)
    assert eta == pytest.approx(2 * 0.001 / 2.001, rel=1e-12)


def test_eotvos_ratio_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        eotvos_ratio(WepParams(1.0, 1.0), MAXIMALLY_MIXED, WepParams(-1.0, -1.0), MAXIMALLY_MIXED)


# -- preparation-error robustness -------------------------------------------

@given(wep_params, st.floats(-math.pi, math.pi))
def test_robustness_mean_at_zero_error(p, gamma):
    assert robustness_mean(p, 0.0, gamma) == pytest.approx(form_factor_F(p, BlochState(1, math.pi / 2, gamma)), abs=1e-12)


@given(st.floats(-0.29, 0.29), st.floats(-math.pi, math.pi))
def test_robustness_mean_under_wep(eps, gamma):
    assert robustness_mean(WEP_HOLDS, eps, gamma) == pytest.approx(1.0, abs=1e-15)


@given(wep_params, st.floats(-0.29, 0.29), st.floats(-math.pi, math.pi))
def test_robustness_mean_is_tilted_pure_state(p, eps, gamma):
    s = BlochState(1.0, math.pi / 2 - eps, gamma)
    assert robustness_mean(p, eps, gamma) == pytest.approx(form_factor_F(p, s), abs=1e-12)
    assert robustness_variance(p, eps, gamma) == pytest.approx(form_factor_G(p, s), abs=1e-12)


def test_robustness_mean_linear_slope():
    p = WepParams(1.03, 0.98, 0.02, 0.4)
    h = 1e-4
    slope = (robustness_mean(p, h, 0.3) - robustness_mean(p, -h, 0.3)) / (2 * h)
    assert slope == pytest.approx(-(p.r2 - p.r1) / 2, abs=1e-6)


def test_robustness_rejects_large_error():
    with pytest.raises(ValueError):
        robustness_mean(WEP_HOLDS, 0.3, 0.0)


@given(wep_params)
def test_robustness_variance_at_zero_error(p):
    assert robustness_variance_phase_avg(p, 0.0) == pytest.approx(phase_averaged_G(p, 1.0, math.pi / 2), abs=1e-14)


@given(st.floats(-0.29, 0.29))
def test_robustness_variance_under_wep(eps):
    assert robustness_variance_phase_avg(WEP_HOLDS, eps) == 0.0


def test_robustness_variance_phase_avg_quadrature(rng):
    for _ in range(50):
        p, eps = random_params(rng, 0.3), rng.uniform(-0.29, 0.29)
        avg, _ = quad(lambda g: robustness_variance(p, eps, g), -math.pi, math.pi, epsabs=1e-14)
        assert avg / (2 * math.pi) == pytest.approx(robustness_variance_phase_avg(p, eps), abs=1e-12)


def test_robustness_variance_taylor_coefficient():
    p = WepParams(1.2, 0.9, 0.05, 1.0)
    eps = np.linspace(0.01, 0.1, 10)
    dev = np.array([robustness_variance_phase_avg(p, e) - robustness_variance_phase_avg(p, 0.0) for e in eps])
    c2, c4 = np.linalg.lstsq(np.column_stack([eps**2, eps**4]), dev, rcond=None)[0]
    exact = -(p.half_diff**2 - 0.5 * p.r_abs**2)
    assert c2 == pytest.approx(exact, rel=1e-5)
    assert robustness_variance_expansion(p, 0.05) == pytest.approx(robustness_variance_phase_avg(p, 0.05), abs=1e-6)
