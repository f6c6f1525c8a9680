from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from hypersonic_ft.errors import (
    CavitationError,
    DomainError,
    InvalidShockError,
    StrengthError,
)
from hypersonic_ft.wave_curves import (
    Family,
    Kind,
    ModelParams,
    State,
    WaveDescriptor,
    bernoulli_B,
    characteristic_speed,
    eigenvalues,
    genuine_nonlinearity_probe,
    hugoniot_residual,
    lax_admissible,
    phi,
    phi_value,
    rankine_hugoniot,
    rarefaction_offset,
    shock_offset,
    shock_speed,
    u_from_state,
    wave_map_Phi,
    wave_state,
)

mp.mp.dps = 40


# ---------------------------------------------------------------------------
# independent oracles built from the raw definitions
# ---------------------------------------------------------------------------


def mp_state_functions(rho, v, a, eps, t2):
    """High-precision ``(s, u, rho s, rho v)`` from the definitions.

    ``(s - 1)/tau2`` and ``(rho^eps - 1)/eps`` cancel about ``-log10`` of the
    small parameter in digits, so the working precision grows accordingly.
    """
    extra = sum(int(max(0.0, -math.log10(float(z)))) + 10 for z in (eps, t2) if z)
    with mp.workdps(mp.mp.dps + extra):
        rho, v, a, eps, t2 = (mp.mpf(z) for z in (rho, v, a, eps, t2))
        pm1 = mp.log(rho) if eps == 0 else (rho ** eps - 1) / eps
        B = 2 * pm1 / a ** 2 + v ** 2
        if t2 == 0:
            s, u = mp.mpf(1), -B / 2
        else:
            s = mp.sqrt(1 - t2 * B)
            u = (s - 1) / t2
        return +s, +u, rho * s, rho * v


def oracle_jacobians(rho, v, a, eps, t2):
    """Analytic ``dW`` and ``dF`` for ``W = (rho s, v)``, ``F = (rho v, -u)``."""
    # (rho^eps - 1)/eps = L expm1(x)/x with x = eps L; a subnormal x loses its digits
    L = math.log(rho)
    x = eps * L
    pm1 = L * math.expm1(x) / x if abs(x) > 1e-300 else L
    B = 2 * pm1 / a ** 2 + v ** 2
    s = math.sqrt(1 - t2 * B)
    db_drho = 2 * rho ** (eps - 1) / a ** 2
    ds_drho, ds_dv = -t2 * db_drho / (2 * s), -t2 * v / s
    du_drho, du_dv = -db_drho / (2 * s), -v / s
    dW = np.array([[s + rho * ds_drho, rho * ds_dv], [0.0, 1.0]])
    dF = np.array([[v, rho], [-du_drho, -du_dv]])
    return dW, dF, s


def oracle_eigenvalues(rho, v, a, eps, t2):
    dW, dF, _ = oracle_jacobians(rho, v, a, eps, t2)
    lam = np.sort(scipy.linalg.eigvals(dF, dW).real)
    return float(lam[0]), float(lam[1])


def oracle_shock(family, alpha, U_L, p):
    """Solve both jump conditions for ``(dv, sigma)`` at 40 digits."""
    rho_r = mp.mpf(U_L.rho) * alpha
    _, u_l, m_l, q_l = mp_state_functions(U_L.rho, U_L.v, p.a_inf, p.epsilon, p.tau2)

    def eqs(dv, sigma):
        _, u_r, m_r, q_r = mp_state_functions(rho_r, U_L.v + dv, p.a_inf, p.epsilon, p.tau2)
        return [sigma * (m_r - m_l) - (q_r - q_l), sigma * dv + (u_r - u_l)]

    dv0 = -math.sqrt(2.0) / p.a_inf * math.sqrt((alpha - 1) * math.log(alpha) / (alpha + 1))
    sig0 = characteristic_speed(family, U_L, p.limit())
    dv, sigma = mp.findroot(eqs, (dv0, sig0), tol=mp.mpf(10) ** -35)
    return float(dv), float(sigma)


def oracle_rarefaction(family, alpha, U_L, p):
    """DOP853 integration of ``dv/d(ln rho) = rho^eps / (a^2 (s lambda - v))``."""
    a, eps, t2 = p.a_inf, p.epsilon, p.tau2
    k = 0 if family == 1 else 1

    def rhs(t, y):
        rho = math.exp(t)
        dW, dF, s = oracle_jacobians(rho, y[0], a, eps, t2)
        lam = np.sort(scipy.linalg.eigvals(dF, dW).real)[k]
        return [rho ** eps / (a * a * (s * lam - y[0]))]

    t0 = math.log(U_L.rho)
    sol = solve_ivp(rhs, (t0, t0 + math.log(alpha)), [U_L.v], method="DOP853",
                    rtol=1e-13, atol=1e-15)
    return float(sol.y[0, -1]) - U_L.v


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------


def test_model_params_invariants():
    p = ModelParams(2.0, 0.01, 0.02, -0.1)
    assert p.mu_norm == 0.01 + 0.02
    assert not p.is_limit
    assert p.limit().is_limit and p.limit().mu_norm == 0.0
    for bad in ({"a_inf": 0.0}, {"epsilon": -1e-3}, {"tau2": -1.0}, {"b0": 0.1}):
        with pytest.raises(DomainError):
            ModelParams(**bad)


def test_wave_descriptor_orientation():
    WaveDescriptor(Family.ONE, Kind.SHOCK, 1.5)
    WaveDescriptor(Family.TWO, Kind.RAREFACTION, 1.5)
    with pytest.raises(StrengthError):
        WaveDescriptor(Family.ONE, Kind.RAREFACTION, 1.5)
    with pytest.raises(StrengthError):
        WaveDescriptor(Family.TWO, Kind.SHOCK, 1.5)
    with pytest.raises(StrengthError):
        WaveDescriptor(Family.ONE, Kind.SHOCK, -1.0)


# ---------------------------------------------------------------------------
# Bernoulli quantity and u
# ---------------------------------------------------------------------------


def test_bernoulli_trivial_state():
    assert bernoulli_B(State(1.0, 0.0), ModelParams(1.3, 0.2, 0.1)) == 0.0


def test_bernoulli_limit_value():
    got = bernoulli_B(State(math.e, 0.0), ModelParams(1.0))
    assert got == pytest.approx(float(2 * mp.log(mp.e)), abs=1e-15)


def test_bernoulli_general_value():
    got = bernoulli_B(State(2.0, 0.5), ModelParams(2.0, 0.1, 0.0))
    with mp.workdps(30):
        want = 2 * (mp.mpf(2) ** mp.mpf("0.1") - 1) / (mp.mpf("0.1") * 4) + mp.mpf("0.25")
    assert got == pytest.approx(float(want), rel=1e-14)
    assert got == pytest.approx(0.60886, abs=1e-5)


def test_bernoulli_rejects_nonpositive_density():
    with pytest.raises(DomainError):
        bernoulli_B(State(0.0, 0.0), ModelParams())


def test_u_from_state_values():
    assert u_from_state(State(1.0, 0.0), ModelParams(1.0, 0.3, 0.2)) == 0.0
    assert u_from_state(State(math.e, 0.0), ModelParams(1.0)) == pytest.approx(-1.0, abs=1e-15)
    with mp.workdps(30):
        want = (mp.sqrt(1 - mp.mpf("1e-4")) - 1) / mp.mpf("1e-2")
    got = u_from_state(State(1.0, 0.1), ModelParams(1.0, 0.0, 0.01))
    assert got == pytest.approx(float(want), rel=1e-13)
    assert got == pytest.approx(-0.0050001, abs=1e-7)


def test_u_from_state_cavitation():
    with pytest.raises(CavitationError):
        u_from_state(State(1.0, 2.0), ModelParams(1.0, 0.0, 0.5))


@settings(max_examples=200, deadline=None)
@given(rho=st.floats(0.5, 2.0), v=st.floats(-0.5, 0.5), a=st.floats(0.5, 2.0),
       eps=st.floats(0.0, 0.01), t2=st.floats(0.0, 0.01))
def test_u_from_state_matches_high_precision(rho, v, a, eps, t2):
    got = u_from_state(State(rho, v), ModelParams(a, eps, t2))
    _, want, _, _ = mp_state_functions(rho, v, a, eps, t2)
    assert got == pytest.approx(float(want), rel=1e-12, abs=1e-15)


# ---------------------------------------------------------------------------
# eigenstructure
# ---------------------------------------------------------------------------


def test_eigenvalues_limit_exact():
    assert eigenvalues(State(1.0, 0.0), ModelParams(1.0)) == (-1.0, 1.0)
    lam = eigenvalues(State(1.7, 0.3), ModelParams(2.0))
    assert lam == (0.3 - 0.5, 0.3 + 0.5)


def test_eigenvalues_satisfy_characteristic_polynomial():
    p = ModelParams(1.0, 0.05, 0.01)
    s = State(1.5, 0.2)
    dW, dF, _ = oracle_jacobians(s.rho, s.v, 1.0, 0.05, 0.01)
    for lam in eigenvalues(s, p):
        assert abs(np.linalg.det(dF - lam * dW)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(rho=st.floats(0.5, 2.0), v=st.floats(-0.5, 0.5), a=st.floats(0.5, 2.0),
       eps=st.floats(0.0, 0.01), t2=st.floats(0.0, 0.01))
def test_eigenvalues_match_generalized_eigenproblem(rho, v, a, eps, t2):
    got = eigenvalues(State(rho, v), ModelParams(a, eps, t2))
    want = oracle_eigenvalues(rho, v, a, eps, t2)
    assert got[0] < got[1]
    assert got == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_genuine_nonlinearity_limit_values():
    g1, g2 = genuine_nonlinearity_probe(State(1.0, 0.0), ModelParams(1.0))
    assert (g1, g2) == (pytest.approx(1.0, abs=1e-8), pytest.approx(1.0, abs=1e-8))
    g1, g2 = genuine_nonlinearity_probe(State(1.0, 0.0), ModelParams(4.0))
    assert (g1, g2) == (pytest.approx(0.25, abs=1e-8), pytest.approx(0.25, abs=1e-8))


def test_genuine_nonlinearity_full_system_positive():
    g1, g2 = genuine_nonlinearity_probe(State(1.8, 0.4), ModelParams(1.0, 0.02, 0.02))
    assert g1 > 0.0 and g2 > 0.0


# ---------------------------------------------------------------------------
# shock curves
# ---------------------------------------------------------------------------


def test_shock_offset_trivial_and_limit():
    U = State(1.3, 0.1)
    assert shock_offset(1.0, Family.ONE, U, ModelParams(1.0, 0.01, 0.01)) == 0.0
    want = -math.sqrt(2.0) * math.sqrt(math.log(2.0) / 3.0)
    assert shock_offset(2.0, Family.ONE, State(1.0, 0.0), ModelParams(1.0)) == pytest.approx(want, rel=1e-15)


def test_shock_offset_against_mpmath_oracle():
    U = State(1.0, 0.0)
    p = ModelParams(1.0, 1e-3, 1e-3)
    got = shock_offset(2.0, Family.ONE, U, p)
    dv, _ = oracle_shock(1, 2.0, U, p)
    assert got == pytest.approx(dv, abs=1e-14)
    # within C * ||mu|| of the limit value, C of order one
    limit = shock_offset(2.0, Family.ONE, U, p.limit())
    assert abs(got - limit) / p.mu_norm < 1.0


@settings(max_examples=25, deadline=None)
@given(rho=st.floats(0.5, 2.0), v=st.floats(-0.5, 0.5), family=st.sampled_from([1, 2]),
       log_alpha=st.floats(0.01, 1.0), eps=st.floats(0.0, 0.01), t2=st.floats(0.0, 0.01))
def test_shock_offset_matches_oracle_random(rho, v, family, log_alpha, eps, t2):
    alpha = math.exp(log_alpha if family == 1 else -log_alpha)
    p = ModelParams(1.0, eps, t2)
    U = State(rho, v)
    got = shock_offset(alpha, Family(family), U, p)
    dv, sigma = oracle_shock(family, alpha, U, p)
    assert got == pytest.approx(dv, rel=1e-12, abs=1e-14)
    U_R = State(rho * alpha, v + got)
    assert shock_speed(WaveDescriptor(Family(family), Kind.SHOCK, alpha), U, U_R, p) == pytest.approx(
        sigma, rel=1e-10, abs=1e-12)
    assert lax_admissible(Family(family), U, U_R, sigma, p)


def test_shock_offset_rejects_wrong_orientation_and_window():
    p = ModelParams(1.0)
    with pytest.raises(StrengthError):
        shock_offset(0.5, Family.ONE, State(1.0, 0.0), p)
    with pytest.raises(StrengthError):
        shock_offset(100.0, Family.ONE, State(1.0, 0.0), p)


def test_hugoniot_residual_vanishes_on_curve():
    p = ModelParams(1.0, 0.005, 0.005)
    U = State(1.2, -0.1)
    dv = shock_offset(1.6, Family.ONE, U, p)
    assert abs(hugoniot_residual(dv, 1.6, U, p)) < 1e-14
    assert abs(hugoniot_residual(0.5 * dv, 1.6, U, p)) > 1e-4


def test_shock_speed_limit_against_flux_quotient():
    p = ModelParams(1.0)
    U = State(1.0, 0.0)
    U_R = wave_state(Family.ONE, 1.5, U, p)
    sigma = shock_speed(WaveDescriptor(Family.ONE, Kind.SHOCK, 1.5), U, U_R, p)
    with mp.workdps(30):
        _, _, m_l, q_l = mp_state_functions(U.rho, U.v, 1.0, 0, 0)
        _, _, m_r, q_r = mp_state_functions(U_R.rho, U_R.v, 1.0, 0, 0)
        want = (q_r - q_l) / (m_r - m_l)
    assert sigma == pytest.approx(float(want), rel=1e-14)


def test_shock_speed_weak_limit_tends_to_characteristic_speed():
    p = ModelParams(1.0, 0.002, 0.002)
    U = State(1.1, 0.05)
    lam = characteristic_speed(Family.ONE, U, p)
    gaps = []
    for k in range(1, 5):
        alpha = 1.0 + 0.1 / 2 ** k
        U_R = wave_state(Family.ONE, alpha, U, p)
        gaps.append(abs(shock_speed(WaveDescriptor(Family.ONE, Kind.SHOCK, alpha), U, U_R, p) - lam))
    ratios = [g0 / g1 for g0, g1 in zip(gaps, gaps[1:])]
    assert all(1.8 < r < 2.2 for r in ratios)  # first-order approach


def test_shock_speed_rejects_inconsistent_jump():
    p = ModelParams(1.0)
    with pytest.raises(InvalidShockError):
        shock_speed(WaveDescriptor(Family.ONE, Kind.SHOCK, 1.5), State(1.0, 0.0), State(1.5, 0.3), p)
    with pytest.raises(InvalidShockError):
        rankine_hugoniot(State(1.0, 0.0), State(1.0, 0.3), p)


def test_optimal_rate_shock_speed_tends_to_minus_one():
    from hypersonic_ft.riemann import solve_boundary

    speeds = []
    for delta in (1e-2, 1e-3, 1e-4):
        fan = solve_boundary(State(1.0, delta), ModelParams(1.0))
        speeds.append(fan.waves[0].xi_lo)
    assert [abs(s + 1.0) for s in speeds] == sorted([abs(s + 1.0) for s in speeds], reverse=True)
    assert speeds[-1] == pytest.approx(-1.0, abs=1e-3)


# ---------------------------------------------------------------------------
# rarefaction curves
# ---------------------------------------------------------------------------


def test_rarefaction_offset_trivial_and_limit():
    assert rarefaction_offset(1.0, Family.ONE, State(1.0, 0.0), ModelParams(1.0, 0.01)) == 0.0
    got = rarefaction_offset(1.0 / math.e, Family.ONE, State(1.0, 0.0), ModelParams(1.0))
    assert got == pytest.approx(1.0, abs=1e-15)


def test_rarefaction_offset_against_dop853():
    U = State(1.0, 0.0)
    p = ModelParams(1.0, 1e-3, 0.0)
    got = rarefaction_offset(1.2, Family.TWO, U, p)
    want = oracle_rarefaction(2, 1.2, U, p)
    assert got == pytest.approx(want, abs=1e-10)


@settings(max_examples=12, deadline=None)
@given(rho=st.floats(0.5, 2.0), v=st.floats(-0.5, 0.5), family=st.sampled_from([1, 2]),
       log_alpha=st.floats(0.01, 0.7), eps=st.floats(0.0, 0.01), t2=st.floats(0.0, 0.01))
def test_rarefaction_offset_matches_dop853_random(rho, v, family, log_alpha, eps, t2):
    alpha = math.exp(-log_alpha if family == 1 else log_alpha)
    p = ModelParams(1.0, eps, t2)
    U = State(rho, v)
    if p.mu_norm == 0.0:
        p = ModelParams(1.0, 1e-9, 0.0)
    got = rarefaction_offset(alpha, Family(family), U, p)
    assert got == pytest.approx(oracle_rarefaction(family, alpha, U, p), abs=1e-10)


# ---------------------------------------------------------------------------
# composite curves
# ---------------------------------------------------------------------------


def test_phi_trivial_and_limit_family_two():
    U = State(1.0, 0.0)
    assert phi(WaveDescriptor(Family.ONE, Kind.SHOCK, 1.0), U, ModelParams(1.0, 0.01, 0.01)) == 0.0
    got = phi(WaveDescriptor(Family.TWO, Kind.RAREFACTION, 3.0), U, ModelParams(1.0))
    assert got == pytest.approx(math.log(3.0), abs=1e-15)


@pytest.mark.parametrize("family,sign", [(Family.ONE, -1.0), (Family.TWO, 1.0)])
def test_phi_derivative_at_unit_strength(family, sign):
    p = ModelParams(2.0)
    U = State(1.0, 0.0)
    for h in (1e-4, -1e-4):
        q = phi_value(family, 1.0 + h, U, p) / h
        assert q == pytest.approx(sign * 0.5, abs=1e-4)


@settings(max_examples=100, deadline=None)
@given(a=st.floats(0.3, 3.0), alpha=st.floats(0.1, 9.0))
def test_limit_closed_forms(a, alpha):
    p = ModelParams(a)
    U = State(1.0, 0.0)
    if alpha >= 1.0:
        phi1 = -math.sqrt(2.0) / a * math.sqrt((alpha - 1) * math.log(alpha) / (alpha + 1))
        phi2 = math.log(alpha) / a
    else:
        phi1 = -math.log(alpha) / a
        phi2 = -math.sqrt(2.0) / a * math.sqrt((alpha - 1) * math.log(alpha) / (alpha + 1))
    assert phi_value(Family.ONE, alpha, U, p) == pytest.approx(phi1, abs=1e-12)
    assert phi_value(Family.TWO, alpha, U, p) == pytest.approx(phi2, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(a1=st.floats(0.9, 1.1), b1=st.floats(0.9, 1.1), family=st.sampled_from([1, 2]),
       eps=st.floats(0.0, 0.01), t2=st.floats(0.0, 0.01))
def test_phi_strictly_monotone(a1, b1, family, eps, t2):
    if a1 == b1:
        return
    p = ModelParams(1.0, eps, t2)
    U = State(1.1, 0.1)
    lo, hi = sorted((a1, b1))
    d = phi_value(Family(family), hi, U, p) - phi_value(Family(family), lo, U, p)
    assert d < 0.0 if family == 1 else d > 0.0


def test_wave_map_identity_and_limit():
    U = State(1.2, -0.1)
    p = ModelParams(1.0, 0.01, 0.01)
    assert wave_map_Phi(1.0, 1.0, U, p) == U
    got = wave_map_Phi(2.0, 1.0, State(1.0, 0.0), ModelParams(1.0))
    assert got.rho == 2.0
    assert got.v == pytest.approx(-math.sqrt(2.0) * math.sqrt(math.log(2.0) / 3.0), rel=1e-15)


@settings(max_examples=60, deadline=None)
@given(a1=st.floats(0.6, 1.6), a2=st.floats(0.6, 1.6), eps=st.floats(0.0, 0.01),
       t2=st.floats(0.0, 0.01))
def test_wave_map_round_trip_through_interior_solver(a1, a2, eps, t2):
    from hypersonic_ft.riemann import solve_interior

    p = ModelParams(1.0, eps, t2)
    U = State(1.0, 0.0)
    U_R = wave_map_Phi(a1, a2, U, p)
    fan = solve_interior(U, U_R, p)
    assert fan.strengths == (pytest.approx(a1, abs=1e-10), pytest.approx(a2, abs=1e-10))
