from __future__ import annotations

import math
import random

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fan_checks import (
    boundary_trace_residual,
    ordered,
    random_params,
    random_state,
    recomposition_residual,
    shock_checks,
)
from hypersonic_ft.errors import DomainError, SolverError
from hypersonic_ft.riemann import (
    boundary_residual,
    compare_boundary_strengths,
    compare_strengths,
    fan_from_strengths,
    sample_fan,
    solve_boundary,
    solve_interior,
)
from hypersonic_ft.wave_curves import (
    Family,
    Kind,
    ModelParams,
    State,
    eigenvalues,
    phi_value,
    wave_state,
)

mp.mp.dps = 40


def limit_phi_mp(family, alpha, a):
    """Limit-system wave curve at 40 digits."""
    alpha, a = mp.mpf(alpha), mp.mpf(a)
    shock = alpha > 1 if family == 1 else alpha < 1
    if shock:
        return -mp.sqrt(2) / a * mp.sqrt((alpha - 1) * mp.log(alpha) / (alpha + 1))
    return -mp.log(alpha) / a if family == 1 else mp.log(alpha) / a


# ---------------------------------------------------------------------------
# interior problem
# ---------------------------------------------------------------------------


def test_identity_riemann_problem():
    U = State(1.3, 0.2)
    fan = solve_interior(U, U, ModelParams(1.0, 0.01, 0.01))
    assert fan.strengths == (1.0, 1.0)
    assert fan.waves == ()
    assert fan.right_state == U


def test_symmetric_double_shock():
    p = ModelParams(1.0)
    fan = solve_interior(State(1.0, 0.2), State(1.0, -0.2), p)
    a1, a2 = fan.strengths
    assert a1 > 1.0 > a2
    assert a2 == pytest.approx(1.0 / a1, rel=1e-12)
    assert all(fw.wave.kind is Kind.SHOCK for fw in fan.waves)
    # independent 1-D root of phi_1(alpha) + phi_2(1/alpha) = -0.4 at 40 digits
    want = mp.findroot(lambda al: limit_phi_mp(1, al, 1) + limit_phi_mp(2, 1 / al, 1) + mp.mpf("0.4"),
                       1.5)
    assert a1 == pytest.approx(float(want), rel=1e-13)


def test_right_state_on_first_curve():
    p = ModelParams(1.0, 0.003, 0.002)
    U_L = State(1.0, 0.0)
    U_R = State(1.2, phi_value(Family.ONE, 1.2, U_L, p))
    fan = solve_interior(U_L, U_R, p)
    assert fan.strengths[0] == pytest.approx(1.2, abs=1e-12)
    assert fan.strengths[1] == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_interior_fans_are_consistent(seed):
    rng = random.Random(seed)
    p = random_params(rng)
    U_L, U_R = random_state(rng), random_state(rng)
    fan = solve_interior(U_L, U_R, p)
    assert recomposition_residual(fan, U_R) < 1e-10
    resid, lax_ok = shock_checks(fan, p)
    assert resid < 1e-10
    assert lax_ok
    assert ordered(fan)
    assert fan.constant_states[0] == U_L


def test_interior_strength_window():
    # a density ratio beyond the strength window cannot be bracketed
    with pytest.raises(SolverError) as info:
        solve_interior(State(0.06, 0.0), State(19.0, 0.0), ModelParams(1.0))
    assert info.value.last_iterate is not None


# ---------------------------------------------------------------------------
# boundary problem
# ---------------------------------------------------------------------------


def test_boundary_trivial():
    U = State(1.4, -0.1)
    fan = solve_boundary(U, ModelParams(1.0, 0.0, 0.0, -0.1))
    assert fan.strengths == (1.0,)
    assert fan.right_state == U
    assert fan.boundary_attached


@pytest.mark.parametrize("a,v_l,b0", [(1.0, -0.3, -0.1), (2.0, -0.05, 0.0), (0.5, -0.4, -0.2)])
def test_boundary_rarefaction_closed_form(a, v_l, b0):
    fan = solve_boundary(State(1.1, v_l), ModelParams(a, 0.0, 0.0, b0))
    assert fan.strengths[0] == pytest.approx(math.exp(a * (v_l - b0)), rel=1e-14)
    assert fan.right_state.v == b0


def test_boundary_first_order_strength():
    delta = 1e-3
    fan = solve_boundary(State(1.0, delta), ModelParams(1.0))
    gaps = []
    for d in (1e-2, 1e-3, 1e-4):
        a1 = solve_boundary(State(1.0, d), ModelParams(1.0)).strengths[0]
        gaps.append((a1 - 1.0 - d) / d ** 2)
    assert fan.strengths[0] == pytest.approx(1.0 + delta, abs=2 * delta ** 2)
    assert max(gaps) < 1.0 and min(gaps) > -1.0  # O(delta^2) with a bounded constant


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_boundary_fans_are_consistent(seed):
    rng = random.Random(seed)
    p = random_params(rng, b0=-rng.uniform(0.0, 0.2))
    fan = solve_boundary(random_state(rng), p)
    assert boundary_trace_residual(fan, p) < 1e-12
    resid, lax_ok = shock_checks(fan, p)
    assert resid < 1e-10
    assert lax_ok
    assert all(fw.wave.family is Family.ONE for fw in fan.waves)


def test_boundary_residual_definition():
    p = ModelParams(1.0, 0.0, 0.01, -0.2)
    U = State(1.2, -0.1)
    s = math.sqrt(1.0 - 0.01 * (2.0 * math.log(1.2) + 0.01))
    assert boundary_residual(U, p) == pytest.approx(-0.1 + 0.2 * s, abs=1e-15)
    assert boundary_residual(State(1.2, -0.2), ModelParams(1.0, 0.0, 0.0, -0.2)) == 0.0


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def test_sample_fan_outside_and_at_shock():
    p = ModelParams(1.0)
    U_L, U_R = State(1.0, 0.2), State(1.0, -0.2)
    fan = solve_interior(U_L, U_R, p)
    assert sample_fan(fan, -10.0, p) == U_L
    assert sample_fan(fan, 10.0, p) == fan.right_state
    s1 = fan.waves[0].xi_lo
    assert sample_fan(fan, s1, p) == fan.constant_states[1]  # right limit at a shock


def test_sample_fan_rarefaction_self_similar():
    p = ModelParams(1.0)
    U_L = State(1.0, 0.0)
    alpha = math.exp(0.4)
    fan = fan_from_strengths(1.0, alpha, U_L, p)
    fw = fan.waves[0]
    assert fw.wave.kind is Kind.RAREFACTION
    xi = 0.5 * (fw.xi_lo + fw.xi_hi)
    u = sample_fan(fan, xi, p)
    assert eigenvalues(u, p)[1] == pytest.approx(xi, abs=1e-13)
    assert U_L.rho < u.rho < U_L.rho * alpha


def test_sample_fan_rejects_outside_wedge():
    p = ModelParams(1.0, 0.0, 0.0, -0.1)
    fan = solve_boundary(State(1.0, 0.1), p)
    with pytest.raises(DomainError):
        sample_fan(fan, 0.0, p)


# ---------------------------------------------------------------------------
# full vs limit strengths
# ---------------------------------------------------------------------------


def test_compare_strengths_limit_exact_match():
    rep = compare_strengths(State(1.0, 0.1), State(1.2, -0.1), ModelParams(1.0))
    assert rep.exact_match
    assert rep.full == rep.limit
    assert rep.ratios is None


def test_compare_strengths_linear_in_epsilon():
    U_L = State(1.0, 0.0)
    diffs = []
    for eps in (1e-3, 5e-4, 2.5e-4):
        p = ModelParams(1.0, 1e-3, 0.0)  # U_R on the full-system 1-curve at eps = 1e-3
        U_R = wave_state(Family.ONE, 1.5, U_L, p)
        rep = compare_strengths(U_L, U_R, ModelParams(1.0, eps, 0.0))
        diffs.append(abs(rep.full[1] - 1.0))
    # beta_2 - 1 vanishes at eps = 1e-3 and grows linearly with the offset from it
    assert diffs[0] < 1e-12
    d1, d2 = diffs[1], diffs[2]
    assert d2 / d1 == pytest.approx(1.5, rel=1e-2)


def test_compare_strengths_beta2_halving():
    U_L = State(1.0, 0.0)
    U_R = wave_state(Family.ONE, 1.5, U_L, ModelParams(1.0))  # on the limit 1-curve
    gaps = [abs(compare_strengths(U_L, U_R, ModelParams(1.0, e, 0.0)).full[1] - 1.0)
            for e in (4e-3, 2e-3, 1e-3)]
    assert gaps[0] / gaps[1] == pytest.approx(2.0, rel=2e-2)
    assert gaps[1] / gaps[2] == pytest.approx(2.0, rel=2e-2)


def _boundary_strength_mp(delta, a, eps, t2):
    """Full-system boundary 1-shock strength for ``U_L = (1, delta)``, ``b0 = 0``, at 40 digits."""

    def state(rho, v):
        rho, v = mp.mpf(rho), mp.mpf(v)
        pm1 = mp.log(rho) if eps == 0 else (rho ** eps - 1) / eps
        B = 2 * pm1 / a ** 2 + v ** 2
        s = mp.sqrt(1 - t2 * B)
        u = -B / (1 + s)
        return u, rho * s, rho * v

    u_l, m_l, q_l = state(1, delta)

    def eqs(alpha, sigma):
        # right state on the boundary: v = 0
        u_r, m_r, q_r = state(alpha, 0)
        return [sigma * (m_r - m_l) - (q_r - q_l), sigma * (0 - mp.mpf(delta)) + (u_r - u_l)]

    alpha, _ = mp.findroot(eqs, (1 + a * delta, -1 / mp.mpf(a)))
    return alpha


@pytest.mark.parametrize("a", [1.0, 2.0])
def test_boundary_strength_difference_against_oracle(a):
    delta = 1e-3
    for eps, t2 in ((1e-3, 0.0), (0.0, 1e-3)):
        rep = compare_boundary_strengths(State(1.0, delta), ModelParams(a, eps, t2))
        beta_mp = _boundary_strength_mp(delta, a, eps, t2)
        alpha_mp = _boundary_strength_mp(delta, a, 0, 0)
        assert rep.full[0] == pytest.approx(float(beta_mp), abs=1e-13)
        assert rep.limit[0] == pytest.approx(float(alpha_mp), abs=1e-13)


@pytest.mark.parametrize("a", [1.0, 2.0])
def test_boundary_strength_difference_structure(a):
    # measured structure: beta_1 - alpha_1 = tau2 delta / (2 a) - (a^2/4) eps delta^2 + h.o.t.
    delta = 1e-4
    p_t = ModelParams(a, 0.0, 1e-3)
    rep = compare_boundary_strengths(State(1.0, delta), p_t)
    d_tau = rep.full[0] - rep.limit[0]
    assert d_tau / (1e-3 * a * delta) == pytest.approx(1.0 / (2.0 * a * a), rel=2e-3)
    p_e = ModelParams(a, 1e-3, 0.0)
    rep = compare_boundary_strengths(State(1.0, delta), p_e)
    d_eps = rep.full[0] - rep.limit[0]
    assert d_eps / (1e-3 * delta ** 2) == pytest.approx(-a * a / 4.0, rel=2e-3)
