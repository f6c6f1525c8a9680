from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersonic_ft.analysis import (
    asymptotic_checks,
    fit_rate,
    l1_distance,
    optimal_rate_cell,
    optimal_rate_experiment,
    psi,
    u_error,
)
from hypersonic_ft.errors import DomainError
from hypersonic_ft.front_tracking import Profile
from hypersonic_ft.riemann import solve_boundary
from hypersonic_ft.wave_curves import ModelParams, State, u_from_state

mp.mp.dps = 40


def _riemann_sum(a: Profile, b: Profile, lo: float, hi: float, n: int) -> float:
    """Midpoint Riemann sum of ``|U_a - U_b|`` with ``n`` points (vectorised)."""
    ys = lo + (np.arange(n) + 0.5) * (hi - lo) / n

    def values(p: Profile):
        idx = np.searchsorted(np.asarray(p.breakpoints), ys, side="right")
        rho = np.array([u.rho for u in p.values])[idx]
        v = np.array([u.v for u in p.values])[idx]
        return rho, v

    ra, va = values(a)
    rb, vb = values(b)
    return float(np.sum(np.abs(ra - rb) + np.abs(va - vb)) * (hi - lo) / n)


# ---------------------------------------------------------------------------
# l1_distance
# ---------------------------------------------------------------------------


def test_l1_identity_and_rectangle():
    a = Profile(0.0, (-1.0,), (State(1.0, 0.0), State(1.2, 0.3)))
    assert l1_distance(a, a, (-5.0, 0.0)) == 0.0
    b = Profile(0.0, (-0.75,), (State(1.0, 0.0), State(1.0, 1.0)))
    c = Profile(0.0, (-0.5,), (State(1.0, 0.0), State(1.0, 1.0)))
    assert l1_distance(b, c, (-2.0, 0.0)) == 0.25
    assert l1_distance(b, c, (-math.inf, 0.0)) == 0.25


def test_l1_against_riemann_sum_oracle():
    # breakpoints on multiples of 1/8, so the 10^6-point midpoint sum is exact up to rounding
    a = Profile(0.0, (-1.5, -0.75, -0.25), (State(1.0, 0.0), State(1.3, 0.1), State(0.9, -0.2), State(1.1, 0.05)))
    b = Profile(0.0, (-1.25, -0.5, -0.125), (State(1.0, 0.0), State(0.8, 0.2), State(1.2, 0.0), State(1.0, -0.1)))
    oracle = _riemann_sum(a, b, -2.0, 0.0, 1_000_000)
    assert l1_distance(a, b, (-2.0, 0.0)) == pytest.approx(oracle, abs=1e-9)


def test_l1_divergent_tails_and_bad_intervals():
    a = Profile(0.0, (), (State(1.0, 0.0),))
    b = Profile(0.0, (), (State(1.1, 0.0),))
    with pytest.raises(DomainError):
        l1_distance(a, b, (-math.inf, 0.0))
    with pytest.raises(DomainError):
        l1_distance(a, a, (0.0, -1.0))
    assert l1_distance(a, b, (-2.0, 0.0)) == pytest.approx(0.2, abs=1e-15)


profiles = st.builds(
    lambda ys, rs, vs: Profile(
        0.0, tuple(sorted(set(ys))),
        (State(1.0, 0.0), *(State(r, v) for r, v in zip(rs, vs)))[: len(set(ys)) + 1]),
    st.lists(st.floats(-3.0, 0.0).map(lambda y: round(y, 3)), min_size=4, max_size=4),
    st.lists(st.floats(0.5, 2.0), min_size=4, max_size=4),
    st.lists(st.floats(-0.5, 0.5), min_size=4, max_size=4),
)


@settings(max_examples=200, deadline=None)
@given(a=profiles, b=profiles, c=profiles)
def test_l1_is_a_metric(a, b, c):
    iv = (-4.0, 0.0)
    dab, dba = l1_distance(a, b, iv), l1_distance(b, a, iv)
    assert dab == pytest.approx(dba, abs=1e-14)
    assert l1_distance(a, c, iv) <= dab + l1_distance(b, c, iv) + 1e-13
    assert l1_distance(a, b, iv, euclidean=True) <= dab + 1e-14


# ---------------------------------------------------------------------------
# rate fits
# ---------------------------------------------------------------------------


def test_fit_rate_recovers_synthetic_power_law():
    xs = [1e-3, 2e-3, 4e-3, 8e-3]
    fit = fit_rate(xs, [0.7 * x for x in xs], window=4)
    assert fit.slope == pytest.approx(1.0, abs=1e-9)
    assert fit.leading_coefficient == pytest.approx(0.7, rel=1e-9)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)
    fit2 = fit_rate(xs, [3.0 * x ** 2 for x in xs], window=4, scale=0.5)
    assert fit2.slope == pytest.approx(2.0, abs=1e-9)
    assert fit2.leading_coefficient == pytest.approx(3.0 * 1e-3 / 0.5, rel=1e-9)


def test_fit_rate_rejects_bad_abscissae():
    with pytest.raises(DomainError):
        fit_rate([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(DomainError):
        fit_rate([1.0, 1.0], [1.0, 2.0])
    assert math.isnan(fit_rate([1.0, 2.0], [0.0, 1.0]).slope)


# ---------------------------------------------------------------------------
# optimal-rate example
# ---------------------------------------------------------------------------


def test_optimal_rate_zero_mu_is_exact_zero():
    cell = optimal_rate_cell(1.0, 1e-3, 0.0, 0.0, 1.0)
    assert cell.l1_error == 0.0 and cell.u_error == 0.0


@pytest.mark.parametrize("eps,tau2", [(1e-3, 0.0), (0.0, 1e-3), (1e-4, 2e-4)])
def test_optimal_rate_two_routes_agree(eps, tau2):
    cell = optimal_rate_cell(1.0, 1e-2, eps, tau2, 2.0)
    assert cell.l1_error > 0.0
    assert cell.l1_error == pytest.approx(cell.l1_error_sampled, rel=1e-10)


def test_optimal_rate_limit_strength_first_order():
    # alpha_1(delta) - 1 - a delta = O(delta^2): the normalised gap settles on a constant
    for a in (0.5, 1.0, 2.0):
        gaps = [(solve_boundary(State(1.0, d), ModelParams(a)).strengths[0] - 1.0 - a * d) / d ** 2
                for d in (1e-2, 1e-3, 1e-4)]
        assert gaps[2] == pytest.approx(gaps[1], rel=2e-2)
        assert abs(gaps[2]) < 2.0 * a * a


def test_optimal_rate_experiment_is_linear_in_mu():
    res = optimal_rate_experiment(1.0, 1e-3, [4e-4, 2e-4, 1e-4], [4e-4, 2e-4, 1e-4])
    assert res.eps_fit.slope == pytest.approx(1.0, abs=0.02)
    assert res.tau2_fit.slope == pytest.approx(1.0, abs=0.02)
    assert len(res.rows()) == 6


# ---------------------------------------------------------------------------
# velocity recovery
# ---------------------------------------------------------------------------


def test_psi_examples_and_u_identity():
    assert psi(State(1.0, 0.0), ModelParams(1.0)) == 0.0
    assert psi(State(math.e, 0.0), ModelParams(1.0)) == pytest.approx(1.0, abs=1e-15)
    for p in (ModelParams(1.0), ModelParams(0.7, 0.01, 0.02)):
        for s in (State(1.2, 0.1), State(0.8, -0.3)):
            assert u_from_state(s, p) + psi(s, p) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("eps,tau2", [(0.01, 0.02), (0.0, 0.05), (0.03, 0.0)])
def test_psi_density_derivative(eps, tau2):
    p = ModelParams(1.3, eps, tau2)
    rho, v = 1.1, 0.2
    a = p.a_inf
    B = 2.0 * (rho ** eps - 1.0) / (a * a * eps) + v * v if eps else 2.0 * math.log(rho) / a ** 2 + v * v
    exact = rho ** (eps - 1.0) / (a * a * math.sqrt(1.0 - tau2 * B))
    errs = []
    for h in (1e-3, 5e-4):
        fd = (psi(State(rho + h, v), p) - psi(State(rho - h, v), p)) / (2.0 * h)
        errs.append(abs(fd - exact))
    assert errs[1] < 1e-6
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_u_error_identity_and_constant_state_oracle():
    p = ModelParams(1.0, 0.0, 1e-4)
    prof = Profile(1.0, (-0.5,), (State(1.0, 0.0), State(1.1, 0.05)))
    assert u_error(prof, prof, ModelParams(1.0)) == 0.0
    const = Profile(1.0, (), (State(1.0, 0.1),))
    t2, v = mp.mpf("1e-4"), mp.mpf("0.1")
    oracle = abs((mp.sqrt(1 - t2 * v * v) - 1) / t2 + v * v / 2)
    assert u_error(const, const, p, (-1.0, 0.0)) == pytest.approx(float(oracle), rel=1e-9)


def test_u_error_linear_in_mu_for_optimal_rate_setup():
    errs = [optimal_rate_cell(1.0, 1e-2, m, m, 1.0).u_error for m in (4e-4, 2e-4, 1e-4)]
    assert fit_rate([1e-4, 2e-4, 4e-4], errs[::-1]).slope == pytest.approx(1.0, abs=0.05)


# ---------------------------------------------------------------------------
# asymptotics
# ---------------------------------------------------------------------------


def test_asymptotic_defects_at_zero_mu():
    deltas = [1e-2, 5e-3, 2.5e-3, 1.25e-3]
    rep = asymptotic_checks(1.0, deltas, [0.0] * 4)
    for lv in rep.levels:
        # the limit curve is probed at its own boundary root: zero up to rounding
        assert abs(lv.curve_defect) < 1e-12
        # at eps = 0 the strength defect is (ln beta1 - a delta) / delta exactly
        assert lv.strength_defect == pytest.approx((math.log(lv.beta1) - lv.delta) / lv.delta, abs=1e-12)
    # at mu = 0 the remaining defects are O(delta), hence at least linear
    assert rep.slopes["strength_defect"] >= 0.9
    assert rep.slopes["bernoulli_defect"] >= 0.9


def test_asymptotic_defects_vanish_linearly_on_joint_ladder():
    deltas = [1e-2, 5e-3, 2.5e-3, 1.25e-3]
    rep = asymptotic_checks(1.0, deltas, [d / 10.0 for d in deltas])
    assert rep.all_linear(0.9, 1.1)


def test_bernoulli_defect_slope_stable_across_sound_speeds():
    deltas = [1e-2, 5e-3, 2.5e-3, 1.25e-3]
    mus = [d / 10.0 for d in deltas]
    slopes = [asymptotic_checks(a, deltas, mus).slopes["bernoulli_defect"] for a in (0.5, 1.0, 2.0)]
    assert all(math.isfinite(s) for s in slopes)
    assert max(slopes) - min(slopes) < 0.2
    with pytest.raises(DomainError):
        asymptotic_checks(1.0, deltas, mus[:2])
