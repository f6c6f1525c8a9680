"""Structural checks of Riemann fans shared by the unit and acceptance tests."""

from __future__ import annotations

import random

from hypersonic_ft.riemann import RiemannFan, boundary_residual
from hypersonic_ft.wave_curves import Kind, ModelParams, State, lax_admissible, rankine_hugoniot


def recomposition_residual(fan: RiemannFan, U_R: State) -> float:
    u = fan.right_state
    return max(abs(u.rho - U_R.rho), abs(u.v - U_R.v))


def shock_checks(fan: RiemannFan, p: ModelParams) -> tuple[float, bool]:
    """Largest Rankine-Hugoniot residual over the shocks and whether all pass strict Lax."""
    worst, lax_ok = 0.0, True
    for i, fw in enumerate(fan.waves):
        if fw.wave.kind is not Kind.SHOCK:
            continue
        left, right = fan.constant_states[i], fan.constant_states[i + 1]
        sigma, resid = rankine_hugoniot(left, right, p)
        worst = max(worst, resid)
        lax_ok &= lax_admissible(fw.wave.family, left, right, sigma, p)
        lax_ok &= fw.xi_lo == fw.xi_hi == sigma
    return worst, lax_ok


def ordered(fan: RiemannFan) -> bool:
    xs = [z for fw in fan.waves for z in (fw.xi_lo, fw.xi_hi)]
    return all(a <= b for a, b in zip(xs, xs[1:]))


def boundary_trace_residual(fan: RiemannFan, p: ModelParams) -> float:
    return abs(boundary_residual(fan.right_state, p))


def random_state(rng: random.Random) -> State:
    return State(rng.uniform(0.5, 2.0), rng.uniform(-0.5, 0.5))


def random_params(rng: random.Random, a_inf: float = 1.0, b0: float = 0.0) -> ModelParams:
    mu = rng.uniform(0.0, 1e-2)
    share = rng.random()
    return ModelParams(a_inf, mu * share, mu * (1.0 - share), b0)
