"""Exact interior and boundary Riemann solvers for both systems.

The interior problem ``U_L -> U_R`` is solved in the strength variables
``(alpha_1, alpha_2)``.  Since ``rho_R = rho_L alpha_1 alpha_2`` the density
equation is eliminated exactly (``alpha_2 = (rho_R/rho_L)/alpha_1``), which
leaves one scalar equation in ``t = ln alpha_1``,

    f(t) = v_L + phi_1(alpha_1; U_L) + phi_2(alpha_2; U_M) - v_R = 0,

strictly decreasing in ``t`` (``phi_1`` is non-increasing and ``phi_2``
non-decreasing in their strengths).  It is solved by a bracketed Brent
iteration seeded with the limit-system solution.

The boundary problem connects ``U_L`` by a single family-One wave to a state
``U_b`` on the wedge boundary ``y = b0 x`` where ``v_b = b0 sqrt(1 - tau2 B)``
(full system) or ``v_b = b0`` (limit system).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .errors import BoundarySolverError, DomainError, SolverError, StrengthError
from .wave_curves import (
    Family,
    Kind,
    ModelParams,
    State,
    WaveDescriptor,
    _char_speed,
    _hugoniot_parts,
    _phi,
    _s_and_u,
    _v_span,
    secant_root,
    wave_kind,
)

#: Strengths with ``|ln alpha|`` below this are snapped to the null wave.
NULL_WAVE_LOG = 1e-13

_XTOL = 1e-18
_RTOL = 8.9e-16


@dataclass(frozen=True)
class FanWave:
    """One wave of a Riemann fan with its similarity-speed interval."""

    wave: WaveDescriptor
    xi_lo: float
    xi_hi: float


@dataclass(frozen=True)
class RiemannFan:
    """Self-similar solution: ``constant_states[i]`` lies left of ``waves[i]``."""

    left_state: State
    waves: tuple[FanWave, ...]
    constant_states: tuple[State, ...]
    boundary_attached: bool = False
    b0: float = 0.0
    strengths: tuple[float, ...] = field(default=())

    @property
    def right_state(self) -> State:
        return self.constant_states[-1]


@dataclass(frozen=True)
class ComparisonReport:
    """Full-system vs limit-system strengths for the same Riemann data."""

    full: tuple[float, ...]
    limit: tuple[float, ...]
    abs_diff: tuple[float, ...]
    ratios: tuple[float, ...] | None
    boundary_ratios: tuple[float, ...] | None
    exact_match: bool
    mu_norm: float


# ---------------------------------------------------------------------------
# interior problem
# ---------------------------------------------------------------------------


def _log_window(p: ModelParams) -> float:
    # Stay strictly inside (delta0, 1/delta0).
    return -math.log(p.delta0) * (1.0 - 1e-12)


def _interior_residual(t: float, rho_l, v_l, v_r, log_r, a, eps, t2, span):
    a1 = math.exp(t)
    a2 = math.exp(log_r - t)
    dv1 = _phi(1, a1, rho_l, v_l, a, eps, t2, span)
    dv2 = _phi(2, a2, rho_l * a1, v_l + dv1, a, eps, t2, span)
    return v_l + dv1 + dv2 - v_r


def _bracketed_root(f, t0: float, lo_lim: float, hi_lim: float, width: float) -> float:
    """Root of the decreasing function ``f`` near ``t0`` inside ``[lo_lim, hi_lim]``."""
    t0 = min(max(t0, lo_lim), hi_lim)
    f0 = f(t0)
    if f0 == 0.0:
        return t0
    w = width
    if f0 > 0.0:  # root to the right
        lo, flo = t0, f0
        while True:
            hi = min(t0 + w, hi_lim)
            fhi = f(hi)
            if fhi <= 0.0:
                break
            if hi >= hi_lim:
                raise SolverError("strength window exhausted while bracketing", last_iterate=hi)
            lo, flo = hi, fhi
            w *= 4.0
    else:  # root to the left
        hi, fhi = t0, f0
        while True:
            lo = max(t0 - w, lo_lim)
            flo = f(lo)
            if flo >= 0.0:
                break
            if lo <= lo_lim:
                raise SolverError("strength window exhausted while bracketing", last_iterate=lo)
            hi, fhi = lo, flo
            w *= 4.0
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    return brentq(f, lo, hi, xtol=_XTOL, rtol=_RTOL, maxiter=200)


def _limit_interior_log_alpha1(U_L: State, U_R: State, a: float, lw: float) -> float:
    """Solve the limit-system interior problem for ``ln alpha_1`` (closed-form curves)."""
    log_r = math.log(U_R.rho / U_L.rho)
    dv_target = U_R.v - U_L.v

    def f(t: float) -> float:
        return _phi(1, math.exp(t), 1.0, 0.0, a, 0.0, 0.0, 0.0) + _phi(
            2, math.exp(log_r - t), 1.0, 0.0, a, 0.0, 0.0, 0.0
        ) - dv_target

    lo_lim = max(-lw, log_r - lw)
    hi_lim = min(lw, log_r + lw)
    if lo_lim >= hi_lim:
        raise StrengthError(f"density ratio {U_R.rho / U_L.rho} outside the strength window")
    return _bracketed_root(f, 0.5 * log_r, lo_lim, hi_lim, 0.25)


def _interior_strengths(U_L: State, U_R: State, p: ModelParams) -> tuple[float, float]:
    a, eps, t2 = p.a_inf, p.epsilon, p.tau2
    if not (U_L.rho > 0.0 and U_R.rho > 0.0):
        raise DomainError("densities must be positive")
    if U_L == U_R:
        return 1.0, 1.0
    lw = _log_window(p)
    log_r = math.log(U_R.rho / U_L.rho)
    t = _limit_interior_log_alpha1(U_L, U_R, a, lw)
    if not p.is_limit:
        span = _v_span(p)
        lo_lim = max(-lw, log_r - lw)
        hi_lim = min(lw, log_r + lw)

        def f(tt: float) -> float:
            return _interior_residual(tt, U_L.rho, U_L.v, U_R.v, log_r, a, eps, t2, span)

        width = 1e-9 + 2.0 * p.mu_norm * (abs(t) + abs(log_r - t) + 1e-3)
        try:
            root = secant_root(f, t, t + width, lo_lim, hi_lim)
            t = root if root is not None else _bracketed_root(f, t, lo_lim, hi_lim, width)
        except SolverError:
            raise
        except (ArithmeticError, ValueError) as exc:
            raise SolverError(f"interior solve failed: {exc}", last_iterate=math.exp(t)) from exc
    t2_log = log_r - t
    a1 = 1.0 if abs(t) < NULL_WAVE_LOG else math.exp(t)
    a2 = 1.0 if abs(t2_log) < NULL_WAVE_LOG else U_R.rho / (U_L.rho * a1)
    if abs(t2_log) >= NULL_WAVE_LOG and abs(math.log(a2)) < NULL_WAVE_LOG:
        a2 = 1.0
    for alpha in (a1, a2):
        if not (p.delta0 < alpha < 1.0 / p.delta0):
            raise StrengthError(f"Riemann strength {alpha} outside the window")
    return a1, a2


def _wave_entry(family: int, alpha: float, left: State, right: State, p: ModelParams) -> FanWave:
    fam = Family(family)
    kind = wave_kind(fam, alpha)
    a, eps, t2 = p.a_inf, p.epsilon, p.tau2
    if kind is Kind.SHOCK:
        s_l, u_l = _s_and_u(left.rho, left.v, a, eps, t2)
        _, mass, mom = _hugoniot_parts(
            left.rho, left.v, right.rho, right.v - left.v, a, eps, t2, s_l, u_l
        )
        sigma = mom / mass
        return FanWave(WaveDescriptor(fam, kind, alpha), sigma, sigma)
    lo = _char_speed(family, left.rho, left.v, a, eps, t2)
    hi = _char_speed(family, right.rho, right.v, a, eps, t2)
    return FanWave(WaveDescriptor(fam, kind, alpha), lo, hi)


def fan_from_strengths(alpha1: float, alpha2: float, U_L: State, p: ModelParams) -> RiemannFan:
    """Assemble the fan of the 1-wave ``alpha1`` and the 2-wave ``alpha2`` issued from ``U_L``."""
    a, eps, t2 = p.a_inf, p.epsilon, p.tau2
    span = _v_span(p)
    u_m = State(U_L.rho * alpha1, U_L.v + _phi(1, alpha1, U_L.rho, U_L.v, a, eps, t2, span))
    u_r = State(u_m.rho * alpha2, u_m.v + _phi(2, alpha2, u_m.rho, u_m.v, a, eps, t2, span))
    waves: list[FanWave] = []
    states = [U_L]
    if alpha1 != 1.0:
        waves.append(_wave_entry(1, alpha1, U_L, u_m, p))
        states.append(u_m)
    if alpha2 != 1.0:
        waves.append(_wave_entry(2, alpha2, u_m, u_r, p))
        states.append(u_r)
    return RiemannFan(U_L, tuple(waves), tuple(states), False, p.b0, (alpha1, alpha2))


def solve_interior(U_L: State, U_R: State, p: ModelParams) -> RiemannFan:
    """Solve the interior Riemann problem ``U_L | U_R``.

    Returns the fan of at most one 1-wave and one 2-wave.  The recomposed
    right state reproduces ``U_R`` up to the root-finder tolerance; the
    last constant state is the recomposed one (not ``U_R`` itself).

    Raises :class:`SolverError` (carrying the last iterate) if no root is
    bracketed and :class:`StrengthError` if a strength leaves the window.
    """
    a1, a2 = _interior_strengths(U_L, U_R, p)
    return fan_from_strengths(a1, a2, U_L, p)


# ---------------------------------------------------------------------------
# boundary problem
# ---------------------------------------------------------------------------


def _boundary_velocity(rho: float, v: float, p: ModelParams) -> float:
    """Velocity prescribed by the boundary condition at the state ``(rho, v)``."""
    if p.tau2 == 0.0:
        return p.b0
    s, _ = _s_and_u(rho, v, p.a_inf, p.epsilon, p.tau2)
    return p.b0 * s


def boundary_residual(U_b: State, p: ModelParams) -> float:
    """``v_b - b0 sqrt(1 - tau2 B(U_b))`` (``v_b - b0`` in the limit system)."""
    return U_b.v - _boundary_velocity(U_b.rho, U_b.v, p)


def _limit_boundary_log_alpha(U_L: State, p: ModelParams) -> float:
    a, b0 = p.a_inf, p.b0
    gap = U_L.v - b0
    if gap == 0.0:
        return 0.0
    if gap < 0.0:  # rarefaction: -ln(alpha)/a = b0 - v_L
        return a * gap
    target = 0.5 * (a * gap) ** 2  # (alpha-1) ln(alpha)/(alpha+1) = a^2 gap^2 / 2

    def f(t: float) -> float:
        al = math.exp(t)
        return target - math.expm1(t) * t / (al + 1.0)

    lw = _log_window(p)
    if f(lw) > 0.0:
        raise BoundarySolverError("boundary shock exceeds the strength window", last_iterate=lw)
    hi = min(lw, max(2.0 * a * gap, 1e-300))
    while f(hi) > 0.0:
        hi = min(2.0 * hi, lw)
    return brentq(f, 0.0, hi, xtol=_XTOL, rtol=_RTOL, maxiter=200)


def _boundary_log_alpha(U_L: State, p: ModelParams) -> float:
    t = _limit_boundary_log_alpha(U_L, p.limit())
    if p.is_limit:
        return t
    a, eps, t2 = p.a_inf, p.epsilon, p.tau2
    span = _v_span(p)

    def f(tt: float) -> float:
        al = math.exp(tt)
        dv = _phi(1, al, U_L.rho, U_L.v, a, eps, t2, span)
        return U_L.v + dv - _boundary_velocity(U_L.rho * al, U_L.v + dv, p)

    lw = _log_window(p)
    width = 1e-9 + 2.0 * p.mu_norm * (abs(t) + abs(p.b0) + 1e-3)
    try:
        root = secant_root(f, t, t + width, -lw, lw)
        return root if root is not None else _bracketed_root(f, t, -lw, lw, width)
    except SolverError as exc:
        raise BoundarySolverError(str(exc), last_iterate=exc.last_iterate) from exc
    except (ArithmeticError, ValueError) as exc:
        raise BoundarySolverError(f"boundary solve failed: {exc}", last_iterate=t) from exc


def solve_boundary(U_L: State, p: ModelParams) -> RiemannFan:
    """Solve the boundary Riemann problem for the state ``U_L`` adjacent to the wedge.

    A single family-One wave connects ``U_L`` to a state satisfying the
    boundary condition.  In the limit system with ``v_L <= b0`` the strength
    is ``exp(a (v_L - b0))`` exactly.
    """
    t = _boundary_log_alpha(U_L, p)
    alpha = 1.0 if abs(t) < NULL_WAVE_LOG else math.exp(t)
    if not (p.delta0 < alpha < 1.0 / p.delta0):
        raise StrengthError(f"boundary strength {alpha} outside the window")
    if alpha == 1.0:
        return RiemannFan(U_L, (), (U_L,), True, p.b0, (1.0,))
    a, eps, t2 = p.a_inf, p.epsilon, p.tau2
    dv = _phi(1, alpha, U_L.rho, U_L.v, a, eps, t2, _v_span(p))
    u_b = State(U_L.rho * alpha, U_L.v + dv)
    if p.is_limit and U_L.v <= p.b0:
        # closed form: the boundary velocity is exactly b0
        u_b = State(u_b.rho, p.b0)
    wave = _wave_entry(1, alpha, U_L, u_b, p)
    return RiemannFan(U_L, (wave,), (U_L, u_b), True, p.b0, (alpha,))


# ---------------------------------------------------------------------------
# sampling and comparison
# ---------------------------------------------------------------------------


def _rarefaction_state_at(fw: FanWave, left: State, xi: float, p: ModelParams) -> State:
    fam = int(fw.wave.family)
    a, eps, t2 = p.a_inf, p.epsilon, p.tau2
    span = _v_span(p)
    t_end = math.log(fw.wave.alpha)

    def state(t: float) -> State:
        al = math.exp(t)
        return State(left.rho * al, left.v + _phi(fam, al, left.rho, left.v, a, eps, t2, span))

    def g(t: float) -> float:
        s = state(t)
        return _char_speed(fam, s.rho, s.v, a, eps, t2) - xi

    lo, hi = (0.0, t_end) if t_end > 0.0 else (t_end, 0.0)
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return state(lo)
    if ghi == 0.0:
        return state(hi)
    if glo * ghi > 0.0:
        return state(lo if abs(glo) < abs(ghi) else hi)
    return state(brentq(g, lo, hi, xtol=1e-16, rtol=_RTOL, maxiter=200))


def sample_fan(fan: RiemannFan, xi: float, p: ModelParams) -> State:
    """State of the self-similar solution at ``xi = (y - y0)/(x - x0)``.

    At a shock location the right state is returned.  Inside a rarefaction
    sector the state on the integral curve with ``lambda_k = xi`` is returned.
    """
    if fan.boundary_attached and xi > fan.b0:
        raise DomainError(f"xi={xi} lies outside the wedge (b0={fan.b0})")
    for i, fw in enumerate(fan.waves):
        if xi < fw.xi_lo:
            return fan.constant_states[i]
        if fw.wave.kind is Kind.RAREFACTION and xi < fw.xi_hi:
            return _rarefaction_state_at(fw, fan.constant_states[i], xi, p)
    return fan.constant_states[-1]


def _report(full: tuple[float, ...], limit: tuple[float, ...], mu: float,
            boundary: bool) -> ComparisonReport:
    diff = tuple(abs(b - a) for a, b in zip(full, limit))
    if mu == 0.0:
        return ComparisonReport(full, limit, diff, None, None, True, mu)
    ratios = tuple(
        d / (abs(a - 1.0) * mu) if a != 1.0 else math.inf if d > 0.0 else 0.0
        for d, a in zip(diff, full)
    )
    bratios = None
    if boundary:
        bratios = tuple(d / ((1.0 + abs(full[0] - 1.0)) * mu) for d in diff)
    return ComparisonReport(full, limit, diff, ratios, bratios, False, mu)


def compare_strengths(U_L: State, U_R: State, p_full: ModelParams) -> ComparisonReport:
    """Solve ``U_L | U_R`` in both systems and report strength differences.

    Ratios are ``|limit - full| / (|full - 1| ||mu||)``; at ``mu = 0`` they are
    replaced by the ``exact_match`` flag.
    """
    full = _interior_strengths(U_L, U_R, p_full)
    limit = _interior_strengths(U_L, U_R, p_full.limit())
    return _report(full, limit, p_full.mu_norm, False)


def compare_boundary_strengths(U_L: State, p_full: ModelParams) -> ComparisonReport:
    """Boundary analogue of :func:`compare_strengths` (ratios also per ``(1+|alpha_1-1|)||mu||``)."""
    full = solve_boundary(U_L, p_full).strengths
    limit = solve_boundary(U_L, p_full.limit()).strengths
    return _report(full, limit, p_full.mu_norm, True)
