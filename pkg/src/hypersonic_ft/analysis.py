"""L1 distances, rate fits and the convergence experiments.

* :func:`l1_distance` integrates ``|rho_a - rho_b| + |v_a - v_b|`` exactly
  over an interval by a merged-breakpoint sweep.
* :func:`fit_rate` fits ``error ~ c * abscissa^slope`` on a log-log scale.
* :func:`optimal_rate_experiment` measures the leading coefficients of the
  full-vs-limit L1 distance for the boundary Riemann problem
  ``U_L = (1, delta)``, ``b0 = 0`` whose solutions are a single 1-shock each,
  so the distance is available in closed form.
* :func:`global_rate_experiment` compares full-system front tracking with the
  limit-system reference operator on general data.
* :func:`psi`, :func:`u_error` and :func:`asymptotic_checks` cover the
  velocity recovery and the small-``delta`` asymptotics.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .front_tracking import Profile, SchemeParams, TrackedSolution, diagnostics
from .riemann import solve_boundary
from .wave_curves import (
    Family,
    ModelParams,
    State,
    _bernoulli,
    _pow_m1,
    _s_and_u,
    phi_value,
)

#: Column order of every results table.
CSV_COLUMNS = (
    "a_inf", "epsilon", "tau2", "b0", "delta", "nu", "x",
    "l1_error", "u_error", "tv", "np_strength", "runtime_ms",
)


# ---------------------------------------------------------------------------
# L1 distance
# ---------------------------------------------------------------------------


def _value_index(bps: tuple[float, ...], y: float) -> int:
    return int(np.searchsorted(bps, y, side="right"))


def _pointwise(ua: State, ub: State, euclidean: bool) -> float:
    dr, dv = ua.rho - ub.rho, ua.v - ub.v
    if euclidean:
        return math.hypot(dr, dv)
    return abs(dr) + abs(dv)


def l1_distance(
    a: Profile,
    b: Profile,
    interval: tuple[float, float],
    euclidean: bool = False,
) -> float:
    """Exact ``int |U_a - U_b|`` over ``interval`` for two step functions.

    The pointwise norm is ``|d rho| + |d v|`` (or the Euclidean norm with
    ``euclidean=True``).  An infinite left endpoint is allowed when both
    profiles share the same far-field state; the integral then runs over the
    hull of the breakpoints, and a mismatch raises :class:`DomainError`.
    """
    lo, hi = interval
    if not lo <= hi:
        raise DomainError(f"empty interval {interval}")
    if lo == hi:
        return 0.0
    if math.isinf(hi):
        raise DomainError("the right endpoint must be finite")
    if math.isinf(lo):
        if _pointwise(a.values[0], b.values[0], euclidean) != 0.0:
            raise DomainError("divergent integral: the far-field states differ")
        pts = [y for y in a.breakpoints + b.breakpoints if y < hi]
        if not pts:
            return 0.0
        lo = min(pts)
    cuts = sorted({lo, hi, *(y for y in a.breakpoints if lo < y < hi),
                   *(y for y in b.breakpoints if lo < y < hi)})
    ia = _value_index(a.breakpoints, lo)
    ib = _value_index(b.breakpoints, lo)
    na, nb = len(a.breakpoints), len(b.breakpoints)
    terms = []
    for y0, y1 in zip(cuts, cuts[1:]):
        # advance the indices to the piece containing (y0, y1)
        while ia < na and a.breakpoints[ia] <= y0:
            ia += 1
        while ib < nb and b.breakpoints[ib] <= y0:
            ib += 1
        d = _pointwise(a.values[ia], b.values[ib], euclidean)
        if d:
            terms.append((y1 - y0) * d)
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# rate fits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateFit:
    """Log-log least-squares fit ``error ~ exp(intercept) * abscissa^slope``.

    ``leading_coefficient`` is ``error / (abscissa * scale)`` at the smallest
    abscissa (``scale`` normalises e.g. by ``delta * x``).
    """

    abscissae: tuple[float, ...]
    errors: tuple[float, ...]
    slope: float
    intercept: float
    r2: float
    leading_coefficient: float
    scale: float = 1.0

    def summary(self, label: str = "") -> str:
        head = f"[{label}]\n" if label else ""
        return (
            f"{head}slope={self.slope!r}\nintercept={self.intercept!r}\n"
            f"r2={self.r2!r}\nleading_coefficient={self.leading_coefficient!r}\n"
        )


def fit_rate(
    abscissae: Sequence[float],
    errors: Sequence[float],
    window: int = 3,
    coef_window: int = 1,
    scale: float = 1.0,
) -> RateFit:
    """Fit the exponent on the ``window`` smallest abscissae.

    The leading coefficient is the mean of ``error / (abscissa * scale)`` over
    the ``coef_window`` smallest abscissae.
    """
    pairs = sorted(zip(abscissae, errors))
    if not pairs:
        raise DomainError("no data to fit")
    if any(x <= 0.0 for x, _ in pairs):
        raise DomainError("abscissae must be strictly positive")
    xs = tuple(x for x, _ in pairs)
    es = tuple(e for _, e in pairs)
    if any(x1 <= x0 for x0, x1 in zip(xs, xs[1:])):
        raise DomainError("abscissae must be distinct")
    coef = float(np.mean([e / (x * scale) for x, e in pairs[:coef_window]]))
    sel = pairs[:window]
    if len(sel) < 2 or any(e <= 0.0 for _, e in sel):
        return RateFit(xs, es, math.nan, math.nan, math.nan, coef, scale)
    lx = np.log([x for x, _ in sel])
    le = np.log([e for _, e in sel])
    slope, intercept = np.polyfit(lx, le, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((le - pred) ** 2))
    ss_tot = float(np.sum((le - le.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return RateFit(xs, es, float(slope), float(intercept), r2, coef, scale)


# ---------------------------------------------------------------------------
# optimal-rate example: boundary Riemann problem with a single 1-shock
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OptimalRateCell:
    """One ``mu`` of the optimal-rate example."""

    epsilon: float
    tau2: float
    alpha1: float  # limit-system strength
    beta1: float  # full-system strength
    sigma_limit: float
    sigma_full: float
    l1_error: float
    l1_error_sampled: float
    u_error: float  # over the wave region (min shock position, 0)
    runtime_ms: float


@dataclass(frozen=True)
class OptimalRateResult:
    a_inf: float
    delta: float
    x: float
    eps_cells: tuple[OptimalRateCell, ...]
    tau2_cells: tuple[OptimalRateCell, ...]
    eps_fit: RateFit
    tau2_fit: RateFit

    def rows(self) -> list[dict]:
        out = []
        for c in self.eps_cells + self.tau2_cells:
            out.append({
                "a_inf": self.a_inf, "epsilon": c.epsilon, "tau2": c.tau2, "b0": 0.0,
                "delta": self.delta, "nu": "", "x": self.x, "l1_error": c.l1_error,
                "u_error": c.u_error, "tv": "", "np_strength": "", "runtime_ms": c.runtime_ms,
            })
        return out


def _single_shock_profiles(U_L: State, p: ModelParams, x: float) -> tuple[Profile, float, State]:
    fan = solve_boundary(U_L, p)
    u_b = fan.right_state
    if not fan.waves:
        return Profile(x, (), (U_L,)), 0.0, u_b
    sigma = fan.waves[0].xi_lo
    return Profile(x, (sigma * x,), (U_L, u_b)), sigma, u_b


def _u_jump(a: State, b: State, pa: ModelParams, pb: ModelParams) -> float:
    return abs(_s_and_u(a.rho, a.v, pa.a_inf, pa.epsilon, pa.tau2)[1]
               - _s_and_u(b.rho, b.v, pb.a_inf, pb.epsilon, pb.tau2)[1])


def optimal_rate_cell(a_inf: float, delta: float, epsilon: float, tau2: float,
                      x: float) -> OptimalRateCell:
    """Exact L1 distance at ``x`` between the full and limit boundary solutions.

    Both solutions are ``U_L`` left of their shock and the boundary state
    right of it.  With shock positions ``s_f x``, ``s_l x`` the distance is
    ``|s_f - s_l| x |U_L - U_behind| + (0 - max(s_f, s_l) x) |U_b,full - U_b,limit|``,
    where ``U_behind`` is the post-shock state of the slower shock.
    """
    t0 = time.perf_counter()
    U_L = State(1.0, delta)
    p_full = ModelParams(a_inf, epsilon, tau2, 0.0)
    p_lim = p_full.limit()
    prof_f, sig_f, ub_f = _single_shock_profiles(U_L, p_full, x)
    prof_l, sig_l, ub_l = _single_shock_profiles(U_L, p_lim, x)
    lo_sig, hi_sig = min(sig_f, sig_l), max(sig_f, sig_l)
    behind = ub_f if sig_f < sig_l else ub_l
    gap_b = abs(ub_f.rho - ub_l.rho) + abs(ub_f.v - ub_l.v)
    err = (hi_sig - lo_sig) * x * (abs(behind.rho - U_L.rho) + abs(behind.v - U_L.v)) \
        + (-hi_sig * x) * gap_b
    # second route: generic sweep over the sampled self-similar solutions
    sampled = l1_distance(prof_f, prof_l, (lo_sig * x - 1.0, 0.0))
    # velocity recovery error on the wave region (lo_sig x, 0): the constant
    # state U_L has u^mu(U_L) != u(U_L), so the half-line integral diverges
    if sig_f < sig_l:
        u_behind = _u_jump(ub_f, U_L, p_full, p_lim)
    else:
        u_behind = _u_jump(U_L, ub_l, p_full, p_lim)
    u_err = (hi_sig - lo_sig) * x * u_behind + (-hi_sig * x) * _u_jump(ub_f, ub_l, p_full, p_lim)
    fan_f = solve_boundary(U_L, p_full)
    fan_l = solve_boundary(U_L, p_lim)
    dt = (time.perf_counter() - t0) * 1e3
    return OptimalRateCell(epsilon, tau2, fan_l.strengths[0], fan_f.strengths[0],
                           sig_l, sig_f, err, sampled, u_err, dt)


def optimal_rate_experiment(
    a_inf: float,
    delta: float,
    eps_list: Sequence[float],
    tau2_list: Sequence[float],
    x: float = 1.0,
) -> OptimalRateResult:
    """Leading coefficients of ``||U^mu(x) - U(x)||_{L1} / (param * delta * x)``.

    The epsilon sweep runs at ``tau2 = 0`` and the tau2 sweep at
    ``epsilon = 0``; each returns a :class:`RateFit` whose
    ``leading_coefficient`` is taken at the smallest parameter.
    """
    eps_cells = tuple(optimal_rate_cell(a_inf, delta, e, 0.0, x) for e in eps_list)
    tau_cells = tuple(optimal_rate_cell(a_inf, delta, 0.0, t, x) for t in tau2_list)
    eps_fit = fit_rate([c.epsilon for c in eps_cells if c.epsilon > 0.0],
                       [c.l1_error for c in eps_cells if c.epsilon > 0.0], scale=delta * x)
    tau_fit = fit_rate([c.tau2 for c in tau_cells if c.tau2 > 0.0],
                       [c.l1_error for c in tau_cells if c.tau2 > 0.0], scale=delta * x)
    return OptimalRateResult(a_inf, delta, x, eps_cells, tau_cells, eps_fit, tau_fit)


def published_coefficients(a_inf: float) -> tuple[float, float]:
    """Published leading coefficients ``((2a+1)/(8a), (2a+1)/(2a^3))`` for comparison."""
    return (2.0 * a_inf + 1.0) / (8.0 * a_inf), (2.0 * a_inf + 1.0) / (2.0 * a_inf ** 3)


def optimal_rate_expansion(a_inf: float, delta: float) -> tuple[float, float]:
    """First-order (in ``mu``) coefficients of the optimal-rate L1 error, by central differences.

    Returns ``(d err/d eps, d err/d tau2) / (delta x)`` at ``mu = 0``, computed
    from :func:`optimal_rate_cell` with small steps; used to explain the
    measured leading coefficients independently of any fit window.
    """
    h = 1e-6
    e1 = optimal_rate_cell(a_inf, delta, h, 0.0, 1.0).l1_error
    t1 = optimal_rate_cell(a_inf, delta, 0.0, h, 1.0).l1_error
    return e1 / (h * delta), t1 / (h * delta)


# ---------------------------------------------------------------------------
# global rate experiment
# ---------------------------------------------------------------------------


@dataclass
class GlobalRateResult:
    """Rows of the global experiment with the two rate fits."""

    rows: list[dict]
    mu_fit: RateFit
    x_fit: RateFit
    floor: dict[float, float]
    floor_flags: list[bool]
    fit_x: float
    fit_mu: float
    trajectories: dict = field(default_factory=dict, repr=False)


def global_rate_experiment(
    U0: Profile,
    p_grid: Sequence[ModelParams],
    x_list: Sequence[float],
    sp: SchemeParams,
    nu_ref: int | None = None,
    fit_x: float | None = None,
    fit_mu: float | None = None,
    keep_trajectories: bool = False,
) -> GlobalRateResult:
    """Full-system front tracking vs. the limit reference operator.

    For every ``p`` in ``p_grid`` (all sharing ``a_inf`` and ``b0``) the full
    system is tracked at ``sp.nu`` and compared at each ``x`` in ``x_list``
    with ``S_x U0`` computed at ``nu_ref`` (default ``sp.nu + 4``).  The
    ``mu = 0`` run at ``sp.nu`` defines the resolution floor; rows within 10x
    of it are flagged.  Errors are fitted against ``||mu||`` at ``fit_x``
    (default: the largest ``x``) and against ``x`` at ``fit_mu`` (default:
    the largest ``||mu||``).
    """
    from .semigroup import NU_REF_OFFSET, profile_l1, semigroup_apply

    if not p_grid:
        raise DomainError("empty parameter grid")
    base = p_grid[0]
    nu_ref = nu_ref if nu_ref is not None else sp.nu + NU_REF_OFFSET
    xs = sorted(x_list)
    refs = {x: semigroup_apply(U0, x - U0.x, nu_ref, base) for x in xs}
    limit_grid = [base.limit()] + [p for p in p_grid if not p.is_limit]
    rows: list[dict] = []
    errors: dict[tuple[float, float], float] = {}
    trajectories = {}
    for p in limit_grid:
        t0 = time.perf_counter()
        traj = TrackedSolution(U0, p, sp)
        for x in xs:
            prof = traj(x)
            err = profile_l1(prof, refs[x], p.b0)
            uerr = u_error(prof, refs[x], p)
            d = diagnostics(prof)
            errors[(p.mu_norm, x)] = err
            rows.append({
                "a_inf": p.a_inf, "epsilon": p.epsilon, "tau2": p.tau2, "b0": p.b0,
                "delta": "", "nu": sp.nu, "x": x, "l1_error": err, "u_error": uerr,
                "tv": d["tv"], "np_strength": d["np_total_strength"],
                "runtime_ms": (time.perf_counter() - t0) * 1e3,
            })
        if keep_trajectories:
            trajectories[p.mu_norm] = traj
    floor = {x: errors[(0.0, x)] for x in xs}
    flags = [r["l1_error"] <= 10.0 * floor[r["x"]] for r in rows]
    mus = sorted({p.mu_norm for p in p_grid if not p.is_limit})
    fit_x = fit_x if fit_x is not None else xs[-1]
    fit_mu = fit_mu if fit_mu is not None else mus[-1]
    mu_fit = fit_rate(mus, [errors[(m, fit_x)] for m in mus], window=len(mus))
    x_fit = fit_rate(xs, [errors[(fit_mu, x)] for x in xs], window=len(xs))
    return GlobalRateResult(rows, mu_fit, x_fit, floor, flags, fit_x, fit_mu, trajectories)


# ---------------------------------------------------------------------------
# velocity recovery
# ---------------------------------------------------------------------------


def psi(s: State, p: ModelParams) -> float:
    """``B / (sqrt(1 - tau2 B) + 1)``; equals ``v^2/2 + ln(rho)/a^2`` at ``mu = 0``.

    ``u_from_state(s, p) == -psi(s, p)`` holds identically.
    """
    if p.is_limit:
        if not s.rho > 0.0:
            raise DomainError(f"density must be positive, got {s.rho}")
        return 0.5 * s.v * s.v + math.log(s.rho) / (p.a_inf * p.a_inf)
    return -_s_and_u(s.rho, s.v, p.a_inf, p.epsilon, p.tau2)[1]


def u_error(full: Profile, limit: Profile, p: ModelParams,
            interval: tuple[float, float] | None = None) -> float:
    """``int |u^mu(U^mu) - u(U)| dy`` with ``u^mu = -psi(., p)`` and ``u = -psi(., limit)``.

    ``interval`` defaults to ``(-inf, b0 x)``.
    """
    if interval is None:
        interval = (-math.inf, p.b0 * full.x)
    lim = p.limit()
    uf = Profile(full.x, full.breakpoints, tuple(State(psi(s, p), 0.0) for s in full.values))
    ul = Profile(limit.x, limit.breakpoints, tuple(State(psi(s, lim), 0.0) for s in limit.values))
    return l1_distance(uf, ul, interval)


# ---------------------------------------------------------------------------
# small-delta asymptotics of the optimal-rate configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticLevel:
    delta: float
    epsilon: float
    tau2: float
    beta1: float
    strength_defect: float
    bernoulli_defect: float
    curve_defect: float


@dataclass(frozen=True)
class AsymptoticReport:
    a_inf: float
    levels: tuple[AsymptoticLevel, ...]
    slopes: dict[str, float]

    def all_linear(self, lo: float = 0.9, hi: float = 1.1) -> bool:
        return all(lo <= s <= hi for s in self.slopes.values())


def asymptotic_checks(
    a_inf: float,
    delta_ladder: Sequence[float],
    mu_ladder: Sequence[float],
) -> AsymptoticReport:
    """Normalised defects of the boundary configuration ``U_L = (1, delta)``, ``b0 = 0``.

    At each level ``(delta, mu)`` with ``epsilon = tau2 = mu``:

    * ``strength_defect = ((beta1^eps - 1)/eps - a delta)/delta`` (``ln beta1``
      at ``eps = 0``), ``beta1`` the full-system boundary strength;
    * ``bernoulli_defect = (B(U_b) - 2 delta/a)/delta`` at the full boundary
      state ``U_b``;
    * ``curve_defect = (phi_1^mu(alpha1; U_L) + delta)/delta`` with ``alpha1``
      the limit-system boundary strength (``phi_1^mu(beta1) + delta`` vanishes
      identically when ``b0 = 0``, so the full curve is probed at the limit
      strength instead).

    Each should vanish linearly in ``delta + epsilon + tau2``; the slopes of
    ``log |defect|`` against ``log(delta + 2 mu)`` are reported.
    """
    if len(delta_ladder) != len(mu_ladder):
        raise DomainError("delta and mu ladders must have equal length")
    levels = []
    for delta, mu in zip(delta_ladder, mu_ladder):
        p = ModelParams(a_inf, mu, mu, 0.0)
        U_L = State(1.0, delta)
        fan = solve_boundary(U_L, p)
        beta1 = fan.strengths[0]
        u_b = fan.right_state
        strength_defect = (_pow_m1(beta1, mu) - a_inf * delta) / delta
        bern = _bernoulli(u_b.rho, u_b.v, a_inf, mu)
        bernoulli_defect = (bern - 2.0 * delta / a_inf) / delta
        alpha1 = solve_boundary(U_L, p.limit()).strengths[0]
        curve_defect = (phi_value(Family.ONE, alpha1, U_L, p) + delta) / delta
        levels.append(AsymptoticLevel(delta, mu, mu, beta1, strength_defect,
                                      bernoulli_defect, curve_defect))
    scale = [lv.delta + lv.epsilon + lv.tau2 for lv in levels]
    slopes = {}
    for name in ("strength_defect", "bernoulli_defect", "curve_defect"):
        vals = [abs(getattr(lv, name)) for lv in levels]
        if len(vals) >= 2 and all(v > 0.0 for v in vals):
            slopes[name] = float(np.polyfit(np.log(scale), np.log(vals), 1)[0])
        else:
            slopes[name] = math.nan
    return AsymptoticReport(a_inf, tuple(levels), slopes)


__all__ = [
    "CSV_COLUMNS",
    "GlobalRateResult",
    "OptimalRateCell",
    "OptimalRateResult",
    "RateFit",
    "AsymptoticReport",
    "asymptotic_checks",
    "fit_rate",
    "global_rate_experiment",
    "l1_distance",
    "optimal_rate_cell",
    "optimal_rate_experiment",
    "optimal_rate_expansion",
    "published_coefficients",
    "psi",
    "u_error",
]
