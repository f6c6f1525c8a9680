"""Bernoulli closure, eigenstructure and elementary wave curves.

Two 2x2 systems of conservation laws in the ``(x, y)`` plane are covered,
with ``x`` playing the role of time:

* the *full* system ``(rho s)_x + (rho v)_y = 0``, ``v_x - u_y = 0`` where
  ``s = sqrt(1 - tau2 B)``, ``u = (s - 1)/tau2`` and
  ``B = 2 (rho^eps - 1)/(a^2 eps) + v^2`` (Bernoulli quantity), and
* the *limit* system ``rho_x + (rho v)_y = 0``,
  ``v_x + (v^2/2 + ln(rho)/a^2)_y = 0`` obtained when ``eps = tau2 = 0``.

All functions are pure.  The limit system is a first-class branch: whenever
``eps + tau2 == 0`` closed forms are used, so limit-system quantities are
exact up to rounding.

Wave strength is the density ratio ``alpha = rho_right / rho_left``.
Family One: shock for ``alpha > 1``, rarefaction for ``alpha < 1``.
Family Two: shock for ``alpha < 1``, rarefaction for ``alpha > 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import (
    CavitationError,
    CurveDomainError,
    DegeneracyError,
    DomainError,
    IntegrationError,
    InvalidShockError,
    StrengthError,
)

#: Below this value of ``eps * |ln rho|`` the power ``(rho^eps - 1)/eps`` is
#: evaluated by its Taylor series around ``eps = 0``.
EPS_SWITCH = 1e-12

#: Absolute / relative tolerances for the Hugoniot root finder.
SHOCK_XTOL = 1e-18
SHOCK_RTOL = 8.9e-16



class Family(enum.IntEnum):
    """Characteristic family of an elementary wave."""

    ONE = 1
    TWO = 2


class Kind(enum.Enum):
    """Kind of an elementary wave."""

    SHOCK = "shock"
    RAREFACTION = "rarefaction"


class State(NamedTuple):
    """Point ``(rho, v)`` of the state space of both systems."""

    rho: float
    v: float


@dataclass(frozen=True)
class DomainBounds:
    """Box ``rho in (rho_lo, rho_hi)``, ``|v| < v_max`` of admissible states."""

    rho_lo: float = 0.05
    rho_hi: float = 20.0
    v_max: float = 3.0

    def __post_init__(self) -> None:
        if not (0.0 < self.rho_lo < self.rho_hi):
            raise DomainError(f"need 0 < rho_lo < rho_hi, got {self.rho_lo}, {self.rho_hi}")
        if not self.v_max > 0.0:
            raise DomainError(f"need v_max > 0, got {self.v_max}")

    def contains(self, s: State) -> bool:
        return self.rho_lo <= s.rho <= self.rho_hi and abs(s.v) <= self.v_max


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the full system; ``epsilon = tau2 = 0`` is the limit system.

    ``epsilon`` is ``gamma - 1``, ``tau2`` is the squared thickness ratio,
    ``a_inf`` the hypersonic similarity parameter and ``b0 <= 0`` the slope of
    the wedge boundary ``y = b0 x`` (the flow occupies ``y < b0 x``).
    """

    a_inf: float = 1.0
    epsilon: float = 0.0
    tau2: float = 0.0
    b0: float = 0.0
    bounds: DomainBounds = field(default_factory=DomainBounds)
    delta0: float = 0.05

    def __post_init__(self) -> None:
        if not self.a_inf > 0.0:
            raise DomainError(f"a_inf must be positive, got {self.a_inf}")
        if not self.epsilon >= 0.0:
            raise DomainError(f"epsilon must be non-negative, got {self.epsilon}")
        if not self.tau2 >= 0.0:
            raise DomainError(f"tau2 must be non-negative, got {self.tau2}")
        if not self.b0 <= 0.0:
            raise DomainError(f"b0 must be non-positive, got {self.b0}")
        if not 0.0 < self.delta0 < 0.5:
            raise DomainError(f"delta0 must lie in (0, 1/2), got {self.delta0}")

    @property
    def mu_norm(self) -> float:
        return self.epsilon + self.tau2

    @property
    def is_limit(self) -> bool:
        return self.epsilon + self.tau2 == 0.0

    def limit(self) -> ModelParams:
        """The same configuration with ``epsilon = tau2 = 0``."""
        return ModelParams(self.a_inf, 0.0, 0.0, self.b0, self.bounds, self.delta0)

    def with_mu(self, epsilon: float, tau2: float) -> ModelParams:
        return ModelParams(self.a_inf, epsilon, tau2, self.b0, self.bounds, self.delta0)


@dataclass(frozen=True)
class WaveDescriptor:
    """An elementary wave: family, kind and density-ratio strength."""

    family: Family
    kind: Kind
    alpha: float

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise StrengthError(f"strength must be positive, got {self.alpha}")
        if self.alpha != 1.0 and self.kind is not wave_kind(self.family, self.alpha):
            raise StrengthError(
                f"family {self.family.name} {self.kind.value} incompatible with alpha={self.alpha}"
            )


def wave_kind(family: Family, alpha: float) -> Kind:
    """Kind of the family-``family`` wave of strength ``alpha`` (``alpha = 1`` -> shock)."""
    if family is Family.ONE:
        return Kind.SHOCK if alpha >= 1.0 else Kind.RAREFACTION
    return Kind.SHOCK if alpha <= 1.0 else Kind.RAREFACTION


# ---------------------------------------------------------------------------
# scalar kernels (plain floats, used by the hot loops)
# ---------------------------------------------------------------------------


def _pow_m1(rho: float, eps: float) -> float:
    """``(rho^eps - 1)/eps`` with the analytic limit ``ln rho`` at ``eps = 0``."""
    lr = math.log(rho)
    x = eps * lr
    if abs(x) < EPS_SWITCH:
        return lr * (1.0 + 0.5 * x * (1.0 + x / 3.0))
    return math.expm1(x) / eps


def _bernoulli(rho: float, v: float, a: float, eps: float) -> float:
    if not rho > 0.0:
        raise DomainError(f"density must be positive, got {rho}")
    return 2.0 * _pow_m1(rho, eps) / (a * a) + v * v


def _s_and_u(rho: float, v: float, a: float, eps: float, t2: float) -> tuple[float, float]:
    """Return ``(s, u)`` with ``s = sqrt(1 - t2 B)`` and ``u = (s - 1)/t2``."""
    b = _bernoulli(rho, v, a, eps)
    arg = 1.0 - t2 * b
    if not arg > 0.0:
        raise CavitationError(f"1 - tau2*B = {arg} <= 0 at rho={rho}, v={v}")
    s = math.sqrt(arg)
    return s, -b / (1.0 + s)


def _eigen_parts(rho: float, v: float, a: float, eps: float, t2: float):
    """Return ``(s, rho^eps, sqrt(disc), den)`` for the eigenvalue formula."""
    s, _ = _s_and_u(rho, v, a, eps, t2)
    reps = math.exp(eps * math.log(rho))
    disc = a * a - t2 * (reps + 2.0 * _pow_m1(rho, eps))
    if not disc > 0.0:
        raise DegeneracyError("hyperbolicity lost: non-positive discriminant", disc)
    b = _bernoulli(rho, v, a, eps)
    den = a * a - t2 * (a * a * b + reps)
    if not den > 0.0:
        raise DegeneracyError("hyperbolicity lost: non-positive denominator", den)
    return s, reps, math.sqrt(disc), den


def _eigenvalues(rho: float, v: float, a: float, eps: float, t2: float) -> tuple[float, float]:
    if eps == 0.0 and t2 == 0.0:
        if not rho > 0.0:
            raise DomainError(f"density must be positive, got {rho}")
        return v - 1.0 / a, v + 1.0 / a
    s, reps, sq, den = _eigen_parts(rho, v, a, eps, t2)
    num0 = a * a * v * s
    half = math.sqrt(reps) * sq
    return (num0 - half) / den, (num0 + half) / den


def _char_speed(family: int, rho: float, v: float, a: float, eps: float, t2: float) -> float:
    lam = _eigenvalues(rho, v, a, eps, t2)
    return lam[0] if family == 1 else lam[1]


def _rarefaction_rhs(family: int, t: float, v: float, a: float, eps: float, t2: float) -> float:
    """``dv/d(ln rho)`` along the family-``family`` integral curve, at ``t = ln rho``.

    Uses ``s lambda_k - v = (v t2 rho^eps -+ s rho^(eps/2) sqrt(disc)) / den``,
    which is free of cancellation.
    """
    x = eps * t
    if abs(x) < EPS_SWITCH:
        pm1 = t * (1.0 + 0.5 * x * (1.0 + x / 3.0))
        reps = math.exp(x)
    else:
        em = math.expm1(x)
        pm1 = em / eps
        reps = 1.0 + em
    a2 = a * a
    b = 2.0 * pm1 / a2 + v * v
    arg = 1.0 - t2 * b
    if not arg > 0.0:
        raise CavitationError(f"1 - tau2*B = {arg} <= 0 along a rarefaction curve")
    disc = a2 - t2 * (reps + 2.0 * pm1)
    den = a2 - t2 * (a2 * b + reps)
    if not (disc > 0.0 and den > 0.0):
        raise DegeneracyError("hyperbolicity lost along a rarefaction curve", min(disc, den))
    root = math.sqrt(arg) * math.sqrt(reps * disc)
    q = v * t2 * reps + (root if family == 2 else -root)
    return reps * den / (a2 * q)


def _gauss_collocation(n: int) -> tuple[tuple[float, ...], tuple[float, ...], tuple[tuple[float, ...], ...]]:
    """Gauss-Legendre nodes/weights on ``[0, 1]`` and the collocation integration matrix.

    ``S[i][j] = int_0^{c_i} L_j(s) ds`` for the Lagrange basis ``L_j`` on the nodes.
    """
    xs, ws = np.polynomial.legendre.leggauss(n)
    c = 0.5 * (xs + 1.0)
    w = 0.5 * ws
    vander = np.vander(c, n, increasing=True)  # vander[i, k] = c_i^k
    coef = np.linalg.inv(vander)  # column j: monomial coefficients of L_j
    powers = np.arange(1, n + 1)
    integ = (c[:, None] ** powers[None, :]) / powers[None, :]  # int_0^{c_i} s^k ds
    smat = integ @ coef
    return tuple(c), tuple(w), tuple(tuple(row) for row in smat)


#: Collocation rules keyed by node count; short panels use fewer nodes.
_GL_RULES = {n: _gauss_collocation(n) for n in (3, 4, 5, 6, 8)}
_GL_RULES_NP = {n: (np.array(r[0]), np.array(r[1]), np.array(r[2])) for n, r in _GL_RULES.items()}
_GL_MAX_PANEL = 0.75  # panel length in ln(rho)
_GL_MAX_ITER = 60


def _nodes_for(h: float) -> int:
    ah = abs(h)
    if ah <= 0.01:
        return 3
    if ah <= 0.03:
        return 4
    if ah <= 0.06:
        return 5
    if ah <= 0.25:
        return 6
    return 8


def _integrate_rarefaction(
    family: int, t0: float, t1: float, v0: float, a: float, eps: float, t2: float
) -> float:
    """Integrate ``dv/dt`` from ``t0`` to ``t1`` (``t = ln rho``).

    Gauss-Legendre collocation per panel (3-8 nodes depending on the panel
    length; order 6-16), solved by Picard iteration.  The right-hand side
    depends on ``v`` only through ``O(tau2)`` terms, so the iteration
    contracts at rate ``O(tau2 |t1 - t0|)``.
    """
    span = t1 - t0
    if span == 0.0:
        return v0
    panels = max(1, math.ceil(abs(span) / _GL_MAX_PANEL))
    h = span / panels
    nodes, weights, smat = _GL_RULES_NP[_nodes_for(h)]
    n = len(nodes)
    v = v0
    for k in range(panels):
        ta = t0 + k * h
        ts = (ta + h * nodes).tolist()
        f0 = _rarefaction_rhs(family, ta, v, a, eps, t2)
        vs = (v + (h * f0) * nodes).tolist()
        fs = np.array([_rarefaction_rhs(family, ts[i], vs[i], a, eps, t2) for i in range(n)])
        scale = abs(v) + abs(h * f0)
        prev_change = math.inf
        for _ in range(_GL_MAX_ITER):
            new = (v + h * (smat @ fs)).tolist()
            change = max(abs(x - y) for x, y in zip(new, vs))
            vs = new
            fs = np.array([_rarefaction_rhs(family, ts[i], vs[i], a, eps, t2) for i in range(n)])
            if change <= 1e-15 * scale or (change <= 1e-13 * scale and change >= prev_change):
                break
            prev_change = change
        else:
            raise IntegrationError(f"collocation iteration did not converge on panel {k} (t={ta})")
        v = v + h * float(weights @ fs)
    return v


def _hugoniot_parts(
    rho_l: float, v_l: float, rho: float, dv: float, a: float, eps: float, t2: float,
    s_l: float, u_l: float,
) -> tuple[float, float, float]:
    """Return ``(u - u_L, [rho s], [rho v])`` across a jump, in cancellation-free form."""
    v = v_l + dv
    s, u = _s_and_u(rho, v, a, eps, t2)
    du = u - u_l
    drho = rho - rho_l
    mass = drho * s + rho_l * t2 * du  # rho s - rho_L s_L, using s = 1 + t2 u
    mom = drho * v + rho_l * dv  # rho v - rho_L v_L
    return du, mass, mom


def _hugoniot_residual(
    dv: float, rho_l: float, v_l: float, rho: float, a: float, eps: float, t2: float,
    s_l: float, u_l: float,
) -> float:
    """Speed-eliminated Rankine-Hugoniot residual ``[u][rho s] + [v][rho v]``."""
    du, mass, mom = _hugoniot_parts(rho_l, v_l, rho, dv, a, eps, t2, s_l, u_l)
    return du * mass + dv * mom


def _limit_shock(family: int, alpha: float, a: float) -> float:
    if alpha == 1.0:
        return 0.0
    return -math.sqrt(2.0) / a * math.sqrt((alpha - 1.0) * math.log(alpha) / (alpha + 1.0))


def _limit_rarefaction(family: int, alpha: float, a: float) -> float:
    lg = math.log(alpha)
    return -lg / a if family == 1 else lg / a


def _shock_offset(
    family: int, alpha: float, rho_l: float, v_l: float, a: float, eps: float, t2: float,
    v_span: float,
) -> float:
    if alpha == 1.0:
        return 0.0
    guess = _limit_shock(family, alpha, a)
    if eps == 0.0 and t2 == 0.0:
        return guess
    s_l, u_l = _s_and_u(rho_l, v_l, a, eps, t2)
    rho = rho_l * alpha
    c_rho = 2.0 * _pow_m1(rho, eps) / (a * a)
    drho = rho - rho_l

    def g(dv: float) -> float:
        # inlined Hugoniot residual with the density-only terms hoisted
        v = v_l + dv
        b = c_rho + v * v
        arg = 1.0 - t2 * b
        if not arg > 0.0:
            raise CavitationError(f"1 - tau2*B = {arg} <= 0 on the shock curve")
        s = math.sqrt(arg)
        du = -b / (1.0 + s) - u_l
        return du * (drho * s + rho_l * t2 * du) + dv * (drho * v + rho_l * dv)

    mu = eps + t2
    root = secant_root(g, guess, guess * (1.0 + mu + 1e-7), -v_span, 0.0)
    if root is not None:
        return root
    # Fallback: bracket on the admissible branch and run Brent.
    hi = 0.0
    ghi = g(hi)
    lo = guess * 1.5 - 1e-3
    glo = _safe_eval(g, lo)
    while not glo > 0.0:
        lo = 2.0 * lo - 1e-3
        if -lo > v_span:
            raise CurveDomainError(
                f"no sign change of the Hugoniot residual on [-{v_span}, 0) "
                f"(family {family}, alpha={alpha}, U_L=({rho_l}, {v_l}))"
            )
        glo = _safe_eval(g, lo)
    if not ghi < 0.0:
        raise CurveDomainError(f"Hugoniot residual non-negative at dv=0 (alpha={alpha})")
    return brentq(g, lo, hi, xtol=SHOCK_XTOL, rtol=SHOCK_RTOL, maxiter=200)


def secant_root(f, x0: float, x1: float, lo: float, hi: float,
                max_iter: int = 40) -> float | None:
    """Safeguarded secant iteration; ``None`` if it leaves ``(lo, hi)`` or stalls.

    Converges when the step falls to a few ulps of the iterate (or the
    residual is exactly zero).
    """
    try:
        f0 = f(x0)
        if f0 == 0.0:
            return x0
        f1 = f(x1)
        for _ in range(max_iter):
            if f1 == 0.0:
                return x1
            den = f1 - f0
            if den == 0.0:
                return x1 if abs(x1 - x0) <= 4e-16 * max(abs(x1), 1e-300) else None
            x2 = x1 - f1 * (x1 - x0) / den
            if not (lo < x2 < hi) or not math.isfinite(x2):
                return None
            if abs(x2 - x1) <= 2e-16 * abs(x2) + 1e-300:
                return x2
            x0, f0 = x1, f1
            x1, f1 = x2, f(x2)
    except (CavitationError, DomainError, DegeneracyError):
        return None
    return None


def _safe_eval(g, x: float) -> float:
    try:
        return g(x)
    except (CavitationError, DomainError):
        return math.nan


def _rarefaction_offset(
    family: int, alpha: float, rho_l: float, v_l: float, a: float, eps: float, t2: float
) -> float:
    if alpha == 1.0:
        return 0.0
    if eps == 0.0 and t2 == 0.0:
        return _limit_rarefaction(family, alpha, a)
    t0 = math.log(rho_l)
    v1 = _integrate_rarefaction(family, t0, t0 + math.log(alpha), v_l, a, eps, t2)
    return v1 - v_l


def _phi(
    family: int, alpha: float, rho_l: float, v_l: float, a: float, eps: float, t2: float,
    v_span: float,
) -> float:
    if alpha == 1.0:
        return 0.0
    shock = alpha > 1.0 if family == 1 else alpha < 1.0
    if shock:
        return _shock_offset(family, alpha, rho_l, v_l, a, eps, t2, v_span)
    return _rarefaction_offset(family, alpha, rho_l, v_l, a, eps, t2)


def _v_span(p: ModelParams) -> float:
    return 4.0 * p.bounds.v_max + 4.0 / p.a_inf


def _check_strength(alpha: float, p: ModelParams) -> None:
    if not (p.delta0 < alpha < 1.0 / p.delta0):
        raise StrengthError(
            f"strength alpha={alpha} outside the window ({p.delta0}, {1.0 / p.delta0})"
        )


def _check_orientation(family: Family, alpha: float, kind: Kind) -> None:
    if alpha != 1.0 and wave_kind(family, alpha) is not kind:
        raise StrengthError(f"family {family.name} {kind.value} requires the other side of alpha=1")


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def bernoulli_B(s: State, p: ModelParams) -> float:
    """Bernoulli quantity ``2 (rho^eps - 1)/(a^2 eps) + v^2`` (``2 ln rho/a^2 + v^2`` at ``eps = 0``)."""
    return _bernoulli(s.rho, s.v, p.a_inf, p.epsilon)


def u_from_state(s: State, p: ModelParams) -> float:
    """Recover the longitudinal velocity perturbation ``u`` from ``(rho, v)``.

    Evaluated as ``-B / (1 + sqrt(1 - tau2 B))``, algebraically equal to
    ``(sqrt(1 - tau2 B) - 1)/tau2`` but free of cancellation; at ``tau2 = 0``
    it is ``-B/2``, which at ``mu = 0`` is ``-v^2/2 - ln(rho)/a^2``.
    """
    return _s_and_u(s.rho, s.v, p.a_inf, p.epsilon, p.tau2)[1]


def eigenvalues(s: State, p: ModelParams) -> tuple[float, float]:
    """Characteristic speeds ``(lambda_1, lambda_2)``, ``lambda_1 < lambda_2``.

    These are the roots of ``det(DF - lambda DW) = 0`` for the conservative
    variables ``W = (rho s, v)`` and fluxes ``F = (rho v, -u)``.  At ``mu = 0``
    the exact values ``v -+ 1/a_inf`` are returned.

    Raises :class:`DegeneracyError` when strict hyperbolicity is lost.
    """
    return _eigenvalues(s.rho, s.v, p.a_inf, p.epsilon, p.tau2)


def eigenvectors(s: State, p: ModelParams) -> tuple[tuple[float, float], tuple[float, float]]:
    """Right eigenvectors ``r_j = (-1)^j (rho, rho^eps / (a^2 (s lambda_j - v)))``."""
    a, eps, t2 = p.a_inf, p.epsilon, p.tau2
    lam = eigenvalues(s, p)
    sq, _ = _s_and_u(s.rho, s.v, a, eps, t2)
    reps = math.exp(eps * math.log(s.rho))
    out = []
    for j, lj in ((1, lam[0]), (2, lam[1])):
        sign = -1.0 if j == 1 else 1.0
        out.append((sign * s.rho, sign * reps / (a * a * (sq * lj - s.v))))
    return out[0], out[1]


def hugoniot_residual(dv: float, alpha: float, U_L: State, p: ModelParams) -> float:
    """Speed-eliminated Rankine-Hugoniot residual at ``rho = alpha rho_L``, ``v = v_L + dv``.

    Equals ``[u][rho s] + [v][rho v]``; it vanishes exactly when some speed
    ``sigma`` satisfies both jump conditions ``sigma [rho s] = [rho v]`` and
    ``sigma [v] = -[u]``.
    """
    a, eps, t2 = p.a_inf, p.epsilon, p.tau2
    s_l, u_l = _s_and_u(U_L.rho, U_L.v, a, eps, t2)
    return _hugoniot_residual(dv, U_L.rho, U_L.v, U_L.rho * alpha, a, eps, t2, s_l, u_l)


def shock_offset(alpha: float, family: Family, U_L: State, p: ModelParams) -> float:
    """Velocity jump ``dv < 0`` across the family-``family`` shock of strength ``alpha``.

    Solves the Hugoniot residual on the compressive branch ``dv < 0`` with a
    bracketed Brent iteration (closed form at ``mu = 0``).

    Raises :class:`StrengthError` for strengths outside the window or on the
    wrong side of 1, and :class:`CurveDomainError` if no root is bracketed.
    """
    family = Family(family)
    _check_strength(alpha, p)
    _check_orientation(family, alpha, Kind.SHOCK)
    return _shock_offset(
        int(family), alpha, U_L.rho, U_L.v, p.a_inf, p.epsilon, p.tau2, _v_span(p)
    )


def rarefaction_offset(alpha: float, family: Family, U_L: State, p: ModelParams) -> float:
    """Velocity jump ``dv >= 0`` across the family-``family`` rarefaction of strength ``alpha``.

    Integrates ``dv/d(ln rho) = rho^eps / (a^2 (s lambda_k - v))`` panel-wise by
    Gauss-Legendre collocation with a Picard fixed point on the implicit
    ``s``-dependence (``-/+ ln(alpha)/a`` at ``mu = 0``).
    """
    family = Family(family)
    _check_strength(alpha, p)
    _check_orientation(family, alpha, Kind.RAREFACTION)
    return _rarefaction_offset(int(family), alpha, U_L.rho, U_L.v, p.a_inf, p.epsilon, p.tau2)


def phi(wd: WaveDescriptor, U_L: State, p: ModelParams) -> float:
    """Composite wave curve: velocity jump of the wave ``wd`` issued from ``U_L``."""
    _check_strength(wd.alpha, p)
    return _phi(
        int(wd.family), wd.alpha, U_L.rho, U_L.v, p.a_inf, p.epsilon, p.tau2, _v_span(p)
    )


def phi_value(family: Family, alpha: float, U_L: State, p: ModelParams) -> float:
    """``phi`` for a bare ``(family, alpha)`` pair; the kind is implied by ``alpha``."""
    _check_strength(alpha, p)
    return _phi(int(family), alpha, U_L.rho, U_L.v, p.a_inf, p.epsilon, p.tau2, _v_span(p))


def wave_state(family: Family, alpha: float, U_L: State, p: ModelParams) -> State:
    """State reached from ``U_L`` by the family-``family`` wave of strength ``alpha``."""
    return State(U_L.rho * alpha, U_L.v + phi_value(family, alpha, U_L, p))


def wave_map_Phi(alpha1: float, alpha2: float, U_L: State, p: ModelParams) -> State:
    """Right state of the 1-wave ``alpha1`` followed by the 2-wave ``alpha2`` from ``U_L``."""
    u_m = wave_state(Family.ONE, alpha1, U_L, p)
    return wave_state(Family.TWO, alpha2, u_m, p)


def shock_speed(wd: WaveDescriptor, U_L: State, U_R: State, p: ModelParams) -> float:
    """Rankine-Hugoniot speed ``sigma = [rho v] / [rho s]`` of a shock ``U_L -> U_R``.

    Both jump conditions are checked; :class:`InvalidShockError` is raised if
    the second one fails by more than ``1e-9`` relative.
    """
    if wd.kind is not Kind.SHOCK:
        raise InvalidShockError("shock_speed requires a shock descriptor")
    sigma, resid = rankine_hugoniot(U_L, U_R, p)
    if resid > 1e-9:
        raise InvalidShockError(f"Rankine-Hugoniot residual {resid:.3e} exceeds tolerance")
    return sigma


def rankine_hugoniot(U_L: State, U_R: State, p: ModelParams) -> tuple[float, float]:
    """Return ``(sigma, residual)`` for the jump ``U_L -> U_R``.

    ``sigma`` comes from the mass condition; ``residual`` is the relative
    defect of the second condition ``sigma [v] + [u] = 0``.
    """
    a, eps, t2 = p.a_inf, p.epsilon, p.tau2
    s_l, u_l = _s_and_u(U_L.rho, U_L.v, a, eps, t2)
    du, mass, mom = _hugoniot_parts(U_L.rho, U_L.v, U_R.rho, U_R.v - U_L.v, a, eps, t2, s_l, u_l)
    if mass == 0.0:
        raise InvalidShockError("zero mass jump: not a shock")
    sigma = mom / mass
    dv = U_R.v - U_L.v
    scale = max(abs(sigma * dv), abs(du), 1e-300)
    return sigma, abs(sigma * dv + du) / scale


def lax_admissible(family: Family, U_L: State, U_R: State, sigma: float, p: ModelParams) -> bool:
    """Strict Lax condition ``lambda_k(U_R) < sigma < lambda_k(U_L)``."""
    k = 0 if Family(family) is Family.ONE else 1
    return eigenvalues(U_R, p)[k] < sigma < eigenvalues(U_L, p)[k]


def genuine_nonlinearity_probe(s: State, p: ModelParams, h: float = 1e-5) -> tuple[float, float]:
    """Central-difference estimate of ``grad(lambda_j) . r_j`` for ``j = 1, 2``."""
    r1, r2 = eigenvectors(s, p)
    out = []
    for k, r in ((0, r1), (1, r2)):
        dl_drho = (
            eigenvalues(State(s.rho + h, s.v), p)[k] - eigenvalues(State(s.rho - h, s.v), p)[k]
        ) / (2.0 * h)
        dl_dv = (
            eigenvalues(State(s.rho, s.v + h), p)[k] - eigenvalues(State(s.rho, s.v - h), p)[k]
        ) / (2.0 * h)
        out.append(dl_drho * r[0] + dl_dv * r[1])
    return out[0], out[1]


def characteristic_speed(family: Family, s: State, p: ModelParams) -> float:
    """``lambda_family(s)``."""
    return _char_speed(int(family), s.rho, s.v, p.a_inf, p.epsilon, p.tau2)
