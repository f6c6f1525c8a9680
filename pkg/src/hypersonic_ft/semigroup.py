"""Reference solution operator of the limit system and the error functional.

The limit system is Galilean invariant: with ``y_hat = y - b0 x`` and
``v_hat = v - b0`` the wedge ``{y < b0 x}`` becomes the fixed quarter plane
``{y_hat < 0}`` and the boundary condition ``v = b0`` becomes ``v_hat = 0``.
The reference operator ``S_h`` is therefore computed by limit-system front
tracking with ``b0 = 0`` on transformed profiles at a refined resolution
``nu_ref`` and mapped back.

The error functional integrates ``||S_h V(s) - V(s + h)||_{L1} / h`` over
``s in [0, x]`` for an approximate trajectory ``V``; up to the Lipschitz
constant of ``S`` it bounds the distance ``||S_x V(0) - V(x)||_{L1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .analysis import l1_distance
from .errors import DomainError
from .front_tracking import (
    NP,
    FrontTracker,
    Profile,
    SchemeParams,
    TrackedSolution,
)
from .wave_curves import ModelParams, State

#: Default number of refinement levels of the reference solution.
NU_REF_OFFSET = 4


@dataclass(frozen=True)
class TransformedProfile:
    """Profile on the fixed quarter plane ``{y_hat < 0}``; ``b0`` is the transform slope."""

    x: float
    breakpoints: tuple[float, ...]
    values: tuple[State, ...]
    b0: float
    fronts: tuple | None = None

    def as_profile(self) -> Profile:
        """The same data as a plain :class:`Profile` (boundary at ``y_hat = 0``)."""
        return Profile(self.x, self.breakpoints, self.values, self.fronts)


def to_transformed(prof: Profile, b0: float) -> TransformedProfile:
    """Map ``(y, v) -> (y - b0 x, v - b0)`` at the profile's ``x``."""
    shift = b0 * prof.x
    bps = tuple(y - shift for y in prof.breakpoints)
    vals = tuple(State(u.rho, u.v - b0) for u in prof.values)
    return TransformedProfile(prof.x, bps, vals, b0, prof.fronts)


def from_transformed(tp: TransformedProfile) -> Profile:
    """Inverse of :func:`to_transformed`."""
    shift = tp.b0 * tp.x
    bps = tuple(y + shift for y in tp.breakpoints)
    vals = tuple(State(u.rho, u.v + tp.b0) for u in tp.values)
    return Profile(tp.x, bps, vals, tp.fronts)


def _strictly_increasing(prof: Profile) -> Profile:
    # Shifting by a common amount can merge breakpoints that differ in the
    # last ulp; keep the right value of such a pair.
    bps: list[float] = []
    vals = [prof.values[0]]
    infos: list = []
    for i, y in enumerate(prof.breakpoints):
        if bps and y <= bps[-1]:
            vals[-1] = prof.values[i + 1]
            continue
        bps.append(y)
        vals.append(prof.values[i + 1])
        if prof.fronts is not None:
            infos.append(prof.fronts[i])
    return Profile(prof.x, tuple(bps), tuple(vals), tuple(infos) if prof.fronts is not None else None)


def semigroup_apply(
    U0: Profile,
    x: float,
    nu_ref: int = 12,
    p: ModelParams | None = None,
) -> Profile:
    """Limit-system solution ``S_x U0`` at ``U0.x + x``, front tracking at ``nu_ref``.

    Only ``a_inf``, ``b0`` and the bounds of ``p`` are used; the solution is
    always that of the limit system.  ``x = 0`` returns ``U0`` unchanged.
    """
    if x < 0.0:
        raise DomainError(f"the semigroup is defined for x >= 0, got {x}")
    p = p or ModelParams()
    if x == 0.0:
        return U0
    tp = to_transformed(U0, p.b0)
    start = _strictly_increasing(Profile(U0.x, tp.breakpoints, tp.values))
    if start.breakpoints and not start.breakpoints[-1] < 0.0:
        raise DomainError("profile support exceeds the wedge boundary")
    q = ModelParams(p.a_inf, 0.0, 0.0, 0.0, p.bounds, p.delta0)
    tracker = FrontTracker(start, q, SchemeParams(nu=nu_ref))
    tracker.advance_to(U0.x + x)
    out = tracker.profile()
    back = from_transformed(TransformedProfile(out.x, out.breakpoints, out.values, p.b0, out.fronts))
    return _strictly_increasing(back)


def _hull(a: Profile, b: Profile, y_hi: float) -> tuple[float, float]:
    pts = [y for y in a.breakpoints + b.breakpoints if y < y_hi]
    lo = min(pts) - 1.0 if pts else y_hi - 1.0
    return lo, y_hi


def profile_l1(a: Profile, b: Profile, b0: float) -> float:
    """L1 distance of two profiles at the same ``x`` over ``(-inf, b0 x)``."""
    if abs(a.x - b.x) > 1e-12 * (1.0 + abs(a.x)):
        raise DomainError(f"profiles at different x ({a.x} vs {b.x})")
    lo, hi = _hull(a, b, b0 * a.x)
    if a.values[0] != b.values[0]:
        raise DomainError("profiles have different far-field states")
    return l1_distance(a, b, (lo, hi))


@dataclass
class ErrorFunctionalResult:
    """Midpoint-rule estimate of the error functional with its integrand trace."""

    value: float
    s: list[float]
    integrand: list[float]
    h: float
    lipschitz: float
    warnings: list[str] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["s,integrand,h,warnings"]
        for s, g, w in zip(self.s, self.integrand, self.warnings):
            lines.append(f"{s!r},{g!r},{self.h!r},{w}")
        return "\n".join(lines) + "\n"


def error_functional(
    V: Callable[[float], Profile] | TrackedSolution,
    x: float,
    h: float,
    samples: int,
    p: ModelParams,
    nu_ref: int = 12,
    lipschitz: float = 1.0,
    x0: float = 0.0,
) -> ErrorFunctionalResult:
    """``L * int_{x0}^{x0+x} ||S_h V(s) - V(s+h)||_{L1} / h ds`` by the midpoint rule.

    ``V`` maps ``s`` to the approximate profile at ``s``.  When ``V`` is a
    :class:`TrackedSolution`, panels whose window ``(s, s+h]`` contains
    interactions of ``V`` are flagged, since local estimates assume ``h``
    below the interaction scale.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    if not h > 0.0:
        raise DomainError("h must be positive")
    width = x / samples
    mids = [x0 + (i + 0.5) * width for i in range(samples)]
    # query V at increasing x so a tracked trajectory is advanced only once
    queries = sorted(set(mids) | {s + h for s in mids})
    profiles = {q: V(q) for q in queries}
    integrand: list[float] = []
    warnings: list[str] = []
    for s in mids:
        ref = semigroup_apply(profiles[s], h, nu_ref, p)
        integrand.append(profile_l1(ref, profiles[s + h], p.b0) / h)
        if isinstance(V, TrackedSolution):
            n = V.events_between(s, s + h)
            warnings.append(f"interactions_in_window={n}" if n else "")
        else:
            warnings.append("")
    value = lipschitz * width * math.fsum(integrand)
    return ErrorFunctionalResult(value, mids, integrand, h, lipschitz, warnings)


@dataclass(frozen=True)
class ProbeEntry:
    """Local error of one front (or the boundary) over one step ``h``."""

    kind: str  # "shock", "rarefaction_fan", "non_physical" or "boundary"
    family: int
    y: float
    strength: float
    error: float
    ratio: float
    reduced: bool


def local_error_probe(
    prof: Profile,
    p_full: ModelParams,
    h: float,
    sp: SchemeParams | None = None,
    nu_ref: int | None = None,
) -> list[ProbeEntry]:
    """Per-front local errors ``||S_h(prof) - V(x+h)||`` on front neighbourhoods.

    ``prof`` must carry front descriptions (a traced profile); ``V`` continues
    those fronts with the full system for a step ``h``.  The neighbourhood of
    a front is ``y +- eta`` with ``eta = 1.05 lambda_hat h``; overlapping
    neighbourhoods are cut at mid-points (``reduced``).  Ratios are
    ``error / (h |alpha - 1|)`` for physical fronts, ``error / (h alpha_NP)``
    for non-physical ones and ``error / (h (|alpha_b - 1| + 1))`` for the
    boundary, where ``alpha_b`` is the strength of the front nearest to it.
    """
    if prof.fronts is None:
        raise DomainError("local_error_probe needs a profile with front descriptions")
    sp = sp or SchemeParams()
    nu_ref = nu_ref if nu_ref is not None else sp.nu + NU_REF_OFFSET
    lam = sp.resolved_lambda_hat(p_full)
    x1 = prof.x + h
    ref = semigroup_apply(prof, h, nu_ref, p_full)
    tr = FrontTracker(prof, p_full, sp, resume=True)
    tr.advance_to(x1)
    approx = tr.profile()
    eta = 1.05 * lam * h
    yb0, yb1 = p_full.b0 * prof.x, p_full.b0 * x1
    ys = list(prof.breakpoints)
    entries: list[ProbeEntry] = []
    for i, (y, info) in enumerate(zip(ys, prof.fronts)):
        lo, hi = y - eta, y + eta
        reduced = False
        if i > 0 and ys[i - 1] + eta > lo:
            lo = max(lo, 0.5 * (ys[i - 1] + y))
            reduced = True
        if i + 1 < len(ys) and ys[i + 1] - eta < hi:
            hi = min(hi, 0.5 * (y + ys[i + 1]))
            reduced = True
        hi = min(hi, yb1)
        err = l1_distance(ref, approx, (lo, hi)) if hi > lo else 0.0
        if info.family == NP:
            size = info.strength
        else:
            size = abs(info.strength - 1.0)
        ratio = err / (h * size) if size > 0.0 else math.inf if err > 0.0 else 0.0
        entries.append(ProbeEntry(info.kind, info.family, y, info.strength, err, ratio, reduced))
    # boundary neighbourhood
    lo = min(yb0, yb1) - eta
    reduced = False
    if ys and ys[-1] + eta > lo:
        lo = max(lo, 0.5 * (ys[-1] + yb0))
        reduced = True
    err = l1_distance(ref, approx, (lo, yb1)) if yb1 > lo else 0.0
    near = prof.fronts[-1] if prof.fronts else None
    size = abs(near.strength - 1.0) if near is not None and near.family != NP else 0.0
    entries.append(ProbeEntry("boundary", 1, yb0, 1.0 + size, err, err / (h * (size + 1.0)), reduced))
    return entries


def lipschitz_ratio(A: Profile, B: Profile, x: float, p: ModelParams, nu_ref: int = 12) -> float:
    """``||S_x A - S_x B|| / ||A - B||`` for two profiles at the same ``x``."""
    d0 = profile_l1(A, B, p.b0)
    if d0 == 0.0:
        raise DomainError("the two profiles coincide")
    d1 = profile_l1(semigroup_apply(A, x, nu_ref, p), semigroup_apply(B, x, nu_ref, p), p.b0)
    return d1 / d0


def measure_lipschitz(pairs: Sequence[tuple[Profile, Profile]], x: float, p: ModelParams,
                      nu_ref: int = 12) -> tuple[float, list[float]]:
    """Largest Lipschitz ratio over ``pairs`` together with all ratios."""
    ratios = [lipschitz_ratio(A, B, x, p, nu_ref) for A, B in pairs]
    return max(ratios), ratios


def semigroup_defect(U0: Profile, x1: float, x2: float, p: ModelParams, nu_ref: int = 12) -> float:
    """``||S_{x1+x2} U0 - S_{x2} S_{x1} U0||_{L1}``."""
    direct = semigroup_apply(U0, x1 + x2, nu_ref, p)
    composed = semigroup_apply(semigroup_apply(U0, x1, nu_ref, p), x2, nu_ref, p)
    return profile_l1(direct, composed, p.b0)
