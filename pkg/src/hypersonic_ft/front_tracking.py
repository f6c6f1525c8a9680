"""Event-driven wave-front tracking on the wedge ``{y < b0 x}``.

A piecewise-constant profile is evolved in ``x`` by straight fronts.  When
two fronts meet (or a front reaches the boundary ``y = b0 x``) the local
Riemann problem is resolved by

* the *accurate* solver (ARS): exact Riemann solution, rarefactions split
  into fans of pieces with ``|alpha - 1| < 1/nu``, each piece travelling with
  the characteristic speed of its right state;
* the *simplified* solver (SRS), used when the product of the incoming
  strengths ``|alpha - 1||beta - 1|`` is at most ``varrho``: the incoming
  waves cross (or merge, for equal families) with unchanged strengths and
  the mismatch is carried by one non-physical front at speed ``lambda_hat``.

Boundary hits always use the boundary Riemann solver; non-physical fronts
reaching the boundary are absorbed into that solve.  Every emitted
physical speed is perturbed by a deterministic amount below ``2^-nu`` to
rule out exact multiple collisions.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .errors import BlowupError, DomainError, SchedulingError
from .riemann import RiemannFan, solve_boundary, solve_interior
from .wave_curves import (
    Family,
    Kind,
    ModelParams,
    State,
    _char_speed,
    _hugoniot_parts,
    _phi,
    _s_and_u,
    _v_span,
)

NP = 0  # family code of non-physical fronts

KIND_SHOCK = "shock"
KIND_FAN = "rarefaction_fan"
KIND_NP = "non_physical"

#: Non-physical fronts smaller than this are elided (state gap absorbed).
NP_ELIDE = 1e-13


@dataclass(frozen=True)
class FrontInfo:
    """Family, kind and strength attached to a profile breakpoint."""

    family: int
    kind: str
    strength: float


@dataclass(frozen=True)
class Profile:
    """Piecewise-constant trace ``y -> U(x, y)`` on ``y < b0 x``.

    ``values[0]`` extends to ``-inf``; ``values[-1]`` is adjacent to the
    boundary.  ``fronts``, when present, describes each breakpoint.
    """

    x: float
    breakpoints: tuple[float, ...]
    values: tuple[State, ...]
    fronts: tuple[FrontInfo, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.values) != len(self.breakpoints) + 1:
            raise DomainError("a profile needs exactly one more value than breakpoints")
        for y0, y1 in zip(self.breakpoints, self.breakpoints[1:]):
            if not y0 < y1:
                raise DomainError("profile breakpoints must be strictly increasing")

    def value_at(self, y: float) -> State:
        """Value at ``y`` (right-continuous)."""
        lo, hi = 0, len(self.breakpoints)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.breakpoints[mid] <= y:
                lo = mid + 1
            else:
                hi = mid
        return self.values[lo]


@dataclass
class SchemeParams:
    """Resolution and bookkeeping parameters of the front-tracking scheme."""

    nu: int = 8
    varrho: float | None = None
    lambda_hat: float | None = None
    speed_perturb: float | None = None
    max_fronts: int = 50_000
    kappa: float = 1.0
    max_events: int = 5_000_000
    record_segments: bool = False
    boundary_elide: float | None = None

    def __post_init__(self) -> None:
        if self.nu < 1:
            raise DomainError(f"nu must be a positive integer, got {self.nu}")
        if self.varrho is None:
            self.varrho = 2.0 ** (-self.nu)
        if self.speed_perturb is None:
            self.speed_perturb = 2.0 ** (-self.nu)
        if self.boundary_elide is None:
            self.boundary_elide = 2.0 ** (-2 * self.nu)

    def resolved_lambda_hat(self, p: ModelParams) -> float:
        if self.lambda_hat is not None:
            return self.lambda_hat
        return default_lambda_hat(p)


def default_lambda_hat(p: ModelParams) -> float:
    """``sup|v| + 1/a (inflated by the mu-correction) + 1 + |b0|`` over the domain box."""
    return p.bounds.v_max + (1.0 + 10.0 * p.mu_norm) / p.a_inf + 1.0 + abs(p.b0)


@dataclass(frozen=True)
class Event:
    x: float
    y: float
    event_type: str
    in_strengths: tuple[float, ...]
    out_strengths: tuple[float, ...]

    def to_line(self) -> str:
        ins = ";".join(repr(s) for s in self.in_strengths)
        outs = ";".join(repr(s) for s in self.out_strengths)
        return f"{self.x!r},{self.y!r},{self.event_type},{ins},{outs}"


@dataclass
class EventLog:
    """Append-only record of interactions."""

    events: list[Event] = field(default_factory=list)

    def append(self, ev: Event) -> None:
        self.events.append(ev)

    def __len__(self) -> int:
        return len(self.events)

    def lines(self) -> list[str]:
        return [ev.to_line() for ev in self.events]

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("x,y,event_type,in_strengths,out_strengths\n")
            for line in self.lines():
                fh.write(line + "\n")

    def count(self, event_type: str) -> int:
        return sum(1 for ev in self.events if ev.event_type == event_type)


@dataclass(frozen=True)
class Segment:
    x0: float
    y0: float
    x1: float
    y1: float
    family: int
    kind: str
    strength: float


class Front:
    """A straight discontinuity ``y = y0 + speed (x - x0)``."""

    __slots__ = ("id", "family", "kind", "strength", "x0", "y0", "speed",
                 "left", "right", "prev", "next", "alive")

    def __init__(self, fid: int, family: int, kind: str, strength: float, x0: float,
                 y0: float, speed: float, left: State, right: State) -> None:
        self.id = fid
        self.family = family
        self.kind = kind
        self.strength = strength
        self.x0 = x0
        self.y0 = y0
        self.speed = speed
        self.left = left
        self.right = right
        self.prev: Front | None = None
        self.next: Front | None = None
        self.alive = True

    def y_at(self, x: float) -> float:
        return self.y0 + self.speed * (x - self.x0)

    def size(self) -> float:
        """``|alpha - 1|`` for physical fronts, the L-infinity jump for non-physical ones."""
        if self.family == NP:
            return self.strength
        return abs(self.strength - 1.0)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (f"Front(id={self.id}, fam={self.family}, {self.kind}, a={self.strength:.6g}, "
                f"y={self.y0:.6g}@{self.x0:.6g}, s={self.speed:.6g})")


def _jump(f: Front) -> float:
    return abs(f.right.rho - f.left.rho) + abs(f.right.v - f.left.v)


def fan_pieces(alpha: float, sp: SchemeParams) -> int:
    """Number of pieces a rarefaction of strength ``alpha`` is split into.

    The smallest ``m`` (scaled by ``kappa``) with ``exp(|ln alpha| / m) - 1 < 1/nu``;
    sizing on ``|ln alpha|`` bounds every piece below ``1/nu`` for either
    direction of the expansion.
    """
    la = abs(math.log(alpha))
    if la == 0.0:
        return 1
    need = la / math.log1p(1.0 / sp.nu)
    return max(1, math.ceil(sp.kappa * need * (1.0 + 1e-12)))


class FrontTracker:
    """Single-threaded front-tracking instance owning its fronts and event log."""

    def __init__(self, prof: Profile, p: ModelParams, sp: SchemeParams,
                 resume: bool = False) -> None:
        self.p = p
        self.sp = sp
        self.lam_hat = sp.resolved_lambda_hat(p)
        self.x = prof.x
        self.log = EventLog()
        self.segments: list[Segment] = []
        self.head: Front | None = None
        self.tail: Front | None = None
        self.n_fronts = 0
        self.n_events = 0
        self.max_raref = 0.0
        self.max_tv = 0.0
        self.boundary_state = prof.values[-1]
        self.left_state = prof.values[0]
        self._next_id = 0
        self._heap: list[tuple] = []
        self._span = _v_span(p)
        self._nudge_unit = 2.0 ** (-sp.nu - 20)
        if resume and prof.fronts is not None:
            self._resume_fronts(prof)
        else:
            self._init_fronts(prof)

    # -- construction -------------------------------------------------------

    def _new_id(self) -> int:
        fid = self._next_id
        self._next_id += 1
        return fid

    def _nudge(self, fid: int) -> float:
        return ((fid % 1024) + 1) * self._nudge_unit

    def _init_fronts(self, prof: Profile) -> None:
        x0 = prof.x
        emitted: list[Front] = []
        for i, y in enumerate(prof.breakpoints):
            ul, ur = prof.values[i], prof.values[i + 1]
            new = self._ars(ul, ur, x0, y)
            self.log.append(Event(x0, y, "INIT", (), tuple(f.strength for f in new)))
            emitted.extend(new)
        yb = self.p.b0 * x0
        if prof.breakpoints and not prof.breakpoints[-1] < yb:
            raise DomainError("profile support exceeds the wedge boundary")
        ul = prof.values[-1]
        new = self._boundary_fronts(ul, x0, yb)
        if new:
            self.log.append(Event(x0, yb, "BOUNDARY", (), tuple(f.strength for f in new)))
        emitted.extend(new)
        self._link_all(emitted)
        self.boundary_state = emitted[-1].right if emitted else prof.values[-1]
        f = self.head
        while f is not None:
            self._schedule_pair(f, f.next)
            f = f.next
        if self.tail is not None:
            self._schedule_boundary(self.tail)
        self._tv = self.total_variation()
        self.max_tv = self._tv

    def _resume_fronts(self, prof: Profile) -> None:
        """Rebuild fronts from a traced profile without re-solving Riemann problems.

        Shocks move with their Rankine-Hugoniot speed, fan fronts with the
        characteristic speed of their right state and non-physical fronts with
        ``lambda_hat``, i.e. exactly as the tracker that produced ``prof``.
        """
        p = self.p
        a, eps, t2 = p.a_inf, p.epsilon, p.tau2
        x0 = prof.x
        fronts: list[Front] = []
        for i, (y, info) in enumerate(zip(prof.breakpoints, prof.fronts)):
            ul, ur = prof.values[i], prof.values[i + 1]
            if info.family == NP:
                speed = self.lam_hat
            elif info.kind == KIND_SHOCK:
                s_l, u_l = _s_and_u(ul.rho, ul.v, a, eps, t2)
                _, mass, mom = _hugoniot_parts(ul.rho, ul.v, ur.rho, ur.v - ul.v, a, eps, t2, s_l, u_l)
                speed = mom / mass
            else:
                speed = _char_speed(info.family, ur.rho, ur.v, a, eps, t2)
            fronts.append(self._make(info.family, info.kind, info.strength, x0, y, speed, ul, ur))
        self._link_all(fronts)
        self.boundary_state = prof.values[-1]
        f = self.head
        while f is not None:
            self._schedule_pair(f, f.next)
            f = f.next
        if self.tail is not None:
            self._schedule_boundary(self.tail)
        self._tv = self.total_variation()
        self.max_tv = self._tv

    def _link_all(self, fronts: list[Front]) -> None:
        prev = None
        for f in fronts:
            f.prev = prev
            if prev is not None:
                prev.next = f
            prev = f
        self.head = fronts[0] if fronts else None
        self.tail = fronts[-1] if fronts else None
        self.n_fronts = len(fronts)

    # -- Riemann resolutions --------------------------------------------------

    def _make(self, family: int, kind: str, strength: float, x: float, y: float,
              speed: float, left: State, right: State) -> Front:
        fid = self._new_id()
        if family != NP:
            speed += self._nudge(fid)
        return Front(fid, family, kind, strength, x, y, speed, left, right)

    def _emit_fan(self, fan: RiemannFan, x: float, y: float, u_right: State | None) -> list[Front]:
        p, sp = self.p, self.sp
        a, eps, t2 = p.a_inf, p.epsilon, p.tau2
        out: list[Front] = []
        for i, fw in enumerate(fan.waves):
            left = fan.constant_states[i]
            right = fan.constant_states[i + 1]
            fam = int(fw.wave.family)
            alpha = fw.wave.alpha
            if fw.wave.kind is Kind.SHOCK:
                out.append(self._make(fam, KIND_SHOCK, alpha, x, y, fw.xi_lo, left, right))
                continue
            m = fan_pieces(alpha, sp)
            piece = math.exp(math.log(alpha) / m)
            cur = left
            for j in range(m):
                if j == m - 1:
                    nxt = right
                    strength = right.rho / cur.rho
                else:
                    dv = _phi(fam, piece, cur.rho, cur.v, a, eps, t2, self._span)
                    nxt = State(cur.rho * piece, cur.v + dv)
                    strength = piece
                speed = _char_speed(fam, nxt.rho, nxt.v, a, eps, t2)
                self.max_raref = max(self.max_raref, abs(strength - 1.0))
                out.append(self._make(fam, KIND_FAN, strength, x, y, speed, cur, nxt))
                cur = nxt
        if out and u_right is not None:
            last = out[-1]
            last.right = u_right
        return out

    def _ars(self, ul: State, ur: State, x: float, y: float) -> list[Front]:
        if ul == ur:
            return []
        fan = solve_interior(ul, ur, self.p)
        out = self._emit_fan(fan, x, y, ur)
        if not out:
            # null waves after snapping: carry any rounding gap on a non-physical front
            return self._np_front(ul, ur, x, y)
        return out

    def _boundary_fronts(self, ul: State, x: float, y: float) -> list[Front]:
        fan = solve_boundary(ul, self.p)
        return self._emit_fan(fan, x, y, None)

    def _np_front(self, ul: State, ur: State, x: float, y: float) -> list[Front]:
        size = max(abs(ur.rho - ul.rho), abs(ur.v - ul.v))
        if size == 0.0:
            return []
        return [self._make(NP, KIND_NP, size, x, y, self.lam_hat, ul, ur)]

    def _wave_from(self, family: int, alpha: float, left: State, x: float, y: float) -> Front:
        p = self.p
        a, eps, t2 = p.a_inf, p.epsilon, p.tau2
        dv = _phi(family, alpha, left.rho, left.v, a, eps, t2, self._span)
        right = State(left.rho * alpha, left.v + dv)
        if (alpha > 1.0) == (family == 1):
            s_l, u_l = _s_and_u(left.rho, left.v, a, eps, t2)
            _, mass, mom = _hugoniot_parts(left.rho, left.v, right.rho, dv, a, eps, t2, s_l, u_l)
            return self._make(family, KIND_SHOCK, alpha, x, y, mom / mass, left, right)
        speed = _char_speed(family, right.rho, right.v, a, eps, t2)
        self.max_raref = max(self.max_raref, abs(alpha - 1.0))
        return self._make(family, KIND_FAN, alpha, x, y, speed, left, right)

    def _close_with_np(self, out: list[Front], ul: State, ur: State, x: float, y: float) -> list[Front]:
        cur = out[-1].right if out else ul
        size = max(abs(ur.rho - cur.rho), abs(ur.v - cur.v))
        if size <= NP_ELIDE:
            if out:
                out[-1].right = ur
            elif size > 0.0:
                out = self._np_front(ul, ur, x, y)
            return out
        out.append(self._make(NP, KIND_NP, size, x, y, self.lam_hat, cur, ur))
        return out

    def _srs(self, a: Front, b: Front, x: float, y: float) -> list[Front]:
        ul, ur = a.left, b.right
        out: list[Front] = []
        if a.family != b.family:
            # left front is the faster 2-wave, right front the slower 1-wave: they cross
            first, second = (b, a) if b.family == 1 else (a, b)
            f1 = self._wave_from(first.family, first.strength, ul, x, y)
            f2 = self._wave_from(second.family, second.strength, f1.right, x, y)
            f2.left = f1.right
            out = [f1, f2]
        else:
            alpha = a.strength * b.strength
            if alpha != 1.0:
                out = [self._wave_from(a.family, alpha, ul, x, y)]
        return self._close_with_np(out, ul, ur, x, y)

    def _np_cross(self, npf: Front, phys: Front, x: float, y: float) -> list[Front]:
        ul, ur = npf.left, phys.right
        f1 = self._wave_from(phys.family, phys.strength, ul, x, y)
        return self._close_with_np([f1], ul, ur, x, y)

    # -- scheduling --------------------------------------------------------------

    def _schedule_pair(self, a: Front | None, b: Front | None) -> None:
        if a is None or b is None:
            return
        ds = a.speed - b.speed
        if not ds > 0.0:
            return
        xr = max(a.x0, b.x0, self.x)
        gap = b.y_at(xr) - a.y_at(xr)
        xc = xr + max(gap, 0.0) / ds
        yc = a.y_at(xc)
        heapq.heappush(self._heap, (xc, yc, 0, a.id, b.id, a, b))

    def _schedule_boundary(self, f: Front | None) -> None:
        if f is None:
            return
        b0 = self.p.b0
        ds = f.speed - b0
        if not ds > 0.0:
            return
        xr = max(f.x0, self.x)
        gap = b0 * xr - f.y_at(xr)
        xc = xr + max(gap, 0.0) / ds
        heapq.heappush(self._heap, (xc, b0 * xc, 1, f.id, -1, f, None))

    def _valid(self, entry: tuple) -> bool:
        _, _, typ, _, _, a, b = entry
        if typ == 0:
            return a.alive and b.alive and a.next is b
        return a.alive and a.next is None

    # -- main loop ---------------------------------------------------------------

    def next_event_x(self) -> float:
        """Collision coordinate of the next pending event (``inf`` when none is scheduled)."""
        heap = self._heap
        while heap and not self._valid(heap[0]):
            heapq.heappop(heap)
        return heap[0][0] if heap else math.inf

    def advance_to(self, x_target: float) -> None:
        """Process every event with collision coordinate ``<= x_target``."""
        if x_target < self.x:
            raise SchedulingError(f"cannot evolve backwards ({x_target} < {self.x})")
        heap = self._heap
        while heap and heap[0][0] <= x_target:
            entry = heapq.heappop(heap)
            if not self._valid(entry):
                continue
            self.n_events += 1
            if self.n_events > self.sp.max_events:
                raise SchedulingError(f"event budget {self.sp.max_events} exhausted at x={self.x}")
            xc = entry[0]
            self.x = max(self.x, xc)
            if entry[2] == 0:
                self._resolve_pair(entry[5], entry[6], xc, entry[1])
            else:
                self._resolve_boundary([entry[5]], xc)
            if self.n_fronts > self.sp.max_fronts:
                raise BlowupError(
                    f"{self.n_fronts} fronts exceed max_fronts={self.sp.max_fronts} at x={self.x}"
                )
        self.x = x_target

    def _cluster(self, a: Front, b: Front, xc: float, yc: float) -> tuple[Front, Front]:
        tol = 1e-11 * (1.0 + abs(yc))
        while a.prev is not None and abs(a.prev.y_at(xc) - yc) <= tol:
            a = a.prev
        while b.next is not None and abs(b.next.y_at(xc) - yc) <= tol:
            b = b.next
        return a, b

    def _replace(self, first: Front, last: Front, new: list[Front], xc: float) -> list[Front]:
        """Replace the chain ``first..last`` by ``new``; returns the removed fronts."""
        removed = []
        f = first
        while True:
            removed.append(f)
            f.alive = False
            if self.sp.record_segments:
                self.segments.append(Segment(f.x0, f.y0, xc, f.y_at(xc), f.family, f.kind, f.strength))
            if f is last:
                break
            f = f.next
        before, after = first.prev, last.next
        prev = before
        for g in new:
            g.prev = prev
            if prev is not None:
                prev.next = g
            else:
                self.head = g
            prev = g
        if prev is not None:
            prev.next = after
        else:
            self.head = after
        if after is not None:
            after.prev = prev
        else:
            self.tail = prev
        self.n_fronts += len(new) - len(removed)
        self._tv += sum(_jump(g) for g in new) - sum(_jump(g) for g in removed)
        # schedule the new neighbourhoods
        if new:
            self._schedule_pair(before, new[0])
            for g, h in zip(new, new[1:]):
                self._schedule_pair(g, h)
            self._schedule_pair(new[-1], after)
            if after is None:
                self._schedule_boundary(new[-1])
        else:
            self._schedule_pair(before, after)
            if after is None:
                self._schedule_boundary(before)
        return removed

    def _resolve_pair(self, a: Front, b: Front, xc: float, yc: float) -> None:
        first, last = self._cluster(a, b, xc, yc)
        yb = self.p.b0 * xc
        at_boundary = last.next is None and abs(yc - yb) <= 1e-11 * (1.0 + abs(yb))
        if at_boundary:
            chain = []
            f = first
            while True:
                chain.append(f)
                if f is last:
                    break
                f = f.next
            self._resolve_boundary(chain, xc)
            return
        ul, ur = first.left, last.right
        ins = []
        f = first
        while True:
            ins.append(f)
            if f is last:
                break
            f = f.next
        if len(ins) == 2 and (a.family == NP) != (b.family == NP):
            if a.family == NP:
                new = self._np_cross(a, b, xc, yc)
                etype = "NP_CROSS"
            else:  # a physical front cannot catch a non-physical one; resolve exactly
                new = self._ars(ul, ur, xc, yc)
                etype = "ARS"
        elif len(ins) == 2 and a.family != NP and b.family != NP and a.size() * b.size() <= self.sp.varrho:
            new = self._srs(a, b, xc, yc)
            etype = "SRS"
        else:
            new = self._ars(ul, ur, xc, yc)
            etype = "ARS" if len(ins) == 2 else "CLUSTER"
        self._replace(first, last, new, xc)
        self.log.append(Event(xc, yc, etype, tuple(f.strength for f in ins),
                              tuple(f.strength for f in new)))
        self._track_tv()

    def _resolve_boundary(self, chain: list[Front], xc: float) -> None:
        yb = self.p.b0 * xc
        ul = chain[0].left
        new = self._boundary_fronts(ul, xc, yb)
        etype = "NP_ABSORB" if any(f.family == NP for f in chain) else "BOUNDARY"
        if (etype == "NP_ABSORB" and all(f.family == NP for f in chain)
                and sum(f.size() for f in new) <= self.sp.boundary_elide):
            # A tiny non-physical front is absorbed without a reflected wave;
            # the boundary condition is violated by at most ``boundary_elide``
            # until the next physical front reaches the boundary.
            new = []
        self._replace(chain[0], chain[-1], new, xc)
        self.boundary_state = new[-1].right if new else ul
        self.log.append(Event(xc, yb, etype, tuple(f.strength for f in chain),
                              tuple(f.strength for f in new)))
        self._track_tv()

    def _track_tv(self) -> None:
        # TV changes only at events; the running sum is updated in _replace
        if self._tv > self.max_tv:
            self.max_tv = self._tv

    # -- queries -------------------------------------------------------------------

    def fronts(self) -> Iterable[Front]:
        f = self.head
        while f is not None:
            yield f
            f = f.next

    def total_variation(self) -> float:
        return sum(_jump(f) for f in self.fronts())

    def np_total(self) -> float:
        return sum(f.strength for f in self.fronts() if f.family == NP)

    def profile(self) -> Profile:
        """Trace of the solution at the current ``x``."""
        x = self.x
        bps: list[float] = []
        vals: list[State] = [self.head.left if self.head is not None else self.boundary_state]
        infos: list[FrontInfo] = []
        for f in self.fronts():
            y = f.y_at(x)
            if bps and y <= bps[-1]:
                # coincident fronts (emitted at this very x): merge the jump
                vals[-1] = f.right
                if vals[-1] == vals[-2]:
                    bps.pop()
                    vals.pop()
                    infos.pop()
                continue
            bps.append(y)
            vals.append(f.right)
            infos.append(FrontInfo(f.family, f.kind, f.strength))
        return Profile(x, tuple(bps), tuple(vals), tuple(infos))

    def finish_segments(self) -> list[Segment]:
        """Segments of all fronts, the live ones truncated at the current ``x``."""
        segs = list(self.segments)
        for f in self.fronts():
            segs.append(Segment(f.x0, f.y0, self.x, f.y_at(self.x), f.family, f.kind, f.strength))
        return segs


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


def constant_profile(U: State, x: float = 0.0) -> Profile:
    return Profile(x, (), (U,))


def _snap(s: State, p: ModelParams) -> State:
    bd = p.bounds
    return State(min(max(s.rho, bd.rho_lo), bd.rho_hi), min(max(s.v, -bd.v_max), bd.v_max))


def discretize_initial(
    U0: Callable[[float], State],
    sp: SchemeParams,
    y_lo: float,
    y_hi: float,
    p: ModelParams | None = None,
    tv_samples: int = 4096,
) -> Profile:
    """Piecewise-constant approximation of ``U0`` on ``[y_lo, y_hi]`` at ``x = 0``.

    ``U0`` must be constant for ``y <= y_lo`` (the far-field tail) and the
    profile ends at ``y_hi <= 0``.  The cell width ``w`` is chosen so that
    ``w * TV(U0) <= 2^-nu``; each cell takes a sampled value of ``U0`` and
    jumps of ``U0`` are located by bisection, so step data are reproduced
    exactly and the total variation never exceeds that of ``U0``.
    """
    p = p or ModelParams()
    if not y_lo < y_hi:
        raise DomainError("need y_lo < y_hi")
    ys = [y_lo + (y_hi - y_lo) * i / tv_samples for i in range(tv_samples + 1)]
    samples = [U0(y) for y in ys]
    tv = sum(abs(b.rho - a.rho) + abs(b.v - a.v) for a, b in zip(samples, samples[1:]))
    if not math.isfinite(tv) or tv > 1e3:
        raise DomainError(f"unbounded total-variation estimate {tv}")
    if tv == 0.0:
        return constant_profile(_snap(samples[0], p))
    n = max(1, math.ceil((y_hi - y_lo) * tv / 2.0 ** (-sp.nu)))
    grid = [y_lo + (y_hi - y_lo) * i / n for i in range(n + 1)]
    vals = [U0(y) for y in grid]
    bps: list[float] = []
    out: list[State] = [_snap(vals[0], p)]
    for j in range(n):
        gl, gr = vals[j], vals[j + 1]
        if gl == gr:
            continue
        lo, hi = grid[j], grid[j + 1]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if U0(mid) == gl:
                lo = mid
            else:
                hi = mid
        nxt = _snap(gr, p)
        if nxt == out[-1]:
            continue
        if bps and hi <= bps[-1]:
            out[-1] = nxt
            continue
        bps.append(hi)
        out.append(nxt)
    if bps and bps[-1] >= y_hi:
        bps.pop()
        v = out.pop()
        out[-1] = v
    return Profile(0.0, tuple(bps), tuple(out))


def accurate_solver(U_L: State, U_R: State, p: ModelParams, sp: SchemeParams,
                    x: float = 0.0, y: float = 0.0) -> list[Front]:
    """ARS: exact Riemann solution emitted as fronts from ``(x, y)``."""
    tracker = _bare_tracker(p, sp)
    return tracker._ars(U_L, U_R, x, y)


def simplified_solver(U_L: State, U_R: State, incoming: tuple[Front, Front], p: ModelParams,
                      sp: SchemeParams, x: float = 0.0, y: float = 0.0) -> list[Front]:
    """SRS: incoming strengths kept, mismatch carried by one non-physical front.

    ``incoming`` is the (left, right) pair of colliding fronts; a
    non-physical left front crossing a physical right front keeps the physical
    strength and updates the non-physical size.
    """
    tracker = _bare_tracker(p, sp)
    a, b = incoming
    a = _copy_front(a, left=U_L)
    b = _copy_front(b, right=U_R)
    if a.family == NP and b.family != NP:
        return tracker._np_cross(a, b, x, y)
    return tracker._srs(a, b, x, y)


def _copy_front(f: Front, left: State | None = None, right: State | None = None) -> Front:
    return Front(f.id, f.family, f.kind, f.strength, f.x0, f.y0, f.speed,
                 left if left is not None else f.left, right if right is not None else f.right)


def _bare_tracker(p: ModelParams, sp: SchemeParams) -> FrontTracker:
    return _EmptyTracker(p, sp)


class _EmptyTracker(FrontTracker):
    """Tracker without fronts, used to call the local solvers directly."""

    def __init__(self, p: ModelParams, sp: SchemeParams) -> None:  # noqa: D401
        self.p = p
        self.sp = sp
        self.lam_hat = sp.resolved_lambda_hat(p)
        self.x = 0.0
        self.log = EventLog()
        self.segments = []
        self.head = self.tail = None
        self.n_fronts = 0
        self.n_events = 0
        self.max_raref = 0.0
        self.max_tv = 0.0
        self._tv = 0.0
        self._next_id = 0
        self._heap = []
        self._span = _v_span(p)
        self._nudge_unit = 2.0 ** (-sp.nu - 20)


@dataclass
class RunResult:
    """Outcome of :func:`evolve`: final profile, event log and run statistics."""

    profile: Profile
    log: EventLog
    max_raref_strength: float
    max_tv: float
    n_events: int
    segments: list[Segment]


def evolve(prof: Profile, x_target: float, p: ModelParams, sp: SchemeParams) -> RunResult:
    """Front-track ``prof`` from ``prof.x`` to ``x_target``."""
    if not x_target >= prof.x:
        raise SchedulingError(f"x_target={x_target} must not precede prof.x={prof.x}")
    tr = FrontTracker(prof, p, sp)
    tr.advance_to(x_target)
    segs = tr.finish_segments() if sp.record_segments else []
    return RunResult(tr.profile(), tr.log, tr.max_raref, tr.max_tv, tr.n_events, segs)


class TrackedSolution:
    """Front-tracking trajectory ``x -> U(x, .)`` queryable at any ``x >= prof.x``.

    Queries at increasing ``x`` reuse the running tracker; a query behind the
    current position restarts from the initial profile, so results depend
    only on the query point.
    """

    def __init__(self, prof: Profile, p: ModelParams, sp: SchemeParams) -> None:
        self.initial = prof
        self.p = p
        self.sp = sp
        self._tracker = FrontTracker(prof, p, sp)

    @property
    def tracker(self) -> FrontTracker:
        return self._tracker

    def __call__(self, x: float) -> Profile:
        if x < self._tracker.x:
            self._tracker = FrontTracker(self.initial, self.p, self.sp)
        self._tracker.advance_to(x)
        return self._tracker.profile()

    def events_between(self, x0: float, x1: float) -> int:
        """Number of logged interactions with ``x0 < x <= x1`` (up to the tracked position)."""
        return sum(1 for ev in self._tracker.log.events if x0 < ev.x <= x1)


def diagnostics(prof: Profile) -> dict:
    """TV (sum of component variations), sup-deviation from ``(1, 0)``, front statistics."""
    tv = 0.0
    for u0, u1 in zip(prof.values, prof.values[1:]):
        tv += abs(u1.rho - u0.rho) + abs(u1.v - u0.v)
    linf = max(max(abs(u.rho - 1.0), abs(u.v)) for u in prof.values)
    counts = {KIND_SHOCK: 0, KIND_FAN: 0, KIND_NP: 0}
    np_total = 0.0
    max_raref = 0.0
    for info in prof.fronts or ():
        counts[info.kind] = counts.get(info.kind, 0) + 1
        if info.family == NP:
            np_total += info.strength
        elif info.kind == KIND_FAN:
            max_raref = max(max_raref, abs(info.strength - 1.0))
    return {
        "tv": tv,
        "linf": linf,
        "front_counts": counts,
        "np_total_strength": np_total,
        "max_raref_strength": max_raref,
    }


def write_wave_diagram(segments: list[Segment], path) -> None:
    """Write segments as ``x0,y0,x1,y1,family,kind,strength`` lines to a path or text stream."""
    if hasattr(path, "write"):
        _write_segments(segments, path)
        return
    with open(path, "w", encoding="utf-8") as fh:
        _write_segments(segments, fh)


def _write_segments(segments: list[Segment], fh) -> None:
    fh.write("x0,y0,x1,y1,family,kind,strength\n")
    for s in segments:
        fh.write(f"{s.x0!r},{s.y0!r},{s.x1!r},{s.y1!r},{s.family},{s.kind},{s.strength!r}\n")
