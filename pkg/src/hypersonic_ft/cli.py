"""Command-line orchestration of the experiments.

Usage::

    hypersonic-ft run CONFIG.ini [--jobs N] [--output DIR] [--seed S]
    hypersonic-ft preset NAME [section.key=value ...] [--jobs N] [--output DIR] [--seed S]

Configurations are INI files with the sections ``[experiment]``,
``[model]``, ``[scheme]``, ``[initial_data]`` and ``[sweep]``; lists are
comma separated.  Every run writes ``results.csv`` and a ``manifest``;
depending on the experiment also ``ratefit.txt``, ``events.log`` and
``wavediagram.txt``.

Exit codes: 0 success, 2 configuration error, 3 solver error,
4 acceptance-threshold failure (``preset acceptance``).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .analysis import (
    CSV_COLUMNS,
    asymptotic_checks,
    fit_rate,
    l1_distance,
    optimal_rate_experiment,
    published_coefficients,
    u_error,
)
from .errors import CellError, ConfigError, DomainError, HypersonicError
from .front_tracking import (
    FrontTracker,
    Profile,
    SchemeParams,
    TrackedSolution,
    diagnostics,
    write_wave_diagram,
)
from .riemann import sample_fan, solve_boundary, solve_interior
from .wave_curves import DomainBounds, ModelParams, State

EXPERIMENTS = (
    "optimal_rate",
    "global_rate",
    "riemann_single",
    "front_tracking_run",
    "asymptotic_checks",
    "semigroup_check",
)

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_ACCEPTANCE = 0, 2, 3, 4


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Resolved experiment configuration (one INI file)."""

    experiment: str
    model: dict[str, float] = field(default_factory=dict)
    scheme: dict[str, float] = field(default_factory=dict)
    initial_data: dict[str, str] = field(default_factory=dict)
    sweep: dict[str, list[float]] = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "out"
    record_runtime: bool = True

    # -- derived objects ------------------------------------------------------

    def model_params(self, epsilon: float | None = None, tau2: float | None = None,
                     a_inf: float | None = None) -> ModelParams:
        m = self.model
        bounds = DomainBounds(m.get("rho_lo", 0.05), m.get("rho_hi", 20.0), m.get("v_max", 3.0))
        return ModelParams(
            a_inf if a_inf is not None else m.get("a_inf", 1.0),
            epsilon if epsilon is not None else m.get("epsilon", 0.0),
            tau2 if tau2 is not None else m.get("tau2", 0.0),
            m.get("b0", 0.0),
            bounds,
            m.get("delta0", 0.05),
        )

    def scheme_params(self, nu: int | None = None, record_segments: bool = False) -> SchemeParams:
        s = self.scheme
        return SchemeParams(
            nu=int(nu if nu is not None else s.get("nu", 8)),
            varrho=s.get("varrho"),
            lambda_hat=s.get("lambda_hat"),
            kappa=s.get("kappa", 1.0),
            max_fronts=int(s.get("max_fronts", 50_000)),
            record_segments=record_segments,
        )

    @property
    def nu_ref(self) -> int:
        return int(self.scheme.get("nu_ref", int(self.scheme.get("nu", 8)) + 4))

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        # the output directory is deliberately omitted so that manifests of
        # identical runs written to different places are byte-identical
        cp["experiment"] = {"type": self.experiment, "seed": str(self.seed),
                            "record_runtime": str(self.record_runtime).lower()}
        cp["model"] = {k: repr(v) for k, v in sorted(self.model.items())}
        cp["scheme"] = {k: repr(v) for k, v in sorted(self.scheme.items())}
        cp["initial_data"] = dict(sorted(self.initial_data.items()))
        cp["sweep"] = {k: ", ".join(repr(x) for x in v) for k, v in sorted(self.sweep.items())}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


_MODEL_KEYS = {"a_inf", "epsilon", "tau2", "b0", "delta0", "rho_lo", "rho_hi", "v_max", "mu_budget"}

#: Default admissibility budget for ``||mu|| (TV + |b0|)``.
DEFAULT_MU_BUDGET = 0.1
_SCHEME_KEYS = {"nu", "nu_ref", "varrho", "lambda_hat", "kappa", "max_fronts"}
_SWEEP_KEYS = {"epsilon", "tau2", "mu", "x", "nu", "a_inf", "delta", "samples", "h"}


def _float(section: str, key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{section}.{key}: expected a number, got {text!r}") from None


def _float_list(section: str, key: str, text: str) -> list[float]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ConfigError(f"{section}.{key}: empty list")
    return [_float(section, key, t) for t in items]


def parse_config(text: str, overrides: Sequence[str] = ()) -> ExperimentConfig:
    """Parse INI text (plus ``section.key=value`` overrides) into a config."""
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unreadable configuration: {exc}") from None
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        lhs, value = item.split("=", 1)
        section, key = lhs.split(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key.strip(), value.strip())
    if not cp.has_section("experiment") or "type" not in cp["experiment"]:
        raise ConfigError("experiment.type: missing")
    exp = cp["experiment"]["type"].strip()
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment.type: unknown experiment {exp!r}; expected one of {EXPERIMENTS}")
    cfg = ExperimentConfig(exp)
    e = cp["experiment"]
    try:
        cfg.seed = int(e.get("seed", "0"))
    except ValueError:
        raise ConfigError(f"experiment.seed: expected an integer, got {e.get('seed')!r}") from None
    cfg.output_dir = e.get("output_dir", "out")
    cfg.record_runtime = e.get("record_runtime", "true").strip().lower() in ("1", "true", "yes")
    for section, keys, target in (("model", _MODEL_KEYS, cfg.model), ("scheme", _SCHEME_KEYS, cfg.scheme)):
        if cp.has_section(section):
            for key, val in cp[section].items():
                if key not in keys:
                    raise ConfigError(f"{section}.{key}: unknown key")
                target[key] = _float(section, key, val)
    if cp.has_section("initial_data"):
        cfg.initial_data = {k: v.strip() for k, v in cp["initial_data"].items()}
    if cp.has_section("sweep"):
        for key, val in cp["sweep"].items():
            if key not in _SWEEP_KEYS:
                raise ConfigError(f"sweep.{key}: unknown key")
            cfg.sweep[key] = _float_list("sweep", key, val)
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    try:
        cfg.model_params()
    except DomainError as exc:
        raise ConfigError(f"model: {exc}") from None
    nu = cfg.scheme.get("nu", 8)
    if nu < 1 or nu != int(nu):
        raise ConfigError(f"scheme.nu: must be a positive integer, got {nu}")
    for key, vals in cfg.sweep.items():
        if key in ("epsilon", "tau2", "mu", "delta", "h") and any(v < 0.0 for v in vals):
            raise ConfigError(f"sweep.{key}: values must be non-negative")
        if key == "x" and any(v <= 0.0 for v in vals):
            raise ConfigError("sweep.x: values must be positive")
    path = cfg.initial_data.get("path")
    if path is not None and not Path(path).is_file():
        raise ConfigError(f"initial_data.path: file {path!r} does not exist")
    if cfg.experiment in ("global_rate", "semigroup_check", "front_tracking_run", "riemann_single") \
            and not cfg.initial_data:
        raise ConfigError("initial_data: required for this experiment")
    if cfg.initial_data:
        initial_profile(cfg, cfg.model_params())


def load_config(path: str | Path, overrides: Sequence[str] = ()) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config file {path!s}: {exc.strerror}") from None
    return parse_config(text, overrides)


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------


def _param(params: dict, key: str, default: float) -> float:
    if key not in params:
        return default
    return _float("initial_data", key, str(params[key]))


def builtin_initial_data(name: str, params: dict | None = None, seed: int = 0,
                         p: ModelParams | None = None) -> Profile:
    """Named initial data at ``x = 0``; all far-field tails are ``(1, 0)`` except ``riemann``'s.

    * ``riemann``: ``rho_l, v_l | rho_r, v_r`` jumping at ``y0`` (default -0.5);
    * ``boundary_riemann``: the constant state ``(rho, v)`` against the wall;
    * ``n_wave``: ``rho = 1`` and ``v`` alternating ``+-amplitude`` on ``pieces``
      equal cells of ``[-width, 0)``;
    * ``random_bv``: ``pieces`` seeded random jumps on ``[-width, 0)``
      normalised to total variation exactly ``tv``.
    """
    params = dict(params or {})
    p = p or ModelParams()
    if name == "riemann":
        ul = State(_param(params, "rho_l", 1.0), _param(params, "v_l", 0.0))
        ur = State(_param(params, "rho_r", 1.0), _param(params, "v_r", 0.0))
        y0 = _param(params, "y0", -0.5)
        _check_in_domain((ul, ur), p)
        if ul == ur:
            return Profile(0.0, (), (ul,))
        return Profile(0.0, (y0,), (ul, ur))
    if name == "boundary_riemann":
        u = State(_param(params, "rho", 1.0), _param(params, "v", 0.0))
        _check_in_domain((u,), p)
        return Profile(0.0, (), (u,))
    if name == "n_wave":
        amp = _param(params, "amplitude", 0.1)
        n = int(_param(params, "pieces", 8))
        width = _param(params, "width", 1.0)
        if n < 1:
            raise ConfigError("initial_data.pieces: must be >= 1")
        bps = tuple(-width + width * i / n for i in range(n))
        vals = [State(1.0, 0.0)] + [State(1.0, amp if i % 2 == 0 else -amp) for i in range(n)]
        _check_in_domain(vals, p)
        return Profile(0.0, bps, tuple(vals))
    if name == "random_bv":
        tv = _param(params, "tv", 0.5)
        n = int(_param(params, "pieces", 20))
        width = _param(params, "width", 1.0)
        if n < 1 or not tv > 0.0:
            raise ConfigError("initial_data: random_bv needs pieces >= 1 and tv > 0")
        bd = p.bounds
        if tv >= min(1.0 - bd.rho_lo, bd.v_max):
            raise ConfigError(f"initial_data.tv: budget {tv} incompatible with the state domain")
        rng = np.random.default_rng(seed)
        jumps = rng.uniform(-1.0, 1.0, size=(n, 2))
        jumps *= tv / float(np.abs(jumps).sum())
        vals = [State(1.0, 0.0)]
        for d_rho, d_v in jumps:
            prev = vals[-1]
            vals.append(State(prev.rho + float(d_rho), prev.v + float(d_v)))
        bps = tuple(-width + width * i / n for i in range(n))
        return Profile(0.0, bps, tuple(vals))
    raise ConfigError(f"initial_data.name: unknown generator {name!r}")


def _check_in_domain(states, p: ModelParams) -> None:
    for s in states:
        if not p.bounds.contains(s):
            raise ConfigError(f"initial_data: state {tuple(s)} outside the state domain")


def read_profile_table(path: str | Path) -> Profile:
    """Read ``y,rho,v`` rows; the first row (``y`` ignored, e.g. ``-inf``) is the far field."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].strip().startswith("#") or rec[0].strip() == "y":
                continue
            try:
                rows.append(tuple(float(t) for t in rec))
            except ValueError:
                raise ConfigError(f"initial_data.path: malformed row {rec!r}") from None
    if not rows:
        raise ConfigError("initial_data.path: empty table")
    vals = tuple(State(r[1], r[2]) for r in rows)
    bps = tuple(r[0] for r in rows[1:])
    try:
        return Profile(0.0, bps, vals)
    except DomainError as exc:
        raise ConfigError(f"initial_data.path: {exc}") from None


def initial_profile(cfg: ExperimentConfig, p: ModelParams) -> Profile:
    data = cfg.initial_data
    if "path" in data:
        return read_profile_table(data["path"])
    name = data.get("name")
    if name is None:
        raise ConfigError("initial_data.name: missing")
    params = {k: v for k, v in data.items() if k != "name"}
    return builtin_initial_data(name, params, cfg.seed, p)


# ---------------------------------------------------------------------------
# experiment cells (module level so that worker processes can pickle them)
# ---------------------------------------------------------------------------


def _row(**kw) -> dict:
    return {c: kw.get(c, "") for c in CSV_COLUMNS}


def _global_cell(args) -> list[dict]:
    cfg, eps, tau2, xs = args
    try:
        return _global_cell_rows(cfg, eps, tau2, xs)
    except ConfigError:
        raise
    except HypersonicError as exc:
        raise CellError(f"global_rate epsilon={eps!r} tau2={tau2!r}", exc) from exc


def _global_cell_rows(cfg: ExperimentConfig, eps: float, tau2: float, xs: list[float]) -> list[dict]:
    from .semigroup import profile_l1, semigroup_apply

    p = cfg.model_params(eps, tau2)
    sp = cfg.scheme_params()
    U0 = initial_profile(cfg, p)
    budget = cfg.model.get("mu_budget", DEFAULT_MU_BUDGET)
    if (eps + tau2) * (diagnostics(U0)["tv"] + abs(p.b0)) >= budget:
        return [_row(a_inf=p.a_inf, epsilon=eps, tau2=tau2, b0=p.b0, nu=sp.nu, x=x,
                     l1_error="skipped") for x in xs]
    t0 = time.perf_counter()
    traj = TrackedSolution(U0, p, sp)
    rows = []
    for x in xs:
        prof = traj(x)
        ref = semigroup_apply(U0, x, cfg.nu_ref, p)
        d = diagnostics(prof)
        rows.append(_row(a_inf=p.a_inf, epsilon=eps, tau2=tau2, b0=p.b0, nu=sp.nu, x=x,
                         l1_error=profile_l1(prof, ref, p.b0), u_error=u_error(prof, ref, p),
                         tv=d["tv"], np_strength=d["np_total_strength"],
                         runtime_ms=(time.perf_counter() - t0) * 1e3))
    return rows


def _optimal_cell(args) -> tuple[list[dict], str]:
    a_inf, delta, eps_list, tau2_list, x = args
    try:
        res = optimal_rate_experiment(a_inf, delta, eps_list, tau2_list, x)
    except HypersonicError as exc:
        raise CellError(f"optimal_rate a_inf={a_inf!r}", exc) from exc
    ce, ct = published_coefficients(a_inf)
    text = (res.eps_fit.summary(f"optimal_rate a_inf={a_inf!r} epsilon")
            + f"published_coefficient={ce!r}\n"
            + res.tau2_fit.summary(f"optimal_rate a_inf={a_inf!r} tau2")
            + f"published_coefficient={ct!r}\n")
    return res.rows(), text


def _parallel_map(fn: Callable, cells: list, jobs: int) -> list:
    if jobs <= 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, cells))


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


@dataclass
class RunArtifacts:
    rows: list[dict] = field(default_factory=list)
    ratefit: str = ""
    extra: dict[str, str] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)


def _sweep(cfg: ExperimentConfig, key: str, default: Sequence[float]) -> list[float]:
    return list(cfg.sweep.get(key, default))


def _exp_optimal_rate(cfg: ExperimentConfig, jobs: int) -> RunArtifacts:
    a_list = _sweep(cfg, "a_inf", [cfg.model.get("a_inf", 1.0)])
    delta = _sweep(cfg, "delta", [1e-3])[0]
    eps = _sweep(cfg, "epsilon", [4e-3, 2e-3, 1e-3])
    tau2 = _sweep(cfg, "tau2", [4e-3, 2e-3, 1e-3])
    x = _sweep(cfg, "x", [1.0])[0]
    out = _parallel_map(_optimal_cell, [(a, delta, eps, tau2, x) for a in a_list], jobs)
    art = RunArtifacts()
    for rows, text in out:
        art.rows.extend(rows)
        art.ratefit += text
    return art


def _mu_grid(cfg: ExperimentConfig) -> list[tuple[float, float]]:
    if "mu" in cfg.sweep:
        return [(m / 2.0, m / 2.0) for m in cfg.sweep["mu"]]
    eps = _sweep(cfg, "epsilon", [cfg.model.get("epsilon", 0.0)])
    tau2 = _sweep(cfg, "tau2", [cfg.model.get("tau2", 0.0)])
    if len(eps) != len(tau2):
        raise ConfigError("sweep: epsilon and tau2 lists must have equal length (or use sweep.mu)")
    return list(zip(eps, tau2))


def _exp_global_rate(cfg: ExperimentConfig, jobs: int) -> RunArtifacts:
    xs = sorted(_sweep(cfg, "x", [1.0]))
    grid = _mu_grid(cfg)
    cells = [(cfg, 0.0, 0.0, xs)] + [(cfg, e, t, xs) for e, t in grid if e + t > 0.0]
    results = _parallel_map(_global_cell, cells, jobs)
    art = RunArtifacts()
    for rows in results:
        art.rows.extend(rows)
    floor = {r["x"]: r["l1_error"] for r in results[0]}
    done = [r for rows in results[1:] for r in rows if r["l1_error"] != "skipped"]
    l1 = {(r["epsilon"] + r["tau2"], r["x"]): r["l1_error"] for r in done}
    ue = {(r["epsilon"] + r["tau2"], r["x"]): r["u_error"] for r in done}
    mus = sorted({m for m, _ in l1})
    if len(mus) >= 2:
        x_fit = 1.0 if 1.0 in xs else xs[-1]
        mu_fit = fit_rate(mus, [l1[(m, x_fit)] for m in mus], window=len(mus))
        art.ratefit += mu_fit.summary(f"global_rate l1 vs mu at x={x_fit!r}")
        ufit = fit_rate(mus, [ue[(m, x_fit)] for m in mus], window=len(mus))
        art.ratefit += ufit.summary(f"global_rate u_error vs mu at x={x_fit!r}")
    if mus and len(xs) >= 2:
        m_fit = max(mus)
        xfit = fit_rate(xs, [l1[(m_fit, x)] for x in xs], window=len(xs))
        art.ratefit += xfit.summary(f"global_rate l1 vs x at mu={m_fit!r}")
    flagged = [r for r in done if r["l1_error"] <= 10.0 * floor[r["x"]]]
    skipped = sum(len(rows) for rows in results[1:]) - len(done)
    art.ratefit += f"[resolution_floor]\nflagged_cells={len(flagged)}\nskipped_cells={skipped}\n"
    return art


def _exp_riemann_single(cfg: ExperimentConfig, jobs: int) -> RunArtifacts:
    p = cfg.model_params()
    prof = initial_profile(cfg, p)
    art = RunArtifacts()
    xs = _sweep(cfg, "x", [1.0])
    lim = p.limit()
    if prof.breakpoints:
        y0 = prof.breakpoints[0]
        fans = (solve_interior(prof.values[0], prof.values[1], p),
                solve_interior(prof.values[0], prof.values[1], lim))
    else:
        y0 = 0.0
        fans = (solve_boundary(prof.values[0], p), solve_boundary(prof.values[0], lim))
    lines = []
    for tag, fan in zip(("full", "limit"), fans):
        for w in fan.waves:
            lines.append(f"{tag},{int(w.wave.family)},{w.wave.kind.value},{w.wave.alpha!r},"
                         f"{w.xi_lo!r},{w.xi_hi!r}")
    art.extra["fan.txt"] = "system,family,kind,alpha,xi_lo,xi_hi\n" + "\n".join(lines) + "\n"
    for x in xs:
        t0 = time.perf_counter()
        profs = [_sampled_fan_profile(fan, y0, x, p if i == 0 else lim, 2000)
                 for i, fan in enumerate(fans)]
        lo = min(min(pr.breakpoints, default=y0) for pr in profs) - 1.0
        hi = p.b0 * x if fans[0].boundary_attached else max(max(pr.breakpoints, default=y0) for pr in profs) + 1.0
        art.rows.append(_row(a_inf=p.a_inf, epsilon=p.epsilon, tau2=p.tau2, b0=p.b0, x=x,
                             l1_error=l1_distance(profs[0], profs[1], (lo, hi)),
                             u_error=u_error(profs[0], profs[1], p, (lo, hi)),
                             runtime_ms=(time.perf_counter() - t0) * 1e3))
    return art


def _sampled_fan_profile(fan, y0: float, x: float, p: ModelParams, n: int) -> Profile:
    """Step approximation of a self-similar solution (rarefactions sampled on ``n`` rays each)."""
    bps: list[float] = []
    vals = [fan.left_state]
    for i, w in enumerate(fan.waves):
        if w.xi_lo == w.xi_hi:
            bps.append(y0 + w.xi_lo * x)
            vals.append(fan.constant_states[i + 1])
            continue
        for k in range(n):
            xi = w.xi_lo + (w.xi_hi - w.xi_lo) * (k + 0.5) / n
            bps.append(y0 + (w.xi_lo + (w.xi_hi - w.xi_lo) * k / n) * x)
            vals.append(sample_fan(fan, xi, p))
        bps.append(y0 + w.xi_hi * x)
        vals.append(fan.constant_states[i + 1])
    keep_b, keep_v = [], [vals[0]]
    for y, v in zip(bps, vals[1:]):
        if keep_b and y <= keep_b[-1]:
            keep_v[-1] = v
            continue
        keep_b.append(y)
        keep_v.append(v)
    return Profile(x, tuple(keep_b), tuple(keep_v))


def _exp_front_tracking(cfg: ExperimentConfig, jobs: int) -> RunArtifacts:
    from .semigroup import profile_l1, semigroup_apply

    p = cfg.model_params()
    sp = cfg.scheme_params(record_segments=True)
    U0 = initial_profile(cfg, p)
    xs = sorted(_sweep(cfg, "x", [1.0]))
    art = RunArtifacts()
    t0 = time.perf_counter()
    tr = FrontTracker(U0, p, sp)
    for x in xs:
        tr.advance_to(x)
        prof = tr.profile()
        ref = semigroup_apply(U0, x, cfg.nu_ref, p)
        d = diagnostics(prof)
        art.rows.append(_row(a_inf=p.a_inf, epsilon=p.epsilon, tau2=p.tau2, b0=p.b0, nu=sp.nu, x=x,
                             l1_error=profile_l1(prof, ref, p.b0), u_error=u_error(prof, ref, p),
                             tv=d["tv"], np_strength=d["np_total_strength"],
                             runtime_ms=(time.perf_counter() - t0) * 1e3))
    buf = io.StringIO()
    buf.write("x,y,event_type,in_strengths,out_strengths\n")
    for line in tr.log.lines():
        buf.write(line + "\n")
    art.extra["events.log"] = buf.getvalue()
    seg_buf = io.StringIO()
    write_wave_diagram(tr.finish_segments(), seg_buf)
    art.extra["wavediagram.txt"] = seg_buf.getvalue()
    return art


def _exp_asymptotic(cfg: ExperimentConfig, jobs: int) -> RunArtifacts:
    a_list = _sweep(cfg, "a_inf", [0.5, 1.0, 2.0])
    ladder = _sweep(cfg, "delta", [10 ** (-k / 2) for k in range(4, 11)])
    mu = _sweep(cfg, "mu", ladder)
    if len(mu) != len(ladder):
        raise ConfigError("sweep.mu: must match the length of sweep.delta")
    art = RunArtifacts()
    table = ["a_inf,delta,epsilon,tau2,beta1,strength_defect,bernoulli_defect,curve_defect"]
    for a in a_list:
        rep = asymptotic_checks(a, ladder, mu)
        for lv in rep.levels:
            art.rows.append(_row(a_inf=a, epsilon=lv.epsilon, tau2=lv.tau2, b0=0.0, delta=lv.delta))
            table.append(f"{a!r},{lv.delta!r},{lv.epsilon!r},{lv.tau2!r},{lv.beta1!r},"
                         f"{lv.strength_defect!r},{lv.bernoulli_defect!r},{lv.curve_defect!r}")
        art.ratefit += f"[asymptotic_checks a_inf={a!r}]\n"
        for k, v in rep.slopes.items():
            art.ratefit += f"{k}_slope={v!r}\n"
    art.extra["asymptotics.csv"] = "\n".join(table) + "\n"
    return art


def _exp_semigroup(cfg: ExperimentConfig, jobs: int) -> RunArtifacts:
    from .semigroup import semigroup_defect

    p = cfg.model_params().limit()
    U0 = initial_profile(cfg, p)
    xs = _sweep(cfg, "x", [0.5])
    nus = [int(n) for n in _sweep(cfg, "nu", [cfg.nu_ref])]
    art = RunArtifacts()
    for nu in nus:
        for x in xs:
            t0 = time.perf_counter()
            d = semigroup_defect(U0, x, x, p, nu)
            art.rows.append(_row(a_inf=p.a_inf, epsilon=0.0, tau2=0.0, b0=p.b0, nu=nu, x=2 * x,
                                 l1_error=d, runtime_ms=(time.perf_counter() - t0) * 1e3))
    return art


_RUNNERS = {
    "optimal_rate": _exp_optimal_rate,
    "global_rate": _exp_global_rate,
    "riemann_single": _exp_riemann_single,
    "front_tracking_run": _exp_front_tracking,
    "asymptotic_checks": _exp_asymptotic,
    "semigroup_check": _exp_semigroup,
}


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

PRESETS: dict[str, str] = {
    "optimal_rate": """
[experiment]
type = optimal_rate
[model]
b0 = 0
[sweep]
a_inf = 1, 2
delta = 1e-3
epsilon = 4e-3, 2e-3, 1e-3
tau2 = 4e-3, 2e-3, 1e-3
x = 1
""",
    "global_rate": """
[experiment]
type = global_rate
seed = 7
[model]
a_inf = 1
b0 = -0.1
[scheme]
nu = 10
nu_ref = 14
[initial_data]
name = random_bv
tv = 0.5
pieces = 20
[sweep]
mu = 8e-3, 4e-3, 2e-3, 1e-3
x = 0.5, 1, 2
""",
    "front_tracking_run": """
[experiment]
type = front_tracking_run
seed = 7
[model]
a_inf = 1
epsilon = 2e-3
tau2 = 2e-3
b0 = -0.1
[scheme]
nu = 8
[initial_data]
name = random_bv
tv = 0.5
pieces = 20
[sweep]
x = 0.5, 1
""",
    "riemann_single": """
[experiment]
type = riemann_single
[model]
a_inf = 1
epsilon = 1e-3
tau2 = 1e-3
[initial_data]
name = riemann
rho_l = 1
v_l = 0.2
rho_r = 1
v_r = -0.2
[sweep]
x = 1
""",
    "asymptotic_checks": """
[experiment]
type = asymptotic_checks
[sweep]
a_inf = 0.5, 1, 2
""",
    "semigroup_check": """
[experiment]
type = semigroup_check
[model]
a_inf = 1
b0 = -0.1
[initial_data]
name = random_bv
tv = 0.3
pieces = 3
[sweep]
x = 0.25
nu = 8, 10, 12
""",
    "acceptance": """
[experiment]
type = optimal_rate
seed = 7
record_runtime = false
[model]
b0 = 0
[scheme]
nu = 7
nu_ref = 11
[initial_data]
name = random_bv
tv = 0.5
pieces = 20
[sweep]
a_inf = 1, 2
delta = 1e-3
epsilon = 4e-3, 2e-3, 1e-3
tau2 = 4e-3, 2e-3, 1e-3
mu = 8e-3, 4e-3, 2e-3, 1e-3
x = 1
""",
}


def _acceptance(cfg: ExperimentConfig, jobs: int) -> RunArtifacts:
    """Fast deterministic subset of the acceptance criteria (quantitative checks only)."""
    art = RunArtifacts()
    lines = []
    # optimal-rate coefficients
    opt = _exp_optimal_rate(cfg, jobs)
    art.rows.extend(opt.rows)
    art.ratefit += opt.ratefit
    for a in _sweep(cfg, "a_inf", [1.0]):
        res = optimal_rate_experiment(a, _sweep(cfg, "delta", [1e-3])[0],
                                      _sweep(cfg, "epsilon", [4e-3]), _sweep(cfg, "tau2", [4e-3]), 1.0)
        ce, ct = published_coefficients(a)
        for tag, got, want in (("epsilon", res.eps_fit.leading_coefficient, ce),
                               ("tau2", res.tau2_fit.leading_coefficient, ct)):
            ok = abs(got - want) <= 0.1 * abs(want)
            lines.append(f"{'PASS' if ok else 'FAIL'} optimal_rate a_inf={a!r} {tag}: "
                         f"measured {got:.6g}, published {want:.6g}")
    # asymptotics
    ladder = [10 ** (-k / 2) for k in range(4, 11)]
    for a in (0.5, 1.0, 2.0):
        rep = asymptotic_checks(a, ladder, ladder)
        ok = rep.all_linear()
        lines.append(f"{'PASS' if ok else 'FAIL'} asymptotic_checks a_inf={a!r}: slopes "
                     + ", ".join(f"{k}={v:.4f}" for k, v in rep.slopes.items()))
    # a reduced global-rate sweep
    gcfg = ExperimentConfig("global_rate", dict(cfg.model, a_inf=1.0, b0=-0.1), dict(cfg.scheme),
                            dict(cfg.initial_data), {"mu": _sweep(cfg, "mu", [8e-3, 4e-3, 2e-3, 1e-3]),
                                                     "x": [1.0]}, cfg.seed, cfg.output_dir, False)
    glob = _exp_global_rate(gcfg, jobs)
    art.rows.extend(glob.rows)
    art.ratefit += glob.ratefit
    errs = [(r["epsilon"] + r["tau2"], r["l1_error"]) for r in glob.rows
            if r["epsilon"] + r["tau2"] > 0 and r["l1_error"] != "skipped"]
    fit = fit_rate([m for m, _ in errs], [e for _, e in errs], window=len(errs))
    ok = 0.9 <= fit.slope <= 1.1
    lines.append(f"{'PASS' if ok else 'FAIL'} global_rate (nu={int(cfg.scheme.get('nu', 7))}) "
                 f"exponent {fit.slope:.4f}")
    art.extra["acceptance.txt"] = "\n".join(lines) + "\n"
    art.failures = [ln for ln in lines if ln.startswith("FAIL")]
    return art


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def write_outputs(cfg: ExperimentConfig, art: RunArtifacts, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "results.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in art.rows:
            if not cfg.record_runtime:
                row = dict(row, runtime_ms="")
            fh.write(",".join(_fmt(row[c]) for c in CSV_COLUMNS) + "\n")
    if art.ratefit:
        (out_dir / "ratefit.txt").write_text(art.ratefit, encoding="utf-8")
    for name, text in art.extra.items():
        (out_dir / name).write_text(text, encoding="utf-8")
    manifest = f"# hypersonic_ft {__version__}\n" + cfg.to_ini()
    (out_dir / "manifest").write_text(manifest, encoding="utf-8")


def execute(cfg: ExperimentConfig, jobs: int = 1, acceptance: bool = False) -> tuple[int, RunArtifacts]:
    runner = _acceptance if acceptance else _RUNNERS[cfg.experiment]
    art = runner(cfg, jobs)
    write_outputs(cfg, art, Path(cfg.output_dir))
    if acceptance and art.failures:
        return EXIT_ACCEPTANCE, art
    return EXIT_OK, art


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypersonic-ft", description=__doc__.split("\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweep cells")
    common.add_argument("--output", help="output directory (overrides experiment.output_dir)")
    common.add_argument("--seed", type=int, help="random seed (overrides experiment.seed)")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run an experiment configuration")
    r.add_argument("config")
    pr = sub.add_parser("preset", parents=[common], help="run a built-in configuration")
    pr.add_argument("name", choices=sorted(PRESETS))
    pr.add_argument("overrides", nargs="*", help="section.key=value")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args, extra = parser.parse_known_args(argv)
    # overrides may follow the options; anything else left over is an error
    if extra and (args.command != "preset" or any(t.startswith("-") for t in extra)):
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    if args.command == "preset":
        args.overrides = list(args.overrides) + extra
    try:
        if args.command == "run":
            cfg = load_config(args.config)
        else:
            cfg = parse_config(PRESETS[args.name], args.overrides)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.output is not None:
            cfg.output_dir = args.output
        if args.jobs < 1:
            raise ConfigError("--jobs: must be >= 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    acceptance = args.command == "preset" and args.name == "acceptance"
    try:
        code, art = execute(cfg, args.jobs, acceptance)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HypersonicError as exc:
        print(f"solver error in experiment {cfg.experiment!r}: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_SOLVER
    if acceptance:
        sys.stdout.write(art.extra.get("acceptance.txt", ""))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
