"""Configuration-driven experiment runner producing machine-readable reports.

Each experiment executes a list of cases against a reference value (an
independent oracle, the closed-form operator value, or a measured constant),
and the report records value, reference, errors, provenance and pass/fail per
case.  For a fixed config and seed the CSV body is byte-identical across runs;
timestamps live in a header comment.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import ConfigError
from .geometry import (
    in_xi_s,
    random_complex_rotation,
    random_null_vector,
    random_real_sphere_point,
)
from .hyperbolic import (
    HGrid,
    XiHPoint,
    experimental_inversion,
    hyperbolic_forward,
    random_lorentz,
)
from .spectral import calibrate, reconstruct_batch
from .testfunctions import Bump, Constant, parse_test_function, random_band_limited, random_null_harmonic
from .transforms import (
    TransformContext,
    dual_extended,
    forward,
    forward_extended,
    series_sum,
    standard_context,
)
from .cycles import l_cycle, rotate_cycle

EXPERIMENT_NAMES = (
    "forward-const",
    "series-consistency",
    "cycle-independence",
    "calibrate",
    "invert",
    "pde-harmonic",
    "pde-wave",
    "hyperbolic-forward",
    "hyperbolic-invert",
)

DEFAULT_TOLERANCES = {
    "forward-const": 1e-7,
    "series-consistency": 1e-8,
    "cycle-independence": 1e-7,
    "calibrate": 1e-5,
    "invert": 1e-5,
    "pde-harmonic": 1e-4,
    "pde-wave": 1e-4,
    "hyperbolic-forward": 1e-7,
    "hyperbolic-invert": 1e-2,
}

MIN_NODES = 8

_CONFIG_KEYS = {
    "experiment", "d", "degree_max", "nodes", "test_function", "seed",
    "output", "tol", "cases", "eps_start", "eps_count",
}


@dataclass(eq=False)
class ExperimentConfig:
    experiment: str
    d: int = 2
    degree_max: int = 4
    nodes: tuple = (64, 64, 64)      # (n_polar, n_azimuthal, n_circle)
    test_function: str = ""
    seed: int = 0
    output: str = ""
    tol: float = None
    cases: int = None                # experiment-specific case count override
    eps_start: float = 0.2
    eps_count: int = 7

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_NAMES:
            raise ConfigError(
                f'unknown value for "experiment": {self.experiment!r}; '
                f"choose one of {', '.join(EXPERIMENT_NAMES)}"
            )
        if self.d != 2:
            raise ConfigError(f'"d": experiments run at d = 2, got {self.d}')
        nodes = tuple(int(n) for n in self.nodes)
        if len(nodes) == 2:
            nodes = nodes + (64,)
        if len(nodes) != 3:
            raise ConfigError('"nodes": expected [n_polar, n_azimuthal] or [n_polar, n_azimuthal, n_circle]')
        if any(n < MIN_NODES for n in nodes):
            raise ConfigError(f'"nodes": node counts must be >= {MIN_NODES}, got {list(nodes)}')
        self.nodes = nodes
        if self.degree_max < 0:
            raise ConfigError('"degree_max": must be >= 0')
        if self.tol is None:
            self.tol = DEFAULT_TOLERANCES[self.experiment]
        if self.tol <= 0:
            raise ConfigError('"tol": tolerance must be positive')
        if self.eps_start <= 0 or self.eps_count < 2:
            raise ConfigError('"eps_start"/"eps_count": need eps_start > 0 and eps_count >= 2')

    def echo(self) -> dict:
        return {
            "experiment": self.experiment,
            "d": self.d,
            "degree_max": self.degree_max,
            "nodes": list(self.nodes),
            "test_function": self.test_function,
            "seed": self.seed,
            "tol": self.tol,
            "cases": self.cases,
            "eps_start": self.eps_start,
            "eps_count": self.eps_count,
        }


def parse_config(text: str) -> ExperimentConfig:
    """Parse a flat JSON object into a validated config with defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "experiment" not in doc:
        raise ConfigError('missing required key "experiment"')
    kwargs = dict(doc)
    for key in ("d", "degree_max", "seed", "cases", "eps_count"):
        if key in kwargs and kwargs[key] is not None:
            try:
                kwargs[key] = int(kwargs[key])
            except (TypeError, ValueError):
                raise ConfigError(f'"{key}": expected an integer, got {kwargs[key]!r}')
    for key in ("tol", "eps_start"):
        if key in kwargs and kwargs[key] is not None:
            try:
                kwargs[key] = float(kwargs[key])
            except (TypeError, ValueError):
                raise ConfigError(f'"{key}": expected a number, got {kwargs[key]!r}')
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass(eq=False)
class ExperimentReport:
    config: dict
    rows: list
    wall_time: float
    all_pass: bool

    def to_json_dict(self) -> dict:
        return {
            "version": __version__,
            "config": self.config,
            "rows": self.rows,
            "wall_time_seconds": self.wall_time,
            "all_pass": self.all_pass,
        }

    def write_json(self, path: str):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def write_csv(self, path: str):
        cols = ["case_id", "inputs", "provenance", "value_re", "value_im",
                "ref_re", "ref_im", "abs_err", "rel_err", "pass"]
        lines = [
            f"# horocauchy {__version__} experiment={self.config['experiment']} "
            f"seed={self.config['seed']} generated={time.strftime('%Y-%m-%dT%H:%M:%S')}",
            ",".join(cols),
        ]
        for row in self.rows:
            lines.append(",".join([
                str(row["case_id"]),
                '"' + row["inputs"].replace('"', "'") + '"',
                row["provenance"],
                repr(float(row["value_re"])),
                repr(float(row["value_im"])),
                repr(float(row["ref_re"])),
                repr(float(row["ref_im"])),
                repr(float(row["abs_err"])),
                repr(float(row["rel_err"])),
                "1" if row["pass"] else "0",
            ]))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def _row(case_id, inputs: str, value: complex, ref: complex, tol: float,
         provenance: str, scale: float = None, note: str = "") -> dict:
    value = complex(value)
    ref = complex(ref)
    abs_err = abs(value - ref)
    rel_err = abs_err / abs(ref) if abs(ref) > 1e-30 else abs_err
    if scale is not None:
        ok = abs_err <= tol * scale
    else:
        ok = rel_err <= tol if abs(ref) > 0 else abs_err <= tol
    return {
        "case_id": case_id,
        "inputs": inputs + (f" | {note}" if note else ""),
        "provenance": provenance,
        "value_re": value.real, "value_im": value.imag,
        "ref_re": ref.real, "ref_im": ref.imag,
        "abs_err": abs_err, "rel_err": rel_err,
        "pass": bool(ok),
        "tolerance": tol if scale is None else tol * scale,
    }


def _fmt_vec(v) -> str:
    v = np.asarray(v)
    if np.iscomplexobj(v):
        parts = [f"{x.real:.6g}{x.imag:+.6g}i" for x in v]
    else:
        parts = [f"{x:.6g}" for x in v]
    return "[" + " ".join(parts) + "]"


def _random_xi_s_point(rng, scale_low=0.05, scale_high=0.8):
    """Random cone point with |scale| <= 0.8, hence delta(Re zeta) <= 0.64 < 0.8.

    The scale cap keeps the Cauchy kernel resolved by 64x64 nodes at the
    reported tolerance (the aliasing error of the geometric series scales as
    scale^n_azimuthal).
    """
    s = rng.uniform(scale_low, scale_high)
    return random_null_vector(rng, 2, s), s


# ---------------------------------------------------------------------------
# experiment bodies


def _run_forward_const(cfg: ExperimentConfig, rng) -> list:
    ctx = standard_context(cfg.nodes[0], cfg.nodes[1], cfg.nodes[2])
    f = Constant(1.0)
    ref = 8 * np.pi
    n_cases = cfg.cases or 100
    draws = [_random_xi_s_point(rng) for _ in range(n_cases)]
    space = ctx.space

    def one(i):
        zeta, s = draws[i]
        assert in_xi_s(space, zeta)
        val = forward(ctx, f, zeta)
        return _row(i, f"zeta={_fmt_vec(zeta)} scale={s:.4f}", val, ref,
                    cfg.tol, "oracle")

    return _parallel(one, n_cases)


def _run_series_consistency(cfg: ExperimentConfig, rng) -> list:
    ctx = standard_context(cfg.nodes[0], cfg.nodes[1], cfg.nodes[2])
    n_cases = cfg.cases or 20
    rows = []
    for i in range(n_cases):
        m = int(rng.integers(0, 4))
        fn = Constant(1.0) if m == 0 else random_null_harmonic(rng, m)
        # max node |zeta.z| <= sqrt(2) * scale; keep it at 0.5
        zeta = random_null_vector(rng, 2, rng.uniform(0.05, 0.5 / np.sqrt(2.0)))
        ref = forward(ctx, fn, zeta)
        val = series_sum(ctx, fn, zeta, 40)
        row = _row(i, f"f={fn.name} zeta={_fmt_vec(zeta)}", val, ref, cfg.tol,
                   "oracle", scale=1.0)
        rows.append(row)
    return rows


def _run_cycle_independence(cfg: ExperimentConfig, rng) -> list:
    ctx = standard_context(cfg.nodes[0], cfg.nodes[1], cfg.nodes[2])
    n_cases = cfg.cases or 10
    f = parse_test_function(cfg.test_function or "null:j=1,k=3,m=2")
    zeta = random_null_vector(rng, 2, 0.3)
    ref = forward(ctx, f, zeta)
    rows = []
    for i in range(n_cases):
        g = random_complex_rotation(ctx.space, rng, magnitude=0.15)
        rotated = rotate_cycle(g, ctx.sphere_cycle)
        ctx_rot = TransformContext(ctx.space, rotated, ctx.separation_threshold, ctx.n_circle)
        val = forward(ctx_rot, f, zeta)
        rows.append(_row(i, f"f={f.name} rotation_norm={np.linalg.norm(g.matrix - np.eye(3)):.4f}",
                         val, ref, cfg.tol, "oracle"))
    return rows


def _run_calibrate(cfg: ExperimentConfig, rng) -> list:
    ctx = standard_context(cfg.nodes[0], cfg.nodes[1], cfg.nodes[2])
    degrees = list(range(cfg.degree_max + 1))
    report = calibrate(ctx, degrees, trials_per_degree=2, points_per_fit=20, rng=rng)
    rows = []
    for i, m in enumerate(degrees):
        rows.append(_row(
            i, f"degree={m} gamma={report.gamma[i]:.8g} ell={report.ell[i]:.8g}",
            report.kappa[i], report.kappa_mean, cfg.tol, "measured",
        ))
    rows.append(_row(
        len(degrees), "kappa_spread", report.kappa_spread, 0.0, cfg.tol,
        "measured", scale=1.0,
    ))
    return rows


def _run_invert(cfg: ExperimentConfig, rng) -> list:
    ctx = standard_context(cfg.nodes[0], cfg.nodes[1], cfg.nodes[2])
    report = calibrate(ctx, range(cfg.degree_max + 1), trials_per_degree=1,
                       points_per_fit=12, rng=rng)
    n_funcs = cfg.cases or 10
    fs = [random_band_limited(rng, cfg.degree_max) for _ in range(n_funcs)]
    xs = [random_real_sphere_point(rng) for _ in range(n_funcs)]
    recon = reconstruct_batch(ctx, fs, xs, cfg.degree_max, report)
    rows = []
    case = 0
    for i, fn in enumerate(fs):
        refs = np.array([complex(np.asarray(fn(x[None, :]))[0]) for x in xs])
        for j in range(len(xs)):
            scale = 1.0 + abs(refs[j])
            rows.append(_row(case, f"f#{i} x={_fmt_vec(xs[j])}", recon[i, j],
                             refs[j], cfg.tol, "oracle", scale=scale))
            case += 1
    return rows


def _fd_second(fn, h: float):
    """Second difference quotient factory: returns g(center, offset_vector)."""
    def second(center, direction):
        return (fn(center + h * direction) - 2.0 * fn(center) + fn(center - h * direction)) / h**2
    return second


def _run_pde_harmonic(cfg: ExperimentConfig, rng) -> list:
    n_cases = cfg.cases or 10
    f = parse_test_function(cfg.test_function or "null:j=2,k=3,m=3")
    h = 1e-3
    rows = []
    for i in range(n_cases):
        x = random_real_sphere_point(rng)
        lc = l_cycle(x, cfg.nodes[2])
        z0 = x * rng.uniform(0.95, 1.05)

        def g(z):
            return dual_extended(f, lc, z)

        second = _fd_second(g, h)
        parts = [second(z0, np.eye(3)[j]) for j in range(3)]
        residual = abs(sum(parts))
        stencil_max = max(
            abs(g(z0)),
            max(abs(g(z0 + h * np.eye(3)[j])) for j in range(3)),
            max(abs(g(z0 - h * np.eye(3)[j])) for j in range(3)),
        )
        scale = 1.0 + stencil_max
        rows.append(_row(i, f"x={_fmt_vec(x)} radial={np.linalg.norm(z0):.4f} scale={scale:.4g}",
                         residual, 0.0, cfg.tol, "oracle", scale=scale))
    return rows


def _run_pde_wave(cfg: ExperimentConfig, rng) -> list:
    ctx = standard_context(cfg.nodes[0], cfg.nodes[1], cfg.nodes[2])
    n_cases = cfg.cases or 10
    f = parse_test_function(cfg.test_function or "const:1")
    h = 1e-2
    rows = []
    for i in range(n_cases):
        zeta0 = (rng.normal(size=3) + 1j * rng.normal(size=3)) * 0.1
        p0 = 1.0

        def fe(zeta, p):
            return forward_extended(ctx, f, zeta, p)

        lap = 0.0 + 0.0j
        for j in range(3):
            e = np.zeros(3)
            e[j] = 1.0
            lap += (fe(zeta0 + h * e, p0) - 2.0 * fe(zeta0, p0) + fe(zeta0 - h * e, p0)) / h**2
        pdd = (fe(zeta0, p0 + h) - 2.0 * fe(zeta0, p0) + fe(zeta0, p0 - h)) / h**2
        residual = abs(lap - pdd)
        scale = max(abs(lap), abs(pdd), 1e-300)
        rows.append(_row(i, f"zeta={_fmt_vec(zeta0)} p={p0} scale={scale:.6g}",
                         residual, 0.0, cfg.tol, "oracle", scale=scale))
    return rows


def _run_hyperbolic_forward(cfg: ExperimentConfig, rng) -> list:
    f = parse_test_function(cfg.test_function or "bump:r=0.6,boost=0.2")
    if not isinstance(f, Bump):
        raise ConfigError("hyperbolic-forward needs a bump test function")
    # the bump's boundary layer and its angular footprint after a boost need
    # ~96 radial and ~160 angular nodes for 1e-7
    n_r, n_theta = max(cfg.nodes[0], 96), max(cfg.nodes[1], 160)
    grid = HGrid(r_max=f.support_radius_from_apex + 1.0, n_r=n_r, n_theta=n_theta)
    n_cases = cfg.cases or 5
    rows = []
    case = 0
    for i in range(n_cases):
        xi = _random_real_null(rng)
        lam = complex(rng.uniform(0.5, 1.5), rng.uniform(0.3, 1.0) * (1 if rng.random() < 0.5 else -1))
        base = hyperbolic_forward(f, XiHPoint(lam, xi), grid)
        # Lorentz covariance; moderate boosts keep the moved bump resolved
        g = random_lorentz(rng, boost_scale=0.35)
        fg = Bump(g @ f.center, f.radius)
        grid_g = HGrid(r_max=fg.support_radius_from_apex + 1.0,
                       n_r=n_r, n_theta=n_theta)
        moved = hyperbolic_forward(fg, XiHPoint(lam, g @ xi), grid_g)
        rows.append(_row(case, f"covariance lam={lam:.4g} xi={_fmt_vec(xi)}",
                         moved, base, cfg.tol, "oracle"))
        case += 1
        # conjugation symmetry for the real-valued bump
        conj = hyperbolic_forward(f, XiHPoint(np.conj(lam), xi), grid)
        rows.append(_row(case, f"conjugation lam={lam:.4g}", conj,
                         np.conj(base), 1e-12, "oracle"))
        case += 1
    return rows


def _random_real_null(rng) -> np.ndarray:
    alpha = 2 * np.pi * rng.random()
    return np.array([1.0, np.cos(alpha), np.sin(alpha)])


def _run_hyperbolic_invert(cfg: ExperimentConfig, rng) -> list:
    f = parse_test_function(cfg.test_function or "bump:r=0.9")
    if not isinstance(f, Bump):
        raise ConfigError("hyperbolic-invert needs a bump test function")
    # the boundary limit needs the grid to resolve the smallest eps: the
    # sqrt(2)-ratio ladder stops at eps_start/2^((count-1)/2), kept >= ~0.025
    # for the 160x256 floor grid
    grid = HGrid(r_max=f.support_radius_from_apex + 0.3,
                 n_r=max(cfg.nodes[0], 160), n_theta=max(cfg.nodes[1], 256))
    eps = tuple(cfg.eps_start * 2.0 ** (-0.5 * k) for k in range(cfg.eps_count))
    n_pts = cfg.cases or 10
    pts = []
    while len(pts) < n_pts:
        r = rng.uniform(0.0, 0.45 * f.radius)
        th = 2 * np.pi * rng.random()
        x = np.array([np.cosh(r), np.sinh(r) * np.cos(th), np.sinh(r) * np.sin(th)])
        if abs(complex(np.asarray(f(x[None, :]))[0])) > 0.25:
            pts.append(x)
    recon, ratios, mean, spread = experimental_inversion(
        f, pts, eps_sequence=eps, grid=grid, n_cycle=min(cfg.nodes[2], 32)
    )
    rows = []
    for i, (x, r) in enumerate(zip(pts, ratios)):
        rows.append(_row(i, f"x={_fmt_vec(x)}", r, mean, cfg.tol, "measured"))
    rows.append(_row(n_pts, f"constant_spread mean={mean:.8g}", spread, 0.0,
                     cfg.tol, "measured", scale=1.0))
    return rows


_RUNNERS = {
    "forward-const": _run_forward_const,
    "series-consistency": _run_series_consistency,
    "cycle-independence": _run_cycle_independence,
    "calibrate": _run_calibrate,
    "invert": _run_invert,
    "pde-harmonic": _run_pde_harmonic,
    "pde-wave": _run_pde_wave,
    "hyperbolic-forward": _run_hyperbolic_forward,
    "hyperbolic-invert": _run_hyperbolic_invert,
}


def _parallel(one, n: int) -> list:
    workers = int(os.environ.get("HOROCAUCHY_THREADS", "1") or "1")
    if workers <= 1:
        results = [one(i) for i in range(n)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(n)))
    return sorted(results, key=lambda r: r["case_id"])


def run(config: ExperimentConfig) -> ExperimentReport:
    """Execute the named experiment; deterministic for a fixed seed."""
    rng = np.random.default_rng(config.seed)
    start = time.perf_counter()
    rows = _RUNNERS[config.experiment](config, rng)
    wall = time.perf_counter() - start
    report = ExperimentReport(
        config=config.echo(),
        rows=rows,
        wall_time=wall,
        all_pass=all(r["pass"] for r in rows),
    )
    if config.output:
        base = config.output
        if base.endswith(".json"):
            base = base[:-5]
        report.write_json(base + ".json")
        report.write_csv(base + ".csv")
    return report
