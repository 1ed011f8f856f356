"""Command-line front end.

Subcommands: cloud, converge, scaling, target, cf, excursion,
selftest.  Each run takes an optional JSON config file plus flat flag
overrides (flags win), writes CSV/JSON artifacts that embed a config
echo, and exits 0 on success, 1 on invariant failure, 2 on config
errors (nothing is written in that case).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__, fastball
from .density import AnnulusIndicator, function_from_config
from .diophantine import (
    cf_expand,
    excursion_profile,
    parse_slope,
    slope_vector,
    write_cf_table,
    write_excursion_trace,
)
from .experiments import (
    cloud_points,
    convergence_study,
    scaling_sweep,
    shrinking_target_search,
)
from .lattice import LatticeKind, LatticeSpec, load_ball, save_ball
from .linalg import MatrixNorm
from .reporting import ensure_dir, fmt_number, write_csv, write_json
from .selftest import KNOWN_FAULTS, run_selftest


class ConfigError(ValueError):
    pass


def _parse_pair(text) -> tuple[float, float]:
    if isinstance(text, (list, tuple)):
        vals = [float(v) for v in text]
    else:
        vals = [float(p) for p in str(text).split(",") if p.strip() != ""]
    if len(vals) != 2:
        raise ConfigError(f"expected two comma-separated numbers, got {text!r}")
    return vals[0], vals[1]


def _parse_grid(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        vals = [float(v) for v in text]
    else:
        vals = [float(p) for p in str(text).split(",") if p.strip() != ""]
    if not vals or any(b <= a for a, b in zip(vals, vals[1:])):
        raise ConfigError(f"grid must be strictly increasing and nonempty: {text!r}")
    return vals


def _parse_f(value) -> dict:
    if value is None:
        return {"kind": "annulus", "r": 1.0, "R": 2.0}
    if isinstance(value, dict):
        return value
    try:
        cfg = json.loads(value)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"test-function config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("test-function config must be a JSON object")
    return cfg


def _resolve_u(opts) -> tuple[float, float]:
    u = opts.get("u")
    slope = opts.get("slope")
    if u is not None and slope is not None:
        raise ConfigError("give either u or slope, not both")
    if slope is not None:
        v = slope_vector(parse_slope(slope))
        return float(v.x), float(v.y)
    if u is None:
        raise ConfigError("missing initial vector: pass --u or --slope")
    return _parse_pair(u)


def _spec(opts) -> LatticeSpec:
    try:
        kind = LatticeKind(opts.get("lattice", "sl2z"))
        norm = MatrixNorm(opts.get("norm", "max"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return LatticeSpec(kind, norm)


def _merge(args: argparse.Namespace, allowed: set) -> dict:
    """Config-file values overridden by explicitly set flags."""
    opts = {}
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - allowed)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        opts.update(loaded)
    for key in allowed:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    return opts


def _echo(subcommand: str, opts: dict, workers: int) -> dict:
    echo = {"subcommand": subcommand, "workers": workers, "version": __version__}
    echo.update({k: v for k, v in sorted(opts.items())})
    return echo


def _out_path(opts, default_name: str) -> str:
    out_dir = opts.get("output_dir") or "."
    ensure_dir(out_dir)
    return os.path.join(out_dir, opts.get("out") or default_name)


# ---------------------------------------------------------------------------
# subcommand runners (each returns the exit code)


def _run_cloud(opts: dict, workers: int) -> int:
    spec = _spec(opts)
    u = _resolve_u(opts)
    T = float(opts.get("T", 100.0))
    window = float(opts.get("window", 3.0))
    if T < 1 or window <= 0:
        raise ConfigError("need T >= 1 and window > 0")
    echo = _echo("cloud", {**opts, "u": list(u)}, workers)
    cache = opts.get("ball_cache")
    if cache and os.path.exists(cache):
        cspec, cT, coeffs = load_ball(cache)
        if cspec != spec or cT != T:
            raise ConfigError(
                f"ball cache {cache} holds ({cspec.kind.value}, {cspec.norm.value}, "
                f"T={cT}), run wants ({spec.kind.value}, {spec.norm.value}, T={T})"
            )
        points = fastball.orbit_points(spec, coeffs, u)
        keep = (np.abs(points[:, 0]) <= window) & (np.abs(points[:, 1]) <= window)
        coeffs, points = coeffs[keep], points[keep]
    else:
        coeffs, points = cloud_points(spec, u, T, window)
        if cache:
            full = fastball.ball_coeffs_fast(spec, T)
            save_ball(cache, spec, T, full)
    path = _out_path(opts, "cloud.csv")
    rows = [
        [fmt_number(points[i, 0]), fmt_number(points[i, 1]),
         *(int(c) for c in coeffs[i])]
        for i in range(points.shape[0])
    ]
    write_csv(path, ["x", "y", "c1", "c2", "c3", "c4"], rows, echo)
    write_json(path + ".config.json", {"rows": len(rows)}, echo)
    print(f"cloud: {len(rows)} points in [-{window}, {window}]^2 -> {path}")
    return 0


def _run_converge(opts: dict, workers: int) -> int:
    spec = _spec(opts)
    u = _resolve_u(opts)
    f_cfg = _parse_f(opts.get("f"))
    f = function_from_config(f_cfg)
    grid = _parse_grid(opts.get("T_grid", [50.0, 100.0, 200.0, 400.0]))
    tol = float(opts.get("tol", 1e-6))
    echo = _echo("converge", {**opts, "u": list(u), "f": f_cfg, "T_grid": grid}, workers)
    report = convergence_study(spec, u, f, grid, tol=tol)
    path = _out_path(opts, "converge.csv")
    rows = [
        [fmt_number(r.T), fmt_number(r.S), fmt_number(r.I),
         fmt_number(r.ratio), fmt_number(r.err)]
        for r in report.rows
    ]
    write_csv(path, ["T", "S", "I", "ratio", "err"], rows, echo)
    write_json(os.path.splitext(path)[0] + ".json", report.payload(), echo)
    for w in report.warnings:
        print(f"warning [{w['kind']}]: {w['detail']}", file=sys.stderr)
    print(
        f"converge: mu_hat={fmt_number(report.mu_hat)} "
        f"error_exponent={fmt_number(report.error_exponent)} -> {path}"
    )
    return 0


def _run_scaling(opts: dict, workers: int) -> int:
    spec = _spec(opts)
    u = _resolve_u(opts)
    f_cfg = _parse_f(opts.get("f"))
    f = function_from_config(f_cfg)
    grid = _parse_grid(opts.get("T_grid", [25.0, 50.0, 100.0, 200.0]))
    alpha = float(opts.get("alpha", 0.5))
    if not -1.0 < alpha < 1.0:
        raise ConfigError("alpha must lie in (-1, 1)")
    mu_hat = opts.get("mu_hat")
    tol = float(opts.get("tol", 1e-6))
    echo = _echo("scaling", {**opts, "u": list(u), "f": f_cfg, "T_grid": grid}, workers)
    report = scaling_sweep(spec, u, f, grid, alpha,
                           mu_hat=float(mu_hat) if mu_hat is not None else None,
                           tol=tol)
    path = _out_path(opts, "scaling.csv")
    rows = [
        [fmt_number(r.T), fmt_number(r.W), fmt_number(r.normalized), fmt_number(r.err)]
        for r in report.rows
    ]
    write_csv(path, ["T", "W", "normalized", "err"], rows, echo)
    write_json(os.path.splitext(path)[0] + ".json", report.payload(), echo)
    for w in report.warnings:
        print(f"warning [{w['kind']}]: {w['detail']}", file=sys.stderr)
    flag = " (slow-convergence regime)" if report.slow_convergence else ""
    print(
        f"scaling: limit={fmt_number(report.limit)} "
        f"delta={fmt_number(report.fitted_delta)}{flag} -> {path}"
    )
    return 0


def _run_target(opts: dict, workers: int) -> int:
    spec = _spec(opts)
    u = _resolve_u(opts)
    v = _parse_pair(opts.get("v", "1,1"))
    grid = _parse_grid(opts.get("T_grid", [10.0, 50.0, 250.0, 1250.0]))
    echo = _echo("target", {**opts, "u": list(u), "v": list(v), "T_grid": grid}, workers)
    report = shrinking_target_search(spec, u, v, grid)
    path = _out_path(opts, "target.csv")
    rows = [
        [fmt_number(r.T), fmt_number(r.distance), *(int(c) for c in r.coeffs)]
        for r in report.rows
    ]
    write_csv(path, ["T", "distance", "c1", "c2", "c3", "c4"], rows, echo)
    write_json(os.path.splitext(path)[0] + ".json", report.payload(), echo)
    print(
        f"target: best={fmt_number(report.rows[-1].distance)} "
        f"loglog_slope={fmt_number(report.loglog_slope)} -> {path}"
    )
    if not report.nonincreasing:
        print("invariant failure: minima are not nonincreasing in T", file=sys.stderr)
        return 1
    return 0


def _run_cf(opts: dict, workers: int) -> int:
    z = parse_slope(opts.get("z", "golden"))
    depth = int(opts.get("depth", 40))
    if depth < 1:
        raise ConfigError("depth must be >= 1")
    exp = cf_expand(z, depth=depth)
    echo = _echo("cf", {**opts, "z": str(opts.get("z", "golden"))}, workers)
    path = _out_path(opts, "cf.csv")
    write_cf_table(path, exp, echo)
    kind = "finite" if exp.finite else "truncated" if exp.truncated else "infinite"
    print(f"cf: {exp.depth} quotients ({kind}) -> {path}")
    for w in exp.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def _run_excursion(opts: dict, workers: int) -> int:
    z_raw = opts.get("z", "golden")
    z = parse_slope(z_raw)
    s1 = float(opts.get("s1", 0.0))
    s2 = float(opts.get("s2", 8.0))
    grid = int(opts.get("grid", 64))
    if not 0 <= s1 <= s2:
        raise ConfigError("need 0 <= s1 <= s2")
    echo = _echo("excursion", {**opts, "z": str(z_raw)}, workers)
    times, heights = excursion_profile(float(z), s1, s2, grid)
    path = _out_path(opts, "excursion.csv")
    write_excursion_trace(path, times, heights, echo)
    peak = max(heights)
    write_json(os.path.splitext(path)[0] + ".json",
               {"peak_height": peak, "samples": len(times)}, echo)
    print(f"excursion: peak height {fmt_number(peak)} on [{s1}, {s2}] -> {path}")
    return 0


def _run_selftest(opts: dict, workers: int) -> int:
    faults = tuple(opts.get("fault") or ())
    try:
        report = run_selftest(faults)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    for r in report["results"]:
        status = "ok" if r["ok"] else "FAIL"
        print(f"[{status}] {r['name']}: {r['detail']}")
    if opts.get("out") or opts.get("output_dir"):
        path = _out_path(opts, "selftest.json")
        write_json(path, report, _echo("selftest", {**opts, "fault": list(faults)},
                                       workers))
        print(f"selftest report -> {path}")
    if not report["ok"]:
        failed = [r["name"] for r in report["results"] if not r["ok"]]
        print(f"selftest failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lattice-orbits",
        description="Norm-ball orbit statistics for plane-acting lattices.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, lattice=True):
        sp.add_argument("--config", help="JSON config file; flags override it")
        sp.add_argument("--out", help="output file name")
        sp.add_argument("--output-dir", dest="output_dir", help="output directory")
        sp.add_argument("--workers", type=int, help="recorded in the config echo")
        if lattice:
            sp.add_argument("--lattice", choices=[k.value for k in LatticeKind])
            sp.add_argument("--norm", choices=[n.value for n in MatrixNorm])
            sp.add_argument("--u", help="initial vector 'x,y'")
            sp.add_argument("--slope", help="slope: name, p/q, or decimal")

    sp = sub.add_parser("cloud", help="export the orbit points in a view window")
    common(sp)
    sp.add_argument("--T", type=float, help="norm-ball radius")
    sp.add_argument("--window", type=float, help="half-width of the square window")
    sp.add_argument("--ball-cache", dest="ball_cache",
                    help="binary ball cache to reuse or create")

    sp = sub.add_parser("converge", help="orbit sums along a T grid vs the density line")
    common(sp)
    sp.add_argument("--f", help="test function as JSON")
    sp.add_argument("--T-grid", dest="T_grid", help="comma-separated increasing T values")
    sp.add_argument("--tol", type=float, help="quadrature tolerance")

    sp = sub.add_parser("scaling", help="T^alpha-rescaled orbit sums")
    common(sp)
    sp.add_argument("--f", help="test function as JSON")
    sp.add_argument("--T-grid", dest="T_grid", help="comma-separated increasing T values")
    sp.add_argument("--alpha", type=float, help="scaling exponent in (-1, 1)")
    sp.add_argument("--mu-hat", dest="mu_hat", type=float,
                    help="covolume estimate from a convergence run")
    sp.add_argument("--tol", type=float, help="quadrature tolerance")

    sp = sub.add_parser("target", help="closest orbit point to a target vector")
    common(sp)
    sp.add_argument("--v", help="target vector 'x,y'")
    sp.add_argument("--T-grid", dest="T_grid", help="comma-separated increasing T values")

    sp = sub.add_parser("cf", help="continued-fraction table of a slope")
    common(sp, lattice=False)
    sp.add_argument("--z", help="slope: name, p/q, or decimal")
    sp.add_argument("--depth", type=int, help="number of partial quotients")

    sp = sub.add_parser("excursion", help="geodesic excursion heights over a slope")
    common(sp, lattice=False)
    sp.add_argument("--z", help="slope: name, p/q, or decimal")
    sp.add_argument("--s1", type=float, help="window start time")
    sp.add_argument("--s2", type=float, help="window end time")
    sp.add_argument("--grid", type=int, help="samples per unit time")

    sp = sub.add_parser("selftest", help="run the named invariant suite")
    common(sp, lattice=False)
    sp.add_argument("--fault", action="append", choices=list(KNOWN_FAULTS),
                    help="activate a deliberate fault (repeatable)")
    return p


_ALLOWED = {
    "cloud": {"lattice", "norm", "u", "slope", "T", "window", "ball_cache",
              "out", "output_dir", "workers"},
    "converge": {"lattice", "norm", "u", "slope", "f", "T_grid", "tol",
                 "out", "output_dir", "workers"},
    "scaling": {"lattice", "norm", "u", "slope", "f", "T_grid", "alpha",
                "mu_hat", "tol", "out", "output_dir", "workers"},
    "target": {"lattice", "norm", "u", "slope", "v", "T_grid",
               "out", "output_dir", "workers"},
    "cf": {"z", "depth", "out", "output_dir", "workers"},
    "excursion": {"z", "s1", "s2", "grid", "out", "output_dir", "workers"},
    "selftest": {"fault", "out", "output_dir", "workers"},
}

_RUNNERS = {
    "cloud": _run_cloud,
    "converge": _run_converge,
    "scaling": _run_scaling,
    "target": _run_target,
    "cf": _run_cf,
    "excursion": _run_excursion,
    "selftest": _run_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    name = args.subcommand
    try:
        opts = _merge(args, _ALLOWED[name])
        workers = int(opts.get("workers") or os.cpu_count() or 1)
        code = _RUNNERS[name](opts, workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
