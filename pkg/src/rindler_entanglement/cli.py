"""Command-line driver: single-point reports, scans, Fig. 5 data and oracle checks.

All physical inputs are dimensionless ratios. ``scenario.kappa`` (Alice's
acceleration) only sets the scale of the dimensionful rate columns.

Config files are INI::

    [scenario]
    name = AntiParallelTransverse
    kappa = 1.0
    kappa_ratio = 1.0     ; kappa_B / kappa_A
    rho0 = 0.0            ; kappa_A * rho0

    [detectors]
    x_a = 1.0
    x_b = 1.0

    [scan.x]
    min = 0.1
    max = 3
    steps = 30

Scalar keys are overridden with ``--set section.key=value``.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.special import kv

from . import crossterm as ct
from . import geometry as geo
from .entanglement import Verdict, verdict, xi
from .errors import NonConvergence, RindlerError
from .numerics import QuadratureConfig
from .oracle import (
    OracleConfig,
    brute_force_cross_term,
    brute_force_response_rate,
    k0_identity_integral,
    k0_integral_representation,
)
from .response import excitation_rate_per_proper_time

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


# Dimensionless parameters of each variant and their defaults.
SCENARIO_PARAMS = {
    "ParallelTransverse": {"rho0": 1.0},
    "ParallelDifferentAcceleration": {"kappa_ratio": 0.5},
    "ParallelLongitudinal": {"x0": 2.0},
    "AntiParallelTransverse": {"kappa_ratio": 1.0, "rho0": 0.0},
    "AntiParallelLongitudinal": {"x1": 1.0},
    "Oriented": {"phi": math.pi / 2},
    "BoostedPair": {"alpha": 0.5, "rho0": 1.0},
}
DETECTOR_KEYS = ("x", "x_a", "x_b", "m2_a", "m2_b")
FIGURE5_SIGMAS = (0.0, math.pi / 2, math.pi)

SCAN_COLUMNS = (
    "xi",
    "rate_a",
    "rate_b",
    "cross_term_kind",
    "cross_term_abs",
    "bound",
    "concurrence_rate_reduced",
    "concurrence_rate",
    "negativity_rate",
    "verdict",
    "failure",
)

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_PI_EXPR = re.compile(rf"^\s*(?:({_NUM})\s*\*?\s*)?pi\s*(?:/\s*({_NUM}))?\s*$")


def parse_number(text: str) -> float:
    """Float, or a multiple of pi such as ``pi``, ``pi/2`` or ``5*pi/6``."""
    text = str(text).strip()
    m = _PI_EXPR.match(text)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


@dataclass(frozen=True)
class ScanAxis:
    name: str
    lo: float
    hi: float
    steps: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.lo])
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.steps)
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "AntiParallelTransverse"
    kappa: float = 1.0
    params: dict = field(default_factory=dict)
    x_a: float = 1.0
    x_b: float = 1.0
    m2_a: float = 1.0
    m2_b: float = 1.0
    c: float = 1.0
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    with_oracle: bool = False
    axes: tuple = ()
    x_range: tuple = (0.05, 3.0, 60)
    sigmas: tuple = FIGURE5_SIGMAS
    checks: tuple = ()
    out: Optional[str] = None


def _scenario_and_detectors(cfg: RunConfig, overrides: Optional[dict] = None):
    """Build the geometry objects from dimensionless inputs."""
    vals = dict(cfg.params)
    vals.update({"x_a": cfg.x_a, "x_b": cfg.x_b})
    for k, v in (overrides or {}).items():
        if k == "x":
            vals["x_a"] = vals["x_b"] = v
        else:
            vals[k] = v
    k = cfg.kappa
    name = cfg.scenario
    if name == "ParallelTransverse":
        s = geo.ParallelTransverse(k, vals["rho0"] / k)
    elif name == "ParallelDifferentAcceleration":
        s = geo.ParallelDifferentAcceleration(k, k * vals["kappa_ratio"])
    elif name == "ParallelLongitudinal":
        s = geo.ParallelLongitudinal(k, vals["x0"] / k)
    elif name == "AntiParallelTransverse":
        s = geo.AntiParallelTransverse(k, k * vals["kappa_ratio"], vals["rho0"] / k)
    elif name == "AntiParallelLongitudinal":
        s = geo.AntiParallelLongitudinal(k, vals["x1"] / k)
    elif name == "Oriented":
        s = geo.Oriented(k, vals["phi"])
    else:
        s = geo.BoostedPair(k, vals["alpha"], vals["rho0"] / k)
    ka, kb = s.kappa_alice, s.kappa_bob
    det_a = geo.Detector(vals["x_a"] * ka, ka, cfg.m2_a, "A")
    det_b = geo.Detector(vals["x_b"] * kb, kb, cfg.m2_b, "B")
    return s, det_a, det_b


# ---------------------------------------------------------------- config


def _apply_sets(parser: configparser.ConfigParser, sets):
    for item in sets or ():
        if "=" not in item:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        key, value = item.split("=", 1)
        if "." not in key:
            raise ConfigError(f"--set key must be section.key, got {key!r}")
        section, opt = key.rsplit(".", 1)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, opt.strip(), value.strip())


def _get(parser, section, key, default, conv=parse_number):
    if parser.has_option(section, key):
        return conv(parser.get(section, key))
    return default


def _positive_int(text) -> int:
    try:
        v = int(str(text).strip())
    except ValueError:
        raise ConfigError(f"not an integer: {text!r}") from None
    if v < 1:
        raise ConfigError(f"expected an integer >= 1, got {v}")
    return v


def load_config(path: Optional[str] = None, sets=()) -> RunConfig:
    """Read an INI file plus ``--set`` overrides into a validated RunConfig."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from None
    _apply_sets(parser, sets)

    name = parser.get("scenario", "name", fallback="AntiParallelTransverse").strip()
    if name not in SCENARIO_PARAMS:
        raise ConfigError(f"unknown scenario {name!r}; valid variants: "
                          + ", ".join(SCENARIO_PARAMS))
    known = SCENARIO_PARAMS[name]
    params = dict(known)
    if parser.has_section("scenario"):
        for key, raw in parser.items("scenario"):
            if key in ("name", "kappa"):
                continue
            if key not in known:
                raise ConfigError(f"{name} has no parameter {key!r}; expected one of "
                                  + ", ".join(known))
            params[key] = parse_number(raw)
    kappa = _get(parser, "scenario", "kappa", 1.0)

    det = {}
    if parser.has_section("detectors"):
        for key, raw in parser.items("detectors"):
            if key not in DETECTOR_KEYS:
                raise ConfigError(f"unknown detector key {key!r}")
            det[key] = parse_number(raw)
    x_a = det.get("x_a", det.get("x", 1.0))
    x_b = det.get("x_b", det.get("x", 1.0))

    quad = QuadratureConfig(
        abs_tol=_get(parser, "quadrature", "abs_tol", 1e-10),
        rel_tol=_get(parser, "quadrature", "rel_tol", 1e-8),
        max_subdivisions=_get(parser, "quadrature", "max_subdivisions", 200_000, _positive_int),
    )
    default_oc = OracleConfig()
    eps = parser.get("oracle", "epsilon_values", fallback=None)
    window = _get(parser, "oracle", "window", None)
    oc = OracleConfig(
        window=window,
        epsilon_values=(tuple(parse_number(e) for e in eps.split(","))
                        if eps else default_oc.epsilon_values),
        grid_density=_get(parser, "oracle", "grid_density", default_oc.grid_density),
        cfg=default_oc.cfg,
    )
    with_oracle = parser.getboolean("oracle", "enabled", fallback=False)

    axes = []
    for section in parser.sections():
        if not section.startswith("scan."):
            continue
        axis = section[len("scan."):]
        if axis not in known and axis not in DETECTOR_KEYS[:3]:
            raise ConfigError(f"scan axis {axis!r} is not a parameter of {name}")
        spacing = parser.get(section, "spacing", fallback="linear").strip()
        if spacing not in ("linear", "log"):
            raise ConfigError(f"spacing must be linear or log, got {spacing!r}")
        try:
            steps = int(parser.get(section, "steps", fallback="0"))
        except ValueError:
            raise ConfigError(f"[{section}] steps must be an integer") from None
        if steps < 1:
            raise ConfigError(f"[{section}] steps must be >= 1")
        lo = _get(parser, section, "min", None)
        hi = _get(parser, section, "max", None)
        if lo is None or hi is None:
            raise ConfigError(f"[{section}] needs min and max")
        if spacing == "log" and not (lo > 0 and hi > 0):
            raise ConfigError(f"[{section}] log spacing needs positive bounds")
        axes.append(ScanAxis(axis, lo, hi, steps, spacing))

    fig = "figure5"
    x_range = (_get(parser, fig, "x_min", 0.05), _get(parser, fig, "x_max", 3.0),
               _get(parser, fig, "steps", 60, _positive_int))
    raw_sigmas = parser.get(fig, "sigmas", fallback=None)
    sigmas = (tuple(parse_number(v) for v in raw_sigmas.split(",") if v.strip())
              if raw_sigmas is not None else FIGURE5_SIGMAS)

    raw_checks = parser.get("oracle_check", "checks", fallback=None)
    checks = (tuple(c.strip() for c in raw_checks.split(",") if c.strip())
              if raw_checks is not None else tuple(ORACLE_CHECKS))
    unknown = [c for c in checks if c not in ORACLE_CHECKS]
    if unknown:
        raise ConfigError(f"unknown oracle checks {unknown}; valid: " + ", ".join(ORACLE_CHECKS))

    cfg = RunConfig(scenario=name, kappa=kappa, params=params, x_a=x_a, x_b=x_b,
                    m2_a=det.get("m2_a", 1.0), m2_b=det.get("m2_b", 1.0),
                    c=_get(parser, "run", "c", 1.0), quadrature=quad, oracle=oc,
                    with_oracle=with_oracle, axes=tuple(axes), x_range=x_range,
                    sigmas=sigmas, checks=checks)
    try:
        _scenario_and_detectors(cfg)
    except RindlerError as exc:
        raise ConfigError(f"invalid parameters: {exc}") from None
    return cfg


# ---------------------------------------------------------------- evaluation


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    if isinstance(v, (int, np.integer)):
        return str(v)
    return str(v.value if hasattr(v, "value") else v)


def evaluate_point(cfg: RunConfig, overrides: Optional[dict] = None) -> dict:
    """One row of results; raises NonConvergence on numerical failure."""
    s, det_a, det_b = _scenario_and_detectors(cfg, overrides)
    rep = verdict(s, det_a, det_b, cfg.quadrature, cfg.c)
    kind = type(rep.cross_term).__name__
    if isinstance(rep.cross_term, ct.DeltaTerm):
        ct_abs = 0.0 if rep.cross_term.vanishes else None
    else:
        ct_abs = abs(rep.cross_term.value)
    reduced = None
    if rep.concurrence_rate is not None:
        reduced = rep.concurrence_rate / (cfg.c ** 2 * det_a.m_squared) if cfg.c > 0 else None
    row = {
        "scenario": s.name,
        "x_a": det_a.x,
        "x_b": det_b.x,
        "sigma": getattr(s, "sigma", None),
        "xi": rep.xi,
        "rate_a": rep.response_rates[0].per_proper_time,
        "rate_b": rep.response_rates[1].per_proper_time,
        "cross_term_kind": kind,
        "cross_term_abs": ct_abs,
        "bound": rep.bound,
        "concurrence_rate_reduced": reduced,
        "concurrence_rate": rep.concurrence_rate,
        "negativity_rate": rep.negativity_rate,
        "verdict": rep.verdict.value,
        "notes": rep.notes,
    }
    if isinstance(rep.cross_term, ct.DeltaTerm):
        row["delta_omega"] = rep.cross_term.omega
        row["delta_coefficient"] = rep.cross_term.coefficient
    if cfg.with_oracle and not s.delta_family:
        bf = brute_force_cross_term(s, det_a, det_b, cfg.oracle)
        ref = rep.cross_term.value
        row["oracle_delta"] = abs(bf - ref) / abs(ref)
    return row


def run_report(cfg: RunConfig) -> str:
    row = evaluate_point(cfg)
    keys = ["scenario", "x_a", "x_b", "sigma", "cross_term_kind", "cross_term_abs",
            "delta_omega", "delta_coefficient", "xi", "verdict", "rate_a", "rate_b",
            "concurrence_rate_reduced", "concurrence_rate", "negativity_rate", "bound",
            "oracle_delta", "notes"]
    lines = []
    width = max(len(k) for k in keys)
    for k in keys:
        if k not in row or row[k] is None or row[k] == "":
            continue
        v = row[k]
        if isinstance(v, complex):
            text = f"{v.real:.12g}{v.imag:+.12g}j"
        else:
            text = _fmt(v)
        lines.append(f"{k.ljust(width)}  {text}")
    return "\n".join(lines) + "\n"


def _scan_point(args):
    cfg, overrides = args
    try:
        row = evaluate_point(cfg, overrides)
        row["failure"] = ""
    except NonConvergence as exc:
        row = {"failure": f"NonConvergence:{exc.operation or 'quadrature'}"}
    return row


def scan_grid(cfg: RunConfig) -> list:
    """Grid points in lexicographic order over the axes (first axis slowest)."""
    grids = [a.values() for a in cfg.axes]
    mesh = np.meshgrid(*grids, indexing="ij")
    flat = [m.ravel() for m in mesh]
    return [{a.name: float(f[i]) for a, f in zip(cfg.axes, flat)}
            for i in range(flat[0].size)]


def _write_csv(header, rows, out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(r.get(h)) for h in header])
    text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def run_scan(cfg: RunConfig, jobs: int = 1):
    """Returns (csv text, number of failed points)."""
    if not cfg.axes:
        raise ConfigError("scan needs at least one [scan.<parameter>] section")
    points = scan_grid(cfg)
    work = [(cfg, p) for p in points]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_point, work))
    else:
        results = [_scan_point(w) for w in work]
    rows = [{**p, **r} for p, r in zip(points, results)]
    header = [a.name for a in cfg.axes] + list(SCAN_COLUMNS)
    failed = sum(1 for r in rows if r.get("failure"))
    return _write_csv(header, rows, cfg.out), failed


def figure5_header(sigmas) -> list:
    return ["x"] + [f"sigma={format(s, '.12g')}" for s in sigmas]


def figure5_rows(x_range, sigmas) -> tuple:
    """x and Xi(x, sigma)/(e^{2 pi x} - 1) for each sigma."""
    if not sigmas:
        raise ConfigError("figure5 needs at least one sigma")
    lo, hi, steps = x_range
    if not (0 < lo < hi) or steps < 2:
        raise ConfigError("figure5 needs 0 < x_min < x_max and steps >= 2")
    xs = np.linspace(lo, hi, int(steps))
    cols = [np.array([xi(x, s) / math.expm1(2 * math.pi * x) for x in xs]) for s in sigmas]
    return xs, cols


def run_figure5(cfg: RunConfig) -> str:
    xs, cols = figure5_rows(cfg.x_range, cfg.sigmas)
    header = figure5_header(cfg.sigmas)
    rows = [dict(zip(header, [x] + [c[i] for c in cols])) for i, x in enumerate(xs)]
    return _write_csv(header, rows, cfg.out)


# ---------------------------------------------------------------- oracle checks


@dataclass(frozen=True)
class OracleCheck:
    name: str
    tolerance: float
    run: Callable[[], tuple]


def _response_check(x):
    def run():
        det = geo.Detector(x, 1.0)
        return brute_force_response_rate(det), excitation_rate_per_proper_time(det)
    return run


def _cross_check(scenario):
    def run():
        d = geo.Detector(1.0, 1.0)
        return (brute_force_cross_term(scenario, d, d),
                ct.cross_term(scenario, d, d).value)
    return run


def _k0_check():
    return k0_integral_representation(1.0), 0.4210244382


def _k0_identity_check():
    ell, e, p, damp = 4 / 3, 2.25, 0.75, 0.2
    closed = 2 * kv(0, ell * np.sqrt(e * e - (p + 1j * damp) ** 2))
    return k0_identity_integral(ell, e, p, damp), complex(closed)


def _inertial_limit_check():
    v = 0.6
    s = geo.BoostedPair(1e-3, math.atanh(v), 1.0)
    d = geo.Detector(1.0, 1e-3)
    return (ct.cross_term(s, d, d).value,
            ct.inertial_limit_cross_term(ct.InertialLimitParams(v, 1.0, 1.0, 1.0)))


ORACLE_CHECKS = {
    "response_x0.5": OracleCheck("response_x0.5", 1e-2, _response_check(0.5)),
    "response_x1": OracleCheck("response_x1", 1e-2, _response_check(1.0)),
    "response_x2": OracleCheck("response_x2", 1e-2, _response_check(2.0)),
    "ParallelLongitudinal": OracleCheck(
        "ParallelLongitudinal", 2e-2, _cross_check(geo.ParallelLongitudinal(1.0, 2.0))),
    "AntiParallelLongitudinal_x1+": OracleCheck(
        "AntiParallelLongitudinal_x1+", 2e-2, _cross_check(geo.AntiParallelLongitudinal(1.0, 1.0))),
    "AntiParallelLongitudinal_x1-": OracleCheck(
        "AntiParallelLongitudinal_x1-", 2e-2, _cross_check(geo.AntiParallelLongitudinal(1.0, -1.0))),
    "Oriented": OracleCheck("Oriented", 2e-2, _cross_check(geo.Oriented(1.0, math.pi / 2))),
    "BoostedPair": OracleCheck("BoostedPair", 2e-2, _cross_check(geo.BoostedPair(1.0, 0.5, 1.0))),
    "k0_integral": OracleCheck("k0_integral", 1e-9, _k0_check),
    "k0_identity": OracleCheck("k0_identity", 1e-6, _k0_identity_check),
    "inertial_limit": OracleCheck("inertial_limit", 1e-2, _inertial_limit_check),
}


def _run_check(name):
    t = time.perf_counter()
    try:
        measured, expected = ORACLE_CHECKS[name].run()
    except NonConvergence as exc:
        return name, None, None, f"NonConvergence in {exc.operation or 'quadrature'}: {exc}", \
            time.perf_counter() - t
    return name, measured, expected, "", time.perf_counter() - t


def run_oracle_check(cfg: RunConfig, tolerance: Optional[float] = None, jobs: int = 1):
    """Returns (table text, all passed)."""
    if not cfg.checks:
        raise ConfigError("the oracle check list is empty")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_check, cfg.checks))
    else:
        results = [_run_check(n) for n in cfg.checks]
    lines = [f"{'check':30s} {'measured':>24s} {'expected':>24s} {'rel_err':>10s} "
             f"{'tol':>8s}  result"]
    ok = True
    for name, measured, expected, diag, secs in results:
        tol = tolerance if tolerance is not None else ORACLE_CHECKS[name].tolerance
        if measured is None:
            ok = False
            lines.append(f"{name:30s} {'':>24s} {'':>24s} {'':>10s} {tol:8.1e}  FAIL  {diag}")
            continue
        err = abs(measured - expected) / abs(expected)
        passed = err <= tol
        ok &= passed
        lines.append(f"{name:30s} {_short(measured):>24s} {_short(expected):>24s} "
                     f"{err:10.2e} {tol:8.1e}  {'PASS' if passed else 'FAIL'}  ({secs:.1f}s)")
    text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text, ok


def _short(v) -> str:
    v = complex(v)
    if v.imag == 0:
        return f"{v.real:.8g}"
    return f"{v.real:.6g}{v.imag:+.6g}j"


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rindler-entanglement",
        description="Vacuum entanglement between uniformly accelerated detectors.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a scalar config key (repeatable)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--tolerance", type=float, default=None,
                        help="override every oracle-check tolerance")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("report", parents=[common], help="verdict and rates at one point")
    sub.add_parser("scan", parents=[common], help="CSV over a parameter grid")
    sub.add_parser("figure5", parents=[common],
                   help="Xi/(e^{2 pi x} - 1) against x for several sigma")
    sub.add_parser("oracle-check", parents=[common], help="brute-force cross-validation suite")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = replace(load_config(args.config, args.set), out=args.out)
        if args.command == "report":
            text = run_report(cfg)
            if cfg.out:
                with open(cfg.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        if args.command == "scan":
            text, failed = run_scan(cfg, args.jobs)
            if not cfg.out:
                sys.stdout.write(text)
            if failed:
                print(f"error: {failed} grid point(s) did not converge", file=sys.stderr)
                return EXIT_NUMERIC
            return EXIT_OK
        if args.command == "figure5":
            text = run_figure5(cfg)
            if not cfg.out:
                sys.stdout.write(text)
            return EXIT_OK
        text, ok = run_oracle_check(cfg, args.tolerance, args.jobs)
        sys.stdout.write(text)
        return EXIT_OK if ok else EXIT_FAIL
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergence as exc:
        print(f"non-convergence in {exc.operation or 'quadrature'}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (RindlerError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
