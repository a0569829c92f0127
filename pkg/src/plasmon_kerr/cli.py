"""Command-line sweeps, spatial maps and oracle verification runs.

Every subcommand writes a CSV (``--out`` or stdout) whose leading ``#`` lines
record the full configuration.  Exit codes: 0 success, 1 usage error,
2 numerical-domain error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import ORACLE_ENVS, RunConfig, load_config, metadata_lines
from .errors import DomainError, ParameterError, PlasmonKerrError
from .model import SystemParams
from .oracle import AmplitudeLadder, DEFAULT_LADDER, extract_susceptibilities
from .plasmon_env import PlasmonEnvironment, environment_at, synthetic_fixture
from .susceptibility import SusceptibilityPoint, chi1, chi3, gain_threshold, locate_gain_onset
from .vortex import SpatialGrid, VortexBeam, count_angular_extrema, quantity_map

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2, 3
CHI1_RTOL = 1e-4
CHI3_RTOL = 1e-2


class UsageError(Exception):
    pass


@dataclass
class RunResult:
    text: str
    exit_code: int = EXIT_OK
    svg: str | None = None


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _csv(config: RunConfig, header, rows, extra=None) -> str:
    lines = metadata_lines(config, extra)
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _env_meta(env: PlasmonEnvironment) -> dict:
    return {"gamma": _fmt(env.gamma), "kappa": _fmt(env.kappa), "p": _fmt(env.p)}


def _units() -> dict:
    return {"units": "rates and delta in Gamma_0; chi1 in N mu'^2/(eps0 hbar); "
                     "chi3 in 2 N mu'^4/(3 eps0 hbar^3)"}


def run_spectrum(config: RunConfig) -> RunResult:
    sysp, env = config.system_params(), config.environment_params()
    x, phi, _ = config.drive_point()
    deltas = config.delta_grid()
    c1 = np.atleast_1d(chi1(deltas, x, phi, sysp, env))
    c3 = np.atleast_1d(chi3(deltas, x, phi, sysp, env))
    rows = [(d, a.real, a.imag, b.real, b.imag) for d, a, b in zip(deltas, c1, c3)]
    text = _csv(config, ("delta", "re_chi1", "im_chi1", "re_chi3", "im_chi3"), rows,
                {**_env_meta(env), **_units()})
    return RunResult(text)


def run_phase_sweep(config: RunConfig) -> RunResult:
    sysp, env = config.system_params(), config.environment_params()
    x, _, delta = config.drive_point()
    phis = config.phi_grid()
    c1 = np.atleast_1d(chi1(delta, x, phis, sysp, env))
    c3 = np.atleast_1d(chi3(delta, x, phis, sysp, env))
    rows = [(p, b.real, b.imag, a.real, a.imag) for p, a, b in zip(phis, c1, c3)]
    text = _csv(config, ("phi", "re_chi3", "im_chi3", "re_chi1", "im_chi1"), rows,
                {**_env_meta(env), **_units()})
    return RunResult(text)


def _require_table(config: RunConfig):
    if not config.uses_table():
        raise UsageError(f"{config.scenario} needs a rate table (--rates, or environment source 'fixture')")
    return config.rate_table()


def run_distance_sweep(config: RunConfig) -> RunResult:
    table = _require_table(config)
    sysp = config.system_params()
    x, phi, delta = config.drive_point()
    rows = []
    for d in config.distance_grid(table):
        env = environment_at(table, float(d))
        a, b = chi1(delta, x, phi, sysp, env), chi3(delta, x, phi, sysp, env)
        rows.append((d, env.gamma_perp, env.gamma_par, env.p, a.real, a.imag, b.real, b.imag))
    header = ("d", "gamma_perp", "gamma_par", "p", "re_chi1", "im_chi1", "re_chi3", "im_chi3")
    extra = {"rate_table": table.frequency_note or "unlabelled", **_units()}
    return RunResult(_csv(config, header, rows, extra))


def _threshold_row(sysp: SystemParams, env: PlasmonEnvironment, phi: float):
    x_star = gain_threshold(sysp, env, phi)
    if x_star is None:
        return x_star, math.nan, math.nan
    return x_star, x_star, locate_gain_onset(sysp, env, phi, 0.0, 2 * x_star)


def run_threshold(config: RunConfig) -> RunResult:
    sysp = config.system_params()
    _, phi, _ = config.drive_point()
    header = ("d", "gamma_perp", "gamma_par", "p", "x_threshold", "x_onset_bisection")
    rows = []
    if config.uses_table() and config.environment.get("distance_in_c_over_omega_p") is None:
        table = config.rate_table()
        for d in config.distance_grid(table):
            env = environment_at(table, float(d))
            _, xs, xb = _threshold_row(sysp, env, phi)
            rows.append((d, env.gamma_perp, env.gamma_par, env.p, xs, xb))
    else:
        env = config.environment_params()
        d = config.environment.get("distance_in_c_over_omega_p")
        _, xs, xb = _threshold_row(sysp, env, phi)
        rows.append((math.nan if d is None else d, env.gamma_perp, env.gamma_par, env.p, xs, xb))
    extra = {"note": "x_threshold=nan means no gain at line centre for this phase"}
    return RunResult(_csv(config, header, rows, extra))


def run_map(config: RunConfig) -> RunResult:
    sysp, env = config.system_params(), config.environment_params()
    v = config.vortex
    beam = VortexBeam(strength=1.0, l=int(v["l"]), w=float(v["w"]))
    grid = SpatialGrid(half_extent=float(v["half_extent_in_w"]) * beam.w, n=int(v["n"]))
    _, _, delta = config.drive_point()
    smap = quantity_map(v["quantity"], grid, beam, float(v["X"]), sysp, env, delta)
    xs, ys = grid.mesh()
    rows = zip(xs.ravel(), ys.ravel(), smap.values.ravel())
    extra = {"quantity": smap.quantity, "l": beam.l, "X": _fmt(float(v["X"])), "w": _fmt(beam.w),
             "gamma_prime": _fmt(sysp.gamma_prime), "delta": _fmt(delta), "omega32": _fmt(sysp.omega32),
             **_env_meta(env)}
    d = config.environment.get("distance_in_c_over_omega_p")
    if d is not None:
        extra["d"] = _fmt(d)
    if beam.w <= grid.half_extent:
        extra["angular_extrema_at_w"] = "%d,%d" % count_angular_extrema(smap, beam.w)
    text = _csv(config, ("x", "y", "value"), rows, extra)
    svg = None
    if config.output.get("svg"):
        from .svg import render_heatmap
        svg = render_heatmap(smap, title=f"{smap.quantity}, l={beam.l}")
    return RunResult(text, svg=svg)


def _rel_err(analytic, oracle) -> float:
    return abs(analytic - oracle) / max(abs(oracle), 1e-300)


def _draw_environment(rng, mode):
    if mode == "free_space":
        return PlasmonEnvironment(1.0, 0.0, 0.0), math.nan
    if mode == "fixture":
        table = synthetic_fixture()
        d = float(rng.uniform(*table.d_range))
        return environment_at(table, d), d
    gamma = float(rng.uniform(0.5, 1.5))
    return PlasmonEnvironment.explicit(gamma, float(rng.uniform(0.0, 0.95)) * gamma), math.nan


def run_oracle_check(config: RunConfig, analytic=None, ladder: AmplitudeLadder = DEFAULT_LADDER) -> RunResult:
    """Compare closed forms against ladder fits of exact steady states.

    ``analytic(delta, x, phi, sys, env) -> SusceptibilityPoint`` replaces the
    closed forms; the harness self-test feeds it a deliberately wrong formula.
    """
    o = config.oracle
    draws, mode = int(o["draws"]), o["environment"]
    orders = sorted(set(int(k) for k in o["orders"]))
    if draws < 1:
        raise UsageError("oracle draw count must be >= 1")
    if mode not in ORACLE_ENVS:
        raise UsageError(f"oracle.environment must be one of {ORACLE_ENVS}")
    if not orders or not set(orders) <= {1, 3}:
        raise UsageError("oracle.orders must be a non-empty subset of {1, 3}")
    g_lo, g_hi = (float(v) for v in o["gamma_dprime_range_in_gamma0"])
    if not 0 < g_lo <= g_hi:
        raise UsageError("gamma_dprime range must satisfy 0 < lo <= hi")
    if analytic is None:
        def analytic(delta, x, phi, sysp, env):
            return SusceptibilityPoint(chi1(delta, x, phi, sysp, env), chi3(delta, x, phi, sysp, env))

    rng = np.random.default_rng(int(o["seed"]))
    rows, failures = [], 0
    for k in range(draws):
        env, d = _draw_environment(rng, mode)
        delta = float(rng.uniform(-5, 5))
        phi = float(rng.uniform(0, 2 * math.pi))
        x = float(rng.uniform(0.5, 2.0))
        sysp = SystemParams(0.0, float(rng.uniform(0.1, 0.5)), float(rng.uniform(g_lo, g_hi)))
        status = "ok"
        try:
            ref = extract_susceptibilities(sysp, env, x, phi, delta, ladder)
            ana = analytic(delta, x, phi, sysp, env)
            e1, e3 = _rel_err(ana.chi1, ref.chi1), _rel_err(ana.chi3, ref.chi3)
            resid = ref.residual
        except PlasmonKerrError as exc:
            e1 = e3 = resid = math.nan
            status = f"error: {type(exc).__name__}"
        ok1, ok3 = bool(e1 <= CHI1_RTOL), bool(e3 <= CHI3_RTOL)
        failed = status != "ok" or (1 in orders and not ok1) or (3 in orders and not ok3)
        failures += failed
        rows.append((k, d, delta, phi, x, env.gamma, env.kappa, sysp.gamma_prime, sysp.gamma_dprime,
                     e1, e3, resid, ok1, ok3, "FAIL" if failed else "PASS", status))
    header = ("draw", "d", "delta", "phi", "x", "gamma", "kappa", "gamma_prime", "gamma_dprime",
              "rel_err_chi1", "rel_err_chi3", "fit_residual", "pass_chi1", "pass_chi3", "verdict", "status")
    extra = {"thresholds": f"chi1<={CHI1_RTOL:g},chi3<={CHI3_RTOL:g}", "orders_checked": ",".join(map(str, orders)),
             "failures": f"{failures}/{draws}"}
    return RunResult(_csv(config, header, rows, extra), EXIT_VERIFY if failures else EXIT_OK)


RUNNERS = {
    "spectrum": run_spectrum,
    "phase_sweep": run_phase_sweep,
    "distance_sweep": run_distance_sweep,
    "map": run_map,
    "oracle_check": run_oracle_check,
    "threshold": run_threshold,
}


def run(config: RunConfig) -> RunResult:
    return RUNNERS[config.scenario](config)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plasmon-kerr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--config-json", metavar="JSON", help="inline JSON, merged over --config")
    common.add_argument("--out", metavar="PATH", help="output CSV (default: stdout)")
    common.add_argument("--svg", action="store_true", help="also write an SVG heatmap next to --out (map only)")
    common.add_argument("--rates", metavar="CSV", help="rate table d,gamma_perp,gamma_par")
    common.add_argument("--distance", type=float, metavar="D", help="emitter distance in c/omega_p")
    common.add_argument("--free-space", action="store_true", help="ignore the nanostructure (gamma=1, kappa=0)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("spectrum", "phase-sweep", "distance-sweep", "map", "threshold"):
        sub.add_parser(name, parents=[common])
    oc = sub.add_parser("oracle-check", parents=[common])
    oc.add_argument("--draws", type=int)
    oc.add_argument("--seed", type=int)
    oc.add_argument("--orders", help="comma-separated orders to judge, e.g. 1 or 1,3")
    oc.add_argument("--oracle-env", choices=ORACLE_ENVS)
    return parser


def config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.config_json:
        try:
            inline = json.loads(args.config_json)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--config-json: invalid JSON ({exc})") from None
        cfg = cfg.merged(inline)
    cfg = cfg.merged({"scenario": args.command.replace("-", "_")})
    env = dict(cfg.environment)
    if args.free_space and (args.rates or args.distance is not None):
        raise UsageError("--free-space cannot be combined with --rates or --distance")
    if args.free_space:
        env = {"source": "free_space"}
    if args.rates:
        env = {"source": "table", "path": str(args.rates),
               "distance_in_c_over_omega_p": env.get("distance_in_c_over_omega_p")}
    if args.distance is not None:
        if env["source"] not in ("table", "fixture"):
            raise UsageError("--distance needs --rates or a 'fixture'/'table' environment")
        env["distance_in_c_over_omega_p"] = args.distance
    cfg.environment = env
    if args.out:
        cfg.output["path"] = str(args.out)
    if args.svg:
        if cfg.scenario != "map":
            raise UsageError("--svg applies to the map subcommand only")
        if not cfg.output.get("path"):
            raise UsageError("--svg needs --out")
        cfg.output["svg"] = True
    if cfg.scenario == "oracle_check":
        if args.draws is not None:
            cfg.oracle["draws"] = args.draws
        if args.seed is not None:
            cfg.oracle["seed"] = args.seed
        if args.oracle_env:
            cfg.oracle["environment"] = args.oracle_env
        if args.orders:
            try:
                cfg.oracle["orders"] = [int(s) for s in args.orders.split(",")]
            except ValueError:
                raise UsageError(f"--orders: expected e.g. '1,3', got {args.orders!r}") from None
    return cfg


def _write(result: RunResult, config: RunConfig):
    path = config.output.get("path")
    if not path:
        sys.stdout.write(result.text)
        return
    Path(path).write_text(result.text, encoding="utf-8")
    if result.svg is not None:
        Path(path).with_suffix(".svg").write_text(result.svg, encoding="utf-8")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        config = config_from_args(args)
        result = run(config)
        _write(result, config)
    except (UsageError, ParameterError) as exc:
        print(f"plasmon-kerr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"plasmon-kerr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, PlasmonKerrError) as exc:
        print(f"plasmon-kerr: numerical domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if result.exit_code == EXIT_VERIFY:
        print("plasmon-kerr: verification failed; see the verdict column", file=sys.stderr)
    return result.exit_code
