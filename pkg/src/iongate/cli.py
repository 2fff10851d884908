"""``iongate`` command line: run a computation, write CSV/JSON artifacts plus a manifest.

Exit codes: 0 success, 2 configuration/usage error, 3 physics error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import build_chain, load_config, parse_overrides, run_sizes, split_config
from .errbudget import full_budget
from .errors import ConfigError, PhysicsError
from .chain import spacing_stats
from .gate import optimize_segments, response_profile, scan_detuning, truncated_chain_gate
from .modes import (axial_position_fluctuation, diagonalize, stability_threshold_exact,
                    stability_threshold_uniform, thermal_state)
from .reproduce import FIGURES, build_baseline
from .units import b_parameter, make_params

EXIT_CONFIG = 2
EXIT_PHYSICS = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


class Run:
    """Collects artifacts for one invocation and writes them with a manifest."""

    def __init__(self, args, config, digests):
        self.args = args
        self.out = Path(args.out)
        self.config = config
        self.digests = digests
        self.files = {}

    def _write(self, name, text):
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / name).write_text(text)
        self.files[name] = hashlib.sha256(text.encode()).hexdigest()

    def csv(self, name, header, rows):
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        self._write(name, "\n".join(lines) + "\n")

    def json(self, name, payload):
        self._write(name, json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")

    def finish(self):
        manifest = {
            "command": self.args.command_name,
            "argv": self.args.argv,
            "config": self.config,
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "inputs": self.digests,
            "artifacts": self.files,
        }
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / "manifest.json").write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return None if math.isnan(obj) else float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _pair(text):
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("pair must look like 59,62") from None
    return i, j


def _setup(args):
    config, digests = {}, {}
    if args.config:
        config.update(load_config(args.config))
        digests[str(args.config)] = hashlib.sha256(Path(args.config).read_bytes()).hexdigest()
    config.update(parse_overrides(args.set))
    return config, digests


def _context(run):
    phys, pot, opts = split_config(run.config)
    params = make_params(phys)
    n_ions, n_edge = run_sizes(opts)
    convention = opts.get("beta_convention", getattr(run.args, "beta_convention", None) or "paper")
    chain, curve = build_chain(params, pot, n_ions, n_edge, threads=run.args.threads)
    return params, chain, curve, convention


def _chain_summary(chain, params):
    stats = spacing_stats(chain)
    out = {"n_ions": chain.n_ions, "n_edge": chain.n_edge, "qubit_mean_m": stats.qubit_mean,
           "s_z_m": stats.s_z, "relative_deviation": stats.relative_deviation,
           "alpha2": chain.potential.alpha2, "alpha4": chain.potential.alpha4,
           "iterations": chain.iterations}
    if chain.potential.kind == "quartic":
        out["b"] = b_parameter(chain.potential, params)
    return out


def _write_chain(run, chain, params):
    stats = spacing_stats(chain)
    run.csv("positions.csv", ("index", "z_m"), [(n + 1, z) for n, z in enumerate(chain.positions)])
    run.csv("spacings.csv", ("index", "spacing_m"), [(n + 1, d) for n, d in enumerate(stats.spacings)])
    return _chain_summary(chain, params)


def cmd_chain_solve(run):
    params, chain, curve, _ = _context(run)
    summary = _write_chain(run, chain, params)
    if curve:
        run.csv("b_curve.csv", ("B", "s_z_m"), curve)
    run.json("summary.json", summary)


def cmd_chain_optimize_b(run):
    run.config.pop("b", None)
    for key, flag in (("b_min", run.args.b_min), ("b_max", run.args.b_max)):
        if flag is not None:
            run.config[key] = flag
    params, chain, curve, _ = _context(run)
    summary = _write_chain(run, chain, params)
    summary["b_opt"] = summary.pop("b")
    run.csv("b_curve.csv", ("B", "s_z_m"), curve)
    run.json("summary.json", summary)


def cmd_modes(run):
    params, chain, _, _ = _context(run)
    modes = diagonalize(chain, run.args.axis)
    run.csv(f"modes_{run.args.axis}.csv", ("k", "frequency_hz"),
            [(k + 1, w / (2 * math.pi)) for k, w in enumerate(modes.frequencies)])
    if run.args.vectors:
        header = ("ion",) + tuple(f"b_k{k + 1}" for k in range(modes.vectors.shape[1]))
        run.csv(f"vectors_{run.args.axis}.csv", header,
                [(n + 1,) + tuple(row) for n, row in enumerate(modes.vectors)])
    summary = {"axis": modes.axis, "min_hz": modes.frequencies.min() / (2 * math.pi),
               "max_hz": modes.frequencies.max() / (2 * math.pi)}
    if modes.axis != "axial":
        spacing = spacing_stats(chain).qubit_mean
        summary["stability_threshold_exact_hz"] = stability_threshold_exact(chain) / (2 * math.pi)
        summary["stability_threshold_uniform_hz"] = stability_threshold_uniform(spacing, params) / (2 * math.pi)
    run.json("modes_summary.json", summary)


def cmd_thermal(run):
    params, chain, _, convention = _context(run)
    for axis in ("x", "z"):
        modes = diagonalize(chain, axis)
        th = thermal_state(modes, params, convention)
        run.csv(f"thermal_{axis}.csv", ("k", "frequency_hz", "nbar", "beta_bar"),
                [(k + 1, w / (2 * math.pi), n, b)
                 for k, (w, n, b) in enumerate(zip(modes.frequencies, th.nbar, th.beta_bar))])
        if axis == "z":
            dz = axial_position_fluctuation(chain, modes, th)
            run.csv("fluctuation.csv", ("n", "delta_z_m"), [(n + 1, d) for n, d in enumerate(dz)])
            run.json("thermal_summary.json", {"beta_convention": convention,
                                              "nbar_lowest_axial": th.nbar[0],
                                              "qubit_mean_delta_z_m": dz[chain.qubit_slice].mean()})


def _gate_setup(run):
    params, chain, _, convention = _context(run)
    modes = diagonalize(chain, "x")
    thermal = thermal_state(modes, params, convention)
    a = run.args
    mu = params.omega_x * (1 + a.mu_rel)
    tau = a.tau_periods * 2 * math.pi / params.omega_x
    return params, modes, thermal, mu, tau


def _gate_json(result):
    s = result.schedule
    return {"pair": s.target_pair, "mu_rad_s": s.detuning_mu, "gate_time_s": s.gate_time,
            "amplitudes_rad_s": s.amplitudes, "phase": result.phase,
            "infidelity_exact": result.infidelity_exact,
            "infidelity_quadratic": result.infidelity_quadratic,
            "beta_convention": result.beta_convention}


def _amplitude_rows(result):
    edges = result.schedule.edges
    return [(s + 1, edges[s], edges[s + 1], v) for s, v in enumerate(result.schedule.amplitudes)]


def cmd_gate_optimize(run):
    params, modes, thermal, mu, tau = _gate_setup(run)
    res = optimize_segments(run.args.pair, mu, tau, run.args.segments, modes, thermal, params)
    run.csv("amplitudes.csv", ("segment", "t_start_s", "t_end_s", "omega_rad_s"), _amplitude_rows(res))
    run.json("gate.json", _gate_json(res))


def cmd_gate_scan(run):
    params, modes, thermal, _, tau = _gate_setup(run)
    a = run.args
    grid = np.linspace(a.mu_rel_min, a.mu_rel_max, a.points)
    points = scan_detuning(a.pair, params.omega_x * (1 + grid), tau, a.segments, modes, thermal, params,
                           threads=a.threads)
    run.csv("scan.csv", ("mu_rel", "mu_rad_s", "infidelity"),
            [(g, p.mu, p.infidelity) for g, p in zip(grid, points)])
    f = np.array([p.infidelity for p in points])
    best = int(np.nanargmin(f))
    run.json("scan_summary.json", {
        "best_mu_rel": grid[best], "best_infidelity": f[best],
        "band_rel": [modes.frequencies.min() / params.omega_x - 1, modes.frequencies.max() / params.omega_x - 1],
        "degenerate_points": [p.mu for p in points if p.error],
    })


def cmd_gate_response(run):
    params, modes, thermal, mu, tau = _gate_setup(run)
    res = optimize_segments(run.args.pair, mu, tau, run.args.segments, modes, thermal, params)
    prof = response_profile(res, modes, params, branch=run.args.branch)
    run.csv("response.csv", ("n", "max_shift_m", "relative"),
            [(n + 1, q, r) for n, (q, r) in enumerate(zip(prof.displacement, prof.normalized))])
    run.json("gate.json", _gate_json(res))


def cmd_gate_truncate(run):
    params, modes, thermal, mu, tau = _gate_setup(run)
    a = run.args
    res, dist = truncated_chain_gate(a.pair, a.window, mu, tau, a.segments, modes, thermal, params)
    run.csv("amplitudes.csv", ("segment", "t_start_s", "t_end_s", "omega_rad_s"), _amplitude_rows(res))
    run.json("truncate.json", {**_gate_json(res), "window": a.window, "relative_l2_to_full": dist})


def cmd_errors(run):
    params, chain, _, convention = _context(run)
    axial = diagonalize(chain, "z")
    budget = full_budget(chain, axial, thermal_state(axial, params, convention), diagonalize(chain, "x"))
    run.json("budget.json", budget.as_dict())
    print(budget.table())


def cmd_reproduce(run):
    phys, pot, opts = split_config(run.config)
    if pot or opts:
        raise ConfigError("reproduce pins the baseline; only physical constants may be overridden")
    base = build_baseline(make_params(phys), threads=run.args.threads)
    figure = FIGURES[run.args.figure]
    tables, summary = figure(base, threads=run.args.threads) if run.args.figure == "fig3a" else figure(base)
    for name, (header, rows) in tables.items():
        run.csv(name, header, rows)
    run.json(f"{run.args.figure}_summary.json", summary)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or TOML file of flat key-value settings")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
    common.add_argument("--out", default="iongate-out", help="artifact directory")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--json-errors", action="store_true", help="emit errors as JSON on stderr")

    gate_opts = argparse.ArgumentParser(add_help=False)
    gate_opts.add_argument("--pair", type=_pair, default=(59, 62))
    gate_opts.add_argument("--mu-rel", type=float, default=9.3e-3, help="(mu - omega_x) / omega_x")
    gate_opts.add_argument("--tau-periods", type=float, default=500.0)
    gate_opts.add_argument("--segments", type=int, default=5)
    gate_opts.add_argument("--beta-convention", choices=("paper", "standard"))

    parser = _Parser(prog="iongate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    chain = sub.add_parser("chain", help="equilibrium positions")
    chain_sub = chain.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = chain_sub.add_parser("solve", parents=[common])
    p.set_defaults(func=cmd_chain_solve)
    p = chain_sub.add_parser("optimize-b", parents=[common])
    p.add_argument("--b-min", type=float)
    p.add_argument("--b-max", type=float)
    p.set_defaults(func=cmd_chain_optimize_b)

    p = sub.add_parser("modes", parents=[common], help="normal mode spectrum")
    p.add_argument("--axis", choices=("x", "y", "z"), default="x")
    p.add_argument("--vectors", action="store_true", help="also write the mode matrix")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("thermal", parents=[common], help="occupations and axial fluctuation")
    p.add_argument("--beta-convention", choices=("paper", "standard"))
    p.set_defaults(func=cmd_thermal)

    gate = sub.add_parser("gate", help="segmented-pulse gates")
    gate_sub = gate.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = gate_sub.add_parser("optimize", parents=[common, gate_opts])
    p.set_defaults(func=cmd_gate_optimize)
    p = gate_sub.add_parser("scan", parents=[common, gate_opts])
    p.add_argument("--mu-rel-min", type=float, default=0.0)
    p.add_argument("--mu-rel-max", type=float, default=0.03)
    p.add_argument("--points", type=int, default=301)
    p.set_defaults(func=cmd_gate_scan)
    p = gate_sub.add_parser("response", parents=[common, gate_opts])
    p.add_argument("--branch", type=_pair, default=(1, 1), help="spin signs, e.g. 1,-1")
    p.set_defaults(func=cmd_gate_response)
    p = gate_sub.add_parser("truncate", parents=[common, gate_opts])
    p.add_argument("--window", type=int, default=8)
    p.set_defaults(func=cmd_gate_truncate)

    p = sub.add_parser("errors", parents=[common], help="thermal error budget")
    p.add_argument("--beta-convention", choices=("paper", "standard"))
    p.set_defaults(func=cmd_errors)

    p = sub.add_parser("reproduce", parents=[common], help="figure data at the 120-ion baseline")
    p.add_argument("figure", choices=sorted(FIGURES))
    p.set_defaults(func=cmd_reproduce)
    return parser


def _report(exc, code, as_json):
    if as_json:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}), file=sys.stderr)
    else:
        print(f"iongate: error: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    as_json = "--json-errors" in argv
    try:
        args = build_parser().parse_args(argv)
        args.argv = argv
        args.command_name = " ".join(x for x in (args.command, getattr(args, "action", None)) if x)
        config, digests = _setup(args)
        run = Run(args, config, digests)
        args.func(run)
        run.finish()
    except ConfigError as exc:
        return _report(exc, EXIT_CONFIG, as_json)
    except PhysicsError as exc:
        return _report(exc, EXIT_PHYSICS, as_json)
    return 0


if __name__ == "__main__":
    sys.exit(main())
