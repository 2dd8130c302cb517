"""Config-driven experiment runner.

Usage:  foult <command> --config <file> [--check] [--seed S] [--out PREFIX]

Commands: simulate, localtime, convergence, scaling, bounds, condition.
Configs are flat ``key = value`` text with dotted section keys; see
``foult --help`` for the full key reference.  Every run writes
``<prefix>.csv`` (raw results, canonical row order, round-trip floats) and
``<prefix>.manifest.txt`` (full parameter/seed/version provenance).

Exit codes: 0 success, 1 config error, 2 numerical failure,
3 acceptance-threshold failure in --check mode.
"""

import argparse
import csv
import sys
import time

import numpy as np

from . import __version__
from .errors import FoultError
from .fbm import sample_fbm
from .fou import FouParams, fou_from_fbm, sample_fou_ensemble, sample_fou_volterra_ensemble
from .gaussian_analysis import PROBE_SEED, bound_probe_report
from .grid import TimeGrid
from .localtime import (
    LocalTimeQuery,
    cauchy_gap_sweep,
    existence_condition_value,
    fou_pair,
    holder_condition_value,
    intersection_local_time_reg,
    local_time_profile,
    local_time_reg,
)
from .regularity import (
    fit_power_law,
    holder_lattice,
    pathwise_holder_estimate,
    spatial_increment_sweep,
    temporal_increment_moments,
)
from .streams import worker_count

CSV_SCHEMA_VERSION = 1

COMMANDS = ("simulate", "localtime", "convergence", "scaling", "bounds", "condition")

_KEY_REFERENCE = """\
config keys (flat `key = value` lines, '#' starts a comment):

  output                 output file prefix (overridden by --out)
  method                 fBm sampler: auto | cholesky | circulant   [auto]
  grid.t_final           horizon T > 0
  grid.n_steps           step count N >= 1
  model.h                Hurst parameter in (0, 1)
  model.v                diffusion coefficient >= 0                 [1.0]
  model.x0               initial value, scalar or comma vector      [0.0]
  model.d                dimension >= 1                              [1]
  model2.h/.v/.x0/.d     second process (intersection commands)
  query.x                spatial argument, scalar or comma vector   [0.0]
  query.t                query time in (0, T]
  query.epsilon          mollifier bandwidth > 0
  query.k                derivative multi-index, comma ints         [0]
  query.delta            Hölder offsets in (0,1] (condition cmd)
  mc.n_paths             Monte Carlo paths / path pairs
  mc.seed                master seed                                 [0]
  route                  simulate route: fbm | volterra              [fbm]
  sweep.epsilon          bandwidth sweep, comma floats (convergence)
  sweep.theta_factor     theta = factor * epsilon                    [0.5]
  sweep.h                increment sweep, comma floats (scaling)
  sweep.separation       level separations (scaling spatial)
  sweep.x                x lattice (localtime profile / holder)
  scaling.mode           temporal | spatial | holder                 [temporal]
  scaling.moment_order   moment order n >= 1                         [2]
  probe.n_grids          bound-probe grid count                      [100]
  probe.seed             bound-probe seed                            [fixed]
  check.slope_tol        --check slope tolerance (scaling)           [0.15]
  check.holder_tol       --check slope tolerance (holder mode)       [0.2]
  check.bound_floor      --check ratio floor (bounds)                [1e-6]

environment: FOULT_THREADS caps worker count (0 = auto).
"""


class ConfigError(Exception):
    pass


_REQUIRED = object()

_ALLOWED_KEYS = {
    "simulate": {
        "output", "method", "route", "grid.t_final", "grid.n_steps",
        "model.h", "model.v", "model.x0", "model.d", "mc.n_paths", "mc.seed",
    },
    "localtime": {
        "output", "method", "grid.t_final", "grid.n_steps",
        "model.h", "model.v", "model.x0", "model.d",
        "model2.h", "model2.v", "model2.x0", "model2.d",
        "query.x", "query.t", "query.epsilon", "query.k", "mc.seed", "sweep.x",
    },
    "convergence": {
        "output", "method", "grid.t_final", "grid.n_steps",
        "model.h", "model.v", "model.x0", "model.d",
        "model2.h", "model2.v", "model2.x0", "model2.d",
        "query.x", "query.t", "query.k", "mc.n_paths", "mc.seed",
        "sweep.epsilon", "sweep.theta_factor",
    },
    "scaling": {
        "output", "method", "grid.t_final", "grid.n_steps",
        "model.h", "model.v", "model.x0", "model.d",
        "query.x", "query.t", "query.epsilon", "query.k", "mc.n_paths", "mc.seed",
        "scaling.mode", "scaling.moment_order", "sweep.h", "sweep.separation",
        "sweep.x", "check.slope_tol", "check.holder_tol",
    },
    "bounds": {
        "output", "model.h", "model.v", "probe.n_grids", "probe.seed",
        "check.bound_floor", "mc.seed",
    },
    "condition": {
        "output", "model.h", "model.d", "model2.h", "query.k", "query.delta", "mc.seed",
    },
}


def _parse_value(text):
    text = text.strip()
    if "," in text:
        return tuple(_parse_value(part) for part in text.split(","))
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def parse_config(path):
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
                key, _, val = line.partition("=")
                key = key.strip()
                if key in values:
                    raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
                values[key] = _parse_value(val)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    return values


class ExperimentConfig:
    """Validated view of a parsed config for one command."""

    def __init__(self, command, values):
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}")
        unknown = set(values) - _ALLOWED_KEYS[command]
        if unknown:
            raise ConfigError(
                f"config key(s) not recognized for '{command}': {', '.join(sorted(unknown))}"
            )
        self.command = command
        self.values = dict(values)

    def get(self, key, default=_REQUIRED):
        if key in self.values:
            return self.values[key]
        if default is _REQUIRED:
            raise ConfigError(f"missing required config key {key!r}")
        return default

    def floats(self, key, default=_REQUIRED):
        val = self.get(key, default)
        if val is None:
            return None
        seq = val if isinstance(val, tuple) else (val,)
        try:
            return tuple(float(x) for x in seq)
        except (TypeError, ValueError):
            raise ConfigError(f"config key {key!r} must be numeric, got {val!r}")

    def multi_index(self, d):
        k = self.get("query.k", 0)
        try:
            k = tuple(int(v) for v in (k if isinstance(k, tuple) else (k,)))
        except (TypeError, ValueError):
            raise ConfigError(f"query.k must be integers, got {k!r}")
        if len(k) == 1 and d > 1:
            k = k + (0,) * (d - 1)
        if len(k) != d:
            raise ConfigError(f"query.k has {len(k)} entries for dimension {d}")
        return k

    def grid(self):
        try:
            return TimeGrid(float(self.get("grid.t_final")), int(self.get("grid.n_steps")))
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}")

    def model(self, section="model", default_from=None):
        if default_from is not None and not any(
            key.startswith(section + ".") for key in self.values
        ):
            return default_from
        try:
            return FouParams(
                h=float(self.get(f"{section}.h")),
                v=float(self.get(f"{section}.v", 1.0)),
                x0=np.asarray(self.floats(f"{section}.x0", (0.0,))),
                d=int(self.get(f"{section}.d", 1)),
            )
        except ValueError as exc:
            raise ConfigError(f"{section}: {exc}")

    def query(self, d, eps=None):
        try:
            return LocalTimeQuery(
                x=np.asarray(self.floats("query.x", (0.0,))),
                t=float(self.get("query.t")),
                eps=float(self.get("query.epsilon")) if eps is None else eps,
                k=self.multi_index(d),
            )
        except ValueError as exc:
            raise ConfigError(f"query: {exc}")

    def seed(self, override=None):
        if override is not None:
            return int(override)
        return int(self.get("mc.seed", 0))


def _format_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])


def write_manifest(path, command, config, seed, out_prefix, results, wall_time):
    lines = [
        ("command", command),
        ("foult_version", __version__),
        ("csv_schema_version", CSV_SCHEMA_VERSION),
        ("seed", seed),
        ("output_prefix", out_prefix),
        ("workers", worker_count()),
    ]
    for key in sorted(config.values):
        lines.append((f"config.{key}", config.values[key]))
    for key in results:
        lines.append((f"result.{key}", results[key]))
    lines.append(("wall_time_seconds", round(wall_time, 3)))
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in lines:
            if isinstance(value, tuple):
                value = ",".join(_format_cell(v) for v in value)
            else:
                value = _format_cell(value)
            fh.write(f"{key} = {value}\n")


def _run_simulate(config, seed):
    grid = config.grid()
    params = config.model()
    n_paths = int(config.get("mc.n_paths", 1))
    route = config.get("route", "fbm")
    method = config.get("method", "auto")
    if route == "fbm":
        values = sample_fou_ensemble(grid, params, n_paths, seed, method=method)
    elif route == "volterra":
        values = sample_fou_volterra_ensemble(grid, params, n_paths, seed)
    else:
        raise ConfigError(f"route must be fbm or volterra, got {route!r}")
    header = ["t"] + [f"x_p{p}_c{c}" for p in range(n_paths) for c in range(params.d)]
    rows = [
        [grid.points[j]] + [values[p, c, j] for p in range(n_paths) for c in range(params.d)]
        for j in range(grid.n_steps + 1)
    ]
    return header, rows, {}, None


def _run_localtime(config, seed):
    grid = config.grid()
    params = config.model()
    q = config.query(params.d)
    method = config.get("method", "auto")
    if any(key.startswith("model2.") for key in config.values):
        params2 = config.model("model2")
        pa, pb = fou_pair(grid, params, params2, seed, 0, method=method)
        value = intersection_local_time_reg(pa, pb, q)
        return (
            ["kind", "t", "epsilon", "value"],
            [["intersection", q.t, q.eps, value]],
            {"value": value},
            None,
        )
    path = fou_from_fbm(sample_fbm(grid, params.h, params.d, seed, method=method), params)
    lattice = config.floats("sweep.x", None)
    if lattice is not None:
        profile = local_time_profile(path, q, np.asarray(lattice))
        rows = [[x, val] for x, val in zip(lattice, profile)]
        return ["x", "value"], rows, {}, None
    value = local_time_reg(path, q)
    return (
        ["kind", "t", "epsilon", "value"],
        [["single", q.t, q.eps, value]],
        {"value": value},
        None,
    )


def _run_convergence(config, seed):
    grid = config.grid()
    params = config.model()
    params2 = config.model("model2", default_from=params)
    method = config.get("method", "auto")
    eps_list = config.floats("sweep.epsilon")
    factor = float(config.get("sweep.theta_factor", 0.5))
    if not (0 < factor < 1):
        raise ConfigError("sweep.theta_factor must lie in (0, 1)")
    n_paths = int(config.get("mc.n_paths"))
    q = config.query(params.d, eps=eps_list[0])
    pairs = [(e, factor * e) for e in eps_list]
    estimates = cauchy_gap_sweep(grid, params, params2, q, pairs, n_paths, seed, method=method)
    rows = [[e, th, est.mean, est.stderr] for (e, th), est in zip(pairs, estimates)]
    monotone = all(a.mean > b.mean for a, b in zip(estimates, estimates[1:]))
    results = {"monotone_decreasing": monotone}
    failure = None if monotone else "cauchy gaps do not decrease monotonically along the sweep"
    return ["epsilon", "theta", "gap_mean", "gap_stderr"], rows, results, failure


def _run_scaling(config, seed):
    grid = config.grid()
    params = config.model()
    q = config.query(params.d)
    method = config.get("method", "auto")
    mode = config.get("scaling.mode", "temporal")
    n = int(config.get("scaling.moment_order", 2))
    n_paths = int(config.get("mc.n_paths"))

    if mode == "temporal":
        h_list = list(config.floats("sweep.h"))
        ests = temporal_increment_moments(grid, params, q, n, h_list, n_paths, seed, method=method)
        theory = n - n * params.h * params.d - params.h * q.k.order
        kept = [(h, e.mean) for h, e in zip(h_list, ests) if e.mean > 0]
        fit = fit_power_law([p[0] for p in kept], [p[1] for p in kept], theory)
        rows = [[h, e.mean, e.stderr] for h, e in zip(h_list, ests)]
        results = {
            "slope": fit.exponent_hat,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
            "theory_exponent": theory,
        }
        tol = float(config.get("check.slope_tol", 0.15))
        failure = None
        if abs(fit.exponent_hat - theory) > tol:
            failure = (
                f"temporal slope {fit.exponent_hat:.4f} deviates from {theory} by more than {tol}"
            )
        return ["h", "moment_mean", "moment_stderr"], rows, results, failure

    if mode == "spatial":
        seps = list(config.floats("sweep.separation"))
        ests = spatial_increment_sweep(grid, params, q, n, seps, n_paths, seed, method=method)
        rows = [[s, e.mean, e.stderr] for s, e in zip(seps, ests)]
        order = np.argsort(-np.asarray(seps))
        means = [ests[i].mean for i in order]
        monotone = all(a > b for a, b in zip(means, means[1:]))
        results = {"monotone_decreasing": monotone}
        failure = None if monotone else "spatial moments do not decrease with shrinking separation"
        return ["separation", "moment_mean", "moment_stderr"], rows, results, failure

    if mode == "holder":
        h_list = list(config.floats("sweep.h"))
        lattice = config.floats("sweep.x", None)
        if lattice is None:
            lattice = holder_lattice(grid, params, q, h_list, n_paths, seed, method=method)
        fit = pathwise_holder_estimate(
            grid, params, q, h_list, np.asarray(lattice), n_paths, seed, method=method
        )
        rows = [
            [h, m, s] for h, m, s in zip(h_list, fit.aux["sup_median"], fit.aux["sup_mean"])
        ]
        results = {
            "slope": fit.exponent_hat,
            "r_squared": fit.r_squared,
            "theory_exponent": fit.theory_exponent,
        }
        tol = float(config.get("check.holder_tol", 0.2))
        failure = None
        if abs(fit.exponent_hat - fit.theory_exponent) > tol:
            failure = (
                f"holder slope {fit.exponent_hat:.4f} deviates from "
                f"{fit.theory_exponent} by more than {tol}"
            )
        return ["h", "sup_median", "sup_mean"], rows, results, failure

    raise ConfigError(f"scaling.mode must be temporal, spatial or holder, got {mode!r}")


def _run_bounds(config, seed):
    h = float(config.get("model.h"))
    v = float(config.get("model.v", 1.0))
    n_grids = int(config.get("probe.n_grids", 100))
    probe_seed = int(config.get("probe.seed", PROBE_SEED))
    rows = bound_probe_report(h, v=v, n_grids=n_grids, seed=probe_seed)
    floor = float(config.get("check.bound_floor", 1e-6))
    min_value = min(r[3] for r in rows)
    results = {"min_ratio": min_value}
    failure = None
    if min_value < floor:
        failure = f"bound ratio {min_value:.3e} under floor {floor:.3e}"
    return ["grid_index", "kind", "n_times", "value"], rows, results, failure


def _run_condition(config, seed):
    d = int(config.get("model.d", 1))
    k = config.multi_index(d)
    h1 = float(config.get("model.h"))
    if "model2.h" in config.values:
        h2 = float(config.get("model2.h"))
        value = existence_condition_value(h1, h2, k, d)
        kind, h2_cell = "existence", h2
    else:
        delta = config.floats("query.delta", None)
        value = holder_condition_value(h1, k, d, delta)
        kind, h2_cell = "holder", "na"
    satisfied = bool(value <= 1.0)
    print(f"condition={'true' if satisfied else 'false'} value={_format_cell(value)}")
    rows = [[kind, h1, h2_cell, d, ";".join(str(v) for v in k), value, satisfied]]
    return (
        ["kind", "h1", "h2", "d", "k", "value", "satisfied"],
        rows,
        {"value": value, "satisfied": satisfied},
        None,
    )


_RUNNERS = {
    "simulate": _run_simulate,
    "localtime": _run_localtime,
    "convergence": _run_convergence,
    "scaling": _run_scaling,
    "bounds": _run_bounds,
    "condition": _run_condition,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="foult",
        description=__doc__,
        epilog=_KEY_REFERENCE,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="flat key=value config file")
    parser.add_argument(
        "--check", action="store_true", help="gate exit code on acceptance thresholds"
    )
    parser.add_argument("--seed", type=int, default=None, help="override mc.seed")
    parser.add_argument("--out", default=None, help="override the output prefix")
    return parser


def run(command, config_path, check=False, seed=None, out=None):
    """Execute one command; returns the process exit code.

    Output files are written whenever the computation itself succeeds, even
    if a --check threshold fails afterwards.
    """
    start = time.perf_counter()
    try:
        config = ExperimentConfig(command, parse_config(config_path))
        master_seed = config.seed(seed)
        prefix = out if out is not None else config.get("output", "foult_out")
        header, rows, results, failure = _RUNNERS[command](config, master_seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except FoultError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    write_csv(f"{prefix}.csv", header, rows)
    write_manifest(
        f"{prefix}.manifest.txt", command, config, master_seed, prefix, results,
        time.perf_counter() - start,
    )
    for key, value in results.items():
        print(f"{key} = {_format_cell(value)}")
    if check and failure is not None:
        print(f"check failed: {failure}", file=sys.stderr)
        return 3
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    return run(args.command, args.config, check=args.check, seed=args.seed, out=args.out)


if __name__ == "__main__":
    sys.exit(main())
