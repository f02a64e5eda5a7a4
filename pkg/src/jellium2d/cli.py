"""Command-line surface: sample, law, equilibrium, validate.

A run is a pure function of its resolved configuration (flags override
config-file values, which override defaults), so identical configs give
byte-identical CSV payloads.  Every output directory receives a manifest
JSON echoing the resolved configuration.

Exit codes: 0 success, 1 acceptance failure, 2 configuration/validation
error, 3 numeric/runtime failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__, acceptance, edge_laws, equilibrium, exact_radii, mcmc
from .errors import (
    BetaNotTwoError,
    JelliumError,
    LambdaBelowOneError,
    NoConvergenceError,
    NotIntegrableError,
    NOverLimitError,
    POutOfRangeError,
    SubcriticalParametersError,
)
from .model import GasParams

EXIT_OK = 0
EXIT_ACCEPTANCE = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_CONFIG_ERRORS = (NotIntegrableError, BetaNotTwoError, SubcriticalParametersError,
                  LambdaBelowOneError, NOverLimitError, POutOfRangeError,
                  ValueError, KeyError)
_NUMERIC_ERRORS = (NoConvergenceError, FloatingPointError, RuntimeError)


def fmt_float(x) -> str:
    """17 significant digits: round-trip exact for doubles."""
    return format(float(x), ".17g")


def parse_grid(spec: str) -> np.ndarray:
    """start:stop:step, inclusive of stop when the span is an integral
    number of steps within 1e-9."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {spec!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError("grid step must be positive")
    if stop < start:
        raise ValueError("grid stop must be >= start")
    span = (stop - start) / step
    rounded = round(span)
    n = int(rounded) + 1 if abs(span - rounded) <= 1e-9 else int(math.floor(span)) + 1
    return start + step * np.arange(n)


def _write_table(path, header, columns, fmt="csv"):
    rows = zip(*columns)
    if fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)
        return
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                str(v) if isinstance(v, (int, np.integer)) else fmt_float(v)
                for v in row) + "\n")


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, default=_json_default)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_manifest(outdir, command, resolved):
    _write_json(os.path.join(outdir, "manifest.json"), {
        "command": command,
        "config": resolved,
        "version": __version__,
        "created_unix": time.time(),
    })


def _load_config(path):
    if path is None:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _resolve(args, section, key, default=None):
    """Precedence: explicit flag > config-file section > default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    return args._config.get(section, {}).get(key, default)


def _threads(args):
    v = getattr(args, "threads", None)
    if v is None:
        v = os.environ.get("JELLIUM_THREADS")
    if v is None:
        return os.cpu_count() or 1
    return max(1, int(v))


def _gas_params(args, beta_default=None) -> GasParams:
    n = _resolve(args, "params", "n")
    beta = _resolve(args, "params", "beta", beta_default)
    alpha = _resolve(args, "params", "alpha")
    lam = _resolve(args, "params", "lam")
    R = _resolve(args, "params", "R")
    if alpha is None and lam is not None and n is not None:
        alpha = float(lam) * int(n)
    if None in (n, beta, alpha, R):
        raise ValueError("params require n, beta, alpha (or lambda), R")
    return GasParams(n=int(n), beta=float(beta), alpha=float(alpha), R=float(R))


def cmd_sample(args) -> int:
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    params = _gas_params(args)
    seed = int(_resolve(args, "output", "seed", 0))
    method = args.method
    fmt = _resolve(args, "output", "format", "csv")

    if method == "exact":
        report = params.integrability_margin()
        if params.beta != 2.0:
            raise BetaNotTwoError(f"exact sampler needs beta = 2, got {params.beta}")
        if report <= 0:
            raise NotIntegrableError(report)
        trials = int(_resolve(args, "schedule", "trials", 1000))
        batch = exact_radii.sample_max_batch(params, trials, seed,
                                             workers=_threads(args))
        _write_table(os.path.join(outdir, "maxima.csv"),
                     ["trial_id", "max_modulus"],
                     [batch.trial_ids, batch.maxima], fmt)
        resolved = {"params": params.to_dict(), "seed": seed, "trials": trials,
                    "method": "exact", "format": fmt}
        _write_json(os.path.join(outdir, "metadata.json"),
                    batch.metadata(__version__))
        _write_manifest(outdir, "sample", resolved)
        print(f"wrote {trials} maxima to {outdir}")
        return EXIT_OK

    schedule = mcmc.Schedule(
        steps=int(_resolve(args, "schedule", "steps", 100_000)),
        burn_in_fraction=float(_resolve(args, "schedule", "burn_in_fraction", 0.9)),
        thinning=int(_resolve(args, "schedule", "thinning", 10)),
        dt_init=float(_resolve(args, "schedule", "dt_init", 0.5)),
        target_acceptance=float(_resolve(args, "schedule", "target_acceptance", 0.574)),
        leapfrog_steps=int(_resolve(args, "schedule", "leapfrog_steps", 1)),
        init_mode=_resolve(args, "schedule", "init_mode", "equilibrium_radial"),
    )
    chains = int(_resolve(args, "schedule", "chains", 1))
    trial_ids, particle_ids, xs, ys = [], [], [], []
    diagnostics = []
    idx = 0
    for chain in range(chains):
        result = mcmc.run_chain(params, schedule, seed, chain_id=chain)
        diagnostics.append(result.diagnostics)
        for config in result.configs:
            trial_ids.extend([idx] * params.n)
            particle_ids.extend(range(params.n))
            xs.extend(config[:, 0])
            ys.extend(config[:, 1])
            idx += 1
    _write_table(os.path.join(outdir, "configs.csv"),
                 ["trial_id", "particle_id", "x", "y"],
                 [trial_ids, particle_ids, xs, ys], fmt)
    _write_json(os.path.join(outdir, "diagnostics.json"),
                {"chains": diagnostics})
    resolved = {"params": params.to_dict(), "seed": seed, "method": "mala",
                "schedule": schedule.to_dict(), "chains": chains, "format": fmt}
    _write_manifest(outdir, "sample", resolved)
    print(f"wrote {idx} configurations to {outdir}")
    return EXIT_OK


def cmd_law(args) -> int:
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    grid = parse_grid(_resolve(args, "law", "grid"))
    name = args.law
    fmt = _resolve(args, "output", "format", "csv")

    if name == "L":
        kappa = _resolve(args, "law", "kappa")
        R = _resolve(args, "law", "R", 1.0)
        if kappa is None:
            raise ValueError("law L needs --kappa")
        law = edge_laws.HeavyTailLawL(kappa=float(kappa), R=float(R))
        cdf = edge_laws.cdf_L(law, grid)
        resolved = {"law": "L", "kappa": float(kappa), "R": float(R)}
    elif name == "gumbel":
        cdf = edge_laws.cdf_gumbel(grid)
        resolved = {"law": "gumbel"}
    elif name == "F":
        cdf = edge_laws.cdf_spherical_F(grid)
        resolved = {"law": "F"}
    elif name == "exact_max":
        params = _gas_params(args, beta_default=2.0)
        cdf = exact_radii.max_modulus_cdf_exact(params, grid)
        resolved = {"law": "exact_max", "params": params.to_dict()}
    else:
        raise ValueError(f"unknown law {name!r}")

    resolved["grid"] = _resolve(args, "law", "grid")
    _write_table(os.path.join(outdir, "law.csv"), ["t", "cdf"],
                 [grid, cdf], fmt)
    _write_manifest(outdir, "law", resolved)
    print(f"wrote {grid.size} rows to {outdir}")
    return EXIT_OK


def cmd_equilibrium(args) -> int:
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    mode = args.mode
    lam = _resolve(args, "solver", "lam")
    R = _resolve(args, "solver", "R", 1.0)
    if lam is None:
        raise ValueError("equilibrium needs --lambda")
    lam, R = float(lam), float(R)
    fmt = _resolve(args, "output", "format", "csv")

    if mode == "low_temp":
        params = GasParams(n=1, beta=2.0, alpha=lam, R=R)
        profile = equilibrium.low_temperature_equilibrium(params)
        resolved = {"mode": mode, "lam": lam, "R": R}
    else:
        kappa = _resolve(args, "solver", "kappa")
        if kappa is None:
            raise ValueError("crossover mode needs --kappa")
        kappa = float(kappa)
        if kappa * (lam - 1.0) <= 2.0:
            print(f"error: crossover equilibrium requires kappa*(lambda-1) > 2 "
                  f"strictly; got {kappa * (lam - 1.0):.6g}", file=sys.stderr)
            return EXIT_CONFIG
        spec = equilibrium.CrossoverSolverSpec(
            grid_size=int(_resolve(args, "solver", "grid_size", 3001)),
            R_max=float(_resolve(args, "solver", "r_max", 20.0 * R)),
        )
        profile = equilibrium.solve_crossover(kappa, lam, R, spec)
        resolved = {"mode": mode, "kappa": kappa, "lam": lam, "R": R,
                    "grid_size": spec.grid_size, "r_max": spec.R_max}

    _write_table(os.path.join(outdir, "profile.csv"), ["r", "phi"],
                 [profile.grid, profile.density], fmt)
    diag = profile.diagnostics_dict()
    diag.pop("newton_history", None)
    _write_json(os.path.join(outdir, "diagnostics.json"), diag)
    _write_manifest(outdir, "equilibrium", resolved)
    print(f"wrote profile ({profile.grid.size} rows) to {outdir}")
    return EXIT_OK


def _suite_reports(suite, seed, args):
    workers = _threads(args)
    trials = getattr(args, "trials", None)
    steps = getattr(args, "steps", None)
    if suite == "edge_L":
        kw = {} if trials is None else {"trials": int(trials)}
        return [("edge_L", acceptance.run_edge_L(seed, workers=workers, **kw))]
    if suite == "edge_gumbel":
        kw = {} if trials is None else {"trials": int(trials)}
        exact, gum = acceptance.run_edge_gumbel(seed, workers=workers, **kw)
        return [("edge_gumbel_exact", exact), ("edge_gumbel_gumbel", gum)]
    if suite == "bulk":
        kw = {} if steps is None else {"steps": int(steps)}
        return [("bulk", acceptance.run_bulk(seed, **kw))]
    if suite == "cross_sampler":
        return [("cross_sampler", acceptance.run_cross_sampler(seed))]
    raise ValueError(f"unknown suite {suite!r}")


def cmd_validate(args) -> int:
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    seed = int(args.seed if args.seed is not None else 0)
    suites = (["edge_L", "edge_gumbel", "bulk", "cross_sampler"]
              if args.suite == "all" else [args.suite])

    all_passed = True
    for suite in suites:
        for name, report in _suite_reports(suite, seed, args):
            _write_json(os.path.join(outdir, f"report_{name}.json"),
                        report.to_dict())
            status = "PASS" if report.passed else "FAIL"
            print(f"{name}: ks={report.ks_distance:.4f} "
                  f"threshold={report.pass_threshold} {status}")
            all_passed &= report.passed
    _write_manifest(outdir, "validate", {
        "suite": args.suite, "seed": seed,
        "trials": getattr(args, "trials", None),
        "steps": getattr(args, "steps", None)})
    return EXIT_OK if all_passed else EXIT_ACCEPTANCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jellium2d",
        description="Planar jellium Coulomb-gas samplers, solvers, and edge laws")
    parser.add_argument("--config", help="TOML config file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_params(p, with_beta=True):
        p.add_argument("--n", type=int)
        if with_beta:
            p.add_argument("--beta", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--lambda", dest="lam", type=float,
                       help="charge ratio alpha/n (alternative to --alpha)")
        p.add_argument("--R", type=float)

    p = sub.add_parser("sample", help="draw configurations or maxima")
    p.add_argument("--method", choices=["exact", "mala"], required=True)
    add_params(p)
    p.add_argument("--trials", type=int, help="exact method: number of trials")
    p.add_argument("--steps", type=int)
    p.add_argument("--burn-in", dest="burn_in_fraction", type=float)
    p.add_argument("--thinning", type=int)
    p.add_argument("--dt", dest="dt_init", type=float)
    p.add_argument("--target-acceptance", dest="target_acceptance", type=float)
    p.add_argument("--leapfrog-steps", dest="leapfrog_steps", type=int)
    p.add_argument("--init", dest="init_mode",
                   choices=["uniform_disc", "equilibrium_radial"])
    p.add_argument("--chains", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--format", dest="format", choices=["csv", "json"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("law", help="tabulate a limit-law CDF on a grid")
    p.add_argument("--law", dest="law", choices=["L", "F", "gumbel", "exact_max"],
                   required=True)
    p.add_argument("--grid", help="start:stop:step")
    p.add_argument("--kappa", type=float)
    add_params(p, with_beta=False)
    p.add_argument("--format", dest="format", choices=["csv", "json"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_law)

    p = sub.add_parser("equilibrium", help="equilibrium measure profiles")
    p.add_argument("--mode", dest="mode", choices=["low_temp", "crossover"],
                   required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--R", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--rmax", dest="r_max", type=float)
    p.add_argument("--grid-size", dest="grid_size", type=int)
    p.add_argument("--format", dest="format", choices=["csv", "json"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("validate", help="run the acceptance experiments")
    p.add_argument("--suite", choices=["edge_L", "edge_gumbel", "bulk",
                                       "cross_sampler", "all"], required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int,
                   help="override the frozen trial count (smoke runs)")
    p.add_argument("--steps", type=int,
                   help="override the frozen MCMC step count (smoke runs)")
    p.add_argument("--threads", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def _merge_grid_flag(argv):
    """Join '--grid -5:10:0.01' so argparse does not read the value as a flag."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--grid" and i + 1 < len(argv):
            out.append(f"--grid={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_merge_grid_flag(
        sys.argv[1:] if argv is None else list(argv)))
    try:
        args._config = _load_config(args.config)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except NotIntegrableError as exc:
        print(f"error: {exc} (integrability margin beta*(alpha-n+1)-2 = "
              f"{exc.margin:.6g})", file=sys.stderr)
        return EXIT_CONFIG
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except JelliumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
