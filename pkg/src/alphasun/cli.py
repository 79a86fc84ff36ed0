"""Command-line surface: evaluate, validate, simulate, and emit figure data.

Subcommands
-----------
density    density values on a point or log grid, with method routing
transform  Mellin / generating-function / Laplace values at one point
validate   normalization and residual error tables with threshold gating
simulate   Monte Carlo recursion runs, KS summary, optional path dump
figures    CSV data files behind the standard density plots

Output contract: every command supports --json and --csv.  CSV rows carry
17-significant-digit numbers under a fixed documented header; JSON output
is {"records": [...], "meta": {...}} where meta holds the parameters, the
effective numeric configuration, and the package version (the only part
allowed to vary between releases for identical flags).

Configuration precedence: command-line flags beat ALPHASUN_* environment
variables, which beat the config file (--config, `key = value` lines, `#`
comments), which beats built-in defaults (abs_tol 1e-6, rel_tol 1e-4,
contour_c 1/2, product_j 8192).

Exit codes: 0 success, 2 domain/usage error, 3 convergence failure,
4 validation threshold exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import closedform, laplace_cf, mellin, simulate, validate
from ._version import __version__
from .errors import AlphaSunError, ConfigError, DomainError
from .specfun import wright_bessel
from .types import MellinConfig, Params, QuadConfig, SimConfig

__all__ = ["build_parser", "main"]

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_CONVERGENCE = 3
EXIT_VALIDATION = 4

ENV_PREFIX = "ALPHASUN_"

# every numeric knob reachable from the config file / environment, with
# defaults mirroring the reference evaluation protocol
_CONFIG_DEFAULTS = {
    "abs_tol": 1e-6,
    "rel_tol": 1e-4,
    "contour_c": 0.5,
    "product_j": 8192,
    "tail_order": 1,
    "max_subdivisions": 200,
}
_INT_KEYS = ("product_j", "tail_order", "max_subdivisions")


# ---------------------------------------------------------------------------
# configuration resolution


def _parse_config_file(path: str) -> dict:
    """One `key = value` per line; `#` starts a comment; unknown keys fail."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected `key = value`, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        if key not in _CONFIG_DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


def _coerce(key: str, value, where: str):
    try:
        return int(value) if key in _INT_KEYS else float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: bad value {value!r} for {key}") from exc


def resolve_settings(args) -> dict:
    """Merge defaults < config file < environment < flags."""
    settings = dict(_CONFIG_DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        for key, value in _parse_config_file(config_path).items():
            settings[key] = _coerce(key, value, config_path)
    for key in _CONFIG_DEFAULTS:
        env_value = os.environ.get(ENV_PREFIX + key.upper())
        if env_value is not None:
            settings[key] = _coerce(key, env_value, ENV_PREFIX + key.upper())
    for key in _CONFIG_DEFAULTS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            settings[key] = _coerce(key, flag_value, "--" + key.replace("_", "-"))
    return settings


def _mellin_config(settings: dict) -> MellinConfig:
    return MellinConfig(
        contour_c=settings["contour_c"],
        product_J=settings["product_j"],
        tail_order=settings["tail_order"],
        quad=QuadConfig(
            abs_tol=settings["abs_tol"],
            rel_tol=settings["rel_tol"],
            max_subdivisions=settings["max_subdivisions"],
        ),
    )


# ---------------------------------------------------------------------------
# record serialization


def _g17(v: float) -> str:
    return format(float(v), ".17g")


def _records_csv(records: list[dict]) -> str:
    keys = list(records[0]) if records else ["x", "value", "abs_err", "method"]
    lines = [",".join(keys)]
    for rec in records:
        lines.append(
            ",".join(str(rec[k]) if k == "method" else _g17(rec[k]) for k in keys)
        )
    return "\n".join(lines) + "\n"


def _meta(args, params: Params | None, settings: dict) -> dict:
    meta = {"command": args.command, "version": __version__, "config": dict(settings)}
    if params is not None:
        meta["params"] = {"gamma": params.gamma, "alpha": params.alpha}
    return meta


def _emit_records(args, records: list[dict], meta: dict) -> int:
    if getattr(args, "json", False):
        text = json.dumps({"records": records, "meta": meta}, indent=2) + "\n"
    else:
        text = _records_csv(records)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {out} ({len(records)} records)")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# density


def _x_grid(args) -> np.ndarray:
    if args.x_log:
        parts = args.x_log.split(":")
        if len(parts) != 3:
            raise DomainError(f"--x-log expects lo:hi:n, got {args.x_log!r}")
        try:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise DomainError(f"--x-log expects numbers lo:hi:n, got {args.x_log!r}") from exc
        if not (0.0 < lo < hi) or n < 2:
            raise DomainError("--x-log needs 0 < lo < hi and n >= 2")
        return np.geomspace(lo, hi, n)
    if args.x:
        xs = np.asarray(args.x, dtype=float)
        if np.any(xs <= 0.0):
            raise DomainError("density points must satisfy x > 0")
        return xs
    raise DomainError("give either --x or --x-log")


def _density_record(params: Params, x: float, route: str, cfg: MellinConfig) -> dict:
    g = params.gamma
    if route == "closed":
        if params.alpha == 0.0:
            return {
                "x": x,
                "value": closedform.frechet_density(g, x),
                "abs_err": 0.0,
                "method": "frechet_closed",
            }
        if params.alpha == 1.0:
            r = closedform.alpha1_density(g, x)
        else:
            raise DomainError("method closed needs alpha = 0 or alpha = 1")
    elif route == "mb":
        if params.alpha == 1.0:
            r = closedform.alpha1_density_mb(g, x, cfg)
        else:
            r = mellin.density(params, x, cfg)
    elif route == "series":
        if params.alpha != 1.0:
            raise DomainError("method series is the alpha = 1 power series")
        r = closedform.alpha1_density_series(g, x)
    elif route == "hankel":
        r = mellin.density_hankel(params, x, cfg)
    elif route == "tail":
        r = mellin.tail_series(params, x)
    else:
        raise DomainError(f"unknown density method {route!r}")
    return {"x": x, "value": r.value, "abs_err": r.abs_err, "method": r.method}


def _density_records(params: Params, xs: np.ndarray, method: str, cfg: MellinConfig) -> list[dict]:
    route = method
    if method == "auto":
        route = "closed" if params.alpha in (0.0, 1.0) else "mb"
    # bulk MB evaluation shares one contour grid across the whole x column
    if route == "mb" and 0.0 < params.alpha < 1.0 and len(xs) >= 8:
        span = float(np.max(np.abs(np.log(xs)))) + 1.0
        grid = mellin.ContourGrid(params, cfg, kind="density", log_x_max=span)
        vals = grid.values(xs)
        errs = grid.abs_err(xs)
        return [
            {"x": float(x), "value": float(v), "abs_err": float(e), "method": "mb_grid"}
            for x, v, e in zip(xs, vals, errs)
        ]
    return [_density_record(params, float(x), route, cfg) for x in xs]


def cmd_density(args) -> int:
    settings = resolve_settings(args)
    cfg = _mellin_config(settings)
    params = Params(gamma=args.gamma, alpha=args.alpha)
    records = _density_records(params, _x_grid(args), args.method, cfg)
    return _emit_records(args, records, _meta(args, params, settings))


# ---------------------------------------------------------------------------
# transforms


def _mellin_record(params: Params, s: complex, cfg: MellinConfig) -> dict:
    if params.alpha == 0.0:
        value = closedform.frechet_mellin(params.gamma, s)
        err = 1e-15 * abs(value)
        method = "frechet_mellin"
    elif params.alpha == 1.0:
        value = closedform.alpha1_mellin(params.gamma, s)
        err = 1e-15 * abs(value)
        method = "alpha1_mellin"
    else:
        value = mellin.H(params, s, cfg)
        # halving the product truncation bounds the tail-estimate error
        half = replace(cfg, product_J=max(16, cfg.product_J // 2))
        err = abs(value - mellin.H(params, s, half))
        method = "mellin_product"
    return {
        "s_re": s.real,
        "s_im": s.imag,
        "value_re": value.real,
        "value_im": value.imag,
        "abs_err": err,
        "method": method,
    }


def cmd_transform(args) -> int:
    settings = resolve_settings(args)
    cfg = _mellin_config(settings)
    params = Params(gamma=args.gamma, alpha=args.alpha)
    g = params.gamma
    if args.kind == "mellin":
        re = args.re if args.re is not None else args.s
        if re is None:
            raise DomainError("transform mellin needs --s or --re/--im")
        records = [_mellin_record(params, complex(re, args.im), cfg)]
    elif args.kind == "generating":
        if args.x is None:
            raise DomainError("transform generating needs --x")
        x = args.x
        if x < 0.0:
            raise DomainError(f"generating function needs x >= 0, got {x}")
        if params.alpha == 0.0:
            rec = {"x": x, "value": math.exp(-x), "abs_err": 0.0, "method": "exp_closed"}
        elif params.alpha == 1.0:
            params.require_gamma_lt1("the alpha = 1 generating function")
            value = wright_bessel(g, x / math.gamma(1.0 - g))
            rec = {"x": x, "value": value, "abs_err": 1e-13 * abs(value), "method": "wright_bessel"}
        else:
            r = mellin.generating(params, x, cfg)
            rec = {"x": x, "value": r.value, "abs_err": r.abs_err, "method": r.method}
        records = [rec]
    elif args.kind == "laplace":
        if args.z is None:
            raise DomainError("transform laplace needs --z")
        r = laplace_cf.laplace_cf(params, args.z)
        records = [{"z": args.z, "value": r.value, "abs_err": r.abs_err, "method": r.method}]
    else:
        raise DomainError(f"unknown transform kind {args.kind!r}")
    return _emit_records(args, records, _meta(args, params, settings))


# ---------------------------------------------------------------------------
# validation tables


def cmd_validate(args) -> int:
    settings = resolve_settings(args)
    cfg = _mellin_config(settings)
    if (args.gamma is None) != (args.alpha is None):
        raise DomainError("single-cell mode needs both --gamma and --alpha")
    if args.gamma is not None:
        gammas, alphas = (args.gamma,), (args.alpha,)
        report = validate.build_tables(gammas, alphas, cfg)
    else:
        report = validate.build_tables(cfg=cfg)

    os.makedirs(args.out_dir, exist_ok=True)
    norm_path = os.path.join(args.out_dir, "norm_errors.csv")
    res_path = os.path.join(args.out_dir, "residual_errors.csv")
    with open(norm_path, "w", encoding="utf-8") as fh:
        fh.write(report.norm_csv())
    with open(res_path, "w", encoding="utf-8") as fh:
        fh.write(report.residual_csv())

    thr = args.threshold
    max_norm = report.max_norm_error()
    max_res = report.max_residual_error()
    passed = (
        not report.failures
        and max_norm == max_norm
        and max_res == max_res
        and max_norm <= thr
        and max_res <= thr
    )
    summary = {
        "threshold": thr,
        "passed": passed,
        "files": [norm_path, res_path],
        "meta": _meta(args, None, settings),
    }
    summary.update(report.to_dict())
    summary_path = os.path.join(args.out_dir, "summary.json")
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")

    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        n_cells = len(report.gammas) * len(report.alphas)
        print(f"cells: {n_cells}  runtime: {report.runtime_s:.1f} s")
        print(f"max normalization error: {_g17(max_norm)}")
        print(f"max residual error:      {_g17(max_res)}")
        for g, a, msg in report.failures:
            print(f"FAILED cell gamma={g:g} alpha={a:g}: {msg}")
        print(f"threshold {thr:g}: {'PASS' if passed else 'FAIL'}")
        print(f"wrote {norm_path}, {res_path}, {summary_path}")
    return EXIT_OK if passed else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# simulation


def cmd_simulate(args) -> int:
    settings = resolve_settings(args)
    params = Params(gamma=args.gamma, alpha=args.alpha)
    sim = SimConfig(
        params=params,
        n_steps=args.n,
        n_paths=args.paths,
        seed=args.seed,
        input_dist=args.dist,
        norming_exponent=args.norming_exponent,
    )
    if args.dump_path:
        ys = simulate.path_trajectory(sim, path=0)
        records = [
            {"step": float(k), "value": float(y), "abs_err": 0.0, "method": "path"}
            for k, y in enumerate(ys)
        ]
        meta = _meta(args, params, settings)
        meta["sim"] = {"n_steps": sim.n_steps, "n_paths": sim.n_paths, "seed": sim.seed}
        return _emit_records(args, records, meta)

    finals = simulate.normalized_finals(sim)
    ks = None
    if params.alpha < 1.0 and sim.n_paths >= 100:
        ks = simulate.empirical_vs_limit(sim)
    meta = _meta(args, params, settings)
    meta["sim"] = {
        "n_steps": sim.n_steps,
        "n_paths": sim.n_paths,
        "seed": sim.seed,
        "input_dist": sim.input_dist,
        "norming_exponent": sim.exponent,
        "ks_statistic": ks,
    }
    records = [
        {"path": float(p), "value": float(v), "abs_err": 0.0, "method": "mc"}
        for p, v in enumerate(finals)
    ]
    if args.json or args.csv or args.out:
        return _emit_records(args, records, meta)
    print(f"paths: {sim.n_paths}  steps: {sim.n_steps}  seed: {sim.seed}")
    print(f"normalized final: min {_g17(finals.min())}  median {_g17(np.median(finals))}  max {_g17(finals.max())}")
    if ks is not None:
        print(f"KS distance to limit law: {_g17(ks)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# figure data

# per-figure log grids chosen so every curve clears its evaluation noise
# floor at the left edge and has decayed below ~5% of peak at the right
_FIGURES = {
    "alpha1": {"gammas": (0.25, 1 / 3, 0.5, 2 / 3, 0.75), "grid": (1e-4, 20.0, 400)},
    "g025": {"gamma": 0.25, "alphas": (0.0, 0.25, 0.5, 0.75, 1.0), "grid": (1e-5, 10.0, 400)},
    "g050": {"gamma": 0.5, "alphas": (0.0, 0.25, 0.5, 0.75, 1.0), "grid": (5e-3, 20.0, 400)},
    "g075": {"gamma": 0.75, "alphas": (0.0, 0.25, 0.5, 0.75, 1.0), "grid": (5e-2, 20.0, 400)},
    "g100": {"gamma": 1.0, "alphas": (0.0, 0.25, 0.5, 0.75), "grid": (0.08, 50.0, 400)},
    "glarge": {"gamma": 4.0, "alphas": (0.0, 0.25, 0.5, 0.75, 0.875), "grid": (0.35, 20.0, 400), "large": True},
}


def figure_curves(figure: str, cfg: MellinConfig | None = None) -> list[tuple[str, Params, list[dict]]]:
    """(curve label, params, records) for each curve of a standard figure."""
    spec = _FIGURES.get(figure)
    if spec is None:
        raise DomainError(f"unknown figure {figure!r}; ids: {', '.join(sorted(_FIGURES))}")
    cfg = cfg or MellinConfig()
    lo, hi, n = spec["grid"]
    xs = np.geomspace(lo, hi, n)
    curves = []
    if "gammas" in spec:
        for g in spec["gammas"]:
            params = Params(gamma=g, alpha=1.0)
            records = _density_records(params, xs, "closed", cfg)
            curves.append((f"gamma{g:g}", params, records))
        return curves
    g = spec["gamma"]
    for a in spec["alphas"]:
        params = Params(gamma=g, alpha=a)
        if spec.get("large"):
            records = [
                {
                    "x": float(x),
                    "value": closedform.large_gamma_density(params, float(x)),
                    "abs_err": 0.0,
                    "method": "large_gamma",
                }
                for x in xs
            ]
        else:
            records = _density_records(params, xs, "auto", cfg)
            # the true density dies super-exponentially at the left edge;
            # drop leading rows buried under the contour-grid noise floor
            k0 = 0
            while k0 < len(records) - 1 and records[k0]["value"] <= 10.0 * records[k0]["abs_err"]:
                k0 += 1
            records = records[k0:]
        curves.append((f"alpha{a:g}", params, records))
    return curves


def cmd_figures(args) -> int:
    settings = resolve_settings(args)
    cfg = _mellin_config(settings)
    curves = figure_curves(args.id, cfg)
    os.makedirs(args.out_dir, exist_ok=True)
    manifest = []
    for label, params, records in curves:
        path = os.path.join(args.out_dir, f"{args.id}_{label}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(_records_csv(records))
        manifest.append(
            {
                "file": path,
                "gamma": params.gamma,
                "alpha": params.alpha,
                "rows": len(records),
            }
        )
    if args.json:
        print(json.dumps({"figure": args.id, "curves": manifest, "meta": _meta(args, None, settings)}, indent=2))
    else:
        for entry in manifest:
            print(f"wrote {entry['file']} ({entry['rows']} rows)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_common(sub, with_out=True):
    sub.add_argument("--config", help="config file (key = value lines, # comments)")
    sub.add_argument("--abs-tol", dest="abs_tol", type=float, help="quadrature absolute tolerance")
    sub.add_argument("--rel-tol", dest="rel_tol", type=float, help="quadrature relative tolerance")
    sub.add_argument("--contour-c", dest="contour_c", type=float, help="inversion contour abscissa")
    sub.add_argument("--product-j", dest="product_j", type=int, help="hypergeometric product truncation")
    fmt = sub.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output")
    fmt.add_argument("--csv", action="store_true", help="CSV output (default for record commands)")
    if with_out:
        sub.add_argument("--out", help="write output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alphasun",
        description="Limit densities of the max/affine recursion and their transforms.",
    )
    parser.add_argument("--version", action="version", version=f"alphasun {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("density", help="density values at points or on a log grid")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--x", type=float, nargs="+", help="evaluation points")
    p.add_argument("--x-log", dest="x_log", help="log grid lo:hi:n")
    p.add_argument(
        "--method",
        choices=("auto", "mb", "series", "closed", "hankel", "tail"),
        default="auto",
        help="evaluation route (auto: alpha=0 or 1 closed, else Mellin-Barnes)",
    )
    _add_common(p)
    p.set_defaults(func=cmd_density)

    p = commands.add_parser("transform", help="Mellin, generating, or Laplace transform at a point")
    p.add_argument("kind", choices=("mellin", "generating", "laplace"))
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--s", type=float, help="real Mellin argument")
    p.add_argument("--re", type=float, help="real part of complex s")
    p.add_argument("--im", type=float, default=0.0, help="imaginary part of complex s")
    p.add_argument("--x", type=float, help="generating-function argument")
    p.add_argument("--z", type=float, help="Laplace argument")
    _add_common(p)
    p.set_defaults(func=cmd_transform)

    p = commands.add_parser("validate", help="normalization / residual error tables")
    p.add_argument("--gamma", type=float, help="single-cell gamma")
    p.add_argument("--alpha", type=float, help="single-cell alpha")
    p.add_argument("--threshold", type=float, default=1e-4, help="pass/fail bar for both error tables")
    p.add_argument("--out-dir", dest="out_dir", default=".", help="directory for the table files")
    _add_common(p, with_out=False)
    p.set_defaults(func=cmd_validate)

    p = commands.add_parser("simulate", help="Monte Carlo recursion runs")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True, help="steps per path")
    p.add_argument("--paths", type=int, required=True, help="number of paths")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", choices=("pareto", "frechet"), default="pareto")
    p.add_argument(
        "--norming-exponent",
        dest="norming_exponent",
        type=float,
        help="override the n^(1/gamma) norming exponent",
    )
    p.add_argument("--dump-path", dest="dump_path", action="store_true", help="emit the first path's trajectory")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = commands.add_parser("figures", help="CSV data behind the standard density figures")
    p.add_argument("id", choices=sorted(_FIGURES))
    p.add_argument("--out-dir", dest="out_dir", default=".", help="directory for the curve files")
    _add_common(p, with_out=False)
    p.set_defaults(func=cmd_figures)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ConfigError) as exc:
        return _fail(args, exc, EXIT_DOMAIN)
    except AlphaSunError as exc:
        return _fail(args, exc, EXIT_CONVERGENCE)


def _fail(args, exc: AlphaSunError, code: int) -> int:
    if getattr(args, "json", False):
        payload = {
            "error": {
                "type": type(exc).__name__,
                "message": str(exc),
                "diagnostics": exc.diagnostics,
                "exit_code": code,
            }
        }
        print(json.dumps(payload, indent=2))
    print(f"alphasun: error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
