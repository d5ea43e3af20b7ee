"""Command-line front end.

Subcommands: phi, gamma, green, nu, mu, simulate, martin, verify.  Every
file output is accompanied by a `<file>.manifest.json` run manifest; the
output files themselves carry no timestamps, so a rerun with the same
config is byte-identical.  Exit codes: 0 success, 1 validation error,
2 numeric error, 3 acceptance-check failure (verify only).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, analytic, green, martin, simulate, verify
from .lattice import LatticeError, LatticePoint
from .rng import SeededStream


def _fmt(v: float) -> str:
    """Round-trip-safe decimal rendering ('.' decimal, 17 significant digits)."""
    return f"{float(v):.17g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _emit(path: str, text: str, manifest: dict):
    """Write an output file plus its run manifest; path '-' means stdout
    (manifest then goes to stderr as a single JSON line)."""
    if path == "-":
        sys.stdout.write(text)
        print(json.dumps(_jsonable(manifest), sort_keys=True), file=sys.stderr)
        return
    with open(path, "w") as fh:
        fh.write(text)
    with open(path + ".manifest.json", "w") as fh:
        json.dump(_jsonable(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest(args, t0: float, diagnostics: dict = None) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items())
           if k not in ("func",) and not callable(v)}
    return {"tool": "owk", "version": __version__, "config": cfg,
            "wall_time_s": time.time() - t0, "diagnostics": diagnostics or {}}


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(c) if isinstance(c, (float, np.floating))
                              else str(c) for c in row))
    return "\n".join(lines) + "\n"


def _parse_point(text: str) -> LatticePoint:
    try:
        a, b = text.split(",")
        return LatticePoint(int(a), int(b))
    except Exception:
        raise ValueError(f"expected a coordinate pair 'x1,x2', got {text!r}")


def _parse_int_list(text: str):
    try:
        return [int(s) for s in text.split(",") if s.strip() != ""]
    except Exception:
        raise ValueError(f"expected a comma-separated integer list, got {text!r}")


def _quad_spec(args) -> green.QuadratureSpec:
    kw = {}
    if getattr(args, "tol", None) is not None:
        kw["abs_tol"] = args.tol
        kw["rel_tol"] = args.tol
    return green.QuadratureSpec(**kw)


# ---------------------------------------------------------------------------
# subcommands

def cmd_phi(args) -> int:
    t0 = time.time()
    n = args.grid
    if n < 1:
        raise ValueError("--grid must be >= 1")
    # the closed form is undefined at t = 0, so the grid covers (0, pi]
    t = np.pi * np.arange(1, n + 1) / n
    prob = analytic.cf_by_form(t, args.p, args.form)
    closed = analytic.embedded_cf_closed(t, args.p, corrected=not args.as_expanded)
    rows = [(tv, pv, cv, abs(pv - cv)) for tv, pv, cv in zip(t, prob, closed)]
    text = _csv(["t", "phi_prob", "phi_closed", "absdiff"], rows)
    _emit(args.output, text, _manifest(args, t0, {"max_absdiff":
                                                  float(np.abs(prob - closed).max())}))
    return 0


def cmd_gamma(args) -> int:
    t0 = time.time()
    spec = _quad_spec(args)
    rows = []
    for x in _parse_int_list(args.x):
        val = green.gamma(x, args.p, spec, args.form, check=args.check)
        rows.append((x, val, np.sqrt(abs(x)) * val))
    text = _csv(["x", "gamma", "sqrt_x_gamma"], rows)
    _emit(args.output, text, _manifest(args, t0))
    return 0


def cmd_green(args) -> int:
    t0 = time.time()
    spec = _quad_spec(args)
    y = _parse_point(args.y)
    if args.embedded:
        if y.v2 != 0:
            raise ValueError("--embedded requires y on the axis (y2 = 0)")
        val = green.green_embedded(args.z, y.v1, args.p, spec, args.form)
    else:
        val = green.green_halfplane(args.z, y, args.p, spec, args.form)
    payload = {"z": args.z, "y": [y.v1, y.v2], "value": val,
               "embedded": bool(args.embedded), "p": args.p, "form": args.form}
    _emit(args.output, json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n",
          _manifest(args, t0))
    return 0


def cmd_nu(args) -> int:
    t0 = time.time()
    spec = _quad_spec(args)
    y = _parse_point(args.y)
    table = green.hitting_distribution(y, args.p, spec, tail_tol=args.tail_tol,
                                       strict=not args.best_effort)
    rows = list(zip(table.support.tolist(), table.masses.tolist()))
    text = _csv(["v", "mass"], rows)
    _emit(args.output, text,
          _manifest(args, t0, {"tail_bound": table.tail_bound,
                               "total": table.total()}))
    return 0


def cmd_mu(args) -> int:
    t0 = time.time()
    spec = _quad_spec(args)
    x = _parse_point(args.x)
    rows = [(u, green.mu_x(u, x, args.y1, spec)) for u in range(args.u_max + 1)]
    text = _csv(["u", "mu"], rows)
    _emit(args.output, text,
          _manifest(args, t0, {"partial_sum": float(sum(r[1] for r in rows))}))
    return 0


def cmd_simulate(args) -> int:
    t0 = time.time()
    start = _parse_point(args.start)
    out = simulate.sample_excursions(start, args.n,
                                     SeededStream(args.seed, args.stream),
                                     horizon=args.horizon)
    keep = ~out["truncated"]
    summary = {
        "start": [start.v1, start.v2],
        "n_episodes": args.n,
        "horizon": args.horizon,
        "seed": args.seed,
        "truncation_rate": float(out["truncated"].mean()),
        "tau1_mean": float(out["tau1"][keep].mean()) if keep.any() else None,
        "tau1_max": int(out["tau1"].max()),
        "x_sigma1_mean": float(out["x_sigma1"][keep].mean()) if keep.any() else None,
        "horizontal_fraction": float(out["horizontal_steps"].sum() / out["tau1"].sum()),
    }
    if args.episodes:
        rows = zip(range(args.n), out["tau1"].tolist(), out["x_sigma1"].tolist(),
                   out["horizontal_steps"].tolist(),
                   out["truncated"].astype(int).tolist())
        _emit(args.episodes,
              _csv(["episode", "tau1", "x_sigma1", "horizontal_steps", "truncated"],
                   rows),
              _manifest(args, t0, summary))
    _emit(args.output, json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n",
          _manifest(args, t0))
    return 0


def _parse_sweep(text: str) -> martin.DirectionSpec:
    if text.startswith("lambda="):
        return martin.DirectionSpec(mode="fixed-lambda", lam=float(text[7:]))
    if text in ("horizontal-dominant", "vertical-only"):
        return martin.DirectionSpec(mode=text)
    raise ValueError(f"unknown sweep {text!r}; use lambda=<value>, "
                     "horizontal-dominant or vertical-only")


def cmd_martin(args) -> int:
    t0 = time.time()
    spec = _quad_spec(args)
    x = _parse_point(args.x)
    sweeps = [_parse_sweep(s) for s in args.sweep] or \
        [martin.DirectionSpec(mode="fixed-lambda", lam=1.0)]
    report = martin.boundary_triviality_report(
        x, sweeps, args.p, spec, mc_budget=args.mc_budget,
        rng=SeededStream(args.seed, args.stream), horizon=args.horizon,
        form=args.form)
    if args.format == "csv":
        rows = [(r["y"][0], r["y"][1], r["K"], r["first_term"], r["err"])
                for sw in report.sweeps for r in sw["points"] if "K" in r]
        text = _csv(["y1", "y2", "K", "first_term", "err"], rows)
    else:
        text = json.dumps(_jsonable(report.to_dict()), indent=2, sort_keys=True) + "\n"
    _emit(args.output, text,
          _manifest(args, t0, {"sup_deviation": report.sup_deviation}))
    return 0


def cmd_verify(args) -> int:
    t0 = time.time()
    cfg = verify.RunConfig(p=args.p, form=args.form, seed=args.seed,
                           spec=_quad_spec(args), scale=args.scale,
                           mc_budget=args.mc_budget)
    summary = verify.run_suite(args.suite, cfg)
    wall = summary.pop("_wall_time")
    for check in summary["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"[{status}] {check['check_id']} {check['name']} "
              f"(threshold: {check['threshold']})")
    text = json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n"
    _emit(args.output, text, _manifest(args, t0, {"wall_time_suite_s": wall}))
    if not summary["all_passed"]:
        return 3
    return 0


# ---------------------------------------------------------------------------

def _add_common(sub, quad=True):
    sub.add_argument("--p", type=float, default=1.0 / 3.0,
                     help="geometric parameter of the horizontal slot law")
    sub.add_argument("--form", choices=analytic.CF_FORMS, default="ratio",
                     help="characteristic-function form")
    sub.add_argument("--output", "-o", default="-",
                     help="output file (default: stdout)")
    if quad:
        sub.add_argument("--tol", type=float, default=None,
                         help="quadrature abs/rel tolerance override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="owk",
        description="Green functions, hitting laws and Martin kernels of the "
                    "one-way half-plane lattice walk.")
    parser.add_argument("--version", action="version", version=f"owk {__version__}")
    parser.add_argument("--config", default=None,
                        help="JSON config file; its entries override flags")
    subs = parser.add_subparsers(dest="command")

    sp = subs.add_parser("phi", help="characteristic function table")
    _add_common(sp, quad=False)
    sp.add_argument("--grid", type=int, default=1000)
    sp.add_argument("--as-expanded", action="store_true",
                    help="use the uncorrected closed-form variant")
    sp.set_defaults(func=cmd_phi)

    sp = subs.add_parser("gamma", help="axis Green density gamma(x)")
    _add_common(sp)
    sp.add_argument("--x", required=True, help="comma-separated integer list")
    sp.add_argument("--check", action="store_true",
                    help="recompute on refined nodes and fail on disagreement")
    sp.set_defaults(func=cmd_gamma)

    sp = subs.add_parser("green", help="half-plane or embedded Green value")
    _add_common(sp)
    sp.add_argument("--z", type=int, default=0, help="axis start point")
    sp.add_argument("--y", required=True, help="target 'y1,y2'")
    sp.add_argument("--embedded", action="store_true",
                    help="axis-chain Green function (y2 must be 0)")
    sp.set_defaults(func=cmd_green)

    sp = subs.add_parser("nu", help="axis hitting distribution")
    _add_common(sp)
    sp.set_defaults(p=2.0 / 3.0)
    sp.add_argument("--y", required=True, help="start 'y1,y2'")
    sp.add_argument("--tail-tol", type=float, default=1e-3)
    sp.add_argument("--best-effort", action="store_true",
                    help="return the largest computable table instead of "
                         "failing when tail-tol is unreachable")
    sp.set_defaults(func=cmd_nu)

    sp = subs.add_parser("mu", help="defective height law at the horizontal record")
    _add_common(sp)
    sp.add_argument("--x", required=True, help="start 'x1,x2'")
    sp.add_argument("--y1", type=int, required=True)
    sp.add_argument("--u-max", type=int, default=100)
    sp.set_defaults(func=cmd_mu)

    sp = subs.add_parser("simulate", help="seeded excursion sampler")
    _add_common(sp, quad=False)
    sp.add_argument("--start", default="0,0", help="start 'x1,x2'")
    sp.add_argument("--n", type=int, default=10000)
    sp.add_argument("--horizon", type=int, default=100000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--episodes", default=None,
                    help="also write a per-episode CSV to this path")
    sp.set_defaults(func=cmd_simulate)

    sp = subs.add_parser("martin", help="full Martin kernel along sweeps")
    _add_common(sp)
    sp.add_argument("--x", required=True, help="start 'x1,x2'")
    sp.add_argument("--sweep", action="append", default=[],
                    help="lambda=<value>, horizontal-dominant or vertical-only "
                         "(repeatable)")
    sp.add_argument("--mc-budget", type=int, default=100000)
    sp.add_argument("--horizon", type=int, default=1000000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--tail", dest="tol", type=float, default=None,
                    help="alias of --tol for the quadrature tolerance")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_martin)

    sp = subs.add_parser("verify", help="acceptance suites")
    _add_common(sp)
    sp.add_argument("--suite", choices=verify.SUITES, default="all")
    sp.add_argument("--seed", type=int, default=20260823)
    sp.add_argument("--scale", type=float, default=1.0,
                    help="multiplier on Monte Carlo sample budgets")
    sp.add_argument("--mc-budget", type=int, default=100000)
    sp.set_defaults(func=cmd_verify)
    return parser


def _apply_config(args, parser):
    if not args.config:
        return
    with open(args.config) as fh:
        overrides = json.load(fh)
    if not isinstance(overrides, dict):
        raise ValueError("--config must contain a JSON object")
    known = set(vars(args))
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if attr not in known:
            raise ValueError(f"config key {key!r} is not a flag of "
                             f"the {args.command!r} subcommand")
        setattr(args, attr, value)


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            return 1
        _apply_config(args, parser)
        return args.func(args)
    except SystemExit as exc:
        # argparse signals usage errors with code 2; the contract reserves
        # 2 for numeric failures and uses 1 for validation
        return 1 if exc.code else 0
    except (analytic.NumericError, RuntimeError) as exc:
        print(f"owk: numeric error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, LatticeError, OSError) as exc:
        print(f"owk: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
