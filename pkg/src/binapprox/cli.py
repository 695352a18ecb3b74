"""Command-line front end.

Subcommands: ``bound`` (evaluate a bound spec from JSON), ``exact``
(exact-distance dominance reports for the solvable benchmarks), ``rscan``
and ``matern`` (Monte Carlo experiments), ``rates`` (distance-vs-scale
sweeps with a fitted slope).  Output is UTF-8 CSV with ``#``-prefixed
header comments echoing the configuration.

Exit codes: 0 success, 1 usage/config error, 2 inapplicable configuration
(e.g. variance <= 1), 3 internal failure.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import bounds as _bounds
from . import matern as _matern
from . import oracle as _oracle
from . import rscan as _rscan
from .binomial import BinomialParams, binomial_pmf
from .engine import filter_floor, fit_rate
from .lattice import make_pmf, tv_distance, loc_distance

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INAPPLICABLE = 2
EXIT_INTERNAL = 3

CSV_SCHEMA_VERSION = 1


class Inapplicable(Exception):
    """Valid input whose preconditions (variance > 1 etc.) fail."""


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _header(config: dict) -> list[str]:
    echo = " ".join(f"{k}={v}" for k, v in config.items())
    return [f"# schema_version={CSV_SCHEMA_VERSION}", f"# {echo}"]


def _row(names, values) -> list[str]:
    return [",".join(names), ",".join(_fmt(v) for v in values)]


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def cmd_bound(args) -> int:
    with open(args.spec_file, "r", encoding="utf-8") as fh:
        text = fh.read()
    spec = _bounds.spec_from_json(text)
    rows = []
    for l, metric in ((1, "tv"), (2, "loc")):
        if isinstance(spec, _bounds.IndependentSummandSpec):
            value = _bounds.independent_sum_bound(spec, l)
            sigma2 = spec.sigma2
            theta = value * sigma2 - _bounds.ROUNDING_CONSTANT
        elif isinstance(spec, _bounds.LocalDependenceSpec):
            value = _bounds.local_dependence_bound(spec, l)
            sigma2 = spec.sigma2
            theta = sum(t.theta(l) for t in spec.terms)
        elif isinstance(spec, _bounds.PointProcessSpec):
            if args.sigma2 is None:
                raise Inapplicable("point-process specs need --sigma2")
            sigma2 = args.sigma2
            value = _bounds.point_process_bound(spec, l, sigma2)
            theta = sum(t.weight * t.theta(l) for t in spec.terms)
        elif isinstance(spec, _bounds.DecomposableSpec):
            value = _bounds.decomposition_bound(spec, l)
            sigma2 = spec.sigma2
            theta = sum(t.theta() for t in
                        (spec.terms_l1 if l == 1 else spec.terms_l2))
        else:
            raise ValueError("unknown spec type")
        rows.append((metric, l, value, sigma2, theta))
    lines = _header({"subcommand": "bound", "spec_file": args.spec_file})
    lines.append("metric,l,bound,sigma2,theta_sum,constant")
    for metric, l, value, sigma2, theta in rows:
        lines.append(",".join(_fmt(v) for v in
                              (metric, l, value, sigma2, theta,
                               _bounds.ROUNDING_CONSTANT)))
    _emit(lines, args.out)
    return EXIT_OK


def cmd_exact(args) -> int:
    if args.kind == "poisson-binomial":
        summand = make_pmf([1.0 - args.p, args.p]).translate(-args.p)
        spec = _bounds.IndependentSummandSpec([summand] * args.n)
        sigma2 = spec.sigma2
        if sigma2 <= 1.0:
            raise Inapplicable(f"variance {sigma2} <= 1")
        w = _oracle.exact_sum_pmf(spec.summands)
        tv, loc, _cp = _oracle.exact_distance_report(w)
        b1 = _bounds.independent_sum_bound(spec, 1)
        b2 = _bounds.independent_sum_bound(spec, 2)
    else:
        model = _oracle.TwoRunsModel(args.n, args.p)
        raw = _oracle.two_runs_pmf(model)
        w = raw.translate(-raw.mean())
        if w.variance() <= 1.0:
            raise Inapplicable(f"variance {w.variance()} <= 1")
        tv, loc, _cp = _oracle.exact_distance_report(w)
        spec = _oracle.two_runs_dependence_spec(model)
        b1 = _bounds.local_dependence_bound(spec, 1)
        b2 = _bounds.local_dependence_bound(spec, 2)
        sigma2 = spec.sigma2
    verdict = "PASS" if (tv <= b1 and loc <= b2) else "FAIL"
    lines = _header({"subcommand": "exact", "kind": args.kind,
                     "n": args.n, "p": args.p})
    lines += _row(
        ["kind", "n", "p", "sigma2", "exact_tv", "exact_loc",
         "bound_l1", "bound_l2", "verdict"],
        [args.kind, args.n, args.p, sigma2, tv, loc, b1, b2, verdict])
    _emit(lines, args.out)
    return EXIT_OK


_RSCAN_COLS = ["n", "r", "a", "dist", "reps", "seed", "sigma2",
               "bound_l1", "bound_l2", "emp_tv", "emp_tv_lo", "emp_tv_hi",
               "emp_loc", "emp_loc_lo", "emp_loc_hi", "tv_floor",
               "loc_floor", "wall_time"]


def _result_line(row: dict, cols) -> str:
    return ",".join(_fmt(row.get(c, "")) for c in cols)


def cmd_rscan(args) -> int:
    cfg = _rscan.RScanConfig(n=args.n, r=args.r, a=args.a,
                             base_dist=args.dist)
    if _rscan.variance_formula(cfg) <= 1.0:
        raise Inapplicable("variance <= 1")
    res = _rscan.empirical_distance(cfg, args.reps, args.seed)
    lines = _header(res.config_echo | {"reps": args.reps, "seed": args.seed})
    lines.append(",".join(_RSCAN_COLS))
    lines.append(_result_line(res.csv_row(), _RSCAN_COLS))
    _emit(lines, args.out)
    return EXIT_OK


_MATERN_COLS = ["d", "lam", "r", "a", "reps", "seed", "sigma2",
                "bound_l1", "bound_l2", "emp_tv", "emp_tv_lo", "emp_tv_hi",
                "emp_loc", "emp_loc_lo", "emp_loc_hi", "tv_floor",
                "loc_floor", "wall_time"]


def cmd_matern(args) -> int:
    if args.r is not None:
        cfg = _matern.MaternConfig(d=args.d, lam=args.lam, r=args.r)
    else:
        cfg = _matern.MaternConfig.from_intensity_product(args.d, args.lam,
                                                          args.a)
    sigma2, _ = _matern.variance_total(cfg)
    if sigma2 <= 1.0:
        raise Inapplicable("variance <= 1")
    res = _matern.empirical_distance(cfg, args.reps, args.seed)
    lines = _header(res.config_echo | {"reps": args.reps, "seed": args.seed})
    lines.append(",".join(_MATERN_COLS))
    lines.append(_result_line(res.csv_row(), _MATERN_COLS))
    _emit(lines, args.out)
    return EXIT_OK


def cmd_rates(args) -> int:
    scales = args.scales
    if len(scales) < 3:
        raise argparse.ArgumentTypeError("need at least 3 scales")
    results = []
    for scale in scales:
        if args.app == "rscan":
            cfg = _rscan.RScanConfig(n=int(scale), r=args.r, a=args.a,
                                     base_dist=args.dist)
            res = _rscan.empirical_distance(cfg, args.reps, args.seed)
            cols = _RSCAN_COLS
        else:
            cfg = _matern.MaternConfig.from_intensity_product(args.d,
                                                              float(scale),
                                                              args.a)
            res = _matern.empirical_distance(cfg, args.reps, args.seed)
            cols = _MATERN_COLS
        results.append(res)
    key = "tv" if args.metric == "tv" else "loc"
    points = [(float(s), getattr(r, key)) for s, r in zip(scales, results)]
    floors = [r.tv_floor if key == "tv" else r.loc_floor for r in results]
    kept, dropped = filter_floor(points, floors)
    lines = _header({"subcommand": "rates", "app": args.app,
                     "metric": args.metric, "scales": ";".join(map(str, scales)),
                     "reps": args.reps, "seed": args.seed})
    lines.append(",".join(cols))
    for res in results:
        lines.append(_result_line(res.csv_row(), cols))
    if len(kept) >= 3:
        fit = fit_rate(kept)
        lines.append(f"# slope={fit.slope!r} slope_lo={fit.slope_ci[0]!r} "
                     f"slope_hi={fit.slope_ci[1]!r} intercept={fit.intercept!r} "
                     f"n_dropped={len(dropped)}")
    else:
        lines.append(f"# slope=nan n_dropped={len(dropped)} "
                     "(too few points above the noise floor)")
    _emit(lines, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="binapprox",
        description="Centered-binomial approximation bounds and experiments")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("bound", help="evaluate a bound spec from JSON")
    p.add_argument("spec_file")
    p.add_argument("--sigma2", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("exact", help="exact-distance dominance report")
    p.add_argument("kind", choices=["poisson-binomial", "two-runs"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("rscan", help="window-exceedance experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--dist", choices=list(_rscan.BASE_DISTS),
                   default="exponential")
    p.add_argument("--reps", type=int, default=10 ** 5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metric", choices=["tv", "loc"], default="tv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_rscan)

    p = sub.add_parser("matern", help="hard-core point count experiment")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lam", type=float, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--r", type=float, default=None)
    group.add_argument("--a", type=float, default=None)
    p.add_argument("--reps", type=int, default=10 ** 5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metric", choices=["tv", "loc"], default="tv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_matern)

    p = sub.add_parser("rates", help="distance-vs-scale sweep with slope fit")
    p.add_argument("--app", choices=["rscan", "matern"], required=True)
    p.add_argument("--scales", type=float, nargs="+", required=True)
    p.add_argument("--reps", type=int, default=10 ** 5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metric", choices=["tv", "loc"], default="tv")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--dist", choices=list(_rscan.BASE_DISTS),
                   default="exponential")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_rates)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except Inapplicable as exc:
        print(f"inapplicable: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except (ValueError, OSError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
