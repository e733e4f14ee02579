"""``ggmfdr`` command line: estimate | tune | simulate | calibrate.

Exit codes: 0 success, 2 input error, 3 numeric or solver error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .dataio import read_data_csv
from .errors import GgmError, InputError
from .experiments import ExperimentConfig, calibrate, default_jobs, simulate
from .gfc import run_gfc, tune_delta
from .solvers import SOLVERS

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _emit(text, output):
    if output:
        with open(output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_estimate(args):
    x = read_data_csv(args.data, header=args.header)
    res = run_gfc(x, args.solver, args.alpha, args.delta, args.grid_n)
    sel = res.selection
    doc = sel.to_dict()
    doc["p"], doc["n"] = sel.p, sel.n
    doc["solver"] = args.solver
    doc["delta"] = res.tuning.delta_hat if res.tuning else args.delta
    _emit(json.dumps(doc, indent=2), args.output)
    summary = sys.stdout if args.output else sys.stderr
    delta_txt = f"delta_hat={res.tuning.delta_hat:g}" if res.tuning else f"delta={args.delta:g}"
    print(f"p={sel.p} n={sel.n} {delta_txt} t_hat={sel.t_hat:.6g}"
          f"{' (fallback)' if sel.fallback_used else ''} edges={len(sel.edges)}", file=summary)
    return EXIT_OK


def cmd_tune(args):
    x = read_data_csv(args.data, header=args.header)
    res = tune_delta(x, args.solver, args.grid_n)
    doc = {"delta_hat": res.delta_hat, "j_hat": res.j_hat, "N": res.N,
           "losses": [None if v == float("inf") else v for v in res.losses.tolist()],
           "skipped": {str(k): v for k, v in sorted(res.failures.items())}}
    _emit(json.dumps(doc, indent=2), args.output)
    return EXIT_OK


def _config(args):
    return ExperimentConfig(
        family=args.family, p=args.p, n=args.n, alpha=getattr(args, "alpha", 0.1),
        solver=args.solver, delta=args.delta, replications=args.reps,
        base_seed=args.seed, output_path=args.output, format=getattr(args, "format", "json"),
        fix_model=args.fix_model, N=args.grid_n,
    )


def cmd_simulate(args):
    report = simulate(_config(args), jobs=args.jobs)
    _emit(report.to_json() if args.format == "json" else report.to_csv(), args.output)
    return EXIT_OK


def cmd_calibrate(args):
    report = calibrate(_config(args), jobs=args.jobs)
    _emit(json.dumps(report, indent=2), args.output)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="ggmfdr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--solver", choices=SOLVERS, default="lasso")
        p.add_argument("--delta", type=float, default=None,
                       help="fixed penalty scale; tuned on the grid j/N when omitted")
        p.add_argument("--grid-n", type=int, default=20, help="tuning grid resolution N")
        p.add_argument("--output", default=None)

    for name, fn in (("estimate", cmd_estimate), ("tune", cmd_tune)):
        p = sub.add_parser(name)
        p.add_argument("data", help="CSV, rows = observations, columns = variables")
        p.add_argument("--header", action="store_true", help="skip the first CSV row")
        if name == "estimate":
            p.add_argument("--alpha", type=float, default=0.1)
        common(p)
        p.set_defaults(func=fn)

    for name, fn in (("simulate", cmd_simulate), ("calibrate", cmd_calibrate)):
        p = sub.add_parser(name)
        p.add_argument("--family", choices=("band", "hub", "er"), default="band")
        p.add_argument("--p", type=int, default=50)
        p.add_argument("--n", type=int, default=100)
        p.add_argument("--reps", type=int, default=100 if name == "simulate" else 20)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=default_jobs())
        p.add_argument("--fix-model", action="store_true",
                       help="draw the ER graph once from --seed instead of per replication")
        if name == "simulate":
            p.add_argument("--alpha", type=float, default=0.1)
            p.add_argument("--format", choices=("json", "csv"), default="json")
        common(p)
        p.set_defaults(func=fn)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"ggmfdr: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (GgmError, ArithmeticError) as exc:
        print(f"ggmfdr: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"ggmfdr: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
