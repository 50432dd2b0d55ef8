"""Command-line harness for the algebra suite and the benchmark studies."""

import argparse
import sys
from dataclasses import replace

from .algebra import run_property_suite
from .reporting import emit_report
from .studies import (GAP_TOL, KAPPA_RTOL, check_study, load_config,
                      lin2d_config, run_study, synthetic2loop_config)


def _parser():
    p = argparse.ArgumentParser(
        prog="deirl",
        description="Symmetric-product algebra checks and data-driven "
                    "policy-iteration conditioning studies.")
    sub = p.add_subparsers(dest="command", required=True)

    alg = sub.add_parser("check-algebra",
                         help="run the randomized property suite")
    alg.add_argument("--cases", type=int, default=1000,
                     help="total randomized case budget (default 1000)")
    alg.add_argument("--seed", type=int, default=20240213,
                     help="suite seed (default 20240213)")

    run = sub.add_parser("run", help="run a benchmark study")
    run.add_argument("study", choices=("lin2d", "synthetic2loop", "custom"))
    run.add_argument("--config", help="JSON study configuration")
    run.add_argument("--outdir", default="reports",
                     help="directory for report files (default ./reports)")
    run.add_argument("--modulation",
                     help="comma-separated diagonal entries overriding the "
                          "study default, e.g. 1,10")
    run.add_argument("--no-modulation", action="store_true",
                     help="skip the modulated variant")
    run.add_argument("--mee-path", choices=("algebraic", "physical"),
                     help="data path for the modulated variant")
    run.add_argument("--gap-tol", type=float, default=GAP_TOL,
                     help="final gain gap bound (default %g)" % GAP_TOL)
    run.add_argument("--kappa-rtol", type=float, default=KAPPA_RTOL,
                     help="relative band for conditioning references "
                          "(default %g)" % KAPPA_RTOL)
    run.add_argument("--no-figures", action="store_true",
                     help="skip figure rendering")
    return p


def _study_config(args):
    if args.config is not None:
        config = load_config(args.config)
        if args.study != "custom" and config.plant != args.study:
            raise ValueError("config is for plant %r but study %r was requested"
                             % (config.plant, args.study))
    elif args.study == "lin2d":
        config = lin2d_config()
    elif args.study == "synthetic2loop":
        config = synthetic2loop_config()
    else:
        raise ValueError("run custom requires --config")
    if args.no_modulation:
        config = replace(config, modulation=None)
    elif args.modulation is not None:
        entries = tuple(float(v) for v in args.modulation.split(","))
        config = replace(config, modulation=entries)
    if args.mee_path is not None:
        config = replace(config, mee_path=args.mee_path)
    return config


def _cmd_check_algebra(args):
    report = run_property_suite(cases=args.cases, seed=args.seed)
    for line in report.lines():
        print(line)
    return 0 if report.all_passed else 1


def _cmd_run(args):
    config = _study_config(args)
    report = run_study(config)
    print("study %s" % report.name)
    print("%-12s %4s %10s %10s %12s" % ("algorithm", "loop", "max kappa",
                                        "min kappa", "gain gap"))
    for row in report.rows():
        print("%-12s %4d %10.2f %10.2f %12.3e"
              % (row["algorithm"], row["loop"], row["kappa_max"],
                 row["kappa_min"], row["final_gain_gap"]))
    paths = emit_report(report, args.outdir, figures=not args.no_figures)
    for path in paths:
        print("wrote %s" % path)
    checks = check_study(report, gap_tol=args.gap_tol,
                         kappa_rtol=args.kappa_rtol)
    failures = 0
    for name, ok, detail in checks:
        print("%s  %s (%s)" % ("PASS" if ok else "FAIL", name, detail))
        failures += 0 if ok else 1
    if failures:
        print("%d of %d checks failed" % (failures, len(checks)))
        return 1
    print("all %d checks passed" % len(checks))
    return 0


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "check-algebra":
            return _cmd_check_algebra(args)
        return _cmd_run(args)
    except (ValueError, RuntimeError, OSError) as err:
        print("error: %s" % err, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
