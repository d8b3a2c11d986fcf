"""Command-line front end: ``modsel <subcommand> [flags]``.

Output is CSV on standard output or ``--out``. Diagnostics go to standard
error prefixed ``error:<code>:`` with code 1 for usage errors and 2 for
runtime or data errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from importlib import resources

import numpy as np

from . import bayes_factors as bf
from . import cv_bayes as cv
from . import lasso
from . import multitest as mt
from . import peb
from . import simlab
from .priors import measure_label, parse_measure
from .stone import FixedMean, GlobalNull, HierarchicalP2, StoneDataset, generate, suff_stats

SEED_ENV = "MODSEL_SEED"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=None,
                   help=f"random seed (default: ${SEED_ENV} if set, else 0)")
    g.add_argument("--out", default=None, help="write CSV here instead of standard output")
    g.add_argument("--quiet", action="store_true", help="suppress informational messages")
    g.add_argument("--full-precision", action="store_true",
                   help="print numbers with 17 significant digits instead of 6")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="modsel", description="Model selection and multiple testing workbench.")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("stone-bf", parents=[common],
                       help="log Bayes factor for the p x r normal-means layout")
    p.add_argument("--in", dest="infile", help="dataset CSV with header group,rep,value")
    p.add_argument("--p", type=int, help="groups, when simulating instead of reading --in")
    p.add_argument("--r", type=int, help="replicates per group, when simulating")
    p.add_argument("--law", choices=["null", "p2", "fixed"], default="null",
                   help="generation law when simulating (default: null)")
    p.add_argument("--tau2", type=float, default=1.0,
                   help="mean square of the fixed means for --law fixed (default: 1)")
    p.add_argument("--prior", default="zs",
                   help="mixing measure: zs, smooth-cauchy, point:T0, truncated-zs:T, tabulated:FILE")

    p = sub.add_parser("peb", parents=[common], help="empirical-Bayes nested model selection")
    p.add_argument("--in", dest="infile", required=True, help="one-column CSV of y values with a header")

    p = sub.add_parser("cvbf", parents=[common], help="pseudo cross-validatory Bayes factor")
    p.add_argument("--in", dest="infile", required=True, help="dataset CSV with header group,rep,value")
    p.add_argument("--k", type=int, required=True, help="training replicates, 1 <= k < r")

    p = sub.add_parser("mtest", parents=[common], help="two-groups multiple test on simulated data")
    p.add_argument("--m", type=int, required=True, help="number of tests")
    p.add_argument("--eps", type=float, required=True, help="proportion of alternatives")
    p.add_argument("--u", type=float, required=True, help="alternative/null variance ratio")
    p.add_argument("--delta", type=float, default=1.0, help="type I / type II loss ratio (default: 1)")
    p.add_argument("--alpha", type=float, default=0.05, help="BH level (default: 0.05)")
    p.add_argument("--null-var", type=float, default=1.0, help="null variance (default: 1)")
    p.add_argument("--rule", choices=["bh", "oracle"], required=True, help="testing rule")

    p = sub.add_parser("lasso", parents=[common], help="Lasso fit by coordinate descent")
    p.add_argument("--in", dest="infile", required=True,
                   help="CSV with header; first column y, remaining columns predictors")
    pen = p.add_mutually_exclusive_group(required=True)
    pen.add_argument("--penalty", type=float, help="penalty r on the unscaled RSS objective")
    pen.add_argument("--bickel", metavar="A,SIGMA",
                     help="use r = 2n * A*sigma*sqrt(log(p)/n), p = number of predictors")
    p.add_argument("--tol", type=float, default=1e-10, help="convergence tolerance (default: 1e-10)")
    p.add_argument("--max-iter", type=int, default=100_000, help="maximum sweeps (default: 100000)")

    p = sub.add_parser("experiment", parents=[common], help="run a registered simulation study")
    p.add_argument("--config", required=True, help="'key = value' config file")
    p.add_argument("--replicates", type=int, help="override replicates")
    p.add_argument("--workers", type=int, help="override worker processes")
    p.add_argument("--summary", metavar="KEYS",
                   help="comma-separated grouping keys; print a summary table instead of trials")
    p.add_argument("--stats", default="mean,stderr",
                   help=f"summary statistics from {','.join(simlab.STATS)} (default: mean,stderr)")
    p.add_argument("--metrics", help="comma-separated metrics to summarize (default: all)")

    sub.add_parser("table1", parents=[common], help="print the shipped reference table of log Bayes factor approximations")
    return parser


class _Writer:
    def __init__(self, args):
        self.fmt = "{:.17g}" if args.full_precision else "{:.6g}"
        self.buf = io.StringIO()
        self.csv = csv.writer(self.buf, lineterminator="\n")

    def num(self, x):
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return str(int(x))
        return self.fmt.format(float(x))

    def row(self, *values):
        self.csv.writerow([v if isinstance(v, str) else self.num(v) for v in values])


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"${SEED_ENV} must be an integer, got {env!r}")


def _read_csv(path, min_cols=1):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(str(exc))
    if not rows or len(rows[0]) < min_cols:
        raise DataError(f"{path}: missing header")
    header, body = rows[0], [r for r in rows[1:] if r]
    try:
        data = np.array([[float(v) for v in r] for r in body], dtype=float)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}")
    if data.size == 0 or data.ndim != 2 or data.shape[1] != len(header):
        raise DataError(f"{path}: expected {len(header)} numeric columns per row")
    return header, data


def _load_dataset(path) -> StoneDataset:
    try:
        return StoneDataset.from_csv(path)
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(str(exc))


def cmd_stone_bf(args, w):
    prior = parse_measure(args.prior)
    if args.infile:
        ds = _load_dataset(args.infile)
    else:
        if args.p is None or args.r is None:
            raise UsageError("stone-bf: give --in or both --p and --r")
        law = {"null": GlobalNull(),
               "p2": HierarchicalP2(prior),
               "fixed": FixedMean(np.sqrt(args.tau2) * np.where(np.arange(args.p) % 2 == 0, 1.0, -1.0))}[args.law]
        ds = generate(args.p, args.r, law, _seed(args))
    w.row("p", "r", "prior", "S", "log_bf21")
    w.row(ds.p, ds.r, measure_label(prior), suff_stats(ds).S, bf.log_bf21_stone(ds, prior))


def cmd_peb(args, w):
    header, data = _read_csv(args.infile)
    if data.shape[1] != 1:
        raise DataError(f"{args.infile}: expected a single column")
    state = peb.peb_scan(data[:, 0])
    w.row("q", "ss_q", "chat_q", "lambda_q")
    for q in range(state.p):
        w.row(q + 1, state.ss[q], state.chat[q], state.lam[q])
    w.row("selected_q", peb.select_q(state))


def cmd_cvbf(args, w):
    ds = _load_dataset(args.infile)
    if not 1 <= args.k < ds.r:
        raise DataError(f"--k must satisfy 1 <= k < r = {ds.r}")
    w.row("p", "r", "k", "c_ratio", "log_cvbf_ps")
    w.row(ds.p, ds.r, args.k, args.k / ds.r, cv.cvbf_ps(ds, args.k))


def cmd_mtest(args, w):
    model = mt.TwoGroupsModel(eps=args.eps, u=args.u, delta=args.delta, null_var=args.null_var)
    outcome = mt.sample_two_groups(args.m, model, _seed(args))
    if args.rule == "bh":
        if not 0 < args.alpha < 1:
            raise UsageError("--alpha must lie in (0, 1)")
        done = mt.bh_test(outcome, model, args.alpha)
    else:
        done = mt.oracle_test(outcome, model)
    w.row("rule", "rejections", "false_discoveries", "false_nondiscoveries", "risk")
    w.row(args.rule, done.rejections.size, done.false_discoveries, done.false_nondiscoveries,
          done.loss(model.delta))


def cmd_lasso(args, w):
    header, data = _read_csv(args.infile, min_cols=2)
    y, Z = data[:, 0], data[:, 1:]
    n = y.size
    if args.bickel is not None:
        try:
            A, sigma = (float(v) for v in args.bickel.split(","))
        except ValueError:
            raise UsageError("--bickel expects A,SIGMA")
        penalty = lasso.rss_penalty(lasso.bickel_penalty(A, sigma, n, Z.shape[1]), n)
    else:
        penalty = args.penalty
    prob = lasso.LassoProblem.standardized(Z, y, penalty)
    fit = lasso.fit_lasso(prob, tol=args.tol, max_iter=args.max_iter)
    if not fit.converged and not args.quiet:
        print(f"warning: no convergence after {fit.iterations} sweeps", file=sys.stderr)
    w.row("j", "beta_j")
    for j, b in enumerate(fit.beta):
        w.row(j + 1, b)
    w.row("nonzeros", "objective")
    w.row(lasso.sparsity_count(fit.beta), fit.objective)


def cmd_experiment(args, w):
    overrides = {"replicates": args.replicates, "workers": args.workers}
    if args.seed is not None or SEED_ENV in os.environ:
        overrides["master_seed"] = _seed(args)
    try:
        config = simlab.load_config(args.config, overrides)
    except FileNotFoundError as exc:
        raise DataError(str(exc))
    except simlab.ConfigError as exc:
        raise DataError(f"{args.config}: {exc}")
    table = simlab.run_experiment(config)
    if not args.quiet:
        print(f"{config.name}: {len(table)} trials", file=sys.stderr)
    if args.summary:
        keys = [k.strip() for k in args.summary.split(",") if k.strip()]
        stats = [s.strip() for s in args.stats.split(",") if s.strip()]
        metrics = None if args.metrics is None else [m.strip() for m in args.metrics.split(",") if m.strip()]
        if metrics is not None and set(metrics) - set(table.metric_names):
            raise UsageError(f"unknown metrics {sorted(set(metrics) - set(table.metric_names))}; "
                             f"available: {','.join(table.metric_names)}")
        try:
            summary = simlab.summarize(table, keys, stats, metrics)
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc))
        w.buf.write(simlab.summary_csv_text(summary))
    elif config.output_path is None or args.out is not None:
        w.buf.write(table.to_csv_text())


def cmd_table1(args, w):
    w.buf.write(resources.files("modsel").joinpath("fixtures/table1.csv").read_text())


COMMANDS = {"stone-bf": cmd_stone_bf, "peb": cmd_peb, "cvbf": cmd_cvbf, "mtest": cmd_mtest,
            "lasso": cmd_lasso, "experiment": cmd_experiment, "table1": cmd_table1}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        w = _Writer(args)
        COMMANDS[args.command](args, w)
    except UsageError as exc:
        print(f"error:1:{exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error:2:{exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"error:2:{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = w.buf.getvalue()
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error:2:{exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
