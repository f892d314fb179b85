"""Command line interface.

Exit codes: 0 success, 2 usage, 3 unreadable or malformed data, 4 a Step-2
target kept more parents than the series supports, 5 empty truth in an
evaluation, 6 unstable model where stationarity is required, 7 oracle
enumeration over budget.

Subcommands that draw random numbers take --seed, falling back to the
G1DBN_SEED environment variable; they refuse to run with neither so every
run is reproducible on purpose.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from ._engine import resolve_engine
from .errors import (
    BudgetExceeded,
    EmptyTruth,
    G1dbnError,
    StabilityNotReached,
    TooManyParents,
    Unstable,
)
from .evaluate import auc_pr, confusion, pr_curve, precision_at_recall
from .inference import bh_select, step1_score_rows, step2_scores, threshold_edges
from .io import (
    read_edges,
    read_model,
    read_score_rows,
    read_scores,
    read_series,
    write_edge_pairs,
    write_model,
    write_score_rows,
    write_scored_edges,
    write_scores,
    write_series,
)
from .model import ESTIMATORS, InferenceConfig, ScoreMatrix
from .oracle import population_gmin, property_report
from .simulate import random_ar1_model, simulate_series
from .study import DEFAULT_RECALL_GRID, StudyConfig, run_study

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_TOO_MANY_PARENTS = 4
EXIT_EMPTY_TRUTH = 5
EXIT_UNSTABLE = 6
EXIT_BUDGET = 7

_FLOAT_OUT = "%.6g"


class _UsageError(Exception):
    pass


def _err(message: str) -> None:
    print(f"g1dbn: {message}", file=sys.stderr)


def _seed_value(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("G1DBN_SEED")
    if env is None:
        raise _UsageError("--seed is required (or set G1DBN_SEED)")
    try:
        return int(env)
    except ValueError:
        raise _UsageError(f"G1DBN_SEED must be an integer, got {env!r}")


def _engine_value(args) -> str:
    try:
        return resolve_engine(args.engine)
    except ValueError as exc:
        raise _UsageError(str(exc))


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise _UsageError(message)


def _out_dir(args) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return args.out_dir


def _fmt_out(value: float) -> str:
    return _FLOAT_OUT % value


def _cmd_simulate(args) -> int:
    _check(args.p >= 2, "--p must be >= 2")
    _check(args.n >= 1, "--n must be >= 1")
    _check(0 <= args.density <= 1, "--density must lie in [0, 1]")
    _check(args.replicates >= 1, "--replicates must be >= 1")
    _check(0 <= args.sigma_offdiag <= 1, "--sigma-offdiag must lie in [0, 1]")
    _check(args.burn_in >= 0, "--burn-in must be >= 0")
    _check(
        args.uniform_low < args.uniform_high,
        "--uniform-low must be below --uniform-high",
    )
    seed = _seed_value(args)
    out_dir = _out_dir(args)
    children = np.random.SeedSequence(seed).spawn(args.replicates)
    for index, child in enumerate(children, start=1):
        model_seed, series_seed = child.spawn(2)
        model = random_ar1_model(
            args.p,
            args.density,
            np.random.default_rng(model_seed),
            require_stable=args.require_stable,
            sigma_offdiag_density=args.sigma_offdiag,
        )
        series = simulate_series(
            model,
            args.n,
            np.random.default_rng(series_seed),
            noise=args.noise,
            uniform_low=args.uniform_low,
            uniform_high=args.uniform_high,
            burn_in=args.burn_in,
        )
        write_model(os.path.join(out_dir, f"model_{index:03d}.tsv"), model)
        write_series(os.path.join(out_dir, f"series_{index:03d}.tsv"), series)
    print(f"wrote {args.replicates} model/series pairs to {out_dir}")
    return 0


def _inference_config(args) -> InferenceConfig:
    _check(args.estimator in ESTIMATORS, f"--estimator must be one of {ESTIMATORS}")
    _check(0 < args.alpha1 <= 1, "--alpha1 must lie in (0, 1]")
    if args.fdr is not None:
        _check(0 < args.fdr < 1, "--fdr must lie in (0, 1)")
    _check(0 < args.alpha2 <= 1, "--alpha2 must lie in (0, 1]")
    return InferenceConfig(
        estimator=args.estimator,
        alpha1=args.alpha1,
        alpha2=args.alpha2,
        fdr_level=args.fdr,
    )


def _cmd_infer(args) -> int:
    _check(args.threads >= 1, "--threads must be >= 1")
    cfg = _inference_config(args)
    engine = _engine_value(args)
    if args.target is not None and args.s1 is not None:
        raise _UsageError("--target and --s1 are mutually exclusive")
    ts = read_series(args.series)
    out_dir = _out_dir(args)

    if args.target is not None:
        _check(1 <= args.target <= ts.p, f"--target must lie in 1..{ts.p}")
        rows = step1_score_rows(
            ts, cfg, [args.target - 1], n_threads=args.threads, engine=engine
        )
        path = os.path.join(out_dir, f"s1_row_{args.target}.tsv")
        write_score_rows(path, rows, [args.target - 1])
        print(f"wrote first-step scores for target {args.target} to {path}")
        return 0

    if args.s1 is not None:
        s1 = read_scores(args.s1, expected_p=ts.p)
    else:
        rows = step1_score_rows(ts, cfg, None, n_threads=args.threads, engine=engine)
        s1 = ScoreMatrix(rows)
    write_scores(os.path.join(out_dir, "s1.tsv"), s1)
    retained = threshold_edges(s1, cfg.alpha1)
    s2 = step2_scores(ts, retained, cfg)
    write_scores(os.path.join(out_dir, "s2.tsv"), s2)
    if cfg.fdr_level is not None:
        tested = [((j, i), float(s2[i, j])) for j, i in retained]
        final = bh_select(tested, cfg.fdr_level)
        rule = f"fdr={_fmt_out(cfg.fdr_level)}"
    else:
        final = threshold_edges(s2, cfg.alpha2)
        rule = f"alpha2={_fmt_out(cfg.alpha2)}"
    write_scored_edges(os.path.join(out_dir, "edges_step1.tsv"), retained, s1, s2)
    write_scored_edges(os.path.join(out_dir, "edges_final.tsv"), final, s1, s2)
    print(
        f"step 1 retained {len(retained)} edges at alpha1={_fmt_out(cfg.alpha1)}; "
        f"final selection {len(final)} edges ({rule})"
    )
    return 0


def _cmd_merge(args) -> int:
    _check(args.p >= 2, "--p must be >= 2")
    merged: dict[int, list[float]] = {}
    for shard in args.shards:
        for target, row in read_score_rows(shard).items():
            if len(row) != args.p:
                raise ValueError(
                    f"{shard}: row for target {target + 1} has {len(row)} scores, "
                    f"expected {args.p}"
                )
            if target >= args.p:
                raise ValueError(f"{shard}: target {target + 1} out of range")
            if target in merged:
                raise ValueError(
                    f"{shard}: target {target + 1} already covered by another shard"
                )
            merged[target] = row
    missing = sorted(set(range(args.p)) - set(merged))
    if missing:
        raise ValueError(
            f"shards do not cover all targets; missing {[i + 1 for i in missing]}"
        )
    write_score_rows(
        args.out, np.array([merged[t] for t in range(args.p)]), range(args.p)
    )
    print(f"merged {len(args.shards)} shards into {args.out}")
    return 0


def _cmd_eval(args) -> int:
    if args.alpha is not None:
        _check(0 < args.alpha <= 1, "--alpha must lie in (0, 1]")
    scores = read_scores(args.scores)
    if args.truth_edges is not None:
        truth = read_edges(args.truth_edges)
    else:
        truth = population_gmin(read_model(args.truth_model))
    out_dir = _out_dir(args)
    curve = pr_curve(scores, truth)
    auc = auc_pr(curve)
    ppv = [precision_at_recall(curve, r) for r in DEFAULT_RECALL_GRID]

    with open(os.path.join(out_dir, "pr_curve.tsv"), "w") as fh:
        fh.write("recall\tprecision\tthreshold\n")
        for r, q, t in zip(curve.recalls, curve.precisions, curve.thresholds):
            fh.write(f"{r:.17g}\t{q:.17g}\t{t:.17g}\n")
    with open(os.path.join(out_dir, "summary.tsv"), "w") as fh:
        fh.write(
            "auc\t" + "\t".join(f"ppv@{r:.1f}" for r in DEFAULT_RECALL_GRID) + "\n"
        )
        fh.write(
            f"{auc:.17g}\t" + "\t".join(f"{v:.17g}" for v in ppv) + "\n"
        )
    summary = f"auc={_fmt_out(auc)} " + " ".join(
        f"ppv@{r:.1f}={_fmt_out(v)}" for r, v in zip(DEFAULT_RECALL_GRID, ppv)
    )
    if args.alpha is not None:
        counts = confusion(threshold_edges(scores, args.alpha), truth, scores.p)
        with open(os.path.join(out_dir, "confusion.tsv"), "w") as fh:
            fh.write("tp\tfp\tfn\ttn\tprecision\trecall\n")
            fh.write(
                f"{counts.tp}\t{counts.fp}\t{counts.fn}\t{counts.tn}\t"
                f"{counts.precision:.17g}\t{counts.recall:.17g}\n"
            )
        summary += (
            f" alpha={_fmt_out(args.alpha)}"
            f" tp={counts.tp} fp={counts.fp} fn={counts.fn} tn={counts.tn}"
        )
    print(summary)
    return 0


def _cmd_oracle(args) -> int:
    _check(args.q >= 0, "--q must be >= 0")
    _check(args.tol >= 0, "--tol must be >= 0")
    _check(args.budget >= 1, "--budget must be >= 1")
    model = read_model(args.model)
    _check(args.q <= model.p - 1, f"--q must lie in 0..{model.p - 1}")
    report, gmin, gq = property_report(model, args.q, args.tol, args.budget)
    out_dir = _out_dir(args)
    write_edge_pairs(os.path.join(out_dir, "gmin_edges.tsv"), gmin)
    write_edge_pairs(os.path.join(out_dir, "gq_edges.tsv"), gq)
    lines = [
        f"direct edges: {report.n_gmin}",
        f"order-{report.q} edges: {report.n_gq}",
        f"max in-degree of direct graph: {report.max_in_degree}",
    ]
    lines += [
        f"{check.label}: {check.status} ({check.detail})" for check in report.checks
    ]
    with open(os.path.join(out_dir, "report.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    failed = any(check.status == "FAIL" for check in report.checks)
    return 1 if failed else 0


def _cmd_study(args) -> int:
    _check(args.threads >= 1, "--threads must be >= 1")
    engine = _engine_value(args)
    seed = _seed_value(args)
    try:
        cfg = StudyConfig(
            p=args.p,
            n=args.n,
            density=args.density,
            replicates=args.replicates,
            seed=seed,
            noise=args.noise,
            sigma_offdiag_density=args.sigma_offdiag,
            estimator=args.estimator,
            alpha1=args.alpha1,
            n_threads=args.threads,
            engine=engine,
        )
    except ValueError as exc:
        raise _UsageError(str(exc))
    result = run_study(cfg)
    out_dir = _out_dir(args)
    grid = cfg.recall_grid
    with open(os.path.join(out_dir, "study_replicates.tsv"), "w") as fh:
        header = ["replicate", "n_true_edges", "alpha1_eff"]
        header += ["auc_step1", "auc_step2"]
        header += [f"prec1@{r:.1f}" for r in grid]
        header += [f"prec2@{r:.1f}" for r in grid]
        fh.write("\t".join(header) + "\n")
        for rep in result.replicates:
            fields = [str(rep.replicate + 1), str(rep.n_true_edges)]
            fields += [f"{rep.alpha1_effective:.17g}"]
            fields += [f"{rep.auc_step1:.17g}", f"{rep.auc_step2:.17g}"]
            fields += [f"{v:.17g}" for v in rep.precision_step1]
            fields += [f"{v:.17g}" for v in rep.precision_step2]
            fh.write("\t".join(fields) + "\n")
    with open(os.path.join(out_dir, "study_summary.tsv"), "w") as fh:
        header = ["mean_auc_step1", "mean_auc_step2", "improved_fraction"]
        header += ["clamped_fraction"]
        header += [f"mean_prec1@{r:.1f}" for r in grid]
        header += [f"mean_prec2@{r:.1f}" for r in grid]
        fh.write("\t".join(header) + "\n")
        fields = [
            f"{result.mean_auc_step1:.17g}",
            f"{result.mean_auc_step2:.17g}",
            f"{result.improved_fraction:.17g}",
            f"{result.clamped_fraction:.17g}",
        ]
        fields += [f"{v:.17g}" for v in result.mean_precision_step1]
        fields += [f"{v:.17g}" for v in result.mean_precision_step2]
        fh.write("\t".join(fields) + "\n")
    print(
        f"{cfg.replicates} replicates: mean auc step1={_fmt_out(result.mean_auc_step1)}"
        f" step2={_fmt_out(result.mean_auc_step2)}"
        f" improved_fraction={_fmt_out(result.improved_fraction)}"
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="g1dbn",
        description="Two-step dynamic network inference for short time series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="draw random models and panels")
    sim.add_argument("--p", type=int, required=True)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--density", type=float, default=0.05)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--noise", choices=["gaussian", "uniform"], default="gaussian")
    sim.add_argument("--uniform-low", type=float, default=-2.0)
    sim.add_argument("--uniform-high", type=float, default=2.0)
    sim.add_argument("--sigma-offdiag", type=float, default=0.0,
                     help="density of nonzero off-diagonal noise covariances")
    sim.add_argument("--replicates", type=int, default=1)
    sim.add_argument("--require-stable", action="store_true")
    sim.add_argument("--burn-in", type=int, default=0)
    sim.add_argument("--out-dir", required=True)
    sim.set_defaults(handler=_cmd_simulate)

    inf = sub.add_parser("infer", help="score and select edges from a series")
    inf.add_argument("--series", required=True)
    inf.add_argument("--estimator", choices=list(ESTIMATORS), default="ls")
    inf.add_argument("--alpha1", type=float, default=0.7)
    group = inf.add_mutually_exclusive_group()
    group.add_argument("--alpha2", type=float, default=0.05)
    group.add_argument("--fdr", type=float, default=None)
    inf.add_argument("--threads", type=int, default=1)
    inf.add_argument("--engine", choices=["auto", "native", "numpy", "loop"],
                     default="auto")
    inf.add_argument("--target", type=int, default=None,
                     help="compute first-step scores for this 1-based target only")
    inf.add_argument("--s1", default=None,
                     help="precomputed first-step score file (skips step 1)")
    inf.add_argument("--out-dir", required=True)
    inf.set_defaults(handler=_cmd_infer)

    mrg = sub.add_parser("merge", help="merge first-step score shards")
    mrg.add_argument("--p", type=int, required=True)
    mrg.add_argument("--out", required=True)
    mrg.add_argument("shards", nargs="+")
    mrg.set_defaults(handler=_cmd_merge)

    evl = sub.add_parser("eval", help="precision-recall against a known truth")
    evl.add_argument("--scores", required=True)
    truth = evl.add_mutually_exclusive_group(required=True)
    truth.add_argument("--truth-edges", default=None)
    truth.add_argument("--truth-model", default=None)
    evl.add_argument("--alpha", type=float, default=None,
                     help="also write confusion counts at this threshold")
    evl.add_argument("--out-dir", required=True)
    evl.set_defaults(handler=_cmd_eval)

    orc = sub.add_parser("oracle", help="population edge sets of a model")
    orc.add_argument("--model", required=True)
    orc.add_argument("--q", type=int, required=True)
    orc.add_argument("--tol", type=float, default=1e-9)
    orc.add_argument("--budget", type=int, default=2_000_000)
    orc.add_argument("--out-dir", required=True)
    orc.set_defaults(handler=_cmd_oracle)

    std = sub.add_parser("study", help="replicated simulate/score/evaluate runs")
    std.add_argument("--p", type=int, default=50)
    std.add_argument("--n", type=int, default=20)
    std.add_argument("--density", type=float, default=0.05)
    std.add_argument("--replicates", type=int, default=100)
    std.add_argument("--seed", type=int, default=None)
    std.add_argument("--noise", choices=["gaussian", "uniform"], default="gaussian")
    std.add_argument("--sigma-offdiag", type=float, default=0.0)
    std.add_argument("--estimator", choices=list(ESTIMATORS), default="ls")
    std.add_argument("--alpha1", type=float, default=0.7)
    std.add_argument("--threads", type=int, default=1)
    std.add_argument("--engine", choices=["auto", "native", "numpy", "loop"],
                     default="auto")
    std.add_argument("--out-dir", required=True)
    std.set_defaults(handler=_cmd_study)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except TooManyParents as exc:
        _err(str(exc))
        return EXIT_TOO_MANY_PARENTS
    except EmptyTruth as exc:
        _err(str(exc))
        return EXIT_EMPTY_TRUTH
    except (Unstable, StabilityNotReached) as exc:
        _err(str(exc))
        return EXIT_UNSTABLE
    except BudgetExceeded as exc:
        _err(str(exc))
        return EXIT_BUDGET
    except (OSError, ValueError, G1dbnError) as exc:
        _err(str(exc))
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
