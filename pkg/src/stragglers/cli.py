"""Command-line surface: analyze | sweep | optimize | simulate | compare.

Exit codes: 0 on success, 2 on usage or validation errors, 3 on internal
numerical failure.  All CSV output uses a fixed column order with a
header row, one record per line and '.' as the decimal separator.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .closed_form import (
    SystemConfig,
    completion_stats_balanced,
    feasible_batch_counts,
    optimize_redundancy,
)
from .distributions import Exponential, ShiftedExponential
from .plans import balanced_assignment, make_nonoverlapping_batches, plan_from_dict
from .simulate import SimulationSpec, compare_policies, simulate_completion

SWEEP_HEADER = ["B", "mean", "variance", "mu", "delta"]
SIMULATE_HEADER = ["B", "trials", "seed", "mean", "variance", "std_error"]
COMPARE_SUMMARY_HEADER = ["plan_id", "mean", "std_error"]
COMPARE_DIFF_HEADER = ["plan_a", "plan_b", "diff", "ci_lo", "ci_hi"]


def _float_list(text: str) -> list[float]:
    parts = [p for p in text.split(",") if p.strip()]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _service_distribution(dist: str, mu: float, delta):
    if dist == "exp":
        if delta is not None:
            raise ValueError("--delta applies only to --dist sexp")
        return Exponential(mu)
    if delta is None:
        raise ValueError("--dist sexp requires --delta")
    return ShiftedExponential(mu, delta)


def _resolve_sizes(args) -> tuple[int, int]:
    workers = args.workers
    samples = args.samples if args.samples is not None else workers
    return samples, workers


def _append_csv_row(path: str, header: list[str], row: list) -> None:
    is_new = not os.path.exists(path)
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if is_new:
            writer.writerow(header)
        writer.writerow(row)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_svg(path: str, curves: list[tuple[str, list, list]]) -> None:
    # Lazy import: matplotlib is only needed when a chart is requested.
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "stragglers"  # reproducible element ids
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for label, xs, ys in curves:
        ax.plot(xs, ys, marker="o", label=label)
    ax.set_xlabel("number of batches")
    ax.set_ylabel("expected completion time")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _load_plan(path: str):
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    try:
        return plan_from_dict(payload)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def cmd_analyze(args) -> int:
    samples, workers = _resolve_sizes(args)
    dist = _service_distribution(args.dist, args.mu, args.delta)
    config = SystemConfig(samples, workers, dist, args.batches)
    stats = completion_stats_balanced(config)
    print(f"B={args.batches} mean={stats.mean} variance={stats.variance}")
    if args.out:
        _append_csv_row(
            args.out,
            SWEEP_HEADER,
            [args.batches, stats.mean, stats.variance, args.mu, args.delta or 0.0],
        )
    return 0


def cmd_sweep(args) -> int:
    samples, workers = _resolve_sizes(args)
    if args.dist == "exp":
        if args.delta is not None:
            raise ValueError("--delta applies only to --dist sexp")
        pairs = [(mu, None) for mu in args.mu]
    else:
        if args.delta is None:
            raise ValueError("--dist sexp requires --delta")
        pairs = [(mu, delta) for mu in args.mu for delta in args.delta]

    feasible = feasible_batch_counts(samples, workers)
    rows = []
    curves = []
    for mu, delta in pairs:
        dist = _service_distribution(args.dist, mu, delta)
        means = []
        for b in feasible:
            stats = completion_stats_balanced(SystemConfig(samples, workers, dist, b))
            rows.append([b, stats.mean, stats.variance, mu, delta or 0.0])
            means.append(stats.mean)
        label = f"mu={mu}" if delta is None else f"mu={mu} delta={delta}"
        curves.append((label, feasible, means))

    if args.out:
        _write_csv(args.out, SWEEP_HEADER, rows)
    else:
        print(",".join(SWEEP_HEADER))
        for row in rows:
            print(",".join(str(v) for v in row))
    if args.svg:
        _write_svg(args.svg, curves)
    return 0


def cmd_optimize(args) -> int:
    samples, workers = _resolve_sizes(args)
    dist = _service_distribution(args.dist, args.mu, args.delta)
    result = optimize_redundancy(samples, workers, dist, objective=args.objective)
    print(
        f"objective={args.objective} best_B={result.best_num_batches} "
        f"best_value={result.best_value}"
    )
    if args.out:
        rows = [
            [p.num_batches, p.stats.mean, p.stats.variance, args.mu, args.delta or 0.0]
            for p in result.sweep
        ]
        _write_csv(args.out, SWEEP_HEADER, rows)
    return 0


def cmd_simulate(args) -> int:
    dist = _service_distribution(args.dist, args.mu, args.delta)
    if args.plan_file:
        if args.batches is not None or args.workers is not None or args.samples is not None:
            raise ValueError("--plan-file replaces --batches/--workers/--samples")
        batching, assignment = _load_plan(args.plan_file)
    else:
        if args.batches is None or args.workers is None:
            raise ValueError("either --plan-file or both --workers and --batches are required")
        samples, workers = _resolve_sizes(args)
        batching = make_nonoverlapping_batches(samples, args.batches)
        assignment = balanced_assignment(batching, workers)

    spec = SimulationSpec(batching, assignment, dist, args.trials, args.seed)
    summary = simulate_completion(spec, n_jobs=args.jobs)
    b = batching.num_batches
    print(
        f"B={b} trials={summary.trials} seed={summary.seed} "
        f"mean={summary.mean} variance={summary.variance} std_error={summary.std_error}"
    )
    if args.out:
        _append_csv_row(
            args.out,
            SIMULATE_HEADER,
            [b, summary.trials, summary.seed, summary.mean, summary.variance, summary.std_error],
        )
    return 0


def cmd_compare(args) -> int:
    if len(args.plan_file) < 2:
        raise ValueError(f"--plan-file must be given at least twice, got {len(args.plan_file)}")
    dist = _service_distribution(args.dist, args.mu, args.delta)
    plans = [_load_plan(path) for path in args.plan_file]
    first_b, first_a = plans[0]
    for path, (batching, assignment) in zip(args.plan_file, plans):
        if batching.num_samples != first_b.num_samples:
            raise ValueError(f"{path}: all plans must share num_samples")
        if assignment.num_workers != first_a.num_workers:
            raise ValueError(f"{path}: all plans must share the worker count")

    specs = [
        SimulationSpec(batching, assignment, dist, args.trials, args.seed)
        for batching, assignment in plans
    ]
    comparison = compare_policies(specs, common_seed=args.seed, n_jobs=args.jobs)

    for path, summary in zip(args.plan_file, comparison.summaries):
        print(f"{path} mean={summary.mean} std_error={summary.std_error}")
    for diff in comparison.differences:
        print(
            f"{args.plan_file[diff.index_a]} - {args.plan_file[diff.index_b]}: "
            f"diff={diff.mean_difference} ci99=[{diff.ci_low},{diff.ci_high}]"
        )
    print(f"best={args.plan_file[comparison.best_index]}")

    if args.out:
        _write_csv(
            args.out,
            COMPARE_SUMMARY_HEADER,
            [
                [path, s.mean, s.std_error]
                for path, s in zip(args.plan_file, comparison.summaries)
            ],
        )
        out = Path(args.out)
        diff_path = out.with_name(out.stem + "_diffs" + out.suffix)
        _write_csv(
            str(diff_path),
            COMPARE_DIFF_HEADER,
            [
                [
                    args.plan_file[d.index_a],
                    args.plan_file[d.index_b],
                    d.mean_difference,
                    d.ci_low,
                    d.ci_high,
                ]
                for d in comparison.differences
            ],
        )
    return 0


def _add_dist_options(sp, multi: bool = False) -> None:
    sp.add_argument("--dist", choices=("exp", "sexp"), required=True,
                    help="service-time family: exponential or shifted exponential")
    if multi:
        sp.add_argument("--mu", type=_float_list, required=True,
                        help="service rate(s), comma separated")
        sp.add_argument("--delta", type=_float_list, default=None,
                        help="shift value(s), comma separated (sexp only)")
    else:
        sp.add_argument("--mu", type=float, required=True, help="service rate")
        sp.add_argument("--delta", type=float, default=None,
                        help="minimum service time (sexp only)")


def _add_size_options(sp, required: bool = True) -> None:
    sp.add_argument("--workers", type=int, required=required, default=None,
                    help="number of workers W")
    sp.add_argument("--samples", type=int, default=None,
                    help="number of data samples D (default: same as --workers)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stragglers",
        description="Plan and validate data-replication levels for "
        "master-worker systems with stragglers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="closed-form stats for one batch count")
    _add_size_options(sp)
    _add_dist_options(sp)
    sp.add_argument("--batches", type=int, required=True, help="batch count B")
    sp.add_argument("--out", default=None, help="append a CSV row here")
    sp.set_defaults(handler=cmd_analyze)

    sp = sub.add_parser("sweep", help="closed-form stats over all feasible batch counts")
    _add_size_options(sp)
    _add_dist_options(sp, multi=True)
    sp.add_argument("--out", default=None, help="write the sweep CSV here (default: stdout)")
    sp.add_argument("--svg", default=None, help="also write an SVG line chart here")
    sp.set_defaults(handler=cmd_sweep)

    sp = sub.add_parser("optimize", help="best batch count for a chosen objective")
    _add_size_options(sp)
    _add_dist_options(sp)
    sp.add_argument("--objective", choices=("mean", "variance"), default="mean")
    sp.add_argument("--out", default=None, help="write the sweep CSV here")
    sp.set_defaults(handler=cmd_optimize)

    sp = sub.add_parser("simulate", help="Monte Carlo estimate for one plan")
    _add_size_options(sp, required=False)
    _add_dist_options(sp)
    sp.add_argument("--batches", type=int, default=None,
                    help="batch count B for a balanced non-overlapping plan")
    sp.add_argument("--plan-file", default=None, help="JSON plan file to simulate")
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1, help="thread count for trial blocks")
    sp.add_argument("--out", default=None, help="append a CSV row here")
    sp.set_defaults(handler=cmd_simulate)

    sp = sub.add_parser("compare", help="simulate several plans under common random numbers")
    _add_dist_options(sp)
    sp.add_argument("--plan-file", action="append", default=[], required=True,
                    help="JSON plan file; give at least twice")
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1, help="thread count for trial blocks")
    sp.add_argument("--out", default=None,
                    help="write summaries CSV here (pairwise CIs go to *_diffs)")
    sp.set_defaults(handler=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
