"""Command-line front end.

    cfjs optimal PROFILE [--out MATRIX.csv]
    cfjs simulate {phom,attenuation,random-order,uniform} PROFILE [--draws N] [--seed S]
    cfjs sweep [--cases i,ii,iii,iv,lt1,gt1] [--n-min 3] [--n-max 50] [--profiles 1000]

A profile file holds two comma-separated rows, preference A then B; text
after ``#`` is ignored.  Exit codes: 0 success, 2 invalid input, 3 degenerate
model, 4 internal error.
"""

import argparse
import csv
import io
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import experiments, samplers
from .core import PreferencePair, loss, popularity, validate_pref
from .errors import CfjsError, DeadEndError, DegenerateProductError, ZeroUsageError
from .optimal import min_loss, optimal_matrix
from .optimize import OptimizerConfig, phom_pair_matrix
from .quantum import attenuation_expected_matrix

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE, EXIT_INTERNAL = 0, 2, 3, 4
RESULT_COLUMNS = ("method", "n", "case", "loss", "usage", "maape", "seed", "wall_time", "status")
SIMULATE_METHODS = ("phom", "attenuation", "random-order", "uniform")


class InputError(Exception):
    """Malformed command-line input (exit code 2)."""


def fmt(x) -> str:
    """17 significant digits, empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def read_profile(path) -> PreferencePair:
    rows = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read profile {path}: {exc.strerror or exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values = [float(tok) for tok in line.split(",") if tok.strip()]
        except ValueError as exc:
            raise InputError(f"{path}: row {len(rows) + 1} (line {lineno}): {exc}") from exc
        rows.append((lineno, values))
    if len(rows) != 2:
        raise InputError(f"{path}: expected 2 rows (A then B), found {len(rows)}")
    prefs = []
    for idx, (lineno, values) in enumerate(rows, 1):
        try:
            prefs.append(validate_pref(values))
        except CfjsError as exc:
            raise InputError(f"{path}: row {idx} (line {lineno}): {exc}") from exc
    if prefs[0].size != prefs[1].size:
        raise InputError(
            f"{path}: row 2 (line {rows[1][0]}) has {prefs[1].size} entries, row 1 has {prefs[0].size}"
        )
    return PreferencePair(*prefs)


def _matrix_csv(p) -> str:
    return "".join(",".join(fmt(v) for v in row) + "\n" for row in p)


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _default_seed():
    raw = os.environ.get("CFJS_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"CFJS_SEED must be an integer, got {raw!r}")


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(
        seed=args.seed,
        optimize_phases=args.optimize_phases,
        maximize_usage=not args.grid_only,
    )


# ------------------------------------------------------------------ commands

def cmd_optimal(args) -> int:
    pair = read_profile(args.profile)
    pop = popularity(pair)
    m = optimal_matrix(pair)
    branch = "zero-loss (max popularity <= 1)" if pop.max <= 1.0 else "capped (max popularity > 1)"
    _write(args.out, _matrix_csv(m.p))
    out = sys.stderr if args.out in (None, "-") else sys.stdout
    print(f"max_popularity,{fmt(pop.max)}", file=out)
    print(f"branch,{branch}", file=out)
    print(f"loss,{fmt(loss(m, pair))}", file=out)
    print(f"min_loss,{fmt(min_loss(pair))}", file=out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    pair = read_profile(args.profile)
    rng = samplers.make_rng(args.seed)
    usage_model = None
    if args.method == "phom":
        analytic, dist = phom_pair_matrix(pair, _config(args))
        usage_model = dist.usage
        batch = samplers.sample_phom_batch(dist, rng, args.draws)
    elif args.method == "attenuation":
        analytic = attenuation_expected_matrix(pair)
        batch = samplers.sample_attenuation_batch(
            pair, rng, args.draws, splitter_loss=args.splitter_loss
        )
    elif args.method == "random-order":
        try:
            analytic = samplers.random_order_matrix(pair)
        except DeadEndError:
            analytic = None
        batch = samplers.sample_random_order_batch(pair, rng, args.draws)
    else:
        analytic = samplers.uniform_random_matrix(pair.n)
        batch = samplers.sample_uniform_batch(pair.n, rng, args.draws)

    if args.outcomes:
        buf = io.StringIO()
        buf.write("draw,choice_a,choice_b,attempts\n")
        for k, (i, j, t) in enumerate(zip(batch.choice_a, batch.choice_b, batch.attempts)):
            buf.write(f"{k},{i},{j},{t}\n")
        _write(args.outcomes, buf.getvalue())

    summary = [("method", args.method), ("n", pair.n), ("seed", args.seed),
               ("draws", args.draws), ("decisions", len(batch))]
    if len(batch):
        emp = samplers.accumulate(batch, pair.n).joint()
        if args.matrix:
            _write(args.matrix, _matrix_csv(emp.p))
        summary.append(("empirical_loss", fmt(loss(emp, pair))))
        if analytic is not None:
            summary.append(("analytic_loss", fmt(loss(analytic, pair))))
            summary.append(("max_cell_deviation", fmt(samplers.max_cell_deviation(emp, analytic))))
    if args.method in ("phom", "attenuation"):
        summary.append(("usage_rate", fmt(len(batch) / int(np.sum(batch.attempts)))))
    if usage_model is not None:
        summary.append(("usage_rate_model", fmt(usage_model)))
    for key in ("source_discards", "absorbed"):
        if key in batch.stats:
            summary.append((key, batch.stats[key]))
    summary.append(("failure_rate", fmt(batch.failed / args.draws)))
    summary.append(("conflicts", 0))
    for key, value in summary:
        print(f"{key},{value}")
    return EXIT_OK


def _parse_cases(text):
    cases = [c.strip().lower() for c in text.split(",") if c.strip()]
    if not cases:
        raise InputError("--cases is empty")
    for c in cases:
        if c not in experiments.CASES and c not in ("lt1", "gt1"):
            raise InputError(f"unknown case {c!r}; choose from i, ii, iii, iv, lt1, gt1")
    return cases


def _records_csv(records, timing):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_COLUMNS)
    for r in records:
        w.writerow([
            str(r.method), r.n, r.case_id, fmt(r.loss), fmt(r.usage), fmt(r.maape),
            r.seed, fmt(r.wall_time) if timing else "", r.status,
        ])
    return buf.getvalue()


def _write_svgs(records, directory):
    from .svg import line_chart

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    by_case = {}
    for r in records:
        by_case.setdefault(r.case_id, {}).setdefault(str(r.method), []).append(r)
    written = []
    for case, methods in by_case.items():
        metric = "maape" if case == "random-gt1" else "loss"
        series = {
            m: ([r.n for r in rs], [getattr(r, metric) for r in rs]) for m, rs in methods.items()
        }
        log_y = case in ("i", "ii", "iii", "random-lt1")
        ylabel = "MAAPE" if metric == "maape" else "L"
        svg = line_chart(series, title=f"case {case}", xlabel="N", ylabel=ylabel, log_y=log_y)
        path = directory / f"sweep_{case}.svg"
        path.write_text(svg)
        written.append(path)
        if case.startswith("random"):
            usage = [(r.n, r.usage) for r in methods.get("PureHom", [])]
            path = directory / f"usage_{case}.svg"
            path.write_text(line_chart(
                {"PureHom": ([u[0] for u in usage], [u[1] for u in usage])},
                title=f"Pure HOM usage rate, {case}", xlabel="N", ylabel="U",
                log_y=case == "random-gt1",
            ))
            written.append(path)
    return written


def cmd_sweep(args) -> int:
    if not 3 <= args.n_min <= args.n_max:
        raise InputError("need 3 <= --n-min <= --n-max")
    if args.profiles < 1:
        raise InputError("--profiles must be at least 1")
    cases = _parse_cases(args.cases)
    config = _config(args)
    n_range = range(args.n_min, args.n_max + 1)
    fixed = [c for c in cases if c in experiments.CASES]
    records = []
    start = time.perf_counter()
    if fixed:
        records += experiments.compare_losses(n_range, fixed, config, jobs=args.jobs)
    for study in (c for c in cases if c in ("lt1", "gt1")):
        records += experiments.phom_random_study(
            n_range, study, args.profiles, seed=args.seed, config=config, jobs=args.jobs
        )
    _write(args.out, _records_csv(records, args.timing))
    if args.svg:
        for path in _write_svgs(records, args.svg):
            print(f"wrote {path}", file=sys.stderr)
    if args.timing:
        print(f"elapsed {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return EXIT_OK


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfjs", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def optimizer_flags(p):
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (default: $CFJS_SEED or 0)")
        p.add_argument("--optimize-phases", action="store_true",
                       help="co-optimise Pure HOM phases instead of the evenly spaced grid")
        p.add_argument("--grid-only", action="store_true",
                       help="skip the usage-maximising stage of the Pure HOM optimiser")

    p = sub.add_parser("optimal", help="minimum-loss joint matrix of a profile")
    p.add_argument("profile")
    p.add_argument("--out", help="matrix CSV path (default stdout)")
    p.set_defaults(func=cmd_optimal)

    p = sub.add_parser("simulate", help="Monte Carlo draws from one sampler")
    p.add_argument("method", choices=SIMULATE_METHODS)
    p.add_argument("profile")
    p.add_argument("--draws", type=int, default=100_000)
    p.add_argument("--outcomes", help="write every draw to this CSV")
    p.add_argument("--matrix", help="write the empirical joint matrix to this CSV")
    p.add_argument("--splitter-loss", action="store_true",
                   help="include the 1/N passive splitter loss in the attenuation detectors")
    optimizer_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="method comparison over N and preference cases")
    p.add_argument("--cases", default="i,ii,iii,iv",
                   help="comma list of i, ii, iii, iv (fixed cases) and lt1, gt1 (random studies)")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--profiles", type=int, default=1000, help="random profiles per N")
    p.add_argument("--out", help="results CSV path (default stdout)")
    p.add_argument("--svg", metavar="DIR", help="also write one line chart per case")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--timing", action="store_true", help="fill the wall_time column")
    optimizer_flags(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        if getattr(args, "draws", 1) < 1:
            raise InputError("--draws must be at least 1")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ZeroUsageError, DegenerateProductError) as exc:
        print(f"degenerate model: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except CfjsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # any other failure is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
