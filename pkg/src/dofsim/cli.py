"""Command-line interface: ``dofsim <subcommand> [flags]``.

Exit status is 0 on success, 1 on invalid input and 2 when an oracle or
engine cross-check disagrees.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import formulas, montecarlo, validation
from .assignment import StrategyError, parse_strategy
from .montecarlo import CSV_FIELDS, EngineMismatchError, write_csv
from .partition import partition_atomic
from .scheduler import schedule_atomic

EXIT_OK, EXIT_INVALID, EXIT_MISMATCH = 0, 1, 2


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


# ---------------------------------------------------------------------------
# argument parsing helpers

def parse_grid(text: str, exact: bool = False) -> list:
    """Inclusive ``start:stop:step`` grid, or a comma-separated list of values.

    With ``exact`` the values are :class:`~fractions.Fraction` objects, so
    ``0:1:0.01`` yields exactly ``k/100``.
    """
    conv = Fraction if exact else float
    try:
        if ":" not in text:
            return [conv(x) for x in text.split(",") if x.strip()]
        start, stop, step = (Fraction(x) for x in text.split(":"))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"grid: cannot parse {text!r}, expected start:stop:step") from None
    if step <= 0 or stop < start:
        raise UsageError(f"grid: need step > 0 and stop >= start in {text!r}")
    n = int((stop - start) / step)
    return [conv(start + k * step) for k in range(n + 1)]


def load_strategy(text: str):
    if text is None:
        raise UsageError("strategy: --strategy is required")
    if os.path.isfile(text):
        with open(text) as fh:
            text = fh.read()
    return parse_strategy(text)


def resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get("DOFSIM_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"seed: DOFSIM_SEED={env!r} is not an integer") from None


def _check_p(values):
    for p in values:
        if not 0 <= p <= 1:
            raise UsageError(f"p: must lie in [0, 1], got {p}")
    return values


def _check_positive(name, v):
    if v < 1:
        raise UsageError(f"{name}: must be positive, got {v}")


def _p_values(args, default=None):
    if args.p_grid is not None:
        return _check_p(parse_grid(args.p_grid))
    if args.p is not None:
        return _check_p([args.p])
    if default is None:
        raise UsageError("p: give --p or --p-grid")
    return default


def _emit(rows, fields, args, name):
    """Write rows to ``--out`` (or stdout) as CSV or JSON."""
    if args.format == "json":
        text = json.dumps([{k: _jsonable(r[k]) for k in fields} for r in rows], indent=2)
        if args.out:
            _ensure_parent(args.out)
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    elif args.out:
        write_csv(args.out, rows, fields)
    else:
        import csv

        w = csv.DictWriter(sys.stdout, fieldnames=list(fields), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: r[k] for k in fields})
    if args.out:
        print(f"{name}: wrote {len(rows)} rows to {args.out}", file=sys.stderr)


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _ensure_parent(path):
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)


# ---------------------------------------------------------------------------
# subcommands

def cmd_formulas(args):
    p = np.asarray(_p_values(args, default=list(np.linspace(0.0, 1.0, 1001))), dtype=float)
    cols = formulas.formula_table(p)
    fields = list(cols)
    rows = [{k: repr(float(cols[k][n])) for k in fields} for n in range(len(p))]
    _emit(rows, fields, args, "formulas")
    return EXIT_OK


def cmd_simulate(args):
    strategy = load_strategy(args.strategy)
    ps = _p_values(args)
    seed = resolve_seed(args.seed)
    _check_positive("trials", args.trials)
    _check_positive("K", args.K)
    montecarlo.check_engine(strategy, args.engine)
    strategy.assignment(args.K)
    rows = []
    for k, p in enumerate(ps):
        cell_seed = seed if len(ps) == 1 else montecarlo.child_seed(seed, k)
        est = montecarlo.estimate(strategy, args.K, p, args.trials, cell_seed, args.engine,
                                  args.workers, debug=args.debug)
        print(f"{est.strategy} engine={est.engine} K={est.K} p={est.p:g} "
              f"mean={est.mean:.6f} stderr={est.stderr:.6f}", file=sys.stderr)
        rows.append(est.row())
    _emit(rows, CSV_FIELDS, args, "simulate")
    return EXIT_OK


def _summary_path(out):
    root, ext = os.path.splitext(out)
    return f"{root}_best{ext or '.csv'}"


SUMMARY_FIELDS = ("p", "best_f", "mean", "stderr", "ties")


def cmd_sweep(args):
    ps = _p_values(args)
    fs = parse_grid(args.f_grid, exact=True)
    for f in fs:
        if not 0 <= f <= 1:
            raise UsageError(f"f-grid: values must lie in [0, 1], got {f}")
    seed = resolve_seed(args.seed)
    _check_positive("trials", args.trials)
    if args.K < 3:
        raise UsageError(f"K: fraction strategy needs K >= 3, got {args.K}")
    result = montecarlo.sweep_fraction(args.K, args.trials, ps, fs, seed, args.workers)
    _emit([e.row() for e in result.cells], CSV_FIELDS, args, "sweep")
    summary = [
        {
            "p": repr(float(b["p"])),
            "best_f": str(b["best_f"]),
            "mean": repr(b["mean"]),
            "stderr": repr(b["stderr"]),
            "ties": " ".join(str(f) for f in b["ties"]),
        }
        for b in result.best()
    ]
    if args.out:
        path = _summary_path(args.out)
        if args.format == "json":
            with open(path, "w") as fh:
                json.dump(summary, fh, indent=2)
        else:
            write_csv(path, summary, SUMMARY_FIELDS)
        print(f"sweep: wrote summary to {path}", file=sys.stderr)
    else:
        for b in summary:
            print(f"p={b['p']} best_f={b['best_f']} ties={b['ties']}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args):
    ps = _p_values(args, default=[k / 10 for k in range(10)])
    fs = parse_grid(args.f_grid, exact=True)
    seed = resolve_seed(args.seed)
    _check_positive("trials", args.trials)
    rows = montecarlo.compare_m1_m2(args.K, args.trials, ps, seed, fs, args.workers)
    _emit(rows, montecarlo.COMPARE_FIELDS, args, "compare")
    return EXIT_OK


def cmd_oracle_check(args):
    seed = resolve_seed(args.seed)
    reports = [validation.sandwich_check(args.max_n, seed=seed)]
    if args.random > 0:
        reports.append(validation.random_check(args.random, args.random_max_n, seed=seed))
    ok = True
    for rep in reports:
        for line in rep.lines():
            print(line)
        ok &= rep.ok
    total = sum(r.total for r in reports)
    print(f"{'PASS' if ok else 'FAIL'} overall instances={total}")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_partition(args):
    strategy = load_strategy(args.strategy)
    _check_positive("K", args.K)
    p = _check_p([args.p if args.p is not None else 0.0])[0]
    if args.trial < 0:
        raise UsageError(f"trial: must be non-negative, got {args.trial}")
    seed = resolve_seed(args.seed)
    a = strategy.assignment(args.K)
    r = montecarlo.trial_realization(args.K, p, seed, args.trial)
    part = partition_atomic(r, a)
    for sub in part.subnetworks:
        print(sub.describe())
        if args.schedule:
            for line in schedule_atomic(sub).describe().splitlines():
                print("  " + line)
    if part.inactive:
        print("inactive=" + " ".join(map(str, part.inactive)))
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dofsim", description="DoF of Wyner networks with link erasures.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, strategy=False, mc=False):
        sp.add_argument("--seed", type=int, default=None, help="master seed (default: $DOFSIM_SEED or 0)")
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--p", type=float, default=None)
        sp.add_argument("--p-grid", default=None, help="start:stop:step (inclusive) or a,b,c")
        if strategy:
            sp.add_argument("--strategy", default=None, help="strategy JSON or a file containing it")
        if mc:
            sp.add_argument("--K", type=int, default=100)
            sp.add_argument("--trials", type=int, default=6000)
            sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)

    sp = sub.add_parser("formulas", help="closed-form curves on a grid")
    common(sp)
    sp.set_defaults(func=cmd_formulas)

    sp = sub.add_parser("simulate", help="Monte Carlo estimate of one strategy")
    common(sp, strategy=True, mc=True)
    sp.add_argument("--engine", choices=montecarlo.ENGINES, default="zf")
    sp.add_argument("--debug", action="store_true", help="cross-check every trial against the reference path")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="grid over erasure probability and forward fraction")
    common(sp, mc=True)
    sp.add_argument("--f-grid", default="0:1:1/100")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("compare", help="best one- versus two-transmitter estimates")
    common(sp, mc=True)
    sp.add_argument("--f-grid", default="0:1:1/100")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("oracle-check", help="scheduler against brute force and converse")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--max-n", type=int, default=5)
    sp.add_argument("--random", type=int, default=10000, help="number of random blocks (0 to skip)")
    sp.add_argument("--random-max-n", type=int, default=10)
    sp.set_defaults(func=cmd_oracle_check)

    sp = sub.add_parser("partition", help="print the atomic blocks of one realization")
    common(sp, strategy=True)
    sp.add_argument("--K", type=int, default=20)
    sp.add_argument("--trial", type=int, default=0, help="trial index of the realization")
    sp.add_argument("--schedule", action="store_true", help="also print each block's schedule")
    sp.set_defaults(func=cmd_partition)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EngineMismatchError as exc:
        print(f"mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (UsageError, StrategyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: out: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
