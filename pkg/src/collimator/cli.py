"""Command-line front end.

    collimator run --n 36 --mode heuristic --seed 7 --out r.json
    collimator recover --n 24 --secret random --seed 5
    collimator sweep --n 16,36,64,100 --trials 20 --mode heuristic --csv out.csv
    collimator verify --max-dim 4096 --trials 200 --seed 9
    collimator costmodel --n 50

Exit codes: 0 success, 1 failed verification, 2 invalid configuration,
3 retry budget exhausted.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .costmodel import make_schedule, predict_cost, solve_tropical_recurrence
from .oracle import OracleSpec, default_factors
from .phase import CostLedger, Level, Schedule
from .recover import recover_shift
from .rng import make_rng, randbits
from .sieve import DEFAULT_RETRY_BUDGET, RetryBudgetExceeded, run_parity
from .statevec import run_dense_suite

SCHEMA = 1
SWEEP_COLUMNS = (
    "n", "seed", "mode", "success", "queries", "classical_ops", "qtime_qracm",
    "qtime_noqracm", "peak_entries", "peak_qubits", "wall_ms",
)


class ConfigError(ValueError):
    pass


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def parse_secret(text: str) -> int | None:
    """Decimal, 0x-hex, or ``random`` (returns None)."""
    if text == "random":
        return None
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad secret {text!r}")


def resolve_schedule(args) -> Schedule:
    if args.levels is None:
        if args.schedule != "auto":
            raise ConfigError(f"unknown schedule {args.schedule!r}; use auto or --levels")
        if args.r is not None or args.ell0 is not None:
            raise ConfigError("--r/--ell0 need explicit --levels")
        return make_schedule(args.n, args.mode)
    ms = args.levels
    if args.r is None:
        rs = [m + 1 if args.mode == "regev" else 2 for m in ms]
    else:
        rs = args.r
    if len(rs) != len(ms):
        raise ConfigError("--levels and --r must have the same length")
    ell0 = args.ell0
    if ell0 is None:
        ell0 = 2 if args.mode == "regev" else 1 << (ms[0] + 1)
    return Schedule(args.n, tuple(Level(m, r) for m, r in zip(ms, rs)), ell0, args.mode)


def make_oracle(n: int, secret: int | None, shifts: int, rng) -> OracleSpec:
    if secret is None:
        secret = randbits(rng, n)
    return OracleSpec(n, secret, default_factors(shifts))


def dump(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    schedule = resolve_schedule(args)
    rng = make_rng(args.seed)
    oracle = make_oracle(args.n, args.secret, args.shifts, rng)
    bit, ledger, report = run_parity(schedule, oracle, rng, retry_budget=args.retry_budget)
    doc = {
        "schema": SCHEMA,
        "command": "run",
        "seed": args.seed,
        "secret": oracle.secret,
        "factors": list(oracle.factors),
        "ground_truth_parity": oracle.secret & 1,
        **report.as_dict(),
    }
    dump(doc, args.out)
    return 0


def cmd_recover(args) -> int:
    rng = make_rng(args.seed)
    oracle = make_oracle(args.n, args.secret, args.shifts, rng)
    runs: list = []
    recovered, ledger = recover_shift(
        oracle, rng, mode=args.mode, retry_budget=args.retry_budget, reports=runs
    )
    doc = {
        "schema": SCHEMA,
        "command": "recover",
        "n": args.n,
        "mode": args.mode,
        "seed": args.seed,
        "ground_truth": oracle.secret,
        "recovered": recovered,
        "success": recovered == oracle.secret,
        "ledger": ledger.as_dict(),
        "bits": [{"n": r["n"], "bit": r["bit"], "ledger": r["ledger"]} for r in runs],
    }
    print(f"recovered secret {recovered} (ground truth {oracle.secret})", file=sys.stderr)
    dump(doc, args.out)
    return 0


def sweep_cell(n: int, seed: int, mode: str, retry_budget: int) -> dict:
    rng = make_rng(seed)
    oracle = make_oracle(n, None, 2, rng)
    ledger = CostLedger()
    start = time.perf_counter()
    try:
        bit, _, _ = run_parity(make_schedule(n, mode), oracle, rng, ledger=ledger, retry_budget=retry_budget)
        success = int(bit == oracle.secret & 1)
    except RetryBudgetExceeded:
        success = 0
    wall_ms = (time.perf_counter() - start) * 1000
    return {
        "n": n,
        "seed": seed,
        "mode": mode,
        "success": success,
        "queries": ledger.oracle_queries,
        "classical_ops": ledger.classical_ops,
        "qtime_qracm": ledger.qtime_qracm,
        "qtime_noqracm": ledger.qtime_noqracm,
        "peak_entries": ledger.peak_classical_entries,
        "peak_qubits": ledger.peak_qubits,
        "wall_ms": round(wall_ms, 3),
    }


def sweep_rows(ns, trials, mode, retry_budget=DEFAULT_RETRY_BUDGET, threads=None) -> list[dict]:
    cells = [(n, seed) for n in ns for seed in range(trials)]
    threads = threads or int(os.environ.get("COLLIMATOR_THREADS", "1") or 1)
    if threads <= 1:
        rows = [sweep_cell(n, seed, mode, retry_budget) for n, seed in cells]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(sweep_cell, n, seed, mode, retry_budget) for n, seed in cells]
            rows = [f.result() for f in futures]
    return sorted(rows, key=lambda row: (row["n"], row["seed"]))


def cmd_sweep(args) -> int:
    if any(n < 1 for n in args.n):
        raise ConfigError("every n must be >= 1")
    rows = sweep_rows(args.n, args.trials, args.mode, args.retry_budget)
    fh = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\r\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_verify(args) -> int:
    result = run_dense_suite(args.trials, make_rng(args.seed), args.max_dim)
    print(result.summary())
    for line in result.failures:
        print("  " + line)
    return 0 if result.passed == result.trials else 1


def cmd_costmodel(args) -> int:
    sol = solve_tropical_recurrence(args.n)
    doc = {
        "schema": SCHEMA,
        "n": args.n,
        "g": list(sol.g),
        "schedule": make_schedule(args.n, args.mode).as_dict(),
        "predicted_log2_cost": predict_cost(args.n),
    }
    dump(doc, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="collimator", description="Collimation sieve simulator")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, secret=True):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--mode", choices=("heuristic", "rigorous", "regev"), default="heuristic")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--retry-budget", type=int, default=DEFAULT_RETRY_BUDGET)
        if secret:
            sp.add_argument("--secret", type=parse_secret, default=None)
            sp.add_argument("--shifts", type=int, default=2, help="number of hidden shifts |J|")
            sp.add_argument("--out")

    run = sub.add_parser("run", help="one parity run")
    common(run)
    run.add_argument("--schedule", default="auto")
    run.add_argument("--levels", type=int_list)
    run.add_argument("--r", type=int_list)
    run.add_argument("--ell0", type=int)
    run.set_defaults(func=cmd_run)

    rec = sub.add_parser("recover", help="recover the full secret")
    common(rec)
    rec.set_defaults(func=cmd_recover)

    sw = sub.add_parser("sweep", help="CSV sweep over n and seeds")
    sw.add_argument("--n", type=int_list, required=True)
    sw.add_argument("--trials", type=int, default=20)
    sw.add_argument("--mode", choices=("heuristic", "rigorous", "regev"), default="heuristic")
    sw.add_argument("--retry-budget", type=int, default=DEFAULT_RETRY_BUDGET)
    sw.add_argument("--csv")
    sw.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify", help="dense state-vector checks")
    ver.add_argument("--max-dim", type=int, default=4096)
    ver.add_argument("--trials", type=int, default=200)
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)

    cm = sub.add_parser("costmodel", help="tropical solution and schedule")
    cm.add_argument("--n", type=int, required=True)
    cm.add_argument("--mode", choices=("heuristic", "rigorous", "regev"), default="heuristic")
    cm.add_argument("--out")
    cm.set_defaults(func=cmd_costmodel)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RetryBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
