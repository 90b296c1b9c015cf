"""Command-line entry point.

Exit codes: 0 success, 1 a check failed, 2 usage or input error,
3 refused as infeasible.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import exact
from .errors import ExactArithmeticError, InfeasibleError, InvalidParameterError, PermubufError
from .exact import acceptance_profile, compare_sums, decimal_str, q_table, verify_paper_values
from .model import (
    counterexample_schedule,
    load_schedule,
    save_schedule,
    systematic_schedule,
)
from .montecarlo import estimate_profile
from .opt import opt_throughput
from .search import DEFAULT_BUDGET, SearchSpace, find_violations

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("PERMUBUF_THREADS", "1")))
    except ValueError:
        return 1


def fmt_prob(count: int, m: int) -> str:
    return f"{count}/{m}! ({decimal_str(count, math.factorial(m))})"


def table(headers, rows) -> str:
    cells = [list(map(str, headers))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def cmd_verify(args) -> int:
    report = verify_paper_values(threads=args.threads)
    opt = opt_throughput(counterexample_schedule())
    report.add("OPT accepts all packets", opt.accepts_all_noninit, opt.total, opt.accepted_count)
    m = report.m
    payload = report.to_json()
    payload["all_pass"] = report.all_passed
    lines = ["Random Permutation on the m=10 counterexample, exact over all 10! orders", ""]
    rows = []
    for i in range(1, m + 1):
        p = report.p_numerators[i - 1] if i <= len(report.p_numerators) else None
        rows.append((i, fmt_prob(p, m) if p is not None else "-", fmt_prob(report.q_numerators[i - 1], m)))
    lines.append(table(("i", "p_i", "q_i"), rows))
    lines += ["", f"sum p = {report.sum_p}/{m}!   sum q = {report.sum_q}/{m}!", ""]
    rows = [(c.name, c.expected, c.actual, "PASS" if c.passed else "FAIL") for c in report.checks]
    lines.append(table(("check", "expected", "actual", "result"), rows))
    lines += ["", "ALL CHECKS PASS" if report.all_passed else "CHECK FAILURE"]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_analyze(args) -> int:
    schedule = load_schedule(args.path)
    m = schedule.m
    profile = acceptance_profile(schedule, threads=args.threads, limit_override=args.limit_override)
    p = list(profile.counts)
    payload = {"m": m, "p_numerators": p, "q_numerators": None, "sum_p": sum(p), "sum_q": None,
               "relation_holds": None, "verdict": "N/A"}
    q = None
    if len(p) == m:
        qt = q_table(m)
        q = list(qt.numerators)
        cmp = compare_sums(profile, qt)
        payload.update(q_numerators=q, sum_q=cmp.sum_q, relation_holds=cmp.relation_holds,
                       verdict=cmp.verdict)
    rows = []
    for i, c in enumerate(p, 1):
        rows.append((i, fmt_prob(c, m), fmt_prob(q[i - 1], m) if q else "-"))
    lines = [table(("i", "p_i", "q_i"), rows), ""]
    lines.append(f"sum p = {payload['sum_p']}/{m}!")
    if q:
        lines.append(f"sum q = {payload['sum_q']}/{m}!")
    else:
        lines.append(f"q comparison needs exactly m={m} non-initializing packets, got {len(p)}")
    lines.append(f"verdict: {payload['verdict']}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_qtable(args) -> int:
    qt = q_table(args.m)
    payload = {"m": qt.m, "q_numerators": list(qt.numerators)}
    rows = [(i, fmt_prob(c, qt.m)) for i, c in enumerate(qt.numerators, 1)]
    _emit(args, payload, table(("i", "q_i"), rows))
    return EXIT_OK


def cmd_opt(args) -> int:
    schedule = load_schedule(args.path)
    res = opt_throughput(schedule)
    lines = [
        f"accepted_count: {res.accepted_count} of {res.total}",
        f"accepts_all_noninit: {str(res.accepts_all_noninit).lower()}",
        "witness (step -> buffer, 0-based):",
    ]
    lines += [f"{t} -> {'idle' if b is None else b}" for t, b in res.witness]
    _emit(args, res.to_json(), "\n".join(lines))
    return EXIT_OK


def cmd_search(args) -> int:
    space = SearchSpace(args.m, n=args.n, max_time=args.max_time, family=args.family,
                        canonical_labels=args.canonical_labels)
    report = find_violations(space, budget=args.budget, threads=args.threads)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for k, v in enumerate(report.violations, 1):
            save_schedule(v.schedule, out / f"violation_{k:04d}.txt")
    lines = [
        f"examined: {report.examined}",
        f"skipped (packet count != m): {report.skipped}",
        f"OPT proviso failures: {report.proviso_failures}",
        f"violations: {len(report.violations)}",
    ]
    for v in report.violations:
        tail = " ".join(f"{t}:{b}" for t, b in v.schedule.events[v.schedule.m:])
        lines.append(f"  sum p {v.sum_p} < sum q {v.sum_q}   [{tail}]")
    _emit(args, report.to_json(), "\n".join(lines))
    return EXIT_OK


def cmd_simulate(args) -> int:
    schedule = load_schedule(args.path)
    est = estimate_profile(schedule, args.trials, args.seed, threads=args.threads)
    rows = [(i, c, f"{e:.6f}", f"{se:.6f}")
            for i, (c, e, se) in enumerate(zip(est.accept_counts, est.estimates, est.standard_errors), 1)]
    _emit(args, est.to_json(), table(("i", "accepted", "estimate", "std err"), rows))
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "systematic":
        if args.m is None:
            raise InvalidParameterError("gen systematic requires --m")
        schedule = systematic_schedule(args.m)
    else:
        schedule = counterexample_schedule()
    if args.out:
        save_schedule(schedule, args.out, as_json=args.json or None)
    elif args.json:
        print(json.dumps(schedule.to_json()))
    else:
        sys.stdout.write(schedule.to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=_default_threads(),
                        help="worker threads (default: $PERMUBUF_THREADS or 1)")
    common.add_argument("--limit-override", action="store_true",
                        help=f"allow m up to {exact.OVERRIDE_LIMIT} in exact enumeration")

    parser = argparse.ArgumentParser(prog="permubuf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="recompute the published m=10 table")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", parents=[common], help="exact profile of a schedule file")
    p.add_argument("path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("qtable", parents=[common], help="closed-form q_i numerators")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_qtable)

    p = sub.add_parser("opt", parents=[common], help="offline optimum of a schedule file")
    p.add_argument("path")
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("search", parents=[common], help="exhaustive search for sum violations")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=None, help="non-initializing packets (default m)")
    p.add_argument("--max-time", type=int, default=None, help="latest injection time (default m+4)")
    p.add_argument("--family", choices=("systematic", "general"), default="general")
    p.add_argument("--canonical-labels", action="store_true")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--out", help="directory for violating schedule files")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimate of p_i")
    p.add_argument("path")
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen", parents=[common], help="write a systematic or counterexample schedule")
    p.add_argument("kind", choices=("systematic", "counterexample"))
    p.add_argument("--m", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleError, ExactArithmeticError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except PermubufError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
