"""Command-line front end: ``runs-approx {table,pmf,bounds,simulate,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import bounds as B
from .exact import pmf_bruteforce, pmf_closed_form, pmf_dp, pmf_recursive
from .matching import (ALPHA_PRESETS, MatchingError, match_one_fix_alpha, match_one_fix_p,
                       match_two_M, match_two_iid, preset_alpha)
from .model import RunsSpec
from .tables import TABLES, compute_table, render, summarize, summary_line
from .tvlab import simulate_counts
from .verify import SUITES, run_suite

PMF_METHODS = {
    "recursive": pmf_recursive,
    "closed-form": pmf_closed_form,
    "dp": pmf_dp,
    "brute": pmf_bruteforce,
}


class UsageError(Exception):
    pass


def read_config(path: str) -> dict:
    """Plain ``key = value`` lines; '#' starts a comment.  Keys use flag
    spelling with dashes or underscores (``alpha-preset = n/3k``)."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _add_spec_args(p: argparse.ArgumentParser):
    p.add_argument("--k1", type=int, required=True, help="run of failures")
    p.add_argument("--k2", type=int, required=True, help="run of successes")
    p.add_argument("--n", type=int, required=True, help="number of trials")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--p", help="success probability (identical trials)")
    g.add_argument("--q", help="failure probability (identical trials)")
    g.add_argument("--probs", help="comma-separated per-trial success probabilities")


def _spec_from(args) -> RunsSpec:
    try:
        if args.probs:
            probs = [float(x) for x in args.probs.split(",")]
        elif args.p is not None:
            probs = float(args.p)
        elif args.q is not None:
            probs = 1.0 - float(args.q)
        else:
            raise UsageError("one of --p, --q or --probs is required")
        return RunsSpec(args.k1, args.k2, args.n, probs)
    except ValueError as exc:
        raise UsageError(f"invalid trial specification: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="runs-approx",
        description="Exact laws and approximation bounds for (k1,k2)-runs.")
    parser.add_argument("--config", help="key=value file with default flag values")
    parser.add_argument("--precision", type=int, default=7, help="decimal places (default 7)")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS,
                        help="decimal places (default 7)")

    t = sub.add_parser("table", help="reproduce a published bound table", parents=[common])
    t.add_argument("id", type=int, choices=sorted(TABLES))
    t.add_argument("--format", choices=("csv", "json", "markdown"), default="csv")

    p = sub.add_parser("pmf", help="exact law of the runs count", parents=[common])
    _add_spec_args(p)
    p.add_argument("--method", choices=sorted(PMF_METHODS), default="dp")
    p.add_argument("--circular", action="store_true", help="count wrapped windows (dp/brute)")
    p.add_argument("--exact", action="store_true", help="rational arithmetic")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", help="write to this file instead of stdout")

    b = sub.add_parser("bounds", help="evaluate total-variation bounds", parents=[common])
    _add_spec_args(b)
    b.add_argument("--all", action="store_true", help="every bound that applies to the input")
    b.add_argument("--bound", action="append", default=[],
                   help="bound name (repeatable): " + ", ".join(sorted(BOUND_NAMES)))
    b.add_argument("--alpha-preset", choices=sorted(ALPHA_PRESETS), default="n/k")
    b.add_argument("--alpha", type=float, help="explicit alpha for one-parameter matching")
    b.add_argument("--p-check", type=float, help="explicit p-check for one-parameter matching")
    b.add_argument("--cor42-matching", choices=("two-iid", "two-M"), default="two-iid")
    b.add_argument("--poisson-variant", choices=("table", "printed"), default="table")
    b.add_argument("--format", choices=("csv", "json"), default="csv")

    s = sub.add_parser("simulate", help="Monte Carlo law of the runs count", parents=[common])
    _add_spec_args(s)
    s.add_argument("--reps", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threads", type=int, help="worker threads (default RUNS_APPROX_THREADS)")
    s.add_argument("--circular", action="store_true")

    v = sub.add_parser("verify", help="run property suites", parents=[common])
    v.add_argument("suite", help="one of: " + ", ".join([*SUITES, "all"]))
    return parser


BOUND_NAMES = ("poisson", "thm21", "cor41", "thm22", "cor42", "thm31", "prop24", "barbour",
               "thm32", "thm33", "gs", "runs11")
DEFAULT_ALL = BOUND_NAMES


def _one_param_match(spec, args):
    if args.p_check is not None:
        return match_one_fix_p(spec, args.p_check)
    alpha = args.alpha if args.alpha is not None else preset_alpha(spec, args.alpha_preset)
    return match_one_fix_alpha(spec, alpha)


def evaluate_bounds(spec: RunsSpec, names, args) -> list:
    reports, skipped = [], []

    def attempt(label, fn):
        try:
            out = fn()
        except (ValueError, MatchingError, ZeroDivisionError) as exc:
            skipped.append((label, str(exc)))
            return
        reports.extend(out if isinstance(out, tuple) else (out,))

    one = None
    try:
        one = _one_param_match(spec, args)
    except (ValueError, MatchingError) as exc:
        skipped.append(("one-parameter matching", str(exc)))
    for name in names:
        if name == "poisson":
            attempt(name, lambda: B.bound_poisson(spec, args.poisson_variant))
        elif name in ("thm21", "cor41", "thm31") and one is None:
            skipped.append((name, "no one-parameter matching"))
        elif name == "thm21":
            attempt(name, lambda: B.bound_thm21(spec, one))
        elif name == "cor41":
            attempt(name, lambda: B.bound_cor41(spec, one))
        elif name == "thm31":
            attempt(name, lambda: B.bound_thm31(spec, one))
        elif name == "thm22":
            attempt(name, lambda: B.bound_thm22(spec))
        elif name == "cor42":
            matcher = match_two_iid if args.cor42_matching == "two-iid" else match_two_M
            attempt(name, lambda: B.bound_cor42(spec, matcher(spec)))
        elif name == "prop24":
            attempt(name, lambda: B.bound_prop24(spec))
        elif name == "barbour":
            attempt(name, lambda: B.bound_barbour(spec))
        elif name == "thm32":
            for tier in (1, 2, 3):
                attempt(f"{name} tier {tier}", lambda: B.bound_thm32(spec, match_two_M(spec), tier))
        elif name == "thm33":
            attempt(name, lambda: B.bound_thm33(spec))
        elif name == "gs":
            attempt(name, lambda: B.bound_gs_1k(spec))
        elif name == "runs11":
            if one is not None:
                attempt(f"{name} one", lambda: B.bound_runs11(spec, "one", one))
            attempt(f"{name} two", lambda: B.bound_runs11(spec, "two"))
        else:
            raise UsageError(f"unknown bound {name!r}")
    return reports, skipped


def _cmd_table(args, out):
    cells = compute_table(args.id)
    out.write(render(args.id, cells, args.format, args.precision))
    summary = summarize(cells)
    print(summary_line(args.id, summary), file=sys.stderr)
    return 0


def _cmd_pmf(args, out):
    spec = _spec_from(args)
    fn = PMF_METHODS[args.method]
    kwargs = {"exact": args.exact}
    if args.circular:
        if args.method not in ("dp", "brute"):
            raise UsageError("--circular needs --method dp or brute")
        kwargs["circular"] = True
    if args.exact:
        spec = spec.exact()
    try:
        pmf = fn(spec, **kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    text = pmf.to_json() if args.format == "json" else pmf.to_csv(args.precision)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def _cmd_bounds(args, out):
    spec = _spec_from(args)
    names = list(DEFAULT_ALL) if args.all else args.bound
    if not names:
        raise UsageError("give --all or at least one --bound")
    reports, skipped = evaluate_bounds(spec, names, args)
    if args.format == "json":
        out.write(json.dumps({"bounds": [r.to_dict() for r in reports],
                              "skipped": [{"bound": n, "reason": r} for n, r in skipped]},
                             indent=2) + "\n")
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bound", "value", "preconditions_met", "failed_flags", "notes"])
        for r in reports:
            failed = ";".join(k for k, v in r.flags.items() if not v)
            w.writerow([r.name, f"{r.value:.{args.precision}f}", r.preconditions_met, failed,
                        ";".join(r.notes)])
        out.write(buf.getvalue())
        for n, reason in skipped:
            print(f"skipped {n}: {reason}", file=sys.stderr)
    return 0


def _cmd_simulate(args, out):
    spec = _spec_from(args)
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    pmf = simulate_counts(spec, args.circular, args.reps, args.seed, args.threads)
    out.write(pmf.to_csv(args.precision))
    return 0


def _cmd_verify(args, out):
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join([*SUITES, 'all'])}")
    results = run_suite(args.suite)
    for res in results:
        out.write(f"[{'PASS' if res.passed else 'FAIL'}] {res.name}\n")
        for line in res.lines:
            out.write(f"    {line}\n")
    failed = [r.name for r in results if not r.passed]
    out.write(f"{len(results) - len(failed)} passed, {len(failed)} failed\n")
    return 1 if failed else 0


COMMANDS = {"table": _cmd_table, "pmf": _cmd_pmf, "bounds": _cmd_bounds,
            "simulate": _cmd_simulate, "verify": _cmd_verify}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            defaults = read_config(known.config)
            parser.set_defaults(**defaults)
            for action in parser._subparsers._group_actions:
                for subparser in action.choices.values():
                    subparser.set_defaults(**defaults)
                    for opt in subparser._actions:
                        if opt.dest in defaults:
                            opt.required = False
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"runs-approx: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"runs-approx: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
