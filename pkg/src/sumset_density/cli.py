"""Command-line entry point: ``sumset-density <command> [flags]``.

Exit status is 0 when every check in the report passes, 1 when a check
fails and 2 on usage errors (bad flags, malformed sets, decimal alphas).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .buck_density import StagedSet, buck, staged_density_interval
from .constructions import (
    construct_basis,
    construct_irrational,
    construct_rational,
    construct_translate,
    counterexample,
    staged_target_report,
)
from .errors import (
    ContractViolation,
    InternalConsistencyError,
    SetSyntaxError,
    UndecidableAtPrecision,
)
from .estimators import ESTIMATORS, window_extrema
from .exact_arithmetic import IntervalReal, parse_alpha
from .expansion import check_step_invariants, expand, partial_sum
from .periodic_sets import k_fold_sumset, sumset
from .report import Report
from .setgrammar import parse_set, render
from .suites import SUITES, run_suite

__all__ = ["main", "run", "parse_set"]

THEOREMS = {"3.1": "sumset", "sumset": "sumset", "3.2": "translate",
            "translate": "translate", "3.3": "basis", "basis": "basis"}


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "records"), default="text",
                        help="human-readable text or JSON-lines records")

    parser = argparse.ArgumentParser(prog="sumset-density",
                                     description="Exact Buck densities of sumsets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a set with prescribed densities")
    p.add_argument("--theorem", required=True, choices=sorted(THEOREMS))
    p.add_argument("--alpha", required=True)
    p.add_argument("--n", type=_positive, default=1)
    p.add_argument("--k", type=_positive)
    p.add_argument("--depth", type=_positive, default=4)
    p.add_argument("--stage", type=_positive)
    p.add_argument("--B", type=_int_list, default=(0, 1), help="finite set for translates")
    p.add_argument("--N", type=_positive, default=10_000, help="sieve limit for the basis")

    p = sub.add_parser("expand", parents=[common], help="positional expansion of alpha")
    p.add_argument("--alpha", required=True)
    p.add_argument("--n", type=_positive, default=1)
    p.add_argument("--depth", type=_positive, default=5)
    p.add_argument("--modulus", type=_positive, default=10**9, help="cap on q_1...q_i")

    p = sub.add_parser("sumset", parents=[common], help="sum of sets given in the set grammar")
    p.add_argument("sets", nargs="+", metavar="SET")
    p.add_argument("--k", type=_positive, default=1, help="k-fold sum of the result")

    p = sub.add_parser("density", parents=[common], help="Buck density or a finite estimate")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--set", dest="set_text", metavar="SET")
    src.add_argument("--construction", choices=("sumset", "translate"))
    p.add_argument("--estimator", choices=("buck", "window", *ESTIMATORS), default="buck")
    p.add_argument("--alpha")
    p.add_argument("--n", type=_positive, default=1)
    p.add_argument("--k", type=_positive, default=1)
    p.add_argument("--stage", type=_positive, default=3)
    p.add_argument("--B", type=_int_list, default=(0, 1))
    p.add_argument("--N", type=_positive, default=10_000)
    p.add_argument("--window", type=_positive, default=100)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", action="append", choices=sorted(SUITES),
                   help="repeatable; default runs all")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("counterexample", parents=[common],
                       help="certificates that 2A is outside the Buck domain")
    p.add_argument("--kmax", type=_positive, default=20)
    p.add_argument("--modulus", type=_positive, default=10**12,
                   help="m in the counting bound |2A ∩ [1,m]|")
    return parser


# -- commands -------------------------------------------------------------
def _alpha(args) -> Fraction | IntervalReal:
    if args.alpha is None:
        raise UsageError("--alpha is required")
    return parse_alpha(args.alpha)


def _alpha_label(alpha) -> str:
    return alpha.name if isinstance(alpha, IntervalReal) else f"{alpha.numerator}/{alpha.denominator}"


def cmd_construct(args) -> list[Report]:
    alpha = _alpha(args)
    kind = THEOREMS[args.theorem]
    if kind == "sumset":
        return [_construct_sumset(alpha, args)]
    if kind == "translate":
        inst = construct_translate(alpha, args.B, depth=args.stage or args.depth)
        members = ",".join(str(b) for b in sorted(set(args.B)))
        rep = Report(f"translate construction, alpha={_alpha_label(alpha)}, B={{{members}}}")
        rep.values.update(k=inst.k, h=inst.h)
        if isinstance(inst.A_plus_B, StagedSet):
            stage = min(args.stage or args.depth, inst.A_plus_B.max_stage)
            lo, hi = inst.density_interval(stage)
            rep.values.update(stage=stage, buck_interval=(lo, hi), width=hi - lo)
        else:
            rep.values.update(A=render(inst.A), A_plus_B=render(inst.A_plus_B),
                              buck=buck(inst.A_plus_B))
        rep.extend(inst.report)
        return [rep]
    return [construct_basis(alpha, args.N, args.stage or args.depth)]


def _construct_sumset(alpha, args) -> Report:
    n = args.n
    ks = [args.k] if args.k else list(range(1, n + 1))
    if any(k > n for k in ks):
        raise UsageError(f"--k must be at most --n = {n}")
    if isinstance(alpha, IntervalReal):
        S = construct_irrational(alpha, n, args.stage or args.depth)
        stages = S.max_stage
        rep = Report(f"sumset construction, alpha={alpha.name}, n={n}")
        rep.values.update(stages=stages)
        for k in ks:
            sub = staged_target_report(S, alpha, n, k, stages)
            rep.rows.extend({"k": k, **row} for row in sub.rows)
            rep.extend(sub, prefix=f"k={k}: ")
        return rep
    if not 0 <= alpha <= 1:
        raise UsageError(f"alpha = {alpha} outside [0, 1]")
    A = construct_rational(alpha.numerator, alpha.denominator, n)
    rep = Report(f"sumset construction, alpha={_alpha_label(alpha)}, n={n}")
    rep.values["A"] = render(A)
    for k in ks:
        kA = k_fold_sumset(A, k)
        value = buck(kA)
        target = k * alpha / n
        if len(ks) == 1:
            rep.values.update(k=k, kA=render(kA), buck=value)
        else:
            rep.rows.append({"k": k, "kA": render(kA), "buck": value})
        rep.check(f"k={k}: b(kA) = k*alpha/n", value == target, f"{value} vs {target}")
    return rep


def cmd_expand(args) -> list[Report]:
    alpha = _alpha(args)
    if not isinstance(alpha, IntervalReal):
        raise UsageError("expand needs an irrational alpha (a named constant, sqrt:P/Q or digits:FILE)")
    exp = expand(alpha, args.n, args.depth, modulus_cap=args.modulus)
    rep = Report(f"expansion of {alpha.name}, n={args.n}, depth={args.depth}")
    for s in exp:
        lo, hi = s.alpha_enclosure
        rep.rows.append({"i": s.index, "q_i": s.q, "beta_i": s.beta,
                         "partial_sum": partial_sum(exp.steps, s.index),
                         "alpha_i_lo": lo, "alpha_i_hi": hi})
    if exp.stopped:
        rep.values["stopped"] = exp.stopped
    for name, ok, detail in check_step_invariants(exp):
        rep.check(name, ok, detail)
    return [rep]


def cmd_sumset(args) -> list[Report]:
    sets = [parse_set(text) for text in args.sets]
    total = sets[0]
    for S in sets[1:]:
        total = sumset(total, S)
    result = k_fold_sumset(total, args.k) if args.k > 1 else total
    rep = Report("sumset")
    for i, S in enumerate(sets, 1):
        rep.values[f"S{i}"] = render(S)
    rep.values.update(k=args.k, result=render(result), buck=buck(result))
    return [rep]


def cmd_density(args) -> list[Report]:
    rep = Report(f"density ({args.estimator})")
    if args.set_text is not None:
        S = parse_set(args.set_text)
        rep.values["set"] = render(S)
        _estimate(rep, S, args)
        return [rep]
    alpha = _alpha(args)
    rep.values.update(construction=args.construction, alpha=_alpha_label(alpha))
    if args.construction == "translate":
        inst = construct_translate(alpha, args.B, depth=args.stage)
        target, k = inst.A_plus_B, 1
    else:
        if args.k > args.n:
            raise UsageError(f"--k must be at most --n = {args.n}")
        if isinstance(alpha, IntervalReal):
            target = construct_irrational(alpha, args.n, args.stage)
        else:
            target = construct_rational(alpha.numerator, alpha.denominator, args.n)
        k = args.k
    rep.values["k"] = k
    if isinstance(target, StagedSet):
        stage = min(args.stage, target.max_stage)
        rep.values["stage"] = stage
        if args.estimator == "buck":
            lo, hi = staged_density_interval(target, stage, k)
            rep.values.update(buck_interval=(lo, hi), width=hi - lo)
            return [rep]
        inner, outer = target.k_fold(stage, k)
        sub_in, sub_out = Report("inner"), Report("outer")
        _estimate(sub_in, inner, args)
        _estimate(sub_out, outer, args)
        rep.values.update({f"inner_{key}": v for key, v in sub_in.values.items()})
        rep.values.update({f"outer_{key}": v for key, v in sub_out.values.items()})
        return [rep]
    _estimate(rep, k_fold_sumset(target, k), args)
    return [rep]


def _estimate(rep: Report, S, args) -> None:
    if args.estimator == "buck":
        rep.values["buck"] = buck(S)
    elif args.estimator == "window":
        lo, hi = window_extrema(S, args.N, args.window)
        rep.values.update(N=args.N, window=args.window, window_min=lo, window_max=hi)
    else:
        rep.values.update(N=args.N, estimate=ESTIMATORS[args.estimator](S, args.N))


def cmd_verify(args) -> list[Report]:
    names = args.suite or list(SUITES)
    return [run_suite(name, args.seed) for name in names]


def cmd_counterexample(args) -> list[Report]:
    return [counterexample(args.kmax, args.modulus)]


COMMANDS = {
    "construct": cmd_construct,
    "expand": cmd_expand,
    "sumset": cmd_sumset,
    "density": cmd_density,
    "verify": cmd_verify,
    "counterexample": cmd_counterexample,
}


def run(argv: list[str], out=None, err=None) -> int:
    """Run one command; returns the exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        reports = COMMANDS[args.command](args)
    except (UsageError, ContractViolation, SetSyntaxError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=err)
        return 2
    except (UndecidableAtPrecision, InternalConsistencyError) as exc:
        print(f"{parser.prog} {args.command}: check failed: {exc}", file=err)
        return 1
    for rep in reports:
        if args.format == "records":
            for line in rep.to_records():
                print(line, file=out)
        else:
            print(rep.to_text(), file=out)
    return 0 if all(rep.passed for rep in reports) else 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
