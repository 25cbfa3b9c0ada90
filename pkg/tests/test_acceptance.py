"""Acceptance gate: one test per criterion, each with its runtime budget.

Run directly (``python tests/test_acceptance.py``) or through pytest; either
way one PASS/FAIL line per criterion is printed.
"""

import math
import time
from fractions import Fraction

import pytest

from sumset_density import suites
from sumset_density.constructions import construct_translate
from sumset_density.estimators import count_X_at_checkpoint, count_Y_at_checkpoint
from sumset_density.periodic_sets import affine, finite, interval_progression, sumset, union

RESULTS: dict[int, str] = {}


def _exact_translate_decomposition():
    """Set equality for alpha = 1/3, B = {0,1}, rebuilt from k, h and C."""
    inst = construct_translate(Fraction(1, 3), (0, 1))
    k, h = inst.k, inst.h
    rhs = union(interval_progression(k, 0, h - 1), affine(inst.C, k, h))
    return inst.A_plus_B == rhs and sumset(inst.A, finite([0, 1])) == rhs


def _criterion_10_extra():
    # the same closed forms, recomputed here from the interval endpoints
    ok = True
    prev = Fraction(0)
    for n in (1, 2, 3):
        N = math.factorial(4 * n + 1)
        x = sum((math.factorial(4 * j + 1) - math.factorial(4 * j)) // 2 + 1 for j in range(1, n + 1))
        ok &= x == count_X_at_checkpoint(n)
        ok &= count_Y_at_checkpoint(n) == sum(
            (math.factorial(4 * j + 3) - math.factorial(4 * j + 2)) // 2 for j in range(1, n))
        ok &= prev < Fraction(x, N) < Fraction(1, 2)
        prev = Fraction(x, N)
    return ok and suites.additivity(count=200, seed=10).passed


CRITERIA = {
    1: ("rational construction exact, b <= 8, n <= 5", 60, lambda: suites.rational_exact(8, 5)),
    2: ("periodic/finite/perturbation exactness, 500 instances", 10,
        lambda: suites.periodic_exactness(500, seed=0)),
    3: ("disjoint-cover additivity, 200 instances", 10, lambda: suites.additivity(200, seed=0)),
    4: ("sumset bound chain, 200 instances, q <= 50", 60, lambda: suites.sumset_bound(200, seed=0)),
    5: ("expansion invariants, 3 alphas, n <= 3, depth 8", 30, lambda: suites.expansions(depth=8)),
    6: ("staged sandwiches, n = 2, stages <= 5, k <= 2", 120,
        lambda: suites.staged_sandwiches(n=2, stages=5, ks=(1, 2))),
    7: ("translate: exact 1/3 and golden-conjugate stage 4", 30, lambda: suites.translates(4)),
    8: ("basis 2A = N and cover bounds", 30, lambda: suites.basis(10_000)),
    9: ("counterexample witnesses and sparsity", 10, lambda: suites.counterexample_suite(20, 10**12)),
    10: ("upper asymptotic density not additive", 5, lambda: suites.nonadditivity(3)),
}

EXTRA = {7: _exact_translate_decomposition, 10: _criterion_10_extra}


def evaluate(number):
    title, budget, runner = CRITERIA[number]
    start = time.perf_counter()
    report = runner()
    extra = EXTRA.get(number, lambda: True)()
    elapsed = time.perf_counter() - start
    ok = report.passed and extra and elapsed < budget
    reasons = [c.name for c in report.failures()][:3]
    if not extra:
        reasons.append("independent recomputation disagrees")
    if elapsed >= budget:
        reasons.append(f"over budget {budget}s")
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} {title} ({elapsed:.2f}s / {budget}s)"
    if reasons:
        line += " -- " + "; ".join(reasons)
    RESULTS[number] = line
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, line = evaluate(number)
    print(line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for number in sorted(CRITERIA):
        ok, line = evaluate(number)
        print(line)
        failed += not ok
    raise SystemExit(1 if failed else 0)
