"""Verification sweeps, one per acceptance property, each returning a :class:`Report`.

Randomized sweeps take a ``seed`` and draw from :class:`random.Random`, so a
given seed always produces the same instances and the same report.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .buck_density import (
    additivity_disjoint,
    buck,
    buck_lower,
    buck_upper,
    modulus_cover_bound,
    two_squares_residues,
)
from .constructions import (
    COVER_CHAIN,
    SumsetBoundInstance,
    alpha_contains,
    construct_basis,
    construct_irrational,
    construct_rational,
    construct_translate,
    counterexample,
    staged_target_report,
    verify_sumset_bound_all,
)
from .errors import ContractViolation, InternalConsistencyError
from .estimators import dstar_counterexample
from .exact_arithmetic import named_constants
from .expansion import check_step_invariants, expand
from .periodic_sets import (
    EventuallyPeriodicSet,
    affine,
    complement,
    difference,
    finite,
    intersect,
    make,
    progression,
    sumset,
    union,
    union_all,
)
from .report import Report

IRRATIONALS = ("sqrt2-half", "golden-conjugate", "sqrt3-minus-1")


def _random_residues(rng: random.Random, m: int, allow_empty: bool = True) -> set[int]:
    while True:
        R = {r for r in range(m) if rng.random() < 0.5}
        if R or allow_empty:
            return R


def _random_finite(rng: random.Random, top: int, size: int) -> set[int]:
    return set(rng.sample(range(top), min(size, top)))


def rational_exact(bmax: int = 8, nmax: int = 5) -> Report:
    """``b(kA) = k*a/(n*b)`` for the rational construction, every listed ``a, b, n, k``."""
    rep = Report(f"rational construction, b <= {bmax}, n <= {nmax}")
    bad = []
    total = 0
    for b in range(1, bmax + 1):
        for a in range(b + 1):
            for n in range(1, nmax + 1):
                A = construct_rational(a, b, n)
                kA = A
                for k in range(1, n + 1):
                    if k > 1:
                        kA = sumset(kA, A)
                    total += 1
                    if buck(kA) != Fraction(k * a, n * b):
                        bad.append((a, b, n, k, buck(kA)))
    rep.values.update(instances=total, failures=len(bad))
    rep.check("b(kA) = ka/(nb) for all instances", not bad, f"first failures {bad[:3]}")
    return rep


def periodic_exactness(count: int = 500, seed: int = 0) -> Report:
    """Unions of residue classes, finite sets and finite perturbations."""
    rng = random.Random(seed)
    rep = Report(f"periodic exactness, {count} instances, seed {seed}")
    bad = []
    for idx in range(count):
        m = rng.randint(1, 30)
        H = _random_residues(rng, m)
        S = make(m, H)
        F = finite(_random_finite(rng, 4 * m + 10, rng.randint(0, 8)))
        expected = Fraction(len(H), m)
        values = {
            "union of classes": buck(S),
            "finite set": buck(F) + expected,
            "S ∪ F": buck(union(S, F)),
            "S \\ F": buck(difference(S, F)),
            "S Δ F": buck(union(difference(S, F), difference(F, S))),
        }
        for label, value in values.items():
            if value != expected:
                bad.append((idx, m, sorted(H), label, value))
    rep.values.update(instances=count, failures=len(bad))
    rep.check("b(mN + H) = |H|/m", not any(b[3] == "union of classes" for b in bad))
    rep.check("finite sets have density 0", not any(b[3] == "finite set" for b in bad))
    rep.check("finite perturbations leave the density unchanged",
              not any(b[3] not in ("union of classes", "finite set") for b in bad),
              f"first failures {bad[:3]}")
    return rep


def _random_subset_of(rng: random.Random, cover: EventuallyPeriodicSet) -> EventuallyPeriodicSet:
    """A random eventually periodic subset of ``cover``."""
    m = cover.modulus * rng.randint(1, 3)
    W = make(m, _random_residues(rng, m), 0)
    W = union(W, finite(_random_finite(rng, 3 * m, rng.randint(0, 5))))
    W = difference(W, finite(_random_finite(rng, 3 * m, rng.randint(0, 5))))
    return intersect(W, cover)


def additivity(count: int = 200, seed: int = 0) -> Report:
    """Upper and lower Buck density split over disjoint progression covers."""
    rng = random.Random(seed)
    rep = Report(f"additivity over disjoint covers, {count} instances, seed {seed}")
    bad = []
    for idx in range(count):
        m = rng.randint(2, 24)
        classes = list(range(m))
        rng.shuffle(classes)
        cut = rng.randint(1, m - 1)
        A = make(m, classes[:cut])
        B = make(m, classes[cut:])
        X, Y = _random_subset_of(rng, A), _random_subset_of(rng, B)
        try:
            upper, lower = additivity_disjoint(X, Y, A, B)
        except (ContractViolation, InternalConsistencyError) as exc:
            bad.append((idx, str(exc)))
            continue
        if upper != buck_upper(X) + buck_upper(Y) or lower != buck_lower(X) + buck_lower(Y):
            bad.append((idx, "split mismatch"))
    rep.values.update(instances=count, failures=len(bad))
    rep.check("b*(X∪Y) = b*(X) + b*(Y) and b_*(X∪Y) = b_*(X) + b_*(Y)", not bad,
              f"first failures {bad[:3]}")
    return rep


def _random_bound_instance(rng: random.Random, qmax: int, nmax: int) -> SumsetBoundInstance:
    q = rng.randint(2, qmax)
    t = rng.randint(1, q - 1)
    n = rng.randint(1, max(1, min(nmax, (q - 1) // t)))
    while n * t >= q:
        t -= 1
    # V: some sub-progressions of qN + t plus a few single points
    mult = rng.randint(1, 3)
    offsets = {j for j in range(mult) if rng.random() < 0.5}
    parts = [progression(q * mult, t + q * j) for j in offsets]
    points = {t + q * rng.randint(0, 6) for _ in range(rng.randint(0, 3))}
    if not parts and not points:
        points = {t}
    V = union_all(parts + [finite(points)])
    return SumsetBoundInstance(n, t, q, V)


def sumset_bound(count: int = 200, seed: int = 0, qmax: int = 50, nmax: int = 10) -> Report:
    """``kt/q <= b_*(kS) <= b*(kS) = kt/q + b*(kV) <= (kt+1)/q`` on random instances."""
    rng = random.Random(seed)
    rep = Report(f"sumset bound chain, {count} instances, q <= {qmax}, seed {seed}")
    bad = []
    checks = 0
    for idx in range(count):
        inst = _random_bound_instance(rng, qmax, nmax)
        sub = verify_sumset_bound_all(inst)
        checks += len(sub.checks)
        if not sub.passed:
            bad.append((idx, inst.n, inst.t, inst.q, [c.name for c in sub.failures()][:2]))
    rep.values.update(instances=count, checks=checks, failures=len(bad))
    rep.check("chain holds for every k <= n", not bad, f"first failures {bad[:3]}")
    return rep


def expansions(names=IRRATIONALS, ns=(1, 2, 3), depth: int = 8) -> Report:
    """Step invariants of the positional expansion, under the modulus cap."""
    consts = named_constants()
    rep = Report(f"expansion invariants, depth {depth}")
    for name in names:
        alpha = consts[name]
        for n in ns:
            exp = expand(alpha, n, depth)
            rep.rows.append({"alpha": name, "n": n, "steps": len(exp),
                             "q": [s.q for s in exp], "stopped": exp.stopped or ""})
            rep.check(f"{name} n={n}: at least one step", len(exp) >= 1)
            if len(exp) < depth:
                rep.check(f"{name} n={n}: truncated only by the modulus cap",
                          bool(exp.stopped) and "exceeds cap" in exp.stopped, exp.stopped or "")
            results = check_step_invariants(exp)
            failed = [r for r in results if not r[1]]
            rep.check(f"{name} n={n}: {len(results)} step invariants", not failed,
                      "; ".join(f"{r[0]}: {r[2]}" for r in failed[:3]))
    return rep


def staged_sandwiches(names=IRRATIONALS, n: int = 2, stages: int = 5, ks=(1, 2)) -> Report:
    """Nested stage intervals containing ``k*alpha/n`` within the certified width."""
    consts = named_constants()
    rep = Report(f"staged sandwiches, n={n}, stages <= {stages}")
    for name in names:
        alpha = consts[name]
        S = construct_irrational(alpha, n, stages)
        top = min(stages, S.max_stage)
        for k in ks:
            sub = staged_target_report(S, alpha, n, k, top)
            for row in sub.rows:
                rep.rows.append({"alpha": name, "k": k, **row})
            rep.extend(sub, prefix=f"{name} k={k}: ")
    return rep


def translates(stage: int = 4, width: Fraction = Fraction(1, 20)) -> Report:
    """Exact rational translate and a staged irrational one, for ``B = {0, 1}``."""
    rep = Report("translate construction, B = {0,1}")
    exact = construct_translate(Fraction(1, 3), (0, 1))
    rep.extend(exact.report, prefix="alpha=1/3: ")
    lo, hi = exact.density_interval()
    rep.values.update(rational_k=exact.k, rational_h=exact.h, rational_density=lo)
    rep.check("alpha=1/3: b(A+B) = 1/3", lo == hi == Fraction(1, 3))
    golden = named_constants()["golden-conjugate"]
    inst = construct_translate(golden, (0, 1), depth=stage)
    rep.extend(inst.report, prefix="golden-conjugate: ")
    lo, hi = inst.density_interval(stage)
    rep.values.update(golden_k=inst.k, golden_h=inst.h, golden_interval=(lo, hi))
    rep.check(f"golden-conjugate: stage {stage} interval contains alpha",
              alpha_contains(golden, lo, hi))
    rep.check(f"golden-conjugate: width < {width}", hi - lo < width, f"width {hi - lo}")
    return rep


def basis(N: int = 10_000) -> Report:
    """Sum-of-two-squares basis and the modulus cover bounds."""
    rep = Report("basis with 2A = N")
    for label, alpha in (("alpha=1/3", Fraction(1, 3)),
                         ("golden-conjugate", named_constants()["golden-conjugate"])):
        rep.extend(construct_basis(alpha, N), prefix=f"{label}: ")
    bounds = {m: modulus_cover_bound(two_squares_residues, m) for m in COVER_CHAIN}
    rep.values["cover_bounds"] = {str(m): b for m, b in bounds.items()}
    rep.check("cover bound at modulus 8 is 5/8", bounds[8] == Fraction(5, 8))
    rep.check("cover bounds non-increasing along 4 | 8 | 72 | 5544",
              all(bounds[a] >= bounds[b] for a, b in zip(COVER_CHAIN, COVER_CHAIN[1:])))
    return rep


def counterexample_suite(kmax: int = 20, m: int = 10**12) -> Report:
    return counterexample(kmax, m)


def nonadditivity(nmax: int = 3) -> Report:
    return dstar_counterexample(nmax)


def conjugacy(count: int = 100, seed: int = 0) -> Report:
    """Lower Buck density agrees with ``1 - b*(complement)`` and with ``b*``."""
    rng = random.Random(seed)
    rep = Report(f"conjugacy and affine scaling, {count} instances")
    bad = []
    for _ in range(count):
        m = rng.randint(1, 20)
        T = m * rng.randint(0, 2)
        S = make(m, _random_residues(rng, m), T, _random_finite(rng, T, 3))
        k, h = rng.randint(1, 6), rng.randint(0, 10)
        if buck_lower(S) != 1 - buck_upper(complement(S)) or buck_lower(S) != buck_upper(S):
            bad.append(("conjugacy", S))
        if buck(affine(S, k, h)) != buck(S) / k:
            bad.append(("affine", S, k, h))
    rep.check("b_*(S) = 1 - b*(N \\ S) = b*(S)", not any(b[0] == "conjugacy" for b in bad))
    rep.check("b(kS + h) = b(S)/k", not any(b[0] == "affine" for b in bad))
    return rep


# name -> (description, runner taking a seed)
SUITES: dict[str, tuple[str, Callable[[int], Report]]] = {
    "rational": ("rational construction exact densities", lambda seed: rational_exact()),
    "periodic": ("periodic sets, finite sets, perturbations", lambda seed: periodic_exactness(seed=seed)),
    "additivity": ("disjoint-cover additivity", lambda seed: additivity(seed=seed)),
    "sumset-bound": ("sumset bound chain", lambda seed: sumset_bound(seed=seed)),
    "expansion": ("positional expansion invariants", lambda seed: expansions()),
    "sandwich": ("staged sandwiches for irrational alpha", lambda seed: staged_sandwiches()),
    "translate": ("translate construction", lambda seed: translates()),
    "basis": ("basis with 2A = N", lambda seed: basis()),
    "counterexample": ("2A outside the Buck domain", lambda seed: counterexample_suite()),
    "nonadditivity": ("upper asymptotic density not additive", lambda seed: nonadditivity()),
    "conjugacy": ("conjugacy and affine scaling", lambda seed: conjugacy(seed=seed)),
}


def run_suite(name: str, seed: int = 0) -> Report:
    if name not in SUITES:
        raise ContractViolation(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name][1](seed)
