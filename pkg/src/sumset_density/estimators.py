"""Finite-truncation density estimates (labelled estimates, never limits).

All values are exact rationals. The estimators accept either an
:class:`EventuallyPeriodicSet` (counted in closed form) or any membership
predicate ``n -> bool`` (counted by scanning).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from . import _bits
from .buck_density import StagedSet, buck
from .errors import ContractViolation
from .periodic_sets import EventuallyPeriodicSet
from .report import Report

try:
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

Membership = Union[EventuallyPeriodicSet, Callable[[int], bool]]

# scanning a predicate beyond this is refused
ENUMERATION_LIMIT = 10**7


def _indicator(S: Membership, N: int) -> np.ndarray:
    """Boolean array ``a`` with ``a[n] = (n in S)`` for ``0 <= n <= N``."""
    if isinstance(S, EventuallyPeriodicSet):
        out = np.zeros(N + 1, dtype=bool)
        out[_bits.to_indices(S.bitmap(N + 1))] = True
        return out
    if N > ENUMERATION_LIMIT:
        raise ContractViolation(f"refusing to scan a predicate up to {N}")
    return np.fromiter((bool(S(n)) for n in range(N + 1)), dtype=bool, count=N + 1)


def prefix_ratio(S: Membership, N: int) -> Fraction:
    """``|S ∩ [1, N]| / N``."""
    if N < 1:
        raise ContractViolation("N must be at least 1")
    if isinstance(S, EventuallyPeriodicSet):
        return Fraction(S.count_upto(N), N)
    return Fraction(int(_indicator(S, N)[1:].sum()), N)


def window_extrema(S: Membership, N: int, L: int) -> tuple[Fraction, Fraction]:
    """Min and max of ``|S ∩ W| / L`` over windows ``W = [s, s+L-1] ⊆ [1, N]``."""
    if not 1 <= L <= N:
        raise ContractViolation(f"need 1 <= L <= N, got L={L}, N={N}")
    ind = _indicator(S, N)[1:].astype(np.int64)
    csum = np.concatenate(([0], np.cumsum(ind)))
    counts = csum[L:] - csum[:-L]
    return Fraction(int(counts.min()), L), Fraction(int(counts.max()), L)


def _weighted_harmonic(members: np.ndarray, N: int) -> int:
    """``sum_{n in members} N!/n`` by binary splitting (exact integer)."""
    weights = np.zeros(N + 1, dtype=bool)
    weights[members] = True
    mpz = gmpy2.mpz if gmpy2 is not None else int

    def split(a: int, b: int):
        # returns (sum_{a<=n<b, n selected} P/n, P) with P = prod_{a<=n<b} n
        if b - a == 1:
            return (mpz(1) if weights[a] else mpz(0)), mpz(a)
        mid = (a + b) // 2
        s1, p1 = split(a, mid)
        s2, p2 = split(mid, b)
        return s1 * p2 + s2 * p1, p1 * p2

    return split(1, N + 1)[0]


def log_ratio(S: Membership, N: int) -> Fraction:
    """``(sum_{n in S ∩ [1,N]} 1/n) / (sum_{n <= N} 1/n)``."""
    if N < 1:
        raise ContractViolation("N must be at least 1")
    members = np.flatnonzero(_indicator(S, N))
    members = members[members >= 1]
    if members.size == 0:
        return Fraction(0)
    top = _weighted_harmonic(members, N)
    bottom = _weighted_harmonic(np.arange(1, N + 1), N)
    if gmpy2 is not None:
        g = gmpy2.gcd(top, bottom)
        top, bottom = top // g, bottom // g
    return Fraction(int(top), int(bottom))


ESTIMATORS: dict[str, Callable[[Membership, int], Fraction]] = {
    "prefix": prefix_ratio,
    "log": log_ratio,
}


def sandwich_check(S: StagedSet, estimator: Callable[[Membership, int], Fraction],
                   stage: int, N: int, slack: Fraction, k: int = 1) -> Report:
    """Estimates of ``k*inner`` and ``k*outer`` at ``N`` against their Buck values.

    An estimate of any set between the two is bracketed by the two estimates
    (prefix counts are monotone), so both must land in
    ``[b(k*inner) - slack, b(k*outer) + slack]``.
    """
    rep = Report(f"sandwich stage {stage}, N={N}, k={k}")
    inner, outer = S.k_fold(stage, k)
    b_lo, b_hi = buck(inner), buck(outer)
    e_lo, e_hi = estimator(inner, N), estimator(outer, N)
    rep.values.update(buck_inner=b_lo, buck_outer=b_hi, estimate_inner=e_lo,
                      estimate_outer=e_hi, slack=Fraction(slack))
    rep.values["margin_low"] = e_lo - (b_lo - slack)
    rep.values["margin_high"] = (b_hi + slack) - e_hi
    rep.check("estimate(inner) >= b(inner) - slack", e_lo >= b_lo - slack,
              f"{e_lo} vs {b_lo} - {slack}")
    rep.check("estimate(outer) <= b(outer) + slack", e_hi <= b_hi + slack,
              f"{e_hi} vs {b_hi} + {slack}")
    return rep


# -- factorial-interval sets ----------------------------------------------
def _evens(a: int, b: int) -> int:
    """Even integers in ``[a, b]``."""
    return 0 if b < a else b // 2 - (a - 1) // 2


def _odds(a: int, b: int) -> int:
    return 0 if b < a else (b - a + 1) - _evens(a, b)


def _interval_count(N: int, offset: int, parity_count) -> int:
    """Members of ``∪_{j>=1} [(4j+offset)!, (4j+offset+1)!]`` of one parity up to ``N``."""
    total, j = 0, 1
    while math.factorial(4 * j + offset) <= N:
        a, b = math.factorial(4 * j + offset), math.factorial(4 * j + offset + 1)
        total += parity_count(a, min(b, N))
        j += 1
    return total


def count_X(N: int) -> int:
    """``|X ∩ [1, N]|`` with ``X`` the evens of ``∪ [(4j)!, (4j+1)!]``."""
    return _interval_count(N, 0, _evens)


def count_Y(N: int) -> int:
    """``|Y ∩ [1, N]|`` with ``Y`` the odds of ``∪ [(4j+2)!, (4j+3)!]``."""
    return _interval_count(N, 2, _odds)


def count_X_at_checkpoint(n: int) -> int:
    """``|X ∩ [1, (4n+1)!]|`` summed interval by interval (endpoints are even)."""
    return sum((math.factorial(4 * j + 1) - math.factorial(4 * j)) // 2 + 1
               for j in range(1, n + 1))


def count_Y_at_checkpoint(n: int) -> int:
    """``|Y ∩ [1, (4n+1)!]|``: intervals ``j < n`` of ``F`` lie fully below."""
    return sum((math.factorial(4 * j + 3) - math.factorial(4 * j + 2)) // 2
               for j in range(1, n))


def dstar_counterexample(nmax: int = 3, max_modulus: int = 64) -> Report:
    """Prefix ratios of the factorial-interval sets at their checkpoints.

    ``X ⊆ 2N`` and ``Y ⊆ 2N+1`` sit in disjoint progressions, yet their upper
    asymptotic densities are 1/2, 1/2 and 1/2 for the union, so that density
    is not additive here. Buck density is: the covers ``2N`` and ``2N+1`` give
    ``b*(X), b*(Y) <= 1/2``; runs of consecutive members longer than any
    modulus force every progression cover to contain a full parity class, so
    ``b*(X) = b*(Y) = 1/2`` and ``b*(X∪Y) = 1 = 1/2 + 1/2``; gaps longer than
    any modulus rule out progressions inside, so all lower values are 0.
    """
    if not 1 <= nmax <= 4:
        raise ContractViolation("nmax must be in 1..4")
    rep = Report(f"factorial-interval sets, n <= {nmax}")
    prev = {"X": Fraction(0), "XY": Fraction(0)}
    for n in range(1, nmax + 1):
        for label, N in ((f"(4*{n}+1)!", math.factorial(4 * n + 1)),
                         (f"(4*{n}+3)!", math.factorial(4 * n + 3))):
            cx, cy = count_X(N), count_Y(N)
            rep.rows.append({"checkpoint": label, "N": N,
                             "X": Fraction(cx, N), "Y": Fraction(cy, N),
                             "X∪Y": Fraction(cx + cy, N)})
        N = math.factorial(4 * n + 1)
        rx = Fraction(count_X(N), N)
        rxy = Fraction(count_X(N) + count_Y(N), N)
        rep.check(f"n={n}: interval count equals closed form at (4n+1)!",
                  count_X(N) == count_X_at_checkpoint(n)
                  and count_Y(N) == count_Y_at_checkpoint(n))
        rep.check(f"n={n}: ratios at (4n+1)! increase toward 1/2",
                  prev["X"] < rx < Fraction(1, 2) and prev["XY"] < rxy <= Fraction(1, 2),
                  f"X: {rx}")
        prev = {"X": rx, "XY": rxy}
    buck_vals = factorial_sets_buck(max_modulus)
    rep.values.update(buck_vals)
    rep.check("b*(X∪Y) = b*(X) + b*(Y)",
              buck_vals["buck_upper_XY"] == buck_vals["buck_upper_X"] + buck_vals["buck_upper_Y"])
    rep.check("b_*(X∪Y) = b_*(X) + b_*(Y)",
              buck_vals["buck_lower_XY"] == buck_vals["buck_lower_X"] + buck_vals["buck_lower_Y"])
    rep.check("upper asymptotic density not additive: d*(X∪Y) < d*(X) + d*(Y)",
              prev["XY"] < 2 * prev["X"] and prev["XY"] <= Fraction(1, 2))
    return rep


def buck_run_certificate(modulus: int) -> dict[str, int]:
    """Smallest ``j`` whose factorial intervals beat a given cover modulus.

    ``run`` is the first ``j`` with ``(4j+1)! - (4j)! >= 2 * modulus``: past the
    cover's threshold such a run contains every even class mod ``2*modulus``,
    so any progression cover of ``X`` has density at least 1/2. ``gap`` is the
    first ``j`` with ``(4j+2)! - (4j+1)! > modulus``: a progression of that
    modulus cannot sit inside ``X ∪ Y``.
    """
    run = next(j for j in range(1, 64)
               if math.factorial(4 * j + 1) - math.factorial(4 * j) >= 2 * modulus)
    gap = next(j for j in range(1, 64)
               if math.factorial(4 * j + 2) - math.factorial(4 * j + 1) > modulus)
    return {"run": run, "gap": gap}


def factorial_sets_buck(max_modulus: int = 64) -> dict[str, Fraction]:
    """Buck values of ``X``, ``Y``, ``X∪Y`` from covers of modulus ``<= max_modulus``.

    For each modulus ``m`` the smallest progression cover keeps exactly the
    classes met infinitely often. Runs past :func:`buck_run_certificate` meet
    every class of the right parity, and they recur for all larger ``j``, so
    the class sets below are exact. The lower values are 0 because recurring
    gaps longer than ``m`` exclude every progression of modulus ``m``.
    """
    upper = {"X": Fraction(1), "Y": Fraction(1), "XY": Fraction(1)}
    for m in range(1, max_modulus + 1):
        cert = buck_run_certificate(m)
        j = cert["run"]
        # one full run of X and one of Y, reduced mod m
        a, b = math.factorial(4 * j), math.factorial(4 * j + 1)
        c, d = math.factorial(4 * j + 2), math.factorial(4 * j + 3)
        hit_X = {x % m for x in range(a, a + 2 * m, 2)}
        hit_Y = {x % m for x in range(c + 1, c + 1 + 2 * m, 2)}
        if not (a + 2 * m <= b + 1 and c + 1 + 2 * m <= d + 1):
            raise ContractViolation(f"run certificate too short for modulus {m}")
        upper["X"] = min(upper["X"], Fraction(len(hit_X), m))
        upper["Y"] = min(upper["Y"], Fraction(len(hit_Y), m))
        upper["XY"] = min(upper["XY"], Fraction(len(hit_X | hit_Y), m))
    return {"buck_upper_X": upper["X"], "buck_upper_Y": upper["Y"],
            "buck_upper_XY": upper["XY"], "buck_lower_X": Fraction(0),
            "buck_lower_Y": Fraction(0), "buck_lower_XY": Fraction(0),
            "gap_certified_up_to_modulus": max_modulus}
