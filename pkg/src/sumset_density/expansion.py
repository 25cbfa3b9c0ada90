"""Positional expansion ``alpha = sum_i n! * beta_i / (q_1 ... q_i)`` of an irrational.

Each step picks the smallest ``q_i`` coprime to ``n * q_1 ... q_{i-1}`` for
which ``floor(q_i * alpha_{i-1})`` is a positive multiple of ``n!``, sets
``beta_i = floor(q_i * alpha_{i-1} / n!)`` and continues with the remainder
``alpha_i = q_i * alpha_{i-1} - n! * beta_i``, which again lies in (0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ContractViolation, InternalConsistencyError, UndecidableAtPrecision
from .exact_arithmetic import (
    DEFAULT_REFINEMENT_BUDGET,
    IntervalReal,
    exact_floor_scaled,
    strictly_between,
)

DEFAULT_MODULUS_CAP = 10**9
DEFAULT_SEARCH_LIMIT = 10**6
# width of the alpha_i enclosure stored on each step
ENCLOSURE_WIDTH = Fraction(1, 2**40)


@dataclass(frozen=True)
class ExpansionStep:
    index: int
    q: int
    beta: int
    n: int
    alpha_enclosure: tuple[Fraction, Fraction]
    alpha_real: IntervalReal = field(repr=False, compare=False)


@dataclass
class Expansion:
    alpha: IntervalReal
    n: int
    requested_depth: int
    steps: list[ExpansionStep]
    stopped: str | None = None  # reason when fewer steps than requested

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    def moduli_product(self, i: int) -> int:
        return math.prod(s.q for s in self.steps[:i])


def find_q(x: IntervalReal, coprime_to: int, n: int,
           search_limit: int = DEFAULT_SEARCH_LIMIT,
           budget: int = DEFAULT_REFINEMENT_BUDGET) -> int:
    """Smallest ``q`` with ``gcd(q, coprime_to) = 1`` and ``floor(q*x)`` in ``n! * N+``."""
    nfact = math.factorial(n)
    for q in range(1, search_limit + 1):
        if math.gcd(q, coprime_to) != 1:
            continue
        f = exact_floor_scaled(x, q, budget)
        if f > 0 and f % nfact == 0:
            return q
    raise UndecidableAtPrecision(
        f"no admissible q <= {search_limit} for {x.name} (is it rational?)"
    )


def _enclosures_meet(x: IntervalReal, y: IntervalReal, level: int) -> bool:
    a, b = x.enclosure(level)
    c, d = y.enclosure(level)
    return max(a, c) <= min(b, d)


def expand(alpha: IntervalReal, n: int, depth: int,
           modulus_cap: int = DEFAULT_MODULUS_CAP,
           budget: int = DEFAULT_REFINEMENT_BUDGET) -> Expansion:
    if n < 1 or depth < 1:
        raise ContractViolation("n and depth must be positive")
    strictly_between(alpha, Fraction(0), Fraction(1), budget)
    nfact = math.factorial(n)
    steps: list[ExpansionStep] = []
    current = alpha
    coprime_to = n
    Q = 1
    partial = Fraction(0)
    stopped = None
    for i in range(1, depth + 1):
        q = find_q(current, coprime_to, n, budget=budget)
        if Q * q > modulus_cap:
            stopped = f"stage budget reached: q_1...q_{i} = {Q * q} exceeds cap {modulus_cap}"
            break
        f = exact_floor_scaled(current, q, budget)
        beta = f // nfact
        Q *= q
        partial += Fraction(nfact * beta, Q)
        recursive = current.affine(q, -nfact * beta, name=f"alpha_{i}")
        from_scratch = alpha.affine(Q, -Q * partial, name=f"alpha_{i}'")
        strictly_between(recursive, Fraction(0), Fraction(1), budget)
        enclosure = recursive.enclosure_within(ENCLOSURE_WIDTH, budget)
        level = next(j for j in range(budget + 1) if recursive.enclosure(j) == enclosure)
        if not _enclosures_meet(recursive, from_scratch, level):
            raise InternalConsistencyError(f"alpha_{i}: recursive and direct enclosures disagree")
        steps.append(ExpansionStep(i, q, beta, n, enclosure, recursive))
        coprime_to *= q
        current = recursive
    return Expansion(alpha, n, depth, steps, stopped)


def partial_sum(steps, i: int) -> Fraction:
    """``sum_{j <= i} n! beta_j / (q_1 ... q_j)``."""
    steps = list(steps)
    if not 0 <= i <= len(steps):
        raise ContractViolation(f"i = {i} outside 0..{len(steps)}")
    total, Q = Fraction(0), 1
    for s in steps[:i]:
        Q *= s.q
        total += Fraction(math.factorial(s.n) * s.beta, Q)
    return total


def check_step_invariants(exp: Expansion, budget: int = DEFAULT_REFINEMENT_BUDGET):
    """List of ``(name, passed, detail)`` for every step of an expansion."""
    results = []
    n = exp.n
    nfact = math.factorial(n)
    prefix = n
    prev = exp.alpha
    for s in exp.steps:
        i = s.index
        results.append((f"step {i}: gcd(q_i, n q_0...q_(i-1)) = 1",
                        math.gcd(s.q, prefix) == 1, f"q={s.q}, prefix={prefix}"))
        f = exact_floor_scaled(prev, s.q, budget)
        results.append((f"step {i}: floor(q_i alpha_(i-1)) in n! N+",
                        f > 0 and f % nfact == 0 and f == nfact * s.beta, f"floor={f}"))
        # q_i alpha_{i-1} - 1 < n! beta_i < q_i alpha_{i-1}, decided on enclosures
        lo, hi = strictly_between(prev.affine(s.q), Fraction(nfact * s.beta),
                                  Fraction(nfact * s.beta + 1), budget)
        results.append((f"step {i}: q_i alpha_(i-1) - 1 < n! beta_i < q_i alpha_(i-1)", True,
                        f"q_i alpha in ({lo}, {hi})"))
        a_lo, a_hi = s.alpha_enclosure
        results.append((f"step {i}: alpha_i in (0,1)", 0 < a_lo and a_hi < 1, ""))
        results.append((f"step {i}: q_i >= 2 and q_i > n!", s.q >= 2 and s.q > nfact, ""))
        P = partial_sum(exp.steps, i)
        try:
            lo, hi = strictly_between(exp.alpha - P, Fraction(0), Fraction(1, 2**i), budget)
            ok, detail = True, f"alpha - P_i in ({lo}, {hi})"
        except ContractViolation as exc:
            ok, detail = False, str(exc)
        results.append((f"step {i}: 0 < alpha - partial_sum < 2^-i", ok, detail))
        prefix *= s.q
        prev = s.alpha_real
    return results
