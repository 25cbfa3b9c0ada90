"""Sets with prescribed sumset densities, and the Buck-domain counterexample.

* :func:`construct_rational` / :func:`construct_irrational`: a set ``A`` with
  ``b(kA) = k*alpha/n`` for ``k = 1..n``.
* :func:`construct_translate`: ``A`` with ``b(A + B) = alpha`` for a finite ``B``.
* :func:`construct_basis`: ``A`` containing the sums of two squares, so that
  ``2A = N``, with ``b(A) = alpha``.
* :func:`counterexample_witness` / :func:`counterexample_sparsity`: evidence
  that ``2A`` is outside the Buck domain for ``A = {x^2 + y^2 : x, y in V}``,
  ``V = {n! + n}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np

from . import _bits
from .buck_density import (
    Stage,
    StagedSet,
    buck,
    buck_lower,
    buck_upper,
    modulus_cover_bound,
    staged_density_interval,
    two_squares_residues,
)
from .errors import ContractViolation, InternalConsistencyError
from .exact_arithmetic import IntervalReal, compare, crt_solve, exact_floor_scaled
from .expansion import DEFAULT_MODULUS_CAP, expand, partial_sum
from .periodic_sets import (
    EMPTY,
    NATURALS,
    EventuallyPeriodicSet,
    affine,
    finite,
    intersect,
    interval_progression,
    is_subset,
    k_fold_sumset,
    progression,
    sumset,
    union,
)
from .report import Report

Alpha = Fraction | IntervalReal

COVER_CHAIN = (4, 8, 72, 5544)


def construct_rational(a: int, b: int, n: int) -> EventuallyPeriodicSet:
    """``{0} ∪ (n*b*N + [1, a])``; its k-fold sumset has density ``k*a/(n*b)`` for ``k <= n``."""
    if b < 1 or n < 1 or a < 0:
        raise ContractViolation("need a >= 0, b >= 1, n >= 1")
    if a > b:
        raise ContractViolation(f"a = {a} exceeds b = {b}")
    return union(finite([0]), interval_progression(n * b, 1, a))


def construct_irrational(alpha: IntervalReal, n: int, depth: int,
                         modulus_cap: int = DEFAULT_MODULUS_CAP) -> StagedSet:
    """Staged ``A = X_1 ∪ X_2 ∪ ...`` for irrational ``alpha`` in (0, 1).

    With ``c_i = (n-1)! * beta_i``, ``Y_0 = N`` and

        X_i = Y_{i-1} ∩ (q_i N + [0, c_i - 1]),   Y_i = Y_{i-1} ∩ (q_i N + c_i),

    stage ``i`` is ``A_i = X_1 ∪ ... ∪ X_i`` inside ``B_i = A_i ∪ Y_i``.
    """
    exp = expand(alpha, n, depth, modulus_cap)
    if not exp.steps:
        raise ContractViolation(f"no stage fits under modulus cap {modulus_cap}: {exp.stopped}")
    small_fact = math.factorial(n - 1)
    X: list[EventuallyPeriodicSet] = []
    Y: list[EventuallyPeriodicSet] = [NATURALS]
    residues: list[tuple[int, int]] = []
    for s in exp.steps:
        c = small_fact * s.beta
        if not 0 < c < s.q:
            raise InternalConsistencyError(f"(n-1)! beta_{s.index} = {c} not in (0, q_{s.index})")
        X.append(intersect(Y[-1], interval_progression(s.q, 0, c - 1)))
        Y.append(intersect(Y[-1], progression(s.q, c)))
        residues.append((c, s.q))
        r, Q = crt_solve(residues)
        if Y[-1] != progression(Q, r):
            raise InternalConsistencyError(f"Y_{s.index} differs from its CRT form {Q}N+{r}")

    def stage_fn(i: int) -> Stage:
        A_i = reduce(union, X[:i], EMPTY)
        B_i = union(A_i, Y[i])
        # tail sum_{j >= i} n! beta_j / (q_1...q_j) = alpha - P_{i-1}
        P = partial_sum(exp.steps, i - 1)
        _, hi = alpha.enclosure_within(Fraction(1, 2 ** (i + 20)))
        error = (hi - P) + Fraction(2, 2**i)
        return Stage(A_i, B_i, error)

    return StagedSet(stage_fn, len(exp.steps), name=f"sumset-construction(n={n})",
                     info={"expansion": exp, "n": n, "alpha": alpha, "X": X, "Y": Y})


def construct_sumset_set(alpha: Alpha, n: int, depth: int = 5,
                         modulus_cap: int = DEFAULT_MODULUS_CAP):
    """Rational alpha gives an exact set, irrational alpha a :class:`StagedSet`."""
    if isinstance(alpha, IntervalReal):
        return construct_irrational(alpha, n, depth, modulus_cap)
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ContractViolation(f"alpha = {alpha} outside [0, 1]")
    return construct_rational(alpha.numerator, alpha.denominator, n)


def alpha_contains(alpha: Alpha, lo: Fraction, hi: Fraction) -> bool:
    """``lo <= alpha <= hi`` (decided by refinement for an :class:`IntervalReal`)."""
    if isinstance(alpha, IntervalReal):
        return compare(alpha, lo) > 0 and compare(alpha, hi) < 0
    return lo <= alpha <= hi


def staged_target_report(S: StagedSet, alpha: IntervalReal, n: int, k: int,
                         stages: int) -> Report:
    """Nested intervals ``[b(kA_i), b(kB_i)]`` around ``k*alpha/n``."""
    rep = Report(f"staged k-fold density, n={n}, k={k}")
    target = alpha.affine(Fraction(k, n))
    for i in range(1, stages + 1):
        try:
            lo, hi = staged_density_interval(S, i, k)
        except InternalConsistencyError as exc:
            rep.check(f"stage {i} sandwich", False, str(exc))
            break
        bound = S.stage(i).error
        rep.rows.append({"stage": i, "lo": lo, "hi": hi, "width": hi - lo, "bound": bound})
        rep.check(f"stage {i}: k*alpha/n in [lo, hi]", alpha_contains(target, lo, hi))
        rep.check(f"stage {i}: width <= certified bound", hi - lo <= bound,
                  f"{hi - lo} <= {bound}")
    return rep


# -- sumset bound -----------------------------------------------------------
@dataclass
class SumsetBoundInstance:
    n: int
    t: int
    q: int
    V: EventuallyPeriodicSet
    S: EventuallyPeriodicSet = field(init=False)

    def __post_init__(self):
        if min(self.n, self.t, self.q) < 1:
            raise ContractViolation("n, t, q must be positive")
        if self.n * self.t >= self.q:
            raise ContractViolation(f"need n*t < q, got {self.n}*{self.t} >= {self.q}")
        if self.V.is_empty:
            raise ContractViolation("V must be non-empty")
        if not is_subset(self.V, progression(self.q, self.t)):
            raise ContractViolation(f"V is not inside {self.q}N + {self.t}")
        self.S = union(interval_progression(self.q, 0, self.t - 1), self.V)


def verify_sumset_bound(inst: SumsetBoundInstance, k: int) -> Report:
    """``kt/q <= b_*(kS) <= b*(kS) = kt/q + b*(kV) <= (kt+1)/q``, all exact."""
    if not 1 <= k <= inst.n:
        raise ContractViolation(f"k = {k} outside 1..{inst.n}")
    kS = k_fold_sumset(inst.S, k)
    kV = k_fold_sumset(inst.V, k)
    return _sumset_bound_report(inst, k, kS, kV)


def _sumset_bound_report(inst, k, kS, kV) -> Report:
    q, t = inst.q, inst.t
    low, lower, upper, bv = Fraction(k * t, q), buck_lower(kS), buck_upper(kS), buck_upper(kV)
    rep = Report(f"sumset bound n={inst.n} t={t} q={q} k={k}")
    rep.values.update(lower=lower, upper=upper, kV=bv)
    rep.check("kt/q <= b_*(kS)", low <= lower, f"{low} <= {lower}")
    rep.check("b_*(kS) <= b*(kS)", lower <= upper)
    rep.check("b*(kS) = kt/q + b*(kV)", upper == low + bv, f"{upper} = {low} + {bv}")
    rep.check("b*(kS) <= (kt+1)/q", upper <= Fraction(k * t + 1, q))
    return rep


def verify_sumset_bound_all(inst: SumsetBoundInstance) -> Report:
    """The chain for every ``k = 1..n``, building ``kS`` incrementally."""
    rep = Report(f"sumset bound n={inst.n} t={inst.t} q={inst.q}")
    kS, kV = inst.S, inst.V
    for k in range(1, inst.n + 1):
        if k > 1:
            kS, kV = sumset(kS, inst.S), sumset(kV, inst.V)
        rep.extend(_sumset_bound_report(inst, k, kS, kV), prefix=f"k={k}: ")
    return rep


# -- translates ---------------------------------------------------------------
@dataclass
class TranslateInstance:
    alpha: Alpha
    B: tuple[int, ...]
    shift: int  # min B
    y: int  # max B - min B
    k: int | None
    h: int | None
    A: EventuallyPeriodicSet | StagedSet
    A_plus_B: EventuallyPeriodicSet | StagedSet
    C: EventuallyPeriodicSet | StagedSet | None = None
    report: Report = field(default_factory=lambda: Report("translate"))

    def density_interval(self, stage: int | None = None) -> tuple[Fraction, Fraction]:
        if isinstance(self.A_plus_B, StagedSet):
            return staged_density_interval(self.A_plus_B, stage or 1, 1)
        value = buck(self.A_plus_B)
        return value, value


def _choose_k_h(alpha: Alpha, y: int) -> tuple[int, int]:
    k = 1
    while True:
        if isinstance(alpha, IntervalReal):
            h = exact_floor_scaled(alpha, k)
            exact = False
        else:
            h = math.floor(k * alpha)
            exact = (k * alpha).denominator == 1
        if h >= 2 * y + 1 and not exact:
            return k, h
        k += 1


def construct_translate(alpha: Alpha, B, depth: int = 4) -> TranslateInstance:
    """``A`` with ``b(A + B) = alpha`` for a non-empty finite ``B ⊆ N``.

    After shifting ``B`` to start at 0 (``y = max B``), choose the smallest
    ``k`` with ``floor(k*alpha) >= 2y + 1`` and ``k*alpha`` not an integer,
    ``h = floor(k*alpha)``, take ``C`` with ``b(C) = k*alpha - h`` and set

        A = (k N + [0, h-y-1]) ∪ (k C + h - y),
        A + B = (k N + [0, h-1]) ∪ (k C + h)   (shifted back by min B).
    """
    B = sorted(set(B))
    if not B or B[0] < 0:
        raise ContractViolation("B must be a non-empty finite subset of N")
    shift, y = B[0], B[-1] - B[0]
    Bset = finite(B)
    if not isinstance(alpha, IntervalReal):
        alpha = Fraction(alpha)
        if not 0 <= alpha <= 1:
            raise ContractViolation(f"alpha = {alpha} outside [0, 1]")
    rep = Report("translate construction")

    if not isinstance(alpha, IntervalReal) and alpha in (0, 1):
        A = EMPTY if alpha == 0 else NATURALS
        AB = sumset(A, Bset)
        rep.check("b(A+B) = alpha", buck(AB) == alpha)
        return TranslateInstance(alpha, tuple(B), shift, y, None, None, A, AB, None, rep)

    if y == 0:
        C = construct_sumset_set(alpha, 1, depth)
        if isinstance(C, StagedSet):
            AB = C.map(lambda S: affine(S, 1, shift))
        else:
            AB = affine(C, 1, shift)
        return TranslateInstance(alpha, tuple(B), shift, y, 1, 0, C, AB, C, rep)

    k, h = _choose_k_h(alpha, y)
    if isinstance(alpha, IntervalReal):
        residual = alpha.affine(k, -h, name=f"({k}*{alpha.name}-{h})")
    else:
        residual = k * alpha - h
    C = construct_sumset_set(residual, 1, depth)
    base = interval_progression(k, 0, h - y - 1)
    target_base = interval_progression(k, 0, h - 1)

    def build_A(Cset):
        return union(base, affine(Cset, k, h - y)) if not Cset.is_empty else base

    def decomposition(Cset):
        return union(target_base, affine(Cset, k, h)) if not Cset.is_empty else target_base

    def A_plus_B(Cset):
        return sumset(build_A(Cset), Bset)

    def check_decomposition(Cset, label):
        lhs = A_plus_B(Cset)
        rhs = affine(decomposition(Cset), 1, shift)
        return rep.check(f"{label}: A+B = (kN+[0,h-1]) ∪ (kC+h) shifted by min B", lhs == rhs)

    if isinstance(C, StagedSet):
        A = C.map(build_A, name="translate A")
        AB = C.map(A_plus_B, error_scale=Fraction(1, k), name="translate A+B")
        for i in range(1, (C.max_stage or depth) + 1):
            st = C.stage(i)
            check_decomposition(st.inner, f"stage {i} inner")
            check_decomposition(st.outer, f"stage {i} outer")
    else:
        A = build_A(C)
        AB = A_plus_B(C)
        check_decomposition(C, "exact")
        rep.check("b(A+B) = alpha", buck(AB) == alpha, f"b(A+B) = {buck(AB)}")
    return TranslateInstance(alpha, tuple(B), shift, y, k, h, A, AB, C, rep)


# -- bases with 2A = N --------------------------------------------------------
def two_squares_sieve(N: int) -> np.ndarray:
    """Boolean array ``m`` with ``m[x] = (x is a sum of two squares)`` for ``0 <= x <= N``."""
    if N < 0:
        raise ContractViolation("N must be non-negative")
    out = np.zeros(N + 1, dtype=bool)
    squares = np.arange(math.isqrt(N) + 1, dtype=np.int64) ** 2
    for s in squares:
        rest = squares[squares <= N - s]
        out[s + rest] = True
    return out


def _mask_from_bool(arr: np.ndarray) -> int:
    return _bits.from_indices(np.flatnonzero(arr))


def construct_basis(alpha: Alpha, N: int = 10_000, stage: int = 4) -> Report:
    """``A = Q ∪ Y`` with ``Q`` the sums of two squares and ``b(Y) = alpha``."""
    rep = Report(f"basis with 2A = N, N = {N}")
    if isinstance(alpha, IntervalReal):
        Y_staged = construct_irrational(alpha, 1, stage)
        stage = min(stage, Y_staged.max_stage)
        Y = Y_staged.stage(stage).inner
        lo, hi = staged_density_interval(Y_staged, stage, 1)
        rep.values.update(density_lo=lo, density_hi=hi, stage=stage)
        rep.check("b(Y) interval contains alpha", alpha_contains(alpha, lo, hi))
    else:
        alpha = Fraction(alpha)
        if not 0 <= alpha <= 1:
            raise ContractViolation(f"alpha = {alpha} outside [0, 1]")
        Y = construct_rational(alpha.numerator, alpha.denominator, 1)
        rep.values.update(density=buck(Y))
        rep.check("b(Y) = alpha", buck(Y) == alpha)
    Q = two_squares_sieve(N)
    members = Q.copy()
    members[_bits.to_indices(Y.bitmap(N + 1))] = True
    A_mask = _mask_from_bool(members)
    rep.values["Y"] = Y
    rep.check("0 in A", bool(members[0]))
    small = np.flatnonzero(members[:101]).tolist()
    rep.check("gcd(A ∩ [0,100]) = 1", reduce(math.gcd, small, 0) == 1)
    rep.check("gcd(Q ∩ [0,100]) = 1",
              reduce(math.gcd, np.flatnonzero(Q[:101]).tolist(), 0) == 1)
    two_A = _bits.convolve(A_mask, A_mask, N + 1)
    rep.check(f"2A ⊇ [0,{N}]", two_A == _bits.low_mask(N + 1))
    Q_mask = _mask_from_bool(Q)
    rep.check(f"2Q ⊇ [0,{N}]", _bits.convolve(Q_mask, Q_mask, N + 1) == _bits.low_mask(N + 1))
    bounds = {}
    for m in COVER_CHAIN:
        bounds[m] = modulus_cover_bound(two_squares_residues, m)
        attained = two_squares_residues(m)
        rep.check(f"Q ∩ [0,{N}] inside {m}N + attained residues",
                  all(int(x) % m in attained for x in np.flatnonzero(Q)))
    rep.values["cover_bounds"] = {str(m): b for m, b in bounds.items()}
    rep.check("cover bounds non-increasing along divisibility chain",
              all(bounds[a] >= bounds[b] for a, b in zip(COVER_CHAIN, COVER_CHAIN[1:])))
    return rep


# -- the counterexample -------------------------------------------------------
def four_squares(h: int) -> tuple[int, int, int, int]:
    """Lexicographically smallest ``(y1, y2, y3, y4)`` with ``sum y_i^2 = h``."""
    if h < 0:
        raise ContractViolation("h must be non-negative")
    r = math.isqrt(h)
    for a in range(r + 1):
        ra = h - a * a
        for b in range(math.isqrt(ra) + 1):
            rb = ra - b * b
            for c in range(math.isqrt(rb) + 1):
                rc = rb - c * c
                d = math.isqrt(rc)
                if d * d == rc:
                    return a, b, c, d
    raise InternalConsistencyError(f"no four-square representation of {h}")  # pragma: no cover


def _factorial_mod(n: int, k: int) -> int:
    out = 1 % k
    for j in range(2, n + 1):
        out = out * j % k
        if out == 0:
            break
    return out


def counterexample_witness(k: int, h: int) -> Report:
    """An element of ``2A`` congruent to ``h`` mod ``k``, checked in Z/k only."""
    if k < 1 or not 0 <= h < k:
        raise ContractViolation(f"need k >= 1 and 0 <= h < k, got ({k}, {h})")
    rep = Report(f"witness k={k} h={h}")
    y = four_squares(h)
    ns = [(h + 1) * k + yi for yi in y]
    rep.values.update(y=list(y), n=ns)
    rep.check("sum y_i^2 = h", sum(v * v for v in y) == h)
    rep.check("n_i >= k", all(n >= k for n in ns))
    fact = [_factorial_mod(n, k) for n in ns]
    rep.check("n_i! = 0 mod k", all(f == 0 for f in fact))
    x_mod = [(f + n) % k for f, n in zip(fact, ns)]
    chain = [
        sum(x * x for x in x_mod) % k,
        sum(f * (f + 2 * n) + n * n for f, n in zip(fact, ns)) % k,
        sum(n * n for n in ns) % k,
        sum(v * v for v in y) % k,
    ]
    rep.values["congruence_chain"] = chain
    rep.check("sum x_i^2 = h mod k", all(c == h % k for c in chain), f"chain {chain}")
    return rep


def counterexample_sparsity(m: int) -> tuple[int, Fraction]:
    """``(|V ∩ [1, sqrt m]|^4, that bound / m)`` with ``V = {n! + n : n >= 0}``."""
    if m < 1:
        raise ContractViolation("m must be positive")
    root = math.isqrt(m)
    count, n = 0, 0
    while math.factorial(n) + n <= root:
        count += 1
        n += 1
    bound = count**4
    return bound, Fraction(bound, m)


def sparsity_display_sup(m: int) -> int:
    """``sup{n^4 : n! <= sqrt m}`` (the display form of the o(m) bound)."""
    root = math.isqrt(m)
    n = 0
    while math.factorial(n + 1) <= root:
        n += 1
    return n**4


def counterexample(kmax: int = 20, m: int = 10**12) -> Report:
    """Certificates that ``b*(2A) = 1`` while ``b_*(2A) = 0``."""
    rep = Report(f"counterexample kmax={kmax} m={m}")
    hit_all = True
    for k in range(1, kmax + 1):
        for h in range(k):
            w = counterexample_witness(k, h)
            hit_all &= w.passed
            if not w.passed:
                rep.extend(w, prefix=f"k={k} h={h}: ")
    rep.check(f"every class k*N+h, k <= {kmax}, meets 2A", hit_all)
    bound, ratio = counterexample_sparsity(m)
    rep.values.update(count_bound=bound, ratio_bound=ratio, sup_display=sparsity_display_sup(m))
    rep.check("|2A ∩ [1,m]| / m <= 10^-7", ratio <= Fraction(1, 10**7), f"{ratio}")
    # k*N + h with h <= m/2 puts at least floor(m / 2k) elements in [1, m]
    kfit = m // (2 * (bound + 1))
    rep.values["no_progression_below_modulus"] = kfit
    rep.check("no progression k*N+h (k <= kfit) fits in 2A", kfit >= kmax,
              f"any k <= {kfit} would exceed the count bound")
    rep.values["upper_buck_certificate"] = "1/1 (all residue classes met)"
    rep.values["lower_buck_certificate"] = "0/1 (counting bound excludes progressions)"
    return rep
