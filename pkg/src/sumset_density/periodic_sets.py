"""Eventually periodic subsets of N = {0, 1, 2, ...} and their exact algebra.

A set is stored as ``(modulus q, residues R, threshold T, exceptions E)``:
below ``T`` membership is read from ``E``, from ``T`` on it is ``n % q in R``.
``R`` and ``E`` are bitmasks. Every constructor returns the canonical form
(minimal period, then minimal threshold that is a multiple of it), so ``==``
on sets is equality of the underlying subsets of N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from . import _bits
from ._bits import low_mask, repeat
from .errors import ContractViolation, InternalConsistencyError

# brute-force cross-check of sumsets covers at least this prefix
SUMSET_VERIFY_LIMIT = 2048


def _divisors(q: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= q:
        if q % d == 0:
            small.append(d)
            if d * d != q:
                large.append(q // d)
        d += 1
    return small + large[::-1]


@dataclass(frozen=True)
class EventuallyPeriodicSet:
    modulus: int
    residue_mask: int
    threshold: int
    exception_mask: int

    # -- views ------------------------------------------------------------
    @property
    def residues(self) -> frozenset[int]:
        return frozenset(int(i) for i in _bits.to_indices(self.residue_mask))

    @property
    def exceptions(self) -> frozenset[int]:
        return frozenset(int(i) for i in _bits.to_indices(self.exception_mask))

    @property
    def is_empty(self) -> bool:
        return self.residue_mask == 0 and self.exception_mask == 0

    @property
    def is_finite(self) -> bool:
        return self.residue_mask == 0

    def __contains__(self, n: int) -> bool:
        return member(self, n)

    def __repr__(self) -> str:
        from .setgrammar import render

        return f"EventuallyPeriodicSet<{render(self)}>"

    def bitmap(self, limit: int) -> int:
        """Bitmask of the members in ``[0, limit)``."""
        if limit <= 0:
            return 0
        q, T = self.modulus, self.threshold
        head = self.exception_mask & low_mask(min(limit, T))
        if limit <= T or self.residue_mask == 0:
            return head
        tail = repeat(self.residue_mask, q, -(-limit // q)) & low_mask(limit) & ~low_mask(T)
        return head | tail

    def count_upto(self, n: int) -> int:
        """``|S ∩ [1, n]|`` in closed form."""
        if n < 1:
            return 0
        T, q = self.threshold, self.modulus
        head_end = min(n + 1, T)
        count = (self.exception_mask & low_mask(head_end) & ~1).bit_count()
        if n >= T and self.residue_mask:
            length = n + 1 - T  # members among T..n; T is a multiple of q
            full, part = divmod(length, q)
            count += full * self.residue_mask.bit_count()
            count += (self.residue_mask & low_mask(part)).bit_count()
            if T == 0 and self.residue_mask & 1:
                count -= 1  # 0 is not counted
        return count


def _canonical(q: int, rmask: int, T: int, emask: int) -> EventuallyPeriodicSet:
    rmask &= low_mask(q)
    emask &= low_mask(T)
    if rmask == 0:
        return EventuallyPeriodicSet(1, 0, emask.bit_length(), emask)
    period = q
    for d in _divisors(q):
        if d == q or repeat(rmask & low_mask(d), d, q // d) == rmask:
            period = d
            break
    pattern = rmask & low_mask(period)
    diff = emask ^ repeat(pattern, period, T // period)
    if diff == 0:
        return EventuallyPeriodicSet(period, pattern, 0, 0)
    top = diff.bit_length() - 1
    new_T = (top // period + 1) * period
    return EventuallyPeriodicSet(period, pattern, new_T, emask & low_mask(new_T))


def make(q: int, residues: Iterable[int], T: int = 0,
         exceptions: Iterable[int] = ()) -> EventuallyPeriodicSet:
    """Canonical set with tail ``{n >= T : n % q in residues}`` and ``exceptions`` below ``T``."""
    if q < 1:
        raise ContractViolation(f"modulus must be positive, got {q}")
    if T < 0 or T % q:
        raise ContractViolation(f"threshold {T} must be a non-negative multiple of {q}")
    residues, exceptions = list(residues), list(exceptions)
    bad = [r for r in residues if not 0 <= r < q]
    if bad:
        raise ContractViolation(f"residues {sorted(bad)} outside [0, {q - 1}]")
    bad = [e for e in exceptions if not 0 <= e < T]
    if bad:
        raise ContractViolation(f"exceptions {sorted(bad)} outside [0, {T - 1}]")
    return _canonical(q, _bits.from_indices(residues), T, _bits.from_indices(exceptions))


def from_masks(q: int, rmask: int, T: int, emask: int) -> EventuallyPeriodicSet:
    if q < 1 or T < 0 or T % q:
        raise ContractViolation(f"bad modulus/threshold ({q}, {T})")
    return _canonical(q, rmask, T, emask)


def finite(elements: Iterable[int]) -> EventuallyPeriodicSet:
    elements = list(elements)
    if any(e < 0 for e in elements):
        raise ContractViolation("sets live in N; negative element given")
    mask = _bits.from_indices(elements)
    return _canonical(1, 0, mask.bit_length(), mask)


EMPTY = EventuallyPeriodicSet(1, 0, 0, 0)
NATURALS = EventuallyPeriodicSet(1, 1, 0, 0)


def progression(k: int, h: int) -> EventuallyPeriodicSet:
    """The arithmetic progression ``k*N + h = {h, h+k, h+2k, ...}``."""
    return affine(NATURALS, k, h)


def interval_progression(q: int, lo: int, hi: int) -> EventuallyPeriodicSet:
    """``q*N + [lo, hi]`` (empty when ``hi < lo``)."""
    out = EMPTY
    if hi < lo:
        return out
    if lo >= 0 and hi < q:
        return _canonical(q, low_mask(hi + 1) & ~low_mask(lo), 0, 0)
    for h in range(lo, hi + 1):
        out = union(out, progression(q, h))
    return out


def member(S: EventuallyPeriodicSet, n: int) -> bool:
    if n < 0:
        return False
    if n < S.threshold:
        return bool(S.exception_mask >> n & 1)
    return bool(S.residue_mask >> (n % S.modulus) & 1)


def enumerate_members(S: EventuallyPeriodicSet, N: int) -> list[int]:
    """Sorted members ``<= N``."""
    return [int(i) for i in _bits.to_indices(S.bitmap(N + 1))]


# -- boolean algebra ------------------------------------------------------
def _combine(S1: EventuallyPeriodicSet, S2: EventuallyPeriodicSet, op) -> EventuallyPeriodicSet:
    L = math.lcm(S1.modulus, S2.modulus)
    T = -(-max(S1.threshold, S2.threshold) // L) * L
    r1 = repeat(S1.residue_mask, S1.modulus, L // S1.modulus)
    r2 = repeat(S2.residue_mask, S2.modulus, L // S2.modulus)
    rmask = op(r1, r2) & low_mask(L)
    emask = op(S1.bitmap(T), S2.bitmap(T)) & low_mask(T)
    return _canonical(L, rmask, T, emask)


def union(S1, S2):
    return _combine(S1, S2, lambda a, b: a | b)


def intersect(S1, S2):
    return _combine(S1, S2, lambda a, b: a & b)


def difference(S1, S2):
    return _combine(S1, S2, lambda a, b: a & ~b)


def complement(S: EventuallyPeriodicSet) -> EventuallyPeriodicSet:
    return _canonical(S.modulus, ~S.residue_mask, S.threshold, ~S.exception_mask)


def is_subset(S1, S2) -> bool:
    return difference(S1, S2).is_empty


def union_all(sets: Iterable[EventuallyPeriodicSet]) -> EventuallyPeriodicSet:
    out = EMPTY
    for S in sets:
        out = union(out, S)
    return out


def is_progression_union(S: EventuallyPeriodicSet) -> bool:
    """True when ``S`` is a finite union of progressions ``k*N + h``.

    Equivalently: every member lies in a tail residue class and the set is
    closed under ``n -> n + q``.
    """
    T, q = S.threshold, S.modulus
    pattern = repeat(S.residue_mask, q, T // q)
    if S.exception_mask & ~pattern:
        return False
    return ((S.exception_mask << q) & low_mask(T) & ~S.exception_mask) == 0


def affine(S: EventuallyPeriodicSet, k: int, h: int) -> EventuallyPeriodicSet:
    """The image ``k*S + h = {k*s + h : s in S}``."""
    if k < 1 or h < 0:
        raise ContractViolation(f"affine map needs k >= 1, h >= 0 (got {k}, {h})")
    if S.is_empty:
        return EMPTY
    q, T = S.modulus, S.threshold
    new_q = k * q
    new_T = -(-(k * T + h) // new_q) * new_q
    # members s with k*s + h < new_T
    src = _bits.to_indices(S.bitmap(-(-(new_T - h) // k) if new_T > h else 0))
    img = src * k + h
    emask = _bits.from_indices(img[img < new_T])
    res = (_bits.to_indices(S.residue_mask) * k + h) % new_q
    return _canonical(new_q, _bits.from_indices(res), new_T, emask)


# -- sumsets --------------------------------------------------------------
def _brute_sumset_prefix(S1, S2, limit: int) -> int:
    a = enumerate_members(S1, limit - 1)
    b = enumerate_members(S2, limit - 1)
    out = set()
    for x in a:
        for y in b:
            if x + y < limit:
                out.add(x + y)
            else:
                break
    return _bits.from_indices(out)


def sumset(S1: EventuallyPeriodicSet, S2: EventuallyPeriodicSet,
           verify_limit: int = SUMSET_VERIFY_LIMIT) -> EventuallyPeriodicSet:
    """Exact ``S1 + S2``.

    Past ``N0 = T1 + T2 + 2L`` (``L = lcm(q1, q2)``) membership of a sum depends
    only on its class mod ``L``: sums of an exception with a tail are complete
    from ``T1 + T2 + L`` on, and sums of two tails from ``T1 + T2 + 2L``. The
    result is read off the window ``[N0, N0 + L)``, which must repeat in
    ``[N0 + L, N0 + 2L)``; the prefix is cross-checked by brute force.
    """
    if S1.is_empty or S2.is_empty:
        return EMPTY
    if S1.is_finite and S2.is_finite:
        limit = S1.threshold + S2.threshold
        mask = _bits.convolve(S1.exception_mask, S2.exception_mask, limit)
        out = _canonical(1, 0, mask.bit_length(), mask)
        check_limit = min(limit, verify_limit)
        if _brute_sumset_prefix(S1, S2, check_limit) != mask & low_mask(check_limit):
            raise InternalConsistencyError("finite sumset disagrees with brute force")
        return out
    L = math.lcm(S1.modulus, S2.modulus)
    N0 = -(-(S1.threshold + S2.threshold + 2 * L) // L) * L
    limit = N0 + 2 * L
    conv = _bits.convolve(S1.bitmap(limit), S2.bitmap(limit), limit)
    window = (conv >> N0) & low_mask(L)
    if (conv >> (N0 + L)) & low_mask(L) != window:
        raise InternalConsistencyError(
            f"sumset tail not periodic past {N0} (moduli {S1.modulus}, {S2.modulus})"
        )
    out = _canonical(L, window, N0, conv & low_mask(N0))
    check_limit = min(limit, verify_limit)
    if _brute_sumset_prefix(S1, S2, check_limit) != conv & low_mask(check_limit):
        raise InternalConsistencyError("sumset disagrees with brute force on its prefix")
    return out


def k_fold_sumset(S: EventuallyPeriodicSet, k: int) -> EventuallyPeriodicSet:
    if k < 1:
        raise ContractViolation(f"k must be positive, got {k}")
    out = S
    for _ in range(k - 1):
        out = sumset(out, S)
    return out
