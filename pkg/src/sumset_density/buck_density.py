"""Upper and lower Buck density.

On eventually periodic sets both densities equal ``|R|/q``: the set differs
from the union of progressions ``q*N + r`` (``r`` in ``R``) by finitely many
elements, and finite sets have Buck density zero. Anything outside this class
is handled through sandwiches (:class:`StagedSet`) or modulus covers.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import ContractViolation, InternalConsistencyError
from .periodic_sets import (
    NATURALS,
    EventuallyPeriodicSet,
    affine,
    complement,
    intersect,
    is_progression_union,
    is_subset,
    k_fold_sumset,
    union,
)
from .report import Report


def buck_upper(S: EventuallyPeriodicSet) -> Fraction:
    return Fraction(S.residue_mask.bit_count(), S.modulus)


def buck_lower(S: EventuallyPeriodicSet) -> Fraction:
    # conjugate: 1 - b*(complement); equal to buck_upper on this class
    return 1 - buck_upper(complement(S))


def buck(S: EventuallyPeriodicSet) -> Fraction:
    upper, lower = buck_upper(S), buck_lower(S)
    if upper != lower:
        raise InternalConsistencyError(f"upper {upper} != lower {lower} on a periodic set")
    return upper


def check_axioms(S1: EventuallyPeriodicSet, S2: EventuallyPeriodicSet,
                 k: int, h: int) -> Report:
    """Instances of the upper-density axioms on the given sets."""
    rep = Report("upper density axioms")
    b1, b2 = buck_upper(S1), buck_upper(S2)
    rep.values.update(b1=b1, b2=b2)
    rep.check("F1 normalization", buck_upper(NATURALS) == 1 and b1 <= 1 and b2 <= 1,
              f"b(N) = {buck_upper(NATURALS)}")
    meet, join = intersect(S1, S2), union(S1, S2)
    rep.check("F2 monotone (S1∩S2 ⊆ S1 ⊆ S1∪S2)",
              buck_upper(meet) <= b1 <= buck_upper(join))
    if is_subset(S1, S2):
        rep.check("F2 monotone (S1 ⊆ S2)", b1 <= b2)
    bj = buck_upper(join)
    rep.check("F3 subadditive", bj <= b1 + b2, f"{bj} <= {b1} + {b2}", union=bj)
    image = affine(S1, k, h)
    bi = buck_upper(image)
    rep.check("F4 affine scaling", bi == b1 / k, f"b({k}*S1+{h}) = {bi}", image=bi)
    rep.check("conjugacy", buck_lower(S1) == 1 - buck_upper(complement(S1)))
    return rep


def additivity_disjoint(X: EventuallyPeriodicSet, Y: EventuallyPeriodicSet,
                        A: EventuallyPeriodicSet, B: EventuallyPeriodicSet
                        ) -> tuple[Fraction, Fraction]:
    """``(b*(X∪Y), b_*(X∪Y))`` for ``X ⊆ A``, ``Y ⊆ B`` with disjoint progression covers."""
    for name, cover in (("A", A), ("B", B)):
        if not is_progression_union(cover):
            raise ContractViolation(f"cover {name} is not a finite union of progressions")
    if not is_subset(X, A):
        raise ContractViolation("X is not contained in A")
    if not is_subset(Y, B):
        raise ContractViolation("Y is not contained in B")
    if not intersect(A, B).is_empty:
        raise ContractViolation("covers A and B are not disjoint")
    XY = union(X, Y)
    upper, lower = buck_upper(XY), buck_lower(XY)
    if upper != buck_upper(X) + buck_upper(Y) or lower != buck_lower(X) + buck_lower(Y):
        raise InternalConsistencyError("Buck density failed to split over disjoint covers")
    return upper, lower


def modulus_cover_bound(attained_residues: Callable[[int], set[int]], m: int) -> Fraction:
    """Upper bound ``|attained residues mod m| / m`` for a residue-determined set."""
    if m < 1:
        raise ContractViolation(f"modulus must be positive, got {m}")
    residues = {r % m for r in attained_residues(m)}
    return Fraction(len(residues), m)


def two_squares_residues(m: int) -> set[int]:
    """Residues mod ``m`` of ``x^2 + y^2``."""
    squares = {x * x % m for x in range(m)}
    return {(a + b) % m for a in squares for b in squares}


# -- staged sandwiches ----------------------------------------------------
@dataclass(frozen=True)
class Stage:
    inner: EventuallyPeriodicSet
    outer: EventuallyPeriodicSet
    error: Fraction


class StagedSet:
    """A set pinned between ``inner_i ⊆ S ⊆ outer_i`` for stages ``i = 1, 2, ...``.

    ``stage_fn(i)`` builds stage ``i``; results (and k-fold sumsets of them)
    are memoized.
    """

    def __init__(self, stage_fn: Callable[[int], Stage], max_stage: int | None = None,
                 name: str = "staged", info: dict | None = None):
        self._stage_fn = stage_fn
        self.max_stage = max_stage
        self.name = name
        self.info = info or {}
        self._stages: dict[int, Stage] = {}
        self._sums: dict[tuple[int, int], tuple[EventuallyPeriodicSet, EventuallyPeriodicSet]] = {}
        self._lock = threading.Lock()

    @classmethod
    def constant(cls, S: EventuallyPeriodicSet) -> StagedSet:
        return cls(lambda i: Stage(S, S, Fraction(0)), name="constant")

    def stage(self, i: int) -> Stage:
        if i < 1 or (self.max_stage is not None and i > self.max_stage):
            raise ContractViolation(f"stage {i} outside 1..{self.max_stage}")
        with self._lock:
            if i not in self._stages:
                self._stages[i] = self._stage_fn(i)
            return self._stages[i]

    def k_fold(self, i: int, k: int):
        with self._lock:
            cached = self._sums.get((i, k))
        if cached is None:
            st = self.stage(i)
            cached = (k_fold_sumset(st.inner, k), k_fold_sumset(st.outer, k))
            with self._lock:
                self._sums[(i, k)] = cached
        return cached

    def map(self, fn: Callable[[EventuallyPeriodicSet], EventuallyPeriodicSet],
            error_scale: Fraction = Fraction(1), name: str | None = None) -> StagedSet:
        """Apply a monotone set map to both sides of every stage."""
        parent = self

        def stage_fn(i):
            st = parent.stage(i)
            return Stage(fn(st.inner), fn(st.outer), st.error * error_scale)

        return StagedSet(stage_fn, self.max_stage, name or self.name, dict(self.info))


def verify_stage_containment(S: StagedSet, i: int) -> None:
    st = S.stage(i)
    if not is_subset(st.inner, st.outer):
        raise InternalConsistencyError(f"stage {i}: inner not contained in outer")
    if i > 1:
        prev = S.stage(i - 1)
        if not is_subset(prev.inner, st.inner):
            raise InternalConsistencyError(f"stage {i}: inner does not contain previous inner")
        if not is_subset(st.outer, prev.outer):
            raise InternalConsistencyError(f"stage {i}: outer not inside previous outer")


def staged_density_interval(S: StagedSet, i: int, k: int = 1) -> tuple[Fraction, Fraction]:
    """``[b(k*inner_i), b(k*outer_i)]``, which contains ``b_*(kS)`` and ``b*(kS)``."""
    if i < 1:
        raise ContractViolation("stages start at 1")
    verify_stage_containment(S, i)
    inner, outer = S.k_fold(i, k)
    lo, hi = buck(inner), buck(outer)
    if lo > hi:
        raise InternalConsistencyError(f"stage {i}: interval [{lo}, {hi}] reversed")
    if hi - lo > S.stage(i).error:
        raise InternalConsistencyError(
            f"stage {i}: width {hi - lo} exceeds certified error {S.stage(i).error}"
        )
    if i > 1:
        plo, phi = staged_density_interval(S, i - 1, k)
        if not (plo <= lo and hi <= phi):
            raise InternalConsistencyError(f"stage {i}: interval not nested in stage {i - 1}")
    return lo, hi
