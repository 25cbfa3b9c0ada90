"""Exact integers, rationals, CRT and refinable real enclosures.

Every density in the package is a :class:`fractions.Fraction`. Irrational
inputs are modelled by :class:`IntervalReal`, a lazily refined sequence of
nested rational intervals.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Iterator, Sequence

from .errors import ContractViolation, UndecidableAtPrecision

Rational = Fraction

DEFAULT_REFINEMENT_BUDGET = 4096

__all__ = [
    "Rational",
    "IntervalReal",
    "crt_solve",
    "exact_floor_scaled",
    "factorial",
    "format_rational",
    "parse_rational",
    "decimal_approx",
]


def format_rational(x: Fraction | int) -> str:
    """Render ``x`` as ``"p/q"`` in lowest terms (``q`` is always printed)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ContractViolation(f"decimal input {text!r} is not accepted; write p/q")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ContractViolation(f"not a rational: {text!r}") from exc


def decimal_approx(x: Fraction, digits: int = 12) -> str:
    """Decimal string of ``x`` rounded half-up to ``digits`` places (exact arithmetic)."""
    sign = "-" if x < 0 else ""
    x = abs(Fraction(x))
    scaled = (x.numerator * 10**digits * 2 + x.denominator) // (2 * x.denominator)
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def factorial(n: int) -> int:
    if n < 0:
        raise ContractViolation(f"factorial of negative integer {n}")
    return math.factorial(n)


def crt_solve(congruences: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """Solve ``x = r_i (mod m_i)`` for pairwise coprime moduli.

    Returns ``(r, M)`` with ``M`` the product of the moduli and ``0 <= r < M``.
    """
    for (r1, m1), (r2, m2) in combinations(congruences, 2):
        if math.gcd(m1, m2) != 1:
            raise ContractViolation(
                f"moduli {m1} and {m2} are not coprime (gcd {math.gcd(m1, m2)})"
            )
    r, M = 0, 1
    for residue, modulus in congruences:
        if modulus < 1:
            raise ContractViolation(f"modulus must be positive, got {modulus}")
        if not 0 <= residue < modulus:
            raise ContractViolation(f"residue {residue} not reduced mod {modulus}")
        # r + M*t = residue (mod modulus)
        t = ((residue - r) * pow(M, -1, modulus)) % modulus if modulus > 1 else 0
        r += M * t
        M *= modulus
    return r % M, M


class IntervalReal:
    """A real number given by nested rational enclosures ``[lo_j, hi_j]``.

    ``bounds(j)`` must return an enclosure whose width tends to zero as ``j``
    grows; successive levels are intersected so the stored enclosures are
    nested even if ``bounds`` is slightly sloppy. Enclosures are memoized; the
    cache only ever grows, guarded by a lock, so concurrent readers are safe.
    """

    def __init__(self, bounds: Callable[[int], tuple[Fraction, Fraction]], name: str = "x"):
        self._bounds = bounds
        self._cache: list[tuple[Fraction, Fraction]] = []
        self._lock = threading.Lock()
        self.name = name

    def __repr__(self) -> str:
        lo, hi = self.enclosure(8)
        return f"IntervalReal({self.name}, [{decimal_approx(lo)}, {decimal_approx(hi)}])"

    def enclosure(self, level: int) -> tuple[Fraction, Fraction]:
        if level < 0:
            raise ContractViolation("refinement level must be non-negative")
        cache = self._cache
        if level < len(cache):
            return cache[level]
        with self._lock:
            while len(cache) <= level:
                lo, hi = self._bounds(len(cache))
                lo, hi = Fraction(lo), Fraction(hi)
                if cache:
                    plo, phi = cache[-1]
                    lo, hi = max(lo, plo), min(hi, phi)
                if lo > hi:
                    raise ContractViolation(f"{self.name}: empty enclosure at level {len(cache)}")
                cache.append((lo, hi))
            return cache[level]

    def enclosures(self) -> Iterator[tuple[Fraction, Fraction]]:
        level = 0
        while True:
            yield self.enclosure(level)
            level += 1

    def enclosure_within(self, width: Fraction, budget: int = DEFAULT_REFINEMENT_BUDGET):
        """First enclosure of width at most ``width``."""
        for level in range(budget + 1):
            lo, hi = self.enclosure(level)
            if hi - lo <= width:
                return lo, hi
        raise UndecidableAtPrecision(f"{self.name}: width {width} not reached")

    # -- constructors ---------------------------------------------------
    @classmethod
    def sqrt(cls, value: Fraction | int | str) -> IntervalReal:
        """Square root of a non-negative rational that is not a rational square."""
        value = Fraction(value)
        if value < 0:
            raise ContractViolation("square root of a negative rational")
        p, q = value.numerator, value.denominator
        # sqrt(p/q) = sqrt(p*q)/q
        pq = p * q
        if math.isqrt(pq) ** 2 == pq:
            raise ContractViolation(f"sqrt({value}) is rational")

        def bounds(j: int) -> tuple[Fraction, Fraction]:
            s = math.isqrt(pq << (2 * j))
            den = q << j
            return Fraction(s, den), Fraction(s + 1, den)

        return cls(bounds, name=f"sqrt({value})")

    @classmethod
    def from_digits(cls, digits: Iterable[int], base: int = 10, integer_part: int = 0,
                    name: str = "digits") -> IntervalReal:
        """Number ``integer_part + 0.d1 d2 d3 ...`` in ``base`` from a digit stream.

        The stream may be infinite; it is consumed on demand. A finite stream
        is padded with zeros, giving a rational, which the floor routines will
        report as undecidable if it ever sits on an integer boundary.
        """
        if base < 2:
            raise ContractViolation("base must be at least 2")
        it = iter(digits)
        prefix = [Fraction(integer_part)]
        lock = threading.Lock()

        def bounds(j: int) -> tuple[Fraction, Fraction]:
            with lock:
                while len(prefix) <= j:
                    d = next(it, 0)
                    if not 0 <= d < base:
                        raise ContractViolation(f"digit {d} out of range for base {base}")
                    prefix.append(prefix[-1] + Fraction(d, base ** len(prefix)))
                value = prefix[j]
            return value, value + Fraction(1, base**j)

        return cls(bounds, name=name)

    @classmethod
    def golden_conjugate(cls) -> IntervalReal:
        """(sqrt(5) - 1) / 2 = 0.6180..."""
        x = (cls.sqrt(5) - 1) / 2
        x.name = "golden-conjugate"
        return x

    # -- exact rational affine arithmetic -------------------------------
    def affine(self, scale: Fraction | int, shift: Fraction | int = 0,
               name: str | None = None) -> IntervalReal:
        """The number ``scale * self + shift``."""
        scale, shift = Fraction(scale), Fraction(shift)
        parent = self

        def bounds(j: int) -> tuple[Fraction, Fraction]:
            lo, hi = parent.enclosure(j)
            a, b = scale * lo + shift, scale * hi + shift
            return (a, b) if a <= b else (b, a)

        return IntervalReal(bounds, name or f"({scale}*{self.name}+{shift})")

    def __add__(self, other):
        if isinstance(other, IntervalReal):
            left, right = self, other

            def bounds(j: int):
                a, b = left.enclosure(j)
                c, d = right.enclosure(j)
                return a + c, b + d

            return IntervalReal(bounds, f"({self.name}+{other.name})")
        if isinstance(other, (int, Fraction)):
            return self.affine(1, other, f"({self.name}+{other})")
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self.affine(-1, 0, f"-{self.name}")

    def __sub__(self, other):
        if isinstance(other, (IntervalReal, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.affine(other, 0, f"{other}*{self.name}")
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.affine(Fraction(1) / Fraction(other), 0, f"{self.name}/{other}")
        return NotImplemented


def exact_floor_scaled(x: IntervalReal, scale: int,
                       budget: int = DEFAULT_REFINEMENT_BUDGET) -> int:
    """``floor(scale * x)``, refining until the enclosure clears every integer."""
    if scale < 1:
        raise ContractViolation(f"scale must be positive, got {scale}")
    for level in range(budget + 1):
        lo, hi = x.enclosure(level)
        f = math.floor(scale * lo)
        if scale * hi < f + 1:
            return f
    raise UndecidableAtPrecision(
        f"floor({scale}*{x.name}) undecidable after {budget} refinements"
    )


def strictly_between(x: IntervalReal, low: Fraction, high: Fraction,
                     budget: int = DEFAULT_REFINEMENT_BUDGET) -> tuple[Fraction, Fraction]:
    """Refine until ``low < lo`` and ``hi < high``; return that enclosure.

    Raises :class:`UndecidableAtPrecision` if the budget runs out and
    :class:`ContractViolation` once the enclosure is provably outside.
    """
    for level in range(budget + 1):
        lo, hi = x.enclosure(level)
        if low < lo and hi < high:
            return lo, hi
        if hi <= low or lo >= high:
            raise ContractViolation(f"{x.name} lies outside ({low}, {high})")
    raise UndecidableAtPrecision(f"{x.name} not separated from ({low}, {high})")


def compare(x: IntervalReal, r: Fraction, budget: int = DEFAULT_REFINEMENT_BUDGET) -> int:
    """Sign of ``x - r`` (never 0; equality is undecidable)."""
    for level in range(budget + 1):
        lo, hi = x.enclosure(level)
        if lo > r:
            return 1
        if hi < r:
            return -1
    raise UndecidableAtPrecision(f"cannot compare {x.name} with {r}")


def named_constants() -> dict[str, IntervalReal]:
    """Irrationals accepted by name wherever an ``alpha`` is expected."""
    sqrt2_half = IntervalReal.sqrt(Fraction(1, 2))
    sqrt2_half.name = "sqrt2-half"
    sqrt3_minus_1 = IntervalReal.sqrt(3) - 1
    sqrt3_minus_1.name = "sqrt3-minus-1"
    return {
        "sqrt2-half": sqrt2_half,
        "golden-conjugate": IntervalReal.golden_conjugate(),
        "sqrt3-minus-1": sqrt3_minus_1,
    }


def _digit_file(path: str) -> IntervalReal:
    with open(path, encoding="ascii") as fh:
        text = "".join(fh.read().split())
    whole, _, frac = text.partition(".")
    if not (whole or "0").isdigit() or not frac.isdigit():
        raise ContractViolation(f"{path}: expected digits like 0.141592...")
    return IntervalReal.from_digits((int(d) for d in frac), 10, int(whole or 0),
                                    name=f"digits:{path}")


def parse_alpha(text: str) -> Fraction | IntervalReal:
    """``p/q``, a named constant, ``sqrt:P/Q`` or ``digits:FILE``. Decimals are refused."""
    text = text.strip()
    named = named_constants()
    if text in named:
        return named[text]
    if text.startswith("sqrt:"):
        x = IntervalReal.sqrt(parse_rational(text[5:]))
        x.name = text
        return x
    if text.startswith("digits:"):
        return _digit_file(text[7:])
    return parse_rational(text)
