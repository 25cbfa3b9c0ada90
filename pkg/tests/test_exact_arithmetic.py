import itertools
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from sumset_density.errors import ContractViolation, UndecidableAtPrecision
from sumset_density.exact_arithmetic import (
    IntervalReal,
    compare,
    crt_solve,
    decimal_approx,
    exact_floor_scaled,
    factorial,
    format_rational,
    named_constants,
    parse_alpha,
    parse_rational,
    strictly_between,
)


@pytest.mark.parametrize("congruences, expected", [
    ([(1, 3), (2, 5)], (7, 15)),
    ([(0, 1)], (0, 1)),
    ([(2, 4), (1, 3), (4, 5)], (34, 60)),
])
def test_crt_examples(congruences, expected):
    assert crt_solve(congruences) == expected


def test_crt_non_coprime_names_the_pair():
    with pytest.raises(ContractViolation, match="4.*6|6.*4"):
        crt_solve([(1, 4), (3, 6)])


@given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 13, 4, 9, 25]), min_size=1, max_size=4, unique=True),
       st.data())
def test_crt_matches_brute_force(moduli, data):
    moduli = [m for m in moduli if all(math.gcd(m, o) == 1 for o in moduli if o != m)]
    if not moduli:
        return
    congruences = [(data.draw(st.integers(0, m - 1)), m) for m in moduli]
    M = math.prod(moduli)
    brute = next(x for x in range(M) if all(x % m == r for r, m in congruences))
    assert crt_solve(congruences) == (brute, M)


@pytest.mark.parametrize("n, expected", [(0, 1), (4, 24), (10, 3628800)])
def test_factorial(n, expected):
    assert factorial(n) == expected


def test_rational_text():
    assert format_rational(Fraction(3)) == "3/1"
    assert format_rational(Fraction(-2, 4)) == "-1/2"
    assert parse_rational(" 6/8 ") == Fraction(3, 4)
    with pytest.raises(ContractViolation):
        parse_rational("0.25")
    with pytest.raises(ContractViolation):
        parse_rational("1/0")


def test_decimal_approx_rounds_half_up():
    assert decimal_approx(Fraction(1, 3), 4) == "0.3333"
    assert decimal_approx(Fraction(2, 3), 4) == "0.6667"
    assert decimal_approx(Fraction(-1, 8), 2) == "-0.13"


@pytest.mark.parametrize("value, scale, expected", [
    (Fraction(1, 2), 10, 7),
    (Fraction(1, 2), 1, 0),
    (5, 4, 8),
])
def test_exact_floor_scaled(value, scale, expected):
    assert exact_floor_scaled(IntervalReal.sqrt(value), scale) == expected


def test_enclosures_nest_and_shrink():
    x = IntervalReal.golden_conjugate()
    prev = x.enclosure(0)
    for level in range(1, 40):
        lo, hi = x.enclosure(level)
        assert prev[0] <= lo <= hi <= prev[1]
        prev = (lo, hi)
    assert prev[1] - prev[0] < Fraction(1, 2**30)


@pytest.mark.parametrize("name, reference", [
    ("sqrt2-half", lambda: mpmath.sqrt(2) / 2),
    ("golden-conjugate", lambda: (mpmath.sqrt(5) - 1) / 2),
    ("sqrt3-minus-1", lambda: mpmath.sqrt(3) - 1),
])
def test_named_constants_against_mpmath(name, reference):
    with mpmath.workdps(60):
        ref = reference()
        lo, hi = named_constants()[name].enclosure_within(Fraction(1, 2**100))
        assert mpmath.mpf(lo.numerator) / lo.denominator <= ref <= mpmath.mpf(hi.numerator) / hi.denominator


def test_sqrt_of_rational_square_is_refused():
    with pytest.raises(ContractViolation):
        IntervalReal.sqrt(Fraction(9, 4))


def test_digit_stream_on_a_boundary_is_undecidable():
    # 0.4999... equals 1/2, so floor(2x) can never be decided from enclosures
    x = IntervalReal.from_digits(itertools.chain([4], itertools.repeat(9)))
    with pytest.raises(UndecidableAtPrecision):
        exact_floor_scaled(x, 2, budget=200)


def test_digit_stream_away_from_boundaries():
    x = IntervalReal.from_digits(itertools.cycle([1, 4, 1, 5, 9, 2, 6]))
    assert exact_floor_scaled(x, 100) == 14


def test_strictly_between_and_compare():
    x = IntervalReal.sqrt(2)
    lo, hi = strictly_between(x, Fraction(1), Fraction(3, 2))
    assert 1 < lo and hi < Fraction(3, 2)
    with pytest.raises(ContractViolation):
        strictly_between(x, Fraction(3, 2), Fraction(2))
    assert compare(x, Fraction(7, 5)) == 1
    assert compare(x, Fraction(17, 12)) == -1


def test_arithmetic_on_enclosures():
    x = IntervalReal.sqrt(2)
    y = (x * 3 - 1) / 2 + x
    with mpmath.workdps(50):
        ref = (3 * mpmath.sqrt(2) - 1) / 2 + mpmath.sqrt(2)
        lo, hi = y.enclosure_within(Fraction(1, 10**30))
        assert mpmath.mpf(lo.numerator) / lo.denominator <= ref <= mpmath.mpf(hi.numerator) / hi.denominator
    assert exact_floor_scaled(-x + 2, 10) == 5


def test_parse_alpha():
    assert parse_alpha("2/6") == Fraction(1, 3)
    assert isinstance(parse_alpha("sqrt:2/9"), IntervalReal)
    assert parse_alpha("golden-conjugate").name == "golden-conjugate"
    with pytest.raises(ContractViolation):
        parse_alpha("0.618")


def test_parse_alpha_digit_file(tmp_path):
    path = tmp_path / "pi.txt"
    path.write_text("3.14159265358979\n")
    x = parse_alpha(f"digits:{path}")
    assert exact_floor_scaled(x, 1000) == 3141


def test_concurrent_refinement_is_consistent():
    from concurrent.futures import ThreadPoolExecutor

    x = IntervalReal.golden_conjugate()
    levels = list(range(200, 0, -7)) * 4
    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(x.enclosure, levels))
    assert all(results[i] == x.enclosure(level) for i, level in enumerate(levels))
