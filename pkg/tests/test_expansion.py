import math
from fractions import Fraction

import mpmath
import pytest

from oracles import alpha_mp, expansion_table
from sumset_density.errors import ContractViolation
from sumset_density.exact_arithmetic import IntervalReal, named_constants
from sumset_density.expansion import check_step_invariants, expand, find_q, partial_sum

GOLDEN = named_constants()["golden-conjugate"]

# (q_i, beta_i) from a 200-digit mpmath run of the same greedy rule, capped at 10^9
FROZEN_TABLES = {
    ("sqrt2-half", 1): [(2, 1), (3, 1), (5, 1), (7, 1), (11, 5), (13, 5), (17, 7), (19, 1)],
    ("sqrt2-half", 2): [(3, 1), (17, 1), (35, 1), (11, 1), (53, 1), (13, 1), (23, 8)],
    ("sqrt2-half", 3): [(17, 2), (290, 1), (167, 1), (73, 1)],
    ("golden-conjugate", 1): [(2, 1), (5, 1), (7, 1), (9, 2), (11, 3), (13, 12), (17, 11), (19, 11)],
    ("golden-conjugate", 2): [(7, 2), (9, 1), (5, 2), (13, 4), (17, 7), (11, 2), (23, 9), (19, 3)],
    ("golden-conjugate", 3): [(10, 1), (37, 1), (19, 2), (31, 4), (41, 1)],
    ("sqrt3-minus-1", 1): [(2, 1), (3, 1), (5, 1), (7, 6), (11, 8), (29, 1), (13, 1), (17, 1)],
    ("sqrt3-minus-1", 2): [(3, 1), (11, 1), (13, 1), (41, 1), (49, 1), (53, 1), (17, 1)],
    ("sqrt3-minus-1", 3): [(17, 2), (14, 1), (29, 1), (11, 1), (71, 9), (101, 1)],
}


@pytest.mark.parametrize("x, coprime_to, n, expected", [
    (GOLDEN, 1, 1, 2),
    (GOLDEN, 2, 2, 7),
    (IntervalReal.sqrt(2) - 1, 1, 1, 3),
])
def test_find_q_examples(x, coprime_to, n, expected):
    assert find_q(x, coprime_to, n) == expected


def test_first_steps_of_golden_conjugate():
    step = expand(GOLDEN, 1, 1).steps[0]
    assert (step.q, step.beta) == (2, 1)
    assert Fraction(23, 100) < step.alpha_enclosure[0] <= step.alpha_enclosure[1] < Fraction(24, 100)
    step = expand(GOLDEN, 2, 1).steps[0]
    assert (step.q, step.beta) == (7, 2)
    assert Fraction(32, 100) < step.alpha_enclosure[0] <= step.alpha_enclosure[1] < Fraction(33, 100)


def test_partial_sum_examples():
    assert partial_sum(expand(GOLDEN, 1, 3).steps, 1) == Fraction(1, 2)
    assert partial_sum(expand(GOLDEN, 2, 3).steps, 1) == Fraction(4, 7)
    assert partial_sum(expand(GOLDEN, 2, 3).steps, 0) == 0
    with pytest.raises(ContractViolation):
        partial_sum(expand(GOLDEN, 2, 2).steps, 3)


@pytest.mark.parametrize("name, n", sorted(FROZEN_TABLES))
def test_expansion_matches_frozen_table(name, n):
    exp = expand(named_constants()[name], n, 8)
    assert [(s.q, s.beta) for s in exp] == FROZEN_TABLES[name, n]
    if len(exp) < 8:
        assert "exceeds cap" in exp.stopped


def test_frozen_tables_reproduce_with_the_oracle():
    # one spot check keeps the frozen values honest
    assert expansion_table(alpha_mp("golden-conjugate"), 2, 8) == FROZEN_TABLES["golden-conjugate", 2]


@pytest.mark.parametrize("name, n", sorted(FROZEN_TABLES))
def test_partial_sums_converge_against_mpmath(name, n):
    exp = expand(named_constants()[name], n, 8)
    with mpmath.workdps(80):
        alpha = alpha_mp(name)
        for i in range(1, len(exp) + 1):
            P = partial_sum(exp.steps, i)
            gap = alpha - mpmath.mpf(P.numerator) / P.denominator
            assert 0 < gap < mpmath.mpf(2) ** (-i)


@pytest.mark.parametrize("name", ["sqrt2-half", "golden-conjugate", "sqrt3-minus-1"])
def test_step_invariants(name):
    exp = expand(named_constants()[name], 2, 8)
    results = check_step_invariants(exp)
    assert results and all(ok for _, ok, _ in results)
    for s in exp:
        assert s.q > math.factorial(2)


def test_modulus_cap_truncates():
    exp = expand(GOLDEN, 2, 8, modulus_cap=1000)
    assert [s.q for s in exp] == [7, 9, 5]
    assert "exceeds cap 1000" in exp.stopped


def test_rational_input_is_caught():
    half = IntervalReal(lambda j: (Fraction(1, 2), Fraction(1, 2)), name="1/2")
    with pytest.raises(ContractViolation):
        expand(half, 1, 3)


def test_alpha_outside_unit_interval():
    with pytest.raises(ContractViolation):
        expand(IntervalReal.sqrt(2), 1, 2)
