import pytest
from hypothesis import given, strategies as st

from expq.numtheory import (
    Progression,
    Single,
    Unsat,
    ceil_log2_ratio,
    floor_log2_ratio,
    lam,
    log2_exact,
    solve_pow_congruence,
    totient,
)

import oracles


def test_lambda_values():
    assert lam(0) == 0
    assert lam(1) == 1
    assert oracles.lam_brute(12) == 8
    assert lam(12) == 8
    assert lam(-12) == 8


@given(st.integers(-(2**80), 2**80))
def test_lambda_matches_brute(n):
    assert lam(n) == oracles.lam_brute(n)


@given(st.integers(-(2**200), 2**200).filter(bool))
def test_lambda_sandwich(n):
    assert lam(n) <= abs(n) < 2 * lam(n)


def test_log_ratio_values():
    assert ceil_log2_ratio(8, 1) == 3
    assert oracles.ceil_log2_brute(8, 3) == 2
    assert oracles.floor_log2_brute(8, 3) == 1
    assert ceil_log2_ratio(8, 3) == 2
    assert floor_log2_ratio(8, 3) == 1
    assert floor_log2_ratio(1, 1) == 0


@given(st.integers(1, 2**40), st.integers(1, 2**40))
def test_log_ratio_match_rationals(b, a):
    assert ceil_log2_ratio(b, a) == oracles.ceil_log2_brute(b, a)
    assert floor_log2_ratio(b, a) == oracles.floor_log2_brute(b, a)


def test_log_ratio_huge_operands():
    b = 3 ** 500
    a = 7 ** 100
    k = ceil_log2_ratio(b, a)
    assert a * 2 ** k >= b > a * 2 ** (k - 1)
    j = floor_log2_ratio(b, a)
    assert a * 2 ** j <= b < a * 2 ** (j + 1)


def test_log2_exact():
    assert log2_exact(1024) == 10
    with pytest.raises(ValueError):
        log2_exact(12)


def test_congruence_examples():
    assert solve_pow_congruence(20, 2) == Single(1)
    assert solve_pow_congruence(6, 3) == Unsat()
    # 2^x mod 7 cycles 1, 2, 4
    assert [x for x in range(30) if (2**x - 2) % 7 == 0][:3] == [1, 4, 7]
    assert solve_pow_congruence(7, 2) == Progression(1, 3)


def test_congruence_trivial_modulus():
    assert solve_pow_congruence(1, 0) == Progression(0, 1)


def test_congruence_brute_force_small():
    assert oracles.congruence_disagreements(40) == []


def test_period_divides_totient_of_odd_part():
    assert oracles.period_divides_totient_failures(128) == []


def test_totient_values():
    assert [totient(n) for n in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]


def test_lam_multiple_below_power_failures():
    assert oracles.lam_multiple_below_power_failures() == []


def test_pow_congruence_progression_failures():
    assert oracles.pow_congruence_progression_failures(32) == []


def test_lcm_totient_bound_failures():
    assert oracles.lcm_totient_bound_failures(20, 3) == []


def test_lambda_sandwich_failures():
    assert oracles.lambda_sandwich_failures(200, seed=5) == []


def test_bad_arguments():
    with pytest.raises(ValueError):
        solve_pow_congruence(0, 0)
    with pytest.raises(ValueError):
        solve_pow_congruence(5, 5)
    with pytest.raises(ValueError):
        ceil_log2_ratio(0, 1)
