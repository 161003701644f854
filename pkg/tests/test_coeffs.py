"""Scale-coefficient table: exact anchors, recurrence, growth bounds."""

import math

import numpy as np
import pytest

from erwlab.coeffs import (
    A1,
    Coefficients,
    coefficients,
    martingale_value,
    second_moment_oracle,
)
from erwlab.enumeration import exact_enumeration, second_moment_by_enumeration


def test_first_coefficients_exact(coeffs64):
    assert coeffs64.a[0] == 0.0
    assert coeffs64.a[1] == A1
    assert coeffs64.a[1] == 1.1283791670955126
    assert coeffs64.a[2] == pytest.approx(A1 * 2.0 / 3.0, rel=1e-15)
    assert coeffs64.a[2] == pytest.approx(0.7522527780636751, rel=1e-15)


def test_recurrence_holds(coeffs_big):
    a = coeffs_big.a
    n = np.arange(1, len(a) - 1, dtype=np.float64)
    assert np.allclose(a[2:] / a[1:-1], n / (n + 0.5), rtol=1e-13, atol=0.0)


def test_sqrt_growth_bracket(coeffs_big):
    # a_n * sqrt(n) decays to 1 from above and never leaves [1, 1 + 1/(4n)]
    n = np.arange(1, len(coeffs_big.a), dtype=np.float64)
    g = coeffs_big.a[1:] * np.sqrt(n)
    assert np.all(g >= 1.0)
    assert np.all(g <= 1.0 + 1.0 / (4.0 * n))


def test_prefix_sums_grow_like_log(coeffs_big):
    A = coeffs_big.a_sq_prefix
    assert A[0] == 0.0
    assert A[1] == pytest.approx(4.0 / math.pi, rel=1e-14)
    # logarithmic growth: doubling the index adds log 2, up to O(1/n)
    assert abs((A[2000] - A[1000]) - math.log(2.0)) < 5e-4
    assert abs((A[8000] - A[4000]) - math.log(2.0)) < 1e-4


def test_prefix_sums_match_direct_sum(coeffs64):
    direct = np.cumsum(coeffs64.a**2)
    assert np.allclose(coeffs64.a_sq_prefix, direct, rtol=0.0, atol=1e-12)


def test_empty_and_invalid_tables():
    empty = coefficients(0)
    assert len(empty) == 0
    assert empty.a_sq_prefix[0] == 0.0
    with pytest.raises(ValueError):
        coefficients(-1)
    with pytest.raises(ValueError):
        Coefficients(a=np.zeros(3), a_sq_prefix=np.zeros(4))


def test_martingale_value(coeffs64):
    assert martingale_value(coeffs64, 0, 0) == 0.0
    assert martingale_value(coeffs64, 1, 1) == coeffs64.a[1]
    assert martingale_value(coeffs64, 5, -3) == pytest.approx(-3.0 * coeffs64.a[5])
    with pytest.raises(ValueError):
        martingale_value(coeffs64, -1, 0)
    with pytest.raises(ValueError):
        martingale_value(coeffs64, 2, 3)
    with pytest.raises(IndexError):
        martingale_value(coeffs64, 65, 1)


def test_second_moment_recursion_vs_enumeration(coeffs64):
    law = exact_enumeration(0.75, 0.5, 10)
    by_paths = second_moment_by_enumeration(law, coeffs64)
    by_recursion = second_moment_oracle(coeffs64, 10)
    assert np.allclose(by_paths, by_recursion, rtol=0.0, atol=1e-12)
    assert by_recursion[1] == pytest.approx(4.0 / math.pi, rel=1e-14)


def test_second_moment_oracle_errors(coeffs64):
    with pytest.raises(ValueError):
        second_moment_oracle(coeffs64, 0)
    with pytest.raises(IndexError):
        second_moment_oracle(coeffs64, 65)
