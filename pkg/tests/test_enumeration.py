"""Exhaustive path enumeration against hand-computed laws and invariants."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from erwlab.enumeration import (
    ENUMERATION_CAP,
    exact_enumeration,
    martingale_identity_gap,
)
from erwlab.observables import (
    FirstReturnObserver,
    LastExitObserver,
    ZeroCountObserver,
)


@given(
    p=st.floats(0.0, 1.0),
    q=st.floats(0.0, 1.0),
    n=st.integers(1, 8),
)
def test_total_mass_is_one(p, q, n):
    law = exact_enumeration(p, q, n)
    assert abs(law.total_mass() - 1.0) <= 1e-12


def test_first_step_law():
    law = exact_enumeration(0.75, 0.3, 1)
    assert law.s_law() == pytest.approx({1: 0.3, -1: 0.7})


def test_two_step_law_by_hand():
    # P(up | s=1, n=1) = 3/4 at the critical strength, so
    # S(2): +2 w.p. 3/8, 0 w.p. 1/4, -2 w.p. 3/8
    law = exact_enumeration(0.75, 0.5, 2)
    assert law.s_law() == pytest.approx({2: 0.375, 0: 0.25, -2: 0.375})
    r_law, censored = law.r_law()
    assert r_law == pytest.approx({2: 0.25})
    assert censored == pytest.approx(0.75)


def test_first_return_at_four_by_hand():
    # plus-start path +1 +1 -1 -1 has probability
    #   1/2 * 3/4 * 1/4 * 5/12 = 5/128,
    # and its mirror doubles it: P(R = 4) = 5/64
    law = exact_enumeration(0.75, 0.5, 4)
    r_law, _ = law.r_law()
    assert r_law[4] == pytest.approx(5.0 / 64.0, rel=1e-14)
    assert r_law[2] == pytest.approx(0.25, rel=1e-14)


def test_r_law_mass_and_parity():
    law = exact_enumeration(0.75, 0.5, 9)
    r_law, censored = law.r_law()
    assert all(k >= 2 and k % 2 == 0 for k in r_law)
    assert sum(r_law.values()) + censored == pytest.approx(1.0, abs=1e-12)


def test_zero_statistics_match_streaming_observers():
    # drive the streaming observers over every enumerated path
    n = 6
    law = exact_enumeration(0.7, 0.4, n)
    for i in range(2**n):
        zc = ZeroCountObserver((n,))
        le = LastExitObserver((n,))
        fr = FirstReturnObserver()
        for k in range(1, n + 1):
            s = int(law.positions[i, k])
            zc.step(k, s)
            le.step(k, s)
            fr.step(k, s)
        assert zc.values[0] == law.zeros[i]
        assert le.values[0] == law.last_zero[i]
        expected_r = law.first_return[i]
        assert (fr.value if fr.value is not None else -1) == expected_r


def test_martingale_identity_at_cap(coeffs64):
    law = exact_enumeration(0.75, 0.5, 12)
    assert martingale_identity_gap(law, coeffs64) <= 1e-12


def test_martingale_identity_detects_biased_first_step(coeffs64):
    # q != 1/2 breaks the k = 0 step of the identity
    law = exact_enumeration(0.75, 0.9, 4)
    assert martingale_identity_gap(law, coeffs64) > 0.1


def test_marginal_consistency():
    law = exact_enumeration(0.75, 0.5, 8)
    # a walk with no return has last zero 0 and zero count 0
    no_return = law.first_return == -1
    assert np.array_equal(no_return, law.last_zero == 0)
    assert np.array_equal(no_return, law.zeros == 0)
    # expectation of the zero count agrees between marginal and path views
    by_marginal = sum(k * w for k, w in law.z_law().items())
    by_paths = law.expectation(law.zeros.astype(float))
    assert by_marginal == pytest.approx(by_paths, rel=1e-13)


def test_refusals(coeffs64):
    with pytest.raises(ValueError):
        exact_enumeration(0.75, 0.5, ENUMERATION_CAP + 1)
    with pytest.raises(ValueError):
        exact_enumeration(0.75, 0.5, 0)
    with pytest.raises(ValueError):
        exact_enumeration(1.5, 0.5, 3)
    with pytest.raises(ValueError):
        exact_enumeration(0.75, -0.5, 3)
    law = exact_enumeration(0.75, 0.5, 3)
    with pytest.raises(ValueError):
        law.s_law(4)
    with pytest.raises(ValueError):
        law.expectation(np.zeros(5))
