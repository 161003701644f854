"""Observers, empirical distributions, limit-law references, tail estimates."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from erwlab import _kernels
from erwlab.ensemble import derive_stream
from erwlab.observables import (
    ConfigurationError,
    EmpiricalDistribution,
    FirstReturnObserver,
    LastExitObserver,
    TailEstimate,
    WalkObservables,
    ZeroCountObserver,
    arcsine_cdf,
    arcsine_cdf_half,
    checkpoint_grid,
    diffusive_baseline,
    ks_distance,
    scaled_statistics,
    tail_estimate,
    tail_survival_theory,
    wilson_interval,
)


def _feed(observer, path):
    for n, s in enumerate(path, start=1):
        observer.step(n, s)
    return observer


def test_observers_by_hand():
    path = [1, 0, 1, 0, 1, 2]  # zeros at steps 2 and 4
    zc = _feed(ZeroCountObserver((4, 6)), path)
    le = _feed(LastExitObserver((4, 6)), path)
    fr = _feed(FirstReturnObserver(), path)
    assert zc.values == [2, 2]
    assert le.values == [4, 4]
    assert fr.value == 2


def test_observer_checkpoint_validation():
    with pytest.raises(ConfigurationError):
        ZeroCountObserver((0, 4))
    # duplicates collapse, order normalizes
    assert ZeroCountObserver((4, 2, 4)).checkpoints == (2, 4)


def test_walk_observables_consistency():
    WalkObservables(checkpoints=(2, 4), zeros=(1, 2), last_zero=(2, 4), first_return=2, m_final=0.0)
    with pytest.raises(ValueError):
        # zero count says a return happened, last zero disagrees
        WalkObservables(checkpoints=(2,), zeros=(1,), last_zero=(0,), first_return=2, m_final=0.0)
    with pytest.raises(ValueError):
        WalkObservables(checkpoints=(2, 4), zeros=(2, 1), last_zero=(2, 2), first_return=2, m_final=0.0)
    with pytest.raises(ValueError):
        WalkObservables(checkpoints=(2,), zeros=(1,), last_zero=(1,), first_return=2, m_final=0.0)
    with pytest.raises(ValueError):
        WalkObservables(checkpoints=(2,), zeros=(1,), last_zero=(2,), first_return=3, m_final=0.0)


def test_arcsine_cdf_pinned_values():
    assert arcsine_cdf(0.0) == 0.0
    assert arcsine_cdf(1.0) == pytest.approx(1.0, rel=1e-14)
    assert arcsine_cdf(0.25) == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert arcsine_cdf(0.5) == pytest.approx(0.5, rel=1e-14)
    assert arcsine_cdf_half(0.25) == pytest.approx(0.5, rel=1e-14)
    assert arcsine_cdf_half(0.5) == pytest.approx(1.0, rel=1e-14)
    # clamped outside the support
    assert arcsine_cdf(1.5) == pytest.approx(1.0, rel=1e-14)
    assert arcsine_cdf_half(0.9) == pytest.approx(1.0, rel=1e-14)


def test_ks_distance_hand_cases():
    one = EmpiricalDistribution(np.array([0.3]))
    assert ks_distance(one, lambda v: np.full_like(v, 0.5)) == pytest.approx(0.5)
    assert ks_distance(one, lambda v: np.ones_like(v)) == pytest.approx(1.0)
    # one censored replica below one kept point at reference 0.75:
    # plotting positions 1/2 and 1, supremum gap 0.25
    cens = EmpiricalDistribution(np.array([0.3]), censored_below=1)
    assert ks_distance(cens, lambda v: np.full_like(v, 0.75)) == pytest.approx(0.25)


def test_ks_null_distribution_scale():
    rng = derive_stream(2024, 0)
    u = rng.random(10_000)
    sample = np.sin(0.5 * math.pi * u) ** 2  # exact arcsine variates
    emp = EmpiricalDistribution(np.sort(sample))
    assert ks_distance(emp, arcsine_cdf) < 0.02


def test_ks_monotone_transform_invariance():
    rng = derive_stream(2024, 1)
    x = np.sort(rng.random(500)) + 0.1
    emp_x = EmpiricalDistribution(x)
    emp_sq = EmpiricalDistribution(x**2)
    d1 = ks_distance(emp_x, arcsine_cdf)
    d2 = ks_distance(emp_sq, lambda v: arcsine_cdf(np.sqrt(v)))
    assert d1 == pytest.approx(d2, abs=1e-12)


@given(
    kept=st.integers(0, 40),
    censored=st.integers(0, 40),
)
def test_empirical_distribution_conservation(kept, censored):
    if kept + censored == 0:
        with pytest.raises(ValueError):
            EmpiricalDistribution(np.zeros(0), censored_below=0)
        return
    emp = EmpiricalDistribution(np.linspace(0.0, 1.0, kept), censored_below=censored)
    assert emp.total == kept + censored
    assert np.all(np.diff(emp.values) >= 0)


def test_empirical_distribution_validation():
    # unsorted input is sorted on construction
    emp = EmpiricalDistribution(np.array([0.5, 0.2, 0.9]))
    assert list(emp.values) == [0.2, 0.5, 0.9]
    with pytest.raises(ValueError):
        EmpiricalDistribution(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        EmpiricalDistribution(np.array([1.0]), censored_below=-1)
    with pytest.raises(ValueError):
        ks_distance(EmpiricalDistribution(np.zeros(0), censored_below=3), arcsine_cdf)


def test_checkpoint_grid():
    assert checkpoint_grid(10_000, (0.25, 0.5, 1.0)) == (10, 100, 10_000)
    # collisions after rounding collapse
    assert checkpoint_grid(16, (0.2, 0.25)) == (2,)
    with pytest.raises(ValueError):
        checkpoint_grid(1, (0.5,))
    with pytest.raises(ValueError):
        checkpoint_grid(100, (0.5, 0.5))
    with pytest.raises(ValueError):
        checkpoint_grid(100, (0.5, 1.5))


def test_scaled_statistics_plugin_values():
    obs = WalkObservables(
        checkpoints=(10, 100),
        zeros=(2, 10),
        last_zero=(4, 100),
        first_return=2,
        m_final=0.0,
    )
    stats = scaled_statistics(obs, 100, (0.5, 1.0))
    assert stats.n == (10, 100)
    assert stats.log_z_over_log_n[1] == pytest.approx(math.log(10) / math.log(100))
    assert stats.log_g_over_log_n[1] == pytest.approx(1.0)
    assert stats.log_z_over_log_g[1] == pytest.approx(0.5)
    assert stats.log_z_over_log_g[0] == pytest.approx(math.log(2) / math.log(4))
    assert not stats.censored.any()


def test_scaled_statistics_censoring_and_refusals():
    never = WalkObservables(
        checkpoints=(10, 100),
        zeros=(0, 0),
        last_zero=(0, 0),
        first_return=None,
        m_final=0.0,
    )
    stats = scaled_statistics(never, 100, (0.5, 1.0))
    assert stats.censored.all()
    assert np.isnan(stats.log_z_over_log_n).all()
    assert np.isnan(stats.log_z_over_log_g).all()
    with pytest.raises(ValueError):
        scaled_statistics(never, 100, (0.0, 1.0))
    with pytest.raises(ConfigurationError):
        scaled_statistics(never, 100, (0.25, 1.0))  # checkpoint 3 was never observed


def test_tail_theory_pinned_values():
    assert tail_survival_theory(50_000) == pytest.approx(0.2737, abs=5e-5)
    assert tail_survival_theory(1_000_000) == pytest.approx(0.2422, abs=5e-5)
    limit_const = 2.0 * math.sqrt(2.0) / math.pi
    assert tail_survival_theory(100) * math.sqrt(math.log(100)) == pytest.approx(
        limit_const, rel=1e-12
    )
    with pytest.raises(ValueError):
        tail_survival_theory(1)


def test_wilson_interval():
    lo, hi = wilson_interval(50, 100)
    assert lo + hi == pytest.approx(1.0, abs=1e-12)
    assert lo < 0.5 < hi
    lo0, _ = wilson_interval(0, 100)
    assert lo0 == pytest.approx(0.0, abs=1e-15)
    _, hi1 = wilson_interval(100, 100)
    assert hi1 == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        wilson_interval(5, 0)
    with pytest.raises(ValueError):
        wilson_interval(5, 4)
    with pytest.raises(ValueError):
        wilson_interval(5, 10, confidence=1.0)


def test_tail_estimate():
    te = tail_estimate(30, 100, 1000)
    assert te.p_hat == pytest.approx(0.3)
    assert te.ci_low < te.p_hat < te.ci_high
    assert te.theory == pytest.approx(tail_survival_theory(1000))
    with pytest.raises(ValueError):
        tail_estimate(30, 100, 1)
    with pytest.raises(ValueError):
        TailEstimate(n=10, p_hat=0.5, ci_low=0.6, ci_high=0.7, theory=0.3)


def test_diffusive_baseline():
    with pytest.raises(ValueError):
        diffusive_baseline([1.0], 100, 0.75)
    with pytest.raises(ValueError):
        diffusive_baseline([1.0], 0, 0.5)
    # below the critical strength the zero count scales like sqrt(n) with
    # mean sqrt(2/pi) in the simple-walk case
    n, reps = 400, 2_000
    spans = _kernels.walk_spans_batch(
        derive_stream(31337, 0), 0.0, 0.5, np.array([n], dtype=np.int64), reps
    )
    emp = diffusive_baseline(spans[:, 0, 1].astype(float), n, 0.5)
    assert emp.total == reps
    assert np.mean(emp.values) == pytest.approx(math.sqrt(2.0 / math.pi), abs=0.08)
