"""Exit problems, the embedded chain, and excursion counting."""

import math

import numpy as np
import pytest
from scipy.stats import chi2, ks_2samp

from erwlab.coeffs import coefficients
from erwlab.embedding import (
    MAX_CHAIN_STEPS,
    AlphaProcess,
    EmbeddingState,
    ExitProblem,
    ResolutionError,
    alpha_asymptotic_check,
    alpha_process,
    concentration_report,
    count_qualifying_excursions,
    diagnostics,
    discretize_chain,
    embed_walk,
    excursion_scan,
    exit_side_probability,
    expected_exit_time,
    extract_excursions,
    sample_exit,
)
from erwlab.ensemble import derive_stream
from erwlab.enumeration import exact_enumeration
from erwlab.walk import WalkParams


def test_exit_problem_validation():
    ExitProblem(1.0, 0.0)
    with pytest.raises(ValueError):
        ExitProblem(0.0, 0.0)
    with pytest.raises(ValueError):
        ExitProblem(-1.0, 0.0)
    with pytest.raises(ValueError):
        ExitProblem(1.0, 1.0)
    with pytest.raises(ValueError):
        ExitProblem(math.inf, 0.0)


def test_exit_formulas():
    assert exit_side_probability(ExitProblem(1.0, 0.0)) == 0.5
    assert exit_side_probability(ExitProblem(2.0, 1.0)) == 0.75
    assert expected_exit_time(ExitProblem(1.0, 0.0)) == 1.0
    assert expected_exit_time(ExitProblem(2.0, 1.0)) == 3.0


def test_sample_exit_refusals():
    rng = derive_stream(0, 0)
    with pytest.raises(ValueError):
        sample_exit(ExitProblem(1.0, 0.0), rng, mode="bogus")
    with pytest.raises(ValueError):
        sample_exit(ExitProblem(1.0, 0.0), rng, mode="grid", refine=0.5)


def test_series_sampler_moments():
    # unit problem: mean exit time 1, variance 2/3
    rng = derive_stream(881, 0)
    times = np.array([sample_exit(ExitProblem(1.0, 0.0), rng)[1] for _ in range(20_000)])
    assert np.all(times > 0)
    assert np.mean(times) == pytest.approx(1.0, abs=0.02)
    assert np.var(times) == pytest.approx(2.0 / 3.0, abs=0.05)


def test_series_sampler_side_frequency():
    rng = derive_stream(882, 0)
    prob = ExitProblem(2.0, 1.0)
    sides = np.array([sample_exit(prob, rng)[0] for _ in range(20_000)])
    assert set(np.unique(sides)) <= {-1, 1}
    freq_up = np.mean(sides == 1)
    se = math.sqrt(0.75 * 0.25 / len(sides))
    assert abs(freq_up - 0.75) < 4.0 * se


def test_exit_time_scaling():
    # times scale by the squared interval ratio when (x, y) scales jointly
    rng = derive_stream(883, 0)
    small = np.array([sample_exit(ExitProblem(1.0, 0.5), rng)[1] for _ in range(8_000)])
    big = np.array([sample_exit(ExitProblem(2.0, 1.0), rng)[1] for _ in range(8_000)])
    res = ks_2samp(4.0 * small, big, method="asymp")
    assert res.pvalue > 1e-3


def test_grid_sampler_matches_series_in_law():
    rng = derive_stream(884, 0)
    prob = ExitProblem(1.0, 0.3)
    series = np.array([sample_exit(prob, rng)[1] for _ in range(8_000)])
    grid = np.array(
        [sample_exit(prob, rng, mode="grid", refine=512.0)[1] for _ in range(8_000)]
    )
    res = ks_2samp(series, grid, method="asymp")
    assert res.pvalue > 1e-3


def test_embedding_state_validation():
    EmbeddingState(0, 0.0, 0.0, 0.0, 0.0)
    EmbeddingState(2, 1.5045055561273502, 1.0, 0.7522527780636751, 1.8)
    with pytest.raises(ValueError):
        EmbeddingState(0, 1.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        EmbeddingState(1, 1.0, 0.5, 0.0, 1.0)  # scale must be positive
    with pytest.raises(ValueError):
        # value/scale = 1 has the wrong parity for n = 2
        EmbeddingState(2, 0.7522527780636751, 1.0, 0.7522527780636751, 1.8)
    assert EmbeddingState(1, -1.1283791670955126, 0.4, 1.1283791670955126, 1.27).spin == -1


def test_embed_walk_refusals(coeffs64):
    rng = derive_stream(1, 0)
    with pytest.raises(ValueError):
        embed_walk(WalkParams(p=0.7, q=0.5, horizon=4), coeffs64, rng=rng)
    with pytest.raises(ValueError):
        embed_walk(WalkParams(p=0.75, q=0.6, horizon=4), coeffs64, rng=rng)
    with pytest.raises(ValueError):
        embed_walk(WalkParams(p=0.75, q=0.5, horizon=100), coeffs64, rng=rng)
    with pytest.raises(ValueError):
        embed_walk(WalkParams(p=0.75, q=0.5, horizon=4), coeffs64, rng=rng, mode="bogus")


def test_embedded_chain_structure(coeffs64):
    states = embed_walk(WalkParams(p=0.75, q=0.5, horizon=50), coeffs64, rng=derive_stream(77, 0))
    assert len(states) == 51
    assert states[0].n == 0 and states[0].time == 0.0
    times = [st.time for st in states]
    assert all(b > a for a, b in zip(times, times[1:]))
    for st in states[1:]:
        assert st.scale == coeffs64.a[st.n]
        assert st.cumulative_sq == pytest.approx(coeffs64.a_sq_prefix[st.n], rel=1e-12)
        assert abs(st.spin) <= st.n
        assert (st.spin - st.n) % 2 == 0
        # one lattice step at a time
        assert abs(st.spin - states[st.n - 1].spin) == 1


def test_embedded_chain_matches_kernel(coeffs64):
    # python driver and compiled batch kernel consume streams identically
    from erwlab import _kernels

    states = embed_walk(WalkParams(p=0.75, q=0.5, horizon=30), coeffs64, rng=derive_stream(303, 5))
    rows = _kernels.embed_chain_checkpoints(
        derive_stream(303, 5),
        coeffs64.a,
        coeffs64.a_sq_prefix,
        np.array([30], dtype=np.int64),
    )
    assert rows[0, 0] == states[-1].spin
    assert rows[0, 1] == pytest.approx(states[-1].time, rel=1e-12)


def test_recovered_law_matches_enumeration(coeffs64):
    # terminal positions of embedded chains follow the exact walk law
    n, reps = 6, 10_000
    law = exact_enumeration(0.75, 0.5, n).s_law()
    rng = derive_stream(885, 0)
    params = WalkParams(p=0.75, q=0.5, horizon=n)
    counts: dict[int, int] = {}
    for _ in range(reps):
        spin = embed_walk(params, coeffs64, rng=rng)[-1].spin
        counts[spin] = counts.get(spin, 0) + 1
    assert set(counts) <= set(law)
    stat = sum((counts.get(k, 0) - reps * w) ** 2 / (reps * w) for k, w in law.items())
    assert float(chi2.sf(stat, df=len(law) - 1)) > 1e-4


def test_alpha_process(coeffs64):
    states = embed_walk(WalkParams(p=0.75, q=0.5, horizon=20), coeffs64, rng=derive_stream(886, 0))
    proc = alpha_process(states)
    # right-continuous: at the n-th exit the threshold drops to a_{n+1}
    for k in range(1, 10):
        assert proc.value_at(states[k].time) == coeffs64.a[k + 1]
        assert proc.value_at(states[k].time - 1e-12) == coeffs64.a[k]
    assert proc.value_at(0.0) == coeffs64.a[1]
    with pytest.raises(ValueError):
        proc.value_at(-0.1)
    with pytest.raises(ValueError):
        proc.value_at(states[-1].time)
    with pytest.raises(ValueError):
        alpha_process(states[:1])


def test_alpha_process_validation():
    with pytest.raises(ValueError):
        AlphaProcess(np.array([0.0, 1.0, 2.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        AlphaProcess(np.array([0.0, 1.0]), np.array([-1.0]))
    with pytest.raises(ValueError):
        AlphaProcess(np.array([0.0, 1.0, 2.0]), np.array([0.5, 0.7]))  # increasing


def test_alpha_asymptotic_drifts_to_one(coeffs_big):
    states = embed_walk(
        WalkParams(p=0.75, q=0.5, horizon=10_000), coeffs_big, rng=derive_stream(4242, 0)
    )
    proc = alpha_process(states)
    val = alpha_asymptotic_check(proc, float(proc.breakpoints[-2]))
    assert 0.6 < val < 1.2
    with pytest.raises(ValueError):
        alpha_asymptotic_check(proc, 0.0)


def test_diagnostics_first_step_identity(coeffs64):
    states = embed_walk(WalkParams(p=0.75, q=0.5, horizon=1), coeffs64, rng=derive_stream(887, 0))
    diag = diagnostics(states)
    a1_sq = coeffs64.a[1] ** 2
    assert diag.v[1] == pytest.approx(states[1].value ** 2 / 9.0, rel=1e-12)
    assert diag.v[1] == pytest.approx(a1_sq / 9.0, rel=1e-12)
    assert diag.clock_drift[1] == pytest.approx(states[1].time - a1_sq, rel=1e-12)
    assert diag.compensated[1] == pytest.approx(diag.clock_drift[1] + diag.v[1], rel=1e-12)


def test_compensated_clock_is_centered(coeffs_big):
    # the drift alone is biased low; adding the compensator recenters it
    reps, horizon = 200, 2_000
    from erwlab import _kernels

    comp = np.empty(reps)
    drift = np.empty(reps)
    cps = np.array([horizon], dtype=np.int64)
    for r in range(reps):
        row = _kernels.embed_chain_checkpoints(
            derive_stream(888, r), coeffs_big.a, coeffs_big.a_sq_prefix, cps
        )[0]
        drift[r] = row[1] - coeffs_big.a_sq_prefix[horizon]
        comp[r] = row[3]
    se = float(np.std(comp) / math.sqrt(reps))
    assert abs(np.mean(comp)) < 4.0 * se
    assert np.mean(drift) < -0.2  # the raw clock really does sit below its prefix


def test_concentration_report():
    rep = concentration_report(
        100, np.array([0.1, -0.3]), np.array([0.0, 0.2]), np.array([1.0, 5.0]), (0.5,)
    )
    assert rep.n == 100
    assert rep.mean_drift == pytest.approx(-0.1)
    assert rep.sup_exceedance[0.5] == pytest.approx(0.5)  # one of two paths
    with pytest.raises(ValueError):
        concentration_report(1, np.zeros(2), np.zeros(2), np.zeros(2))


def test_discretize_chain_refusals(coeffs_big):
    rng = derive_stream(889, 0)
    with pytest.raises(ValueError):
        discretize_chain(rng, coeffs_big, 0)
    with pytest.raises(ValueError):
        discretize_chain(rng, coeffs_big, MAX_CHAIN_STEPS + 1)
    with pytest.raises(ValueError):
        discretize_chain(rng, coeffs_big, 64, refine=0.5)
    with pytest.raises(ValueError):
        discretize_chain(rng, coefficients(8), 16)
    with pytest.raises(ResolutionError):
        # fine spacing at a long horizon would blow the node budget
        discretize_chain(rng, coeffs_big, 4096, refine=3e6)


def test_excursion_scan_requires_resolution(coeffs_big):
    chain = discretize_chain(derive_stream(890, 0), coeffs_big, 48, refine=32.0)
    with pytest.raises(ResolutionError):
        excursion_scan(chain, coeffs_big)
    with pytest.raises(ResolutionError):
        extract_excursions(chain, coeffs_big)


def test_excursion_count_matches_zero_count(coeffs_big):
    matches = 0
    for r in range(30):
        chain = discretize_chain(derive_stream(9001, r), coeffs_big, 64, refine=256.0)
        count, bad = excursion_scan(chain, coeffs_big)
        assert bad == 0
        matches += count == chain.zeros
    assert matches == 30


def test_python_scan_mirrors_kernel_scan(coeffs_big):
    for r in range(50):
        chain = discretize_chain(derive_stream(9002, r), coeffs_big, 96, refine=64.0)
        kernel_count = count_qualifying_excursions(chain, coeffs_big)
        intervals = extract_excursions(chain, coeffs_big)
        python_count = sum(1 for e in intervals if e.counts)
        assert python_count == kernel_count
        for e in intervals:
            assert e.left < e.right
            assert e.height >= 0.0
            assert e.counts == (e.height >= e.alpha_at_left)


def test_chain_positions_follow_exits(coeffs_big):
    chain = discretize_chain(derive_stream(891, 0), coeffs_big, 64, refine=128.0)
    assert len(chain.exit_indices) == 64
    assert np.all(np.diff(chain.exit_indices) > 0)
    # recovered positions form a walk path
    prev = 0
    for s in chain.positions:
        assert abs(int(s) - prev) == 1
        prev = int(s)
    assert chain.zeros == int(np.sum(chain.positions == 0))
    # exit nodes sit exactly on the scaled lattice
    for j, idx in enumerate(chain.exit_indices[:10]):
        expected = coeffs_big.a[j + 1] * chain.positions[j]
        assert chain.values[idx] == pytest.approx(expected, abs=1e-15)
