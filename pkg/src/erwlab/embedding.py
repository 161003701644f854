"""Walk reconstruction from Brownian motion by iterated exit problems.

At the critical memory strength the scaled walk is a martingale whose
increments live on a shrinking lattice, so each step can be realized as the
exit of a Brownian motion from an interval around the current value: the
exit side reproduces the step law exactly, and the exit times accumulate
into a clock whose growth is logarithmic. This module owns the exit-problem
primitives, the chain construction, the interval-threshold process used to
count excursions, and the diagnostics around the clock.

Two exit samplers are provided. "series" inverts the exact absorption-time
law (dual series expansions of the sub-distribution). "grid" walks an Euler
discretization with Brownian-bridge crossing corrections; it is biased at
O(dt) and exists as an independent check on the series route. The two are
compared in distribution, never merged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .coeffs import Coefficients
from .walk import WalkParams

MAX_CHAIN_STEPS = 4096
_GRID_CAP_LIMIT = 200_000_000


class ResolutionError(ValueError):
    """Grid too coarse for the analysis that was requested of it."""


@dataclass(frozen=True)
class ExitProblem:
    """Brownian exit from (-half_width, half_width) started at `start`."""

    half_width: float
    start: float

    def __post_init__(self):
        if not (self.half_width > 0.0 and math.isfinite(self.half_width)):
            raise ValueError(f"half_width must be positive and finite, got {self.half_width}")
        if not abs(self.start) < self.half_width:
            raise ValueError(
                f"start must lie strictly inside the interval: |{self.start}| >= {self.half_width}"
            )


def exit_side_probability(problem: ExitProblem) -> float:
    """Probability that the upper boundary is hit first."""
    return (problem.half_width + problem.start) / (2.0 * problem.half_width)


def expected_exit_time(problem: ExitProblem) -> float:
    """Mean exit time, half_width^2 - start^2."""
    return problem.half_width**2 - problem.start**2


def sample_exit(
    problem: ExitProblem,
    rng: np.random.Generator,
    mode: str = "series",
    refine: float = 64.0,
) -> tuple[int, float]:
    """Draw one (side, time) pair; side is +1 for the upper boundary.

    mode "series" is exact; mode "grid" discretizes with step
    (half_width - |start|)^2 / refine and corrects hidden crossings with
    bridge probabilities.
    """
    if mode == "series":
        return _kernels.sample_exit_series(rng, problem.half_width, problem.start)
    if mode == "grid":
        if not refine >= 1.0:
            raise ValueError(f"refine must be >= 1, got {refine}")
        return _kernels.sample_exit_grid(rng, problem.half_width, problem.start, refine)
    raise ValueError(f"unknown exit sampler mode: {mode!r} (expected 'series' or 'grid')")


@dataclass(frozen=True)
class EmbeddingState:
    """One chain node: step index, martingale value, elapsed Brownian time.

    scale is the martingale coefficient at this index and cumulative_sq the
    running sum of squared coefficients, both carried along so diagnostics
    need no side table. value/scale is an integer with the parity of n.
    """

    n: int
    value: float
    time: float
    scale: float
    cumulative_sq: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n must be nonnegative, got {self.n}")
        if self.n == 0:
            if self.value != 0.0 or self.time != 0.0:
                raise ValueError("the chain starts at value 0 at time 0")
            return
        if not self.scale > 0.0:
            raise ValueError("scale must be positive for n >= 1")
        s = self.value / self.scale
        nearest = round(s)
        if abs(s - nearest) > 1e-6 or (nearest - self.n) % 2 != 0:
            raise ValueError(
                f"value/scale = {s} is not an integer of parity n = {self.n}"
            )

    @property
    def spin(self) -> int:
        """Walk position recovered from the martingale value."""
        if self.n == 0:
            return 0
        return round(self.value / self.scale)


def embed_walk(
    params: WalkParams,
    coeffs: Coefficients,
    rng: np.random.Generator | None = None,
    mode: str = "series",
    refine: float = 64.0,
) -> list[EmbeddingState]:
    """Construct the embedded chain out to the horizon.

    Returns states 0..horizon with strictly increasing times. Only the
    critical symmetric walk embeds this way: each step's exit problem is
    centered so that the side probabilities reproduce the conditional step
    law, which pins p = 3/4 and a fair first step.
    """
    if abs(params.p - 0.75) > 1e-12:
        raise ValueError(f"embedding requires the critical memory strength 3/4, got p = {params.p}")
    if abs(params.q - 0.5) > 1e-12:
        raise ValueError(f"embedding requires a fair first step, got q = {params.q}")
    if len(coeffs) < params.horizon:
        raise ValueError(
            f"coefficient table covers n <= {len(coeffs)} but horizon is {params.horizon}"
        )
    if mode not in ("series", "grid"):
        raise ValueError(f"unknown exit sampler mode: {mode!r} (expected 'series' or 'grid')")
    if rng is None:
        from .ensemble import derive_stream

        rng = derive_stream(params.seed, 0)

    a = coeffs.a
    a_sq = coeffs.a_sq_prefix
    states = [EmbeddingState(0, 0.0, 0.0, 0.0, 0.0)]
    s = 0
    t = 0.0
    comp = 0.0
    for n in range(params.horizon):
        x = float(a[n + 1])
        y = x * s / (2.0 * n) if n >= 1 else 0.0
        side, dt = sample_exit(ExitProblem(x, y), rng, mode=mode, refine=refine)
        tn = t + dt
        if abs(t) >= dt:
            comp += (t - tn) + dt
        else:
            comp += (dt - tn) + t
        t = tn
        s += side
        states.append(EmbeddingState(n + 1, x * s, t + comp, x, float(a_sq[n + 1])))
    return states


@dataclass(frozen=True)
class AlphaProcess:
    """Right-continuous step function of the chain clock.

    On [time of exit n, time of exit n+1) the value is the coefficient that
    scales step n+1, so the function is strictly positive, nonincreasing,
    and defined on [first breakpoint, last breakpoint).
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.breakpoints) != len(self.values) + 1:
            raise ValueError("need exactly one more breakpoint than values")
        if len(self.values) == 0:
            raise ValueError("empty process")
        if not np.all(np.diff(self.breakpoints) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not np.all(self.values > 0) or np.any(np.diff(self.values) > 0):
            raise ValueError("values must be positive and nonincreasing")

    def value_at(self, t: float) -> float:
        """Evaluate at time t; right-continuous at every breakpoint."""
        if t < self.breakpoints[0] or t >= self.breakpoints[-1]:
            raise ValueError(
                f"t = {t} outside the domain [{self.breakpoints[0]}, {self.breakpoints[-1]})"
            )
        j = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return float(self.values[j])


def alpha_process(states: Sequence[EmbeddingState]) -> AlphaProcess:
    """Threshold process of a chain produced by embed_walk."""
    if len(states) < 2:
        raise ValueError("need at least one completed step")
    breaks = np.array([st.time for st in states], dtype=np.float64)
    vals = np.array([st.scale for st in states[1:]], dtype=np.float64)
    return AlphaProcess(breaks, vals)


def alpha_asymptotic_check(proc: AlphaProcess, t: float) -> float:
    """-2 log alpha(t) / t, which drifts to 1 as the clock grows."""
    if t <= 0.0:
        raise ValueError("need a positive time")
    return -2.0 * math.log(proc.value_at(t)) / t


@dataclass(frozen=True)
class EmbeddingDiagnostics:
    """Clock diagnostics indexed by step: the compensator v[n] sums
    value^2 / (2j+1)^2 over j <= n, clock_drift[n] is time minus the
    squared-coefficient prefix, and compensated[n] adds v back, which is a
    mean-zero martingale."""

    v: np.ndarray
    clock_drift: np.ndarray
    compensated: np.ndarray


def diagnostics(states: Sequence[EmbeddingState]) -> EmbeddingDiagnostics:
    """Compute the clock compensator and the centered clock for one chain."""
    n_states = len(states)
    v = np.zeros(n_states)
    drift = np.zeros(n_states)
    for n in range(1, n_states):
        st = states[n]
        v[n] = v[n - 1] + st.value**2 / (2.0 * n + 1.0) ** 2
        drift[n] = st.time - st.cumulative_sq
    return EmbeddingDiagnostics(v=v, clock_drift=drift, compensated=drift + v)


@dataclass(frozen=True)
class ConcentrationReport:
    """Ensemble view of the clock at one step index: mean and variance of
    the drift, mean of the compensated clock, and for each threshold the
    frequency of paths whose running sup of |drift| reached
    threshold * log(n)."""

    n: int
    mean_drift: float
    var_drift: float
    mean_compensated: float
    sup_exceedance: dict[float, float]


def concentration_report(
    n: int,
    drift: np.ndarray,
    compensated: np.ndarray,
    sup_drift: np.ndarray,
    thresholds: Sequence[float] = (0.5, 1.0),
) -> ConcentrationReport:
    """Summarize per-chain clock statistics collected at step n."""
    if n < 2:
        raise ValueError("need n >= 2 so that log n is positive")
    drift = np.asarray(drift, dtype=np.float64)
    scale = math.log(n)
    exceed = {
        float(eps): float(np.mean(np.asarray(sup_drift) >= eps * scale))
        for eps in thresholds
    }
    return ConcentrationReport(
        n=n,
        mean_drift=float(np.mean(drift)),
        var_drift=float(np.var(drift)),
        mean_compensated=float(np.mean(np.asarray(compensated))),
        sup_exceedance=exceed,
    )


@dataclass(frozen=True)
class DiscretizedChain:
    """Whole-chain grid path: node values at spacing dt, indices of the
    exit nodes (snapped to exact lattice values), recovered walk positions
    after each exit, and the walk's zero count."""

    values: np.ndarray
    exit_indices: np.ndarray
    dt: float
    positions: np.ndarray
    zeros: int

    def __post_init__(self):
        if len(self.exit_indices) != len(self.positions):
            raise ValueError("one recovered position per exit")


def discretize_chain(
    rng: np.random.Generator,
    coeffs: Coefficients,
    n_steps: int,
    refine: float = 256.0,
) -> DiscretizedChain:
    """Run the embedded chain on a uniform grid fine enough for excursions.

    The spacing is the last step's squared coefficient over `refine`, so the
    narrowest exit interval spans about `refine` grid cells. Full-path
    analysis is capped at 4096 steps; beyond that the node budget explodes.
    """
    if not 1 <= n_steps <= MAX_CHAIN_STEPS:
        raise ValueError(f"n_steps must be in [1, {MAX_CHAIN_STEPS}], got {n_steps}")
    if not refine >= 1.0:
        raise ValueError(f"refine must be >= 1, got {refine}")
    if len(coeffs) < n_steps + 1:
        raise ValueError(
            f"coefficient table covers n <= {len(coeffs)} but need {n_steps + 1}"
        )
    dt = float(coeffs.a[n_steps + 1]) ** 2 / refine
    cap = int(60.0 / dt) + 1000
    if cap > _GRID_CAP_LIMIT:
        raise ResolutionError(
            f"grid would need about {cap} nodes; lower refine or n_steps"
        )
    vals, exit_idx, s_path, zeros = _kernels.chain_grid(rng, coeffs.a, n_steps, refine)
    if len(exit_idx) < n_steps:
        raise RuntimeError(
            f"node budget exhausted after {len(exit_idx)} of {n_steps} steps"
        )
    return DiscretizedChain(
        values=vals, exit_indices=exit_idx, dt=dt, positions=s_path, zeros=int(zeros)
    )


def _require_resolution(chain: DiscretizedChain, coeffs: Coefficients) -> None:
    n_steps = len(chain.exit_indices)
    required = float(coeffs.a[n_steps + 1]) ** 2 / 64.0
    if chain.dt > required * (1.0 + 1e-9):
        raise ResolutionError(
            f"grid spacing {chain.dt:.3e} too coarse for excursion counting; "
            f"need at most {required:.3e} (64 cells across the last interval)"
        )


def excursion_scan(chain: DiscretizedChain, coeffs: Coefficients) -> tuple[int, int]:
    """(qualifying excursion count, zero-placement violations) for one chain.

    A violation is a path zero inside an interval whose recovered walk
    position is nonzero, which the construction forbids up to grid error.
    """
    _require_resolution(chain, coeffs)
    count, bad = _kernels.count_qualifying(
        chain.values, chain.exit_indices, coeffs.a, chain.dt
    )
    return int(count), int(bad)


def count_qualifying_excursions(chain: DiscretizedChain, coeffs: Coefficients) -> int:
    """Number of path excursions whose height reaches the threshold process
    at their left endpoint. Matches the walk's zero count when the grid
    resolves every exit interval."""
    return excursion_scan(chain, coeffs)[0]


@dataclass(frozen=True)
class ExcursionInterval:
    """One excursion away from zero: endpoints in clock time, peak height,
    threshold value at the left endpoint, and whether it qualifies."""

    left: float
    right: float
    height: float
    alpha_at_left: float

    @property
    def counts(self) -> bool:
        return self.height >= self.alpha_at_left


def extract_excursions(
    chain: DiscretizedChain, coeffs: Coefficients
) -> list[ExcursionInterval]:
    """Enumerate the completed excursions of a grid path.

    Pure-Python mirror of the compiled counting scan, branch for branch, so
    the two routes can be compared excursion by excursion. Interpolated
    zeros (sign changes between nodes) are booked at the midpoint.
    """
    _require_resolution(chain, coeffs)
    a = coeffs.a
    vals = chain.values
    exit_idx = chain.exit_indices
    dt = chain.dt
    n_exits = len(exit_idx)
    out: list[ExcursionInterval] = []
    j = 0
    alpha_l = float(a[1])
    height = 0.0
    prev = float(vals[0])
    left = 0.0
    for i in range(1, len(vals)):
        v = float(vals[i])
        av = abs(v)
        is_exit = j < n_exits and exit_idx[j] == i
        zero_here = v == 0.0
        crossed = (prev > 0.0 and v < 0.0) or (prev < 0.0 and v > 0.0)
        if crossed and not zero_here:
            if abs(prev) > height:
                height = abs(prev)
            mid = (i - 0.5) * dt
            out.append(ExcursionInterval(left, mid, height, alpha_l))
            left = mid
            height = av
            alpha_l = float(a[j + 1])
        elif zero_here:
            here = i * dt
            out.append(ExcursionInterval(left, here, height, alpha_l))
            left = here
            height = 0.0
        if av > height:
            height = av
        if is_exit:
            j += 1
        if zero_here:
            alpha_l = float(a[j + 1]) if j + 1 < len(a) else float(a[len(a) - 1])
        prev = v
    return out
