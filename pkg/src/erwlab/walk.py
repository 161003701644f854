"""The reinforced walk itself: step law, samplers, streaming driver.

Two samplers realize the same law. The memory sampler replays a uniformly
chosen past step (kept with probability p, reversed otherwise) and needs the
full history; the urn sampler collapses that mixture to its conditional
probability given the current position and runs in O(1) memory. The driver
here is the plain-Python reference; bulk work goes through the compiled
kernels.
"""

import math
from dataclasses import dataclass

import numpy as np

from .observables import (
    ConfigurationError,
    FirstReturnObserver,
    LastExitObserver,
    WalkObservables,
    ZeroCountObserver,
)

MAX_HORIZON = 2**62  # position is a 64-bit signed integer


@dataclass(frozen=True)
class WalkParams:
    """Memory parameter p, first-step bias q, horizon, replica seed."""

    p: float
    q: float = 0.5
    horizon: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if not 1 <= self.horizon <= MAX_HORIZON:
            raise ValueError(f"horizon must lie in [1, 2^62], got {self.horizon}")


@dataclass
class WalkState:
    """Current step index and position; history retention is opt-in."""

    n: int
    s: int
    history_mode: bool = False

    def __post_init__(self):
        if abs(self.s) > self.n:
            raise ValueError("|s| <= n violated")
        if (self.s - self.n) % 2 != 0:
            raise ValueError("position parity must match the step count")


def step_up_probability(p: float, s: int, n: int) -> float:
    """P(next step is +1 | position s after n steps) = 1/2 + (2p-1) s / (2n).

    Defined for n >= 1 only: the first step is governed by the q coin,
    not by the memory law.
    """
    if n < 1:
        raise ValueError("the memory law starts at n = 1; the first step uses the q coin")
    if abs(s) > n:
        raise ValueError("|s| <= n violated")
    return 0.5 + (2.0 * p - 1.0) * s / (2.0 * n)


def sample_step_urn(rng, p: float, s: int, n: int) -> int:
    """Draw the next step from the collapsed conditional law. O(1) memory."""
    return 1 if rng.random() < step_up_probability(p, s, n) else -1


def sample_step_memory(rng, step_history, p: float) -> int:
    """Replay a uniformly chosen past step, reversed with probability 1-p."""
    k = len(step_history)
    if k == 0:
        raise ValueError("no past steps to draw from")
    j = int(rng.integers(0, k))
    follow = rng.random() < p
    return step_history[j] if follow else -step_history[j]


def _scale_at(n: int) -> float:
    # a_n by the product recurrence, without materializing the whole table
    k = np.arange(1, n, dtype=np.longdouble)
    return float(np.longdouble(2.0 / math.sqrt(math.pi)) * np.prod(k / (k + np.longdouble(0.5))))


def simulate_walk(params: WalkParams, observers=None, sampler: str = "urn", rng=None) -> WalkObservables:
    """Stream one replica, feeding every observer at every step.

    Observers snapshot themselves at their own checkpoints. The three
    standard kinds (zero count, last exit, first return) are always
    attached so the returned observables are complete; pass instances to
    control their checkpoint grids. Memory is O(1) with the urn sampler
    and O(horizon) when the memory sampler retains the step history.
    """
    if sampler not in ("urn", "memory"):
        raise ValueError(f"unknown sampler {sampler!r}: expected 'urn' or 'memory'")
    if rng is None:
        from .ensemble import derive_stream

        rng = derive_stream(params.seed, 0)

    horizon = params.horizon
    observers = list(observers) if observers is not None else []
    for obs in observers:
        cps = getattr(obs, "checkpoints", ())
        if any(c > horizon for c in cps):
            raise ConfigurationError(f"observer checkpoint beyond horizon {horizon}: {cps}")

    zero_obs = next((o for o in observers if isinstance(o, ZeroCountObserver)), None)
    last_obs = next((o for o in observers if isinstance(o, LastExitObserver)), None)
    ret_obs = next((o for o in observers if isinstance(o, FirstReturnObserver)), None)
    if zero_obs is None:
        zero_obs = ZeroCountObserver((horizon,))
        observers.append(zero_obs)
    if last_obs is None:
        last_obs = LastExitObserver((horizon,))
        observers.append(last_obs)
    if ret_obs is None:
        ret_obs = FirstReturnObserver()
        observers.append(ret_obs)
    if zero_obs.checkpoints != last_obs.checkpoints:
        raise ConfigurationError("zero-count and last-exit observers must share one checkpoint grid")

    history = [] if sampler == "memory" else None
    s = 0
    for k in range(1, horizon + 1):
        if k == 1:
            step = 1 if rng.random() < params.q else -1
        elif sampler == "urn":
            step = sample_step_urn(rng, params.p, s, k - 1)
        else:
            step = sample_step_memory(rng, history, params.p)
        if history is not None:
            history.append(step)
        s += step
        for obs in observers:
            obs.step(k, s)

    return WalkObservables(
        checkpoints=zero_obs.checkpoints,
        zeros=tuple(zero_obs.values),
        last_zero=tuple(last_obs.values),
        first_return=ret_obs.value,
        m_final=_scale_at(horizon) * s,
    )
