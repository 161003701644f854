"""Zero-set statistics of a walk stream and their limit-law references.

Streaming observers extract the zero count, the last zero and the first
return from a single pass; the rest of the module holds the arcsine
reference laws, the KS statistic on censored empirical distributions,
scaled log-statistics and the survival-tail estimator.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm


class ConfigurationError(ValueError):
    """A checkpoint or observer wiring problem detected before simulation."""


# ---------------------------------------------------------------------------
# streaming observers

class ZeroCountObserver:
    """Counts visits to the origin, snapshotting at its checkpoints."""

    kind = "zeros"

    def __init__(self, checkpoints):
        self.checkpoints = tuple(sorted(set(int(c) for c in checkpoints)))
        if any(c < 1 for c in self.checkpoints):
            raise ConfigurationError("checkpoints must be positive step indices")
        self.values: list[int] = []
        self._count = 0
        self._next = 0

    def step(self, n: int, s: int) -> None:
        if s == 0:
            self._count += 1
        if self._next < len(self.checkpoints) and self.checkpoints[self._next] == n:
            self.values.append(self._count)
            self._next += 1


class LastExitObserver:
    """Tracks the most recent zero; index 0 stands for no return yet."""

    kind = "last_zero"

    def __init__(self, checkpoints):
        self.checkpoints = tuple(sorted(set(int(c) for c in checkpoints)))
        if any(c < 1 for c in self.checkpoints):
            raise ConfigurationError("checkpoints must be positive step indices")
        self.values: list[int] = []
        self._last = 0
        self._next = 0

    def step(self, n: int, s: int) -> None:
        if s == 0:
            self._last = n
        if self._next < len(self.checkpoints) and self.checkpoints[self._next] == n:
            self.values.append(self._last)
            self._next += 1


class FirstReturnObserver:
    """Records the first zero; stays None when the horizon censors it."""

    kind = "first_return"
    checkpoints: tuple[int, ...] = ()

    def __init__(self):
        self.value: int | None = None

    def step(self, n: int, s: int) -> None:
        if s == 0 and self.value is None:
            self.value = n


def zero_observer(checkpoints) -> ZeroCountObserver:
    return ZeroCountObserver(checkpoints)


def last_exit_observer(checkpoints) -> LastExitObserver:
    return LastExitObserver(checkpoints)


def first_return_observer() -> FirstReturnObserver:
    return FirstReturnObserver()


# ---------------------------------------------------------------------------
# per-replica observables

@dataclass(frozen=True)
class WalkObservables:
    """Checkpoint snapshots of one replica.

    first_return is None when the walk never hit zero within the horizon;
    censoring is a marker, never a sentinel magnitude.
    """

    checkpoints: tuple[int, ...]
    zeros: tuple[int, ...]
    last_zero: tuple[int, ...]
    first_return: int | None
    m_final: float

    def __post_init__(self):
        cps = self.checkpoints
        if not (len(cps) == len(self.zeros) == len(self.last_zero)):
            raise ValueError("checkpoint grids and value sequences must align")
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise ValueError("checkpoints must be strictly increasing")
        if any(b < a for a, b in zip(self.zeros, self.zeros[1:])):
            raise ValueError("zero counts cannot decrease")
        if any(b < a for a, b in zip(self.last_zero, self.last_zero[1:])):
            raise ValueError("last-zero indices cannot decrease")
        r = self.first_return
        if r is not None and (r % 2 != 0 or r < 2):
            raise ValueError("a finite first return must be a positive even index")
        for cp, z, g in zip(cps, self.zeros, self.last_zero):
            if g > cp or g % 2 != 0:
                raise ValueError("last zero must be an even index within the checkpoint")
            no_return = r is None or r > cp
            if (z == 0) != no_return or (g == 0) != no_return:
                raise ValueError("zero count, last zero and first return disagree")


# ---------------------------------------------------------------------------
# empirical distributions and the KS statistic

@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample, optionally with probability mass censored below it.

    censored_below counts replicas whose value is known only to lie below
    every kept sample point; they shift the plotting positions up without
    contributing sample values of their own.
    """

    values: np.ndarray
    censored_below: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("sample must be one-dimensional")
        if self.censored_below < 0:
            raise ValueError("censored count cannot be negative")
        if len(v) + self.censored_below < 1:
            raise ValueError("empty empirical distribution")
        if len(v) and np.any(np.diff(v) < 0):
            v = np.sort(v)
        object.__setattr__(self, "values", v)

    @property
    def total(self) -> int:
        return len(self.values) + self.censored_below


def ks_distance(emp: EmpiricalDistribution, cdf) -> float:
    """sup over sample points of |ECDF - reference|, both plotting positions.

    With a censored_below count c and total N the kept point of rank i sits
    between positions (c+i-1)/N and (c+i)/N; the supremum over the jump is
    attained at one of the two.
    """
    v = emp.values
    if len(v) == 0:
        raise ValueError("KS distance needs at least one kept sample value")
    ref = np.asarray(cdf(v), dtype=float)
    i = np.arange(1, len(v) + 1, dtype=float)
    hi = (emp.censored_below + i) / emp.total
    lo = (emp.censored_below + i - 1.0) / emp.total
    return float(max(np.max(np.abs(ref - hi)), np.max(np.abs(ref - lo))))


def arcsine_cdf(x):
    """CDF (2/pi) arcsin(sqrt(x)) on [0, 1]; clamps outside the support."""
    x = np.clip(x, 0.0, 1.0)
    return (2.0 / math.pi) * np.arcsin(np.sqrt(x))


def arcsine_cdf_half(a):
    """CDF (2/pi) arcsin(sqrt(2a)) on [0, 1/2]; the arcsine law of A/2."""
    a = np.clip(a, 0.0, 0.5)
    return (2.0 / math.pi) * np.arcsin(np.sqrt(2.0 * a))


# ---------------------------------------------------------------------------
# survival of the first return

@dataclass(frozen=True)
class TailEstimate:
    """Empirical P(R > n) with a Wilson interval and the theory curve value."""

    n: int
    p_hat: float
    ci_low: float
    ci_high: float
    theory: float

    def __post_init__(self):
        if not 0.0 <= self.ci_low <= self.p_hat <= self.ci_high <= 1.0:
            raise ValueError("interval must bracket the point estimate within [0, 1]")


def wilson_interval(successes: int, total: int, confidence: float = 0.95) -> tuple[float, float]:
    """Score interval for a binomial proportion; behaves near the boundary."""
    if total < 1:
        raise ValueError("total must be positive")
    if not 0 <= successes <= total:
        raise ValueError("successes out of range")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie strictly between 0 and 1")
    z = float(norm.ppf(0.5 + confidence / 2.0))
    phat = successes / total
    denom = 1.0 + z * z / total
    center = (phat + z * z / (2.0 * total)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / total + z * z / (4.0 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def tail_survival_theory(n: int) -> float:
    """(2/pi) sqrt(2/log n), the large-n survival curve of the first return."""
    if n <= 1:
        raise ValueError("theory curve needs n > 1")
    return (2.0 / math.pi) * math.sqrt(2.0 / math.log(n))


def tail_estimate(survived: int, total: int, n: int, confidence: float = 0.95) -> TailEstimate:
    """Wilson-backed estimate of P(R > n) from censoring counts."""
    if n <= 1:
        raise ValueError("survival horizon must exceed 1")
    lo, hi = wilson_interval(survived, total, confidence)
    return TailEstimate(
        n=n,
        p_hat=survived / total,
        ci_low=lo,
        ci_high=hi,
        theory=tail_survival_theory(n),
    )


# ---------------------------------------------------------------------------
# scaled statistics on the log clock

def checkpoint_grid(n_base: int, t_grid) -> tuple[int, ...]:
    """Geometric checkpoints round(n_base^t), deduplicated, increasing."""
    if n_base < 2:
        raise ValueError("n_base must be at least 2")
    ts = tuple(float(t) for t in t_grid)
    if any(not 0.0 <= t <= 1.0 for t in ts):
        raise ValueError("t grid must lie within [0, 1]")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t grid must be strictly increasing")
    out = []
    for t in ts:
        n_t = int(round(n_base**t))
        if not out or n_t > out[-1]:
            out.append(n_t)
    return tuple(out)


@dataclass(frozen=True)
class ScaledStatistics:
    """Per-replica log statistics along the t grid; NaN marks undefined entries."""

    t: tuple[float, ...]
    n: tuple[int, ...]
    log_z_over_log_n: np.ndarray
    log_g_over_log_n: np.ndarray
    log_z_over_log_g: np.ndarray
    censored: np.ndarray  # True where the walk had not returned by n^t


def scaled_statistics(obs: WalkObservables, n_base: int, t_grid, ratio: bool = True) -> ScaledStatistics:
    """Log-scale statistics of one replica at checkpoints n_base^t.

    Replicas with no zero yet are flagged censored and excluded from the
    log statistics (the exclusion event is itself a reported probability);
    the ratio is reported only where both counts exceed 1, and is refused
    at t = 0 where both of its arguments degenerate.
    """
    if n_base < 2:
        raise ValueError("n_base must be at least 2")
    ts = tuple(float(t) for t in t_grid)
    if ratio and any(t == 0.0 for t in ts):
        raise ValueError("the log ratio is degenerate at t = 0; drop t = 0 or pass ratio=False")
    log_base = math.log(n_base)
    ns, zs, gs = [], [], []
    for t in ts:
        n_t = int(round(n_base**t))
        try:
            idx = obs.checkpoints.index(n_t)
        except ValueError:
            raise ConfigurationError(f"checkpoint {n_t} (t={t}) missing from the observables") from None
        ns.append(n_t)
        zs.append(obs.zeros[idx])
        gs.append(obs.last_zero[idx])
    z = np.asarray(zs, dtype=float)
    g = np.asarray(gs, dtype=float)
    with np.errstate(divide="ignore"):
        log_z = np.where(z > 0, np.log(np.maximum(z, 1.0)) / log_base, np.nan)
        log_g = np.where(g > 0, np.log(np.maximum(g, 1.0)) / log_base, np.nan)
        both = (z > 1) & (g > 1)
        ratio_vals = np.where(both, np.log(np.maximum(z, 2.0)) / np.log(np.maximum(g, 2.0)), np.nan)
    if not ratio:
        ratio_vals = np.full_like(ratio_vals, np.nan)
    return ScaledStatistics(
        t=ts,
        n=tuple(ns),
        log_z_over_log_n=log_z,
        log_g_over_log_n=log_g,
        log_z_over_log_g=ratio_vals,
        censored=z == 0,
    )


def diffusive_baseline(zero_counts, n: int, p: float) -> EmpiricalDistribution:
    """ECDF of Z(n)/sqrt(n) for a walk below the critical point.

    Only meaningful as a non-degeneracy contrast: below 3/4 the zero count
    grows diffusively, so the rescaled law should not collapse at 0.
    """
    if not p < 0.75:
        raise ValueError("diffusive baseline requires p below the critical point 3/4")
    if n < 1:
        raise ValueError("horizon must be positive")
    z = np.asarray(zero_counts, dtype=float)
    return EmpiricalDistribution(values=np.sort(z / math.sqrt(n)))
