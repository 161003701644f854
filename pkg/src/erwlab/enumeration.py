"""Exhaustive small-horizon law of the reinforced walk.

Ground-truth oracle for every distributional test: each of the 2^n sign
paths gets its exact probability as a product of conditional step
probabilities, and the laws of the endpoint, the zero count, the last zero
and the first return are read off by direct summation. Capped at n = 14.
"""

from dataclasses import dataclass, field

import numpy as np

from .coeffs import Coefficients
from .walk import step_up_probability

ENUMERATION_CAP = 14


@dataclass(frozen=True)
class EnumeratedLaw:
    """Joint path law at horizon n plus cached per-path summaries.

    Path ids encode step k as bit k-1 (set = up). positions[i, k] is the
    walk position after k steps on path i.
    """

    n: int
    p: float
    q: float
    path_probs: np.ndarray
    positions: np.ndarray
    zeros: np.ndarray = field(repr=False)
    last_zero: np.ndarray = field(repr=False)
    first_return: np.ndarray = field(repr=False)  # -1 where no return by n

    def total_mass(self) -> float:
        return float(self.path_probs.sum())

    def s_law(self, k: int | None = None) -> dict[int, float]:
        """Exact law of the position after k steps (default: the horizon)."""
        k = self.n if k is None else k
        if not 0 <= k <= self.n:
            raise ValueError("k out of range")
        return self._marginal(self.positions[:, k])

    def z_law(self) -> dict[int, float]:
        """Exact law of the number of zeros among steps 1..n."""
        return self._marginal(self.zeros)

    def g_law(self) -> dict[int, float]:
        """Exact law of the last zero (0 when the walk never returns)."""
        return self._marginal(self.last_zero)

    def r_law(self) -> tuple[dict[int, float], float]:
        """Law of the first return and the mass of paths with no return by n."""
        law = self._marginal(self.first_return)
        censored = law.pop(-1, 0.0)
        return law, censored

    def expectation(self, values: np.ndarray) -> float:
        """Mean of a per-path statistic under the exact path law."""
        if values.shape != self.path_probs.shape:
            raise ValueError("per-path statistic must align with path_probs")
        return float(np.dot(values, self.path_probs))

    def _marginal(self, values: np.ndarray) -> dict[int, float]:
        out: dict[int, float] = {}
        for v in np.unique(values):
            out[int(v)] = float(self.path_probs[values == v].sum())
        return out


def exact_enumeration(p: float, q: float, n: int) -> EnumeratedLaw:
    """Enumerate all sign paths of length n with exact probabilities.

    Refuses horizons above the cap: the point of this oracle is exactness,
    not scale, and 2^14 weighted paths is already ample for every check
    that uses it.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    if n < 1:
        raise ValueError("horizon must be at least 1")
    if n > ENUMERATION_CAP:
        raise ValueError(f"enumeration capped at n = {ENUMERATION_CAP}, got {n}")

    ids = np.arange(2**n, dtype=np.int64)
    steps = (((ids[:, None] >> np.arange(n)) & 1) * 2 - 1).astype(np.int64)
    positions = np.zeros((2**n, n + 1), dtype=np.int64)
    positions[:, 1:] = np.cumsum(steps, axis=1)

    probs = np.ones(2**n)
    up = steps > 0
    probs *= np.where(up[:, 0], q, 1.0 - q)
    for k in range(2, n + 1):
        s_prev = positions[:, k - 1]
        p_up = 0.5 + (2.0 * p - 1.0) * s_prev / (2.0 * (k - 1))
        probs *= np.where(up[:, k - 1], p_up, 1.0 - p_up)

    at_zero = positions[:, 1:] == 0
    zeros = at_zero.sum(axis=1).astype(np.int64)
    ks = np.arange(1, n + 1, dtype=np.int64)
    last_zero = np.where(at_zero, ks, 0).max(axis=1)
    first_return = np.where(at_zero, ks, n + 1).min(axis=1)
    first_return = np.where(first_return == n + 1, -1, first_return)

    return EnumeratedLaw(
        n=n,
        p=p,
        q=q,
        path_probs=probs,
        positions=positions,
        zeros=zeros,
        last_zero=last_zero,
        first_return=first_return,
    )


def martingale_identity_gap(law: EnumeratedLaw, coeffs: Coefficients) -> float:
    """Largest |E[M(k+1) | history] - M(k)| over reachable histories, k < n.

    The conditional law of the next step depends on the history only through
    (position, step count), so it suffices to scan the reachable (s, k)
    pairs. Includes k = 0, where the first-step coin must be fair for the
    martingale property to hold.
    """
    if len(coeffs) < law.n:
        raise IndexError("coefficient table too short for the enumerated horizon")
    a = coeffs.a
    worst = 0.0
    for k in range(0, law.n):
        reachable = np.unique(law.positions[law.path_probs > 0.0, k])
        for s in reachable:
            if k == 0:
                expected_next = a[1] * (2.0 * law.q - 1.0)
                current = 0.0
            else:
                p_up = step_up_probability(law.p, int(s), k)
                expected_next = a[k + 1] * (s + 2.0 * p_up - 1.0)
                current = a[k] * s
            worst = max(worst, abs(expected_next - current))
    return worst


def second_moment_by_enumeration(law: EnumeratedLaw, coeffs: Coefficients) -> np.ndarray:
    """E[M(k)^2] for k = 0..n under the exact path law, for cross-checking."""
    if len(coeffs) < law.n:
        raise IndexError("coefficient table too short for the enumerated horizon")
    out = np.zeros(law.n + 1)
    for k in range(1, law.n + 1):
        m = coeffs.a[k] * law.positions[:, k]
        out[k] = law.expectation(m * m)
    return out
