"""Martingale scale coefficients for the critical walk.

The normalizing sequence starts at a_1 = 2/sqrt(pi) and obeys
a_{n+1} = a_n * n / (n + 1/2). Its square prefix sums A_n grow like log n
and set the clock of the Brownian embedding. Everything here is
deterministic; the only error is float rounding.
"""

import math
from dataclasses import dataclass

import numpy as np

A1 = 2.0 / math.sqrt(math.pi)


@dataclass(frozen=True)
class Coefficients:
    """Scale table a_0..a_N (a_0 = 0) and the prefix sums A_n = sum_{i<=n} a_i^2."""

    a: np.ndarray
    a_sq_prefix: np.ndarray

    def __post_init__(self):
        if self.a.shape != self.a_sq_prefix.shape:
            raise ValueError("coefficient table and prefix sums must have equal length")

    def __len__(self) -> int:
        # largest usable index
        return len(self.a) - 1


def coefficients(n_max: int) -> Coefficients:
    """Build the scale table up to index n_max.

    Uses the product recurrence rather than gamma-function ratios, which
    would overflow and cancel at large arguments. Prefix sums accumulate in
    extended precision because downstream tolerances consume A_n at absolute
    errors well below 1e-9. n_max = 0 yields the empty table with A_0 = 0.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    a = np.zeros(n_max + 1)
    if n_max >= 1:
        k = np.arange(1, n_max, dtype=np.longdouble)
        factors = np.concatenate(([np.longdouble(1.0)], k / (k + np.longdouble(0.5))))
        a[1:] = (np.longdouble(A1) * np.cumprod(factors)).astype(np.float64)
    prefix = np.cumsum(np.square(a.astype(np.longdouble)))
    return Coefficients(a=a, a_sq_prefix=prefix.astype(np.float64))


def martingale_value(coeffs: Coefficients, n: int, s: int) -> float:
    """M(n) = a_n * s, with M(0) = 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if abs(s) > n:
        raise ValueError("position out of range: |s| <= n required")
    if n == 0:
        return 0.0
    if n > len(coeffs):
        raise IndexError(f"coefficient table holds indices up to {len(coeffs)}, got n={n}")
    return float(coeffs.a[n] * s)


def second_moment_oracle(coeffs: Coefficients, n_max: int) -> np.ndarray:
    """E[M(n)^2] for n = 0..n_max by the exact one-step recursion.

    Conditioning on the walk position gives, pathwise,
        E[M(n+1)^2 | state] = (1 - (2n+1)^{-2}) M(n)^2 + a_{n+1}^2,
    so the unconditional moments follow the same linear recursion started
    from E[M(1)^2] = a_1^2 (the first step squares to a_1^2 on both
    branches, so the first-step bias never enters).
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if n_max > len(coeffs):
        raise IndexError(f"coefficient table holds indices up to {len(coeffs)}, got n_max={n_max}")
    a = coeffs.a
    m2 = np.zeros(n_max + 1)
    m2[1] = a[1] * a[1]
    for n in range(1, n_max):
        c = 2.0 * n + 1.0
        m2[n + 1] = (1.0 - 1.0 / (c * c)) * m2[n] + a[n + 1] * a[n + 1]
    return m2
