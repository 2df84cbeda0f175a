"""Scalar special functions used by the closed-form mutual-information series.

The alternating series

    beta(x) = sum_{k>=0} (-1)^k / (x + k)

converges like 1/K. Its Euler transform,

    beta(x) = sum_{k>=0} 2^{-(k+1)} k! / (x (x+1) ... (x+k)),

converges geometrically (term ratio (k/2)/(x+k) < 1/2), which is what makes the
closed forms cheap to evaluate.

Truncation convention: a truncation order ``K`` means the terms ``k = 0..K``
are summed, i.e. ``K + 1`` terms.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError

DEFAULT_K = 10
K_ENV_VAR = "HSMRC_DEFAULT_K"

EULER_GAMMA = 0.57721566490153286061

# B_2j / (2j) for the digamma asymptotic series
_DIGAMMA_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


@dataclass(frozen=True)
class SeriesResult:
    """A truncated series sum with a crude error indicator."""

    value: float
    terms_used: int
    last_term_magnitude: float

    def __post_init__(self):
        if self.terms_used < 1:
            raise ValueError("terms_used must be >= 1")
        if not (self.last_term_magnitude >= 0 and math.isfinite(self.last_term_magnitude)):
            raise ValueError("last_term_magnitude must be finite and nonnegative")

    def __float__(self) -> float:
        return self.value


def default_k() -> int:
    """Default truncation order, overridable through ``HSMRC_DEFAULT_K``."""
    raw = os.environ.get(K_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_K
    try:
        k = int(raw)
    except ValueError:
        raise ConfigurationError(f"{K_ENV_VAR} must be an integer >= 1, got {raw!r}") from None
    if k < 1:
        raise ConfigurationError(f"{K_ENV_VAR} must be an integer >= 1, got {raw!r}")
    return k


def resolve_k(K: int | None) -> int:
    if K is None:
        return default_k()
    if isinstance(K, bool) or not isinstance(K, (int, np.integer)) or K < 1:
        raise ConfigurationError(f"truncation order K must be an integer >= 1, got {K!r}")
    return int(K)


def _check_positive(name: str, x: float) -> float:
    x = float(x)
    if not (x > 0) or not math.isfinite(x):
        raise DomainError(f"{name} must be positive and finite, got {x!r}")
    return x


def beta_definition(x: float, K: int | None = None) -> SeriesResult:
    """Partial sum of the defining alternating series of beta(x), k = 0..K."""
    x = _check_positive("x", x)
    K = resolve_k(K)
    value = math.fsum((-1) ** k / (x + k) for k in range(K + 1))
    return SeriesResult(value, K + 1, 1.0 / (x + K))


def beta_expansion(x: float, K: int | None = None) -> SeriesResult:
    """Factorial (Euler-transformed) expansion of beta(x), terms k = 0..K.

    Terms are generated by the running ratio ``(k/2)/(x+k)`` so no factorial is
    ever formed.
    """
    x = _check_positive("x", x)
    K = resolve_k(K)
    term = 0.5 / x
    total = term
    for k in range(1, K + 1):
        term *= 0.5 * k / (x + k)
        total += term
    return SeriesResult(total, K + 1, abs(term))


def beta_prime_series(x: float, K: int | None = None) -> SeriesResult:
    """Accelerated sum of ``sum_k (-1)^k / (x+k)^2``, i.e. ``-beta'(x)``.

    Differentiating each expansion term of :func:`beta_expansion` multiplies
    it by ``-sum_{i<=k} 1/(x+i)``.
    """
    x = _check_positive("x", x)
    K = resolve_k(K)
    term = 0.5 / x
    harmonic = 1.0 / x
    total = term * harmonic
    last = total
    for k in range(1, K + 1):
        term *= 0.5 * k / (x + k)
        harmonic += 1.0 / (x + k)
        last = term * harmonic
        total += last
    return SeriesResult(total, K + 1, abs(last))


def t_factor(m: int, gamma_bar: float) -> float:
    """Pole offset ``(1 + sqrt(1 + 2m/gamma_bar)) / 2``; always > 1."""
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    gamma_bar = _check_positive("gamma_bar", gamma_bar)
    return 0.5 * (1.0 + math.sqrt(1.0 + 2.0 * m / gamma_bar))


def double_factorial(n: int) -> int:
    """n!! for odd n >= -1, with (-1)!! = 1."""
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"double factorial needs an integer, got {n!r}")
    n = int(n)
    if n < -1 or n % 2 == 0:
        raise DomainError(f"double factorial defined here for odd n >= -1, got {n}")
    result = 1
    while n > 1:
        result *= n
        n -= 2
    return result


def digamma(x: float) -> float:
    """Digamma function for positive real x (accuracy ~1e-14).

    Shifted upward to x >= 10 with psi(x) = psi(x+1) - 1/x, then the
    Bernoulli asymptotic series.
    """
    x = _check_positive("x", x)
    shift = 0.0
    while x < 10.0:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for c in _DIGAMMA_ASYMPTOTIC:
        series += c * power
        power *= inv2
    return shift + math.log(x) - 0.5 / x - series


def beta_reference(x: float) -> float:
    """beta(x) through digamma: (psi((x+1)/2) - psi(x/2)) / 2."""
    x = _check_positive("x", x)
    return 0.5 * (digamma(0.5 * (x + 1.0)) - digamma(0.5 * x))


def euler_alternating_sum(
    terms: Sequence[float] | np.ndarray, rtol: float = 1e-16
) -> SeriesResult:
    """Euler transform of ``sum_k (-1)^k a_k`` from the leading terms ``a_k``.

    Uses ``sum_j (-1)^j (Delta^j a)_0 / 2^(j+1)`` with forward differences; stops
    once two consecutive transformed terms fall below ``rtol`` relative to the
    running sum. Applied to ``a_k = 1/(x+k)`` this reproduces
    :func:`beta_expansion` exactly.
    """
    diffs = np.array(terms, dtype=float)
    if diffs.ndim != 1 or diffs.size == 0:
        raise DomainError("need a non-empty 1-D sequence of terms")
    total = 0.0
    last = 0.0
    small = 0
    used = 0
    scale = 0.5
    for j in range(diffs.size):
        last = scale * diffs[0] * (-1.0 if j % 2 else 1.0)
        total += last
        used = j + 1
        if abs(last) <= rtol * abs(total):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
        diffs = diffs[1:] - diffs[:-1]
        scale *= 0.5
    return SeriesResult(total, used, abs(last))
