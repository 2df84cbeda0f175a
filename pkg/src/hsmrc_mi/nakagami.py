"""Ergodic BPSK mutual information of a SISO Nakagami-m (Gamma-SNR) channel.

With the SNR Gamma-distributed with shape m and mean ``gamma_bar``,

    I_B(m, gamma_bar) = ln 2 - F(m, m, gamma_bar),

where F(m, n, .) is the Gamma-weighted average of the BPSK deficit with the
weight gamma^(n-1) exp(-m gamma/gamma_bar) m^m / (gamma_bar^m Gamma(m)).
Integration by parts in n gives

    F(m, n) = 2 H1 P + (n-1) gamma_bar/m F(m, n-1) - gamma_bar/(2m) sum_k (-1)^k B_k(m, n),

    B_k(m, n) D_k = H2 P + (n-1) gamma_bar/c B_k(m, n-1)
                    - sqrt(2) (2k+1) P gamma_bar^(n+1/2) (2n-3)!! / (2^(n-1) c^(n+1/2)),

with P = m^m / (gamma_bar^m Gamma(m)), c = m + gamma_bar/2,
D_k = 1 - (2k+1)^2 gamma_bar / (2c), H1 = gamma_bar ln2 / (2m) and
H2 = 2 gamma_bar / c (both only for n = 1), F(m,0) = B_k(m,0) = 0.

For n = 1 and n = 2 the B_k are short sums of 1/(k+T)^j with
T = (1 + sqrt(1 + 2m/gamma_bar))/2, so the alternating k-sums reduce to the
accelerated beta series. Deeper levels use the recursion and an Euler
transform of the alternating sum.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import special
from .awgn import LN2, bpsk_mi_deficit, shifted_kernel
from .errors import ConfigurationError, DomainError, SingularFactorError
from .quadrature import LAGUERRE, QuadratureRule, gauss_laguerre
from .special import beta_expansion, beta_prime_series, double_factorial, resolve_k, t_factor

DIVISOR_GUARD = 1e-8
EULER_TERMS = 200
DEFAULT_LAGUERRE_ORDER = 128
REDUCED_ORDER = 64
CLAMP_WARN = 1e-6
ROUNDING_UNIT = 2.0**-52


class Engine(str, enum.Enum):
    CLOSED_FORM = "closed-form"
    RECURSIVE = "recursive-general"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class RecursionParams:
    m: int
    n: int
    mean_snr: float
    k_terms: int | None = None

    def __post_init__(self):
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise DomainError(f"m must be a positive integer, got {self.m!r}")
        if isinstance(self.n, bool) or int(self.n) != self.n or not 0 <= self.n <= self.m:
            raise DomainError(f"n must be an integer in [0, m], got {self.n!r}")
        g = float(self.mean_snr)
        if not (g > 0) or not math.isfinite(g):
            raise DomainError(f"mean_snr must be positive and finite, got {self.mean_snr!r}")
        object.__setattr__(self, "mean_snr", g)
        object.__setattr__(self, "k_terms", resolve_k(self.k_terms))


@dataclass(frozen=True)
class MiEstimate:
    """A mutual-information value in nats and how it was obtained.

    ``diagnostic`` is engine specific: a truncation-error indicator for the
    series engines, the order-halving delta for quadrature, the standard error
    for Monte-Carlo. Near saturation ``nats`` rounds to the ceiling; engines
    that compute ``deficit`` directly keep its relative precision.
    """

    nats: float
    engine: Engine
    k_terms: int = 0
    diagnostic: float = 0.0
    deficit: float | None = None  # ceiling minus nats, kept unrounded where the engine has it

    @property
    def bits(self) -> float:
        return self.nats / LN2


def _prefactor(m: int, g: float) -> float:
    return math.exp(m * math.log(m) - m * math.log(g) - math.lgamma(m))


def b_base(m: int, k: int, gamma_bar: float) -> float:
    """Closed form of B_k(m, 1, gamma_bar)."""
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise DomainError(f"k must be a nonnegative integer, got {k!r}")
    T = t_factor(m, gamma_bar)
    return math.sqrt(4.0 * gamma_bar / (2 * m + gamma_bar)) * _prefactor(m, gamma_bar) / (k + T)


def _b_levels(m: int, n: int, g: float, ks: np.ndarray) -> np.ndarray:
    """B_k(m, n, g) for the integer array ``ks``, by the divisor recursion for n >= 2."""
    return _b_levels_with_rounding(m, n, g, ks)[0]


def _b_levels_with_rounding(m: int, n: int, g: float, ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """B_k levels plus a first-order bound on their accumulated rounding error."""
    ks = np.asarray(ks, dtype=float)
    if n == 0:
        return np.zeros_like(ks), np.zeros_like(ks)
    T = t_factor(m, g)
    c = m + 0.5 * g
    log_p = m * math.log(m) - m * math.log(g) - math.lgamma(m)
    level = math.sqrt(4.0 * g / (2 * m + g)) * math.exp(log_p) / (ks + T)
    rounding = ROUNDING_UNIT * np.abs(level)
    if n == 1:
        return level, rounding
    divisor = 1.0 - (2 * ks + 1) ** 2 * g / (2 * c)
    bad = np.flatnonzero(np.abs(divisor) <= DIVISOR_GUARD)
    if bad.size:
        raise SingularFactorError(int(ks[bad[0]]), g, m)
    for j in range(2, n + 1):
        log_df = (
            log_p
            + (j + 0.5) * math.log(g)
            + math.log(double_factorial(2 * j - 3))
            - (j - 1) * math.log(2.0)
            - (j + 0.5) * math.log(c)
        )
        carried = (j - 1) * g / c * level
        source = math.sqrt(2.0) * (2 * ks + 1) * math.exp(log_df)
        level = (carried - source) / divisor
        # the two parts nearly cancel when the mean SNR is small and m large
        rounding = ((j - 1) * g / c * rounding + ROUNDING_UNIT * (np.abs(carried) + source)) / np.abs(divisor)
    return level, rounding


def b_recursive(params: RecursionParams, k: int) -> float:
    """B_k(m, n, mean_snr); n = 1 via the closed form, n >= 2 via the divisor recursion.

    Raises SingularFactorError when |D_k| <= DIVISOR_GUARD.
    """
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise DomainError(f"k must be a nonnegative integer, got {k!r}")
    if params.n == 0:
        return 0.0
    if params.n == 1:
        return b_base(params.m, k, params.mean_snr)
    return float(_b_levels(params.m, params.n, params.mean_snr, np.array([k]))[0])


def singular_index(m: int, gamma_bar: float, k_max: int = EULER_TERMS - 1) -> int | None:
    """Smallest k <= k_max with gamma_bar((2k+1)^2 - 1) = 2m (within the guard), else None."""
    c = m + 0.5 * gamma_bar
    for k in range(k_max + 1):
        if abs(1.0 - (2 * k + 1) ** 2 * gamma_bar / (2 * c)) <= DIVISOR_GUARD:
            return k
    return None


def _alternating_sum(m: int, n: int, g: float, K: int) -> tuple[float, float]:
    """sum_k (-1)^k B_k(m, n, g) and a truncation indicator."""
    T = t_factor(m, g)
    if n == 1:
        coef = math.sqrt(4.0 * g / (2 * m + g)) * _prefactor(m, g)
        beta = beta_expansion(T, K)
        return coef * beta.value, coef * beta.last_term_magnitude
    if n == 2:
        # B_k(m,2) = C [2/(k+T) + (2T-1)/(k+T)^2], C = P g^1.5 c^-1.5 / (2 sqrt 2)
        c = m + 0.5 * g
        coef = math.exp(
            m * math.log(m) - m * math.log(g) - math.lgamma(m) + 1.5 * math.log(g) - 1.5 * math.log(c)
        ) / (2.0 * math.sqrt(2.0))
        beta = beta_expansion(T, K)
        beta2 = beta_prime_series(T, K)
        value = coef * (2.0 * beta.value + (2.0 * T - 1.0) * beta2.value)
        err = coef * (2.0 * beta.last_term_magnitude + (2.0 * T - 1.0) * beta2.last_term_magnitude)
        return value, err
    terms, rounding = _b_levels_with_rounding(m, n, g, np.arange(EULER_TERMS))
    res = special.euler_alternating_sum(terms)
    # the transform weights the j-th difference by 2^-(j+1), so noise grows at most by terms_used/2
    noise = 0.5 * res.terms_used * float(np.max(rounding[: res.terms_used]))
    return float(res.value), float(res.last_term_magnitude) + noise


def f_recursive(params: RecursionParams) -> float:
    """F(m, n, mean_snr), the Gamma-weighted BPSK deficit."""
    return _f_with_error(params)[0]


def _f_with_error(params: RecursionParams) -> tuple[float, float]:
    m, g, K = params.m, params.mean_snr, params.k_terms
    f, err, rounding = 0.0, 0.0, 0.0
    boundary = g * LN2 / m * _prefactor(m, g)  # 2 H1 P
    for j in range(1, params.n + 1):
        s, s_err = _alternating_sum(m, j, g, K)
        carry = (j - 1) * g / m
        parts = ((boundary if j == 1 else 0.0), carry * f, -g / (2 * m) * s)
        f = math.fsum(parts)
        err = carry * err + g / (2 * m) * s_err
        # cancellation between large parts (small mean SNR, large m) costs digits
        rounding = carry * rounding + ROUNDING_UNIT * max(abs(x) for x in parts)
    return f, err + rounding


def _clamp(value: float, upper: float, label: str) -> float:
    if value < -CLAMP_WARN or value > upper + CLAMP_WARN:
        warnings.warn(f"{label}: raw value {value!r} outside [0, {upper}]; clamped", RuntimeWarning, stacklevel=3)
    return min(max(value, 0.0), upper)


def nakagami_mi_recursive(m: int, mean_snr: float, K: int | None = None) -> MiEstimate:
    """I_B(m, mean_snr) from the recursion; ``mean_snr`` is the mean of the Gamma SNR."""
    params = RecursionParams(m, m, mean_snr, K)
    f, err = _f_with_error(params)
    nats = _clamp(LN2 - f, LN2, f"I_B(m={m}, mean={mean_snr})")
    return MiEstimate(float(nats), Engine.RECURSIVE, params.k_terms, float(err))


def _laguerre_deficit(m: int, mean_snr: float, rule: QuadratureRule) -> float:
    # Gamma(m, scale s) average of d(gamma) = ln2 - I(gamma). d decays like
    # exp(-gamma/2), so fold that into the weight: gamma = t/lam, lam = 1/2 + 1/s.
    s = mean_snr / m
    lam = 0.5 + 1.0 / s
    x = rule.nodes / lam
    d = np.asarray(bpsk_mi_deficit(x))
    with np.errstate(divide="ignore"):
        h = np.exp(0.5 * x + np.log(d))
    return float(np.dot(rule.weights, h)) / math.exp(math.lgamma(m) + m * math.log(s * lam))


def _reduced_deficit(m: int, mean_snr: float, order: int) -> float:
    """Gamma average of the shifted-form deficit with the gamma integral done exactly.

    Swapping the order of integration leaves, for each shift v, the integral
    of gamma^(m-3/2) exp(-(1/2 + 1/s) gamma - v^2/(2 gamma)), a Bessel K of
    half-integer order, hence e^(-r v) times a polynomial in v with
    r = sqrt(1 + 2/s). What remains is a smooth Laguerre integral in v.
    """
    s = mean_snr / m
    r = math.sqrt(1.0 + 2.0 / s)
    lag = gauss_laguerre(order, 0.0)
    v = lag.nodes / (1.0 + r)
    j = np.arange(m)
    log_c = np.array([math.lgamma(m + i) - math.lgamma(i + 1) - math.lgamma(m - i) for i in j])
    with np.errstate(divide="ignore"):
        log_w = np.log(lag.weights * shifted_kernel(v))
    log_terms = log_w[:, None] + (m - 1 - j)[None, :] * np.log(v)[:, None] + (log_c - j * math.log(2.0 * r))[None, :]
    log_scale = math.lgamma(m) + m * math.log(s * r) + math.log1p(r)
    return math.exp(float(logsumexp(log_terms)) - log_scale)


def nakagami_mi_quadrature(m: int, mean_snr: float, rule: QuadratureRule | None = None) -> MiEstimate:
    """I_B(m, mean_snr) by Gauss-Laguerre quadrature.

    Without ``rule`` the Gamma average is taken in closed form and only a
    smooth shift integral is left to quadrature (about 1e-16 relative at the
    default order). An explicit generalized-Laguerre rule with alpha = m - 1
    integrates directly in gamma instead, which converges only algebraically.
    The diagnostic is the change against half the order.
    """
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    mean_snr = float(mean_snr)
    if not (mean_snr > 0) or not math.isfinite(mean_snr):
        raise DomainError(f"mean_snr must be positive and finite, got {mean_snr!r}")
    if rule is None:
        deficit = _reduced_deficit(m, mean_snr, REDUCED_ORDER)
        delta = abs(deficit - _reduced_deficit(m, mean_snr, REDUCED_ORDER // 2))
    else:
        if rule.kind != LAGUERRE or rule.alpha != m - 1:
            raise ConfigurationError(
                f"need a generalized-Laguerre rule with alpha={m - 1}, got {rule.kind}({rule.alpha})"
            )
        deficit = _laguerre_deficit(m, mean_snr, rule)
        delta = 0.0
        if rule.order >= 2:
            delta = abs(deficit - _laguerre_deficit(m, mean_snr, gauss_laguerre(rule.order // 2, m - 1)))
    nats = _clamp(LN2 - deficit, LN2, f"quadrature I_B(m={m}, mean={mean_snr})")
    return MiEstimate(float(nats), Engine.QUADRATURE, 0, float(delta), float(deficit))
