"""BPSK/QPSK input-output mutual information over a static AWGN channel.

For BPSK at SNR gamma the kernel is

    I(gamma) = ln 2 - E_u[ ln(1 + exp(-2 sqrt(gamma) u - 2 gamma)) ],  u ~ N(0, 1),

evaluated with Gauss-Hermite quadrature after u = sqrt(2) t. Everything is in
nats; use :func:`nats_to_bits` at the presentation layer.

The log term has complex singularities about pi/(2 sqrt(gamma)) from the real
u-axis, so a plain Hermite rule stalls near 1e-7 around gamma ~ 5. From
gamma = 1 upward the deficit is instead written, with v = sqrt(gamma) (u + sqrt(gamma)),

    ln2 - I = e^(-gamma/2)/sqrt(gamma) int_0^inf e^(-v) phi(v/sqrt(gamma)) h(v) dv,
    h(v) = (1 + e^(2v)) ln(1 + e^(-2v)) + 2v,

which is smooth on the half line and goes to a Gauss-Laguerre rule of the
same order as the Hermite one.
"""

from __future__ import annotations

import enum
import math
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import logsumexp

from .errors import ConfigurationError, DomainError
from .quadrature import HERMITE, QuadratureRule, gauss_hermite, gauss_laguerre

LN2 = math.log(2.0)
DEFAULT_HERMITE_ORDER = 64
SHIFTED_FORM_MIN_SNR = 1.0


class Modulation(str, enum.Enum):
    BPSK = "bpsk"
    QPSK = "qpsk"

    @property
    def bits_per_symbol(self) -> int:
        return 1 if self is Modulation.BPSK else 2

    @property
    def max_nats(self) -> float:
        return self.bits_per_symbol * LN2

    @classmethod
    def parse(cls, value: "Modulation | str") -> "Modulation":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(f"unknown modulation {value!r}; expected bpsk or qpsk") from None


def nats_to_bits(nats):
    return nats / LN2


def bits_to_nats(bits):
    return bits * LN2


def _hermite_rule(rule: QuadratureRule | None) -> QuadratureRule:
    if rule is None:
        return gauss_hermite(DEFAULT_HERMITE_ORDER)
    if rule.kind != HERMITE:
        raise ConfigurationError(f"AWGN kernel needs a Hermite rule, got {rule.kind}")
    return rule


def _as_snr(gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=float)
    if np.any(np.isnan(g)) or np.any(g < 0):
        raise DomainError("SNR must be nonnegative")
    return g


def bpsk_mi_deficit(gamma, rule: QuadratureRule | None = None):
    """ln 2 - I(gamma), computed without the subtraction.

    Keeps full relative accuracy where the deficit is tiny (high SNR), which
    the fading-average quadrature relies on.
    """
    rule = _hermite_rule(rule)
    g = _as_snr(gamma)
    out = np.empty(g.shape)
    low = g < SHIFTED_FORM_MIN_SNR
    out[low] = _hermite_deficit(g[low], rule)
    out[~low] = _shifted_deficit(g[~low], rule.order)
    out = np.clip(out, 0.0, LN2)
    return out if out.ndim else float(out)


def _hermite_deficit(g: np.ndarray, rule: QuadratureRule) -> np.ndarray:
    s = 2.0 * math.sqrt(2.0) * np.sqrt(g)[..., None] * rule.nodes + 2.0 * g[..., None]
    # ln(1 + e^-s), overflow-free in both tails
    return np.logaddexp(0.0, -s) @ rule.weights / math.sqrt(math.pi)


def shifted_kernel(v: np.ndarray) -> np.ndarray:
    """(1 + e^(2v)) ln(1 + e^(-2v)) + 2v for v >= 0, the smooth factor of the shifted form."""
    v = np.asarray(v, dtype=float)
    e = np.exp(-2.0 * v)
    tail = np.log1p(e)
    ratio = np.ones_like(v)  # e^(2v) ln(1 + e^(-2v)), -> 1 once e underflows
    nz = e > 0
    ratio[nz] = tail[nz] / e[nz]
    return ratio + tail + 2.0 * v


@lru_cache(maxsize=None)
def _shifted_integrand(order: int) -> tuple[np.ndarray, np.ndarray]:
    lag = gauss_laguerre(order, 0.0)
    return lag.nodes, lag.weights * shifted_kernel(lag.nodes)


def _shifted_log_deficit(g: np.ndarray, order: int) -> np.ndarray:
    if g.size == 0:
        return np.zeros(g.shape)
    v, wh = _shifted_integrand(order)
    a = np.sqrt(g)[..., None]
    log_phi = -0.5 * np.square(v / a) - 0.5 * math.log(2.0 * math.pi)
    # all weights and h are positive, so the sum is safe in the log domain
    return logsumexp(log_phi + np.log(wh), axis=-1) - 0.5 * g - np.log(a[..., 0])


def _shifted_deficit(g: np.ndarray, order: int) -> np.ndarray:
    return np.exp(_shifted_log_deficit(g, order))


def bpsk_log_deficit(gamma, rule: QuadratureRule | None = None):
    """log(ln 2 - I(gamma)); finite for every finite gamma (no underflow at high SNR)."""
    rule = _hermite_rule(rule)
    g = _as_snr(gamma)
    out = np.empty(g.shape)
    low = g < SHIFTED_FORM_MIN_SNR
    out[low] = np.log(np.clip(_hermite_deficit(g[low], rule), 1e-300, LN2))
    out[~low] = _shifted_log_deficit(g[~low], rule.order)
    return out if out.ndim else float(out)


def bpsk_mi(gamma, rule: QuadratureRule | None = None):
    """BPSK mutual information I(gamma) in nats, clamped to [0, ln 2]."""
    g = _as_snr(gamma)
    out = np.clip(LN2 - np.asarray(bpsk_mi_deficit(g, rule)), 0.0, LN2)
    out = np.where(g == 0.0, 0.0, out)
    return out if out.ndim else float(out)


def constellation_mi(gamma, mod: Modulation | str = Modulation.BPSK, rule: QuadratureRule | None = None):
    """MI in nats for BPSK, or QPSK treated as two orthogonal BPSK rails.

    Unit-power QPSK puts gamma/2 on each rail, hence ``2 * bpsk_mi(gamma / 2)``.
    """
    mod = Modulation.parse(mod)
    if mod is Modulation.BPSK:
        return bpsk_mi(gamma, rule)
    g = _as_snr(gamma)
    out = 2.0 * np.asarray(bpsk_mi(0.5 * g, rule))
    return out if out.ndim else float(out)


class TabulatedBpskMi:
    """Cubic-spline surrogate of the BPSK kernel, for bulk evaluation.

    The tabulated quantity is log(ln 2 - I) + gamma/2 against log gamma, which
    is smooth over the whole range and keeps the deficit's relative accuracy at
    high SNR. Below ``gamma_min`` the kernel is linear (I ~ gamma/2); above
    ``gamma_max`` the deficit underflows.
    """

    def __init__(self, gamma_min: float = 1e-9, gamma_max: float = 1e5, points: int = 4001, rule=None):
        self.gamma_min = gamma_min
        self.gamma_max = gamma_max
        log_grid = np.linspace(math.log(gamma_min), math.log(gamma_max), points)
        grid = np.exp(log_grid)
        self._spline = CubicSpline(log_grid, bpsk_log_deficit(grid, rule) + 0.5 * grid)
        self._slope_at_min = float(bpsk_mi(gamma_min, rule)) / gamma_min

    def deficit(self, gamma):
        """ln 2 - I(gamma)."""
        g = np.atleast_1d(np.asarray(gamma, dtype=float))
        low = g < self.gamma_min
        high = g > self.gamma_max
        mid = ~(low | high)
        out = np.empty_like(g)
        out[low] = LN2 - self._slope_at_min * g[low]
        out[high] = 0.0
        out[mid] = np.exp(self._spline(np.log(g[mid])) - 0.5 * g[mid])
        out = np.clip(out, 0.0, LN2)
        return out.reshape(np.shape(gamma)) if np.ndim(gamma) else float(out[0])

    def __call__(self, gamma):
        return LN2 - self.deficit(gamma)


@lru_cache(maxsize=1)
def tabulated_bpsk_mi() -> TabulatedBpskMi:
    return TabulatedBpskMi()
