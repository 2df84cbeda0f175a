"""Distribution of the post-selection SNR of an H-S/MRC receiver.

Selecting the L strongest of N_r i.i.d. exponential branch SNRs (mean
gamma_bar) and summing them gives a Gamma whose transform is

    Psi(phi) = (1 - phi gamma_bar)^-L  prod_{n=L+1}^{N_r} (1 - phi gamma_bar L/n)^-1.

Writing each factor as c/(c + phi) with c < 0, the canonical partial-fraction
expansion is

    Psi(phi) = sum_k A_{1,k} (c_1/(c_1+phi))^k + sum_{n>=2} A_{n,1} c_n/(c_n+phi),

one pole of multiplicity L at c_1 = -1/gamma_bar and N_r - L simple poles
c_n = -(L+n-1)/(L gamma_bar), n = 2..N_r-L+1. Inverting term by term gives a
mixture of Gamma densities.

Pole indices follow the layout above throughout the package; the closed-form
helpers :func:`sc_coefficients` and :func:`l2_coefficients` return the same
weights in that indexing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .awgn import Modulation
from .errors import ConfigurationError, DomainError, IllConditionedExpansionError, SingularityError

MAX_BRANCHES = 64
RESIDUAL_LIMIT = 1e-8
RESIDUAL_FREQUENCIES = 32
_RESIDUAL_SEED = 0x5EED


@dataclass(frozen=True)
class SystemConfig:
    """N_r receive branches, the L strongest combined, average branch SNR gamma_bar (linear)."""

    n_r: int
    l: int
    gamma_bar: float
    modulation: Modulation = Modulation.BPSK

    def __post_init__(self):
        for name in ("n_r", "l"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ConfigurationError(f"{name} must be an integer, got {v!r}")
        if not 1 <= self.n_r <= MAX_BRANCHES:
            raise ConfigurationError(f"n_r must be in [1, {MAX_BRANCHES}], got {self.n_r}")
        if not 1 <= self.l <= self.n_r:
            raise ConfigurationError(f"l must satisfy 1 <= l <= n_r={self.n_r}, got {self.l}")
        g = float(self.gamma_bar)
        if not (g > 0) or not math.isfinite(g):
            raise ConfigurationError(f"gamma_bar must be positive and finite, got {self.gamma_bar!r}")
        object.__setattr__(self, "n_r", int(self.n_r))
        object.__setattr__(self, "l", int(self.l))
        object.__setattr__(self, "gamma_bar", g)
        object.__setattr__(self, "modulation", Modulation.parse(self.modulation))

    @classmethod
    def from_db(cls, n_r: int, l: int, snr_db: float, modulation: Modulation | str = Modulation.BPSK):
        return cls(n_r, l, 10.0 ** (float(snr_db) / 10.0), modulation)

    def with_gamma_bar(self, gamma_bar: float) -> "SystemConfig":
        return SystemConfig(self.n_r, self.l, gamma_bar, self.modulation)

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.gamma_bar)


@dataclass(frozen=True)
class PoleSpec:
    c: float
    mu: int

    def __post_init__(self):
        if not self.c < 0:
            raise DomainError(f"pole parameter must be negative, got {self.c}")
        if self.mu < 1:
            raise DomainError(f"multiplicity must be >= 1, got {self.mu}")


@dataclass(frozen=True)
class PfdExpansion:
    poles: tuple[PoleSpec, ...]
    weights: dict = field(repr=False)  # (n, k) -> A_{n,k}, 1-based
    reconstruction_residual: float = 0.0

    def weight_sum(self) -> float:
        return math.fsum(self.weights.values())

    def items(self):
        """Yield (n, k, pole, A_nk) in canonical order."""
        for n, pole in enumerate(self.poles, start=1):
            for k in range(1, pole.mu + 1):
                yield n, k, pole, self.weights[(n, k)]

    def canonical(self, phi: complex) -> complex:
        """Evaluate the canonical expansion at frequency phi."""
        phi = complex(phi)
        re, im = [], []
        for _, k, pole, a in self.items():
            v = a * (pole.c / (pole.c + phi)) ** k
            re.append(v.real)
            im.append(v.imag)
        return complex(math.fsum(re), math.fsum(im))


def characteristic_function(config: SystemConfig, phi: complex) -> complex:
    """Product form of the post-selection SNR transform."""
    phi = complex(phi)
    g, L = config.gamma_bar, config.l
    factors = [(1.0 - phi * g, L)]
    factors += [(1.0 - phi * g * L / n, 1) for n in range(L + 1, config.n_r + 1)]
    out = 1.0 + 0.0j
    for f, power in factors:
        if abs(f) < 1e-300:
            raise SingularityError(f"characteristic function evaluated at a pole (phi={phi})")
        out /= f**power
    return out


def pole_spec(config: SystemConfig) -> list[PoleSpec]:
    g, L = config.gamma_bar, config.l
    poles = [PoleSpec(-1.0 / g, L)]
    poles += [PoleSpec(-(L + n - 1) / (L * g), 1) for n in range(2, config.n_r - L + 2)]
    return poles


@lru_cache(maxsize=256)
def _exact_weights(n_r: int, l: int) -> tuple[tuple[int, int, Fraction], ...]:
    """A_{n,k} in exact rational arithmetic (they do not depend on gamma_bar).

    For pole n write t_n(x) = c_n^mu prod_i (c_i/(c_i - c_n + x))^mu_i
    = lead * prod_i (1 + x/d_i)^-mu_i with d_i = c_i - c_n. Its Taylor
    coefficients g_j follow from the log-derivative recurrence
    (j+1) g_{j+1} = sum_i p_i g_{j-i}, p_i being the coefficients of
    -sum mu/(d + x); then A_{n,k} = c_n^(mu-k) g_(mu-k).
    """
    poles = [(Fraction(-1), l)] + [(Fraction(-(l + n - 1), l), 1) for n in range(2, n_r - l + 2)]
    out = []
    for n, (c, mu) in enumerate(poles, start=1):
        others = [q for i, q in enumerate(poles, start=1) if i != n]
        offsets = [qc - c for qc, _ in others]
        lead = Fraction(1)
        for (qc, qmu), d in zip(others, offsets):
            lead *= (qc / d) ** qmu
        p = [
            sum((-qmu * (-1) ** j / d ** (j + 1) for (_, qmu), d in zip(others, offsets)), Fraction(0))
            for j in range(mu)
        ]
        taylor = [Fraction(1)]
        for j in range(mu - 1):
            taylor.append(sum((p[i] * taylor[j - i] for i in range(j + 1)), Fraction(0)) / (j + 1))
        for k in range(1, mu + 1):
            out.append((n, k, lead * c ** (mu - k) * taylor[mu - k]))
    return tuple(out)


def _reconstruction_residual(config: SystemConfig, expansion: PfdExpansion) -> float:
    rng = np.random.default_rng(_RESIDUAL_SEED)
    omegas = rng.uniform(-4.0, 4.0, RESIDUAL_FREQUENCIES) / snr_mean(config)
    worst = 0.0
    for w in omegas:
        phi = 1j * w
        exact = characteristic_function(config, phi)
        worst = max(worst, abs(expansion.canonical(phi) - exact) / abs(exact))
    return worst


def pfd_coefficients(config: SystemConfig) -> PfdExpansion:
    """Weights A_{n,k} of the canonical expansion, with a reconstruction check.

    The weights are exact rationals rounded once to double. The check evaluates
    the canonical sum in double precision, which is how every consumer uses it,
    and raises IllConditionedExpansionError when it misses the product form by
    more than RESIDUAL_LIMIT (relative): the weights alternate in sign and grow
    combinatorially, so large N_r with mid-range L cancels catastrophically.
    """
    poles = pole_spec(config)
    exact = {(n, k): a for n, k, a in _exact_weights(config.n_r, config.l)}
    weights = {key: float(a) for key, a in exact.items()}
    expansion = PfdExpansion(tuple(poles), weights)
    residual = _reconstruction_residual(config, expansion)
    if not residual < RESIDUAL_LIMIT:
        raise IllConditionedExpansionError(config.n_r, config.l, residual)
    return PfdExpansion(tuple(poles), weights, residual)


def sc_coefficients(n_r: int) -> list[float]:
    """Selection-combining (L=1) weights A_{n,1} = prod_{i != n} i/(i-n), n = 1..N_r."""
    if isinstance(n_r, bool) or int(n_r) != n_r or n_r < 1:
        raise ConfigurationError(f"n_r must be a positive integer, got {n_r!r}")
    n_r = int(n_r)
    return [
        float(math.prod((Fraction(i, i - n) for i in range(1, n_r + 1) if i != n), start=Fraction(1)))
        for n in range(1, n_r + 1)
    ]


def l2_coefficients(n_r: int) -> tuple[float, list[float]]:
    """L=2 weights: (A_{1,2}, [A_{1,1}, A_{2,1}, ..., A_{N_r-1,1}]).

    The list entry n carries the exponential branch of mean 2 gamma_bar/(n+1);
    its first element is the k=1 weight of the double pole.
    """
    if isinstance(n_r, bool) or int(n_r) != n_r or n_r < 2:
        raise ConfigurationError(f"L=2 needs an integer n_r >= 2, got {n_r!r}")
    n_r = int(n_r)
    one = Fraction(1)
    a12 = math.prod((Fraction(i + 1, i - 1) for i in range(2, n_r)), start=one)
    a11 = -n_r * (n_r - 1) * sum((Fraction(1, i - 1) for i in range(2, n_r)), start=Fraction(0))
    rest = []
    for n in range(2, n_r):
        a = Fraction(2, 1 - n) ** 2
        a *= math.prod((Fraction(i + 1, i - n) for i in range(2, n)), start=one)
        a *= math.prod((Fraction(i + 1, i - n) for i in range(n + 1, n_r)), start=one)
        rest.append(float(a))
    return float(a12), [float(a11)] + rest


def compensated_sum(terms: np.ndarray, axis: int = 0) -> np.ndarray:
    """Neumaier-compensated sum along ``axis`` (elementwise over the rest)."""
    terms = np.moveaxis(np.asarray(terms, dtype=float), axis, 0)
    total = np.zeros(terms.shape[1:])
    comp = np.zeros(terms.shape[1:])
    for t in terms:
        s = total + t
        big = np.abs(total) >= np.abs(t)
        comp += np.where(big, (total - s) + t, (t - s) + total)
        total = s
    return total + comp


def _pdf_terms(expansion: PfdExpansion, gamma: np.ndarray) -> np.ndarray:
    terms = []
    for _, k, pole, a in expansion.items():
        rate = -pole.c  # 1/scale of this Gamma component
        if k == 1:
            log_pow = 0.0
        else:
            with np.errstate(divide="ignore"):
                log_pow = (k - 1) * np.log(gamma)
        terms.append(a * np.exp(k * math.log(rate) + log_pow - rate * gamma - math.lgamma(k)))
    return np.array(terms)


def snr_pdf(config: SystemConfig, gamma, expansion: PfdExpansion | None = None):
    """Density of the post-selection SNR at gamma (scalar or array)."""
    g = np.asarray(gamma, dtype=float)
    if np.any(np.isnan(g)) or np.any(g < 0):
        raise DomainError("SNR must be nonnegative")
    if expansion is None:
        expansion = pfd_coefficients(config)
    terms = _pdf_terms(expansion, np.atleast_1d(g))
    value = compensated_sum(terms)
    scale = np.abs(terms).sum(axis=0)
    tol = 1e-12 * scale
    if np.any(value < -tol):
        raise IllConditionedExpansionError(config.n_r, config.l, float(np.max(-value / np.maximum(scale, 1e-300))))
    value = np.maximum(value, 0.0)
    return value.reshape(g.shape) if g.ndim else float(value[0])


def snr_mean(config: SystemConfig) -> float:
    """E[Gamma] = L gamma_bar + sum_{n=L+1}^{N_r} gamma_bar L / n."""
    L = config.l
    return config.gamma_bar * math.fsum([L] + [L / n for n in range(L + 1, config.n_r + 1)])


def snr_variance(config: SystemConfig) -> float:
    """Var[Gamma]; Gamma is a sum of independent exponentials (one per factor of Psi)."""
    L = config.l
    return config.gamma_bar**2 * math.fsum([L] + [(L / n) ** 2 for n in range(L + 1, config.n_r + 1)])
