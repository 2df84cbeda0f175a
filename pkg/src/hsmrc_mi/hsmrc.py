"""Ergodic mutual information of H-S/MRC receivers.

The post-selection SNR density is a signed mixture of Gamma densities (see
:mod:`hsmrc_mi.pfd`), so the ergodic MI is the same mixture of single-link
Nakagami values:

    C = sum_k A_{1,k} I_B(k, k gamma_bar) + sum_{n>=2} A_{n,1} I_B(1, gamma_bar L/(L+n-1)).

Four engines evaluate it: the general recursion, accelerated closed forms for
L = 1 and L = 2, Gauss-Laguerre quadrature per mixture component and
Monte-Carlo. QPSK is handled as two BPSK rails at half the SNR.
"""

from __future__ import annotations

import math

from .awgn import Modulation
from .errors import ConfigurationError, SingularFactorError
from .nakagami import (
    Engine,
    MiEstimate,
    nakagami_mi_quadrature,
    nakagami_mi_recursive,
)
from .pfd import SystemConfig, l2_coefficients, pfd_coefficients, sc_coefficients
from .quadrature import gauss_laguerre
from .special import beta_expansion, beta_prime_series, resolve_k, t_factor

XI3_T1 = "t1"
XI3_T2 = "t2"


def _components(config: SystemConfig):
    """(weight, shape m, Gamma mean) for every mixture component."""
    L, g = config.l, config.gamma_bar
    out = []
    for n, k, pole, a in pfd_coefficients(config).items():
        if n == 1:
            out.append((a, k, k * g))
        else:
            out.append((a, 1, -1.0 / pole.c))
    return out


def _per_rail(config: SystemConfig) -> tuple[SystemConfig, int]:
    """BPSK-equivalent config and the number of rails."""
    if config.modulation is Modulation.QPSK:
        return config.with_gamma_bar(0.5 * config.gamma_bar), 2
    return config, 1


def _finish(
    config: SystemConfig, nats: float, engine: Engine, k_terms: int, diag: float, deficit: float | None = None
) -> MiEstimate:
    cap = config.modulation.max_nats
    return MiEstimate(min(max(float(nats), 0.0), cap), engine, k_terms, float(diag), deficit)


def ergodic_mi_general(config: SystemConfig, K: int | None = None) -> MiEstimate:
    """Mixture of recursive Nakagami values; raises SingularFactorError when a divisor vanishes."""
    K = resolve_k(K)
    rail, rails = _per_rail(config)
    values, diag = [], 0.0
    for a, m, mean in _components(rail):
        est = nakagami_mi_recursive(m, mean, K)
        values.append(a * est.nats)
        diag += abs(a) * est.diagnostic
    return _finish(config, rails * math.fsum(values), Engine.RECURSIVE, K, rails * diag)


def ergodic_mi_quadrature(config: SystemConfig, order: int | None = None) -> MiEstimate:
    """Mixture of quadrature Nakagami values; the reference engine.

    By default each component uses the closed-form Gamma average (see
    :func:`nakagami_mi_quadrature`). Passing ``order`` integrates every
    component directly in gamma with that generalized-Laguerre order instead.
    The diagnostic bounds the order-halving change.
    """
    rail, rails = _per_rail(config)
    values, deficits, diag = [], [], 0.0
    for a, m, mean in _components(rail):
        rule = None if order is None else gauss_laguerre(order, m - 1)
        est = nakagami_mi_quadrature(m, mean, rule)
        values.append(a * est.nats)
        deficits.append(a * est.deficit)
        diag += abs(a) * est.diagnostic
    deficit = max(rails * math.fsum(deficits), 0.0)
    return _finish(config, rails * math.fsum(values), Engine.QUADRATURE, 0, rails * diag, deficit)


def _sc_bpsk(n_r: int, g: float, K: int) -> tuple[float, float]:
    values, diag = [], 0.0
    for n, a in enumerate(sc_coefficients(n_r), start=1):
        x = g / n
        beta = beta_expansion(t_factor(1, x), K)
        amp = math.sqrt(x / (2.0 + x))
        values.append(a * amp * beta.value)
        diag += abs(a) * amp * beta.last_term_magnitude
    return math.fsum(values), diag


def ergodic_mi_sc(n_r: int, gamma_bar: float, K: int | None = None, modulation=Modulation.BPSK) -> MiEstimate:
    """Selection combining (L = 1) by the accelerated beta series."""
    config = SystemConfig(n_r, 1, gamma_bar, modulation)
    K = resolve_k(K)
    rail, rails = _per_rail(config)
    value, diag = _sc_bpsk(n_r, rail.gamma_bar, K)
    return _finish(config, rails * value, Engine.CLOSED_FORM, K, rails * diag)


def _l2_bpsk(n_r: int, g: float, K: int, xi3: str) -> tuple[float, float]:
    a12, singles = l2_coefficients(n_r)
    T = t_factor(2, 2.0 * g)
    xi1 = beta_prime_series(T, K)
    xi2 = beta_expansion(T, K)
    c1 = 1.0 / (4.0 + 2.0 * g)
    c2 = math.sqrt(g / (2.0 + g)) * (3.0 + g) / (2.0 + g)
    values = [a12 * c1 * xi1.value, a12 * c2 * xi2.value]
    diag = abs(a12) * (c1 * xi1.last_term_magnitude + c2 * xi2.last_term_magnitude)
    shape = 1 if xi3 == XI3_T1 else 2
    for n, a in enumerate(singles, start=1):
        x = 2.0 * g / (n + 1)
        xi3_sum = beta_expansion(t_factor(shape, x), K)
        amp = math.sqrt(x / (2.0 + x))
        values.append(a * amp * xi3_sum.value)
        diag += abs(a) * amp * xi3_sum.last_term_magnitude
    return math.fsum(values), diag


def ergodic_mi_l2(
    n_r: int, gamma_bar: float, K: int | None = None, modulation=Modulation.BPSK, xi3: str = XI3_T1
) -> MiEstimate:
    """L = 2 accelerated closed form.

    ``xi3="t2"`` evaluates the single-pole series at the shape-2 offset instead
    of the shape-1 one; it exists only to show that this variant is wrong.
    """
    if xi3 not in (XI3_T1, XI3_T2):
        raise ConfigurationError(f"xi3 must be 't1' or 't2', got {xi3!r}")
    config = SystemConfig(n_r, 2, gamma_bar, modulation)
    K = resolve_k(K)
    rail, rails = _per_rail(config)
    value, diag = _l2_bpsk(n_r, rail.gamma_bar, K, xi3)
    return _finish(config, rails * value, Engine.CLOSED_FORM, K, rails * diag)


def ergodic_mi_closed_form(config: SystemConfig, K: int | None = None) -> MiEstimate:
    if config.l == 1:
        return ergodic_mi_sc(config.n_r, config.gamma_bar, K, config.modulation)
    if config.l == 2:
        return ergodic_mi_l2(config.n_r, config.gamma_bar, K, config.modulation)
    raise ConfigurationError(f"closed-form engine needs L in {{1, 2}}, got L={config.l}")


def parse_engine(engine: Engine | str | None) -> Engine | None:
    """None or "auto" selects automatically; otherwise an :class:`Engine`."""
    if engine is None or isinstance(engine, Engine):
        return engine
    if str(engine).lower() == "auto":
        return None
    aliases = {"recursive": Engine.RECURSIVE, "mc": Engine.MONTE_CARLO}
    key = str(engine).lower()
    if key in aliases:
        return aliases[key]
    try:
        return Engine(key)
    except ValueError:
        choices = ", ".join(["auto"] + [e.value for e in Engine])
        raise ConfigurationError(f"unknown engine {engine!r}; choose from {choices}") from None


def ergodic_mi(
    config: SystemConfig,
    engine: Engine | str | None = None,
    K: int | None = None,
    *,
    trials: int = 1_000_000,
    seed: int = 0,
    allow_fallback: bool = True,
) -> MiEstimate:
    """Ergodic MI with engine dispatch.

    Automatic choice: closed form for L <= 2, the recursion otherwise. A
    vanishing recursion divisor falls back to quadrature unless
    ``allow_fallback`` is false. The returned estimate names the engine used.
    """
    choice = parse_engine(engine)
    if choice is Engine.MONTE_CARLO:
        from .montecarlo import mc_ergodic_mi

        res = mc_ergodic_mi(config, trials, seed)
        return MiEstimate(res.mean_mi, Engine.MONTE_CARLO, 0, res.std_err, res.mean_deficit)
    if choice is Engine.QUADRATURE:
        return ergodic_mi_quadrature(config)
    if choice is Engine.CLOSED_FORM or (choice is None and config.l <= 2):
        return ergodic_mi_closed_form(config, K)
    try:
        return ergodic_mi_general(config, K)
    except SingularFactorError:
        if not allow_fallback:
            raise
        return ergodic_mi_quadrature(config)
