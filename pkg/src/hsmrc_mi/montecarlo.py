"""Seeded Monte-Carlo simulator of Rayleigh-fading H-S/MRC links.

Branch SNRs are drawn directly as exponentials. Trials are grouped into
fixed-size blocks; block ``b`` draws from its own stream
``SeedSequence(seed, spawn_key=(b,))``, and per-block partial sums are
combined with :func:`math.fsum`. The result therefore depends only on
(config, trials, seed), never on how blocks are spread over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .awgn import LN2, Modulation, tabulated_bpsk_mi
from .errors import ConfigurationError, DomainError
from .pfd import SystemConfig

BLOCK_SIZE = 1 << 16
SEED_LIMIT = 1 << 64


@dataclass(frozen=True)
class McResult:
    mean_mi: float
    std_err: float
    trials: int
    empirical_mean_snr: float
    empirical_var_snr: float
    seed: int
    mean_deficit: float = 0.0  # ceiling minus mean_mi, accumulated without rounding to the ceiling

    @property
    def mean_mi_bits(self) -> float:
        return self.mean_mi / LN2


def sample_branch_snrs(n_r: int, gamma_bar: float, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """-gamma_bar ln U with U uniform on (0, 1]; shape (n_r,) or (size, n_r)."""
    if isinstance(n_r, bool) or int(n_r) != n_r or n_r < 1:
        raise DomainError(f"n_r must be a positive integer, got {n_r!r}")
    if not (gamma_bar > 0) or not math.isfinite(gamma_bar):
        raise DomainError(f"gamma_bar must be positive and finite, got {gamma_bar!r}")
    shape = (int(n_r),) if size is None else (int(size), int(n_r))
    u = 1.0 - rng.random(shape)
    return -gamma_bar * np.log(u)


def hsmrc_combine(branch_snrs, l: int):
    """Sum of the ``l`` largest branch SNRs (along the last axis)."""
    v = np.asarray(branch_snrs, dtype=float)
    if v.ndim == 0:
        raise DomainError("need at least one branch")
    n = v.shape[-1]
    if isinstance(l, bool) or int(l) != l or not 1 <= l <= n:
        raise DomainError(f"l must be an integer in [1, {n}], got {l!r}")
    if l == n:
        out = v.sum(axis=-1)
    else:
        out = np.partition(v, n - l, axis=-1)[..., n - l :].sum(axis=-1)
    return out if np.ndim(out) else float(out)


def _check_run(trials, seed) -> tuple[int, int]:
    if isinstance(trials, bool) or int(trials) != trials or trials < 2:
        raise ConfigurationError(f"trials must be an integer >= 2, got {trials!r}")
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < SEED_LIMIT:
        raise ConfigurationError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(trials), int(seed)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _block_stats(config: SystemConfig, seed: int, block: int, count: int, with_mi: bool) -> tuple[float, ...]:
    rng = _block_rng(seed, block)
    snr = hsmrc_combine(sample_branch_snrs(config.n_r, config.gamma_bar, rng, count), config.l)
    snr = np.atleast_1d(snr)
    stats = [float(snr.sum()), float(np.square(snr).sum())]
    if with_mi:
        # accumulate the deficit max_nats - I: near saturation I itself rounds to ln 2
        kernel = tabulated_bpsk_mi()
        if config.modulation is Modulation.QPSK:
            deficit = 2.0 * kernel.deficit(0.5 * snr)
        else:
            deficit = kernel.deficit(snr)
        stats += [float(deficit.sum()), float(np.square(deficit).sum())]
    return tuple(stats)


def _run(config: SystemConfig, trials: int, seed: int, workers: int, with_mi: bool) -> list[tuple[float, ...]]:
    sizes = [min(BLOCK_SIZE, trials - start) for start in range(0, trials, BLOCK_SIZE)]
    jobs = [(config, seed, b, size, with_mi) for b, size in enumerate(sizes)]
    if workers <= 1 or len(jobs) == 1:
        return [_block_stats(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: _block_stats(*job), jobs))


def _mean_var(total: float, total_sq: float, n: int) -> tuple[float, float]:
    mean = total / n
    var = max(total_sq - total * mean, 0.0) / (n - 1)
    return mean, var


def _moments(blocks, n: int, offset: int = 0) -> tuple[float, float]:
    total = math.fsum(b[offset] for b in blocks)
    total_sq = math.fsum(b[offset + 1] for b in blocks)
    return _mean_var(total, total_sq, n)


def mc_ergodic_mi(config: SystemConfig, trials: int, seed: int, workers: int = 1) -> McResult:
    """Sample mean and standard error of the constellation MI of the combined SNR."""
    trials, seed = _check_run(trials, seed)
    blocks = _run(config, trials, seed, workers, with_mi=True)
    snr_mean, snr_var = _moments(blocks, trials)
    deficit_mean, mi_var = _moments(blocks, trials, offset=2)
    std_err = math.sqrt(mi_var / trials)
    return McResult(config.modulation.max_nats - deficit_mean, std_err, trials, snr_mean, snr_var, seed, deficit_mean)


def mc_snr_moments(config: SystemConfig, trials: int, seed: int, workers: int = 1) -> tuple[float, float]:
    """Empirical mean and (unbiased) variance of the combined SNR."""
    trials, seed = _check_run(trials, seed)
    return _moments(_run(config, trials, seed, workers, with_mi=False), trials)
