"""Ergodic BPSK/QPSK mutual information of hybrid selection/MRC receivers.

The analytic engines express the ergodic value as a signed mixture of
Nakagami-m single-link values (weights from a partial-fraction expansion of
the post-selection SNR transform); a quadrature engine and a seeded
Monte-Carlo simulator serve as references.
"""

__version__ = "0.1.0"

from .awgn import LN2, Modulation, bits_to_nats, bpsk_mi, bpsk_mi_deficit, constellation_mi, nats_to_bits
from .errors import (
    ConfigurationError,
    DomainError,
    HsmrcError,
    IllConditionedExpansionError,
    NumericalGuardError,
    SingularFactorError,
    SingularityError,
)
from .hsmrc import (
    ergodic_mi,
    ergodic_mi_closed_form,
    ergodic_mi_general,
    ergodic_mi_l2,
    ergodic_mi_quadrature,
    ergodic_mi_sc,
)
from .montecarlo import McResult, hsmrc_combine, mc_ergodic_mi, mc_snr_moments, sample_branch_snrs
from .nakagami import Engine, MiEstimate, nakagami_mi_quadrature, nakagami_mi_recursive
from .pfd import PfdExpansion, SystemConfig, pfd_coefficients, snr_pdf
from .quadrature import QuadratureRule, gauss_hermite, gauss_laguerre
from .special import beta_definition, beta_expansion, beta_prime_series

__all__ = [
    "LN2",
    "ConfigurationError",
    "DomainError",
    "Engine",
    "HsmrcError",
    "IllConditionedExpansionError",
    "McResult",
    "MiEstimate",
    "Modulation",
    "NumericalGuardError",
    "PfdExpansion",
    "QuadratureRule",
    "SingularFactorError",
    "SingularityError",
    "SystemConfig",
    "beta_definition",
    "beta_expansion",
    "beta_prime_series",
    "bits_to_nats",
    "bpsk_mi",
    "bpsk_mi_deficit",
    "constellation_mi",
    "ergodic_mi",
    "ergodic_mi_closed_form",
    "ergodic_mi_general",
    "ergodic_mi_l2",
    "ergodic_mi_quadrature",
    "ergodic_mi_sc",
    "gauss_hermite",
    "gauss_laguerre",
    "hsmrc_combine",
    "mc_ergodic_mi",
    "mc_snr_moments",
    "nakagami_mi_quadrature",
    "nakagami_mi_recursive",
    "nats_to_bits",
    "pfd_coefficients",
    "sample_branch_snrs",
    "snr_pdf",
]
