"""Exception hierarchy shared by all modules."""


class HsmrcError(Exception):
    """Base class for every error raised by this package."""


class DomainError(HsmrcError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConfigurationError(HsmrcError, ValueError):
    """Invalid system configuration, quadrature order or engine selection."""


class SingularityError(HsmrcError, ArithmeticError):
    """A transform was evaluated exactly at one of its poles."""


class NumericalGuardError(HsmrcError, ArithmeticError):
    """A numerical stability guard tripped; the result would be unreliable."""


class SingularFactorError(NumericalGuardError):
    """The divisor of the B_k recursion vanished (to within the guard)."""

    def __init__(self, k: int, gamma_bar: float, m: int | None = None):
        self.k = k
        self.gamma_bar = gamma_bar
        self.m = m
        super().__init__(
            f"singular recursion divisor at k={k}, mean SNR={gamma_bar!r}"
            + (f", m={m}" if m is not None else "")
            + "; use the quadrature engine instead"
        )


class IllConditionedExpansionError(NumericalGuardError):
    """The partial-fraction weights cancel too badly to be trusted."""

    def __init__(self, n_r: int, l: int, residual: float):
        self.n_r = n_r
        self.l = l
        self.residual = residual
        super().__init__(
            f"partial-fraction expansion ill-conditioned for N_r={n_r}, L={l}: "
            f"reconstruction residual {residual:.3e}"
        )
