"""Gauss-Hermite and generalized Gauss-Laguerre rules.

Nodes and weights come from :mod:`scipy.special` (Golub-Welsch eigenvalues
of the Jacobi matrix, polished by Newton steps on the three-term recurrence)
and are wrapped in an immutable :class:`QuadratureRule`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import special

from .errors import ConfigurationError

MAX_ORDER = 256

HERMITE = "hermite"
LAGUERRE = "generalized-laguerre"


@dataclass(frozen=True)
class QuadratureRule:
    """Fixed Gaussian rule: sum(weights * f(nodes)) approximates the weighted integral.

    ``kind`` is ``"hermite"`` (weight exp(-u^2) on the real line) or
    ``"generalized-laguerre"`` (weight x^alpha exp(-x) on the half line).
    """

    kind: str
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    alpha: float = 0.0

    @property
    def order(self) -> int:
        return int(self.nodes.size)

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def _check_order(order) -> int:
    if isinstance(order, bool) or int(order) != order or not 1 <= order <= MAX_ORDER:
        raise ConfigurationError(f"quadrature order must be an integer in [1, {MAX_ORDER}], got {order!r}")
    return int(order)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def gauss_hermite(order: int) -> QuadratureRule:
    """Rule exact for int exp(-u^2) p(u) du, deg p <= 2*order - 1."""
    return _hermite(_check_order(order))


def gauss_laguerre(order: int, alpha: float = 0.0) -> QuadratureRule:
    """Rule exact for int_0^inf x^alpha exp(-x) p(x) dx, deg p <= 2*order - 1."""
    order = _check_order(order)
    if isinstance(alpha, bool):
        raise ConfigurationError(f"Laguerre alpha must be a real number, got {alpha!r}")
    alpha = float(alpha)
    if not (alpha > -1.0) or not math.isfinite(alpha):
        raise ConfigurationError(f"Laguerre alpha must be > -1, got {alpha!r}")
    return _laguerre(order, alpha)


# validation happens before the cache: True == 1 would otherwise hit a cached entry
@lru_cache(maxsize=None)
def _hermite(order: int) -> QuadratureRule:
    nodes, weights = special.roots_hermite(order)
    # scipy returns (numerically) symmetric nodes; enforce exact symmetry
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    if order % 2:
        nodes[order // 2] = 0.0
    return QuadratureRule(HERMITE, _freeze(nodes), _freeze(weights))


@lru_cache(maxsize=None)
def _laguerre(order: int, alpha: float) -> QuadratureRule:
    nodes, weights = special.roots_genlaguerre(order, alpha)
    return QuadratureRule(LAGUERRE, _freeze(nodes), _freeze(weights), alpha)
