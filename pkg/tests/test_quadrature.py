import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsmrc_mi.awgn import bpsk_mi
from hsmrc_mi.errors import ConfigurationError
from hsmrc_mi.quadrature import HERMITE, LAGUERRE, MAX_ORDER, gauss_hermite, gauss_laguerre


def test_hermite_order_one():
    rule = gauss_hermite(1)
    assert rule.kind == HERMITE
    assert rule.nodes.tolist() == [0.0]
    assert rule.weights[0] == pytest.approx(math.sqrt(math.pi), rel=1e-15)


def test_hermite_order_two():
    rule = gauss_hermite(2)
    assert rule.nodes == pytest.approx([-1 / math.sqrt(2), 1 / math.sqrt(2)], rel=1e-15)
    assert rule.weights == pytest.approx([math.sqrt(math.pi) / 2] * 2, rel=1e-15)


def test_hermite_fourth_moment():
    assert gauss_hermite(20).integrate(lambda u: u**4) == pytest.approx(3 * math.sqrt(math.pi) / 4, abs=1e-12)


def test_laguerre_examples():
    rule = gauss_laguerre(1, 0.0)
    assert rule.kind == LAGUERRE
    assert rule.nodes[0] == pytest.approx(1.0)
    assert rule.weights[0] == pytest.approx(1.0)
    assert gauss_laguerre(32, 0.0).integrate(lambda x: x) == pytest.approx(1.0, abs=1e-12)
    assert gauss_laguerre(32, 1.0).integrate(np.ones_like) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("order", [1, 2, 7, 64, 128, 256])
def test_hermite_invariants(order):
    rule = gauss_hermite(order)
    assert rule.order == order == rule.weights.size
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(rule.weights > 0)
    assert np.array_equal(np.sort(-rule.nodes), rule.nodes)  # symmetric node set
    assert rule.weights.sum() == pytest.approx(math.sqrt(math.pi), abs=1e-12)


@pytest.mark.parametrize("order", [1, 5, 32, 128])
@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.0, 7.0])
def test_laguerre_invariants(order, alpha):
    rule = gauss_laguerre(order, alpha)
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(math.gamma(alpha + 1), rel=1e-12)


def test_laguerre_order_256_tail_weights_underflow():
    # the largest nodes sit near x ~ 1000, where x^alpha e^-x is below the double range
    rule = gauss_laguerre(MAX_ORDER, 3.0)
    assert np.all(rule.weights >= 0)
    assert rule.weights[0] > 0
    assert rule.weights.sum() == pytest.approx(6.0, rel=1e-12)


@given(st.integers(1, 40), st.data())
def test_hermite_exact_on_polynomials(order, data):
    degree = data.draw(st.integers(0, 2 * order - 1))
    rule = gauss_hermite(order)
    exact = 0.0 if degree % 2 else math.gamma((degree + 1) / 2)
    # odd moments cancel to zero; measure error against the absolute moment
    scale = math.gamma((degree + 1) / 2)
    assert abs(rule.integrate(lambda u: u**degree) - exact) <= 1e-10 * scale


@given(st.integers(1, 30), st.floats(-0.9, 6.0), st.data())
def test_laguerre_exact_on_polynomials(order, alpha, data):
    degree = data.draw(st.integers(0, 2 * order - 1))
    rule = gauss_laguerre(order, alpha)
    exact = math.gamma(alpha + degree + 1)
    assert rule.integrate(lambda x: x**degree) == pytest.approx(exact, rel=1e-8)


@pytest.mark.parametrize("order", [0, -1, 257, 2.5, True])
def test_bad_order(order):
    with pytest.raises(ConfigurationError):
        gauss_hermite(order)
    with pytest.raises(ConfigurationError):
        gauss_laguerre(order, 0.0)


@pytest.mark.parametrize("alpha", [-1.0, -2.0, float("nan"), float("inf")])
def test_bad_alpha(alpha):
    with pytest.raises(ConfigurationError):
        gauss_laguerre(8, alpha)


def test_rules_are_immutable_and_cached():
    rule = gauss_hermite(16)
    assert rule is gauss_hermite(16)
    with pytest.raises(ValueError):
        rule.nodes[0] = 1.0


GRID = np.logspace(-4, 4, 200)


def test_order_doubling_64_to_128():
    delta = np.abs(bpsk_mi(GRID, gauss_hermite(64)) - bpsk_mi(GRID, gauss_hermite(128)))
    assert delta.max() < 1e-10


@pytest.mark.xfail(
    strict=True,
    reason="order 32 leaves ~1e-8 error near gamma=1, where the kernel switches away from the Hermite rule",
)
def test_order_doubling_32_to_64():
    delta = np.abs(bpsk_mi(GRID, gauss_hermite(32)) - bpsk_mi(GRID, gauss_hermite(64)))
    assert delta.max() < 1e-10
