import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from nlfem.errors import InvalidDelta, NonNormalizable
from nlfem.kernel import (PRESETS, Polynomial, antiderivative_tail, eval_scaled, make_kernel_family,
                          normalization_moment, parse_kernel)

coeff_lists = st.lists(st.floats(-2.0, 2.0, allow_nan=False), min_size=1, max_size=6)


def normalizable(coeffs):
    try:
        make_kernel_family(coeffs, 1.0)
    except NonNormalizable:
        return False
    return True


def test_polynomial_degree_ignores_trailing_zeros():
    assert Polynomial((1.0, 2.0, 0.0, 0.0)).degree() == 1
    assert Polynomial((0.0,)).degree() == 0


def test_polynomial_rejects_empty():
    with pytest.raises(ValueError):
        Polynomial(())


@pytest.mark.parametrize("coeffs, expected", [
    ((1.0,), lambda r: 1.0 - r),
    ((0.0, 1.0), lambda r: 0.5 * (1.0 - r**2)),
    ((0.0,), lambda r: 0.0 * r),
])
def test_antiderivative_tail_examples(coeffs, expected):
    q = antiderivative_tail(Polynomial(coeffs))
    r = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(q(r), expected(r), atol=1e-15)


@given(coeff_lists)
def test_tail_is_negative_antiderivative(coeffs):
    p = Polynomial(tuple(coeffs))
    q = antiderivative_tail(p)
    r = np.random.default_rng(0).random(200)
    assert abs(q(1.0)) <= 1e-14
    np.testing.assert_array_less(np.abs(q.deriv()(r) + p(r)), 1e-12 * (1.0 + np.abs(p(r))))


def test_const_family():
    kf = make_kernel_family((1.0,), 0.1)
    np.testing.assert_allclose(kf.rbar_poly.as_array(3), [1.0, -1.0, 0.0])
    np.testing.assert_allclose(kf.rbarbar_poly.as_array(3), [0.5, -1.0, 0.5])
    assert kf.alpha2 == pytest.approx(2.0 / math.pi, rel=1e-14)
    # c_delta normalises int Rbar_delta over the plane to 1 (see the README)
    assert kf.c_delta == pytest.approx(50.0 / math.pi, rel=1e-14)


def test_quadratic_family():
    kf = make_kernel_family((1.0, -1.0), 0.5)
    np.testing.assert_allclose(kf.rbar_poly.as_array(3), [0.5, -1.0, 0.5])
    assert kf.alpha2 == pytest.approx(6.0 / math.pi, rel=1e-14)
    assert kf.c_delta == pytest.approx(6.0 / math.pi, rel=1e-14)


def test_errors():
    with pytest.raises(NonNormalizable):
        make_kernel_family((0.0,), 0.1)
    with pytest.raises(NonNormalizable):
        make_kernel_family((-1.0,), 0.1)
    for bad in (0.0, -0.5, float("nan"), float("inf")):
        with pytest.raises(InvalidDelta):
            make_kernel_family((1.0,), bad)


@given(coeff_lists.filter(normalizable), st.floats(0.01, 10.0))
def test_normalization_exact(coeffs, delta):
    kf = make_kernel_family(tuple(coeffs), delta)
    assert 2.0 * math.pi * kf.alpha2 * normalization_moment(kf.rbar_poly) == pytest.approx(1.0, abs=1e-12)
    # the plane integral of Rbar_delta, by an exact radial Gauss rule
    x, w = np.polynomial.legendre.leggauss(20)
    r = kf.delta * (x + 1.0)
    vals = eval_scaled(kf, "Rbar", np.stack([r, 0 * r], axis=1), np.zeros(2))
    assert float(np.sum(kf.delta * w * vals * 2 * math.pi * r)) == pytest.approx(1.0, abs=1e-12)


def test_eval_scaled_examples():
    kf = make_kernel_family((1.0,), 0.1)
    assert eval_scaled(kf, "R", (0.3, 0.0), (0.0, 0.0)) == 0.0
    assert eval_scaled(kf, "R", (0.2, 0.2), (0.2, 0.2)) == pytest.approx(kf.c_delta)
    x = (0.2 / math.sqrt(2.0), 0.0)
    assert eval_scaled(kf, "Rbar", x, (0.0, 0.0)) == pytest.approx(0.5 * kf.c_delta)


@given(st.sampled_from(["R", "Rbar", "Rbarbar"]), st.floats(1.0, 5.0), st.floats(0.0, 2 * math.pi))
def test_support_exactly_zero(which, factor, angle):
    kf = make_kernel_family((1.0, 3.0, -2.0), 0.37)
    x = kf.horizon * factor * np.array([math.cos(angle), math.sin(angle)])
    assume(float(np.hypot(*x)) >= kf.horizon)
    assert eval_scaled(kf, which, x, np.zeros(2)) == 0.0


@given(st.sampled_from(list(PRESETS.values())), st.floats(0.05, 0.95), st.floats(0, 2 * math.pi))
def test_gradient_chain_rule(coeffs, frac, angle):
    # grad_x Rbar_delta(x, y) = -(x - y) R_delta(x, y) / (2 delta^2)
    kf = make_kernel_family(coeffs, 0.3)
    y = np.array([0.1, -0.2])
    x = y + frac * kf.horizon * np.array([math.cos(angle), math.sin(angle)])
    h = 1e-6 * kf.delta
    fd = np.array([(eval_scaled(kf, "Rbar", x + e, y) - eval_scaled(kf, "Rbar", x - e, y)) / (2 * h)
                   for e in (np.array([h, 0.0]), np.array([0.0, h]))])
    exact = -(x - y) * eval_scaled(kf, "R", x, y) / (2 * kf.delta**2)
    np.testing.assert_allclose(fd, exact, rtol=1e-4, atol=1e-6 * np.abs(exact).max())


def test_parse_kernel():
    assert parse_kernel("const") == (1.0,)
    assert parse_kernel("quadratic") == (1.0, -1.0)
    assert parse_kernel("poly:1,0,-0.5") == (1.0, 0.0, -0.5)
    for bad in ("gauss", "poly:", "poly:a,b"):
        with pytest.raises(ValueError):
            parse_kernel(bad)
