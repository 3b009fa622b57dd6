"""Model means, analytic sensitivities and the two-factor reparameterisation."""
import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fpdesign.onefactor import (CANONICAL_POWERS, FactorRange, FirstOrderParams, SecondOrderParams,
                                as_power, eval_first_order, eval_second_order, fp_transform,
                                grad_first_order, grad_second_order)
from fpdesign.twofactor import (TwoFactorParams, TwoFactorRange, beta_to_gamma, eval_two_factor,
                                gamma_to_beta, grad_two_factor)

RNG = FactorRange(0.1)
RNG2 = TwoFactorRange(0.1, 0.1)
NONZERO = [a for a in CANONICAL_POWERS if a != 0]


def central_difference(f, theta, name, h=1e-6):
    up = f(dataclasses.replace(theta, **{name: getattr(theta, name) + h}))
    dn = f(dataclasses.replace(theta, **{name: getattr(theta, name) - h}))
    return (up - dn) / (2 * h)


def max_rel_error(analytic, numeric):
    # relative to the larger of the entry and 1, so columns passing through 0 are fine
    return float(np.max(np.abs(analytic - numeric) / np.maximum(np.abs(analytic), 1.0)))


def random_first_order(gen, n):
    for _ in range(n):
        a = float(gen.choice(NONZERO)) + gen.uniform(-0.2, 0.2)
        yield FirstOrderParams(gen.normal(), gen.normal(2.5, 1.5), a), gen.uniform(0.1, 1.0)


def test_fp_transform_log_at_zero():
    x = np.array([0.1, 0.5, 1.0])
    np.testing.assert_allclose(fp_transform(x, 0), np.log(x))
    np.testing.assert_allclose(fp_transform(x, -0.5), x ** -0.5)
    with pytest.raises(ValueError):
        fp_transform([0.0], 1)


def test_as_power_parses_fractions():
    assert as_power("-1/2") == -0.5
    assert as_power(2) == 2.0
    assert as_power(" 1/2 ") == 0.5


def test_first_order_gradient_matches_finite_differences():
    gen = np.random.default_rng(1)
    worst = 0.0
    for theta, x in random_first_order(gen, 1000):
        g = grad_first_order(x, theta, RNG)
        f = lambda t: float(eval_first_order(x, t, RNG))
        fd = np.array([central_difference(f, theta, n) for n in ("beta0", "gamma1", "alpha")])
        worst = max(worst, max_rel_error(g, fd))
    assert worst <= 1e-6


def test_second_order_gradient_matches_finite_differences():
    gen = np.random.default_rng(2)
    worst = 0.0
    for _ in range(1000):
        a = float(gen.choice(NONZERO)) + gen.uniform(-0.2, 0.2)
        theta = SecondOrderParams(gen.normal(), gen.normal(1, 0.5), gen.normal(-2.5, 1.5), a)
        x = gen.uniform(0.1, 1.0)
        g = grad_second_order(x, theta, RNG)
        f = lambda t: float(eval_second_order(x, t, RNG))
        fd = np.array([central_difference(f, theta, n)
                       for n in ("beta0", "gamma1", "gamma11", "alpha")])
        worst = max(worst, max_rel_error(g, fd))
    assert worst <= 1e-6


def random_two_factor(gen):
    a1 = float(gen.choice(NONZERO)) + gen.uniform(-0.2, 0.2)
    a2 = float(gen.choice(NONZERO)) + gen.uniform(-0.2, 0.2)
    return TwoFactorParams(gen.normal(), gen.normal(1, 1), gen.normal(1, 1), gen.normal(-2.5, 1),
                           gen.normal(-2.5, 1), gen.normal(1, 1), a1, a2)


def test_two_factor_gradient_matches_finite_differences():
    gen = np.random.default_rng(3)
    names = ("beta0", "gamma1", "gamma2", "gamma11", "gamma22", "gamma12", "alpha1", "alpha2")
    worst = 0.0
    for _ in range(1000):
        theta = random_two_factor(gen)
        x1, x2 = gen.uniform(0.1, 1.0, size=2)
        g = grad_two_factor(x1, x2, theta, RNG2)
        f = lambda t: float(eval_two_factor(x1, x2, t, RNG2))
        fd = np.array([central_difference(f, theta, n) for n in names])
        worst = max(worst, max_rel_error(g, fd))
    assert worst <= 1e-6


def _centred(cols):
    # columns are only defined up to a constant, which the intercept absorbs
    return cols - cols[:1]


def test_first_order_alpha_zero_column_is_twice_the_box_cox_limit():
    x = np.linspace(0.1, 1.0, 7)
    eps = 1e-5
    near = _centred((grad_first_order(x, FirstOrderParams(0, 2.0, eps), RNG)
                     + grad_first_order(x, FirstOrderParams(0, 2.0, -eps), RNG)) / 2)
    at0 = _centred(grad_first_order(x, FirstOrderParams(0, 2.0, 0.0), RNG))
    np.testing.assert_allclose(at0[:, 1], near[:, 1], atol=1e-6)
    np.testing.assert_allclose(at0[:, 2], 2 * near[:, 2], atol=1e-5)


def test_second_order_alpha_zero_column_is_twice_the_limit():
    x = np.linspace(0.1, 1.0, 9)
    theta = dict(beta0=0.0, gamma1=1.3, gamma11=-2.1)
    eps = 1e-3  # smaller steps lose the limit to cancellation (1/(1-q)^3 ~ 1e9)
    near = _centred((grad_second_order(x, SecondOrderParams(alpha=eps, **theta), RNG)
                     + grad_second_order(x, SecondOrderParams(alpha=-eps, **theta), RNG)) / 2)
    at0 = _centred(grad_second_order(x, SecondOrderParams(alpha=0.0, **theta), RNG))
    np.testing.assert_allclose(at0[:, 1:3], near[:, 1:3], atol=1e-5)
    np.testing.assert_allclose(at0[:, 3], 2 * near[:, 3], atol=1e-4)


def test_first_order_gamma1_is_the_range_change():
    for a in CANONICAL_POWERS:
        theta = FirstOrderParams(0.3, 1.7, a)
        lo, hi = eval_first_order(np.array([0.1, 1.0]), theta, RNG)
        assert hi - lo == pytest.approx(1.7, rel=1e-12)


def test_second_order_gamma11_is_the_curvature():
    for a in CANONICAL_POWERS:
        theta = SecondOrderParams(0.0, 1.0, -2.5, a)
        t_mid = 0.5 * (fp_transform(0.1, a) + fp_transform(1.0, a))
        x_mid = np.exp(t_mid) if a == 0 else t_mid ** (1 / a)
        y = eval_second_order(np.array([0.1, x_mid, 1.0]), theta, RNG)
        assert 0.5 * (y[0] + y[2]) - y[1] == pytest.approx(-2.5, rel=1e-10)


@pytest.mark.parametrize("a1", [-1, -0.5, 0, 0.5, 1])
@pytest.mark.parametrize("a2", [-1, -0.5, 0, 0.5, 1])
def test_gamma_beta_round_trip(a1, a2):
    gen = np.random.default_rng(int(10 * a1 + a2 * 100 + 500))
    for _ in range(1000):
        g = gen.normal(size=6)
        theta = TwoFactorParams(*g, a1, a2)
        back = beta_to_gamma(gamma_to_beta(theta, RNG2), a1, a2, RNG2)
        np.testing.assert_allclose(dataclasses.astuple(back)[:6], g, rtol=1e-12, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(a1=st.sampled_from(NONZERO), a2=st.sampled_from(NONZERO),
       x1=st.floats(0.1, 1.0), x2=st.floats(0.1, 1.0))
def test_two_factor_gamma_meanings(a1, a2, x1, x2):
    # gamma1 is the factor-1 range change averaged over factor-2 ends
    theta = TwoFactorParams(0, 1.2, -0.7, -2.5, 0.4, 0.9, a1, a2)
    y = lambda u, v: float(eval_two_factor(u, v, theta, RNG2))
    change = 0.5 * ((y(1, 1) - y(0.1, 1)) + (y(1, 0.1) - y(0.1, 0.1)))
    assert change == pytest.approx(1.2, abs=1e-9)
    assert np.isfinite(y(x1, x2))


def test_levels_outside_range_rejected():
    with pytest.raises(ValueError):
        grad_first_order(0.05, FirstOrderParams(0, 1, 1), RNG)
    with pytest.raises(ValueError):
        grad_two_factor(0.5, 1.5, TwoFactorParams(0, 1, 1, 1, 1, 1, 1, 1), RNG2)
