"""Information matrices, covariance and the cofactor variance formulas."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fpdesign import _linalg
from fpdesign.information import (Design, SingularInformation, build_info, covariance,
                                  variances_first_order_closed, variances_second_order_closed)
from fpdesign.onefactor import (CANONICAL_POWERS, FirstOrderFP, FirstOrderParams, SecondOrderFP,
                                SecondOrderParams)


def random_design(gen, k_min, n=20):
    k = int(gen.integers(k_min, 8))
    levels = np.sort(gen.choice(np.round(np.linspace(0.1, 1, 91), 2), size=k, replace=False))
    reps = np.ones(k, dtype=int) + np.bincount(gen.integers(k, size=n - k), minlength=k)
    return Design(levels, reps)


def test_design_merges_duplicate_points():
    d = Design([0.5, 0.1, 0.5, 1.0], [1, 2, 3, 1])
    np.testing.assert_allclose(d.levels, [0.1, 0.5, 1.0])
    assert d.reps.tolist() == [2, 4, 1]
    assert d.n == 7
    assert Design.from_dict(d.to_dict()) == d


def test_design_rejects_nonpositive_reps():
    with pytest.raises(ValueError):
        Design([0.1, 1.0], [2, 0])


def test_info_is_sum_of_outer_products():
    model = FirstOrderFP()
    theta = FirstOrderParams(0, 2.5, -0.5)
    d = Design([0.1, 0.19, 0.52, 1.0], [3, 4, 2, 3])
    f = model.sensitivity(d.runs()[:, 0], theta)
    np.testing.assert_allclose(build_info(model, d, theta), f.T @ f, rtol=1e-13)


def well_conditioned(m, det_min=1e-6):
    # a cofactor expansion of unit-diagonal S has O(1) terms summing to det S,
    # so its relative error is about eps / det S; 1e-8 agreement needs det S
    # well above 1e-8 whatever the algorithm
    s = 1.0 / np.sqrt(np.diag(m))
    return np.linalg.det(m * s[:, None] * s[None, :]) > det_min


def test_first_order_closed_form_matches_inversion():
    model = FirstOrderFP()
    gen = np.random.default_rng(11)
    worst = 0.0
    checked = rejected = 0
    while checked < 500:
        theta = FirstOrderParams(0, gen.normal(2.5, 1.5), float(gen.choice(CANONICAL_POWERS)))
        d = random_design(gen, 3, n=12)
        m = build_info(model, d, theta)
        if not well_conditioned(m):
            rejected += 1
            continue
        cov = covariance(m)
        closed = np.array(variances_first_order_closed(model, d, theta))
        worst = max(worst, np.max(np.abs(closed - np.diag(cov)[1:]) / np.diag(cov)[1:]))
        checked += 1
    print(f"first order: {checked} designs compared, {rejected} ill-conditioned draws skipped")
    assert worst <= 1e-8


def test_second_order_closed_form_matches_inversion():
    model = SecondOrderFP()
    gen = np.random.default_rng(12)
    worst = 0.0
    literal_gap = 0.0
    checked = rejected = 0
    while checked < 500:
        theta = SecondOrderParams(0, gen.normal(1, 0.5), gen.normal(-2.5, 1.5),
                                  float(gen.choice(CANONICAL_POWERS)))
        d = random_design(gen, 4)
        m = build_info(model, d, theta)
        if not well_conditioned(m):
            rejected += 1
            continue
        cov = covariance(m)
        closed = np.array(variances_second_order_closed(model, d, theta))
        worst = max(worst, np.max(np.abs(closed - np.diag(cov)[1:]) / np.diag(cov)[1:]))
        literal = variances_second_order_closed(model, d, theta, literal=True)[2]
        literal_gap = max(literal_gap, abs(literal - cov[3, 3]) / cov[3, 3])
        checked += 1
    print(f"second order: {checked} designs compared, {rejected} ill-conditioned draws skipped")
    assert worst <= 1e-8
    # the alpha numerator as typeset (m12 m13 m23 single, m13^2 m22 doubled) is not
    # the cofactor; report the size of the discrepancy and keep the inversion as truth
    print(f"literal alpha-variance formula: max relative discrepancy {literal_gap:.3g}")
    assert literal_gap > 1e-3


def test_covariance_raises_on_singular_design():
    model = FirstOrderFP()
    theta = FirstOrderParams(0, 2.5, 0.5)
    d = Design([0.1, 1.0], [6, 6])
    with pytest.raises(SingularInformation) as err:
        covariance(build_info(model, d, theta))
    assert err.value.rcond < 1e-12
    with pytest.raises(SingularInformation):
        variances_first_order_closed(model, d, theta)


def random_spd(gen, p, batch):
    a = gen.normal(size=(batch, p, p + 2))
    scale = np.exp(gen.uniform(-3, 3, size=(batch, p)))
    m = a @ np.swapaxes(a, -1, -2)
    return m * scale[:, :, None] * scale[:, None, :]


@pytest.mark.parametrize("p", [1, 2, 3, 4, 5, 8])
def test_linalg_matches_numpy(p):
    gen = np.random.default_rng(p)
    m = random_spd(gen, p, 200)
    diag, singular = _linalg.inverse_diagonal(m)
    assert not singular.any()
    want = np.diagonal(np.linalg.inv(m), axis1=-2, axis2=-1)
    np.testing.assert_allclose(diag, want, rtol=1e-9)
    logdet = _linalg.log_det(m)
    np.testing.assert_allclose(logdet, np.linalg.slogdet(m)[1], rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("p", [3, 4, 8])
def test_linalg_flags_singular_and_nonfinite(p):
    gen = np.random.default_rng(100 + p)
    a = gen.normal(size=(3, p, p - 1))
    m = a @ np.swapaxes(a, -1, -2)
    m[1] = np.eye(p)
    m[2, 0, 0] = np.nan
    _, singular = _linalg.inverse_diagonal(m)
    assert singular.tolist() == [True, False, True]
    logdet = _linalg.log_det(m)
    assert logdet[0] == -np.inf and logdet[1] == pytest.approx(0.0) and logdet[2] == -np.inf


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([3, 4, 8]))
def test_linalg_scale_invariance(seed, p):
    # Jacobi scaling: D M D has inverse diagonal diag(M^-1) / d^2
    gen = np.random.default_rng(seed)
    m = random_spd(gen, p, 1)
    d = np.exp(gen.uniform(-2, 2, size=p))
    diag, _ = _linalg.inverse_diagonal(m)
    diag2, _ = _linalg.inverse_diagonal(m * d[:, None] * d[None, :])
    np.testing.assert_allclose(diag2, diag / d ** 2, rtol=1e-8)
