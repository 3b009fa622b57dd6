"""Prior specifications, draw allocation and quadrature."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fpdesign.onefactor import FirstOrderFP, SecondOrderFP
from fpdesign.priors import (AlphaPrior, GammaPrior, PriorSpec, allocate, quadrature_draws,
                             sample_draws)
from fpdesign.twofactor import TwoFactorFP

SUPPORT = (-2, -1, "-1/2", 0, "1/2", 1, 2)
P1 = (0.15, 0.25, 0.25, 0.15, 0.10, 0.07, 0.03)


def spec(r=200, seed=0, rng="philox"):
    return PriorSpec((AlphaPrior(SUPPORT, P1),), {"gamma1": GammaPrior.normal(2.5, 1.5)},
                     r=r, seed=seed, rng=rng)


def test_allocation_of_200_draws():
    assert allocate(200, P1).tolist() == [30, 50, 50, 30, 20, 14, 6]


@settings(max_examples=200)
@given(st.integers(1, 2000), st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12))
def test_allocation_sums_and_stays_within_one_of_quota(r, raw):
    mass = np.array(raw)
    if mass.sum() == 0:
        mass = np.ones_like(mass)
    mass = mass / mass.sum()
    counts = allocate(r, mass)
    assert counts.sum() == r
    assert np.all(np.abs(counts - r * mass) < 1.0 + 1e-9)


def test_sample_draws_follow_allocation_and_seed():
    draws = sample_draws(spec())
    alphas = [d.alpha for d in draws]
    assert [alphas.count(a) for a in (-2, -1, -0.5, 0, 0.5, 1, 2)] == [30, 50, 50, 30, 20, 14, 6]
    again = sample_draws(spec())
    assert [d.gamma1 for d in draws] == [d.gamma1 for d in again]
    other = sample_draws(spec(seed=1))
    assert [d.gamma1 for d in draws] != [d.gamma1 for d in other]
    pcg = sample_draws(spec(rng="pcg64"))
    assert [d.gamma1 for d in draws] != [d.gamma1 for d in pcg]
    g = np.array([d.gamma1 for d in draws])
    assert abs(g.mean() - 2.5) < 0.4 and abs(g.std() - 1.5) < 0.4


def test_sample_draws_build_the_right_model_points():
    s = PriorSpec((AlphaPrior.point(0),), {"gamma1": GammaPrior.normal(1, 0.5),
                                           "gamma11": GammaPrior.point(-2.5)}, r=10)
    draws = sample_draws(s, SecondOrderFP())
    assert all(d.gamma11 == -2.5 and d.alpha == 0 for d in draws)


def test_too_few_draws_warns():
    with pytest.warns(UserWarning):
        sample_draws(spec(r=5), FirstOrderFP())


@pytest.mark.parametrize("nodes", [1, 3, 5])
def test_quadrature_weights_sum_to_one(nodes):
    s = PriorSpec((AlphaPrior(SUPPORT, P1),), {"gamma1": GammaPrior.normal(1, 0.5),
                                                "gamma11": GammaPrior.normal(-2.5, 1.5)})
    pts = quadrature_draws(s, SecondOrderFP(), nodes)
    assert len(pts) == 7 * nodes ** 2
    assert sum(w for _, w in pts) == pytest.approx(1.0, abs=1e-14)


def test_quadrature_reproduces_normal_moments():
    s = PriorSpec((AlphaPrior.point(1),), {"gamma1": GammaPrior.normal(2.5, 1.5)})
    pts = quadrature_draws(s, FirstOrderFP(), 5)
    g = np.array([p.gamma1 for p, _ in pts])
    w = np.array([w for _, w in pts])
    assert w @ g == pytest.approx(2.5)
    assert w @ (g - 2.5) ** 2 == pytest.approx(1.5 ** 2)


def test_two_factor_quadrature_takes_product_of_priors():
    u = AlphaPrior((-1, "-1/2", 0, "1/2", 1), (0.2,) * 5)
    r = AlphaPrior((-1, "-1/2", 0, "1/2", 1), (0.45, 0.3, 0.15, 0.07, 0.03))
    gam = {k: GammaPrior.point(v) for k, v in
           dict(gamma1=1, gamma2=1, gamma11=-2.5, gamma22=-2.5, gamma12=1).items()}
    pts = quadrature_draws(PriorSpec((u, r), gam), TwoFactorFP())
    assert len(pts) == 25
    assert sum(w for _, w in pts) == pytest.approx(1.0, abs=1e-14)
    w = {(p.alpha1, p.alpha2): wt for p, wt in pts}
    assert w[(-1.0, -1.0)] == pytest.approx(0.2 * 0.45)


def test_invalid_priors_rejected():
    with pytest.raises(ValueError):
        AlphaPrior((0, 1), (0.5, 0.6))
    with pytest.raises(ValueError):
        AlphaPrior((0, 0), (0.5, 0.5))
    with pytest.raises(ValueError):
        GammaPrior.normal(0, 0)
    with pytest.raises(ValueError):
        spec(rng="mt19937")
