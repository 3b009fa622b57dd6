"""Two-factor second-order fractional polynomial model.

The surface is

    eta = b0 + b1 t1 + b11 t1^2 + b2 t2 + b22 t2^2 + b12 t1 t2,   tk = xk^(ak)

and is parameterised by per-factor slopes ``gamma1, gamma2``, curvatures
``gamma11, gamma22`` and the interaction ``gamma12`` (half the difference in
the slope of one factor between the ends of the other), plus the powers.
"""
from __future__ import annotations

from dataclasses import astuple, dataclass

import numpy as np

from .onefactor import PowerValue, fp_transform


@dataclass(frozen=True)
class TwoFactorRange:
    x1_min: float = 0.1
    x2_min: float = 0.1

    def __post_init__(self):
        for v in (self.x1_min, self.x2_min):
            if not 0.0 < v < 1.0:
                raise ValueError(f"lower limits must lie in (0, 1), got {v}")

    def check(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        tol = 1e-12
        if (np.any(x1 < self.x1_min - tol) or np.any(x1 > 1 + tol)
                or np.any(x2 < self.x2_min - tol) or np.any(x2 > 1 + tol)):
            raise ValueError("levels outside the design region")
        return x1, x2


@dataclass(frozen=True)
class TwoFactorParams:
    beta0: float
    gamma1: float
    gamma2: float
    gamma11: float
    gamma22: float
    gamma12: float
    alpha1: PowerValue
    alpha2: PowerValue

    @property
    def gammas(self) -> dict:
        return {"gamma1": self.gamma1, "gamma2": self.gamma2, "gamma11": self.gamma11,
                "gamma22": self.gamma22, "gamma12": self.gamma12}


@dataclass(frozen=True)
class BetaVector:
    beta0: float
    beta1: float
    beta2: float
    beta11: float
    beta22: float
    beta12: float

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self))


def _dt(x, alpha):
    """d x^(a) / d a.  At a = 0 this is the Box-Cox limit ln(x)^2 / 2."""
    lx = np.log(np.asarray(x, dtype=float))
    if alpha == 0:
        return 0.5 * lx * lx
    return np.asarray(x, dtype=float) ** alpha * lx


def _spans(p: TwoFactorParams, rng: TwoFactorRange):
    d1 = fp_transform(1.0, p.alpha1) - fp_transform(rng.x1_min, p.alpha1)
    s1 = fp_transform(1.0, p.alpha1) + fp_transform(rng.x1_min, p.alpha1)
    d2 = fp_transform(1.0, p.alpha2) - fp_transform(rng.x2_min, p.alpha2)
    s2 = fp_transform(1.0, p.alpha2) + fp_transform(rng.x2_min, p.alpha2)
    return float(d1), float(s1), float(d2), float(s2)


def gamma_to_beta(p: TwoFactorParams, rng: TwoFactorRange = TwoFactorRange()) -> BetaVector:
    d1, s1, d2, s2 = _spans(p, rng)
    b12 = 2.0 * p.gamma12 / (d1 * d2)
    b11 = 4.0 * p.gamma11 / d1 ** 2
    b22 = 4.0 * p.gamma22 / d2 ** 2
    b1 = (p.gamma1 - b11 * d1 * s1 - 0.5 * b12 * d1 * s2) / d1
    b2 = (p.gamma2 - b22 * d2 * s2 - 0.5 * b12 * d2 * s1) / d2
    return BetaVector(p.beta0, b1, b2, b11, b22, b12)


def beta_to_gamma(b: BetaVector, alpha1, alpha2,
                  rng: TwoFactorRange = TwoFactorRange()) -> TwoFactorParams:
    probe = TwoFactorParams(0, 0, 0, 0, 0, 0, alpha1, alpha2)
    d1, s1, d2, s2 = _spans(probe, rng)
    return TwoFactorParams(
        beta0=b.beta0,
        gamma1=b.beta1 * d1 + b.beta11 * d1 * s1 + 0.5 * b.beta12 * d1 * s2,
        gamma2=b.beta2 * d2 + b.beta22 * d2 * s2 + 0.5 * b.beta12 * d2 * s1,
        gamma11=0.25 * b.beta11 * d1 ** 2,
        gamma22=0.25 * b.beta22 * d2 ** 2,
        gamma12=0.5 * b.beta12 * d1 * d2,
        alpha1=alpha1,
        alpha2=alpha2,
    )


def eval_two_factor(x1, x2, p: TwoFactorParams, rng: TwoFactorRange = TwoFactorRange()):
    x1, x2 = rng.check(x1, x2)
    b = gamma_to_beta(p, rng)
    t1 = fp_transform(x1, p.alpha1)
    t2 = fp_transform(x2, p.alpha2)
    return (b.beta0 + b.beta1 * t1 + b.beta11 * t1 ** 2 + b.beta2 * t2
            + b.beta22 * t2 ** 2 + b.beta12 * t1 * t2)


def grad_two_factor(x1, x2, p: TwoFactorParams,
                    rng: TwoFactorRange = TwoFactorRange()) -> np.ndarray:
    """Sensitivities w.r.t. ``(beta0, g1, g2, g11, g22, g12, a1, a2)``.

    Written directly in gamma so each column is explicit; the alpha columns
    follow from differentiating ``t``, the span ``D`` and the end-point sum
    ``S`` of each factor.
    """
    scalar = np.ndim(x1) == 0 and np.ndim(x2) == 0
    x1, x2 = rng.check(np.atleast_1d(x1), np.atleast_1d(x2))
    x1, x2 = np.broadcast_arrays(x1, x2)
    d1, s1, d2, s2 = _spans(p, rng)
    t1 = fp_transform(x1, p.alpha1)
    t2 = fp_transform(x2, p.alpha2)
    # 1^(a) does not move with a, so dD = -dS = -d x0^(a)/da
    e1 = float(_dt(rng.x1_min, p.alpha1))
    e2 = float(_dt(rng.x2_min, p.alpha2))
    dd1, ds1, dd2, ds2 = -e1, e1, -e2, e2
    dt1 = _dt(x1, p.alpha1)
    dt2 = _dt(x2, p.alpha2)

    inter = 2.0 * t1 * t2 - s2 * t1 - s1 * t2
    out = np.empty(x1.shape + (8,))
    out[..., 0] = 1.0
    out[..., 1] = t1 / d1
    out[..., 2] = t2 / d2
    out[..., 3] = 4.0 * (t1 * t1 - s1 * t1) / d1 ** 2
    out[..., 4] = 4.0 * (t2 * t2 - s2 * t2) / d2 ** 2
    out[..., 5] = inter / (d1 * d2)

    g1, g2, g11, g22, g12 = p.gamma1, p.gamma2, p.gamma11, p.gamma22, p.gamma12
    out[..., 6] = (
        g1 * (dt1 * d1 - t1 * dd1) / d1 ** 2
        + 4.0 * g11 * ((2.0 * t1 * dt1 - ds1 * t1 - s1 * dt1) / d1 ** 2
                       - 2.0 * (t1 * t1 - s1 * t1) * dd1 / d1 ** 3)
        + g12 / d2 * ((2.0 * dt1 * t2 - s2 * dt1 - ds1 * t2) / d1 - inter * dd1 / d1 ** 2)
    )
    out[..., 7] = (
        g2 * (dt2 * d2 - t2 * dd2) / d2 ** 2
        + 4.0 * g22 * ((2.0 * t2 * dt2 - ds2 * t2 - s2 * dt2) / d2 ** 2
                       - 2.0 * (t2 * t2 - s2 * t2) * dd2 / d2 ** 3)
        + g12 / d1 * ((2.0 * t1 * dt2 - s1 * dt2 - ds2 * t1) / d2 - inter * dd2 / d2 ** 2)
    )
    return out.reshape(8) if scalar else out


class TwoFactorFP:
    n_factors = 2
    n_params = 8
    param_names = ("beta0", "gamma1", "gamma2", "gamma11", "gamma22", "gamma12",
                   "alpha1", "alpha2")
    gamma_names = ("gamma1", "gamma2", "gamma11", "gamma22", "gamma12")
    label = "fp2x2"

    def __init__(self, rng: TwoFactorRange | None = None):
        self.range = rng or TwoFactorRange()

    @property
    def lower(self):
        return (self.range.x1_min, self.range.x2_min)

    def make_params(self, gammas: dict, alphas, beta0: float = 0.0) -> TwoFactorParams:
        return TwoFactorParams(beta0, gammas["gamma1"], gammas["gamma2"], gammas["gamma11"],
                               gammas["gamma22"], gammas["gamma12"], alphas[0], alphas[1])

    def mean(self, x, p):
        x = np.asarray(x, dtype=float).reshape(-1, 2)
        return eval_two_factor(x[:, 0], x[:, 1], p, self.range)

    def sensitivity(self, x, p) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1, 2)
        return grad_two_factor(x[:, 0], x[:, 1], p, self.range)

    def __repr__(self):
        return f"TwoFactorFP(x1_min={self.range.x1_min}, x2_min={self.range.x2_min})"
