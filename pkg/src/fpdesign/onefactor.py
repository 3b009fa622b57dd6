"""One-factor fractional polynomial models.

Both models are written in terms of interpretable quantities rather than raw
regression coefficients: ``gamma1`` is the change in mean response from
``x_min`` to 1 and ``gamma11`` is the mean of the two extremes minus the
response at the centre of the transformed interval.  Levels are coded on
``[x_min, 1]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

CANONICAL_POWERS = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0)

PowerValue = Union[float, Fraction]


def as_power(value) -> float:
    """Parse a power such as ``-1``, ``0.5`` or ``"-1/2"`` into a float.

    Every member of :data:`CANONICAL_POWERS` is exact in binary floating point,
    so the log branch is always chosen by exact comparison with zero.
    """
    if isinstance(value, str):
        value = Fraction(value.strip())
    return float(value)


def fp_transform(x, alpha: PowerValue):
    """Box-Tidwell power transform: ``x**alpha``, or ``log(x)`` when alpha is 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("fractional polynomial transform requires x > 0")
    if alpha == 0:
        return np.log(x)
    return x ** float(alpha)


@dataclass(frozen=True)
class FactorRange:
    x_min: float = 0.1
    x_max: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.x_min < 1.0:
            raise ValueError(f"x_min must lie in (0, 1), got {self.x_min}")
        if self.x_max != 1.0:
            raise ValueError("levels are coded so that the upper limit is 1")

    def check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        tol = 1e-12
        if np.any(x < self.x_min - tol) or np.any(x > self.x_max + tol):
            raise ValueError(f"levels must lie in [{self.x_min}, {self.x_max}]")
        return x


@dataclass(frozen=True)
class FirstOrderParams:
    beta0: float
    gamma1: float
    alpha: PowerValue

    @property
    def gammas(self) -> dict:
        return {"gamma1": self.gamma1}


@dataclass(frozen=True)
class SecondOrderParams:
    beta0: float
    gamma1: float
    gamma11: float
    alpha: PowerValue

    @property
    def gammas(self) -> dict:
        return {"gamma1": self.gamma1, "gamma11": self.gamma11}


def _span(alpha, x_min):
    """Transformed-interval width ``1^(a) - x_min^(a)`` and end-point sum."""
    lo = fp_transform(x_min, alpha)
    hi = fp_transform(1.0, alpha)
    return hi - lo, hi + lo


def eval_first_order(x, p: FirstOrderParams, rng: FactorRange):
    x = rng.check(x)
    delta, _ = _span(p.alpha, rng.x_min)
    assert delta != 0.0
    return p.beta0 + p.gamma1 * fp_transform(x, p.alpha) / delta


def eval_second_order(x, p: SecondOrderParams, rng: FactorRange):
    x = rng.check(x)
    delta, total = _span(p.alpha, rng.x_min)
    assert delta != 0.0
    t = fp_transform(x, p.alpha)
    return (p.beta0 + p.gamma1 * t / delta
            + 4.0 * p.gamma11 * (t * t - total * t) / delta ** 2)


def grad_first_order(x, p: FirstOrderParams, rng: FactorRange) -> np.ndarray:
    """Sensitivities ``[d/d beta0, d/d gamma1, d/d alpha]``, one row per level.

    At ``alpha = 0`` the power column is twice the derivative of the smooth
    Box-Cox limit ``(x**a - 1) / a``.  The rescaling changes Var(alpha-hat)
    at such draws by a factor 1/4 and leaves every other variance, and every
    D-efficiency, untouched.
    """
    scalar = np.ndim(x) == 0
    x = rng.check(np.atleast_1d(x))
    g1, a, xm = p.gamma1, p.alpha, rng.x_min
    lx = np.log(x)
    out = np.empty((x.size, 3))
    out[:, 0] = 1.0
    if a != 0:
        q = xm ** a
        xa = x ** a
        out[:, 1] = xa / (1.0 - q)
        out[:, 2] = g1 / (1.0 - q) ** 2 * ((1.0 - q) * xa * lx + q * np.log(xm) * xa)
    else:
        lm = np.log(xm)
        out[:, 1] = -lx / lm
        out[:, 2] = g1 / lm ** 2 * (lm * lx * (lm - lx))
    return out[0] if scalar else out


def grad_second_order(x, p: SecondOrderParams, rng: FactorRange) -> np.ndarray:
    """Sensitivities ``[d/d beta0, d/d gamma1, d/d gamma11, d/d alpha]``.

    For ``alpha != 0`` the alpha column is the simplified ``k1..k4`` form.
    For ``alpha = 0`` the ``k5..k7`` form is used, on the same doubled scale
    as the first-order model, with ``k6 = -(gamma1 + 12 gamma11) ln^2 x_min``.
    Adding ``4 gamma11 - gamma1`` to ``k6`` would make the column differ at
    ``x_min`` and 1, which no smooth limit can do.
    """
    scalar = np.ndim(x) == 0
    x = rng.check(np.atleast_1d(x))
    g1, g11, a, xm = p.gamma1, p.gamma11, p.alpha, rng.x_min
    lx = np.log(x)
    lm = np.log(xm)
    out = np.empty((x.size, 4))
    out[:, 0] = 1.0
    if a != 0:
        q = xm ** a
        xa = x ** a
        x2a = xa * xa
        out[:, 1] = xa / (1.0 - q)
        out[:, 2] = 4.0 / (1.0 - q) ** 2 * (x2a - (1.0 + q) * xa)
        k1 = g1 * (1.0 - q) ** 2 - 4.0 * g11 * (1.0 - q * q)
        k2 = (g1 * (1.0 - q) - 4.0 * g11 * (3.0 + q)) * q * lm
        k3 = 8.0 * g11 * q * lm
        k4 = 8.0 * g11 * (1.0 - q)
        out[:, 3] = (k1 * xa * lx + k2 * xa + k3 * x2a + k4 * x2a * lx) / (1.0 - q) ** 3
    else:
        out[:, 1] = -lx / lm
        out[:, 2] = 4.0 / lm ** 2 * (lx * lx - lm * lx)
        k5 = (4.0 * g11 + g1) * lm ** 3
        k6 = -(g1 + 12.0 * g11) * lm ** 2
        k7 = 8.0 * g11 * lm
        out[:, 3] = (k5 * lx + k6 * lx ** 2 + k7 * lx ** 3) / lm ** 3
    return out[0] if scalar else out


class FirstOrderFP:
    """``y = beta0 + gamma1 x^(a) / (1^(a) - x_min^(a))``."""

    n_factors = 1
    n_params = 3
    param_names = ("beta0", "gamma1", "alpha")
    gamma_names = ("gamma1",)
    label = "fp1"

    def __init__(self, rng: FactorRange | float = 0.1):
        self.range = rng if isinstance(rng, FactorRange) else FactorRange(float(rng))

    @property
    def lower(self):
        return (self.range.x_min,)

    def make_params(self, gammas: dict, alphas, beta0: float = 0.0) -> FirstOrderParams:
        return FirstOrderParams(beta0, gammas["gamma1"], alphas[0])

    def mean(self, x, p):
        return eval_first_order(np.ravel(x), p, self.range)

    def sensitivity(self, x, p) -> np.ndarray:
        return grad_first_order(np.ravel(x), p, self.range)

    def __repr__(self):
        return f"FirstOrderFP(x_min={self.range.x_min})"


class SecondOrderFP(FirstOrderFP):
    """Quadratic in ``x^(a)`` with range change ``gamma1`` and curvature ``gamma11``."""

    n_params = 4
    param_names = ("beta0", "gamma1", "gamma11", "alpha")
    gamma_names = ("gamma1", "gamma11")
    label = "fp2"

    def make_params(self, gammas: dict, alphas, beta0: float = 0.0) -> SecondOrderParams:
        return SecondOrderParams(beta0, gammas["gamma1"], gammas["gamma11"], alphas[0])

    def mean(self, x, p):
        return eval_second_order(np.ravel(x), p, self.range)

    def sensitivity(self, x, p) -> np.ndarray:
        return grad_second_order(np.ravel(x), p, self.range)

    def __repr__(self):
        return f"SecondOrderFP(x_min={self.range.x_min})"
