"""Weighted A_s and D criteria, their prior expectations, and efficiencies.

The weighted A_s criterion is ``tr(W M^-1)`` with a diagonal ``W`` whose
entries depend on the gamma values of each draw, so parameters are
weighted against target variances proportional to their own size.  Criteria
are averaged over a fixed list of parameter draws.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _linalg
from .information import Design, build_info, covariance, SingularInformation
from .onefactor import FirstOrderFP, SecondOrderFP

WEIGHTED_AS = "weighted-As"
D_OPT = "D"
KINDS = (WEIGHTED_AS, D_OPT)


@dataclass(frozen=True)
class WeightSpec:
    w: tuple = (1.0, 1.0)

    def __post_init__(self):
        w = tuple(float(v) for v in self.w)
        if not w or any(not v > 0 for v in w):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "w", w)


def weights_first_order(gamma1: float, spec: WeightSpec) -> np.ndarray:
    """Diagonal of W for ``(beta0, gamma1, alpha)``.

    >>> weights_first_order(1.0, WeightSpec((1, 1))).tolist()
    [0.0, 0.5, 0.5]
    """
    w1, w2 = spec.w[:2]
    den = w1 + w2 * gamma1 ** 2
    return np.array([0.0, w1 / den, w2 * gamma1 ** 2 / den])


def weights_second_order(gamma1: float, gamma11: float, spec: WeightSpec) -> np.ndarray:
    """Diagonal of W for ``(beta0, gamma1, gamma11, alpha)``.

    With both gammas zero every weight is zero.
    """
    w = spec.w if len(spec.w) >= 3 else spec.w + (1.0,) * (3 - len(spec.w))
    a = w[0] * gamma11 ** 2
    b = w[1] * gamma1 ** 2
    c = w[2] * gamma1 ** 2 * gamma11 ** 2
    den = a + b + c
    if den == 0:
        return np.zeros(4)
    return np.array([0.0, a / den, b / den, c / den])


def weight_diagonal(model, theta, spec: WeightSpec) -> np.ndarray:
    if isinstance(model, SecondOrderFP):
        return weights_second_order(theta.gamma1, theta.gamma11, spec)
    if isinstance(model, FirstOrderFP):
        return weights_first_order(theta.gamma1, spec)
    raise ValueError(f"weighted A_s weights are not defined for {model!r}")


def weighted_as_local(model, design: Design, theta, spec: WeightSpec) -> float:
    """``tr(W M^-1)`` at one parameter point; ``inf`` if M is singular."""
    w = weight_diagonal(model, theta, spec)
    try:
        cov = covariance(build_info(model, design, theta))
    except SingularInformation:
        return math.inf
    return float(np.dot(w, np.diag(cov)))


def d_local(model, design: Design, theta) -> float:
    """``log det M``; ``-inf`` if M is singular."""
    return float(_linalg.log_det(build_info(model, design, theta)))


@dataclass
class CriterionReport:
    value: float
    per_draw_values: np.ndarray
    n_draws: int
    criterion_kind: str
    draw_weights: np.ndarray = field(repr=False, default=None)

    @property
    def loss(self) -> float:
        """Value oriented for minimisation."""
        return self.value if self.criterion_kind == WEIGHTED_AS else -self.value


def _split_draws(draws, weights=None):
    draws = list(draws)
    if draws and isinstance(draws[0], tuple) and len(draws[0]) == 2 and not hasattr(draws[0], "alpha"):
        thetas = [d[0] for d in draws]
        weights = np.array([d[1] for d in draws], dtype=float)
    else:
        thetas = draws
    if not thetas:
        raise ValueError("need at least one parameter draw")
    if weights is None:
        weights = np.full(len(thetas), 1.0 / len(thetas))
    else:
        weights = np.asarray(weights, dtype=float)
        weights = weights / weights.sum()
    return thetas, weights


class Objective:
    """A criterion frozen on one set of draws.

    Precomputes per-draw weight matrices so that batches of information
    matrices can be scored in one vectorised call.  ``loss`` is always
    minimised: the weighted A_s value itself, or minus the mean log det.
    """

    def __init__(self, model, draws, kind: str = WEIGHTED_AS, spec: WeightSpec | None = None,
                 weights=None):
        if kind not in KINDS:
            raise ValueError(f"criterion kind must be one of {KINDS}")
        self.model = model
        self.kind = kind
        self.spec = spec or WeightSpec()
        self.thetas, self.draw_weights = _split_draws(draws, weights)
        self.p = model.n_params
        if kind == WEIGHTED_AS:
            self.W = np.array([weight_diagonal(model, th, self.spec) for th in self.thetas])
        else:
            self.W = None

    def __len__(self):
        return len(self.thetas)

    def sensitivities(self, points) -> np.ndarray:
        """``(draws, points, p)`` stack of sensitivity rows."""
        pts = np.asarray(points, dtype=float)
        return np.stack([self.model.sensitivity(pts, th) for th in self.thetas])

    def per_draw(self, info) -> np.ndarray:
        """Local criterion for info matrices shaped ``(..., draws, p, p)``."""
        if self.kind == WEIGHTED_AS:
            diag, singular = _linalg.inverse_diagonal(info)
            with np.errstate(invalid="ignore"):
                vals = np.einsum("...dp,dp->...d", np.where(singular[..., None], 0.0, diag), self.W)
            return np.where(singular, np.inf, vals)
        return _linalg.log_det(info)

    def reduce(self, per_draw) -> np.ndarray:
        """Weighted mean over the trailing draw axis, fixed summation order."""
        with np.errstate(invalid="ignore"):
            return np.sum(per_draw * self.draw_weights, axis=-1)

    def loss_of_info(self, info) -> np.ndarray:
        v = self.reduce(self.per_draw(info))
        return v if self.kind == WEIGHTED_AS else -v

    def info(self, design: Design) -> np.ndarray:
        f = self.sensitivities(design.points)
        return np.einsum("dkp,k,dkq->dpq", f, design.reps.astype(float), f)

    def report(self, design: Design) -> CriterionReport:
        per = self.per_draw(self.info(design))
        return CriterionReport(float(self.reduce(per)), per, len(self), self.kind,
                               self.draw_weights)

    def loss(self, design: Design) -> float:
        return self.report(design).loss


def bayes_criterion(model, design: Design, draws, kind: str = WEIGHTED_AS,
                    spec: WeightSpec | None = None, weights=None) -> CriterionReport:
    """Prior-averaged local criterion over ``draws``.

    ``draws`` is a list of parameter points (equal weights) or of
    ``(point, weight)`` pairs as produced by quadrature.
    """
    report = Objective(model, draws, kind, spec, weights).report(design)
    if not np.any(np.isfinite(report.per_draw_values)):
        raise SingularInformation(0.0, "design is singular at every draw")
    return report


def efficiency_from_values(candidate: float, reference: float, kind: str, p: int) -> float:
    """Percentage efficiency of a candidate given criterion values."""
    if kind == WEIGHTED_AS:
        if not math.isfinite(candidate):
            return 0.0
        return 100.0 * reference / candidate
    if not math.isfinite(candidate):
        return 0.0
    return 100.0 * math.exp((candidate - reference) / p)


def efficiency(model, candidate: Design, reference: Design, draws, kind: str = WEIGHTED_AS,
               spec: WeightSpec | None = None, weights=None) -> float:
    """Efficiency (%) of ``candidate`` relative to ``reference`` on shared draws.

    Weighted A_s: ratio of criterion values.  D: ratio of determinants
    raised to ``1/p``.
    """
    obj = Objective(model, draws, kind, spec, weights)
    ref = obj.report(reference).value
    cand = obj.report(candidate).value
    return efficiency_from_values(cand, ref, kind, model.n_params)
