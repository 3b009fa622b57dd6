"""Standard one-factor comparison designs.

Spacing is equal in a chosen transformed metric ``x^(a)`` (``a = 1`` is the
raw scale) and levels are mapped back to ``[x_min, 1]``.
"""
from __future__ import annotations

import math

import numpy as np

from .criterion import WEIGHTED_AS, Objective, WeightSpec
from .information import Design
from .onefactor import FactorRange, fp_transform
from .search import SearchConfig, level_grid, point_exchange

FAMILIES = ("equally_spaced", "ccd3_projection", "ccd5_projection", "locally_optimal")


def _back_transform(t, alpha):
    t = np.asarray(t, dtype=float)
    if alpha == 0:
        return np.exp(t)
    return t ** (1.0 / alpha)


def metric_levels(fractions, alpha, rng: FactorRange) -> np.ndarray:
    """Levels at the given fractions of the transformed interval (0 -> x_min, 1 -> 1)."""
    lo = fp_transform(rng.x_min, alpha)
    hi = fp_transform(1.0, alpha)
    x = _back_transform(lo + np.asarray(fractions, dtype=float) * (hi - lo), alpha)
    x = np.clip(x, rng.x_min, 1.0)
    # pin the ends exactly; back-transforming can be off in the last bit
    x[np.isclose(fractions, 0.0)] = rng.x_min
    x[np.isclose(fractions, 1.0)] = 1.0
    return x


def equally_spaced(k: int, metric_alpha, n: int, rng: FactorRange = FactorRange()) -> Design:
    """``k`` equally replicated levels, equally spaced in ``x^(metric_alpha)``."""
    if k < 2:
        raise ValueError("need at least two levels")
    if n % k:
        raise ValueError(f"{k} levels cannot be equally replicated in {n} runs")
    return Design(metric_levels(np.linspace(0.0, 1.0, k), metric_alpha, rng), [n // k] * k)


def ccd_projection(kind: int, metric_alpha, n: int, rng: FactorRange = FactorRange()) -> Design:
    """One-factor projection of a central composite design.

    ``kind=3``: ends and centre replicated ``m, 2m, m`` (``n = 4m``).
    ``kind=5``: axial points at the ends, factorial points at ``1/sqrt(2)`` of
    the half-range either side of the centre, replicated
    ``1, (n/2 - 2)/2, n/2, (n/2 - 2)/2, 1``.
    """
    if kind == 3:
        if n % 4:
            raise ValueError("3-level CCD projection needs n divisible by 4")
        m = n // 4
        return Design(metric_levels([0.0, 0.5, 1.0], metric_alpha, rng), [m, 2 * m, m])
    if kind == 5:
        if n % 4 or n < 8:
            raise ValueError("5-level CCD projection needs n divisible by 4 and n >= 8")
        f = (n // 2 - 2) // 2
        h = 0.5 / math.sqrt(2.0)
        fr = [0.0, 0.5 - h, 0.5, 0.5 + h, 1.0]
        return Design(metric_levels(fr, metric_alpha, rng), [1, f, n // 2, f, 1])
    raise ValueError("kind must be 3 or 5")


def locally_optimal(model, theta, n: int, kind: str = WEIGHTED_AS, spec: WeightSpec | None = None,
                    grid=None, tries: int = 3, seed: int = 0) -> Design:
    """Optimal design at a single parameter point, by point exchange."""
    obj = Objective(model, [theta], kind, spec)
    if grid is None:
        grid = level_grid(model.range.x_min, 0.01)
    return point_exchange(SearchConfig(obj, n, grid, tries=tries, seed=seed)).design
