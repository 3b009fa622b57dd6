"""Exact designs, information matrices and estimator covariances (sigma^2 = 1)."""
from __future__ import annotations

import numpy as np

from ._linalg import RCOND_MIN

# Determinant of the equilibrated matrix below which the cofactor formulas give up.
DET_MIN = 1e-14


class SingularInformation(np.linalg.LinAlgError):
    """Information matrix too ill-conditioned to invert."""

    def __init__(self, rcond: float, message: str | None = None):
        self.rcond = float(rcond)
        super().__init__(message or f"singular information matrix (rcond={self.rcond:.3g})")


class Design:
    """Multiset of design points with integer replications.

    Points are stored sorted and merged, so two designs holding the same
    points and replications compare equal whatever order they were given in.

    >>> Design([1.0, 0.1, 0.55], [3, 3, 6]).levels
    array([0.1 , 0.55, 1.  ])
    """

    DECIMALS = 12

    def __init__(self, points, reps=None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if reps is None:
            reps = np.ones(len(pts), dtype=int)
        reps = np.asarray(reps)
        if reps.shape != (len(pts),):
            raise ValueError("need one replication count per point")
        if np.any(reps < 1) or np.any(reps != np.round(reps)):
            raise ValueError("replications must be positive integers")
        pts = np.round(pts, self.DECIMALS)
        uniq, inverse = np.unique(pts, axis=0, return_inverse=True)
        merged = np.zeros(len(uniq), dtype=int)
        np.add.at(merged, np.ravel(inverse), reps.astype(int))
        self.points = uniq
        self.reps = merged
        self.points.setflags(write=False)
        self.reps.setflags(write=False)

    @classmethod
    def from_runs(cls, runs) -> "Design":
        return cls(runs, None)

    @property
    def n(self) -> int:
        return int(self.reps.sum())

    @property
    def k(self) -> int:
        return len(self.reps)

    @property
    def n_factors(self) -> int:
        return self.points.shape[1]

    @property
    def levels(self) -> np.ndarray:
        """Distinct levels of a one-factor design as a flat array."""
        if self.n_factors != 1:
            raise ValueError("levels is defined for one-factor designs only")
        return self.points[:, 0]

    def runs(self) -> np.ndarray:
        return np.repeat(self.points, self.reps, axis=0)

    def scaled(self, factor: int) -> "Design":
        return Design(self.points, self.reps * int(factor))

    def _key(self):
        return (self.points.tobytes(), self.reps.tobytes(), self.points.shape)

    def __eq__(self, other):
        return isinstance(other, Design) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.n_factors == 1:
            pts = ", ".join(f"{x:.4f}x{r}" for x, r in zip(self.levels, self.reps))
        else:
            pts = ", ".join("(" + ",".join(f"{v:.4f}" for v in p) + f")x{r}"
                            for p, r in zip(self.points, self.reps))
        return f"Design(n={self.n}: {pts})"

    def to_dict(self) -> dict:
        if self.n_factors == 1:
            levels = [float(x) for x in self.levels]
        else:
            levels = [[float(v) for v in p] for p in self.points]
        return {"levels": levels, "reps": [int(r) for r in self.reps], "n": self.n}

    @classmethod
    def from_dict(cls, d: dict) -> "Design":
        design = cls(d["levels"], d["reps"])
        if "n" in d and int(d["n"]) != design.n:
            raise ValueError(f"design file says n={d['n']} but replications sum to {design.n}")
        return design


def build_info(model, design: Design, theta) -> np.ndarray:
    """``M = sum_i n_i f(x_i) f(x_i)'``."""
    f = model.sensitivity(design.points, theta)
    return (f * design.reps[:, None]).T @ f


def covariance(info) -> np.ndarray:
    """Symmetric inverse of an information matrix.

    The matrix is equilibrated to unit diagonal before an eigen-decomposition;
    a reciprocal condition number below ``RCOND_MIN`` raises.
    """
    m = np.asarray(info, dtype=float)
    d = np.diag(m)
    if np.any(d <= 0):
        raise SingularInformation(0.0)
    s = 1.0 / np.sqrt(d)
    w, u = np.linalg.eigh(m * s[:, None] * s[None, :])
    rcond = w[0] / w[-1] if w[-1] > 0 else 0.0
    if not rcond > RCOND_MIN:
        raise SingularInformation(max(rcond, 0.0))
    inv = (u / w) @ u.T
    inv = inv * s[:, None] * s[None, :]
    return 0.5 * (inv + inv.T)


def _equilibrated(model, design, theta, p):
    """Unit-diagonal ``S = D M D`` and the scales ``D``.

    The cofactor formulas are homogeneous, so ``Var_i(M) = Var_i(S) D_i^2``;
    evaluating them on ``S`` keeps every term O(1), and ``det S`` (at most 1)
    measures closeness to singularity.  The sums cancel to ``det S``, so they
    are carried in extended precision where the platform offers it.
    """
    m = build_info(model, design, theta)
    if m.shape != (p, p):
        raise ValueError(f"{p}-parameter model expected")
    d = np.diag(m).astype(np.longdouble)
    if np.any(d <= 0):
        raise SingularInformation(0.0, "information matrix has a zero diagonal")
    s = 1 / np.sqrt(d)
    return m.astype(np.longdouble) * s[:, None] * s[None, :], s


def variances_first_order_closed(model, design: Design, theta):
    """``(Var gamma1-hat, Var alpha-hat)`` from the 3x3 cofactor expressions."""
    m, s = _equilibrated(model, design, theta, 3)
    n = m[0, 0]
    m12, m13, m22, m23, m33 = m[0, 1], m[0, 2], m[1, 1], m[1, 2], m[2, 2]
    d = n * m22 * m33 - n * m23 ** 2 - m12 ** 2 * m33 + 2 * m12 * m13 * m23 - m13 ** 2 * m22
    if not abs(d) > DET_MIN:
        raise SingularInformation(0.0, "cofactor determinant vanishes")
    return float((n * m33 - m13 ** 2) / d * s[1] ** 2), float((n * m22 - m12 ** 2) / d * s[2] ** 2)


def second_order_det(m) -> float:
    """Sixteen-term expansion of ``det M`` for the 4x4 second-order matrix."""
    n = m[0, 0]
    m12, m13, m14 = m[0, 1], m[0, 2], m[0, 3]
    m22, m23, m24 = m[1, 1], m[1, 2], m[1, 3]
    m33, m34, m44 = m[2, 2], m[2, 3], m[3, 3]
    return (n * m22 * m33 * m44 - n * m22 * m34 ** 2 - n * m23 ** 2 * m44 - n * m24 ** 2 * m33
            + 2 * n * m23 * m24 * m34 - m12 ** 2 * m33 * m44 + 2 * m12 * m23 * m13 * m44
            + m12 ** 2 * m34 ** 2 - 2 * m12 * m23 * m14 * m34 - 2 * m12 * m24 * m13 * m34
            + 2 * m12 * m24 * m14 * m33 - m22 * m13 ** 2 * m44 + m13 ** 2 * m24 ** 2
            + 2 * m13 * m22 * m14 * m34 - 2 * m13 * m24 * m14 * m23
            - m22 * m14 ** 2 * m33 + m14 ** 2 * m23 ** 2)


def variances_second_order_closed(model, design: Design, theta, literal: bool = False):
    """``(Var gamma1-hat, Var gamma11-hat, Var alpha-hat)`` from cofactors.

    ``literal=True`` evaluates the alpha numerator with the coefficient
    pattern ``+ m12 m13 m23 - 2 m13^2 m22``; that variant does not match
    the inverse and is kept only so the discrepancy can be demonstrated.
    """
    m, s = _equilibrated(model, design, theta, 4)
    n = m[0, 0]
    m12, m13, m14 = m[0, 1], m[0, 2], m[0, 3]
    m22, m23, m24 = m[1, 1], m[1, 2], m[1, 3]
    m33, m34, m44 = m[2, 2], m[2, 3], m[3, 3]
    d = second_order_det(m)
    if not abs(d) > DET_MIN:
        raise SingularInformation(0.0, "cofactor determinant vanishes")
    v1 = (n * m33 * m44 - n * m34 ** 2 - m13 ** 2 * m44 + 2 * m13 * m14 * m34 - m14 ** 2 * m33) / d
    v11 = (n * m22 * m44 - n * m24 ** 2 - m12 ** 2 * m44 + 2 * m12 * m14 * m24 - m14 ** 2 * m22) / d
    if literal:
        va = n * m22 * m33 - n * m23 ** 2 - m12 ** 2 * m33 + m12 * m13 * m23 - 2 * m13 ** 2 * m22
    else:
        va = n * m22 * m33 - n * m23 ** 2 - m12 ** 2 * m33 + 2 * m12 * m13 * m23 - m13 ** 2 * m22
    return float(v1 * s[1] ** 2), float(v11 * s[2] ** 2), float(va / d * s[3] ** 2)
