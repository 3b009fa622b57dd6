"""Batched inverse-diagonal and log-determinant for small symmetric matrices.

Matrices are first scaled to unit diagonal (Jacobi equilibration).  For
``p <= 4`` the cofactor expansions are evaluated directly, which is several
times faster than LAPACK on stacks of tiny matrices and never raises on
singular input; the determinant of the equilibrated matrix then stands in for
the reciprocal condition number.  Larger matrices go through a batched
symmetric eigen-decomposition and use the true eigenvalue ratio, since the
determinant of a unit-diagonal matrix shrinks geometrically with ``p``.
"""
import numpy as np

# Reciprocal-condition threshold below which a matrix counts as singular.
RCOND_MIN = 1e-12


def _det3(a, i, j, k):
    return (a[..., i, i] * (a[..., j, j] * a[..., k, k] - a[..., j, k] ** 2)
            - a[..., i, j] * (a[..., i, j] * a[..., k, k] - a[..., j, k] * a[..., i, k])
            + a[..., i, k] * (a[..., i, j] * a[..., j, k] - a[..., j, j] * a[..., i, k]))


def _scale(m):
    d = np.diagonal(m, axis1=-2, axis2=-1)
    ok = np.all(d > 0, axis=-1) & np.all(np.isfinite(m), axis=(-2, -1))
    s = 1.0 / np.sqrt(np.where(d > 0, d, 1.0))
    return m * s[..., :, None] * s[..., None, :], s, ok


def _adjugate_diag(s, p):
    """Determinant and adjugate diagonal of unit-diagonal ``s``."""
    if p == 1:
        return s[..., 0, 0], np.ones(s.shape[:-1])
    if p == 2:
        det = s[..., 0, 0] * s[..., 1, 1] - s[..., 0, 1] ** 2
        return det, np.stack([s[..., 1, 1], s[..., 0, 0]], axis=-1)
    if p == 3:
        c = np.stack([
            s[..., 1, 1] * s[..., 2, 2] - s[..., 1, 2] ** 2,
            s[..., 0, 0] * s[..., 2, 2] - s[..., 0, 2] ** 2,
            s[..., 0, 0] * s[..., 1, 1] - s[..., 0, 1] ** 2,
        ], axis=-1)
        return _det3(s, 0, 1, 2), c
    # p == 4: expand along the first row using 3x3 minors
    c = np.stack([_det3(s, 1, 2, 3), _det3(s, 0, 2, 3), _det3(s, 0, 1, 3),
                  _det3(s, 0, 1, 2)], axis=-1)
    return _det4(s), c


def _det4(a):
    # Laplace expansion along row 0 with signed 3x3 minors of rows 1..3
    def minor(cols):
        i, j, k = cols
        r = a[..., 1:, :]
        return (r[..., 0, i] * (r[..., 1, j] * r[..., 2, k] - r[..., 1, k] * r[..., 2, j])
                - r[..., 0, j] * (r[..., 1, i] * r[..., 2, k] - r[..., 1, k] * r[..., 2, i])
                + r[..., 0, k] * (r[..., 1, i] * r[..., 2, j] - r[..., 1, j] * r[..., 2, i]))
    return (a[..., 0, 0] * minor((1, 2, 3)) - a[..., 0, 1] * minor((0, 2, 3))
            + a[..., 0, 2] * minor((0, 1, 3)) - a[..., 0, 3] * minor((0, 1, 2)))


def _finite_input(s, ok):
    return np.where(ok[..., None, None], s, np.eye(s.shape[-1]))


def _eigh(s, ok):
    return np.linalg.eigh(_finite_input(s, ok))


def _eigvalsh(s, ok):
    return np.linalg.eigvalsh(_finite_input(s, ok))


def inverse_diagonal(m):
    """Diagonal of ``inv(m)`` for a stack of PSD matrices.

    Returns ``(diag, singular)``; rows flagged singular hold ``inf``.
    """
    m = np.asarray(m, dtype=float)
    p = m.shape[-1]
    s, scale, ok = _scale(m)
    if p <= 4:
        det, adj = _adjugate_diag(s, p)
        singular = ~ok | ~(det > RCOND_MIN)
        safe = np.where(singular, 1.0, det)
        diag = adj / safe[..., None] * scale ** 2
    else:
        w, u = _eigh(s, ok)
        singular = ~ok | ~(w[..., 0] > RCOND_MIN * w[..., -1])
        w_safe = np.where(singular[..., None], 1.0, w)
        diag = np.einsum("...ik,...k->...i", u ** 2, 1.0 / w_safe) * scale ** 2
    diag = np.where(singular[..., None], np.inf, diag)
    return diag, singular


def log_det(m):
    """``log det m`` for a stack of PSD matrices, ``-inf`` where singular."""
    m = np.asarray(m, dtype=float)
    p = m.shape[-1]
    s, scale, ok = _scale(m)
    if p <= 4:
        det, _ = _adjugate_diag(s, p)
        singular = ~ok | ~(det > RCOND_MIN)
        logdet_s = np.log(np.where(singular, 1.0, det))
    else:
        w = _eigvalsh(s, ok)
        singular = ~ok | ~(w[..., 0] > RCOND_MIN * w[..., -1])
        logdet_s = np.sum(np.log(np.where(singular[..., None], 1.0, w)), axis=-1)
    out = logdet_s - 2.0 * np.sum(np.log(scale), axis=-1)
    return np.where(singular, -np.inf, out)
