"""Small dense symmetric linear algebra.

The eigensolver is a cyclic Jacobi iteration. It is meant for the
d <= 16 matrices that describe ellipsoids, where it is exact enough and
easy to audit; nothing here is tuned for large problems.
"""

import math

import numpy as np

from .errors import ConvergenceError

MAX_DIM = 16
OFF_TOL = 1e-14
MAX_SWEEPS = 100
# eigenvalues <= PSD_RTOL * largest are treated as zero
PSD_RTOL = 1e-10


def as_sym(S):
    """Return a float copy of ``S`` with exactly symmetric storage."""
    S = np.array(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {S.shape}")
    if S.shape[0] < 1:
        raise ValueError("matrix dimension must be at least 1")
    return 0.5 * (S + S.T)


def _off(a, d):
    return math.sqrt(sum(a[i][j] * a[i][j] for i in range(d) for j in range(d) if i != j))


def sym_eigen(S, tol=OFF_TOL, max_sweeps=MAX_SWEEPS):
    """Eigen-decompose a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(values, V)`` with ascending ``values`` and orthonormal
    columns ``V`` such that ``S = V @ diag(values) @ V.T``.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * ||S||_F``. Raises :class:`ConvergenceError` after
    ``max_sweeps`` sweeps.
    """
    A = as_sym(S)
    d = A.shape[0]
    scale = float(np.linalg.norm(A))
    if d == 1 or scale == 0.0:
        return np.diag(A).copy(), np.eye(d)
    # plain lists: numpy call overhead dominates at these sizes
    a = A.tolist()
    v = np.eye(d).tolist()
    thresh = tol * scale
    off = _off(a, d)
    sweeps = 0
    while off > thresh:
        if sweeps == max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps", residual=off)
        sweeps += 1
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p][q]
                if apq == 0.0:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                app, aqq = a[p][p], a[q][q]
                for k in range(d):
                    if k == p or k == q:
                        continue
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = a[p][k] = c * akp - s * akq
                    a[k][q] = a[q][k] = s * akp + c * akq
                a[p][p] = app - t * apq
                a[q][q] = aqq + t * apq
                a[p][q] = a[q][p] = 0.0
                for k in range(d):
                    vkp, vkq = v[k][p], v[k][q]
                    v[k][p] = c * vkp - s * vkq
                    v[k][q] = s * vkp + c * vkq
        off = _off(a, d)
    values = np.array([a[i][i] for i in range(d)])
    order = np.argsort(values, kind="stable")
    return values[order], np.array(v)[:, order]


def e_vec(S):
    """Ascending eigenvalues of the symmetric matrix ``S``."""
    return sym_eigen(S)[0]


def spectral_apply(S, fn):
    """``V @ diag(fn(values)) @ V.T`` for symmetric ``S``."""
    values, V = sym_eigen(S)
    return (V * fn(values)) @ V.T


def psd_floor(values):
    """Absolute eigenvalue threshold under which an eigenvalue counts as zero."""
    top = float(np.max(np.abs(values))) if len(values) else 0.0
    return PSD_RTOL * top


def sqrtm_psd(S):
    """Symmetric square root of a PSD matrix (tiny negative eigenvalues clipped)."""
    return spectral_apply(S, lambda v: np.sqrt(np.clip(v, 0.0, None)))


def inv_sqrtm_pinv(S):
    """Pseudo-inverse square root ``S^{-1/2}`` on the range of a PSD matrix."""
    values, V = sym_eigen(S)
    floor = psd_floor(values)
    inv = np.zeros_like(values)
    mask = values > floor
    inv[mask] = 1.0 / np.sqrt(values[mask])
    return (V * inv) @ V.T


def inv_spd(S):
    """Inverse of a symmetric positive definite matrix via its eigenbasis."""
    return spectral_apply(S, lambda v: 1.0 / v)


def polar_psd(Q):
    """Symmetric PSD factor of the left polar decomposition ``Q = S U``.

    ``S = sqrt(Q Q^T)``; the image of the unit ball under ``Q`` equals the
    image under ``S``.
    """
    Q = np.asarray(Q, dtype=float)
    return sqrtm_psd(Q @ Q.T)


def haar_orthogonal(rng, d):
    """Haar-distributed orthogonal ``d x d`` matrix."""
    Z = rng.standard_normal((d, d))
    Qm, R = np.linalg.qr(Z)
    return Qm * np.sign(np.diag(R))
