"""Ellipsoid representations and conversions between them.

Four descriptions of the same point set are supported:

* ``QuadricEllipsoid``: ``(x - m)^T A (x - m) <= 1`` with ``A`` PSD.
* ``AffineMap`` in ``"image"`` mode: ``{P y + t : |y| <= 1}``.
* ``AffineMap`` in ``"preimage"`` mode: ``{x : |P x + t| <= 1}``.
* ``DualEllipsoid``: hyperplanes ``u . x = 1`` written as
  ``(u - c)^T B (u - c) <= 1``; this region is the polar body, i.e. the
  hyperplanes that miss the interior.

``HomogeneousQuadric`` holds the ``(d+1) x (d+1)`` point or dual matrix.
Matrices are always stored symmetric and all objects are immutable.
Homogeneous and dual forms may carry a coordinate ``shift``: formulas are
evaluated in local coordinates ``x - shift``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import OriginNotInterior, SingularRepresentation
from .sizes import w_pow
from .linalg import (
    MAX_DIM,
    as_sym,
    haar_orthogonal,
    inv_spd,
    inv_sqrtm_pinv,
    polar_psd,
    psd_floor,
    sqrtm_psd,
    sym_eigen,
)

ORIGIN_TOL = 1e-12
CONTAIN_TOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _vec(x, d=None):
    x = np.asarray(x, dtype=float).reshape(-1)
    if d is not None and x.shape[0] != d:
        raise ValueError(f"expected a vector of length {d}, got {x.shape[0]}")
    return x


def _check_psd(S, name, strict=False):
    values = sym_eigen(S)[0]
    floor = psd_floor(values)
    if values[0] < -floor:
        raise ValueError(f"{name} is not positive semi-definite (min eigenvalue {values[0]:.3g})")
    if strict and values[0] <= floor:
        raise SingularRepresentation(f"{name} is singular (min eigenvalue {values[0]:.3g})")
    return values


def _check_dim(d):
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds the supported maximum {MAX_DIM}")


@dataclass(frozen=True)
class QuadricEllipsoid:
    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        A = as_sym(self.shape)
        _check_dim(A.shape[0])
        m = _vec(self.center, A.shape[0])
        _check_psd(A, "shape matrix")
        object.__setattr__(self, "shape", _frozen(A))
        object.__setattr__(self, "center", _frozen(m))

    @property
    def dim(self):
        return self.center.shape[0]

    @property
    def singular(self):
        values = sym_eigen(self.shape)[0]
        return bool(values[0] <= psd_floor(values))


@dataclass(frozen=True)
class AffineMap:
    P: np.ndarray
    t: np.ndarray
    mode: str = "image"

    def __post_init__(self):
        if self.mode not in ("image", "preimage"):
            raise ValueError(f"mode must be 'image' or 'preimage', not {self.mode!r}")
        P = as_sym(self.P)
        _check_dim(P.shape[0])
        t = _vec(self.t, P.shape[0])
        _check_psd(P, "P", strict=self.mode == "preimage")
        object.__setattr__(self, "P", _frozen(P))
        object.__setattr__(self, "t", _frozen(t))

    @property
    def dim(self):
        return self.t.shape[0]

    @classmethod
    def from_general(cls, Q, t, mode="image"):
        """Build from an arbitrary (non-symmetric) matrix via left polar decomposition."""
        return cls(polar_psd(Q), t, mode)


@dataclass(frozen=True)
class HomogeneousQuadric:
    M: np.ndarray
    kind: str = "point"
    shift: np.ndarray = None

    def __post_init__(self):
        if self.kind not in ("point", "dual"):
            raise ValueError(f"kind must be 'point' or 'dual', not {self.kind!r}")
        M = as_sym(self.M)
        if M.shape[0] < 2:
            raise ValueError("homogeneous matrix must be at least 2 x 2")
        d = M.shape[0] - 1
        _check_dim(d)
        # positive rescaling only: a negative factor would swap inside and outside
        if M[0, 0] < 0.0:
            M = M / -M[0, 0]
        shift = np.zeros(d) if self.shift is None else _vec(self.shift, d)
        object.__setattr__(self, "M", _frozen(M))
        object.__setattr__(self, "shift", _frozen(shift))

    @property
    def dim(self):
        return self.M.shape[0] - 1


@dataclass(frozen=True)
class DualEllipsoid:
    B: np.ndarray
    c: np.ndarray
    shift: np.ndarray = None

    def __post_init__(self):
        B = as_sym(self.B)
        _check_dim(B.shape[0])
        c = _vec(self.c, B.shape[0])
        _check_psd(B, "B")
        shift = np.zeros(B.shape[0]) if self.shift is None else _vec(self.shift, B.shape[0])
        object.__setattr__(self, "B", _frozen(B))
        object.__setattr__(self, "c", _frozen(c))
        object.__setattr__(self, "shift", _frozen(shift))

    @property
    def dim(self):
        return self.c.shape[0]

    @property
    def B_prime(self):
        denom = 1.0 - self.c @ self.B @ self.c
        if denom <= ORIGIN_TOL:
            raise OriginNotInterior("1 - c^T B c must be positive")
        return self.B / denom

    @property
    def Q(self):
        """Lower-right block of the centered dual matrix; equals ``A^{-1}``."""
        Bp = self.B_prime
        v = Bp @ self.c
        return as_sym(np.outer(v, v) + Bp)


@dataclass(frozen=True)
class HPolytope:
    """Intersection of half-spaces ``a_j . x <= b_j`` with unit normals."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.array(self.A, dtype=float))
        b = _vec(self.b, A.shape[0])
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("half-space normal must be nonzero")
        object.__setattr__(self, "A", _frozen(A / norms[:, None]))
        object.__setattr__(self, "b", _frozen(b / norms))

    @property
    def dim(self):
        return self.A.shape[1]

    @property
    def rows(self):
        return [(a.copy(), float(bj)) for a, bj in zip(self.A, self.b)]

    @classmethod
    def from_rows(cls, rows):
        A = [r[0] for r in rows]
        b = [r[1] for r in rows]
        return cls(A, b)

    @classmethod
    def box(cls, lo, hi):
        lo = _vec(lo)
        hi = _vec(hi, lo.shape[0])
        eye = np.eye(lo.shape[0])
        return cls(np.vstack([eye, -eye]), np.concatenate([hi, -lo]))

    @classmethod
    def from_vertices_2d(cls, vertices):
        """Polygon from counter-clockwise vertices."""
        V = np.asarray(vertices, dtype=float)
        rows = []
        for i in range(len(V)):
            p, q = V[i], V[(i + 1) % len(V)]
            edge = q - p
            normal = np.array([edge[1], -edge[0]])
            rows.append((normal, float(normal @ p)))
        return cls.from_rows(rows)


# ---------------------------------------------------------------- semi-axes

def semi_axes(rep):
    """Ascending semi-axis lengths of any representation."""
    if isinstance(rep, QuadricEllipsoid):
        values = sym_eigen(rep.shape)[0]
        if values[0] <= psd_floor(values):
            raise SingularRepresentation("quadric shape matrix must be positive definite")
        return np.sort(w_pow(-0.5, values))
    if isinstance(rep, AffineMap):
        values = sym_eigen(rep.P)[0]
        if rep.mode == "image":
            return np.sort(w_pow(1.0, values))
        if values[0] <= psd_floor(values):
            raise SingularRepresentation("pre-image matrix must be positive definite")
        return np.sort(w_pow(-1.0, values))
    if isinstance(rep, DualEllipsoid):
        return np.sort(w_pow(0.5, sym_eigen(rep.Q)[0]))
    if isinstance(rep, HomogeneousQuadric):
        return semi_axes(homogeneous_to_quadric(rep))
    raise TypeError(f"unsupported representation {type(rep).__name__}")


# -------------------------------------------------------------- conversions

def quadric_to_affine(E):
    """Image-mode map ``P = A^{-1/2}`` (pseudo-inverse on singular directions)."""
    return AffineMap(inv_sqrtm_pinv(E.shape), E.center, "image")


def quadric_to_preimage(E):
    """Pre-image map ``P = A^{1/2}``, ``t = -P m``."""
    P = sqrtm_psd(E.shape)
    return AffineMap(P, -P @ E.center, "preimage")


def affine_to_quadric(F):
    values, V = sym_eigen(F.P)
    if values[0] <= psd_floor(values):
        raise SingularRepresentation(f"{F.mode} map P is singular")
    if F.mode == "image":
        return QuadricEllipsoid(F.t, (V / values**2) @ V.T)
    center = -(V / values) @ V.T @ F.t
    return QuadricEllipsoid(center, (V * values**2) @ V.T)


def to_quadric(rep):
    if isinstance(rep, QuadricEllipsoid):
        return rep
    if isinstance(rep, AffineMap):
        return affine_to_quadric(rep)
    if isinstance(rep, DualEllipsoid):
        return dual_to_quadric(rep)
    if isinstance(rep, HomogeneousQuadric):
        return homogeneous_to_quadric(rep)
    raise TypeError(f"unsupported representation {type(rep).__name__}")


def to_image(rep):
    """Image-mode view; singular image maps are passed through unchanged."""
    if isinstance(rep, AffineMap) and rep.mode == "image":
        return rep
    if isinstance(rep, DualEllipsoid):
        return AffineMap(sqrtm_psd(rep.Q), -rep.B_prime @ rep.c + rep.shift, "image")
    if isinstance(rep, HomogeneousQuadric) and rep.kind == "dual":
        S, m = _dual_blocks(rep)
        return AffineMap(sqrtm_psd(S), m, "image")
    return quadric_to_affine(to_quadric(rep))


def quadric_to_homogeneous(E, shift=None):
    """Point-form ``(d+1) x (d+1)`` matrix with ``X^T M X <= 0`` inside.

    Raises :class:`OriginNotInterior` unless the (shifted) origin is strictly
    inside ``E``; pass ``shift=E.center`` to re-center.
    """
    shift = np.zeros(E.dim) if shift is None else _vec(shift, E.dim)
    A = np.asarray(E.shape)
    m = E.center - shift
    denom = 1.0 - m @ A @ m
    if denom <= ORIGIN_TOL:
        raise OriginNotInterior(
            f"origin is not interior (1 - m^T A m = {denom:.3g}); re-center coordinates")
    Ap = A / denom
    d = E.dim
    M = np.empty((d + 1, d + 1))
    M[0, 0] = -1.0
    M[0, 1:] = -(m @ Ap)
    M[1:, 0] = -(Ap @ m)
    M[1:, 1:] = Ap
    return HomogeneousQuadric(M, "point", shift)


def homogeneous_blocks(H):
    M = np.asarray(H.M)
    return M[0, 0], M[1:, 0], M[1:, 1:]


def homogeneous_is_ellipsoid(H):
    """True when the quadric describes a nonempty, bounded, full-dimensional ellipsoid."""
    if H.kind == "dual":
        S, _ = _dual_blocks(H)
        values = sym_eigen(S)[0]
        return bool(values[0] > psd_floor(values) and values[-1] > 0)
    m00, b, C = homogeneous_blocks(H)
    values, V = sym_eigen(C)
    if values[-1] <= 0 or values[0] <= psd_floor(values):
        return False
    x0 = -(V / values) @ V.T @ b
    return bool(m00 + b @ x0 < 0)


def homogeneous_to_quadric(H):
    if H.kind == "dual":
        if not homogeneous_is_ellipsoid(H):
            raise SingularRepresentation("dual quadric does not describe an ellipsoid")
        S, m = _dual_blocks(H)
        return QuadricEllipsoid(m, inv_spd(S))
    if not homogeneous_is_ellipsoid(H):
        raise SingularRepresentation("point quadric does not describe an ellipsoid")
    m00, b, C = homogeneous_blocks(H)
    Cinv = inv_spd(C)
    x0 = -Cinv @ b
    r = -(m00 + b @ x0)
    return QuadricEllipsoid(x0 + H.shift, C / r)


def quadric_to_dual(E, shift=None):
    """Dual (polar) representation ``(B, c)``; needs the origin strictly inside."""
    shift = np.zeros(E.dim) if shift is None else _vec(shift, E.dim)
    values = sym_eigen(E.shape)[0]
    if values[0] <= psd_floor(values):
        raise SingularRepresentation("dual representation needs a regular ellipsoid")
    m = E.center - shift
    if 1.0 - m @ E.shape @ m <= ORIGIN_TOL:
        raise OriginNotInterior("origin is not interior; pass shift=E.center to re-center")
    Bp = as_sym(inv_spd(E.shape) - np.outer(m, m))
    c = -inv_spd(Bp) @ m
    B = Bp / (1.0 + c @ Bp @ c)
    return DualEllipsoid(B, c, shift)


def dual_to_quadric(D):
    Bp = D.B_prime
    return QuadricEllipsoid(-Bp @ D.c + D.shift, inv_spd(D.Q))


def dual_homogeneous(rep, shift=None):
    """Dual homogeneous matrix ``N`` (tangent hyperplanes satisfy ``U^T N U = 0``).

    For a :class:`DualEllipsoid` this is the normalized matrix built from
    ``B' = B / (1 - c^T B c)``. For any other regular representation it is
    formed directly as ``[[-1, m^T], [m, A^{-1} - m m^T]]``, which needs no
    normalization and so also covers ellipsoids that miss the origin.
    """
    if isinstance(rep, DualEllipsoid):
        Bp = rep.B_prime
        v = Bp @ rep.c
        d = rep.dim
        N = np.empty((d + 1, d + 1))
        N[0, 0] = -1.0
        N[0, 1:] = -v
        N[1:, 0] = -v
        N[1:, 1:] = Bp
        return HomogeneousQuadric(N, "dual", rep.shift)
    E = to_quadric(rep)
    shift = np.zeros(E.dim) if shift is None else _vec(shift, E.dim)
    m = E.center - shift
    d = E.dim
    N = np.empty((d + 1, d + 1))
    N[0, 0] = -1.0
    N[0, 1:] = m
    N[1:, 0] = m
    N[1:, 1:] = inv_spd(E.shape) - np.outer(m, m)
    return HomogeneousQuadric(N, "dual", shift)


def _dual_blocks(H):
    """``(A^{-1}, center)`` recovered from a dual homogeneous matrix."""
    _, g, K = homogeneous_blocks(H)
    return as_sym(K + np.outer(g, g)), g + H.shift


# --------------------------------------------------------------- predicates

def membership_value(rep, x):
    """Defining-inequality value; ``<= 0`` means inside."""
    x = _vec(x, rep.dim)
    if isinstance(rep, QuadricEllipsoid):
        y = x - rep.center
        return float(y @ rep.shape @ y - 1.0)
    if isinstance(rep, AffineMap):
        if rep.mode == "preimage":
            return float(np.linalg.norm(rep.P @ x + rep.t) - 1.0)
        values, V = sym_eigen(rep.P)
        floor = psd_floor(values)
        y = V.T @ (x - rep.t)
        mask = values > floor
        out_of_range = np.linalg.norm(y[~mask])
        if out_of_range > 0.0:
            return float(out_of_range)
        return float(np.linalg.norm(y[mask] / values[mask]) - 1.0)
    if isinstance(rep, HomogeneousQuadric) and rep.kind == "point":
        X = np.concatenate([[1.0], x - rep.shift])
        return float(X @ rep.M @ X)
    return membership_value(to_quadric(rep), x)


def contains_point(rep, x, tol=CONTAIN_TOL):
    return membership_value(rep, x) <= tol


def support_value(E, u):
    """``max_{x in E} u . x = u . t + |P u|`` for an image-mode map."""
    E = to_image(E)
    u = _vec(u, E.dim)
    return float(u @ E.t + np.linalg.norm(E.P @ u))


def support_values(E, U):
    """Support function on the rows of ``U``."""
    E = to_image(E)
    U = np.asarray(U, dtype=float)
    return U @ E.t + np.linalg.norm(U @ E.P, axis=1)


def ellipsoid_in_polytope(E, F, tol=1e-9):
    """Return ``(inside, worst_slack)`` for row slacks ``b_j - |P a_j| - a_j . t``."""
    E = to_image(E)
    slack = F.b - support_values(E, F.A)
    worst = float(np.min(slack))
    return worst >= -tol, worst


def unit_directions(d, n, seed=0):
    """``n`` seeded unit vectors in ``R^d``; evenly spaced angles when ``d == 2``."""
    if d == 2:
        rng = np.random.default_rng(seed)
        phase = rng.uniform(0.0, 2.0 * np.pi / n)
        ang = phase + 2.0 * np.pi * np.arange(n) / n
        return np.column_stack([np.cos(ang), np.sin(ang)])
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((n, d))
    return U / np.linalg.norm(U, axis=1, keepdims=True)


def sphere_sample_count(d):
    """Boundary sample size used by sampling-based containment checks."""
    return 512 * max(1, d - 1)


def ellipsoid_in_convex_hull(E, E0, E1, n_dirs=512, seed=0, tol=1e-9):
    """Support-function test for ``E`` inside ``conv(E0, E1)``.

    Returns ``(inside, margin)`` with ``margin = min_u max(h0, h1) - h_E``.
    """
    if n_dirs < 64:
        raise ValueError("n_dirs must be at least 64")
    E, E0, E1 = to_image(E), to_image(E0), to_image(E1)
    U = unit_directions(E.dim, n_dirs, seed)
    margin = float(np.min(np.maximum(support_values(E0, U), support_values(E1, U)) - support_values(E, U)))
    return margin >= -tol, margin


def boundary_points(E, n=None, seed=0):
    """Points ``P y + t`` for seeded unit vectors ``y``."""
    E = to_image(E)
    n = sphere_sample_count(E.dim) if n is None else n
    Y = unit_directions(E.dim, n, seed)
    return Y @ E.P + E.t


def random_quadric(rng, d, log_axis_range=(-1.0, 1.0), center_scale=1.0):
    """Seeded regular ellipsoid with log-uniform semi-axes and random orientation."""
    axes = np.exp(rng.uniform(*log_axis_range, size=d))
    R = haar_orthogonal(rng, d)
    A = (R / axes**2) @ R.T
    return QuadricEllipsoid(center_scale * rng.standard_normal(d), A)


# ------------------------------------------------------------ serialization

def to_dict(obj):
    """JSON-ready dict using the documented field names."""
    if isinstance(obj, QuadricEllipsoid):
        return {"center": obj.center.tolist(), "shape": obj.shape.tolist()}
    if isinstance(obj, AffineMap):
        return {"P": obj.P.tolist(), "t": obj.t.tolist(), "mode": obj.mode}
    if isinstance(obj, HPolytope):
        return {"rows": [{"a": a.tolist(), "b": b} for a, b in obj.rows]}
    if isinstance(obj, DualEllipsoid):
        return {"B": obj.B.tolist(), "c": obj.c.tolist(), "shift": obj.shift.tolist()}
    if isinstance(obj, HomogeneousQuadric):
        return {"M": obj.M.tolist(), "kind": obj.kind, "shift": obj.shift.tolist()}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_dict(data):
    if "rows" in data:
        return HPolytope.from_rows([(r["a"], r["b"]) for r in data["rows"]])
    if "halfspaces" in data:
        return HPolytope.from_rows([(r["a"], r["b"]) for r in data["halfspaces"]])
    if "shape" in data:
        return QuadricEllipsoid(data["center"], data["shape"])
    if "P" in data:
        return AffineMap(data["P"], data["t"], data.get("mode", "image"))
    if "B" in data:
        return DualEllipsoid(data["B"], data["c"], data.get("shift"))
    if "M" in data:
        return HomogeneousQuadric(data["M"], data.get("kind", "point"), data.get("shift"))
    raise ValueError(f"unrecognized ellipsoid document with keys {sorted(data)}")


__all__ = [
    "AffineMap",
    "DualEllipsoid",
    "HPolytope",
    "HomogeneousQuadric",
    "QuadricEllipsoid",
    "affine_to_quadric",
    "boundary_points",
    "contains_point",
    "dual_homogeneous",
    "dual_to_quadric",
    "ellipsoid_in_convex_hull",
    "ellipsoid_in_polytope",
    "from_dict",
    "homogeneous_is_ellipsoid",
    "homogeneous_to_quadric",
    "membership_value",
    "quadric_to_affine",
    "quadric_to_dual",
    "quadric_to_homogeneous",
    "quadric_to_preimage",
    "random_quadric",
    "semi_axes",
    "support_value",
    "support_values",
    "to_dict",
    "to_image",
    "to_quadric",
    "unit_directions",
]
