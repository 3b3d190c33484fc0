"""In-between ellipsoids and executable containment checks.

For two ellipsoids given in the same representation, the in-between
ellipsoid at weight ``lam`` is obtained by convexly combining the
representation parameters. Which containment property it enjoys depends on
the representation:

* image maps: ``E_lam`` lies in ``conv(E0, E1)``;
* pre-image maps: ``E_lam`` contains ``E0 & E1``;
* homogeneous point matrices: ``E_lam`` contains ``E0 & E1``;
* dual matrices: ``E_lam`` (when it is an ellipsoid) lies in
  ``conv(E0, E1)`` for ``lam`` near 0 and 1.
"""

from dataclasses import dataclass, field

import numpy as np

from .ellipsoids import (
    AffineMap,
    HomogeneousQuadric,
    dual_homogeneous,
    ellipsoid_in_convex_hull,
    homogeneous_blocks,
    homogeneous_is_ellipsoid,
    quadric_to_homogeneous,
    to_image,
    to_quadric,
)
from .linalg import as_sym, e_vec
from .sizes import w_pow

DEFAULT_GRID = (0.0, 0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 1.0)
LEMMA_TOL = 1e-9
LEMMA2_TOL = 1e-12


def _check_lam(lam):
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    return lam


def _mix(x0, x1, lam):
    if lam == 0.0:
        return np.array(x0)
    if lam == 1.0:
        return np.array(x1)
    return (1.0 - lam) * np.asarray(x0) + lam * np.asarray(x1)


def _same_mode(E0, E1, mode):
    for E in (E0, E1):
        if not isinstance(E, AffineMap) or E.mode != mode:
            raise TypeError(f"expected AffineMap endpoints in {mode!r} mode")
    if E0.dim != E1.dim:
        raise ValueError("endpoint dimensions differ")


def between_image(E0, E1, lam):
    """``P_lam = (1-lam) P0 + lam P1``, ``t_lam`` likewise (image maps)."""
    lam = _check_lam(lam)
    _same_mode(E0, E1, "image")
    if lam in (0.0, 1.0):
        return E0 if lam == 0.0 else E1
    return AffineMap(_mix(E0.P, E1.P, lam), _mix(E0.t, E1.t, lam), "image")


def between_preimage(E0, E1, lam):
    """Same convex combination for pre-image maps; the result stays PD."""
    lam = _check_lam(lam)
    _same_mode(E0, E1, "preimage")
    if lam in (0.0, 1.0):
        return E0 if lam == 0.0 else E1
    return AffineMap(_mix(E0.P, E1.P, lam), _mix(E0.t, E1.t, lam), "preimage")


def _same_shift(H0, H1):
    if not np.array_equal(H0.shift, H1.shift):
        raise ValueError("homogeneous endpoints must share a coordinate shift")


def between_homogeneous(H0, H1, lam):
    """Convex sum of normalized point matrices; returns ``(H_lam, is_ellipsoid)``."""
    lam = _check_lam(lam)
    for H in (H0, H1):
        if H.kind != "point":
            raise TypeError("expected point-kind homogeneous endpoints")
    _same_shift(H0, H1)
    if lam in (0.0, 1.0):
        H = H0 if lam == 0.0 else H1
    else:
        H = HomogeneousQuadric(_mix(H0.M, H1.M, lam), "point", H0.shift)
    return H, homogeneous_is_ellipsoid(H)


def between_dual(D0, D1, lam):
    """Convex sum of dual homogeneous matrices; returns ``(N_lam, is_ellipsoid)``.

    Endpoints may be :class:`DualEllipsoid` instances or dual-kind
    :class:`HomogeneousQuadric` matrices (which also cover ellipsoids that do
    not contain the origin).
    """
    lam = _check_lam(lam)
    N0 = D0 if isinstance(D0, HomogeneousQuadric) else dual_homogeneous(D0)
    N1 = D1 if isinstance(D1, HomogeneousQuadric) else dual_homogeneous(D1)
    for N in (N0, N1):
        if N.kind != "dual":
            raise TypeError("expected dual endpoints")
    _same_shift(N0, N1)
    if lam in (0.0, 1.0):
        N = N0 if lam == 0.0 else N1
    else:
        N = HomogeneousQuadric(_mix(N0.M, N1.M, lam), "dual", N0.shift)
    return N, homogeneous_is_ellipsoid(N)


_BUILDERS = {
    "image": between_image,
    "preimage": between_preimage,
    "homogeneous": between_homogeneous,
    "dual": between_dual,
}


@dataclass(frozen=True)
class InBetweenFamily:
    """``lam -> E_lam`` for a fixed pair of endpoints in one representation."""

    kind: str
    E0: object
    E1: object

    def __post_init__(self):
        if self.kind not in _BUILDERS:
            raise ValueError(f"kind must be one of {sorted(_BUILDERS)}")

    def __call__(self, lam):
        return _BUILDERS[self.kind](self.E0, self.E1, lam)


# ------------------------------------------------------------------ checkers

@dataclass
class LemmaReport:
    lemma: str
    lambdas: list
    margins: list
    violations: int
    tol: float
    vacuous: bool = False
    samples: int = 0
    lam_star_low: float = None
    lam_star_high: float = None
    extra: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.violations == 0

    @property
    def worst_margin(self):
        finite = [m for m in self.margins if m is not None]
        return min(finite) if finite else None

    def to_dict(self):
        out = {
            "lemma": self.lemma,
            "lambdas": list(self.lambdas),
            "margins": list(self.margins),
            "worst_margin": self.worst_margin,
            "violations": self.violations,
            "tol": self.tol,
            "vacuous": self.vacuous,
            "samples": self.samples,
        }
        if self.lam_star_low is not None:
            out["lam_star_low"] = self.lam_star_low
            out["lam_star_high"] = self.lam_star_high
        out.update(self.extra)
        return out


def check_lemma1(E0, E1, lambdas=DEFAULT_GRID, n_dirs=512, seed=0, tol=LEMMA_TOL):
    """Support dominance ``h_lam <= max(h0, h1)`` for image-map in-betweens."""
    margins = []
    violations = 0
    for lam in lambdas:
        ok, margin = ellipsoid_in_convex_hull(between_image(E0, E1, lam), E0, E1, n_dirs, seed, tol)
        margins.append(margin)
        violations += not ok
    return LemmaReport("1", list(lambdas), margins, violations, tol)


def sample_intersection(E0, E1, n_accept=1000, max_proposals=1_000_000, seed=0, batch=20_000):
    """Rejection-sample ``E0 & E1`` from the bounding box of the smaller endpoint."""
    Q0, Q1 = to_quadric(E0), to_quadric(E1)
    vol = [1.0 / np.sqrt(np.linalg.det(Q.shape)) for Q in (Q0, Q1)]
    small = to_image(E0 if vol[0] <= vol[1] else E1)
    half = np.linalg.norm(small.P, axis=1)
    lo, hi = small.t - half, small.t + half
    rng = np.random.default_rng(seed)
    accepted = []
    count = 0
    proposals = 0
    while count < n_accept and proposals < max_proposals:
        n = min(batch, max_proposals - proposals)
        X = rng.uniform(lo, hi, size=(n, len(lo)))
        proposals += n
        inside = np.ones(n, dtype=bool)
        for Q in (Q0, Q1):
            Y = X - Q.center
            inside &= np.einsum("ij,jk,ik->i", Y, Q.shape, Y) <= 1.0
        X = X[inside]
        accepted.append(X)
        count += len(X)
    pts = np.vstack(accepted) if accepted else np.zeros((0, len(lo)))
    return pts[:n_accept]


MIN_INTERSECTION = 10


def check_lemma2(E0, E1, lambdas=DEFAULT_GRID, n_samples=1000, seed=0, tol=LEMMA2_TOL):
    """Sampled points of ``E0 & E1`` satisfy ``|P_lam x + t_lam| <= 1``."""
    pts = sample_intersection(E0, E1, n_samples, seed=seed)
    if len(pts) < MIN_INTERSECTION:
        return LemmaReport("2", list(lambdas), [None] * len(lambdas), 0, tol, vacuous=True,
                           samples=len(pts))
    margins = []
    violations = 0
    for lam in lambdas:
        E = between_preimage(E0, E1, lam)
        vals = np.linalg.norm(pts @ E.P.T + E.t, axis=1) - 1.0
        worst = float(np.max(vals))
        margins.append(-worst)
        violations += worst > tol
    return LemmaReport("2", list(lambdas), margins, violations, tol, samples=len(pts))


def check_homogeneous_intersection(E0, E1, lambdas=DEFAULT_GRID, n_samples=1000, seed=0,
                                   tol=LEMMA2_TOL, shift=None):
    """Sampled points of ``E0 & E1`` lie in the homogeneous in-between ``E_lam``.

    The homogeneous matrices need an origin inside both ellipsoids; when
    ``shift`` is omitted the mean of the sampled intersection points is used.
    """
    Q0, Q1 = to_quadric(E0), to_quadric(E1)
    pts = sample_intersection(Q0, Q1, n_samples, seed=seed)
    if len(pts) < MIN_INTERSECTION:
        return LemmaReport("homogeneous", list(lambdas), [None] * len(lambdas), 0, tol,
                           vacuous=True, samples=len(pts))
    if shift is None:
        shift = pts.mean(axis=0)
    H0 = quadric_to_homogeneous(Q0, shift)
    H1 = quadric_to_homogeneous(Q1, shift)
    margins = []
    violations = 0
    for lam in lambdas:
        H, ok = between_homogeneous(H0, H1, lam)
        X = np.column_stack([np.ones(len(pts)), pts - H.shift])
        vals = np.einsum("ij,jk,ik->i", X, H.M, X)
        worst = float(np.max(vals))
        margins.append(-worst)
        violations += (worst > tol) or not ok
    return LemmaReport("homogeneous", list(lambdas), margins, violations, tol, samples=len(pts))


def _prefix_len(flags):
    n = 0
    for f in flags:
        if not f:
            break
        n += 1
    return n


def check_lemma4(D0, D1, lambdas=DEFAULT_GRID, n_dirs=512, seed=0, tol=LEMMA_TOL):
    """Convex-hull containment of dual in-betweens near ``lam = 0`` and ``lam = 1``.

    ``lam_star_low`` is the largest grid value reachable from 0 through
    grid points where the dual in-between is an ellipsoid; ``lam_star_high``
    the smallest one reachable from 1. Containment is tested on those two
    prefixes only; margins elsewhere are reported as ``None``.
    """
    lams = sorted(float(x) for x in lambdas)
    N0 = D0 if isinstance(D0, HomogeneousQuadric) else dual_homogeneous(D0)
    N1 = D1 if isinstance(D1, HomogeneousQuadric) else dual_homogeneous(D1)
    if N0.dim != 2:
        raise ValueError("the dual containment check is two-dimensional")
    built = [between_dual(N0, N1, lam) for lam in lams]
    flags = [ok for _, ok in built]
    lo = _prefix_len(flags)
    hi = _prefix_len(flags[::-1])
    valid = set(range(lo)) | set(range(len(lams) - hi, len(lams)))
    E0 = to_image(N0)
    E1 = to_image(N1)
    margins = []
    violations = 0
    for i, (N, _) in enumerate(built):
        if i not in valid:
            margins.append(None)
            continue
        ok, margin = ellipsoid_in_convex_hull(to_image(N), E0, E1, n_dirs, seed, tol)
        margins.append(margin)
        violations += not ok
    lam_low = lams[lo - 1] if lo else None
    lam_high = lams[len(lams) - hi] if hi else None
    return LemmaReport("4", lams, margins, violations, tol, lam_star_low=lam_low,
                       lam_star_high=lam_high,
                       extra={"is_ellipsoid": flags})


def semi_axes_from_dual_blocks(N):
    """Semi-axes read directly from the dual matrix blocks (square roots of ``e(K + g g^T)``)."""
    _, g, K = homogeneous_blocks(N)
    return np.sort(w_pow(0.5, e_vec(as_sym(K + np.outer(g, g)))))


__all__ = [
    "DEFAULT_GRID",
    "InBetweenFamily",
    "LemmaReport",
    "between_dual",
    "between_homogeneous",
    "between_image",
    "between_preimage",
    "check_homogeneous_intersection",
    "check_lemma1",
    "check_lemma2",
    "check_lemma4",
    "sample_intersection",
    "semi_axes_from_dual_blocks",
]
