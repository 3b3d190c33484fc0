"""Extremal ellipsoid solvers.

``solve_min_enclosing`` and ``solve_max_inscribed`` minimize a smoothed
exact penalty

    phi(P, t) + mu * sum_i sigma * softplus(g_i(P, t) / sigma)

over symmetric ``P`` and ``t``, where ``phi`` is the (log of the) size
function read off the spectrum of ``P`` and ``g_i <= 0`` are the
containment constraints. Each outer round warm-starts L-BFGS from the
previous solution, halves ``sigma`` and multiplies ``mu`` by the growth
factor while the iterate is still infeasible. The final iterate is made
exactly feasible by a uniform scaling about its center.

``khachiyan_mvee`` is the classical barycentric coordinate-ascent method
for the minimum-volume enclosing ellipsoid; it serves as an independent
oracle for the volume case.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linprog, minimize

from .ellipsoids import (
    AffineMap,
    HPolytope,
    QuadricEllipsoid,
    affine_to_quadric,
    to_dict,
    to_quadric,
)
from .errors import DomainError, PreflightError, SingularRepresentation
from .linalg import as_sym, haar_orthogonal, sym_eigen
from .sizes import as_size_function, convexity_probe, unit_ball_volume, w_pow


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 500
    outer_rounds: int = 40
    obj_tol: float = 1e-10
    cons_tol: float = 1e-9
    penalty_growth: float = 10.0
    mu0: float = 10.0
    sigma0: float = 1e-2
    sigma_shrink: float = 0.5
    sigma_min: float = 1e-11
    fd_step: float = 1e-7
    multistart: int = 1
    seed: int = 0
    probe_trials: int = 2000

    def __post_init__(self):
        if self.obj_tol <= 0 or self.cons_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.multistart < 1:
            raise ValueError("multistart must be at least 1")


@dataclass
class SolveResult:
    affine: AffineMap
    quadric: object
    objective: float
    slack: float
    iterations: int
    converged: bool
    trace: list = field(default_factory=list, repr=False)
    starts: list = field(default_factory=list, repr=False)
    message: str = ""
    rank: int = None

    def to_dict(self):
        return {
            "affine": to_dict(self.affine),
            "quadric": to_dict(self.quadric) if self.quadric is not None else None,
            "objective": self.objective,
            "slack": self.slack,
            "iterations": self.iterations,
            "converged": self.converged,
            "message": self.message,
        }


# ----------------------------------------------------------- parametrization

def _sym_index(d):
    return np.triu_indices(d)


def _pack(P, t, fixed_t):
    iu = _sym_index(P.shape[0])
    return P[iu].copy() if fixed_t else np.concatenate([P[iu], t])


def _unpack(theta, d, fixed_t, t_fixed=None):
    iu = _sym_index(d)
    k = len(iu[0])
    P = np.zeros((d, d))
    P[iu] = theta[:k]
    P = P + np.triu(P, 1).T
    t = t_fixed if fixed_t else theta[k:]
    return P, t


def _sym_grad_to_theta(G):
    """Gradient w.r.t. the upper-triangle parameters of a symmetric matrix."""
    d = G.shape[0]
    iu = _sym_index(d)
    H = 2.0 * G
    H[np.diag_indices(d)] = np.diag(G)
    return H[iu]


def _spectral_value_grad(phi, S, h):
    """``phi(e(S))`` and its matrix gradient ``V diag(grad phi) V^T``."""
    values, V = sym_eigen(S)
    val = phi(values)
    g = np.empty_like(values)
    for i in range(len(values)):
        step = h * max(abs(values[i]), 1e-8)
        up = values.copy()
        dn = values.copy()
        up[i] += step
        dn[i] -= step
        g[i] = (phi(up) - phi(dn)) / (2.0 * step)
    return val, (V * g) @ V.T


def _softplus_terms(gv, mu, sigma):
    z = gv / sigma
    return mu * sigma * np.logaddexp(0.0, z), mu / (1.0 + np.exp(-np.clip(z, -700, 700)))


# ------------------------------------------------------------------- problems

class _Problem:
    """Penalized objective for one of the three solver families."""

    kind = None

    def objective_phi(self, values):
        raise NotImplementedError

    def constraints(self, P, t):
        """Return constraint values ``g`` and a callable for weighted gradients."""
        raise NotImplementedError


class _Enclosing(_Problem):
    kind = "enclose"

    def __init__(self, X, f):
        self.X = X
        self.f = f

    def objective_phi(self, values):
        return math.log(self.f(np.sort(w_pow(-1.0, values))))

    def constraints(self, P, t):
        R = self.X @ P + t
        n = np.linalg.norm(R, axis=1)
        gv = n - 1.0

        def grad(w):
            c = w / np.maximum(n, 1e-300)
            G = (R * c[:, None]).T @ self.X
            return 0.5 * (G + G.T), (R * c[:, None]).sum(axis=0)

        return gv, grad


class _Inscribed(_Problem):
    kind = "inscribe"

    def __init__(self, F, f):
        self.F = F
        self.f = f

    def objective_phi(self, values):
        val = self.f(np.sort(w_pow(1.0, values)))
        if val <= 0.0:
            return math.inf
        return -math.log(val)

    def constraints(self, P, t):
        A = np.asarray(self.F.A)
        R = A @ P
        n = np.linalg.norm(R, axis=1)
        gv = n + A @ t - self.F.b

        def grad(w):
            c = np.where(n > 0, w / np.maximum(n, 1e-300), 0.0)
            G = (R * c[:, None]).T @ A
            return 0.5 * (G + G.T), (A * w[:, None]).sum(axis=0)

        return gv, grad


class _DualFixedCenter(_Problem):
    """Centered dual block ``Q`` (``= P^2``) with linear constraints."""

    kind = "dual"

    def __init__(self, F, m, f):
        self.F = F
        self.f = f
        A = np.asarray(F.A)
        self.rhs = (F.b - A @ m) ** 2
        self.A = A / np.sqrt(self.rhs)[:, None]

    def objective_phi(self, values):
        val = self.f(np.sort(w_pow(0.5, values)))
        if val <= 0.0:
            return math.inf
        return -math.log(val)

    def constraints(self, Q, t):
        quad = np.einsum("ij,jk,ik->i", self.A, Q, self.A) - 1.0
        values, V = sym_eigen(Q)
        scale = max(1.0, float(np.max(np.abs(values))))
        gv = np.concatenate([quad, -values / scale])

        def grad(w):
            nq = len(quad)
            G = (self.A * w[:nq, None]).T @ self.A
            G = G - (V * (w[nq:] / scale)) @ V.T
            return G, np.zeros(len(t))

        return gv, grad


def _penalized(problem, d, fixed_t, t_fixed, mu, sigma, h, trace):
    def fun(theta):
        P, t = _unpack(theta, d, fixed_t, t_fixed)
        try:
            val, G = _spectral_value_grad(problem.objective_phi, P, h)
        except (DomainError, ValueError, ZeroDivisionError):
            return math.inf, np.zeros_like(theta)
        if not math.isfinite(val):
            return math.inf, np.zeros_like(theta)
        gv, cgrad = problem.constraints(P, t)
        pen, w = _softplus_terms(gv, mu, sigma)
        GP, gt = cgrad(w)
        total = val + float(pen.sum())
        grad_P = _sym_grad_to_theta(G + GP)
        gradient = grad_P if fixed_t else np.concatenate([grad_P, gt])
        return total, gradient

    return fun


def _run_penalty(problem, P0, t0, cfg, fixed_t=False):
    d = P0.shape[0]
    t_fixed = np.array(t0, dtype=float) if fixed_t else None
    theta = _pack(np.asarray(P0, dtype=float), np.asarray(t0, dtype=float), fixed_t)
    mu, sigma = cfg.mu0, cfg.sigma0
    trace = []
    iterations = 0
    last_obj = None
    converged = False
    for _ in range(cfg.outer_rounds):
        fun = _penalized(problem, d, fixed_t, t_fixed, mu, sigma, cfg.fd_step, trace)
        round_trace = []

        def callback(xk):
            round_trace.append(fun(xk)[0])

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = minimize(fun, theta, jac=True, method="L-BFGS-B", callback=callback,
                           options={"maxiter": cfg.max_iter, "gtol": 1e-12, "ftol": 1e-15})
        if np.all(np.isfinite(res.x)) and math.isfinite(res.fun):
            theta = res.x
        iterations += int(res.nit)
        trace.append({"mu": mu, "sigma": sigma, "values": round_trace})
        P, t = _unpack(theta, d, fixed_t, t_fixed)
        gv, _ = problem.constraints(P, t)
        worst = float(np.max(gv))
        obj = problem.objective_phi(sym_eigen(P)[0])
        if worst > cfg.cons_tol:
            mu *= cfg.penalty_growth
        if (sigma <= cfg.sigma_min and last_obj is not None and worst <= cfg.cons_tol
                and abs(obj - last_obj) <= cfg.obj_tol * max(1.0, abs(obj))):
            converged = True
            break
        last_obj = obj
        sigma = max(sigma * cfg.sigma_shrink, cfg.sigma_min)
    P, t = _unpack(theta, d, fixed_t, t_fixed)
    return P, np.array(t, dtype=float), iterations, converged, trace


def _abs_sym(P):
    """``|P|`` and the orthogonal sign matrix ``S`` with ``S P = |P|``."""
    values, V = sym_eigen(P)
    signs = np.where(values < 0, -1.0, 1.0)
    return (V * np.abs(values)) @ V.T, (V * signs) @ V.T


def _clip_psd(P, floor_abs):
    values, V = sym_eigen(P)
    return (V * np.maximum(values, floor_abs)) @ V.T


def _probe_gate(f, p, prop, cfg):
    if cfg.probe_trials <= 0:
        return
    dom = "positive" if p < 0 else "nonnegative"
    try:
        rep = convexity_probe(f, p, prop, dom, cfg.probe_trials, cfg.seed)
    except DomainError:
        return
    if rep.violations:
        warnings.warn(f"{f.name} o w^{p} is not {prop} on the midpoint probe "
                      f"({rep.violations}/{rep.trials} violations); optimum may not be unique",
                      RuntimeWarning, stacklevel=3)


# -------------------------------------------------------------- enclosing

def _affine_rank(X, rtol=1e-10):
    Y = X - X.mean(axis=0)
    s = np.linalg.svd(Y, compute_uv=False)
    return int(np.sum(s > rtol * max(s[0], 1e-300))) if len(s) else 0


def _enclosing_start(X):
    c = 0.5 * (X.min(axis=0) + X.max(axis=0))
    r = 1.1 * float(np.max(np.linalg.norm(X - c, axis=1)))
    r = r if r > 0 else 1.0
    d = X.shape[1]
    return np.eye(d) / r, -c / r


def _finish_enclosing(X, f, P, t, iterations, converged, trace, message=""):
    P, S = _abs_sym(P)
    t = S @ t
    values = sym_eigen(P)[0]
    P = _clip_psd(P, max(1e-10 * values[-1], 1e-300))
    scale = float(np.max(np.linalg.norm(X @ P + t, axis=1)))
    if scale > 1.0:
        P, t = P / scale, t / scale
    slack = 1.0 - float(np.max(np.linalg.norm(X @ P + t, axis=1)))
    E = AffineMap(P, t, "preimage")
    try:
        Q = affine_to_quadric(E)
    except SingularRepresentation:
        Q = None
    obj = f(np.sort(w_pow(-1.0, sym_eigen(P)[0])))
    return SolveResult(E, Q, obj, slack, iterations, converged, trace, message=message)


def solve_min_enclosing(points, f, cfg=None, start=None, check_convexity=True):
    """Minimal enclosing ellipsoid of a point set with respect to ``f``.

    The ellipsoid is ``{x : |P x + t| <= 1}``; the objective is
    ``f o w^-1 o e(P)``. ``start`` optionally gives an initial
    pre-image :class:`AffineMap`.
    """
    cfg = cfg or SolverConfig()
    f = as_size_function(f)
    X = np.atleast_2d(np.asarray(points, dtype=float))
    d = X.shape[1]
    if check_convexity:
        _probe_gate(f, -1.0, "convex", cfg)
    rank = _affine_rank(X)
    if rank < d:
        P0, t0 = _enclosing_start(X)
        short = replace(cfg, outer_rounds=3, max_iter=50)
        with np.errstate(all="ignore"):
            P, t, it, _, trace = _run_penalty(_Enclosing(X, f), P0, t0, short)
        res = _finish_enclosing(X, f, P, t, it, False, trace,
                                f"points span an affine subspace of dimension {rank} < {d}; "
                                "the minimizing family shrinks toward a flat ellipsoid")
        res.rank = rank
        return res
    if start is None:
        P0, t0 = _enclosing_start(X)
    else:
        P0, t0 = np.asarray(start.P), np.asarray(start.t)
    P, t, it, conv, trace = _run_penalty(_Enclosing(X, f), P0, t0, cfg)
    res = _finish_enclosing(X, f, P, t, it, conv, trace)
    res.rank = rank
    return res


# -------------------------------------------------------------- inscribed

def preflight_polytope(F):
    """Check that ``F`` is bounded with nonempty interior.

    Returns the Chebyshev center and radius; raises :class:`PreflightError`
    with a recession direction (unbounded) or the best center (no interior).
    """
    A, b = np.asarray(F.A), np.asarray(F.b)
    d = F.dim
    for i in range(d):
        for sgn in (1.0, -1.0):
            c = np.zeros(d)
            c[i] = -sgn
            res = linprog(c, A_ub=A, b_ub=np.zeros(len(b)), bounds=[(-1, 1)] * d, method="highs")
            if res.status == 0 and -res.fun > 1e-9:
                raise PreflightError("polytope is unbounded", certificate=res.x)
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    A_ub = np.hstack([A, np.ones((len(b), 1))])
    res = linprog(cost, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * d + [(None, None)],
                  method="highs")
    if res.status != 0:
        raise PreflightError(f"Chebyshev LP failed: {res.message}")
    center, radius = res.x[:d], float(res.x[-1])
    if radius <= 1e-12:
        raise PreflightError("polytope has empty interior", certificate=center)
    return center, radius


def _finish_inscribed(F, f, P, t, iterations, converged, trace, p=1.0, message=""):
    P, _ = _abs_sym(P)
    values = sym_eigen(P)[0]
    P = _clip_psd(P, 1e-12 * max(values[-1], 1e-300))
    A = np.asarray(F.A)
    room = F.b - A @ t
    if np.any(room <= 0):
        raise PreflightError("solver center left the polytope", certificate=t)
    need = np.linalg.norm(A @ P, axis=1)
    ratio = np.min(np.where(need > 0, room / np.maximum(need, 1e-300), np.inf))
    if ratio < 1.0:
        P = P * ratio
    slack = float(np.min(room - np.linalg.norm(A @ P, axis=1)))
    E = AffineMap(P, t, "image")
    try:
        Q = affine_to_quadric(E)
    except SingularRepresentation:
        Q = None
    obj = f(np.sort(w_pow(1.0, sym_eigen(P)[0])))
    return SolveResult(E, Q, obj, slack, iterations, converged, trace, message=message)


def solve_max_inscribed(F, f, cfg=None, fixed_center=None, start=None, check_convexity=True):
    """Maximal inscribed ellipsoid ``{P y + t}`` of an H-polytope with respect to ``f``."""
    cfg = cfg or SolverConfig()
    f = as_size_function(f)
    center, radius = preflight_polytope(F)
    if check_convexity:
        _probe_gate(f, 1.0, "concave", cfg)
    d = F.dim
    if fixed_center is not None:
        fixed_center = np.asarray(fixed_center, dtype=float)
        room = F.b - np.asarray(F.A) @ fixed_center
        if np.any(room <= 0):
            j = int(np.argmin(room))
            raise PreflightError(f"fixed center violates row {j}", certificate=j)
        t0 = fixed_center
        r0 = float(np.min(room))
    else:
        t0, r0 = center, radius
    if start is None:
        P0 = 0.5 * r0 * np.eye(d)
    else:
        P0 = np.asarray(start.P)
        if fixed_center is None:
            t0 = np.asarray(start.t)
    P, t, it, conv, trace = _run_penalty(_Inscribed(F, f), P0, t0, cfg,
                                         fixed_t=fixed_center is not None)
    return _finish_inscribed(F, f, P, t, it, conv, trace)


def solve_max_inscribed_fixed_center_dual(F, center, f, cfg=None, check_convexity=True):
    """Maximal inscribed ellipsoid with prescribed center over the centered dual block.

    Maximizes ``f o w^{1/2} o e(Q)`` subject to
    ``a_j^T Q a_j <= (b_j - a_j . m)^2`` and ``Q >= 0``; the ellipsoid is
    ``{x : (x - m)^T Q^{-1} (x - m) <= 1}``.
    """
    cfg = cfg or SolverConfig()
    f = as_size_function(f)
    preflight_polytope(F)
    m = np.asarray(center, dtype=float)
    room = F.b - np.asarray(F.A) @ m
    if np.any(room <= 0):
        j = int(np.argmin(room))
        raise PreflightError(f"center violates row {j}", certificate=j)
    if check_convexity:
        _probe_gate(f, 0.5, "concave", cfg)
    d = F.dim
    Q0 = (0.5 * float(np.min(room))) ** 2 * np.eye(d)
    problem = _DualFixedCenter(F, m, f)
    Q, _, it, conv, trace = _run_penalty(problem, Q0, m, cfg, fixed_t=True)
    values, V = sym_eigen(Q)
    Q = (V * np.maximum(values, 1e-10 * max(values[-1], 1e-300))) @ V.T
    quad = np.einsum("ij,jk,ik->i", problem.A, Q, problem.A)
    if quad.max() > 1.0:
        Q = Q / quad.max()
    values, V = sym_eigen(Q)
    P = (V * np.sqrt(np.maximum(values, 0.0))) @ V.T
    res = _finish_inscribed(F, f, P, m, it, conv, trace)
    res.message = "dual"
    return res


def dual_feasibility(F, center, Q):
    """Worst value of ``a_j^T Q a_j - (b_j - a_j . m)^2`` (``<= 0`` when feasible)."""
    A = np.asarray(F.A)
    rhs = (F.b - A @ np.asarray(center)) ** 2
    return float(np.max(np.einsum("ij,jk,ik->i", A, np.asarray(Q), A) - rhs))


# -------------------------------------------------------------- Khachiyan

def khachiyan_mvee(points, eps=1e-6, max_iter=100_000):
    """Minimum-volume enclosing ellipsoid by Khachiyan's method with away steps.

    Returns a :class:`SolveResult` whose ``affine`` is the pre-image map of
    the ellipsoid. Rank-deficient clouds are solved inside their affine hull
    and reported with ``rank < d`` and a flat (image-mode) ellipsoid.
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = X.shape
    mean = X.mean(axis=0)
    U, s, Vt = np.linalg.svd(X - mean, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * max(s[0], 1e-300))) if len(s) else 0
    if rank == 0:
        E = AffineMap(np.zeros((d, d)), mean, "image")
        return SolveResult(E, None, 0.0, 0.0, 0, False, message="all points coincide", rank=0)
    basis = Vt[:rank].T
    Y = (X - mean) @ basis
    c, A, iters, conv = _khachiyan_core(Y, eps, max_iter)
    if rank == d:
        A_full = basis @ A @ basis.T
        center = mean + basis @ c
        Q = to_quadric_safe(center, A_full)
        P = _sqrt_spd(A_full)
        E = AffineMap(P, -P @ center, "preimage")
        vol = _volume_from_shape(A_full)
        slack = 1.0 - float(np.max(np.linalg.norm(X @ P + E.t, axis=1)))
        return SolveResult(E, Q, vol, slack, iters, conv, rank=rank)
    values, W = np.linalg.eigh(A)
    Pk = (W / np.sqrt(values)) @ W.T
    P_full = basis @ Pk @ basis.T
    center = mean + basis @ c
    E = AffineMap(P_full, center, "image")
    return SolveResult(E, None, 0.0, 0.0, iters, conv,
                       message=f"points span dimension {rank} < {d}", rank=rank)


def _khachiyan_core(Y, eps, max_iter):
    n, d = Y.shape
    Q = np.vstack([Y.T, np.ones(n)])
    u = np.full(n, 1.0 / n)
    conv = False
    it = 0
    for it in range(1, max_iter + 1):
        Xm = (Q * u) @ Q.T
        M = np.einsum("ij,ji->i", Q.T, np.linalg.solve(Xm, Q))
        j = int(np.argmax(M))
        support = u > 0
        k = int(np.flatnonzero(support)[np.argmin(M[support])])
        up = M[j] / (d + 1) - 1.0
        down = 1.0 - M[k] / (d + 1)
        if up <= eps and down <= eps:
            conv = True
            break
        if up >= down:
            step = (M[j] - d - 1) / ((d + 1) * (M[j] - 1))
            u *= 1.0 - step
            u[j] += step
        else:
            # away step: negative weight on the least-needed support point
            step = (M[k] - d - 1) / ((d + 1) * (M[k] - 1))
            step = max(step, -u[k] / (1.0 - u[k]))
            u *= 1.0 - step
            u[k] += step
            u[u < 0] = 0.0
    c = Y.T @ u
    S = (Y.T * u) @ Y - np.outer(c, c)
    A = np.linalg.inv(S) / d
    vals = np.einsum("ij,jk,ik->i", Y - c, A, Y - c)
    A = A / max(float(vals.max()), 1e-300) if vals.max() > 1.0 else A
    return c, 0.5 * (A + A.T), it, conv


def _sqrt_spd(A):
    values, V = sym_eigen(A)
    return (V * np.sqrt(np.maximum(values, 0.0))) @ V.T


def _volume_from_shape(A):
    values = sym_eigen(A)[0]
    return unit_ball_volume(len(values)) * float(np.prod(values ** -0.5))


def to_quadric_safe(center, A):
    return QuadricEllipsoid(center, as_sym(A))


# -------------------------------------------------------------- multistart

@dataclass
class UniquenessReport:
    """Multistart outcome.

    ``clusters`` counts the clusters whose objective is within
    ``candidate_gap`` (relative) of the best one, i.e. the global-optimum
    candidates. Clusters of strictly worse local optima are counted in
    ``local_clusters``; ``flagged`` is set when any local optimum was found.
    """

    clusters: int
    representatives: list
    objectives: list
    max_intra: float
    min_inter: float
    objective_spread: float
    local_clusters: int = 0
    flagged: bool = False
    results: list = field(default_factory=list, repr=False)
    labels: list = field(default_factory=list)

    def to_dict(self):
        return {
            "clusters": self.clusters,
            "representatives": [r.to_dict() for r in self.representatives],
            "objectives": self.objectives,
            "max_intra_distance": self.max_intra,
            "min_inter_distance": self.min_inter,
            "objective_spread": self.objective_spread,
            "local_clusters": self.local_clusters,
            "flagged": self.flagged,
            "labels": self.labels,
        }


CLUSTER_TOL = 1e-4
CANDIDATE_GAP = 1e-6


def _cluster_key(res, use_quadric):
    if use_quadric:
        return np.concatenate([np.asarray(res.quadric.shape).ravel(), res.quadric.center])
    E = res.affine
    if E.mode == "image":
        return np.concatenate([(E.P @ E.P).ravel(), E.t])
    Qd = to_quadric(E)
    return np.concatenate([np.asarray(Qd.shape).ravel(), Qd.center])


def cluster_results(results, tol=CLUSTER_TOL):
    """Single-linkage clustering of solutions by Frobenius distance on ``(A, m)``.

    Falls back to ``(P^2, t)`` of the image map when some solution is flat.
    Returns ``(labels, distance_matrix)``.
    """
    use_quadric = all(r.quadric is not None for r in results)
    keys = [_cluster_key(r, use_quadric) for r in results]
    n = len(keys)
    parent = list(range(n))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    D = np.array([[np.linalg.norm(keys[i] - keys[j]) for j in range(n)] for i in range(n)])
    for i in range(n):
        for j in range(i + 1, n):
            if D[i, j] <= tol:
                parent[root(i)] = root(j)
    roots = [root(i) for i in range(n)]
    uniq = sorted(set(roots), key=roots.index)
    return [uniq.index(r) for r in roots], D


def _perturbed_start(rng, P, spread=0.4):
    d = P.shape[0]
    R = haar_orthogonal(rng, d)
    S = (R * np.exp(spread * rng.standard_normal(d))) @ R.T
    return S @ P @ S


def _seeded_starts(problem, n, rng, fixed_center):
    if isinstance(problem, HPolytope):
        center, radius = preflight_polytope(problem)
        base_P = 0.5 * radius * np.eye(problem.dim)
        base_t = center if fixed_center is None else np.asarray(fixed_center, dtype=float)
        mode = "image"
    else:
        base_P, base_t = _enclosing_start(problem)
        mode = "preimage"
    out = []
    for _ in range(n):
        P = _abs_sym(_perturbed_start(rng, base_P))[0]
        t = base_t
        if mode == "image" and fixed_center is None:
            t = base_t + 0.3 * radius * rng.uniform(-1, 1, size=len(base_t))
            if np.any(problem.b - problem.A @ t <= 0):
                t = base_t
        out.append(AffineMap(P, t, mode))
    return out


def multistart_uniqueness(problem, f, n_starts=32, seed=0, cfg=None, starts=None,
                          fixed_center=None, tol=CLUSTER_TOL, candidate_gap=CANDIDATE_GAP):
    """Solve from many seeded starts and cluster the optima.

    ``problem`` is an ``(n, d)`` point array (enclosing) or an
    :class:`HPolytope` (inscribed). Explicit ``starts`` are used first and
    topped up with seeded perturbations (random rotations and log-normal
    axis scalings) of the default start.
    """
    if n_starts < 8:
        raise ValueError("n_starts must be at least 8")
    cfg = cfg or SolverConfig()
    f = as_size_function(f)
    inscribed = isinstance(problem, HPolytope)
    if not inscribed:
        problem = np.atleast_2d(np.asarray(problem, dtype=float))
    start_list = list(starts or [])[:n_starts]
    rng = np.random.default_rng(seed)
    start_list += _seeded_starts(problem, n_starts - len(start_list), rng, fixed_center)
    results = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for st in start_list:
            if inscribed:
                r = solve_max_inscribed(problem, f, cfg, fixed_center=fixed_center, start=st,
                                        check_convexity=False)
            else:
                r = solve_min_enclosing(problem, f, cfg, start=st, check_convexity=False)
            results.append(r)
    labels, D = cluster_results(results, tol)
    k = max(labels) + 1
    members = [[i for i, l in enumerate(labels) if l == c] for c in range(k)]
    pick = max if inscribed else min
    reps = [results[pick(idx, key=lambda i: results[i].objective)] for idx in members]
    objs = [r.objective for r in reps]
    best = pick(objs)
    scale = max(1.0, abs(best))
    cand = [c for c in range(k) if abs(objs[c] - best) <= candidate_gap * scale]
    cand_set = set(cand)
    intra = max((D[i, j] for idx in members for i in idx for j in idx), default=0.0)
    inter = min((D[i, j] for a in cand for b in cand if a < b
                 for i in members[a] for j in members[b]), default=math.inf)
    cand_objs = [objs[c] for c in cand]
    spread = (max(cand_objs) - min(cand_objs)) / scale
    return UniquenessReport(
        clusters=len(cand),
        representatives=[reps[c] for c in cand],
        objectives=cand_objs,
        max_intra=float(intra),
        min_inter=float(inter),
        objective_spread=float(spread),
        local_clusters=k - len(cand),
        flagged=k > len(cand),
        results=results,
        labels=[cand.index(l) if l in cand_set else -1 for l in labels],
    )
