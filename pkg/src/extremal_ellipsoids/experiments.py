"""Scans and seeded verification batches behind the command-line tools.

Everything here is deterministic given its arguments: random instances are
drawn from per-item child seeds of one ``SeedSequence``, parallel batches
merge in submission order, and summaries carry no timing information.
"""

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy.optimize import minimize_scalar

from .between import (
    DEFAULT_GRID,
    between_preimage,
    check_homogeneous_intersection,
    check_lemma1,
    check_lemma2,
    check_lemma4,
)
from .ellipsoids import (
    AffineMap,
    HPolytope,
    QuadricEllipsoid,
    affine_to_quadric,
    dual_homogeneous,
    dual_to_quadric,
    quadric_to_affine,
    quadric_to_dual,
    quadric_to_preimage,
    random_quadric,
    semi_axes,
    to_dict,
)
from .linalg import haar_orthogonal, inv_spd
from .sizes import arc_length, builtin, eval_on_matrix

SQRT3 = math.sqrt(3.0)
# eleven-point grid used by the batch checks of the image and pre-image lemmas
BATCH_GRID = tuple(i / 10 for i in range(11))


def fmt(x):
    """Fixed float formatting for CSV output (17 significant digits)."""
    return format(float(x), ".17g")


def to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def parallel_map(fn, items, jobs=1):
    """``list(map(fn, items))``, optionally over processes; order is preserved."""
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def child_seeds(seed, n):
    return np.random.SeedSequence(seed).spawn(n)


# ------------------------------------------------------------- square pencil

SQUARE_POINTS = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
SQUARE_ALPHA_CLOSED = 32 / 257 * 2 ** (1 / 3) - 4 / 257 * 2 ** (2 / 3) + 1 / 257
SQUARE_F_CIRCLE = 17 * math.sqrt(2.0)
SQUARE_F_MIN_TARGET = 19.9248


def square_pencil_ellipse(alpha):
    """Ellipse ``alpha x^2 + (1 - alpha) y^2 = 1`` through the four corners."""
    return QuadricEllipsoid(np.zeros(2), np.diag([alpha, 1.0 - alpha]))


def square_pencil_value(alpha):
    return builtin("square_counterexample")(semi_axes(square_pencil_ellipse(alpha)))


def _square_row(alpha):
    ax = semi_axes(square_pencil_ellipse(alpha))
    return [alpha, 1.0 / math.sqrt(alpha), 1.0 / math.sqrt(1.0 - alpha),
            builtin("square_counterexample")(ax)]


def _golden_refine(fn, grid, i):
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(fn, bracket=(lo, grid[i], hi), method="golden", tol=1e-12)
    return float(res.x), float(res.fun)


def repro_square(n=2001, jobs=1):
    """Scan the pencil of conics through ``(+-1, +-1)`` and locate its two minima.

    Returns ``(csv_text, summary)``.
    """
    grid = np.linspace(0.0, 1.0, n + 2)[1:-1]
    rows = parallel_map(_square_row, grid, jobs)
    values = np.array([r[3] for r in rows])
    half = len(grid) // 2
    minima = []
    for lo, hi in ((0, half), (half, len(grid))):
        i = lo + int(np.argmin(values[lo:hi]))
        alpha, fval = _golden_refine(square_pencil_value, grid, i)
        minima.append({
            "alpha": alpha,
            "f": fval,
            "coefficients": [alpha, 1.0 - alpha],
            "semi_axes": semi_axes(square_pencil_ellipse(alpha)).tolist(),
            "grid_alpha": float(grid[i]),
            "grid_f": float(values[i]),
        })
    closed = [SQUARE_ALPHA_CLOSED, 1.0 - SQUARE_ALPHA_CLOSED]
    circle = square_pencil_value(0.5)
    sym = max(abs(square_pencil_value(a) - square_pencil_value(1.0 - a)) for a in grid)
    summary = {
        "experiment": "square",
        "grid_points": int(len(grid)),
        "circle": {"alpha": 0.5, "f": circle, "target": SQUARE_F_CIRCLE,
                   "abs_diff": abs(circle - SQUARE_F_CIRCLE)},
        "minimizers": minima,
        "alpha_closed_form": closed,
        "alpha_abs_diff": [abs(m["alpha"] - c) for m, c in zip(minima, closed)],
        "f_min_target": SQUARE_F_MIN_TARGET,
        "f_min_abs_diff": [abs(m["f"] - SQUARE_F_MIN_TARGET) for m in minima],
        "symmetry_max_abs_diff": float(sym),
        "minimizers_distinct": abs(minima[0]["alpha"] - minima[1]["alpha"]) > 1e-3,
    }
    return to_csv(["alpha", "semi_axis_x", "semi_axis_y", "f"], rows), summary


# ---------------------------------------------------------- triangle family

TRIANGLE_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, SQRT3 / 2]])
K_INCIRCLE = SQRT3 / 6
K_MAX = SQRT3 / 4
TRIANGLE_F_INCIRCLE = math.pi / SQRT3
TRIANGLE_F_LIMIT = 2.0
MODULI = ("eccentric", "paper")


def triangle_polytope():
    return HPolytope.from_vertices_2d(TRIANGLE_VERTICES)


def triangle_family(k):
    """Symmetric inscribed ellipse with center ``(1/2, k)``; returns ``(a, b)``.

    ``b = k`` is the vertical semi-axis and ``a^2 = 1/4 - k / sqrt(3)`` makes
    the ellipse tangent to the two slanted sides.
    """
    if not 0.0 < k <= K_MAX:
        raise ValueError(f"k must lie in (0, sqrt(3)/4], got {k}")
    return math.sqrt(max(0.25 - k / SQRT3, 0.0)), float(k)


def triangle_family_map(k):
    a, b = triangle_family(k)
    return AffineMap(np.diag([a, b]), [0.5, k], "image")


def tangency_residual(k):
    """Largest ``|h_E(a_j) - (b_j - a_j . m)|`` over the triangle's sides."""
    E = triangle_family_map(k)
    F = triangle_polytope()
    A = np.asarray(F.A)
    h = np.linalg.norm(A @ E.P, axis=1)
    return float(np.max(np.abs(h - (F.b - A @ E.t))))


def triangle_value(k, modulus="eccentric"):
    a, b = triangle_family(k)
    return arc_length(a, b, modulus)


def _triangle_row(k):
    a, b = triangle_family(k)
    return [k, a, b, arc_length(a, b, "eccentric"), arc_length(a, b, "paper")]


def _one_sided_slopes(fn, x0, h):
    f0 = fn(x0)
    return (f0 - fn(x0 - h)) / h, (fn(x0 + h) - f0) / h


def repro_triangle(n=2001, jobs=1, kink_step=1e-6):
    """Scan the symmetric inscribed family of the unit equilateral triangle.

    Returns ``(csv_text, summary)`` with the arc length under both modulus
    conventions.
    """
    grid = np.linspace(0.0, K_MAX, n + 1)[1:]
    rows = parallel_map(_triangle_row, grid, jobs)
    limit_ks = [10.0**-j for j in range(1, 13)]
    per_mod = {}
    for col, mod in ((3, "eccentric"), (4, "paper")):
        vals = np.array([r[col] for r in rows])
        imax = int(np.argmax(vals))
        inc = triangle_value(K_INCIRCLE, mod)
        seq = [triangle_value(k, mod) for k in limit_ks]
        left, right = _one_sided_slopes(lambda k: triangle_value(k, mod), K_INCIRCLE, kink_step)
        per_mod[mod] = {
            "incircle": {"k": K_INCIRCLE, "f": inc, "target": TRIANGLE_F_INCIRCLE,
                         "abs_diff": abs(inc - TRIANGLE_F_INCIRCLE)},
            "limit": {"k": limit_ks, "f": seq, "target": TRIANGLE_F_LIMIT,
                      "abs_diff": abs(seq[-1] - TRIANGLE_F_LIMIT)},
            "scan_max": {"k": float(grid[imax]), "f": float(vals[imax])},
            "scan_max_exceeds_incircle": bool(vals[imax] > inc),
            "incircle_slopes": {"left": left, "right": right, "jump": right - left},
        }
    residual = max(tangency_residual(k) for k in grid[:-1])
    summary = {
        "experiment": "triangle",
        "grid_points": int(len(grid)),
        "family": "center (1/2, k), b = k, a^2 = 1/4 - k/sqrt(3)",
        "tangency_max_residual": residual,
        "moduli": per_mod,
    }
    header = ["k", "semi_axis_a", "semi_axis_b", "f_eccentric", "f_paper"]
    return to_csv(header, rows), summary


def _rotate_about(E, angle, c):
    R = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    return AffineMap(R @ E.P @ R.T, R @ (E.t - c) + c, "image")


def triangle_starts(k_side=0.05):
    """Scan-assisted starts: a near-flat family member at each side plus the incircle."""
    centroid = TRIANGLE_VERTICES.mean(axis=0)
    flat = triangle_family_map(k_side)
    starts = [flat] + [_rotate_about(flat, s * 2 * math.pi / 3, centroid) for s in (1, -1)]
    starts.append(triangle_family_map(K_INCIRCLE))
    return starts


# ------------------------------------------------------ verification batches

def random_pair(rng, d, overlap=True):
    """Two seeded regular ellipsoids; ``overlap`` keeps their centers close."""
    scale = 0.3 if overlap else 2.5
    E0 = random_quadric(rng, d, (-0.7, 0.7), center_scale=scale)
    E1 = random_quadric(rng, d, (-0.7, 0.7), center_scale=scale)
    return E0, E1


def _lemma1_item(args):
    ss, d = args
    rng = np.random.default_rng(ss)
    E0, E1 = random_pair(rng, d, overlap=bool(rng.integers(2)))
    rep = check_lemma1(quadric_to_affine(E0), quadric_to_affine(E1), BATCH_GRID,
                       n_dirs=512 * (d - 1), seed=int(rng.integers(2**31)))
    return rep, (E0, E1)


def _lemma2_item(args):
    ss, d = args
    rng = np.random.default_rng(ss)
    E0, E1 = random_pair(rng, d, overlap=True)
    rep = check_lemma2(quadric_to_preimage(E0), quadric_to_preimage(E1), BATCH_GRID,
                       seed=int(rng.integers(2**31)))
    return rep, (E0, E1)


def _homogeneous_item(args):
    ss, d = args
    rng = np.random.default_rng(ss)
    E0, E1 = random_pair(rng, d, overlap=True)
    rep = check_homogeneous_intersection(E0, E1, BATCH_GRID, seed=int(rng.integers(2**31)))
    return rep, (E0, E1)


def _lemma4_item(args):
    ss, d = args
    rng = np.random.default_rng(ss)
    E0, E1 = random_pair(rng, d, overlap=bool(rng.integers(2)))
    rep = check_lemma4(dual_homogeneous(E0), dual_homogeneous(E1), DEFAULT_GRID,
                       seed=int(rng.integers(2**31)))
    return rep, (E0, E1)


_LEMMA_ITEMS = {"1": _lemma1_item, "2": _lemma2_item, "4": _lemma4_item,
                "homogeneous": _homogeneous_item}


def verify_lemma(lemma, d=2, trials=1000, seed=0, jobs=1):
    """Run one containment checker over ``trials`` seeded pairs.

    Returns a JSON-ready summary; ``violations`` counts offending
    ``(pair, lam)`` cells and ``witness`` holds the first offending pair.
    """
    lemma = str(lemma)
    if lemma not in _LEMMA_ITEMS:
        raise ValueError(f"unknown lemma {lemma!r}")
    if d not in (2, 3):
        raise ValueError("d must be 2 or 3")
    if lemma == "4" and d != 2:
        raise ValueError("the dual containment check is two-dimensional")
    items = [(ss, d) for ss in child_seeds(seed, trials)]
    out = parallel_map(_LEMMA_ITEMS[lemma], items, jobs)
    violations = 0
    vacuous = 0
    worst = math.inf
    witness = None
    lam_low, lam_high = [], []
    endpoints_only = 0
    for i, (rep, (E0, E1)) in enumerate(out):
        violations += rep.violations
        vacuous += rep.vacuous
        if rep.worst_margin is not None:
            worst = min(worst, rep.worst_margin)
        if rep.lam_star_low is not None:
            lam_low.append(rep.lam_star_low)
        if rep.lam_star_high is not None:
            lam_high.append(rep.lam_star_high)
        if rep.lam_star_low == 0.0 and rep.lam_star_high == 1.0:
            endpoints_only += 1
        if rep.violations and witness is None:
            witness = {"pair": i, "seed": seed, "E0": to_dict(E0), "E1": to_dict(E1),
                       "report": rep.to_dict()}
    summary = {
        "lemma": lemma,
        "d": d,
        "trials": trials,
        "seed": seed,
        "lambdas": list(BATCH_GRID if lemma != "4" else DEFAULT_GRID),
        "tol": out[0][0].tol if out else None,
        "violations": violations,
        "vacuous_pairs": vacuous,
        "worst_margin": None if worst == math.inf else worst,
        "witness": witness,
    }
    if lemma == "4":
        summary["lam_star_low_min"] = min(lam_low) if lam_low else None
        summary["lam_star_high_max"] = max(lam_high) if lam_high else None
        summary["pairs_endpoints_only"] = endpoints_only
    return summary


def _enclosing_preimage(rng, X):
    """Random pre-image map of an ellipsoid that touches the hull of ``X`` from outside."""
    d = X.shape[1]
    R = haar_orthogonal(rng, d)
    P = (R * np.exp(rng.uniform(-0.5, 0.5, size=d))) @ R.T
    c = X.mean(axis=0) + 0.1 * rng.standard_normal(d)
    t = -P @ c
    scale = float(np.max(np.linalg.norm(X @ P + t, axis=1)))
    return P / scale, t / scale


def strict_betweenness(trials=200, seed=0, d=2, n_points=20, margin=1e-12):
    """Midpoints of distinct equal-volume enclosing ellipsoids are strictly smaller.

    Both endpoints enclose a common seeded point set; the volume of the
    pre-image midpoint must fall below the endpoint volume by ``margin``.
    """
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_points, d))
    f = builtin("volume")
    failures = 0
    worst_gap = math.inf
    worst_cover = -math.inf
    for ss in child_seeds(seed, trials):
        r = np.random.default_rng(ss)
        P0, t0 = _enclosing_preimage(r, X)
        P1, t1 = _enclosing_preimage(r, X)
        v0 = eval_on_matrix(f, -1.0, P0)
        v1 = eval_on_matrix(f, -1.0, P1)
        # shrinking P grows the ellipsoid, so equalize up to the larger volume
        if v0 < v1:
            s = (v0 / v1) ** (1.0 / d)
            P0, t0 = P0 * s, t0 * s
        else:
            s = (v1 / v0) ** (1.0 / d)
            P1, t1 = P1 * s, t1 * s
        E0, E1 = AffineMap(P0, t0, "preimage"), AffineMap(P1, t1, "preimage")
        Em = between_preimage(E0, E1, 0.5)
        fe = eval_on_matrix(f, -1.0, E0.P)
        fm = eval_on_matrix(f, -1.0, Em.P)
        gap = fe - fm
        worst_gap = min(worst_gap, gap)
        cover = float(np.max(np.linalg.norm(X @ Em.P.T + Em.t, axis=1))) - 1.0
        worst_cover = max(worst_cover, cover)
        failures += not (fm < fe - margin)
    return {
        "trials": trials,
        "seed": seed,
        "d": d,
        "margin": margin,
        "failures": failures,
        "min_volume_gap": worst_gap,
        "midpoint_max_constraint": worst_cover,
    }


def round_trips(trials=1000, seed=0, dims=(2, 3, 4), tol=1e-8):
    """Quadric -> image / pre-image / dual -> quadric and the ``Q = A^{-1}`` identity."""
    worst = {"image": 0.0, "preimage": 0.0, "dual": 0.0, "dual_Q": 0.0, "semi_axes": 0.0}
    for i, ss in enumerate(child_seeds(seed, trials)):
        rng = np.random.default_rng(ss)
        E = random_quadric(rng, dims[i % len(dims)], (-1.0, 1.0))
        A = E.shape
        nA = np.linalg.norm(A)

        def err(Q):
            return max(np.linalg.norm(Q.shape - A) / nA,
                       np.linalg.norm(Q.center - E.center) / max(1.0, np.linalg.norm(E.center)))

        worst["image"] = max(worst["image"], err(affine_to_quadric(quadric_to_affine(E))))
        worst["preimage"] = max(worst["preimage"], err(affine_to_quadric(quadric_to_preimage(E))))
        shift = E.center + 0.1 * (to_unit(rng.standard_normal(E.dim)) / math.sqrt(np.max(np.linalg.eigvalsh(A))))
        D = quadric_to_dual(E, shift=shift)
        worst["dual"] = max(worst["dual"], err(dual_to_quadric(D)))
        Ainv = inv_spd(A)
        worst["dual_Q"] = max(worst["dual_Q"], float(np.linalg.norm(D.Q - Ainv) / np.linalg.norm(Ainv)))
        ax = semi_axes(E)
        for rep in (quadric_to_affine(E), quadric_to_preimage(E), D):
            worst["semi_axes"] = max(worst["semi_axes"],
                                     float(np.max(np.abs(semi_axes(rep) - ax) / ax)))
    return {"trials": trials, "seed": seed, "tol": tol, "worst_relative_error": worst,
            "failing_checks": sorted(k for k, v in worst.items() if v > tol)}


def to_unit(v):
    return v / np.linalg.norm(v)
