"""Non-uniqueness among enclosing ellipses of a square.

Every ellipse through the corners (+-1, +-1) is ``alpha x^2 + (1-alpha) y^2 = 1``.
With the size function ``f(a) = 16 a_min + a_max`` the circle is not the
minimizer: two mirror-image ellipses tie for the smallest value.
"""

from extremal_ellipsoids import experiments as ex
from extremal_ellipsoids.ellipsoids import semi_axes
from extremal_ellipsoids.solvers import multistart_uniqueness

_, summary = ex.repro_square()
print(f"circle  alpha=0.5      f={summary['circle']['f']:.6f}")
for m in summary["minimizers"]:
    print(f"minimum alpha={m['alpha']:.6f} f={m['f']:.6f} semi-axes={m['semi_axes']}")
print(f"closed-form alpha: {summary['alpha_closed_form'][0]:.9f}")

rep = multistart_uniqueness(ex.SQUARE_POINTS, "square_counterexample", n_starts=16, seed=0)
print(f"\nmultistart found {rep.clusters} optimal clusters")
for r in rep.representatives:
    print("  semi-axes", semi_axes(r.affine).round(6), "objective", round(r.objective, 9))

rep = multistart_uniqueness(ex.SQUARE_POINTS, "volume", n_starts=16, seed=0)
print(f"with f = volume the optimum is unique: {rep.clusters} cluster")
