"""Blending two ellipses through different parametrizations.

Image maps, pre-image maps and dual matrices give three different paths
between the same pair of ellipses. The first two always stay inside the
respective hull or intersection; the dual path may stop being an ellipse.
"""

import numpy as np

from extremal_ellipsoids.between import (
    between_dual,
    between_image,
    between_preimage,
    check_lemma1,
    check_lemma2,
    check_lemma4,
)
from extremal_ellipsoids.ellipsoids import (
    QuadricEllipsoid,
    dual_homogeneous,
    quadric_to_affine,
    quadric_to_preimage,
    semi_axes,
)

E0 = QuadricEllipsoid([-0.3, 0.0], [[4.0, 0.0], [0.0, 0.5]])
E1 = QuadricEllipsoid([0.3, 0.2], [[0.5, 0.0], [0.0, 4.0]])

print("lam   image axes          pre-image axes")
for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
    a = semi_axes(between_image(quadric_to_affine(E0), quadric_to_affine(E1), lam))
    b = semi_axes(between_preimage(quadric_to_preimage(E0), quadric_to_preimage(E1), lam))
    print(f"{lam:.2f}  {np.round(a, 4)}  {np.round(b, 4)}")

print("\nhull containment (image):", check_lemma1(quadric_to_affine(E0), quadric_to_affine(E1)).violations,
      "violations")
print("intersection containment (pre-image):",
      check_lemma2(quadric_to_preimage(E0), quadric_to_preimage(E1)).violations, "violations")

# far apart, the dual blend leaves the ellipse class in the middle
F0 = QuadricEllipsoid([-2.0, 0.0], [[2.0, 0.0], [0.0, 2.0]])
F1 = QuadricEllipsoid([2.0, 0.0], [[2.0, 0.0], [0.0, 2.0]])
for lam in (0.0, 0.05, 0.5, 0.95, 1.0):
    _, ok = between_dual(dual_homogeneous(F0), dual_homogeneous(F1), lam)
    print(f"dual blend lam={lam:.2f}: ellipse={ok}")
rep = check_lemma4(dual_homogeneous(F0), dual_homogeneous(F1))
print(f"valid prefix from 0 up to {rep.lam_star_low}, from {rep.lam_star_high} up to 1")
