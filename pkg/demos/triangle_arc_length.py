"""Inscribed ellipses of an equilateral triangle, measured by perimeter.

The symmetric family with center (1/2, k) stays tangent to the two slanted
sides. The incircle has perimeter pi/sqrt(3), yet flattening toward the base
drives the perimeter up to 2, so the circle does not maximize arc length.
"""

import math

from extremal_ellipsoids import experiments as ex

_, summary = ex.repro_triangle()
print(f"incircle k={ex.K_INCIRCLE:.6f}, pi/sqrt(3) = {math.pi / math.sqrt(3):.9f}")
for mod in ex.MODULI:
    m = summary["moduli"][mod]
    label = {"eccentric": "eccentricity", "paper": "1 - min/max"}[mod]
    print(f"\nmodulus convention: {mod} ({label})")
    print(f"  incircle value {m['incircle']['f']:.9f}")
    for k, f in zip(m["limit"]["k"][::3], m["limit"]["f"][::3]):
        print(f"  k={k:.0e}  f={f:.9f}")
    print(f"  scan maximum {m['scan_max']['f']:.6f} at k={m['scan_max']['k']:.4f}")
    s = m["incircle_slopes"]
    print(f"  one-sided slopes at the incircle: {s['left']:.4f}, {s['right']:.4f}")
print(f"\nlargest tangency residual over the scan: {summary['tangency_max_residual']:.1e}")
