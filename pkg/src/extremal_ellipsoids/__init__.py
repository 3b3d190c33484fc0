"""Extremal ellipsoids with respect to general size functions.

Ellipsoid representations and conversions, size functions and convexity
probes, in-between ellipsoids with containment checks, and penalty-based
solvers for enclosing and inscribed extremal ellipsoids.
"""

from .between import (
    InBetweenFamily,
    LemmaReport,
    between_dual,
    between_homogeneous,
    between_image,
    between_preimage,
    check_homogeneous_intersection,
    check_lemma1,
    check_lemma2,
    check_lemma4,
)
from .ellipsoids import (
    AffineMap,
    DualEllipsoid,
    HomogeneousQuadric,
    HPolytope,
    QuadricEllipsoid,
    contains_point,
    dual_homogeneous,
    ellipsoid_in_convex_hull,
    ellipsoid_in_polytope,
    from_dict,
    quadric_to_affine,
    quadric_to_dual,
    quadric_to_homogeneous,
    quadric_to_preimage,
    semi_axes,
    support_value,
    to_dict,
    to_image,
    to_quadric,
)
from .errors import (
    ConvergenceError,
    DomainError,
    EllipsoidError,
    OriginNotInterior,
    PreflightError,
    SingularRepresentation,
)
from .linalg import e_vec, sym_eigen
from .sizes import (
    ProbeReport,
    SizeFunction,
    arc_length,
    builtin,
    convexity_probe,
    davis_agreement,
    elliptic_E,
    eval_on_matrix,
    eval_vector,
    w_pow,
)
from .solvers import (
    SolverConfig,
    SolveResult,
    UniquenessReport,
    khachiyan_mvee,
    multistart_uniqueness,
    preflight_polytope,
    solve_max_inscribed,
    solve_max_inscribed_fixed_center_dual,
    solve_min_enclosing,
)

__version__ = "0.1.0"
