"""Size functions on ordered semi-axis vectors.

A size function is continuous, symmetric and strictly increasing in each
argument. Composed with the power map ``w^p`` and the ascending spectrum it
measures an ellipsoid directly from its representation matrix:
``p = 1`` for image maps, ``p = -1`` for pre-image maps, ``p = -1/2`` for
quadric shape matrices and ``p = 1/2`` for the centered dual block.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .linalg import e_vec, haar_orthogonal


def w_pow(p, x):
    """Componentwise ``|x_i|^p``."""
    x = np.abs(np.asarray(x, dtype=float))
    if p < 0 and np.any(x == 0.0):
        raise DomainError(f"w^{p} has a pole at zero components")
    return x**p


@dataclass(frozen=True)
class SizeFunction:
    name: str
    fn: object = field(repr=False)
    dim: object = "any"
    strictly_monotone: bool = True
    symmetric: bool = True

    def __call__(self, a):
        a = np.sort(np.asarray(a, dtype=float).reshape(-1))
        if self.dim != "any" and a.shape[0] != self.dim:
            raise DomainError(f"{self.name} is defined for d = {self.dim}, got d = {a.shape[0]}")
        if np.any(a < 0) or not np.all(np.isfinite(a)):
            raise DomainError(f"{self.name} needs finite non-negative semi-axes")
        return float(self.fn(a))


def unit_ball_volume(d):
    """``kappa_d`` by the recurrence ``kappa_d = kappa_{d-2} * 2 pi / d``."""
    if d < 0:
        raise ValueError("dimension must be non-negative")
    k = [1.0, 2.0]
    for n in range(2, d + 1):
        k.append(k[n - 2] * 2.0 * math.pi / n)
    return k[d]


def elliptic_E(k):
    """Complete elliptic integral ``int_0^1 sqrt(1 - k^2 t^2) / sqrt(1 - t^2) dt``.

    Arithmetic-geometric mean with the Legendre sum
    ``E = K (1 - sum 2^{n-1} c_n^2)``.
    """
    k = float(k)
    if not 0.0 <= k <= 1.0:
        raise DomainError(f"modulus must lie in [0, 1], got {k}")
    if k == 1.0:
        return 1.0
    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    c = k
    total = 0.5 * c * c
    power = 0.5
    for _ in range(64):
        if c <= 1e-17 * a:
            break
        a_next = 0.5 * (a + b)
        c = c * c / (4.0 * a_next)
        b = math.sqrt(a * b)
        a = a_next
        power *= 2.0
        total += power * c * c
    return math.pi / (2.0 * a) * (1.0 - total)


def arc_length(a, b, modulus="eccentric"):
    """Perimeter of an ellipse with semi-axes ``a`` and ``b``.

    ``modulus="eccentric"`` uses ``4 max E(sqrt(1 - (min/max)^2))``, the
    true perimeter. ``modulus="paper"`` uses the literal argument
    ``1 - min/max``; the two coincide for circles and segments only.
    """
    a = float(a)
    b = float(b)
    if a < 0 or b < 0:
        raise DomainError("semi-axes must be non-negative")
    hi, lo = max(a, b), min(a, b)
    if hi == 0.0:
        return 0.0
    r = lo / hi
    if modulus == "eccentric":
        k = math.sqrt((1.0 - r) * (1.0 + r))
    elif modulus == "paper":
        k = 1.0 - r
    else:
        raise ValueError(f"unknown modulus convention {modulus!r}")
    return 4.0 * hi * elliptic_E(k)


def _volume(a):
    return unit_ball_volume(a.shape[0]) * float(np.prod(a))


def _square_counterexample(a):
    return a[-1] + 16.0 * a[0]


def _pnorm(q):
    if q < 1:
        raise DomainError("pnorm needs q >= 1")
    return lambda a: float(np.sum(a**q) ** (1.0 / q))


def _arc(modulus):
    return lambda a: arc_length(a[0], a[1], modulus)


def builtin(name):
    """Look up a size function by name; parameters follow a colon (``pnorm:2``)."""
    base, _, arg = str(name).partition(":")
    if base == "volume":
        return SizeFunction("volume", _volume)
    if base == "sum":
        return SizeFunction("sum", lambda a: float(np.sum(a)))
    if base == "sqrt_sum":
        return SizeFunction("sqrt_sum", lambda a: float(np.sum(np.sqrt(a))))
    if base == "pnorm":
        q = float(arg) if arg else 2.0
        return SizeFunction(f"pnorm:{arg or '2'}", _pnorm(q))
    if base == "square_counterexample":
        return SizeFunction("square_counterexample", _square_counterexample, dim=2)
    if base == "arc_length":
        modulus = arg or "eccentric"
        if modulus not in ("eccentric", "paper"):
            raise KeyError(f"unknown arc_length modulus {modulus!r}")
        return SizeFunction(name if arg else "arc_length", _arc(modulus), dim=2)
    raise KeyError(f"unknown size function {name!r}")


BUILTIN_NAMES = ("volume", "sum", "sqrt_sum", "pnorm:2", "square_counterexample", "arc_length")


def as_size_function(f):
    return f if isinstance(f, SizeFunction) else builtin(f)


def eval_vector(f, p, x):
    """``f o w^p`` on a vector (the restriction to diagonal matrices)."""
    return as_size_function(f)(np.sort(w_pow(p, x)))


def eval_on_matrix(f, p, S):
    """``f o w^p o e(S)`` for a symmetric matrix ``S``."""
    return as_size_function(f)(np.sort(w_pow(p, e_vec(S))))


# ------------------------------------------------------------ convexity probe

PROBE_TOL = 1e-9
LOG_RANGE = (math.log(1e-2), math.log(1e2))
ZERO_PROB = 0.2


@dataclass
class ProbeReport:
    property: str
    p: float
    domain: str
    trials: int
    violations: int
    worst_gap: float
    resampled: int = 0
    dim: int = 2
    witness: dict = None

    @property
    def verdict(self):
        return self.violations == 0

    def to_dict(self):
        return {
            "property": self.property,
            "p": self.p,
            "domain": self.domain,
            "dim": self.dim,
            "trials": self.trials,
            "violations": self.violations,
            "worst_gap": self.worst_gap,
            "resampled": self.resampled,
            "witness": self.witness,
        }


def _draw_spectrum(rng, d, nonnegative):
    x = np.exp(rng.uniform(*LOG_RANGE, size=d))
    if nonnegative:
        x[rng.random(d) < ZERO_PROB] = 0.0
    return x


def convexity_probe(f, p, property="convex", domain="positive", trials=10_000, seed=0, dim=None,
                    tol=PROBE_TOL):
    """Falsification probe for midpoint convexity or concavity of ``f o w^p``.

    ``domain`` is ``"positive"`` or ``"nonnegative"`` (vectors, i.e. diagonal
    matrices) or ``"matrices"`` (symmetric matrices with Haar eigenbases;
    spectra are positive when ``p < 0`` and non-negative otherwise).

    A trial counts as a violation when the midpoint value exceeds the chord
    midpoint (convex) or falls below it (concave) by more than
    ``tol * max(1, |chord midpoint|)``. ``worst_gap`` is the largest such
    signed excess over all trials.
    """
    f = as_size_function(f)
    if property not in ("convex", "concave"):
        raise ValueError("property must be 'convex' or 'concave'")
    if domain not in ("positive", "nonnegative", "matrices"):
        raise ValueError("domain must be 'positive', 'nonnegative' or 'matrices'")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    d = dim if dim is not None else (f.dim if f.dim != "any" else 2)
    nonneg = domain == "nonnegative" or (domain == "matrices" and p >= 0)
    sign = 1.0 if property == "convex" else -1.0
    rng = np.random.default_rng(seed)
    violations = 0
    resampled = 0
    worst = -math.inf
    witness = None
    done = 0
    while done < trials:
        x = _draw_spectrum(rng, d, nonneg)
        y = _draw_spectrum(rng, d, nonneg)
        try:
            if domain == "matrices":
                if np.allclose(np.sort(x), np.sort(y)):
                    resampled += 1
                    continue
                V, W = haar_orthogonal(rng, d), haar_orthogonal(rng, d)
                X = (V * x) @ V.T
                Y = (W * y) @ W.T
                gx = eval_on_matrix(f, p, X)
                gy = eval_on_matrix(f, p, Y)
                gm = eval_on_matrix(f, p, 0.5 * (X + Y))
            else:
                if np.array_equal(x, y):
                    resampled += 1
                    continue
                gx = eval_vector(f, p, x)
                gy = eval_vector(f, p, y)
                gm = eval_vector(f, p, 0.5 * (x + y))
        except DomainError:
            resampled += 1
            continue
        done += 1
        chord = 0.5 * (gx + gy)
        gap = sign * (gm - chord)
        worst = max(worst, gap)
        if gap > tol * max(1.0, abs(chord)):
            violations += 1
            if witness is None:
                witness = {"x": x.tolist(), "y": y.tolist(), "f_mid": gm, "chord_mid": chord}
    return ProbeReport(property, float(p), domain, trials, violations, float(worst), resampled, d,
                       witness)


def davis_agreement(f, p, property, trials=10_000, seed=0, dim=None):
    """Run the vector and matrix probes; return ``(vector, matrix, agree)``."""
    vec_domain = "positive" if p < 0 else "nonnegative"
    rv = convexity_probe(f, p, property, vec_domain, trials, seed, dim)
    rm = convexity_probe(f, p, property, "matrices", trials, seed + 1, dim)
    return rv, rm, rv.verdict == rm.verdict
