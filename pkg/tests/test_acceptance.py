"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import sys
import time

import numpy as np
import pytest

from extremal_ellipsoids import experiments as ex
from extremal_ellipsoids.ellipsoids import HPolytope, to_quadric
from extremal_ellipsoids.sizes import davis_agreement
from extremal_ellipsoids.solvers import khachiyan_mvee, multistart_uniqueness, solve_min_enclosing

RESULTS = {}


@pytest.fixture
def emit(capsys):
    def _emit(name, ok, detail):
        RESULTS[name] = ok
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name}: {detail}")
        assert ok, detail
    return _emit


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def test_criterion_1_square(emit):
    (_, s), dt = timed(ex.repro_square)
    ok = (s["circle"]["abs_diff"] < 1e-9
          and s["minimizers_distinct"]
          and max(s["f_min_abs_diff"]) < 1e-3
          and max(s["alpha_abs_diff"]) < 1e-6
          and dt < 5.0)
    emit("1 square counterexample", ok,
         f"circle err {s['circle']['abs_diff']:.1e}, minima "
         f"{[round(m['f'], 6) for m in s['minimizers']]}, "
         f"alpha err {max(s['alpha_abs_diff']):.1e}, {dt:.2f}s")


def test_criterion_2_triangle(emit):
    (_, s), dt = timed(ex.repro_triangle)
    parts = []
    ok = dt < 10.0
    for mod in ex.MODULI:
        m = s["moduli"][mod]
        ok = ok and (m["incircle"]["abs_diff"] < 1e-9 and m["limit"]["abs_diff"] < 1e-6
                     and m["scan_max_exceeds_incircle"])
        parts.append(f"{mod}: incircle err {m['incircle']['abs_diff']:.1e}, "
                     f"limit err {m['limit']['abs_diff']:.1e}, scan max {m['scan_max']['f']:.6f}")
    emit("2 triangle counterexample", ok, "; ".join(parts) + f", {dt:.2f}s")


@pytest.mark.parametrize("lemma,d", [("1", 2), ("1", 3), ("2", 2), ("2", 3), ("4", 2)])
def test_criterion_3_lemmas(emit, lemma, d):
    s, dt = timed(ex.verify_lemma, lemma, d, trials=1000, seed=0)
    ok = s["violations"] == 0 and s["tol"] <= 1e-9 and dt < 60.0
    emit(f"3 lemma {lemma} d={d}", ok,
         f"{s['violations']} violations over 1000 pairs (tol {s['tol']:.0e}, "
         f"{s['vacuous_pairs']} vacuous), {dt:.1f}s")


@pytest.mark.parametrize("name,p,prop,expect", [
    ("volume", -1.0, "convex", True),
    ("volume", -0.5, "convex", True),
    ("sqrt_sum", 1.0, "concave", True),
    ("square_counterexample", -0.5, "convex", False),
])
def test_criterion_4_davis(emit, name, p, prop, expect):
    rv, rm, agree = davis_agreement(name, p, prop, trials=10_000, seed=0)
    ok = agree and rv.verdict == expect
    if not expect:
        ok = ok and rv.witness is not None and rm.witness is not None
    emit(f"4 probe {name} p={p} {prop}", ok,
         f"vector {rv.violations} / matrix {rm.violations} violations, agree={agree}")


def test_criterion_5_khachiyan(emit):
    t0 = time.perf_counter()
    worst_vol, worst_fro = 0.0, 0.0
    for ss in np.random.SeedSequence(5).spawn(50):
        rng = np.random.default_rng(ss)
        d = int(rng.integers(2, 4))
        n = int(rng.integers(d + 2, 201))
        X = rng.standard_normal((n, d)) * rng.uniform(0.5, 2.0, size=d)
        res = solve_min_enclosing(X, "volume")
        ref = khachiyan_mvee(X, eps=1e-6)
        Q, R = to_quadric(res.affine), ref.quadric
        worst_vol = max(worst_vol, abs(res.objective - ref.objective) / ref.objective)
        fro = np.sqrt(np.linalg.norm(np.asarray(Q.shape) - R.shape) ** 2
                      + np.linalg.norm(Q.center - R.center) ** 2)
        worst_fro = max(worst_fro, fro)
    dt = time.perf_counter() - t0
    ok = worst_vol <= 1e-4 and worst_fro <= 1e-3 and dt < 120.0
    emit("5 enclosing vs Khachiyan", ok,
         f"worst rel volume {worst_vol:.1e}, worst Frobenius {worst_fro:.1e}, {dt:.1f}s")


@pytest.mark.parametrize("case", ["square-volume", "box-sqrt_sum", "square-counterexample"])
def test_criterion_6_multistart(emit, case):
    if case == "square-volume":
        rep = multistart_uniqueness(ex.SQUARE_POINTS, "volume", n_starts=32, seed=0)
        ok = rep.clusters == 1
    elif case == "box-sqrt_sum":
        rep = multistart_uniqueness(HPolytope.box([-1, -1], [1, 1]), "sqrt_sum", n_starts=32, seed=0)
        ok = rep.clusters == 1
    else:
        rep = multistart_uniqueness(ex.SQUARE_POINTS, "square_counterexample", n_starts=32, seed=0)
        ok = rep.clusters == 2 and rep.objective_spread <= 1e-6
    emit(f"6 multistart {case}", ok,
         f"{rep.clusters} cluster(s), objectives {[round(o, 9) for o in rep.objectives]}, "
         f"spread {rep.objective_spread:.1e}")


def test_criterion_7_strict_betweenness(emit):
    s = ex.strict_betweenness(trials=200, seed=0)
    emit("7 strict betweenness", s["failures"] == 0,
         f"{s['failures']} failures over 200 pairs, min volume gap {s['min_volume_gap']:.2e}")


def test_criterion_8_round_trips(emit):
    s = ex.round_trips(trials=1000, seed=0, tol=1e-8)
    worst = max(s["worst_relative_error"].values())
    emit("8 representation round trips", not s["failing_checks"],
         f"worst relative error {worst:.1e} over 1000 ellipsoids")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
