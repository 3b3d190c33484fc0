import csv
import io
import math

import numpy as np
import pytest

from extremal_ellipsoids import experiments as ex
from extremal_ellipsoids.ellipsoids import contains_point, ellipsoid_in_polytope


def test_pencil_passes_through_corners():
    for alpha in (0.1, 0.5, 0.9):
        E = ex.square_pencil_ellipse(alpha)
        for x in ex.SQUARE_POINTS:
            y = x - E.center
            assert abs(y @ E.shape @ y - 1.0) < 1e-14


def test_square_closed_form_minimizer():
    # stationarity of 1/sqrt(a) + 16/sqrt(1-a) on a < 1/2 gives a = 1/(1 + 2^(8/3))
    assert abs(ex.SQUARE_ALPHA_CLOSED - 1 / (1 + 2 ** (8 / 3))) < 1e-15
    h = 1e-6
    a = ex.SQUARE_ALPHA_CLOSED
    slope = (ex.square_pencil_value(a + h) - ex.square_pencil_value(a - h)) / (2 * h)
    assert abs(slope) < 1e-4


def test_repro_square_summary():
    text, s = ex.repro_square()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["alpha", "semi_axis_x", "semi_axis_y", "f"]
    assert len(rows) == 2002
    assert all(0 < float(r[0]) < 1 for r in rows[1:])
    assert s["circle"]["abs_diff"] < 1e-9
    assert max(s["alpha_abs_diff"]) < 1e-6
    assert max(s["f_min_abs_diff"]) < 1e-3
    assert s["symmetry_max_abs_diff"] < 1e-11
    assert s["minimizers_distinct"]


def test_repro_square_deterministic():
    assert ex.repro_square() == ex.repro_square()


def test_csv_seventeen_digits():
    assert ex.fmt(1 / 3) == "0.33333333333333331"
    assert float(ex.fmt(math.pi)) == math.pi


def test_triangle_family_tangency():
    for k in np.linspace(1e-4, ex.K_MAX * 0.999, 50):
        assert ex.tangency_residual(k) <= 1e-12
        ok, _ = ellipsoid_in_polytope(ex.triangle_family_map(k), ex.triangle_polytope())
        assert ok
    a, b = ex.triangle_family(ex.K_INCIRCLE)
    assert math.isclose(a, b)


def test_triangle_family_domain():
    with pytest.raises(ValueError):
        ex.triangle_family(0.0)
    with pytest.raises(ValueError):
        ex.triangle_family(1.0)


def test_repro_triangle_summary():
    text, s = ex.repro_triangle()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["k", "semi_axis_a", "semi_axis_b", "f_eccentric", "f_paper"]
    assert len(rows) == 2002
    assert s["tangency_max_residual"] <= 1e-12
    for mod in ex.MODULI:
        m = s["moduli"][mod]
        assert m["incircle"]["abs_diff"] < 1e-9
        assert m["limit"]["abs_diff"] < 1e-6
        assert m["scan_max_exceeds_incircle"]
    # only the literal modulus produces a corner at the circle
    assert abs(s["moduli"]["paper"]["incircle_slopes"]["jump"]) > 1.0
    assert abs(s["moduli"]["eccentric"]["incircle_slopes"]["jump"]) < 1e-3


def test_triangle_starts_inside():
    F = ex.triangle_polytope()
    starts = ex.triangle_starts()
    assert len(starts) == 4
    for E in starts:
        assert ellipsoid_in_polytope(E, F)[0]


def test_verify_lemma_small_batches():
    for lemma, d in (("1", 2), ("1", 3), ("2", 2), ("2", 3), ("4", 2), ("homogeneous", 3)):
        s = ex.verify_lemma(lemma, d, trials=30, seed=3)
        assert s["violations"] == 0 and s["witness"] is None


def test_verify_lemma_arguments():
    with pytest.raises(ValueError):
        ex.verify_lemma("4", d=3)
    with pytest.raises(ValueError):
        ex.verify_lemma("7")
    with pytest.raises(ValueError):
        ex.verify_lemma("1", d=5)


def test_verify_lemma_parallel_matches_serial():
    a = ex.verify_lemma("2", 2, trials=16, seed=9, jobs=1)
    b = ex.verify_lemma("2", 2, trials=16, seed=9, jobs=2)
    assert a == b


def test_strict_betweenness_batch():
    s = ex.strict_betweenness(trials=50, seed=4)
    assert s["failures"] == 0 and s["min_volume_gap"] > 1e-12
    assert s["midpoint_max_constraint"] <= 1e-12


def test_round_trip_batch():
    s = ex.round_trips(trials=100, seed=5)
    assert s["failing_checks"] == []


def test_random_pair_overlap_flag(rng):
    E0, E1 = ex.random_pair(rng, 2, overlap=True)
    assert contains_point(E0, E0.center)
