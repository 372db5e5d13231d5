"""One test per acceptance criterion, each with its time limit."""
import time
from fractions import Fraction

import pytest

from dcalc import gallery
from dcalc.exactcore import parse_expr
from dcalc.riemann import CovariantTensor2, christoffel_data, curvature


def timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


def test_c01_boolean_triviality():
    r, dt = timed(gallery.boolean_triviality)
    assert r["passed"] and dt < 10
    for row in r["algebras"]:
        n = row["n"]
        assert row["diff_dims"] == [n] * 4          # k = 0..3
        assert row["n_points"] == n and row["tangent_dims"] == [0] * n


def test_c02_f2x_tangent():
    r, dt = timed(gallery.f2x_tangent)
    assert r["passed"] and dt < 5
    assert r["truncation_degree"] == 8
    assert [p["point"] for p in r["points"]] == [["0"], ["1"]]
    assert all(p["tangent_dim"] == 1 and p["all_hold"] for p in r["points"])


def test_c03_flow():
    r, dt = timed(gallery.f2_flow)
    assert r["passed"] and dt < 5
    assert r["X_squared_zero"] and r["A0_identity"] and r["A1_swaps_points"] and r["group_law"]


def test_c04_localization():
    r, dt = timed(gallery.localization_formula)
    assert r["passed"] and dt < 10
    assert r["trials"] == 50 and r["failures"] == 0
    assert r["certificate_k_plus_1_discrepancies"] == 0
    assert parse_expr(r["d_of_inverse_x"], ["x"]) == parse_expr("-1/x^2", ["x"])
    assert parse_expr(r["d2_of_inverse_x"], ["x"]) == parse_expr("2/x^3", ["x"])


def test_c05_poisson_canonical():
    r, dt = timed(gallery.poisson_canonical, 100)
    assert r["passed"] and r["trials"] == 100 and r["failures"] == [] and dt < 60


def test_c06_pullback_identity():
    r, dt = timed(gallery.pullback_identity, 50)
    assert r["passed"] and r["trials"] == 50 and dt < 30
    assert set(r["per_order"]) == {"1", "2", "3"}


def test_c07_jet_duality():
    r, dt = timed(gallery.jet_duality)
    assert r["passed"] and dt < 60
    assert len(r["cases"]) == 12
    assert all(c["dim_diff"] == c["dim_hom_jet"] and c["h_j_identity"] for c in r["cases"])


def test_c08_de_rham_dual_numbers():
    r, dt = timed(gallery.de_rham_dual_numbers)
    assert r["passed"] and dt < 5
    assert r["dims"] == [2, 1, 0] and r["cohomology"] == [1, 0, 0]
    assert r["oracle"]["dims"] == r["dims"]


def test_c09_spencer():
    r, dt = timed(gallery.spencer_machinery)
    assert r["passed"] and dt < 120
    for alg in r["algebras"]:
        assert all(c["dd_zero"] for c in alg["diff_spencer"] + alg["jet_spencer"])
        assert [s["m"] for s in alg["splitting"]] == [1, 2, 3]
        assert all(s["frak"] == s["D_prev"] + s["D"] for s in alg["splitting"])


def test_c10_symbol_spectrum_explorer():
    r, dt = timed(gallery.explorer)
    assert r["passed"] and dt < 120
    name = r["passing_constructions"][0]
    cand = r["report"]["candidates"][name]
    assert cand["n_points"] == 4 and cand["lie_dim"] == 3 and cand["reproduces_target"]


def test_c11_levi_civita():
    r, dt = timed(gallery.levi_civita)
    assert r["passed"] and dt < 60
    assert r["random_metrics"] == 20 and r["entry_mismatches"] == 0 and r["metric_compatible"]
    assert all(r["flat_examples_R_zero"])
    T = CovariantTensor2.from_json({"n": 2, "coords": ["x1", "x2"], "tau": [["1", "0"], ["0", "x1^2"]]})
    f = christoffel_data(T)
    assert f.Gamma_rat(1, 0, 1) == parse_expr("1/x1", ["x1", "x2"])
    assert f.Gamma_rat(0, 1, 1) == parse_expr("-x1", ["x1", "x2"])
    assert curvature(f).is_flat()


def test_c12_ricci_decomposition():
    r, dt = timed(gallery.ricci_decomposition)
    assert r["passed"] and dt < 120
    assert [c["n"] for c in r["cases"]].count(3) == 5 and [c["n"] for c in r["cases"]].count(4) == 5
    assert all(c["identity"] for c in r["cases"]) and r["constant_omega_flat_g"]
    assert Fraction(r["calibration"]["kappa"]) == Fraction(-1, 4)


def test_c13_graded_regression():
    r, dt = timed(gallery.graded_regression)
    assert r["passed"] and dt < 30
    assert r["trivial_grading_identical"] and r["super_line_derivations"] == 2
    assert r["tautological_algebroid_ok"] and r["diole_check_ok"] and r["round_trip"]


def test_c14_berezinian():
    r, dt = timed(gallery.berezinian_desk)
    assert r["passed"] and dt < 30
    assert r["ground_field"]["graded_dims"] == [1, 0]
    assert r["dd_zero"] and r["stable"] and r["dual_numbers"]["graded_dims"] == [2, 0]


def test_c15_determinism():
    assert gallery.gallery_report().encode() == gallery.gallery_report().encode()
