import copy

import pytest
from hypothesis import given, strategies as st

from dcalc.algpres import boolean_algebra, dual_numbers, product_algebra, truncated_poly, ground_field
from dcalc.diffop import DiffSpace
from dcalc.exactcore import GF, QQ
from dcalc.graded import (GradedAlgebra, GradedError, algebroid_check, algebroid_to_diole_bracket, connection_check,
                          degree_minus_two_bracket, diole_poisson_check, diole_to_algebroid, graded_compose_check,
                          graded_diff_space, graded_super_line, make_diole, right_connections,
                          tautological_algebroid, trivial_connection)


def algebras():
    return st.sampled_from([dual_numbers(QQ), truncated_poly(GF(3), 3), truncated_poly(QQ, 3),
                            product_algebra(dual_numbers(GF(2)), ground_field(GF(2))), boolean_algebra(2)])


@given(algebras(), st.integers(0, 2))
def test_trivial_grading_reproduces_ungraded(A, k):
    G = GradedAlgebra.trivially_graded(A)
    R = A.regular_module()
    assert graded_diff_space(G, k=k).vectors == DiffSpace(R, R, k, "recursive").vectors


def test_super_line():
    S = graded_super_line(QQ)
    D = graded_diff_space(S, k=1, derivations=True)
    assert D.dim == 2
    assert sorted(D.degree_dims().items()) == [(0, 1), (1, 1)]
    assert graded_compose_check(S, 1, 1)["ok"]


def test_super_line_rejects_theta_squared_one():
    with pytest.raises(GradedError):
        GradedAlgebra(QQ, [[[1, 0], [0, 1]], [[0, 1], [1, 0]]], [1, 0], [0, 1], "Z2")


def test_sign_rule():
    S = graded_super_line(QQ)
    assert S.sign(1, 1) == -1 and S.sign(0, 1) == 1


@given(algebras())
def test_tautological_algebroid_round_trip(A):
    data = tautological_algebroid(A)
    assert algebroid_check(data)["ok"]
    D = make_diole(data.A, data.P)
    br = algebroid_to_diole_bracket(data)
    r = diole_poisson_check(D, br, -1)
    assert r["ok"]
    back = diole_to_algebroid(D, br)
    assert back.bracket == data.bracket and back.anchor == data.anchor


def test_corrupted_anchor_is_caught():
    data = tautological_algebroid(truncated_poly(QQ, 3))
    bad = copy.deepcopy(data)
    bad.anchor[0][0][0] += 1
    r = algebroid_check(bad)
    assert not r["ok"] and r["witness"] is not None


def test_zero_degree_minus_two_bracket():
    A = dual_numbers(QQ)
    D = make_diole(A, A.regular_module())
    form = [[[0, 0] for _ in range(2)] for _ in range(2)]
    assert diole_poisson_check(D, degree_minus_two_bracket(D, form), -2)["ok"]


def test_degree_out_of_range():
    A = dual_numbers(QQ)
    D = make_diole(A, A.regular_module())
    with pytest.raises(GradedError):
        diole_poisson_check(D, [[[0] * 4] * 4] * 4, 2)


@given(algebras())
def test_connections(A):
    r = connection_check(trivial_connection(A), False)
    assert r["ok"] and r["flat"] and r["unit"]
    for data in right_connections(A):
        assert connection_check(data, True)["ok"]
