from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, strategies as st

from dcalc.algpres import PolyAlgebra, boolean_algebra, dual_numbers, product_algebra, truncated_poly
from dcalc.diffop import (DiffOpError, DiffOperator, DiffSpace, NFOperator, certified_order, localize_op,
                          mult_operator, nf_diff_space, stabilization)
from dcalc.algpres import MultSet
from dcalc.exactcore import GF, QQ, MPoly, RatExpr, parse_expr


def sympy_diff_dim(A, k):
    """dim Diff_k(A, A) from the raw definition, solved by sympy over Q."""
    n = A.dim
    X = sympy.Matrix(n, n, sympy.symbols(f"x0:{n * n}"))
    L = [sympy.Matrix(n, n, lambda r, c: A.table[i][c][r]) for i in range(n)]
    eqs = []
    for tup in product(range(n), repeat=k + 1):
        Y = X
        for i in tup:
            Y = Y * L[i] - L[i] * Y
        eqs.extend(Y)
    eqs = [sympy.expand(e) for e in eqs if sympy.expand(e) != 0]
    if not eqs:
        return n * n
    M, _ = sympy.linear_eq_to_matrix(eqs, list(X))
    return n * n - M.rank()


FROZEN = {
    "QQ[eps]": (dual_numbers(QQ), [2, 3, 4, 4, 4], 2),
    "QQ[x]/(x^3)": (truncated_poly(QQ, 3), [3, 5, 7, 8, 9], 4),
    "GF(2)[x]/(x^3)": (truncated_poly(GF(2), 3), [3, 5, 7, 9, 9], 3),
    "GF(3)[x]/(x^3)": (truncated_poly(GF(3), 3), [3, 6, 9, 9, 9], 2),
    "GF(2)^2": (boolean_algebra(2), [2, 2, 2, 2, 2], 0),
}


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_frozen_dimensions_and_routes(name):
    A, dims, kstar = FROZEN[name]
    R = A.regular_module()
    assert [DiffSpace(R, R, k, "recursive").dim for k in range(5)] == dims
    assert [DiffSpace(R, R, k, "multisets").dim for k in range(5)] == dims
    assert stabilization(R, R)[0] == kstar


@pytest.mark.parametrize("name", ["QQ[eps]", "QQ[x]/(x^3)"])
def test_dimensions_against_sympy(name):
    A, dims, _ = FROZEN[name]
    assert [sympy_diff_dim(A, k) for k in range(4)] == dims[:4]


def algebras():
    return st.sampled_from([dual_numbers(QQ), truncated_poly(GF(2), 3), truncated_poly(GF(3), 2),
                            product_algebra(dual_numbers(GF(2)), boolean_algebra(1)), boolean_algebra(3)])


@given(algebras(), st.integers(0, 3))
def test_routes_agree_and_orders_certified(A, k):
    R = A.regular_module()
    S1, S2 = DiffSpace(R, R, k, "recursive"), DiffSpace(R, R, k, "multisets")
    assert S1.dim == S2.dim
    for M in S1.matrices():
        assert S2.contains(M)
        assert certified_order(M, R, R) <= k


@given(algebras(), st.data())
def test_composition_adds_orders(A, data):
    R = A.regular_module()
    k, l = data.draw(st.integers(0, 2)), data.draw(st.integers(0, 2))
    Sk, Sl = DiffSpace(R, R, k, "recursive"), DiffSpace(R, R, l, "recursive")
    if Sk.dim and Sl.dim:
        X = DiffOperator(R, R, Sk.matrices()[data.draw(st.integers(0, Sk.dim - 1))])
        Y = DiffOperator(R, R, Sl.matrices()[data.draw(st.integers(0, Sl.dim - 1))])
        assert X.compose(Y).order <= k + l


def test_multiplication_has_order_zero():
    A = truncated_poly(QQ, 3)
    m = mult_operator(A.regular_module(), A.basis(1))
    assert certified_order(m.matrix, m.P, m.Q) == 0


def test_shape_errors():
    A = dual_numbers(QQ)
    R = A.regular_module()
    with pytest.raises(DiffOpError):
        DiffOperator(R, R, [[1, 0]])


class TestNormalForms:
    A = PolyAlgebra(QQ, ["x", "y"], 6)

    def test_weyl_relation(self):
        A = self.A
        d, x = NFOperator.d(A, (1, 0)), NFOperator.mult(A, A.var("x"))
        assert repr(d.commutator(x)) == "1"

    def test_divided_powers_char_2(self):
        A = PolyAlgebra(GF(2), ["x"], 8)
        d2 = NFOperator.d(A, (2,))
        assert d2.certified_order() == 2
        assert d2(MPoly.monomial(("x",), A.F, (3,))) == MPoly.monomial(("x",), A.F, (1,), 3)
        # the plain square of d/dx vanishes
        d = NFOperator.d(A, (1,))
        assert d.compose(d).is_zero()

    def test_generators(self):
        assert len(nf_diff_space(self.A, 2)) == 6

    @given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-3, 3)), min_size=1, max_size=3),
           st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-3, 3)), min_size=1, max_size=3),
           st.integers(0, 3), st.integers(0, 3))
    def test_composition_matches_action(self, t1, t2, i, j):
        A = self.A
        mk = lambda ts: NFOperator(A, {(a, b): A.var("x") * c + A.const(b) for a, b, c in ts})
        D1, D2 = mk(t1), mk(t2)
        f = MPoly.monomial(A.vars, A.F, (i, j))
        assert D1.compose(D2)(f) == D1(D2(f))
        assert D1.certified_order() == D1.order


def test_localization_examples():
    A = PolyAlgebra(QQ, ["x"], 8)
    S = MultSet(A, [A.var("x")])
    one_over_x = RatExpr(A.const(1), A.var("x"), reduce=False)
    d = NFOperator.from_weyl(A, {(1,): 1})
    d2 = NFOperator.from_weyl(A, {(2,): 1})
    assert localize_op(d, S)(one_over_x) == parse_expr("-1/x^2", ["x"])
    assert localize_op(d2, S)(one_over_x) == parse_expr("2/x^3", ["x"])
