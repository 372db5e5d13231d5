from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from dcalc.exactcore import (GF, QQ, BudgetError, Coords, ExactError, MPoly, Quotient, RatExpr, binomial,
                             get_budget, image_basis, intersect, kernel_basis, matmul, matvec, parse_expr,
                             rank, rref, solve)

PRIMES = [2, 3, 5, 7]


def matrices(F, rows=4, cols=5):
    elt = st.integers(0, F.p - 1) if F.p else st.fractions(min_value=-3, max_value=3, max_denominator=3)
    return st.integers(1, rows).flatmap(
        lambda r: st.integers(1, cols).flatmap(
            lambda c: st.lists(st.lists(elt, min_size=c, max_size=c), min_size=r, max_size=r)))


def field_and_matrix():
    return st.sampled_from([QQ] + [GF(p) for p in PRIMES]).flatmap(lambda F: st.tuples(st.just(F), matrices(F)))


def sympy_rank(m, F):
    M = sympy.Matrix(m)
    if F.p is None:
        return M.rank()
    from sympy.polys.matrices import DomainMatrix
    return DomainMatrix.from_Matrix(M).convert_to(sympy.GF(F.p)).rank()


class TestField:
    def test_gf_rejects_composite(self):
        with pytest.raises(ExactError):
            GF(4)

    def test_coercion(self):
        assert GF(5)(Fraction(1, 2)) == 3
        assert QQ(3) == Fraction(3)
        with pytest.raises(ZeroDivisionError):
            GF(3)(Fraction(1, 3))

    def test_inverse(self):
        assert GF(7).inv(3) == 5
        assert QQ.inv(Fraction(2, 3)) == Fraction(3, 2)
        with pytest.raises(ZeroDivisionError):
            GF(7).inv(0)

    def test_json(self):
        assert QQ.to_json() == "Q" and GF(3).to_json() == {"Fp": 3}


class TestLinearAlgebra:
    @given(field_and_matrix())
    def test_rank_matches_sympy(self, fm):
        F, m = fm
        m = [[F(x) for x in r] for r in m]
        assert rank(m, F) == sympy_rank(m, F)

    @given(field_and_matrix())
    def test_rank_nullity_and_kernel(self, fm):
        F, m = fm
        m = [[F(x) for x in r] for r in m]
        K = kernel_basis(m, F)
        assert rank(m, F) + len(K) == len(m[0])
        for v in K:
            assert not any(matvec(m, v, F))

    @given(field_and_matrix())
    def test_rref_is_idempotent(self, fm):
        F, m = fm
        m = [[F(x) for x in r] for r in m]
        rows, piv = rref(m, F)
        if rows:
            assert rref(rows, F) == (rows, piv)
        assert len(piv) == rank(m, F)

    @given(field_and_matrix(), st.data())
    def test_solve_consistent_systems(self, fm, data):
        F, m = fm
        m = [[F(x) for x in r] for r in m]
        x = [F(v) for v in data.draw(st.lists(st.integers(-3, 3), min_size=len(m[0]), max_size=len(m[0])))]
        b = matvec(m, x, F)
        sol = solve(m, b, F)
        assert sol is not None and matvec(m, sol, F) == b

    def test_solve_inconsistent(self):
        assert solve([[1, 1], [1, 1]], [Fraction(0), Fraction(1)], QQ) is None

    def test_intersection_of_planes(self):
        U = [[1, 0, 0], [0, 1, 0]]
        W = [[0, 1, 0], [0, 0, 1]]
        I = intersect([[QQ(x) for x in v] for v in U], [[QQ(x) for x in v] for v in W], 3, QQ)
        assert len(I) == 1 and I[0][0] == 0 and I[0][2] == 0

    def test_image_and_matmul(self):
        F = GF(2)
        m = [[1, 1], [1, 1]]
        assert len(image_basis(m, F)) == 1
        assert matmul(m, m, F) == [[0, 0], [0, 0]]

    def test_coords_roundtrip(self):
        C = Coords([[QQ(1), QQ(1), QQ(0)], [QQ(0), QQ(1), QQ(1)]], QQ)
        assert C.combine([2, 3]) == [2, 5, 3]
        with pytest.raises(ExactError):
            Coords([[QQ(1), QQ(1)], [QQ(2), QQ(2)]], QQ)

    def test_quotient_canonical(self):
        Q = Quotient(3, [[1, 1, 0]], QQ)
        assert Q.dim == 2
        assert Q.reduce([1, 0, 0]) == Q.reduce([0, 1, 0]) or Q.reduce([1, 0, 0]) == [-x for x in Q.reduce([0, 1, 0])]


V = ("x", "y")
polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-4, 4), max_size=5)


def P(d, F=QQ):
    return MPoly(V, F, d)


class TestMPoly:
    @given(polys, polys, polys)
    def test_ring_axioms(self, a, b, c):
        a, b, c = P(a), P(b), P(c)
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert (a - a).is_zero()

    @given(polys, polys)
    def test_leibniz(self, a, b):
        a, b = P(a), P(b)
        assert (a * b).partial("x") == a.partial("x") * b + a * b.partial("x")

    @given(polys, st.integers(0, 4))
    def test_hasse_times_factorial_is_iterated_partial(self, a, k):
        a = P(a)
        d = a
        for _ in range(k):
            d = d.partial("y")
        fact = 1
        for i in range(2, k + 1):
            fact *= i
        assert a.hasse("y", k) * fact == d

    def test_divided_powers_survive_char_p(self):
        F = GF(2)
        x2 = MPoly.monomial(("x",), F, (2,))
        assert x2.partial("x").partial("x").is_zero()
        assert x2.hasse("x", 2) == MPoly.const(("x",), F, 1)

    @given(polys, st.fractions(max_denominator=5), st.fractions(max_denominator=5))
    def test_evaluate_is_homomorphism(self, a, s, t):
        a = P(a)
        b = a * a + a
        assert b.evaluate([s, t]) == a.evaluate([s, t]) ** 2 + a.evaluate([s, t])

    def test_binomial(self):
        assert [binomial(5, k) for k in range(7)] == [1, 5, 10, 10, 5, 1, 0]


class TestRatExpr:
    def test_parse_and_cancel(self):
        r = parse_expr("(x^2 - y^2)/(x - y)", V)
        assert r == parse_expr("x + y", V)
        assert r.den.is_const()

    def test_parse_errors(self):
        with pytest.raises(ExactError):
            parse_expr("x +* y", V)
        with pytest.raises(ExactError):
            parse_expr("z", V)

    def test_quotient_rule(self):
        r = parse_expr("1/x", V)
        assert r.partial("x") == parse_expr("-1/x^2", V)

    def test_zero_denominator(self):
        with pytest.raises(ZeroDivisionError):
            RatExpr(P({(1, 0): 1}), P({}))


def test_budget_env(monkeypatch):
    monkeypatch.setenv("DCALC_BUDGET", "123")
    assert get_budget() == 123
    assert get_budget(7) == 7
    monkeypatch.delenv("DCALC_BUDGET")
    assert get_budget() == 10 ** 6
    e = BudgetError("too big", "budget")
    assert e.parameter == "budget"
