from itertools import product

import pytest
from hypothesis import given, strategies as st

from dcalc.algpres import PolyAlgebra, boolean_algebra, dual_numbers, poly_quotient, product_algebra, truncated_poly
from dcalc.exactcore import GF, QQ, BudgetError, MPoly
from dcalc.spectrum import (AlgHom, SpectrumError, check_point, derivation_nilpotency, enumerate_spectrum, ghosts,
                            induced_map, module_ghosts, nilpotent_flow, tangent_space)


def local_factors():
    F = st.sampled_from([GF(2), GF(3)])
    return F.flatmap(lambda F: st.lists(st.integers(1, 3), min_size=1, max_size=3).map(
        lambda ms: (F, [truncated_poly(F, m) for m in ms])))


def build(factors):
    A = factors[0]
    for B in factors[1:]:
        A = product_algebra(A, B)
    return A


def brute_tangent_dim(A, h):
    F = A.F
    count = 0
    for xi in product(range(F.p), repeat=A.dim):
        ok = True
        for i in range(A.dim):
            for j in range(A.dim):
                lhs = sum(c * x for c, x in zip(A.table[i][j], xi)) % F.p
                if lhs != (h.values[i] * xi[j] + h.values[j] * xi[i]) % F.p:
                    ok = False
                    break
            if not ok:
                break
        count += ok
    # the solution set is a vector space of size p^dim
    d = 0
    while F.p ** d < count:
        d += 1
    return d


@given(local_factors())
def test_points_of_product_of_local_algebras(fs):
    F, factors = fs
    A = build(factors)
    pts = enumerate_spectrum(A)
    assert len(pts) == len(factors)
    for h in pts:
        # tangent dimension is 1 at points of k[x]/(x^m), m >= 2, and 0 on a field factor
        assert len(tangent_space(A, h)) == brute_tangent_dim(A, h)


def test_boolean_has_no_tangents_and_no_ghosts():
    B = boolean_algebra(3)
    pts = enumerate_spectrum(B)
    assert len(pts) == 3
    assert all(tangent_space(B, h) == [] for h in pts)
    g = ghosts(B)
    assert g.geometric and g.basis == []


def test_f2x_points_and_tangents():
    A = PolyAlgebra(GF(2), ["x"], 8)
    pts = enumerate_spectrum(A)
    assert [h.values for h in pts] == [(0,), (1,)]
    for h in pts:
        T = tangent_space(A, h)
        assert len(T) == 1 and T[0].values == (1,)
        for n in range(9):
            p = MPoly.monomial(("x",), A.F, (n,))
            assert T[0](A, p) == p.partial("x").evaluate(h.values)


def test_nilpotent_ghost():
    A = dual_numbers(GF(2))
    g = ghosts(A)
    assert g.geometric is False and len(g.basis) == 1
    assert module_ghosts(A.regular_module()).geometric is False


def test_ghosts_over_rationals_need_points():
    assert ghosts(dual_numbers(QQ)).status == "insufficient points"


def test_check_point():
    A = poly_quotient(QQ, "x", [-1, 0, 1])  # x^2 - 1
    assert check_point(A, [1]) is not None
    assert check_point(A, [2]) is None
    with pytest.raises(SpectrumError):
        check_point(A, [1, 2])
    with pytest.raises(SpectrumError):
        enumerate_spectrum(A)


def test_budget():
    A = PolyAlgebra(GF(7), ["x", "y", "z"], 2)
    with pytest.raises(BudgetError) as e:
        enumerate_spectrum(A, budget=100)
    assert e.value.parameter == "budget"


class TestFlows:
    A = PolyAlgebra(GF(2), ["x"], 8)

    def test_d_dx_squares_to_zero(self):
        assert derivation_nilpotency(self.A, [self.A.const(1)]) == 2

    def test_identity_at_zero_and_swap_at_one(self):
        A = self.A
        f0 = nilpotent_flow(A, [A.const(1)], 0)
        assert f0.endo.images == [A.var("x")]
        f1 = nilpotent_flow(A, [A.const(1)], 1)
        pts = enumerate_spectrum(A)
        assert [induced_map(f1.endo)(h).values for h in pts] == [(1,), (0,)]
        # the naive truncated exponential x -> x + t is fine but the same series fails on x^2
        assert f1.naive_is_hom is False

    @given(st.integers(0, 1), st.integers(0, 1))
    def test_group_law(self, t, s):
        A = self.A
        ft, fs, fts = (nilpotent_flow(A, [A.const(1)], u).endo for u in (t, s, t + s))
        assert ft.compose(fs).images == fts.images

    def test_rational_group_law(self):
        A = PolyAlgebra(QQ, ["x", "y"], 5)
        X = [A.var("y"), A.const(0)]  # y d/dx is nilpotent
        f = lambda u: nilpotent_flow(A, X, u).endo
        assert f(2).compose(f(3)).images == f(5).images

    def test_not_nilpotent(self):
        A = PolyAlgebra(QQ, ["x"], 4)
        with pytest.raises(SpectrumError):
            nilpotent_flow(A, [A.var("x")], 1)

    def test_alghom_validation(self):
        with pytest.raises(SpectrumError):
            AlgHom(boolean_algebra(2), boolean_algebra(2), [[1, 0], [1, 0]])  # sends 1 to 0
