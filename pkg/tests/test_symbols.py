import pytest
from hypothesis import given, strategies as st

from dcalc.algpres import PolyAlgebra
from dcalc.diffop import NFOperator
from dcalc.exactcore import GF, QQ, MPoly
from dcalc.symbols import (SymbolError, SymbolPoly, canonical_bracket, canonical_bracket_check,
                           cotangent_pullback_check, hamiltonian_field, check_derivation, poisson, symbol,
                           symbol_product, symbol_product_via_ops)

A = PolyAlgebra(QQ, ["x", "y"], 6)
A3 = PolyAlgebra(GF(3), ["x", "y"], 6)


def coeff(R):
    mono = st.tuples(st.integers(0, 2), st.integers(0, 2))
    return st.dictionaries(mono, st.integers(-3, 3), min_size=1, max_size=3).map(lambda d: MPoly(R.vars, R.F, d))


def hsymbol(R, k=None):
    deg = st.integers(0, 3) if k is None else st.just(k)

    def build(k):
        alphas = [(a, k - a) for a in range(k + 1)]
        return st.dictionaries(st.sampled_from(alphas), coeff(R), min_size=1, max_size=3)
    return deg.flatmap(build).map(lambda t: SymbolPoly(R, t))


@given(hsymbol(A), hsymbol(A))
def test_bracket_is_canonical_in_char_0(s, t):
    assert poisson(s, t).to_plain() == canonical_bracket(s.to_plain(), t.to_plain(), A)


@given(hsymbol(A3), hsymbol(A3))
def test_antisymmetry_char_3(s, t):
    b1, b2 = poisson(s, t), poisson(t, s)
    assert (b1 + b2).is_zero()


@given(hsymbol(A, 1), hsymbol(A, 1), hsymbol(A, 2))
def test_jacobi(r, s, t):
    lhs = poisson(r, poisson(s, t)) + poisson(s, poisson(t, r)) + poisson(t, poisson(r, s))
    assert lhs.is_zero()


@given(hsymbol(A), hsymbol(A, 1), hsymbol(A, 1))
def test_hamiltonian_field_is_derivation(s, t, u):
    X = hamiltonian_field(s)
    ok, _ = check_derivation(X, [t, u])
    assert ok


@given(hsymbol(A3), hsymbol(A3))
def test_product_routes_agree(s, t):
    assert symbol_product(s, t).terms == symbol_product_via_ops(s, t).terms


def test_known_bracket():
    x, y = A.var("x"), A.var("y")
    s = symbol(NFOperator.from_weyl(A, {(2, 0): y}))
    t = symbol(NFOperator.from_weyl(A, {(0, 1): x}))
    assert repr(poisson(s, t).to_plain()) == "-x*xi_x^2 + 2*y*xi_x*xi_y"
    assert canonical_bracket_check(s.to_plain(), t.to_plain(), A)["ok"]


def test_symbol_rejects_low_order():
    with pytest.raises(SymbolError):
        symbol(NFOperator.d(A, (2, 0)), 1)


@given(st.integers(1, 3), coeff(A), coeff(A))
def test_pullback_identity(k, c, f):
    op = NFOperator.from_weyl(A, {(k, 0): c, (0, k): f})
    assert cotangent_pullback_check(op, f + A.var("x") ** 2, k)["ok"]


def test_pullback_needs_invertible_factorial():
    with pytest.raises(SymbolError):
        cotangent_pullback_check(NFOperator.d(A3, (3, 0)), A3.var("x"), 3)
