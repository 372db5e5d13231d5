import pytest
from hypothesis import given, strategies as st

from dcalc.algpres import boolean_algebra, dual_numbers, ground_field, product_algebra, truncated_poly
from dcalc.dfunctors import derivations
from dcalc.exactcore import GF, QQ
from dcalc.jetsforms import (FormsError, JetModule, adjoint_module, berezinian, cartan_check, de_rham_complex, forms_checks,
                             insertion_antiderivation_check, jet_duality_check, jet_spencer_complex, kahler_forms,
                             multiplicative_structure, representing_check)

# forms dims up to degree 3, de Rham cohomology, jet dims k = 0..3, Berezinian graded dims
FROZEN = {
    "k[eps]": (dual_numbers(QQ), [2, 1, 0, 0], [1, 0, 0, 0], [2, 3, 4, 4], [2, 0]),
    "k[x]/(x^3)": (truncated_poly(QQ, 3), [3, 2, 0, 0], [1, 0, 0, 0], [3, 5, 7, 8], [3, 0, 0]),
    "F3[x]/(x^3)": (truncated_poly(GF(3), 3), [3, 3, 0, 0], [1, 1, 0, 0], [3, 6, 9, 9], [3, 3, 0, 0]),
    "k": (ground_field(QQ), [1, 0, 0, 0], [1, 0, 0, 0], [1, 1, 1, 1], [1, 0]),
    "F2^2": (boolean_algebra(2), [2, 0, 0, 0], [2, 0, 0, 0], [2, 2, 2, 2], [2, 0]),
}


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_frozen(name):
    A, forms, H, jets, ber = FROZEN[name]
    f = kahler_forms(A, 3)
    assert f.dims == forms
    assert f.cohomology_dims() == H
    assert [JetModule(A, A.regular_module(), k).dim for k in range(4)] == jets
    B = adjoint_module(A)
    assert B.graded_dims == ber and B.complex.is_complex()


def test_berezinian_of_ground_field():
    B = berezinian(ground_field(QQ))
    assert B.graded_dims == [1, 0]
    assert B.top_comparison["agree"]


def algebras():
    return st.sampled_from([dual_numbers(QQ), dual_numbers(GF(3)), truncated_poly(GF(3), 3), truncated_poly(QQ, 3),
                            product_algebra(dual_numbers(QQ), ground_field(QQ)), boolean_algebra(2)])


@given(algebras())
def test_form_axioms(A):
    r = forms_checks(kahler_forms(A, 2))
    assert r.pop("convention") == "alternating"
    assert all(r.values())


@given(algebras(), st.integers(0, 3))
def test_jet_duality(A, k):
    r = jet_duality_check(A, None, None, k)
    assert r["dims_equal"] and r["universal"] and r["injective"] and r["inverse_ok"] and r["tensor_identity"]


@given(algebras(), st.integers(1, 2))
def test_forms_represent_multi_derivations(A, k):
    if A.F.p is not None:
        with pytest.raises(FormsError):
            representing_check(A, None, k)
    else:
        assert representing_check(A, None, k)["ok"]


@given(algebras())
def test_cartan_formula(A):
    f = kahler_forms(A, 2)
    n = A.dim
    for v in derivations(A).vectors:
        X = [[v[r * n + c] for c in range(n)] for r in range(n)]
        assert all(cartan_check(f, X).values())
        assert insertion_antiderivation_check(f, X)


@given(algebras(), st.integers(1, 2))
def test_complexes(A, n):
    assert de_rham_complex(A, 2).is_complex()
    assert jet_spencer_complex(A, n)["complex"].is_complex()


def test_jet_algebra_structure():
    r = multiplicative_structure(dual_numbers(QQ))
    assert r["well_defined"] and r["associative"] and r["commutative"] and r["unit_acts_identically"]
