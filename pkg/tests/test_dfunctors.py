import pytest
from hypothesis import given, strategies as st

from dcalc.algpres import boolean_algebra, dual_numbers, ground_field, product_algebra, truncated_poly, PolyAlgebra
from dcalc.dfunctors import (ChainComplex, alternating_check, d_sp_kernel_check, derivations, multi_derivations,
                             regroup_check, spencer_complex, spencer_inclusion_check, splitting_check,
                             wedge_pattern_check)
from dcalc.exactcore import GF, QQ, InvariantError

# (dim Der, splitting triples for m = 1, 2, 3, Spencer dims for n = 1, 2)
FROZEN = {
    "k[eps]": (dual_numbers(QQ), 1, [(3, 2, 1), (1, 1, 0), (0, 0, 0)], [[1, 3, 2], [0, 2, 4, 2]]),
    "k[x]/(x^3)": (truncated_poly(QQ, 3), 2, [(5, 3, 2), (2, 2, 0), (0, 0, 0)], [[2, 5, 3], [0, 4, 7, 3]]),
    "F3[x]/(x^3)": (truncated_poly(GF(3), 3), 3, [(6, 3, 3), (3, 3, 0), (0, 0, 0)], [[3, 6, 3], [0, 6, 9, 3]]),
    "k": (ground_field(QQ), 0, [(1, 1, 0), (0, 0, 0), (0, 0, 0)], [[0, 1, 1], [0, 0, 1, 1]]),
}


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_frozen(name):
    A, der, split, spencer = FROZEN[name]
    assert derivations(A).dim == der
    for m, triple in enumerate(split, start=1):
        r = splitting_check(A, None, m)
        assert (r["dim_frakD_m"], r["dim_D_m-1"], r["dim_D_m"]) == triple
        assert r["additive"] and r["projections_ok"]
    for n, dims in enumerate(spencer, start=1):
        c = spencer_complex(A, None, n)["complex"]
        assert c.dims == dims and c.is_complex()


def algebras():
    return st.sampled_from([dual_numbers(QQ), dual_numbers(GF(2)), truncated_poly(GF(3), 3),
                            truncated_poly(QQ, 4), product_algebra(dual_numbers(QQ), ground_field(QQ)),
                            boolean_algebra(2)])


@given(algebras(), st.integers(1, 3))
def test_spencer_complexes_square_to_zero(A, n):
    c = spencer_complex(A, None, n)["complex"]
    assert c.is_complex()
    assert c.dd_witness() is None


@given(algebras(), st.integers(1, 3))
def test_splitting_is_additive(A, m):
    assert splitting_check(A, None, m)["additive"]


@given(algebras())
def test_bi_derivations_are_alternating(A):
    assert alternating_check(multi_derivations(A, None, (1, 1)))


def test_polynomial_bi_derivation_pattern():
    r = wedge_pattern_check(PolyAlgebra(QQ, ["x", "y"], 3))
    assert r["pattern_ok"] and r["alternating"] and r["generator_rank"] == 1


def test_regroup_and_kernel_and_inclusion():
    A = dual_numbers(QQ)
    assert regroup_check(A.regular_module(), 1, 1)["ok"]
    assert d_sp_kernel_check(A, None, 2)["ok"]
    assert spencer_inclusion_check(A, None, 2)["ok"]


def test_chain_complex_rejects_nonzero_square():
    with pytest.raises(InvariantError) as e:
        ChainComplex([1, 1, 1], [[[1]], [[1]]], QQ)
    assert e.value.witness is not None


def test_homology_of_exact_sequence():
    c = ChainComplex([1, 1, 0], [[[1]], []], QQ)
    assert c.homology_dims() == [0, 0, 0]
