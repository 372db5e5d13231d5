import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dcalc.exactcore import parse_expr
from dcalc.riemann import (CovariantTensor2, RiemannError, calibrate, christoffel_data, curvature,
                           default_calibration, random_metric, random_skew, ricci_tau_residual)


def to_sympy(r, syms):
    return sympy.sympify(repr(r).replace("^", "**"), locals=syms)


def oracle_christoffel(coords, g):
    """Classical Γ^a_ij = ½ g^{ak} (∂_j g_ik + ∂_i g_jk − ∂_k g_ij), computed by sympy."""
    syms = {c: sympy.Symbol(c) for c in coords}
    x = [syms[c] for c in coords]
    G = sympy.Matrix([[to_sympy(e, syms) for e in row] for row in g])
    Gi = G.inv()
    n = len(coords)
    return [[[sympy.cancel(sum(Gi[a, k] * (sympy.diff(G[i, k], x[j]) + sympy.diff(G[j, k], x[i])
                                            - sympy.diff(G[i, j], x[k])) for k in range(n)) / 2)
              for j in range(n)] for i in range(n)] for a in range(n)], syms


def tensor(coords, rows):
    return CovariantTensor2.from_json({"n": len(coords), "coords": coords, "tau": rows})


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_christoffel_matches_sympy(seed, n):
    coords = ["x", "y", "z"][:n]
    g = random_metric(coords, random.Random(seed))
    T = CovariantTensor2.from_parts(coords, g)
    form = christoffel_data(T)
    O, syms = oracle_christoffel(coords, g)
    for a in range(n):
        for i in range(n):
            for j in range(n):
                assert sympy.simplify(to_sympy(form.Gamma_rat(a, i, j), syms) - O[a][i][j]) == 0
    assert form.metric_compatibility()


def test_polar_like_metric():
    T = tensor(["x", "y"], [["1", "0"], ["0", "x^2"]])
    f = christoffel_data(T)
    nz = {k: repr(v) for k, v in f.nonzero().items()}
    assert nz == {(1, 2, 2): "-x", (2, 1, 2): "(1)/(x)", (2, 2, 1): "(1)/(x)"}
    assert curvature(f).is_flat()


def test_hyperbolic_plane():
    T = tensor(["x", "y"], [["1/y^2", "0"], ["0", "1/y^2"]])
    c = curvature(christoffel_data(T))
    assert not c.is_flat() and c.antisymmetric() and c.bianchi()
    # R_ik = R^j_ijk is the negative of the classical Ricci tensor: here +g
    assert c.ricci_ratio_to_metric() == 1
    assert c.scalar() == parse_expr("2", ["x", "y"])


@pytest.mark.parametrize("n", [2, 3])
def test_flat_constant_metric(n):
    coords = ["x", "y", "z"][:n]
    rows = [["2" if i == j else "1" if abs(i - j) == 1 else "0" for j in range(n)] for i in range(n)]
    f = christoffel_data(tensor(coords, rows))
    assert f.nonzero() == {} and curvature(f).is_flat()


def test_degenerate_metric_names_minor():
    with pytest.raises(RiemannError) as e:
        christoffel_data(tensor(["x", "y"], [["x", "x"], ["x", "x"]]))
    assert e.value.minor == {"leading_principal_minor": 2}


def test_calibration_values():
    cal = default_calibration()
    assert (cal.kappa, cal.lam) == (Fraction(-1, 4), Fraction(1, 2))
    assert cal.c_prime_squared == Fraction(-4, 9)
    assert cal.c_prime() is None


def test_ricci_tau_known_case():
    coords = ["a", "b", "c", "d"]
    g = [[parse_expr("1" if i == j else "0", coords) for j in range(4)] for i in range(4)]
    w = [[parse_expr("0", coords)] * 4 for _ in range(4)]
    w[0][1], w[1][0] = parse_expr("c", coords), parse_expr("-c", coords)
    r = ricci_tau_residual(CovariantTensor2.from_parts(coords, g, w))
    assert r["decomposition_identity"] and r["first_residual_equals_direct_ricci"]
    assert r["second_residual_zero"] and not r["first_residual_zero"]
    diag = [r["first_residual"][i][i] for i in range(4)]
    assert diag == ["1/2", "1/2", "1/2", "0"]


@settings(max_examples=3)
@given(st.integers(0, 10 ** 6))
def test_decomposition_identity_random(seed):
    rng = random.Random(seed)
    coords = ["x", "y", "z"]
    T = CovariantTensor2.from_parts(coords, random_metric(coords, rng), random_skew(coords, rng))
    assert ricci_tau_residual(T)["decomposition_identity"]


def test_calibration_is_reproducible():
    from dcalc.riemann import _calibration_example
    assert calibrate(_calibration_example()).to_json() == default_calibration().to_json()
