"""Operators on polynomial rings: localization, symbols and the Poisson bracket."""
from dcalc.algpres import MultSet, PolyAlgebra
from dcalc.diffop import NFOperator, localize_op
from dcalc.exactcore import GF, QQ, RatExpr, parse_expr
from dcalc.symbols import canonical_bracket, cotangent_pullback_check, poisson, symbol

A = PolyAlgebra(QQ, ["x"], 8)
x = A.var("x")
S = MultSet(A, [x])
d2 = NFOperator.from_weyl(A, {(2,): 1})
frac = parse_expr("(x^2 + 1)/x^3", ["x"])
print("d^2 on", frac, "via the localization formula:", localize_op(d2, S)(RatExpr(frac.num, frac.den)))
print("same by the quotient rule:              ", d2.apply_rational(frac))

B = PolyAlgebra(QQ, ["x", "y"], 6)
s = symbol(NFOperator.from_weyl(B, {(2, 0): B.var("y")}))
t = symbol(NFOperator.from_weyl(B, {(0, 1): B.var("x")}))
print("{y xi_x^2, x xi_y} from commutators:", poisson(s, t).to_plain())
print("canonical formula:                  ", canonical_bracket(s.to_plain(), t.to_plain(), B))

op = NFOperator.from_weyl(A, {(2,): 1})
print("pullback identity for d^2 and f = x^2:", cotangent_pullback_check(op, x * x, 2))

# in characteristic 2 the square of d/dx dies but the divided power d^[2] survives
C = PolyAlgebra(GF(2), ["x"], 8)
d = NFOperator.d(C, (1,))
print("over F2: (d/dx)^2 =", d.compose(d), "| d^[2](x^3) =", NFOperator.d(C, (2,))(C.var("x") ** 3))
