"""Exact differential calculus over commutative algebras.

Submodules: exactcore (fields, matrices, polynomials), algpres (algebra and
module presentations), spectrum, diffop, symbols, dfunctors, jetsforms,
graded, riemann, gallery and cli.
"""
from .exactcore import GF, QQ, BudgetError, ExactError, InvariantError, MPoly, RatExpr, parse_expr
from .algpres import FinAlgebra, FinModule, PolyAlgebra, QuotPres

__version__ = "0.1.0"

__all__ = ["GF", "QQ", "BudgetError", "ExactError", "InvariantError", "MPoly", "RatExpr", "parse_expr",
           "FinAlgebra", "FinModule", "PolyAlgebra", "QuotPres", "__version__"]
