"""Linear differential operators between modules over a commutative algebra.

An operator D: P -> Q has order <= k when every iterated commutator
delta_{a_0} ... delta_{a_k}(D) vanishes, with delta_a(D) = D o a_P - a_Q o D.

Two backends:

* matrices over finite-dimensional algebras and modules
  (:class:`DiffOperator`, :func:`diff_space`);
* normal forms sum c_alpha(x) d^[alpha] over polynomial algebras with
  divided-power generators (:class:`NFOperator`).
"""
from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Sequence

from .algpres import FinAlgebra, FinModule, PolyAlgebra, hom_space
from .exactcore import (
    BudgetError, Coords, ExactError, Field, InvariantError, MPoly, RatExpr,
    binomial, factorial, kernel_from_sparse, matmul, matvec, rref,
)


class DiffOpError(ExactError):
    pass


# ---------------------------------------------------------------------------
# matrix backend

def _mat_sub(X, Y, F):
    return [[F.norm(a - b) for a, b in zip(r, s)] for r, s in zip(X, Y)]


def delta_matrix(X, a, P: FinModule, Q: FinModule):
    """delta_a(X) = X o a_P - a_Q o X for a dim Q x dim P matrix X."""
    F = P.F
    if not X or not X[0]:
        return [list(r) for r in X]
    return _mat_sub(matmul(X, P.action(a), F), matmul(Q.action(a), X, F), F)


def _basis_elements(A: FinAlgebra):
    """Basis elements used in delta-tuples (the unit, if a basis vector, is skipped)."""
    u = A.unit_index()
    return [A.basis(i) for i in range(A.dim) if i != u]


def certified_order(X, P: FinModule, Q: FinModule, max_order: int | None = None):
    """Least k with all delta-(k+1)-tuples killing X (None if above max_order)."""
    if not any(any(r) for r in X):
        return -1
    A = P.A
    elems = _basis_elements(A)
    max_order = max_order if max_order is not None else P.dim * Q.dim + 1
    layer = {(): X}
    for k in range(max_order + 1):
        # layer holds delta_{tuple}(X) for multisets of size k; check size k+1
        nxt = {}
        for tup, Y in layer.items():
            start = tup[-1] if tup else 0
            for i in range(start, len(elems)):
                Z = delta_matrix(Y, elems[i], P, Q)
                if any(any(r) for r in Z):
                    nxt[tup + (i,)] = Z
        if not nxt:
            return k
        layer = nxt
    return None


def delta_tuple_nonzero(X, P, Q, k: int) -> tuple | None:
    """A multiset of basis indices of size k with delta_{tuple}(X) != 0, if any."""
    elems = _basis_elements(P.A)
    for tup in combinations_with_replacement(range(len(elems)), k):
        Y = X
        for i in tup:
            Y = delta_matrix(Y, elems[i], P, Q)
        if any(any(r) for r in Y):
            return tup
    return None


class DiffOperator:
    """A k-linear map P -> Q with a certified order bound."""

    def __init__(self, P: FinModule, Q: FinModule, matrix, order: int | None = None, name=None):
        if P.A is not Q.A and P.A.to_json() != Q.A.to_json():
            raise DiffOpError("source and target are modules over different algebras")
        self.P, self.Q = P, Q
        self.A = P.A
        self.F = P.F
        self.matrix = [[P.F(x) for x in row] for row in matrix]
        if len(self.matrix) != Q.dim or any(len(r) != P.dim for r in self.matrix):
            raise DiffOpError("matrix shape does not match the modules")
        self.order = certified_order(self.matrix, P, Q) if order is None else order
        self.name = name

    def __call__(self, p):
        return matvec(self.matrix, p, self.F)

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        """self o other (other is applied first)."""
        if other.Q.dim != self.P.dim:
            raise DiffOpError("shape mismatch in composition")
        M = matmul(self.matrix, other.matrix, self.F) if other.matrix and self.matrix else \
            [[self.F.zero] * other.P.dim for _ in range(self.Q.dim)]
        return DiffOperator(other.P, self.Q, M)

    def delta(self, a) -> "DiffOperator":
        return DiffOperator(self.P, self.Q, delta_matrix(self.matrix, a, self.P, self.Q))

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.matrix)

    def __sub__(self, other):
        return DiffOperator(self.P, self.Q, _mat_sub(self.matrix, other.matrix, self.F))

    def __add__(self, other):
        F = self.F
        return DiffOperator(self.P, self.Q, [[F.norm(a + b) for a, b in zip(r, s)]
                                             for r, s in zip(self.matrix, other.matrix)])

    def vec(self) -> list:
        return [x for row in self.matrix for x in row]


def mult_operator(P: FinModule, a) -> DiffOperator:
    return DiffOperator(P, P, P.action(a), order=0)


def identity_operator(P: FinModule) -> DiffOperator:
    F = P.F
    return DiffOperator(P, P, [[F.one if i == j else F.zero for j in range(P.dim)] for i in range(P.dim)], order=0)


def delta(a, op):
    """delta_a applied to either backend."""
    if isinstance(op, NFOperator):
        return op.delta(a)
    return op.delta(a)


def _dual_delta(R, Pa, Qa, F):
    """Adjoint of delta_a on functionals: R -> R Pa^T - Qa^T R."""
    mQ, mP = len(Qa), len(Pa)
    out = [[F.zero] * mP for _ in range(mQ)]
    for r in range(mQ):
        Rr = R[r]
        nz = [(s, x) for s, x in enumerate(Rr) if x]
        for c in range(mP):
            Pc = Pa[c]
            v = sum((x * Pc[s] for s, x in nz), F.zero)
            out[r][c] = v
    for s in range(mQ):
        Qs = Qa[s]
        for r in range(mQ):
            q = Qa[r][s]
            if q:
                Rr = R[r]
                row = out[s]
                for c in range(mP):
                    if Rr[c]:
                        row[c] -= q * Rr[c]
    return [[F.norm(x) for x in row] for row in out]


def _as_sparse(R, mP):
    return {r * mP + c: x for r, row in enumerate(R) for c, x in enumerate(row) if x}


def _from_vec(v, mQ, mP):
    return [list(v[r * mP:(r + 1) * mP]) for r in range(mQ)]


def diff_constraints(P: FinModule, Q: FinModule, k: int, method: str = "multisets",
                     extra=None, budget: int | None = None) -> list:
    """Linear functionals (as mQ x mP matrices) cutting out Diff_k(P, Q).

    ``extra`` optionally replaces Diff_{-1} = 0 by the subspace cut out by
    the given functionals (used for constrained functor spaces).
    """
    F = P.F
    mP, mQ = P.dim, Q.dim
    A = P.A
    elems = _basis_elements(A)
    acts = [(P.action(a), Q.action(a)) for a in elems]
    if extra is None:
        base = [[[F.one if (r, c) == (i, j) else F.zero for c in range(mP)] for r in range(mQ)]
                for i in range(mQ) for j in range(mP)]
    else:
        base = list(extra)
    if k < 0:
        return base
    if budget is not None and len(elems) ** (k + 1) * len(base) > budget:
        raise BudgetError("delta-system exceeds budget", "budget")
    if method == "multisets":
        rows = []
        layer = {(): base}
        for size in range(1, k + 2):
            nxt = {}
            for tup, Rs in layer.items():
                start = tup[-1] if tup else 0
                for i in range(start, len(elems)):
                    Pa, Qa = acts[i]
                    nxt[tup + (i,)] = [_dual_delta(R, Pa, Qa, F) for R in Rs]
            layer = nxt
        for Rs in layer.values():
            rows.extend(Rs)
        return rows
    if method == "recursive":
        current = base
        for _ in range(k + 1):
            new = []
            for Pa, Qa in acts:
                new.extend(_dual_delta(R, Pa, Qa, F) for R in current)
            current = _reduce_functionals(new, mQ, mP, F)
        return current
    raise DiffOpError(f"unknown method {method!r}")


def _reduce_functionals(Rs, mQ, mP, F):
    rows = [[x for row in R for x in row] for R in Rs]
    rows = [r for r in rows if any(r)]
    if not rows:
        return []
    red = rref(rows, F, mQ * mP)[0]
    return [_from_vec(v, mQ, mP) for v in red]


class DiffSpace:
    """Diff_k(P, Q) as an explicit subspace of Hom_k(P, Q)."""

    def __init__(self, P: FinModule, Q: FinModule, k: int, method: str = "multisets",
                 constraints=None, extra=None):
        self.P, self.Q, self.k = P, Q, k
        self.A, self.F = P.A, P.F
        self.method = method
        mP, mQ = P.dim, Q.dim
        if constraints is None:
            constraints = diff_constraints(P, Q, k, method, extra)
        rows = [_as_sparse(R, mP) for R in constraints]
        self.vectors = kernel_from_sparse(rows, mP * mQ, self.F)
        self.coords = Coords(self.vectors, self.F, mP * mQ)
        self.dim = len(self.vectors)

    def matrices(self) -> list:
        return [_from_vec(v, self.Q.dim, self.P.dim) for v in self.vectors]

    def operators(self) -> list:
        return [DiffOperator(self.P, self.Q, M, order=None) for M in self.matrices()]

    def contains(self, X) -> bool:
        return self.coords.contains([x for row in X for x in row])

    def coordinates(self, X):
        return self.coords([x for row in X for x in row])

    def matrix_of(self, coeffs):
        return _from_vec(self.coords.combine(coeffs), self.Q.dim, self.P.dim)

    def module(self, side: str = "<") -> FinModule:
        """Diff_k(P, Q) with the left ('<', a_Q o X) or right ('>', X o a_P) structure."""
        A, F = self.A, self.F
        acts = []
        for i in range(A.dim):
            a = A.basis(i)
            cols = []
            for M in self.matrices():
                if side == "<":
                    Y = matmul(self.Q.action(a), M, F) if M and M[0] else M
                else:
                    Y = matmul(M, self.P.action(a), F) if M and M[0] else M
                c = self.coordinates(Y)
                if c is None:
                    raise InvariantError("Diff_k is not closed under the module action", (side, i))
                cols.append(c)
            acts.append([[cols[c][r] for c in range(self.dim)] for r in range(self.dim)])
        return FinModule(A, acts, name=f"Diff_{self.k}^{side}({self.P.name},{self.Q.name})",
                         validate=False)


def diff_space(A, P=None, Q=None, k: int = 1, method: str = "multisets"):
    """Diff_k(P, Q): a :class:`DiffSpace` (finite) or NF generators (polynomial)."""
    if isinstance(A, PolyAlgebra):
        return nf_diff_space(A, k)
    P = P if P is not None else A.regular_module()
    Q = Q if Q is not None else A.regular_module()
    return DiffSpace(P, Q, k, method)


def stabilization(P: FinModule, Q: FinModule, kmax: int | None = None) -> tuple:
    """(k*, Diff_{k*}) with Diff_k = Diff_{k*} for all k >= k*."""
    kmax = kmax if kmax is not None else P.dim * Q.dim + 1
    prev = DiffSpace(P, Q, 0, "recursive")
    for k in range(1, kmax + 1):
        cur = DiffSpace(P, Q, k, "recursive")
        if cur.dim == prev.dim:
            return k - 1, prev
        prev = cur
    raise BudgetError(f"Diff_k did not stabilize for k <= {kmax}", "order")


def unit_evaluation(S: DiffSpace) -> list:
    """Matrix of D_k^>: Diff_k(A, Q) -> Q, X -> X(1), in DiffSpace coordinates."""
    A = S.A
    cols = [matvec(M, A.unit, S.F) for M in S.matrices()]
    return [[cols[c][r] for c in range(S.dim)] for r in range(S.Q.dim)]


def co_jet(op: DiffOperator, k: int | None = None) -> dict:
    """h^D: P -> Diff_k^>(Q), p -> (a -> D(a p)), with the RusD triangle checked."""
    A, F = op.A, op.F
    k = op.order if k is None else k
    P, Q = op.P, op.Q
    target = DiffSpace(A.regular_module(), Q, k)
    cols = []
    for j in range(P.dim):
        p = P.basis(j)
        # column a_i -> D(a_i p)
        M = [[F.zero] * A.dim for _ in range(Q.dim)]
        for i in range(A.dim):
            img = op(P.apply(A.basis(i), p))
            for r in range(Q.dim):
                M[r][i] = img[r]
        c = target.coordinates(M)
        if c is None:
            raise InvariantError("h^D(p) is not of order <= k", j)
        cols.append(c)
    H = [[cols[c][r] for c in range(P.dim)] for r in range(target.dim)]
    ev = unit_evaluation(target)
    tri = matmul(ev, H, F) if H else [[F.zero] * P.dim for _ in range(Q.dim)]
    right = target.module(">")
    linear = all(matmul(H, P.act[i], F) == matmul(right.act[i], H, F) for i in range(A.dim)) if H else True
    homs = hom_space(P, right)
    dk = DiffSpace(P, Q, k)
    return {
        "h": H, "target": target, "triangle_ok": tri == op.matrix,
        "A_linear": linear, "dim_diff": dk.dim, "dim_hom": len(homs),
        "iso_dims_ok": dk.dim == len(homs),
    }


def _diff_module_space(M: FinModule, k: int) -> DiffSpace:
    """Diff_k(A, M) for a module M."""
    return DiffSpace(M.A.regular_module(), M, k, "recursive")


def prolong(op: DiffOperator, l: int, k: int | None = None) -> dict:
    """Prolongation h^D_l and c_{l,k}; checks the commutative diagrams exactly."""
    A, F = op.A, op.F
    k = op.order if k is None else k
    P, Q = op.P, op.Q
    Areg = A.regular_module()
    cj = co_jet(op, k)
    H, DkQ = cj["h"], cj["target"]
    DkQ_right = DkQ.module(">")
    DlP = DiffSpace(Areg, P, l, "recursive")
    DlDk = _diff_module_space(DkQ_right, l)           # Diff_l^>(Diff_k^> Q)
    Dkl = DiffSpace(Areg, Q, k + l, "recursive")       # Diff_{k+l}^> Q

    def h_of(phi_cols, source: DiffSpace, target_mod: FinModule, target_space: DiffSpace):
        """h^Phi for Phi: source-space -> target_mod given by columns; lands in target_space."""
        cols = []
        right = source.module(">")
        for j in range(source.dim):
            X = [[F.zero] * A.dim for _ in range(target_mod.dim)]
            for i in range(A.dim):
                aj = matvec(right.act[i], _unit(source.dim, j, F), F)
                img = matvec(phi_cols, aj, F)
                for r in range(target_mod.dim):
                    X[r][i] = img[r]
            c = target_space.coordinates(X)
            if c is None:
                raise InvariantError("prolongation leaves the expected Diff space", j)
            cols.append(c)
        return [[cols[c][r] for c in range(source.dim)] for r in range(target_space.dim)]

    evP = unit_evaluation(DlP)                                   # D_l^>: Diff_l P -> P
    phi = matmul(H, evP, F) if H and evP else [[F.zero] * DlP.dim for _ in range(DkQ.dim)]
    h_l = h_of(phi, DlP, DkQ_right, DlDk)                        # h^D_l
    evQ = unit_evaluation(DkQ)
    box = matmul(evQ, unit_evaluation(DlDk), F)                  # D_k o D_l
    c_lk = h_of(box, DlDk, Q, Dkl)
    Dl_op = matmul(op.matrix, evP, F)                            # D_(l) = D o D_l
    h_Dl = h_of(Dl_op, DlP, Q, Dkl)
    evDlDk = unit_evaluation(DlDk)
    evKL = unit_evaluation(Dkl)
    checks = {
        "h_pro": matmul(evDlDk, h_l, F) == matmul(H, evP, F),
        "d_l": matmul(evKL, h_Dl, F) == Dl_op,
        "comp": matmul(evKL, c_lk, F) == box,
        "h": matmul(c_lk, h_l, F) == h_Dl,
    }
    # h_*(box) = D o box on Diff_l P
    star = True
    for j, M in enumerate(DlP.matrices()):
        lhs = Dkl.matrix_of([row[j] for row in h_Dl])
        if lhs != matmul(op.matrix, M, F):
            star = False
    checks["h_star"] = star
    return {"h_l": h_l, "c_lk": c_lk, "h_Dl": h_Dl, "checks": checks,
            "dims": {"Diff_l P": DlP.dim, "Diff_l(Diff_k Q)": DlDk.dim, "Diff_k+l Q": Dkl.dim}}


def _unit(n, j, F):
    v = [F.zero] * n
    v[j] = F.one
    return v


def left_right_identity_order(P: FinModule, Q: FinModule, k: int) -> int | None:
    """Certified order of id: Diff_k^<(P,Q) -> Diff_k^>(P,Q)."""
    S = DiffSpace(P, Q, k, "recursive")
    L, R = S.module("<"), S.module(">")
    F = P.F
    I = [[F.one if i == j else F.zero for j in range(S.dim)] for i in range(S.dim)]
    return certified_order(I, L, R)


# ---------------------------------------------------------------------------
# localization of finite-backend operators

def localize_op(op, S, k: int | None = None, loc_P=None, loc_Q=None):
    """D_S(p/s) = sum_i (-1)^i C(k+1, i+1) D(s^i p) / s^(i+1).

    Returns a callable on fractions.  For polynomial operators fractions are
    RatExpr with denominators in S; for finite operators LocalizedElt.
    """
    k = op.order if k is None else k
    if isinstance(op, NFOperator):
        def apply(frac: RatExpr) -> RatExpr:
            p, s = frac.num, frac.den
            A = op.A
            num = MPoly(A.vars, A.F)
            for i in range(k + 1):
                c = (-1) ** i * binomial(k + 1, i + 1)
                num = num + op(s ** i * p) * s ** (k - i) * c
            return RatExpr(num, s ** (k + 1))
        return apply
    from .algpres import localize_module
    LP = loc_P or localize_module(op.P, S)
    LQ = loc_Q or localize_module(op.Q, S)
    A, F = op.A, op.F

    def apply_fin(x):
        p, s = x.num, x.den
        num = [F.zero] * op.Q.dim
        for i in range(k + 1):
            c = F((-1) ** i * binomial(k + 1, i + 1))
            term = op.Q.apply(A.power(s, k - i), op(op.P.apply(A.power(s, i), p)))
            num = [F.norm(u + c * w) for u, w in zip(num, term)]
        return LQ.frac(num, A.power(s, k + 1))
    return apply_fin


# ---------------------------------------------------------------------------
# normal-form backend

class NFOperator:
    """sum_alpha c_alpha(x) d^[alpha] with d^[a] x^n = C(n, a) x^(n-a) per variable.

    Coefficients stand to the left of the divided-power generators.
    """

    __slots__ = ("A", "terms")

    def __init__(self, A: PolyAlgebra, terms: dict | None = None):
        self.A = A
        self.terms = {}
        for a, c in (terms or {}).items():
            if not isinstance(c, MPoly):
                c = A.const(c)
            if not c.is_zero():
                self.terms[tuple(a)] = c

    @classmethod
    def mult(cls, A, f: MPoly):
        return cls(A, {(0,) * A.nvars: f})

    @classmethod
    def d(cls, A, alpha, coeff=None):
        """Divided-power generator d^[alpha] (times coeff)."""
        return cls(A, {tuple(alpha): coeff if coeff is not None else A.const(1)})

    @classmethod
    def from_weyl(cls, A, terms: dict):
        """Build from plain powers: c d^alpha = c alpha! d^[alpha]."""
        out = {}
        for a, c in terms.items():
            m = 1
            for ai in a:
                m *= factorial(ai)
            c = c if isinstance(c, MPoly) else A.const(c)
            out[tuple(a)] = c * m
        return cls(A, out)

    @property
    def F(self) -> Field:
        return self.A.F

    @property
    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, f: MPoly) -> MPoly:
        out = MPoly(self.A.vars, self.F)
        for a, c in self.terms.items():
            g = f
            for v, ai in zip(self.A.vars, a):
                if ai:
                    g = g.hasse(v, ai)
                    if g.is_zero():
                        break
            if not g.is_zero():
                out = out + c * g
        return out

    def apply_rational(self, r: RatExpr) -> RatExpr:
        """Classical action on rational functions by repeated partials (char 0)."""
        if self.F.p is not None:
            raise DiffOpError("rational action via partials needs characteristic 0")
        out = RatExpr.const(self.A.vars, self.F, 0)
        for a, c in self.terms.items():
            g = r
            scale = 1
            for v, ai in zip(self.A.vars, a):
                for _ in range(ai):
                    g = g.partial(v)
                scale *= factorial(ai)
            out = out + RatExpr(c) * g * RatExpr.const(self.A.vars, self.F, self.F.inv(scale))
        return out

    def _add(self, other, sign=1):
        t = dict(self.terms)
        for a, c in other.terms.items():
            v = t.get(a)
            nv = (v + c) if sign == 1 else (v - c) if v is not None else None
            if v is None:
                nv = c if sign == 1 else -c
            if nv.is_zero():
                t.pop(a, None)
            else:
                t[a] = nv
        return NFOperator(self.A, t)

    def __add__(self, other):
        return self._add(other, 1)

    def __sub__(self, other):
        return self._add(other, -1)

    def __neg__(self):
        return NFOperator(self.A, {a: -c for a, c in self.terms.items()})

    def scale(self, c):
        return NFOperator(self.A, {a: v * c for a, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, NFOperator) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def compose(self, other: "NFOperator") -> "NFOperator":
        """self o other via the divided-power Leibniz rule."""
        A, F = self.A, self.F
        out: dict = {}
        for a, f in self.terms.items():
            for b, g in other.terms.items():
                # d^[a] o g = sum_{gamma <= a} d^[gamma](g) d^[a - gamma]
                for gamma in _below(a):
                    dg = g
                    for v, gi in zip(A.vars, gamma):
                        if gi:
                            dg = dg.hasse(v, gi)
                            if dg.is_zero():
                                break
                    if dg.is_zero():
                        continue
                    rest = tuple(ai - gi for ai, gi in zip(a, gamma))
                    coef = 1
                    for ri, bi in zip(rest, b):
                        coef *= binomial(ri + bi, bi)
                    coef = F(coef)
                    if not coef:
                        continue
                    key = tuple(ri + bi for ri, bi in zip(rest, b))
                    term = f * dg * coef
                    out[key] = out[key] + term if key in out else term
        return NFOperator(A, out)

    def __mul__(self, other):
        return self.compose(other)

    def commutator(self, other):
        return self.compose(other) - other.compose(self)

    def delta(self, f) -> "NFOperator":
        """delta_f(D) = D o f - f o D."""
        m = NFOperator.mult(self.A, f)
        return self.compose(m) - m.compose(self)

    def top_part(self, k: int) -> dict:
        return {a: c for a, c in self.terms.items() if sum(a) == k}

    def certified_order(self) -> int:
        """Least k with delta-(k+1)-tuples of variables killing the operator."""
        if self.is_zero():
            return -1
        xs = [self.A.var(v) for v in self.A.vars]
        layer = [self]
        k = 0
        while True:
            nxt = []
            for D in layer:
                for x in xs:
                    E = D.delta(x)
                    if not E.is_zero() and E not in nxt:
                        nxt.append(E)
            if not nxt:
                return k
            layer = nxt
            k += 1
            if k > self.order + 1:
                raise InvariantError("delta-certificate exceeds normal-form order", repr(self))

    def matrix(self, D: int, Dout: int | None = None) -> tuple:
        """Matrix on monomials of degree <= D into monomials of degree <= Dout.

        Returns (matrix, source monomials, target monomials, truncated flag).
        """
        A = self.A
        shift = max((c.total_degree() - sum(a) for a, c in self.terms.items()), default=0)
        Dout = Dout if Dout is not None else max(D, D + shift)
        src = A.monomials(D)
        tgt = A.monomials(Dout)
        idx = {e: i for i, e in enumerate(tgt)}
        M = [[self.F.zero] * len(src) for _ in tgt]
        truncated = False
        for j, e in enumerate(src):
            img = self(A.mono(e))
            for e2, c in img.terms.items():
                if e2 in idx:
                    M[idx[e2]][j] = c
                else:
                    truncated = True
        return M, src, tgt, truncated

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for a in sorted(self.terms, key=lambda e: (sum(e), e), reverse=True):
            c = self.terms[a]
            gen = "*".join(f"d{v}^[{ai}]" if ai > 1 else f"d{v}" for v, ai in zip(self.A.vars, a) if ai)
            cs = repr(c)
            if not gen:
                parts.append(cs)
            elif cs == "1":
                parts.append(gen)
            else:
                parts.append(f"({cs})*{gen}")
        return " + ".join(parts)


def _below(a):
    if not a:
        yield ()
        return
    for g0 in range(a[0] + 1):
        for rest in _below(a[1:]):
            yield (g0,) + rest


def nf_diff_space(A: PolyAlgebra, k: int) -> list:
    """Generators d^[alpha], |alpha| <= k, of Diff_k(A) as a left A-module."""
    gens = []
    for e in A.monomials(k):
        gens.append(NFOperator.d(A, e))
    return gens


def evaluate_delta_tuple(apply, mult, elems: Sequence, p):
    """delta_{a_0..a_k}(D)(p) by inclusion-exclusion, for any backend.

    ``apply`` is D, ``mult(a, q)`` is the module action on either side.
    """
    from itertools import combinations
    k1 = len(elems)
    total = None
    for r in range(k1 + 1):
        for inner in combinations(range(k1), r):
            q = p
            for i in inner:
                q = mult(elems[i], q)
            img = apply(q)
            for i in range(k1):
                if i not in inner:
                    img = mult(elems[i], img)
            sign = (-1) ** (k1 - r)
            term = img if sign == 1 else _neg(img)
            total = term if total is None else _plus(total, term)
    return total


def _neg(x):
    if isinstance(x, list):
        return [-v for v in x]
    return -x


def _plus(x, y):
    if isinstance(x, list):
        return [u + v for u, v in zip(x, y)]
    return x + y
