"""Presentations of commutative unital algebras, their modules, and localization.

Three carriers are supported:

* :class:`FinAlgebra` - finite-dimensional, given by structure constants;
* :class:`PolyAlgebra` - a free polynomial algebra with a truncation degree
  used whenever a finite carrier is needed;
* :class:`QuotPres` - a polynomial algebra modulo relations, either a
  univariate principal ideal or a user-supplied monomial basis.

Algebra and module elements of finite carriers are coordinate lists.
"""
from __future__ import annotations

from itertools import combinations_with_replacement, product as iproduct
from typing import Sequence

from .exactcore import (
    QQ, Coords, ExactError, Field, GF, MPoly, Quotient, RatExpr,
    identity, kernel_basis, matmul, matvec, solve, vadd, vscale,
)


class AlgebraError(ExactError):
    """Raised for invalid presentations; ``violations`` lists witnesses."""

    def __init__(self, msg, violations=None):
        super().__init__(msg)
        self.violations = violations or []


# ---------------------------------------------------------------------------
# finite-dimensional algebras

class FinAlgebra:
    """Commutative unital algebra with basis e_0..e_{n-1}.

    ``table[i][j]`` is the coordinate vector of e_i * e_j.
    """

    def __init__(self, F: Field, table, unit, labels=None, name=None, validate=True):
        self.F = F
        n = len(table)
        self.dim = n
        self.table = [[[F(x) for x in table[i][j]] for j in range(n)] for i in range(n)]
        self.unit = [F(x) for x in unit]
        self.labels = list(labels) if labels else [f"e{i}" for i in range(n)]
        self.name = name or f"FinAlgebra(dim={n})"
        # L[i] is the matrix of multiplication by e_i
        self.L = [[[self.table[i][j][k] for j in range(n)] for k in range(n)] for i in range(n)]
        if validate:
            bad = self.violations()
            if bad:
                raise AlgebraError(f"invalid structure constants: {bad[0]}", bad)

    def violations(self, limit: int = 50) -> list:
        n, F, T = self.dim, self.F, self.table
        out = []
        if len(self.unit) != n or any(len(r) != n or any(len(v) != n for v in r) for r in T):
            return [("shape", n)]
        for i in range(n):
            for j in range(i + 1, n):
                if T[i][j] != T[j][i]:
                    out.append(("commutativity", i, j))
        for i in range(n):
            if self.mul(self.unit, self.basis(i)) != self.basis(i):
                out.append(("unit", i))
        for i, j, k in iproduct(range(n), repeat=3):
            if self.mul(T[i][j], self.basis(k)) != self.mul(self.basis(i), T[j][k]):
                out.append(("associativity", i, j, k))
                if len(out) >= limit:
                    break
        return out

    # elements
    def basis(self, i: int) -> list:
        v = [self.F.zero] * self.dim
        v[i] = self.F.one
        return v

    def zero(self) -> list:
        return [self.F.zero] * self.dim

    def one(self) -> list:
        return list(self.unit)

    def scalar(self, c) -> list:
        return vscale(self.F(c), self.unit, self.F)

    def mul_matrix(self, a) -> list:
        n, F = self.dim, self.F
        M = [[F.zero] * n for _ in range(n)]
        for i, c in enumerate(a):
            if c:
                Li = self.L[i]
                for r in range(n):
                    row, Lr = M[r], Li[r]
                    for s in range(n):
                        if Lr[s]:
                            row[s] = F.norm(row[s] + c * Lr[s])
        return M

    def mul(self, a, b) -> list:
        F, n = self.F, self.dim
        out = [F.zero] * n
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                xy = x * y
                for k, c in enumerate(self.table[i][j]):
                    if c:
                        out[k] = F.norm(out[k] + xy * c)
        return out

    def add(self, a, b) -> list:
        return vadd(a, b, self.F)

    def sub(self, a, b) -> list:
        return [self.F.norm(x - y) for x, y in zip(a, b)]

    def power(self, a, k: int) -> list:
        r = self.one()
        for _ in range(k):
            r = self.mul(r, a)
        return r

    def is_zero(self, a) -> bool:
        return not any(a)

    def inverse(self, a):
        """Multiplicative inverse of a, or None."""
        x = solve(self.mul_matrix(a), self.unit, self.F)
        return x

    def unit_index(self):
        """Index of a basis vector equal to the unit, if any."""
        for i in range(self.dim):
            if self.basis(i) == self.unit:
                return i
        return None

    def regular_module(self) -> "FinModule":
        return FinModule(self, self.L, name=f"{self.name} (regular)", validate=False)

    def free_module(self, r: int) -> "FinModule":
        n, F = self.dim, self.F
        acts = []
        for i in range(n):
            M = [[F.zero] * (n * r) for _ in range(n * r)]
            for b in range(r):
                for x in range(n):
                    for y in range(n):
                        M[b * n + x][b * n + y] = self.L[i][x][y]
            acts.append(M)
        return FinModule(self, acts, name=f"{self.name}^{r}", validate=False)

    def fmt(self, a) -> str:
        parts = []
        for c, lab in zip(a, self.labels):
            if c:
                parts.append(lab if c == 1 else f"{c}*{lab}")
        return " + ".join(parts) or "0"

    def to_json(self) -> dict:
        return {
            "field": self.F.to_json(), "kind": "structure_constants", "dim": self.dim,
            "labels": self.labels,
            "table": [[[str(x) for x in v] for v in row] for row in self.table],
            "unit": [str(x) for x in self.unit],
        }

    def __repr__(self):
        return self.name


def make_fin_algebra(F: Field, table, unit, labels=None, name=None) -> FinAlgebra:
    """Validated constructor; raises :class:`AlgebraError` listing violations."""
    return FinAlgebra(F, table, unit, labels=labels, name=name)


def truncated_poly(F: Field, m: int, var: str = "x") -> FinAlgebra:
    """k[x]/(x^m) with basis 1, x, ..., x^(m-1)."""
    table = [[[1 if (i + j == k and i + j < m) else 0 for k in range(m)] for j in range(m)]
             for i in range(m)]
    labels = ["1"] + [var if i == 1 else f"{var}^{i}" for i in range(1, m)]
    return FinAlgebra(F, table, [1] + [0] * (m - 1), labels, name=f"{F!r}[{var}]/({var}^{m})")


def dual_numbers(F: Field = QQ) -> FinAlgebra:
    A = truncated_poly(F, 2, "eps")
    A.name = f"{F!r}[eps]"
    return A


def ground_field(F: Field = QQ) -> FinAlgebra:
    return FinAlgebra(F, [[[1]]], [1], ["1"], name=f"{F!r}")


def boolean_algebra(n: int) -> FinAlgebra:
    """F_2^n with componentwise product (a Boolean ring)."""
    table = [[[1 if i == j == k else 0 for k in range(n)] for j in range(n)] for i in range(n)]
    return FinAlgebra(GF(2), table, [1] * n, [f"b{i}" for i in range(n)], name=f"GF(2)^{n}")


def product_algebra(A: FinAlgebra, B: FinAlgebra) -> FinAlgebra:
    if A.F != B.F:
        raise AlgebraError("field mismatch")
    n, m = A.dim, B.dim
    N = n + m
    table = [[[0] * N for _ in range(N)] for _ in range(N)]
    for i in range(n):
        for j in range(n):
            table[i][j][:n] = A.table[i][j]
    for i in range(m):
        for j in range(m):
            table[n + i][n + j][n:] = B.table[i][j]
    return FinAlgebra(A.F, table, list(A.unit) + list(B.unit),
                      [f"{l}'" for l in A.labels] + [f"{l}''" for l in B.labels],
                      name=f"{A.name} x {B.name}")


def quotient_algebra(A: FinAlgebra, ideal_vectors) -> tuple:
    """A / I for I spanned by ``ideal_vectors`` (closed under A-multiplication here).

    Returns (algebra, Quotient helper).
    """
    F = A.F
    gens = []
    for v in ideal_vectors:
        for i in range(A.dim):
            gens.append(A.mul(A.basis(i), v))
    Qh = Quotient(A.dim, gens, F)
    d = Qh.dim
    table = [[Qh.reduce(A.mul(Qh.lift(_e(i, d, F)), Qh.lift(_e(j, d, F)))) for j in range(d)]
             for i in range(d)]
    labels = [A.labels[j] for j in Qh.free]
    B = FinAlgebra(F, table, Qh.reduce(A.unit), labels, name=f"{A.name}/I")
    return B, Qh


def _e(i, n, F):
    v = [F.zero] * n
    v[i] = F.one
    return v


# ---------------------------------------------------------------------------
# modules

class FinModule:
    """Finite-dimensional module: ``act[i]`` is the matrix of e_i acting."""

    def __init__(self, A: FinAlgebra, act, name=None, validate=True):
        self.A = A
        self.F = A.F
        self.act = [[[A.F(x) for x in row] for row in M] for M in act]
        self.dim = len(self.act[0]) if self.act else 0
        self.name = name or f"module(dim={self.dim})"
        if validate:
            bad = self.violations()
            if bad:
                raise AlgebraError(f"invalid module action: {bad[0]}", bad)

    def violations(self) -> list:
        A, F = self.A, self.F
        out = []
        if len(self.act) != A.dim:
            return [("arity", len(self.act), A.dim)]
        if self.action(A.unit) != identity(self.dim, F):
            out.append(("unit",))
        for i in range(A.dim):
            for j in range(i, A.dim):
                lhs = matmul(self.act[i], self.act[j], F) if self.dim else []
                if lhs != self.action(A.table[i][j]):
                    out.append(("compatibility", i, j))
        return out

    def action(self, a) -> list:
        F, m = self.F, self.dim
        M = [[F.zero] * m for _ in range(m)]
        for i, c in enumerate(a):
            if c:
                Ai = self.act[i]
                for r in range(m):
                    row, Ar = M[r], Ai[r]
                    for s in range(m):
                        if Ar[s]:
                            row[s] = F.norm(row[s] + c * Ar[s])
        return M

    def apply(self, a, p) -> list:
        return matvec(self.action(a), p, self.F)

    def basis(self, i: int) -> list:
        return _e(i, self.dim, self.F)

    def zero(self) -> list:
        return [self.F.zero] * self.dim

    def __repr__(self):
        return self.name


def zero_module(A: FinAlgebra) -> FinModule:
    return FinModule(A, [[] for _ in range(A.dim)], name="0", validate=False)


def submodule(P: FinModule, vectors) -> tuple:
    """Submodule spanned by ``vectors`` (A-closure taken).  Returns (module, Coords)."""
    F = P.F
    gens = []
    for v in vectors:
        for i in range(P.A.dim):
            gens.append(P.apply(P.A.basis(i), v))
    from .exactcore import row_space
    basis = row_space(gens, F) if gens else []
    C = Coords(basis, F, P.dim)
    act = [[C(matvec(P.act[i], b, F)) for b in basis] for i in range(P.A.dim)]
    act = [[[act[i][c][r] for c in range(len(basis))] for r in range(len(basis))] for i in range(P.A.dim)]
    return FinModule(P.A, act, name=f"sub({P.name})", validate=False), C


def quotient_module(P: FinModule, vectors) -> tuple:
    """P / (A-span of vectors).  Returns (module, Quotient helper)."""
    F = P.F
    gens = []
    for v in vectors:
        for i in range(P.A.dim):
            gens.append(P.apply(P.A.basis(i), v))
    Qh = Quotient(P.dim, gens, F)
    d = Qh.dim
    act = []
    for i in range(P.A.dim):
        cols = [Qh.reduce(P.apply(P.A.basis(i), Qh.lift(_e(j, d, F)))) for j in range(d)]
        act.append([[cols[c][r] for c in range(d)] for r in range(d)])
    return FinModule(P.A, act, name=f"{P.name}/N", validate=False), Qh


def hom_space(P: FinModule, Q: FinModule) -> list:
    """Basis of Hom_A(P, Q) as dim Q x dim P matrices."""
    F = P.F
    mP, mQ = P.dim, Q.dim
    N = mP * mQ
    rows = []
    for i in range(P.A.dim):
        Pa, Qa = P.act[i], Q.act[i]
        # (phi Pa - Qa phi)[r][c] = sum_s phi[r][s] Pa[s][c] - Qa[r][s] phi[s][c]
        for r in range(mQ):
            for c in range(mP):
                row = {}
                for s in range(mP):
                    if Pa[s][c]:
                        k = r * mP + s
                        row[k] = F.norm(row.get(k, 0) + Pa[s][c])
                for s in range(mQ):
                    if Qa[r][s]:
                        k = s * mP + c
                        row[k] = F.norm(row.get(k, 0) - Qa[r][s])
                if any(row.values()):
                    rows.append(row)
    from .exactcore import kernel_from_sparse
    vecs = kernel_from_sparse(rows, N, F)
    return [[v[r * mP:(r + 1) * mP] for r in range(mQ)] for v in vecs]


# ---------------------------------------------------------------------------
# polynomial presentations

class PolyAlgebra:
    """Free polynomial algebra k[x_1..x_n]; ``D`` bounds finite carriers."""

    def __init__(self, F: Field, vars: Sequence[str], D: int = 8):
        if D < 1:
            raise AlgebraError("truncation degree must be at least 1")
        self.F = F
        self.vars = tuple(vars)
        self.D = D
        self.name = f"{F!r}[{','.join(self.vars)}]"

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def var(self, name: str) -> MPoly:
        return MPoly.var(self.vars, self.F, name)

    def const(self, c) -> MPoly:
        return MPoly.const(self.vars, self.F, c)

    def monomials(self, D: int | None = None) -> list:
        """Exponent tuples of total degree <= D, ascending in graded-lex order."""
        D = self.D if D is None else D
        out = []
        n = self.nvars
        for d in range(D + 1):
            level = []
            for combo in combinations_with_replacement(range(n), d):
                e = [0] * n
                for i in combo:
                    e[i] += 1
                level.append(tuple(e))
            out.extend(sorted(level))
        return out

    def mono(self, e) -> MPoly:
        return MPoly.monomial(self.vars, self.F, e)

    def relations(self) -> list:
        return []

    def truncated_carrier(self, D: int | None = None) -> FinAlgebra:
        """k[x]/m^(D+1) - an honest algebra agreeing with k[x] in degrees <= D."""
        D = self.D if D is None else D
        monos = self.monomials(D)
        idx = {e: i for i, e in enumerate(monos)}
        n = len(monos)
        table = []
        for e1 in monos:
            row = []
            for e2 in monos:
                v = [0] * n
                e = tuple(a + b for a, b in zip(e1, e2))
                if e in idx:
                    v[idx[e]] = 1
                row.append(v)
            table.append(row)
        unit = [1] + [0] * (n - 1)
        labels = [repr(self.mono(e)) for e in monos]
        return FinAlgebra(self.F, table, unit, labels, name=f"{self.name}/m^{D + 1}", validate=False)

    def __repr__(self):
        return self.name


class QuotPres:
    """Quotient of a PolyAlgebra by relations.

    A monomial basis is derived automatically for a univariate principal
    ideal with invertible leading coefficient; otherwise the caller may
    supply ``basis`` (exponent tuples) and ``reduction`` (exponent tuple of
    any product of two basis monomials -> MPoly in basis monomials).
    """

    def __init__(self, base: PolyAlgebra, relations: Sequence[MPoly], basis=None, reduction=None):
        self.base = base
        self.F = base.F
        self.vars = base.vars
        self.rels = [r for r in relations if not r.is_zero()]
        self.basis = [tuple(b) for b in basis] if basis is not None else None
        self.reduction = reduction
        if self.basis is None and base.nvars == 1 and len(self.rels) == 1:
            f = self.rels[0]
            d = f.total_degree()
            if d >= 1:
                self.basis = [(i,) for i in range(d)]
        self.name = f"{base.name}/({', '.join(map(repr, self.rels))})"

    def relations(self) -> list:
        return self.rels

    def reduce(self, f: MPoly) -> MPoly:
        """Normal form of f in the span of the basis monomials."""
        if self.basis is None:
            raise AlgebraError("no monomial basis available for this quotient")
        if self.base.nvars == 1 and len(self.rels) == 1 and self.reduction is None:
            return _univariate_rem(f, self.rels[0])
        return self._table_reduce(f)

    def _table_reduce(self, f: MPoly) -> MPoly:
        bset = set(self.basis)
        out = MPoly(self.vars, self.F)
        work = dict(f.terms)
        guard = 0
        while work:
            guard += 1
            if guard > 10 ** 5:
                raise AlgebraError("reduction table does not terminate")
            e = max(work, key=lambda t: (sum(t), t))
            c = work.pop(e)
            if e in bset:
                out = out + MPoly(self.vars, self.F, {e: c})
                continue
            # split e = b1 + rest with b1 a basis monomial of maximal degree
            rep = None
            if self.reduction is not None:
                rep = self.reduction.get(e)
            if rep is None:
                raise AlgebraError(f"reduction table has no entry for {e}")
            for e2, c2 in rep.terms.items():
                v = self.F.norm(work.get(e2, 0) + c * c2)
                if v:
                    work[e2] = v
                else:
                    work.pop(e2, None)
        return out

    def to_fin_algebra(self) -> FinAlgebra:
        if self.basis is None:
            raise AlgebraError("no monomial basis available for this quotient")
        B = self.basis
        idx = {b: i for i, b in enumerate(B)}
        n = len(B)
        table = []
        for b1 in B:
            row = []
            for b2 in B:
                prod = self.reduce(self.base.mono(b1) * self.base.mono(b2))
                v = [self.F.zero] * n
                for e, c in prod.terms.items():
                    v[idx[e]] = c
                row.append(v)
            table.append(row)
        unit_poly = self.reduce(self.base.const(1))
        unit = [self.F.zero] * n
        for e, c in unit_poly.terms.items():
            unit[idx[e]] = c
        labels = [repr(self.base.mono(b)) for b in B]
        return FinAlgebra(self.F, table, unit, labels, name=self.name)

    def __repr__(self):
        return self.name


def _univariate_rem(f: MPoly, g: MPoly) -> MPoly:
    F = f.F
    dg = g.total_degree()
    lead = g.terms[(dg,)]
    inv = F.inv(lead)
    r = dict(f.terms)
    while r:
        d = max(e[0] for e in r)
        if d < dg:
            break
        c = F.norm(r.pop((d,)) * inv)
        for (e,), gc in g.terms.items():
            if e == dg:
                continue
            k = (e + d - dg,)
            v = F.norm(r.get(k, 0) - c * gc)
            if v:
                r[k] = v
            else:
                r.pop(k, None)
    return MPoly(f.vars, F, r)


def poly_quotient(F: Field, var: str, coeffs: Sequence) -> QuotPres:
    """k[var]/(f) with f given by ascending coefficient list."""
    base = PolyAlgebra(F, [var])
    f = MPoly(base.vars, F, {(i,): c for i, c in enumerate(coeffs)})
    return QuotPres(base, [f])


# ---------------------------------------------------------------------------
# multiplicative sets and localization

class MultSet:
    """Multiplicative set generated by finitely many algebra elements."""

    def __init__(self, A, generators):
        self.A = A
        self.gens = list(generators)
        if isinstance(A, FinAlgebra):
            # For Artinian A, 0 lies in S iff (prod gens)^(dim+1) vanishes.
            g = A.one()
            for s in self.gens:
                g = A.mul(g, s)
            self.s_big = A.power(g, A.dim + 1)
            if A.is_zero(self.s_big):
                raise AlgebraError("0 belongs to the multiplicative set", [("zero_in_S", self.gens)])
        else:
            for s in self.gens:
                if s.is_zero():
                    raise AlgebraError("0 belongs to the multiplicative set", [("zero_in_S", s)])
            self.s_big = None

    def elements(self, max_len: int):
        """Products of generators with total length <= max_len (FinAlgebra only)."""
        A = self.A
        seen = []
        for L in range(max_len + 1):
            for combo in combinations_with_replacement(range(len(self.gens)), L):
                s = A.one()
                for i in combo:
                    s = A.mul(s, self.gens[i])
                if s not in seen:
                    seen.append(s)
        return seen


class LocalizedElt:
    """A formal fraction num/den with den in S."""

    __slots__ = ("loc", "num", "den")

    def __init__(self, loc, num, den):
        self.loc, self.num, self.den = loc, num, den

    def __eq__(self, other):
        return self.loc.equivalent(self, other)

    def __add__(self, other):
        return self.loc.add(self, other)

    def __mul__(self, other):
        return self.loc.mul(self, other)

    def __repr__(self):
        return f"({self.num})/({self.den})"


class LocalizedFin:
    """S^-1 A (or S^-1 P) for finite-dimensional A.

    Fractions are compared with the fraction relation; the canonical form
    lives in the quotient P / ker(s_big), isomorphic to the localization.
    """

    def __init__(self, A: FinAlgebra, S: MultSet, P: FinModule | None = None):
        self.A, self.S = A, S
        self.P = P if P is not None else A.regular_module()
        self.is_algebra = P is None
        F = A.F
        Sb = self.P.action(S.s_big)
        kernel = kernel_basis(Sb, F, self.P.dim)
        self.kernel = kernel
        self.module, self.Qh = quotient_module(self.P, kernel) if kernel else (self.P, Quotient(self.P.dim, [], F))
        self.dim = self.module.dim
        if self.is_algebra:
            self.algebra, _ = quotient_algebra(A, kernel) if kernel else (A, None)

    def frac(self, num, den=None) -> LocalizedElt:
        return LocalizedElt(self, list(num), list(den) if den is not None else self.A.one())

    def iota(self, a) -> LocalizedElt:
        return self.frac(a)

    def _kills(self, v) -> bool:
        return not any(self.P.apply(self.S.s_big, v))

    def equivalent(self, x: LocalizedElt, y: LocalizedElt) -> bool:
        F = self.A.F
        d = [F.norm(u - w) for u, w in zip(self.P.apply(y.den, x.num), self.P.apply(x.den, y.num))]
        return self._kills(d)

    def equivalent_bruteforce(self, x: LocalizedElt, y: LocalizedElt, max_len: int | None = None) -> bool:
        """Oracle: search for an explicit s in S killing a1 s2 - a2 s1."""
        F = self.A.F
        d = [F.norm(u - w) for u, w in zip(self.P.apply(y.den, x.num), self.P.apply(x.den, y.num))]
        L = max_len if max_len is not None else self.A.dim + 1
        return any(not any(self.P.apply(s, d)) for s in self.S.elements(L))

    def add(self, x, y) -> LocalizedElt:
        num = vadd(self.P.apply(y.den, x.num), self.P.apply(x.den, y.num), self.A.F)
        return LocalizedElt(self, num, self.A.mul(x.den, y.den))

    def mul(self, x, y) -> LocalizedElt:
        if self.is_algebra:
            return LocalizedElt(self, self.A.mul(x.num, y.num), self.A.mul(x.den, y.den))
        # (a/s)(p/t) with x an algebra fraction and y a module fraction
        return LocalizedElt(self, self.P.apply(x.num, y.num), self.A.mul(x.den, y.den))

    def canonical(self, x: LocalizedElt) -> list:
        """Coordinates of x in the quotient model P / ker(s_big)."""
        F = self.A.F
        den_action = [self.Qh.reduce(self.P.apply(x.den, self.Qh.lift(_e(j, self.dim, F))))
                      for j in range(self.dim)]
        M = [[den_action[c][r] for c in range(self.dim)] for r in range(self.dim)]
        y = solve(M, self.Qh.reduce(x.num), F)
        if y is None:
            raise AlgebraError("denominator does not act invertibly on the quotient model")
        return y

    def is_iso(self) -> bool:
        return not self.kernel


class LocalizedPoly:
    """S^-1 k[x] for S generated by nonzero polynomials (an integral domain)."""

    def __init__(self, A: PolyAlgebra, S: MultSet):
        self.A, self.S = A, S

    def frac(self, num: MPoly, den: MPoly | None = None) -> RatExpr:
        return RatExpr(num, den if den is not None else self.A.const(1))

    def iota(self, a: MPoly) -> RatExpr:
        return RatExpr(a)

    def equivalent(self, x: RatExpr, y: RatExpr) -> bool:
        return x == y

    def in_S(self, s: MPoly, max_len: int = 12) -> bool:
        for L in range(max_len + 1):
            for combo in combinations_with_replacement(range(len(self.S.gens)), L):
                t = self.A.const(1)
                for i in combo:
                    t = t * self.S.gens[i]
                if (t - s).is_zero():
                    return True
        return False


def localize_algebra(A, S: MultSet):
    if isinstance(A, FinAlgebra):
        return LocalizedFin(A, S)
    if isinstance(A, PolyAlgebra):
        return LocalizedPoly(A, S)
    raise AlgebraError(f"cannot localize {type(A).__name__}")


def localize_module(P, S: MultSet):
    if isinstance(P, FinModule):
        return LocalizedFin(P.A, S, P)
    if isinstance(P, PolyAlgebra):
        return LocalizedPoly(P, S)
    raise AlgebraError(f"cannot localize {type(P).__name__}")
