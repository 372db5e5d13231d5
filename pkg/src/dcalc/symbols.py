"""Symbols of differential operators, the Poisson bracket and Hamiltonian fields.

Polynomial symbols are stored as ``{alpha: coefficient MPoly}`` where alpha is
the divided-power exponent of the fiber variables xi.  In characteristic 0,
xi^[alpha] = xi^alpha / alpha!, and :meth:`SymbolPoly.to_plain` converts to
ordinary polynomials in x and xi.
"""
from __future__ import annotations

from itertools import product as iproduct
from typing import Sequence

from .algpres import FinAlgebra, FinModule, PolyAlgebra
from .diffop import DiffSpace, NFOperator
from .exactcore import (
    BudgetError, Coords, ExactError, Field, InvariantError, MPoly, Quotient, RatExpr,
    binomial, factorial, kernel_basis, matmul, rank, solve,
)


class SymbolError(ExactError):
    pass


def fiber_names(A: PolyAlgebra) -> tuple:
    return tuple(f"xi_{v}" for v in A.vars)


class SymbolPoly:
    """Homogeneous (or general) symbol sum_alpha c_alpha(x) xi^[alpha]."""

    __slots__ = ("A", "terms")

    def __init__(self, A: PolyAlgebra, terms: dict | None = None):
        self.A = A
        self.terms = {}
        for a, c in (terms or {}).items():
            if not isinstance(c, MPoly):
                c = A.const(c)
            if not c.is_zero():
                self.terms[tuple(a)] = c

    @property
    def F(self) -> Field:
        return self.A.F

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, SymbolPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        t = dict(self.terms)
        for a, c in other.terms.items():
            t[a] = t[a] + c if a in t else c
        return SymbolPoly(self.A, t)

    def __neg__(self):
        return SymbolPoly(self.A, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return SymbolPoly(self.A, {a: v * c for a, v in self.terms.items()})

    def __mul__(self, other):
        F = self.F
        t: dict = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                m = 1
                for ai, bi in zip(a, b):
                    m *= binomial(ai + bi, ai)
                m = F(m)
                if not m:
                    continue
                key = tuple(ai + bi for ai, bi in zip(a, b))
                term = c * d * m
                t[key] = t[key] + term if key in t else term
        return SymbolPoly(self.A, t)

    def lift(self) -> NFOperator:
        """x^e xi^[alpha] -> x^e d^[alpha]; in char 0 this is x^e xi^b -> x^e d^b."""
        return NFOperator(self.A, dict(self.terms))

    def to_plain(self) -> MPoly:
        """Ordinary polynomial in x and xi (characteristic 0 only)."""
        A, F = self.A, self.F
        if F.p is not None:
            raise SymbolError("plain xi-powers need characteristic 0")
        vars_ = A.vars + fiber_names(A)
        out = MPoly(vars_, F)
        for a, c in self.terms.items():
            m = 1
            for ai in a:
                m *= factorial(ai)
            for e, v in c.terms.items():
                out = out + MPoly(vars_, F, {tuple(e) + tuple(a): v / m})
        return out

    @classmethod
    def from_plain(cls, A: PolyAlgebra, f: MPoly) -> "SymbolPoly":
        n = A.nvars
        t: dict = {}
        for e, v in f.terms.items():
            x, a = e[:n], e[n:]
            m = 1
            for ai in a:
                m *= factorial(ai)
            t.setdefault(tuple(a), A.const(0))
            t[tuple(a)] = t[tuple(a)] + MPoly(A.vars, A.F, {tuple(x): v * m})
        return cls(A, t)

    def evaluate_fiber(self, values: Sequence[MPoly]) -> MPoly:
        """Substitute xi_i -> values[i] (plain powers, characteristic 0)."""
        A, F = self.A, self.F
        out = A.const(0)
        for a, c in self.terms.items():
            term = c
            m = 1
            for ai, v in zip(a, values):
                term = term * v ** ai
                m *= factorial(ai)
            out = out + term * F.inv(m)
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for a in sorted(self.terms, key=lambda e: (sum(e), e), reverse=True):
            c = self.terms[a]
            gen = "*".join(f"xi_{v}^[{ai}]" if ai > 1 else f"xi_{v}" for v, ai in zip(self.A.vars, a) if ai)
            cs = repr(c)
            parts.append(cs if not gen else gen if cs == "1" else f"({cs})*{gen}")
        return " + ".join(parts)


def symbol(op, k: int | None = None):
    """Main symbol: top part of a normal form, or a coset for the matrix backend."""
    if isinstance(op, NFOperator):
        k = op.order if k is None else k
        if op.order > k:
            raise SymbolError(f"operator has order {op.order} > {k}")
        return SymbolPoly(op.A, op.top_part(k))
    raise SymbolError("use SymbolSpace for finite-dimensional operators")


def symbol_product(s: SymbolPoly, t: SymbolPoly) -> SymbolPoly:
    return s * t


def symbol_product_via_ops(s: SymbolPoly, t: SymbolPoly) -> SymbolPoly:
    """symbol(lift(s) o lift(t)) at order deg s + deg t."""
    if s.is_zero() or t.is_zero():
        return SymbolPoly(s.A)
    return symbol(s.lift().compose(t.lift()), s.degree + t.degree)


def poisson(s: SymbolPoly, t: SymbolPoly, k: int | None = None, l: int | None = None) -> SymbolPoly:
    """{s, t} = symbol_{k+l-1} of [lift s, lift t]."""
    k = s.degree if k is None else k
    l = t.degree if l is None else l
    if s.is_zero() or t.is_zero():
        return SymbolPoly(s.A)
    C = s.lift().commutator(t.lift())
    if C.order > k + l - 1:
        raise InvariantError("commutator does not drop order", (repr(s), repr(t), repr(C)))
    return SymbolPoly(s.A, C.top_part(k + l - 1))


def canonical_bracket(f: MPoly, g: MPoly, A: PolyAlgebra) -> MPoly:
    """sum_i df/dxi_i dg/dx_i - df/dx_i dg/dxi_i on plain polynomials."""
    out = MPoly(f.vars, f.F)
    for x, xi in zip(A.vars, fiber_names(A)):
        out = out + f.partial(xi) * g.partial(x) - f.partial(x) * g.partial(xi)
    return out


def canonical_bracket_check(f: MPoly, g: MPoly, A: PolyAlgebra) -> dict:
    """Compare the commutator bracket with the canonical one (char 0)."""
    if A.F.p is not None:
        raise SymbolError("canonical bracket check needs characteristic 0")
    s, t = SymbolPoly.from_plain(A, f), SymbolPoly.from_plain(A, g)
    lhs = poisson(s, t).to_plain()
    rhs = canonical_bracket(f, g, A)
    return {"ok": lhs == rhs, "poisson": repr(lhs), "canonical": repr(rhs),
            "lift_convention": "x^a xi^b -> x^a d^b (coefficients left)"}


def iterated_delta(op: NFOperator, f: MPoly, k: int) -> NFOperator:
    D = op
    for _ in range(k):
        D = D.delta(f)
    return D


def cotangent_pullback_check(op: NFOperator, f: MPoly, k: int | None = None) -> dict:
    """sigma_df^* smbl_k(D) = (1/k!) delta_f^k(D) as algebra elements."""
    A, F = op.A, op.F
    k = op.order if k is None else k
    if F.p is not None and F.p <= k:
        raise SymbolError(f"characteristic {F.p} divides {k}!")
    s = symbol(op, k)
    grads = [f.partial(v) for v in A.vars]
    lhs = s.evaluate_fiber(grads) if k > 0 else op(A.const(1))
    D = iterated_delta(op, f, k)
    if D.order > 0:
        raise InvariantError("delta_f^k(D) is not of order 0", repr(D))
    rhs = D(A.const(1)) * F.inv(factorial(k))
    return {"ok": lhs == rhs, "lhs": repr(lhs), "rhs": repr(rhs), "k": k}


def hamiltonian_field(s: SymbolPoly):
    """X_s = {s, .} as a callable on symbols."""
    def X(t: SymbolPoly) -> SymbolPoly:
        return poisson(s, t)
    return X


def check_derivation(X, elements: Sequence) -> tuple:
    """Leibniz X(ab) = X(a) b + a X(b) on all pairs; returns (ok, witness)."""
    for a in elements:
        for b in elements:
            if X(a * b) != X(a) * b + a * X(b):
                return False, (repr(a), repr(b))
    return True, None


def localized_symbol(s: SymbolPoly) -> dict:
    """iota_smbl: coefficients viewed as fractions."""
    return {a: RatExpr(c) for a, c in s.terms.items()}


def localized_product(u: dict, v: dict, F: Field) -> dict:
    out: dict = {}
    for a, c in u.items():
        for b, d in v.items():
            m = 1
            for ai, bi in zip(a, b):
                m *= binomial(ai + bi, ai)
            if not F(m):
                continue
            key = tuple(ai + bi for ai, bi in zip(a, b))
            term = c * d * F(m)
            out[key] = out[key] + term if key in out else term
    return {a: c for a, c in out.items() if not c.is_zero()}


def localized_equal(u: dict, v: dict) -> bool:
    keys = set(u) | set(v)
    for a in keys:
        x, y = u.get(a), v.get(a)
        if x is None:
            if not y.is_zero():
                return False
        elif y is None:
            if not x.is_zero():
                return False
        elif x != y:
            return False
    return True


# ---------------------------------------------------------------------------
# finite-dimensional symbol spaces

class SymbolSpace:
    """Smbl_k(P, Q) = Diff_k / Diff_{k-1} for finite modules."""

    def __init__(self, P: FinModule, Q: FinModule, k: int):
        self.P, self.Q, self.k = P, Q, k
        self.F = P.F
        self.top = DiffSpace(P, Q, k, "recursive")
        self.low = DiffSpace(P, Q, k - 1, "recursive") if k > 0 else None
        rels = [self.top.coords(v) for v in self.low.vectors] if self.low else []
        self.quot = Quotient(self.top.dim, rels, self.F)
        self.dim = self.quot.dim

    def __call__(self, X):
        c = self.top.coordinates(X)
        if c is None:
            raise SymbolError(f"operator is not of order <= {self.k}")
        return tuple(self.quot.reduce(c))

    def lift(self, s) -> list:
        return self.top.matrix_of(self.quot.lift(list(s)))

    def basis(self) -> list:
        return [tuple(self.F.one if i == j else self.F.zero for j in range(self.dim)) for i in range(self.dim)]

    def side_actions_agree(self) -> bool:
        A, F = self.P.A, self.F
        for i in range(A.dim):
            a = A.basis(i)
            for s in self.basis():
                X = self.lift(s)
                left = matmul(self.Q.action(a), X, F)
                right = matmul(X, self.P.action(a), F)
                if self(left) != self(right):
                    return False
        return True


def fin_symbol_product(spaces: dict, k: int, l: int, s, t):
    """Product Smbl_k x Smbl_l -> Smbl_{k+l} via composition of lifts (P = Q)."""
    F = spaces[k].F
    X, Y = spaces[k].lift(s), spaces[l].lift(t)
    return spaces[k + l](matmul(X, Y, F))


def fin_poisson(spaces: dict, k: int, l: int, s, t):
    F = spaces[k].F
    X, Y = spaces[k].lift(s), spaces[l].lift(t)
    C = [[F.norm(a - b) for a, b in zip(r1, r2)] for r1, r2 in zip(matmul(X, Y, F), matmul(Y, X, F))]
    m = k + l - 1
    if m < 0:
        if any(any(r) for r in C):
            raise InvariantError("commutator of order-0 operators is nonzero", (s, t))
        return ()
    return spaces[m](C)


# ---------------------------------------------------------------------------
# symbol-spectrum explorer over F_p[x]

class WeylOp:
    """Abstract Weyl algebra element sum c_{a,b} x^a d^b (normal order), any characteristic."""

    __slots__ = ("F", "terms")

    def __init__(self, F: Field, terms: dict):
        self.F = F
        self.terms = {k: F(v) for k, v in terms.items() if F(v)}

    def __mul__(self, other):
        F = self.F
        out: dict = {}
        for (a, b), c in self.terms.items():
            for (cc, d), e in other.terms.items():
                # d^b x^cc = sum_j j! C(b,j) C(cc,j) x^(cc-j) d^(b-j)
                for j in range(min(b, cc) + 1):
                    m = F(factorial(j) * binomial(b, j) * binomial(cc, j))
                    if not m:
                        continue
                    key = (a + cc - j, b - j + d)
                    out[key] = F.norm(out.get(key, 0) + c * e * m)
        return WeylOp(F, out)

    def __sub__(self, other):
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = self.F.norm(t.get(k, 0) - v)
        return WeylOp(self.F, t)

    def order(self) -> int:
        return max((b for _, b in self.terms), default=-1)


class _SymbolAlgebra:
    """Graded symbol algebra of F_p[x] under a named construction.

    Elements: {(a, b): c} meaning x^a phi_b with phi_b the degree-b fiber
    basis element (plain xi^b or divided xi^[b]).
    """

    CONSTRUCTIONS = ("divided_powers", "plain_powers_acting", "weyl_symbols")

    def __init__(self, F: Field, construction: str):
        if construction not in self.CONSTRUCTIONS:
            raise SymbolError(f"unknown construction {construction!r}")
        self.F, self.kind = F, construction
        self.p = F.p
        self.A = PolyAlgebra(F, ["x"])

    def fiber_coeff(self, i: int, j: int):
        """phi_i * phi_j = coeff * phi_{i+j}."""
        if self.kind == "divided_powers":
            return self.F(binomial(i + j, i))
        if self.kind == "plain_powers_acting":
            return self.F.one if i + j < self.p else self.F.zero
        return self.F.one

    def fiber_alive(self, b: int) -> bool:
        return not (self.kind == "plain_powers_acting" and b >= self.p)

    def norm(self, t: dict) -> dict:
        F = self.F
        return {k: F.norm(v) for k, v in t.items() if F.norm(v) and self.fiber_alive(k[1])}

    def mul(self, s: dict, t: dict) -> dict:
        out: dict = {}
        for (a, b), c in s.items():
            for (cc, d), e in t.items():
                m = self.fiber_coeff(b, d)
                if m:
                    key = (a + cc, b + d)
                    out[key] = out.get(key, 0) + c * e * m
        return self.norm(out)

    def _homogeneous_parts(self, s: dict) -> dict:
        parts: dict = {}
        for (a, b), c in s.items():
            parts.setdefault(b, {})[(a, b)] = c
        return parts

    def bracket(self, s: dict, t: dict) -> dict:
        """Commutator bracket on homogeneous parts, extended bilinearly."""
        out: dict = {}
        for k, sk in self._homogeneous_parts(s).items():
            for l, tl in self._homogeneous_parts(t).items():
                for key, v in self._bracket_h(sk, k, tl, l).items():
                    out[key] = out.get(key, 0) + v
        return self.norm(out)

    def _bracket_h(self, s: dict, k: int, t: dict, l: int) -> dict:
        F, A = self.F, self.A
        m = k + l - 1
        if m < 0:
            return {}
        if self.kind == "weyl_symbols":
            S = WeylOp(F, s)
            T = WeylOp(F, t)
            C = S * T - T * S
            if C.order() > m:
                raise InvariantError("Weyl commutator does not drop order", (s, t))
            return {key: v for key, v in C.terms.items() if key[1] == m}
        # operators acting on F_p[x]
        def lift(u):
            terms = {}
            for (a, b), c in u.items():
                w = c if self.kind == "divided_powers" else F(c * factorial(b))
                terms[(b,)] = terms.get((b,), A.const(0)) + MPoly(A.vars, F, {(a,): w})
            return NFOperator(A, terms)
        C = lift(s).commutator(lift(t))
        if C.order > m:
            raise InvariantError("commutator does not drop order", (s, t))
        out = {}
        for (b,), c in C.top_part(m).items():
            if self.kind == "divided_powers":
                for (a,), v in c.terms.items():
                    out[(a, b)] = v
            else:
                f = F(factorial(b))
                if not f:
                    raise SymbolError("bracket leaves the span of plain powers")
                for (a,), v in c.terms.items():
                    out[(a, b)] = F.norm(v * F.inv(f))
        return out

    def points(self, B: int, budget: int | None = None) -> list:
        """F_p-points stable under enlarging the fiber truncation.

        Candidate values v_b = h(phi_b), b <= pB, must satisfy
        v_i v_j = c_ij v_{i+j} whenever i + j <= pB; the reported points are
        restrictions to b <= B.  The margin pB covers p-th powers of every
        fiber basis element of degree <= B.
        """
        p, F = self.p, self.F
        top = max(2, p) * B
        sols = []
        from .exactcore import get_budget
        limit = get_budget(budget)
        visited = [0]

        def extend(vals):
            visited[0] += 1
            if visited[0] > limit:
                raise BudgetError("symbol point search exceeds budget", "budget")
            b = len(vals)
            if b > top:
                sols.append(tuple(vals))
                return
            for v in range(p):
                if not self.fiber_alive(b) and v:
                    continue
                ok = True
                for i in range(1, b):
                    j = b - i
                    if F.norm(vals[i] * vals[j] - self.fiber_coeff(i, j) * v):
                        ok = False
                        break
                if ok:
                    extend(vals + [v])
        extend([F.one])
        restricted = sorted({s[:B + 1] for s in sols})
        return [(x,) + r[1:] for x in range(p) for r in restricted]

    def evaluate(self, h: tuple, s: dict):
        F = self.F
        x = h[0]
        return F.norm(sum((c * pow(x, a) * (h[b] if b else 1) for (a, b), c in s.items()), F.zero))


def _match_lie_table(consts, target, F: Field):
    """Find an invertible change of basis carrying ``consts`` to ``target`` (dim 3 brute force)."""
    n = len(consts)
    p = F.p

    def bracket(c, u, v):
        out = [F.zero] * n
        for i in range(n):
            for j in range(n):
                if u[i] and v[j]:
                    for k in range(n):
                        out[k] = F.norm(out[k] + u[i] * v[j] * c[i][j][k])
        return out

    for entries in iproduct(range(p), repeat=n * n):
        M = [list(entries[r * n:(r + 1) * n]) for r in range(n)]   # rows: new basis in old coords
        if rank(M, F) < n:
            continue
        ok = True
        MT = [[M[r][c] for r in range(n)] for c in range(n)]
        for i in range(n):
            for j in range(n):
                lhs = bracket(consts, M[i], M[j])
                rhs = [F.norm(sum(target[i][j][k] * M[k][c] for k in range(n))) for c in range(n)]
                if lhs != rhs:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return M
    return None


TARGET_TABLE = {(0, 1): (0, 0, 0), (0, 2): (1, 0, 0), (1, 2): (0, 1, 0)}


def _table_from_pairs(pairs, n, F):
    c = [[[F.zero] * n for _ in range(n)] for _ in range(n)]
    for (i, j), v in pairs.items():
        for k in range(n):
            c[i][j][k] = F(v[k])
            c[j][i][k] = F.norm(-F(v[k]))
    return c


def symbol_spectrum_explorer(p: int = 2, B: int = 2, D: int = 4, constructions=None,
                             budget: int | None = None) -> dict:
    """Spectrum and Hamiltonian Lie algebra of Smbl F_p[x] under each candidate construction."""
    from .exactcore import GF, get_budget
    if p > 3 or B > 4 or D > 8:
        raise BudgetError("explorer limited to p <= 3, B <= 4, D <= 8", "budget")
    F = GF(p)
    limit = get_budget(budget)
    constructions = constructions or list(_SymbolAlgebra.CONSTRUCTIONS)
    target = _table_from_pairs(TARGET_TABLE, 3, F)
    report = {"p": p, "B": B, "D": D, "candidates": {}}
    for name in constructions:
        S = _SymbolAlgebra(F, name)
        pts = S.points(B, limit)
        # geometrize: minimal-degree representatives of point functions
        monos = sorted(((a, b) for a in range(D + 1) for b in range(B + 1) if S.fiber_alive(b)),
                       key=lambda ab: (ab[0] + ab[1], ab[1], ab[0]))
        chosen, rows = [], []
        for m in monos:
            vec = [S.evaluate(h, {m: 1}) for h in pts]
            if rank(rows + [vec], F) > len(rows):
                rows.append(vec)
                chosen.append(m)
            if len(rows) == len(pts):
                break
        # Hamiltonian fields X_s = {s, .} tested on the generators x, phi_1..phi_B
        tests = [{(1, 0): 1}] + [{(0, b): 1} for b in range(1, B + 1) if S.fiber_alive(b)]
        keys = sorted({(a, b) for a in range(D + 2) for b in range(B + 2)})

        def field_vec(s):
            vec = []
            for g in tests:
                r = S.bracket(s, g)
                vec.extend(F.norm(r.get(k, 0)) for k in keys)
            return vec
        fields, field_reps = [], []
        for m in chosen:
            v = field_vec({m: 1})
            if any(v) and rank(fields + [v], F) > len(fields):
                fields.append(v)
                field_reps.append(m)
        n = len(fields)
        consts, closed = None, True
        if n:
            consts = [[None] * n for _ in range(n)]
            cols = [[fields[c][r] for c in range(n)] for r in range(len(fields[0]))]
            for i in range(n):
                for j in range(n):
                    si, sj = {field_reps[i]: 1}, {field_reps[j]: 1}
                    vec = []
                    for g in tests:
                        u = S.bracket(si, S.bracket(sj, g))
                        w = S.bracket(sj, S.bracket(si, g))
                        vec.extend(F.norm(u.get(k, 0) - w.get(k, 0)) for k in keys)
                    sol = solve(cols, vec, F)
                    if sol is None:
                        closed = False
                        sol = [None] * n
                    consts[i][j] = sol
        match = None
        if n == 3 and closed:
            match = _match_lie_table(consts, target, F)
        reproduces = len(pts) == 4 and match is not None
        report["candidates"][name] = {
            "points": [list(h) for h in pts],
            "n_points": len(pts),
            "geometrized_hamiltonians": [_mono_name(m, name) for m in chosen],
            "hamiltonian_field_reps": [_mono_name(m, name) for m in field_reps],
            "lie_dim": n,
            "closed": closed,
            "structure_constants": [[[str(x) for x in c] if c[0] is not None else None for c in row]
                                    for row in consts] if consts else [],
            "basis_change_to_target": match,
            "reproduces_target": reproduces,
        }
    report["passing"] = [k for k, v in report["candidates"].items() if v["reproduces_target"]]
    return report


def _mono_name(m, construction):
    a, b = m
    xs = "" if a == 0 else "x" if a == 1 else f"x^{a}"
    if b == 0:
        fs = ""
    elif construction == "divided_powers":
        fs = "xi" if b == 1 else f"xi^[{b}]"
    else:
        fs = "xi" if b == 1 else f"xi^{b}"
    return "*".join(s for s in (xs, fs) if s) or "1"
