"""k-points, basic opens, induced maps, ghosts, tangent vectors and nilpotent flows."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Callable, Sequence

from .algpres import FinAlgebra, FinModule, PolyAlgebra, QuotPres
from .exactcore import (
    BudgetError, Coords, ExactError, MPoly, factorial, get_budget, intersect,
    kernel_basis, matmul, matvec, row_space,
)


class SpectrumError(ExactError):
    pass


@dataclass(frozen=True)
class SpecPoint:
    """A unital homomorphism h: A -> k.

    ``values`` are h on the basis (finite algebras) or on the generators
    (polynomial presentations).
    """

    values: tuple

    def __call__(self, A, a):
        return evaluate(A, self, a)

    def to_json(self):
        return [str(v) for v in self.values]


@dataclass(frozen=True)
class TangentVector:
    point: SpecPoint
    values: tuple

    def __call__(self, A, a):
        """xi(a); for polynomial presentations a is an MPoly."""
        F = A.F
        if isinstance(A, FinAlgebra):
            return F.norm(sum((x * c for x, c in zip(self.values, a)), F.zero))
        total = F.zero
        for i, v in enumerate(A.vars):
            if self.values[i]:
                total = F.norm(total + self.values[i] * a.partial(v).evaluate(self.point.values))
        return total

    def to_json(self):
        return {"point": self.point.to_json(), "values": [str(v) for v in self.values]}


def _arity(A) -> int:
    return A.dim if isinstance(A, FinAlgebra) else len(A.vars)


def evaluate(A, h: SpecPoint, a):
    F = A.F
    if isinstance(A, FinAlgebra):
        return F.norm(sum((x * c for x, c in zip(h.values, a)), F.zero))
    return a.evaluate(h.values)


def check_point(A, values) -> SpecPoint | None:
    """Return the point if ``values`` define a unital homomorphism, else None."""
    values = tuple(A.F(v) for v in values)
    if len(values) != _arity(A):
        raise SpectrumError(f"expected {_arity(A)} values, got {len(values)}")
    F = A.F
    if isinstance(A, FinAlgebra):
        h = SpecPoint(values)
        if evaluate(A, h, A.unit) != F.one:
            return None
        for i in range(A.dim):
            for j in range(i, A.dim):
                if evaluate(A, h, A.table[i][j]) != F.norm(values[i] * values[j]):
                    return None
        return h
    for r in A.relations():
        if r.evaluate(values):
            return None
    return SpecPoint(values)


def enumerate_spectrum(A, budget: int | None = None) -> list:
    """All k-points of A over a prime field, in lexicographic order of values."""
    F = A.F
    if F.p is None:
        raise SpectrumError("enumeration over the rationals is undefined; use check_point")
    n = _arity(A)
    limit = get_budget(budget)
    if F.p ** n > limit:
        raise BudgetError(f"{F.p}^{n} candidates exceed budget {limit}", "budget")
    if isinstance(A, FinAlgebra):
        # h(unit) = 1 prunes nothing structurally, so just filter
        return [h for v in iproduct(range(F.p), repeat=n) if (h := check_point(A, v))]
    rels = A.relations()
    return [SpecPoint(tuple(v)) for v in iproduct(range(F.p), repeat=n)
            if all(not r.evaluate(v) for r in rels)]


def basic_open(A, a, points=None):
    """(predicate h -> h(a) != 0, explicit point list when enumerable)."""
    def pred(h):
        return bool(evaluate(A, h, a))
    if points is None and A.F.p is not None:
        points = enumerate_spectrum(A)
    return pred, ([h for h in points if pred(h)] if points is not None else None)


# ---------------------------------------------------------------------------
# homomorphisms

class AlgHom:
    """Unital homomorphism between presentations.

    Finite algebras: ``images`` is the list of images of basis vectors.
    Polynomial presentations: ``images`` is one MPoly (in the target's
    variables) per source variable.
    """

    def __init__(self, source, target, images, validate=True):
        self.source, self.target = source, target
        self.images = list(images)
        if validate:
            bad = self.violations()
            if bad:
                raise SpectrumError(f"not an algebra homomorphism: {bad[0]}")

    def violations(self) -> list:
        S, T = self.source, self.target
        out = []
        if isinstance(S, FinAlgebra):
            if self(S.unit) != T.unit:
                out.append(("unit",))
            for i in range(S.dim):
                for j in range(i, S.dim):
                    if self(S.table[i][j]) != T.mul(self.images[i], self.images[j]):
                        out.append(("multiplicativity", i, j))
            return out
        if len(self.images) != len(S.vars):
            return [("arity",)]
        for r in S.relations():
            img = r.substitute(self.images)
            if isinstance(T, QuotPres):
                img = T.reduce(img)
            if not img.is_zero():
                out.append(("relation", repr(r)))
        return out

    def __call__(self, a):
        S, T = self.source, self.target
        if isinstance(S, FinAlgebra):
            F = T.F
            out = [F.zero] * T.dim
            for c, img in zip(a, self.images):
                if c:
                    out = [F.norm(x + c * y) for x, y in zip(out, img)]
            return out
        return a.substitute(self.images)

    def compose(self, other: "AlgHom") -> "AlgHom":
        """self o other."""
        return AlgHom(other.source, self.target, [self(img) for img in other.images], validate=False)


def induced_map(H: AlgHom) -> Callable:
    """|H|: Spec(target) -> Spec(source), h -> h o H."""
    S = H.source

    def spec_map(h: SpecPoint) -> SpecPoint:
        if isinstance(S, FinAlgebra):
            return SpecPoint(tuple(evaluate(H.target, h, img) for img in H.images))
        return SpecPoint(tuple(evaluate(H.target, h, img) for img in H.images))
    return spec_map


# ---------------------------------------------------------------------------
# ghosts and support

@dataclass
class GhostReport:
    basis: list
    geometric: bool | None
    status: str
    points: list = field(default_factory=list)
    support: list = field(default_factory=list)
    truncated: bool = False

    def to_json(self):
        return {
            "ghost_basis": [[str(x) for x in v] if isinstance(v, list) else repr(v) for v in self.basis],
            "ghost_dim": len(self.basis),
            "geometric": self.geometric,
            "status": self.status,
            "points": [h.to_json() for h in self.points],
            "support": [h.to_json() for h in self.support],
            "truncated": self.truncated,
        }


def ghosts(A, points=None, D: int | None = None) -> GhostReport:
    """Ghost(A) = intersection of ker h over the given (or enumerated) points."""
    F = A.F
    if points is None:
        if F.p is None:
            return GhostReport([], None, "insufficient points")
        points = enumerate_spectrum(A)
    if isinstance(A, FinAlgebra):
        M = [list(h.values) for h in points]
        ker = kernel_basis(M, F, A.dim) if M else [A.basis(i) for i in range(A.dim)]
        return GhostReport(ker, not ker, "ok", points)
    if isinstance(A, QuotPres) and A.basis is not None:
        B = A.to_fin_algebra()
        M = [[A.base.mono(b).evaluate(h.values) for b in A.basis] for h in points]
        ker = kernel_basis(M, F, B.dim) if M else [B.basis(i) for i in range(B.dim)]
        polys = [MPoly(A.vars, F, {b: c for b, c in zip(A.basis, v)}) for v in ker]
        return GhostReport(polys, not ker, "ok", points)
    base = A.base if isinstance(A, QuotPres) else A
    D = base.D if D is None else D
    monos = base.monomials(D)
    M = [[base.mono(e).evaluate(h.values) for e in monos] for h in points]
    ker = kernel_basis(M, F, len(monos)) if M else []
    polys = [MPoly(base.vars, F, {e: c for e, c in zip(monos, v)}) for v in ker]
    return GhostReport(polys, not polys, "ok", points, truncated=True)


def _mu_h_P(P: FinModule, h: SpecPoint) -> list:
    """Basis of mu_h P = span{(a - h(a)) p}."""
    A, F = P.A, P.F
    vecs = []
    for i in range(A.dim):
        a = A.basis(i)
        shifted = [F.norm(x - evaluate(A, h, a) * u) for x, u in zip(a, A.unit)]
        Ma = P.action(shifted)
        for j in range(P.dim):
            vecs.append([Ma[r][j] for r in range(P.dim)])
    return row_space(vecs, F) if vecs else []


def module_ghosts(P: FinModule, points=None) -> GhostReport:
    A, F = P.A, P.F
    if points is None:
        if F.p is None:
            return GhostReport([], None, "insufficient points")
        points = enumerate_spectrum(A)
    current = [P.basis(j) for j in range(P.dim)]
    support = []
    for h in points:
        mu = _mu_h_P(P, h)
        if len(mu) < P.dim:
            support.append(h)
        current = intersect(current, mu, P.dim, F) if mu else []
    return GhostReport(current, not current, "ok", points, support)


def induce_module(H: AlgHom, Q: FinModule) -> FinModule:
    """Q viewed as a module over H.source via a * q = H(a) q."""
    S = H.source
    return FinModule(S, [Q.action(img) for img in H.images], name=f"{Q.name} via H")


# ---------------------------------------------------------------------------
# tangent vectors

def tangent_space(A, h: SpecPoint) -> list:
    F = A.F
    if isinstance(A, FinAlgebra):
        n = A.dim
        rows = []
        for i in range(n):
            for j in range(i, n):
                row = list(A.table[i][j])
                row[i] = F.norm(row[i] - h.values[j])
                row[j] = F.norm(row[j] - h.values[i])
                rows.append(row)
        return [TangentVector(h, tuple(v)) for v in kernel_basis(rows, F, n)]
    J = jacobian_at(A, h)
    n = len(A.vars)
    ker = kernel_basis(J, F, n) if J else [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]
    return [TangentVector(h, tuple(v)) for v in ker]


def jacobian_at(A, h: SpecPoint) -> list:
    return [[r.partial(v).evaluate(h.values) for v in A.vars] for r in A.relations()]


# ---------------------------------------------------------------------------
# flows

@dataclass
class Flow:
    endo: AlgHom
    t: object
    nilpotency: int
    method: str
    naive_is_hom: bool | None = None
    naive_witness: object = None
    truncated: bool = False


def _poly_derivation(A: PolyAlgebra, field_images: Sequence[MPoly]):
    def X(f: MPoly) -> MPoly:
        out = MPoly(A.vars, A.F)
        for v, c in zip(A.vars, field_images):
            if not c.is_zero():
                out = out + c * f.partial(v)
        return out
    return X


def derivation_nilpotency(A: PolyAlgebra, field_images, bound: int | None = None) -> int | None:
    """Least m with X^m = 0 on all monomials of degree <= D, or None."""
    X = _poly_derivation(A, field_images)
    bound = bound if bound is not None else A.D + 2
    current = [A.mono(e) for e in A.monomials()]
    for m in range(1, bound + 1):
        current = [X(f) for f in current]
        if all(f.is_zero() for f in current):
            return m
    return None


def nilpotent_flow(A, X, t) -> Flow:
    """exp(tX) for a nilpotent derivation X.

    Polynomial algebras: X is given by the images of the variables.  The
    divided-power exponential is used, so a constant-coefficient field gives
    the substitution x_i -> x_i + t c_i in every characteristic.
    Finite algebras: X is a derivation matrix.
    """
    F = A.F
    t = F(t)
    if isinstance(A, FinAlgebra):
        return _fin_flow(A, X, t)
    images = [c if isinstance(c, MPoly) else A.const(c) for c in X]
    m = derivation_nilpotency(A, images)
    if m is None:
        raise SpectrumError("derivation is not nilpotent within the truncation bound")
    Xop = _poly_derivation(A, images)
    if all(c.is_const() for c in images):
        # the truncated series sum t^j X^j / j! is reported for comparison
        naive_ok, witness = _check_series_hom(A, Xop, t, m, F)
        subs = [A.var(v) + c * t for v, c in zip(A.vars, images)]
        endo = AlgHom(A, A, subs)
        return Flow(endo, t, m, "divided-power exponential", naive_ok, witness, truncated=True)
    p = F.p
    if p is not None and m > p:
        raise SpectrumError(f"exp(tX) needs X^{p} = 0 to avoid division by {p}")

    def series(f):
        out, term = MPoly(A.vars, F), f
        for j in range(m):
            out = out + term * (t ** j * F.inv(factorial(j)))
            term = Xop(term)
        return out
    endo = AlgHom(A, A, [series(A.var(v)) for v in A.vars])
    ok, wit = _check_series_hom(A, Xop, t, m, F)
    if not ok:
        raise SpectrumError(f"exp(tX) is not multiplicative: witness {wit}")
    return Flow(endo, t, m, "exponential series", truncated=True)


def _check_series_hom(A: PolyAlgebra, Xop, t, m, F):
    """Is sum_{j<m} t^j X^j / j! multiplicative on monomial pairs of degree <= D?"""
    def series(f):
        out, term = MPoly(A.vars, F), f
        for j in range(m):
            try:
                inv = F.inv(factorial(j))
            except ZeroDivisionError:
                break
            out = out + term * (t ** j * inv)
            term = Xop(term)
        return out
    monos = A.monomials(A.D // 2)
    for e1 in monos:
        for e2 in monos:
            f, g = A.mono(e1), A.mono(e2)
            if series(f * g) != series(f) * series(g):
                return False, (repr(f), repr(g))
    return True, None


def _fin_flow(A: FinAlgebra, X, t) -> Flow:
    F, n = A.F, A.dim
    for i in range(n):
        for j in range(n):
            lhs = matvec(X, A.table[i][j], F)
            rhs = [F.norm(u + w) for u, w in zip(A.mul(matvec(X, A.basis(i), F), A.basis(j)),
                                                   A.mul(A.basis(i), matvec(X, A.basis(j), F)))]
            if lhs != rhs:
                raise SpectrumError(f"X is not a derivation on ({i}, {j})")
    power = [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]
    powers = [power]
    m = None
    for k in range(1, n + 2):
        power = matmul(X, power, F)
        if not any(any(r) for r in power):
            m = k
            break
        powers.append(power)
    if m is None:
        raise SpectrumError("derivation is not nilpotent (X^m != 0 for m <= dim + 1)")
    if F.p is not None and m > F.p:
        raise SpectrumError(f"exp(tX) needs X^{F.p} = 0 to avoid division by {F.p}")
    E = [[F.zero] * n for _ in range(n)]
    for j, Pj in enumerate(powers):
        c = F.norm(t ** j * F.inv(factorial(j)))
        E = [[F.norm(E[r][s] + c * Pj[r][s]) for s in range(n)] for r in range(n)]
    imgs = [[E[r][i] for r in range(n)] for i in range(n)]
    endo = AlgHom(A, A, imgs)
    return Flow(endo, t, m, "exponential series")
