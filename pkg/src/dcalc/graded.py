"""Graded commutative algebras, graded DOs, dioles, algebroids and connections."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .algpres import FinAlgebra, FinModule
from .diffop import DiffSpace
from .exactcore import (
    ExactError, Field, InvariantError, kernel_basis, kernel_from_sparse, matmul, matvec, rref,
)


class GradedError(ExactError):
    pass


GROUPS = ("Z", "Z2", "ZxZ2")


def _canon(G, g):
    if G == "Z":
        return int(g)
    if G == "Z2":
        return int(g) % 2
    if G == "ZxZ2":
        return (int(g[0]), int(g[1]) % 2)
    raise GradedError(f"unsupported grading group {G!r}")


def _gadd(G, g, h):
    if G == "ZxZ2":
        return _canon(G, (g[0] + h[0], g[1] + h[1]))
    return _canon(G, g + h)


def _gneg(G, g):
    if G == "ZxZ2":
        return _canon(G, (-g[0], -g[1]))
    return _canon(G, -g)


def _gzero(G):
    return (0, 0) if G == "ZxZ2" else 0


def parity_beta(G):
    if G == "ZxZ2":
        return lambda g, h: (g[0] * h[0] + g[1] * h[1]) % 2
    return lambda g, h: (g * h) % 2


def trivial_beta(g, h):
    return 0


class GradedAlgebra:
    """Finite-dimensional G-graded algebra with homogeneous basis and sign form β."""

    def __init__(self, F: Field, table, unit, degrees, G: str = "Z2", beta="parity",
                 labels=None, name="A", validate=True):
        self.F, self.G = F, G
        self.table = [[[F(x) for x in v] for v in row] for row in table]
        self.unit = [F(x) for x in unit]
        self.dim = len(self.unit)
        self.degrees = [_canon(G, g) for g in degrees]
        if beta == "parity":
            self.beta: Callable = parity_beta(G)
        elif beta == "trivial":
            self.beta = trivial_beta
        else:
            self.beta = beta
        self.labels = labels or [f"e{i}" for i in range(self.dim)]
        self.name = name
        self.L = [[[self.table[i][c][r] for c in range(self.dim)] for r in range(self.dim)]
                  for i in range(self.dim)]
        if validate:
            bad = self.violations()
            if bad:
                raise GradedError(f"invalid graded algebra: {bad[0]}")

    def sign(self, g, h):
        return self.F.one if self.beta(g, h) % 2 == 0 else self.F(-1)

    def basis(self, i):
        v = [self.F.zero] * self.dim
        v[i] = self.F.one
        return v

    def mul(self, u, v):
        F = self.F
        out = [F.zero] * self.dim
        for i, x in enumerate(u):
            if x:
                for j, y in enumerate(v):
                    if y:
                        for k, z in enumerate(self.table[i][j]):
                            if z:
                                out[k] = F.norm(out[k] + x * y * z)
        return out

    def left_matrix(self, a):
        F = self.F
        cols = [self.mul(a, self.basis(j)) for j in range(self.dim)]
        return [[cols[c][r] for c in range(self.dim)] for r in range(self.dim)]

    def violations(self) -> list:
        F, n, G = self.F, self.dim, self.G
        out = []
        degs = sorted(set(self.degrees), key=repr)
        for g in degs:
            for h in degs:
                for k in degs:
                    if self.beta(_gadd(G, g, h), k) % 2 != (self.beta(g, k) + self.beta(h, k)) % 2:
                        out.append(("beta_not_biadditive", g, h, k))
        for i in range(n):
            e = self.basis(i)
            if self.mul(self.unit, e) != e or self.mul(e, self.unit) != e:
                out.append(("unit", i))
            for j in range(n):
                ab, ba = self.mul(e, self.basis(j)), self.mul(self.basis(j), e)
                s = self.sign(self.degrees[i], self.degrees[j])
                if ba != [F.norm(s * x) for x in ab]:
                    out.append(("beta_commutativity", i, j))
                target = _gadd(G, self.degrees[i], self.degrees[j])
                for k, x in enumerate(ab):
                    if x and self.degrees[k] != target:
                        out.append(("grading", i, j, k))
                for k in range(n):
                    lhs = self.mul(self.mul(e, self.basis(j)), self.basis(k))
                    rhs = self.mul(e, self.mul(self.basis(j), self.basis(k)))
                    if lhs != rhs:
                        out.append(("associativity", i, j, k))
        return out

    def regular_module(self) -> "GradedModule":
        return GradedModule(self, [self.left_matrix(self.basis(i)) for i in range(self.dim)],
                            list(self.degrees), name=self.name)

    @classmethod
    def trivially_graded(cls, A: FinAlgebra, G: str = "Z") -> "GradedAlgebra":
        return cls(A.F, A.table, A.unit, [_gzero(G)] * A.dim, G, "trivial", A.labels, A.name)


@dataclass
class GradedModule:
    A: GradedAlgebra
    act: list
    degrees: list
    name: str = "P"

    @property
    def dim(self):
        return len(self.degrees)

    @property
    def F(self):
        return self.A.F

    def action(self, a):
        F = self.F
        M = [[F.zero] * self.dim for _ in range(self.dim)]
        for i, x in enumerate(a):
            if x:
                for r in range(self.dim):
                    for c in range(self.dim):
                        if self.act[i][r][c]:
                            M[r][c] = F.norm(M[r][c] + x * self.act[i][r][c])
        return M


def graded_super_line(F: Field) -> GradedAlgebra:
    """k[θ] with θ odd and θ² = 0."""
    table = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
    return GradedAlgebra(F, table, [1, 0], [0, 1], "Z2", "parity", ["1", "theta"], "k[theta]")


# ---------------------------------------------------------------------------
# graded differential operators

@dataclass
class GradedDiffSpace:
    P: GradedModule
    Q: GradedModule
    k: int
    vectors: list
    vector_degrees: list
    by_degree: dict

    @property
    def dim(self):
        return len(self.vectors)

    def matrices(self):
        mP = self.P.dim
        return [[v[r * mP:(r + 1) * mP] for r in range(self.Q.dim)] for v in self.vectors]

    def degree_dims(self) -> dict:
        return {h: len(b) for h, b in self.by_degree.items()}


def _support(P, Q, h, G):
    return [r * P.dim + c for r in range(Q.dim) for c in range(P.dim)
            if Q.degrees[r] == _gadd(G, P.degrees[c], h)]


def graded_diff_space(A: GradedAlgebra, P: GradedModule | None = None, Q: GradedModule | None = None,
                      k: int = 1, derivations: bool = False) -> GradedDiffSpace:
    """Homogeneous operators with δ_{a_0..a_k} = 0, δ_a(Δ) = Δ∘a_P - (-1)^{aΔ} a_Q∘Δ."""
    P = P if P is not None else A.regular_module()
    Q = Q if Q is not None else A.regular_module()
    F, G = A.F, A.G
    mP, mQ = P.dim, Q.dim
    N = mP * mQ
    hs = sorted({_gadd(G, Q.degrees[r], _gneg(G, P.degrees[c])) for r in range(mQ) for c in range(mP)},
                key=repr)
    supp = {h: _support(P, Q, h, G) for h in hs}
    elems = [i for i in range(A.dim) if A.basis(i) != A.unit]
    acts = [(P.act[i], Q.act[i], A.degrees[i]) for i in elems]
    # annihilators of Diff_{-1}(h) = 0 inside V_h: all coordinate functionals
    ann = {h: [{j: F.one} for j in supp[h]] for h in hs}
    spaces = {}
    for level in range(k + 1):
        spaces = {}
        for h in hs:
            s = set(supp[h])
            rows = []
            for Pa, Qa, da in acts:
                h2 = _gadd(G, h, da)
                if h2 not in ann:
                    continue
                sg = A.sign(da, h)
                for phi in ann[h2]:
                    row = {}
                    # <R, Δ Pa - s Qa Δ> = <R Pa^T - s Qa^T R, Δ>
                    for j, x in phi.items():
                        r, c = divmod(j, mP)
                        for c2 in range(mP):
                            y = Pa[c2][c]
                            if y and r * mP + c2 in s:
                                key = r * mP + c2
                                row[key] = F.norm(row.get(key, 0) + x * y)
                        for r2 in range(mQ):
                            y = Qa[r][r2]
                            if y and r2 * mP + c in s:
                                key = r2 * mP + c
                                row[key] = F.norm(row.get(key, 0) - sg * x * y)
                    row = {j: x for j, x in row.items() if x}
                    if row:
                        rows.append(row)
            # restrict unknowns to the support
            outside = [{j: F.one} for j in range(N) if j not in s]
            spaces[h] = kernel_from_sparse(rows + outside, N, F)
        ann = {}
        for h in hs:
            sp = supp[h]
            if not spaces[h]:
                ann[h] = [{j: F.one} for j in sp]
                continue
            local = [[v[j] for j in sp] for v in spaces[h]]
            ker = kernel_basis(local, F, len(sp))
            ann[h] = [{sp[i]: x for i, x in enumerate(f) if x} for f in ker]
    if derivations:
        unit = A.unit
        for h in hs:
            if spaces[h]:
                basis = spaces[h]
                # kernel of the unit evaluation restricted to the space
                evals = [[sum((v[r * mP + c] * unit[c] for c in range(mP)), F.zero) for v in basis]
                         for r in range(mQ)]
                coeffs = kernel_basis(evals, F, len(basis))
                vecs = [[F.norm(sum((cf[i] * basis[i][j] for i in range(len(basis))), F.zero))
                         for j in range(N)] for cf in coeffs]
                spaces[h] = rref(vecs, F, N)[0] if vecs else []
    by_degree = {h: spaces[h] for h in hs if spaces[h]}
    tagged = [(v, h) for h in hs for v in spaces[h]]
    tagged.sort(key=lambda t: next(j for j, x in enumerate(t[0]) if x))
    return GradedDiffSpace(P, Q, k, [t[0] for t in tagged], [t[1] for t in tagged], by_degree)


def graded_compose_check(A: GradedAlgebra, k: int = 1, l: int = 1) -> dict:
    """Degrees add and orders add under composition of homogeneous operators."""
    F, G = A.F, A.G
    S, T = graded_diff_space(A, k=k), graded_diff_space(A, k=l)
    big = graded_diff_space(A, k=k + l)
    lookup = {}
    for v, h in zip(big.vectors, big.vector_degrees):
        lookup.setdefault(h, []).append(v)
    ok = True
    n = A.dim
    for X, hx in zip(S.matrices(), S.vector_degrees):
        for Y, hy in zip(T.matrices(), T.vector_degrees):
            Z = matmul(X, Y, F)
            vec = [x for row in Z for x in row]
            if not any(vec):
                continue
            h = _gadd(G, hx, hy)
            basis = lookup.get(h, [])
            if not basis or rank_of(basis + [vec], F) > len(basis):
                ok = False
    return {"ok": ok}


def rank_of(rows, F):
    return len(rref(rows, F, len(rows[0]))[1]) if rows else 0


# ---------------------------------------------------------------------------
# dioles

def make_diole(A: FinAlgebra, P: FinModule) -> GradedAlgebra:
    """𝒜₀ = A, 𝒜₁ = P, product of two degree-1 elements zero, trivial sign form."""
    F = A.F
    n, m = A.dim, P.dim
    N = n + m
    table = [[[F.zero] * N for _ in range(N)] for _ in range(N)]
    for i in range(n):
        for j in range(n):
            for k, x in enumerate(A.table[i][j]):
                table[i][j][k] = x
        for q in range(m):
            col = [P.act[i][r][q] for r in range(m)]
            for r, x in enumerate(col):
                table[i][n + q][n + r] = x
                table[n + q][i][n + r] = x
    unit = list(A.unit) + [F.zero] * m
    labels = list(A.labels) + [f"p{q}" for q in range(m)]
    D = GradedAlgebra(F, table, unit, [0] * n + [1] * m, "Z", "trivial", labels,
                      name=f"Diole({A.name},{P.name})")
    D.n0, D.n1 = n, m
    D.base, D.module = A, P
    return D


@dataclass
class AlgebroidData:
    A: FinAlgebra
    P: FinModule
    bracket: list       # bracket[i][j] = coordinates of [p_i, p_j] in P
    anchor: list        # anchor[i] = n x n matrix of the derivation α(p_i)


def _bracket(data: AlgebroidData, u, v):
    F, m = data.A.F, data.P.dim
    out = [F.zero] * m
    for i, x in enumerate(u):
        if x:
            for j, y in enumerate(v):
                if y:
                    out = [F.norm(s + x * y * t) for s, t in zip(out, data.bracket[i][j])]
    return out


def _anchor(data: AlgebroidData, u):
    F, n = data.A.F, data.A.dim
    M = [[F.zero] * n for _ in range(n)]
    for i, x in enumerate(u):
        if x:
            M = [[F.norm(a + x * b) for a, b in zip(r1, r2)] for r1, r2 in zip(M, data.anchor[i])]
    return M


def algebroid_check(data: AlgebroidData) -> dict:
    """Lie algebra axioms, anchor A-linearity, derivation property, anchor rule, Lie homomorphism."""
    A, P, F = data.A, data.P, data.A.F
    n, m = A.dim, P.dim
    viol = []
    E = [[F.one if i == j else F.zero for j in range(m)] for i in range(m)]
    for i in range(m):
        if any(_bracket(data, E[i], E[i])):
            viol.append(("skew", i, i))
        for j in range(m):
            lhs = _bracket(data, E[i], E[j])
            rhs = _bracket(data, E[j], E[i])
            if any(F.norm(x + y) for x, y in zip(lhs, rhs)):
                viol.append(("skew", i, j))
            for k in range(m):
                t1 = _bracket(data, _bracket(data, E[i], E[j]), E[k])
                t2 = _bracket(data, _bracket(data, E[j], E[k]), E[i])
                t3 = _bracket(data, _bracket(data, E[k], E[i]), E[j])
                if any(F.norm(x + y + z) for x, y, z in zip(t1, t2, t3)):
                    viol.append(("jacobi", i, j, k))
    for i in range(m):
        X = data.anchor[i]
        for a in range(n):
            for b in range(n):
                ea, eb = A.basis(a), A.basis(b)
                lhs = matvec(X, A.mul(ea, eb), F)
                rhs = [F.norm(x + y) for x, y in zip(A.mul(ea, matvec(X, eb, F)), A.mul(eb, matvec(X, ea, F)))]
                if lhs != rhs:
                    viol.append(("anchor_not_derivation", i, a, b))
        for a in range(n):
            ea = A.basis(a)
            ap = P.apply(ea, E[i])
            lhs = _anchor(data, ap)
            rhs = matmul(A.mul_matrix(ea), X, F)
            if lhs != rhs:
                viol.append(("anchor_not_linear", a, i))
    for i in range(m):
        for j in range(m):
            for a in range(n):
                ea = A.basis(a)
                lhs = _bracket(data, E[i], P.apply(ea, E[j]))
                Xa = matvec(data.anchor[i], ea, F)
                rhs = [F.norm(x + y) for x, y in zip(P.apply(ea, _bracket(data, E[i], E[j])), P.apply(Xa, E[j]))]
                if lhs != rhs:
                    viol.append(("anchor_rule", i, a, j))
            lhs = _anchor(data, _bracket(data, E[i], E[j]))
            Xi, Xj = data.anchor[i], data.anchor[j]
            rhs = [[F.norm(x - y) for x, y in zip(r1, r2)]
                   for r1, r2 in zip(matmul(Xi, Xj, F), matmul(Xj, Xi, F))]
            if lhs != rhs:
                viol.append(("anchor_not_lie_hom", i, j))
    viol.sort(key=repr)
    return {"ok": not viol, "violations": viol, "witness": viol[0] if viol else None}


def tautological_algebroid(A: FinAlgebra) -> AlgebroidData:
    """P = D(A), anchor the identity, bracket the commutator."""
    from .dfunctors import derivations
    D = derivations(A)
    F, n = A.F, A.dim
    P = D.left_module()
    mats = [[[v[r * n + c] for c in range(n)] for r in range(n)] for v in D.vectors]
    br = []
    for X in mats:
        row = []
        for Y in mats:
            Z = [[F.norm(x - y) for x, y in zip(r1, r2)] for r1, r2 in zip(matmul(X, Y, F), matmul(Y, X, F))]
            c = D.coords([x for r in Z for x in r])
            if c is None:
                raise InvariantError("commutator of derivations left D(A)", None)
            row.append(c)
        br.append(row)
    return AlgebroidData(A, P, br, mats)


def algebroid_to_diole_bracket(data: AlgebroidData):
    """Degree -1 bracket on the diole basis: {p,q} = [p,q], {p,a} = α(p)(a), {a,p} = -α(p)(a)."""
    A, P, F = data.A, data.P, data.A.F
    n, m = A.dim, P.dim
    N = n + m
    br = [[[F.zero] * N for _ in range(N)] for _ in range(N)]
    for i in range(m):
        for j in range(m):
            for r, x in enumerate(data.bracket[i][j]):
                br[n + i][n + j][n + r] = x
        for a in range(n):
            Xa = matvec(data.anchor[i], A.basis(a), F)
            for r, x in enumerate(Xa):
                br[n + i][a][r] = x
                br[a][n + i][r] = F.norm(-x)
    return br


def diole_poisson_check(D: GradedAlgebra, bracket, degree: int) -> dict:
    """Graded skew-symmetry, Jacobi, biderivation and degree constraint for a bracket table."""
    F, G = D.F, D.G
    N = D.dim
    if degree not in (-2, -1, 0, 1):
        raise GradedError("diole Poisson structures are nontrivial only in degrees -2..1")
    viol = []

    def br(u, v):
        out = [F.zero] * N
        for i, x in enumerate(u):
            if x:
                for j, y in enumerate(v):
                    if y:
                        out = [F.norm(s + x * y * t) for s, t in zip(out, bracket[i][j])]
        return out

    E = [D.basis(i) for i in range(N)]
    deg = D.degrees
    # products landing in an absent component (P.P in a diole) carry no information
    present = set(deg)
    sh = lambda g: _gadd(G, g, degree)
    for i in range(N):
        for j in range(N):
            target = _gadd(G, _gadd(G, deg[i], deg[j]), degree)
            for k, x in enumerate(bracket[i][j]):
                if x and deg[k] != target:
                    viol.append(("degree", i, j, k))
            s = D.sign(sh(deg[i]), sh(deg[j]))
            if br(E[i], E[j]) != [F.norm(-s * x) for x in br(E[j], E[i])]:
                viol.append(("skew", i, j))
    for i in range(N):
        for j in range(N):
            for k in range(N):
                lhs = br(E[i], br(E[j], E[k]))
                s = D.sign(sh(deg[i]), sh(deg[j]))
                rhs = [F.norm(x + s * y) for x, y in zip(br(br(E[i], E[j]), E[k]), br(E[j], br(E[i], E[k])))]
                if lhs != rhs:
                    viol.append(("jacobi", i, j, k))
                if _gadd(G, deg[j], deg[k]) not in present:
                    continue
                lhs = br(E[i], D.mul(E[j], E[k]))
                s = D.sign(sh(deg[i]), deg[j])
                rhs = [F.norm(x + s * y) for x, y in zip(D.mul(br(E[i], E[j]), E[k]), D.mul(E[j], br(E[i], E[k])))]
                if lhs != rhs:
                    viol.append(("biderivation", i, j, k))
    viol.sort(key=repr)
    report = {"degree": degree, "ok": not viol, "violations": viol, "witness": viol[0] if viol else None}
    if degree == -1 and hasattr(D, "n0"):
        data = diole_to_algebroid(D, bracket)
        alg = algebroid_check(data)
        back = algebroid_to_diole_bracket(data)
        report["algebroid"] = alg
        report["round_trip"] = back == [[list(map(F.norm, v)) for v in row] for row in bracket]
        report["cross_validated"] = alg["ok"] == report["ok"]
    if degree == 0 and hasattr(D, "n0"):
        report["hamiltonian_connection"] = _hamiltonian_connection_check(D, bracket)
    if degree == 1 and hasattr(D, "n0"):
        report["in_D2"] = _degree_one_in_D2(D, bracket)
    return report


def diole_to_algebroid(D: GradedAlgebra, bracket) -> AlgebroidData:
    n, m, F = D.n0, D.n1, D.F
    A, P = D.base, D.module
    br = [[[bracket[n + i][n + j][n + r] for r in range(m)] for j in range(m)] for i in range(m)]
    anchor = [[[bracket[n + i][c][r] for c in range(n)] for r in range(n)] for i in range(m)]
    return AlgebroidData(A, P, br, anchor)


def _hamiltonian_connection_check(D, bracket) -> dict:
    """∇_a(bp) = X_a(b)p + b∇_a(p) and ∇_{ab} = a∇_b + b∇_a."""
    n, m, F = D.n0, D.n1, D.F
    A, P = D.base, D.module

    def nabla(a_vec):
        M = [[F.zero] * m for _ in range(m)]
        for a, x in enumerate(a_vec):
            if x:
                for q in range(m):
                    for r in range(m):
                        M[r][q] = F.norm(M[r][q] + x * bracket[a][n + q][n + r])
        return M

    def X(a_vec, b_vec):
        out = [F.zero] * n
        for a, x in enumerate(a_vec):
            for b, y in enumerate(b_vec):
                if x and y:
                    out = [F.norm(s + x * y * t) for s, t in zip(out, bracket[a][b][:n])]
        return out

    viol = []
    for a in range(n):
        ea = A.basis(a)
        Na = nabla(ea)
        for b in range(n):
            eb = A.basis(b)
            for q in range(m):
                eq = [F.one if r == q else F.zero for r in range(m)]
                lhs = matvec(Na, P.apply(eb, eq), F)
                rhs = [F.norm(x + y) for x, y in zip(P.apply(X(ea, eb), eq), P.apply(eb, matvec(Na, eq, F)))]
                if lhs != rhs:
                    viol.append(("nabla_leibniz", a, b, q))
            lhs = nabla(A.mul(ea, eb))
            rhs = [[F.norm(x + y) for x, y in zip(r1, r2)]
                   for r1, r2 in zip(matmul(P.action(ea), nabla(eb), F), matmul(P.action(eb), Na, F))]
            if lhs != rhs:
                viol.append(("nabla_product", a, b))
    viol.sort(key=repr)
    return {"ok": not viol, "witness": viol[0] if viol else None}


def _degree_one_in_D2(D, bracket) -> bool:
    from .dfunctors import multi_derivations
    n, m, F = D.n0, D.n1, D.F
    D2 = multi_derivations(D.base, D.module, 2)
    v = [F.zero] * (m * n * n)
    for a in range(n):          # outer slot
        for b in range(n):      # inner slot
            for q in range(m):
                v[(q * n + b) * n + a] = bracket[a][b][n + q]
    return D2.coords(v) is not None


def degree_minus_two_bracket(D: GradedAlgebra, form) -> list:
    """Bracket table from a bilinear form P x P -> A (form[i][j] = vector in A)."""
    n, m, F = D.n0, D.n1, D.F
    N = n + m
    br = [[[F.zero] * N for _ in range(N)] for _ in range(N)]
    for i in range(m):
        for j in range(m):
            for r, x in enumerate(form[i][j]):
                br[n + i][n + j][r] = F(x)
    return br


# ---------------------------------------------------------------------------
# connections

@dataclass
class ConnectionData:
    A: FinAlgebra
    P: FinModule
    kappa: list           # dim P x (dim Diff_1 * dim P), column i * dim P + j for X_i ⊗ p_j
    diff1: DiffSpace
    right: bool = False


def _diff1(A: FinAlgebra) -> DiffSpace:
    R = A.regular_module()
    return DiffSpace(R, R, 1, "recursive")


def connection_from_function(A: FinAlgebra, P: FinModule, fn, right: bool = False) -> ConnectionData:
    """fn(X, j) -> P-vector, X an operator matrix on A, j a P basis index."""
    S = _diff1(A)
    cols = []
    for X in S.matrices():
        for j in range(P.dim):
            cols.append(list(fn(X, j)))
    K = [[cols[c][r] for c in range(len(cols))] for r in range(P.dim)]
    return ConnectionData(A, P, K, S, right)


def trivial_connection(A: FinAlgebra) -> ConnectionData:
    """κ(Δ⊗p) = Δ(p) on the free module of rank one."""
    F = A.F
    P = A.regular_module()
    return connection_from_function(A, P, lambda X, j: matvec(X, A.basis(j), F))


def _kappa(data: ConnectionData, X, p):
    """κ(X⊗p) for an operator matrix X in Diff_1 and p in P."""
    F = data.A.F
    c = data.diff1.coordinates(X)
    if c is None:
        raise InvariantError("operator is not of order <= 1", None)
    m = data.P.dim
    out = [F.zero] * m
    for i, x in enumerate(c):
        if x:
            for j, y in enumerate(p):
                if y:
                    for r in range(m):
                        z = data.kappa[r][i * m + j]
                        if z:
                            out[r] = F.norm(out[r] + x * y * z)
    return out


def covariant_derivative(data: ConnectionData, X, p):
    v = _kappa(data, X, p)
    return [data.A.F.norm(-x) for x in v] if data.right else v


def connection_check(data: ConnectionData, right: bool | None = None) -> dict:
    """Balancing, A-linearity, unit (left), Leibniz rule and flatness on basis tuples."""
    if right is not None:
        data.right = right
    A, P, F = data.A, data.P, data.A.F
    n, m = A.dim, P.dim
    mats = data.diff1.matrices()
    viol = []
    E = [[F.one if i == j else F.zero for j in range(m)] for i in range(m)]
    for idx, X in enumerate(mats):
        for a in range(n):
            La = A.mul_matrix(A.basis(a))
            XA, AX = matmul(X, La, F), matmul(La, X, F)
            for j in range(m):
                ap = P.apply(A.basis(a), E[j])
                if not data.right:
                    # tensor over the right structure, module over the left one
                    if _kappa(data, XA, E[j]) != _kappa(data, X, ap):
                        viol.append(("balanced", idx, a, j))
                    if _kappa(data, AX, E[j]) != P.apply(A.basis(a), _kappa(data, X, E[j])):
                        viol.append(("A_linear", idx, a, j))
                else:
                    if _kappa(data, AX, E[j]) != _kappa(data, X, ap):
                        viol.append(("balanced", idx, a, j))
                    if _kappa(data, XA, E[j]) != P.apply(A.basis(a), _kappa(data, X, E[j])):
                        viol.append(("A_linear", idx, a, j))
    ident = [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]
    unit_ok = all(_kappa(data, ident, E[j]) == E[j] for j in range(m))
    if not data.right and not unit_ok:
        viol.append(("unit",))
    from .dfunctors import derivations
    D = derivations(A)
    ders = [[[v[r * n + c] for c in range(n)] for r in range(n)] for v in D.vectors]
    leibniz = True
    for ix, X in enumerate(ders):
        for a in range(n):
            ea = A.basis(a)
            Xa = matvec(X, ea, F)
            for j in range(m):
                lhs = covariant_derivative(data, X, P.apply(ea, E[j]))
                if not data.right:
                    extra = P.apply(Xa, E[j])
                else:
                    extra = P.apply(Xa, _kappa(data, ident, E[j]))
                rhs = [F.norm(x + y) for x, y in zip(P.apply(ea, covariant_derivative(data, X, E[j])), extra)]
                if lhs != rhs:
                    leibniz = False
                    viol.append(("leibniz", ix, a, j))
    flat = True
    witness_flat = None
    for ix, X in enumerate(ders):
        for iy, Y in enumerate(ders):
            XY = [[F.norm(x - y) for x, y in zip(r1, r2)] for r1, r2 in zip(matmul(X, Y, F), matmul(Y, X, F))]
            for j in range(m):
                t = [F.norm(x - y) for x, y in zip(covariant_derivative(data, X, covariant_derivative(data, Y, E[j])),
                                                    covariant_derivative(data, Y, covariant_derivative(data, X, E[j])))]
                if t != covariant_derivative(data, XY, E[j]):
                    flat = False
                    witness_flat = witness_flat or (ix, iy, j)
    viol.sort(key=repr)
    return {"right": data.right, "ok": not viol, "unit": unit_ok, "leibniz": leibniz, "flat": flat,
            "flat_witness": witness_flat, "violations": viol, "witness": viol[0] if viol else None}


def right_connections(A: FinAlgebra, P: FinModule | None = None) -> list:
    """Basis of all right connections (balanced, right-A-linear κ) as ConnectionData."""
    P = P if P is not None else A.regular_module()
    F = A.F
    S = _diff1(A)
    n, m, d = A.dim, P.dim, S.dim
    mats = S.matrices()
    ncols = d * m
    N = m * ncols
    rows = []

    def coords_of(X):
        c = S.coordinates(X)
        if c is None:
            raise InvariantError("Diff_1 not closed", None)
        return c

    E = [[F.one if i == j else F.zero for j in range(m)] for i in range(m)]
    for i, X in enumerate(mats):
        for a in range(n):
            La = A.mul_matrix(A.basis(a))
            cAX, cXA = coords_of(matmul(La, X, F)), coords_of(matmul(X, La, F))
            for j in range(m):
                ap = P.apply(A.basis(a), E[j])
                Pa = P.action(A.basis(a))
                for r in range(m):
                    # balanced: κ(aX ⊗ p_j) - κ(X ⊗ a p_j) = 0
                    row = {}
                    for i2, x in enumerate(cAX):
                        if x:
                            key = r * ncols + i2 * m + j
                            row[key] = F.norm(row.get(key, 0) + x)
                    for j2, y in enumerate(ap):
                        if y:
                            key = r * ncols + i * m + j2
                            row[key] = F.norm(row.get(key, 0) - y)
                    row = {k: v for k, v in row.items() if v}
                    if row:
                        rows.append(row)
                    # linear: κ(Xa ⊗ p_j) - a κ(X ⊗ p_j) = 0
                    row = {}
                    for i2, x in enumerate(cXA):
                        if x:
                            key = r * ncols + i2 * m + j
                            row[key] = F.norm(row.get(key, 0) + x)
                    for r2 in range(m):
                        y = Pa[r][r2]
                        if y:
                            key = r2 * ncols + i * m + j
                            row[key] = F.norm(row.get(key, 0) - y)
                    row = {k: v for k, v in row.items() if v}
                    if row:
                        rows.append(row)
    sols = kernel_from_sparse(rows, N, F)
    out = []
    for v in sols:
        K = [v[r * ncols:(r + 1) * ncols] for r in range(m)]
        out.append(ConnectionData(A, P, K, S, right=True))
    return out
