"""Jet modules, Kähler forms, the exterior differential and adjoint complexes.

Everything lives over a finite-dimensional algebra.  A⊗P is indexed by
``a * dim P + q``; jets are quotients of it, forms are quotients of tensor
powers of Λ¹ by balancing and alternating relations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .algpres import FinAlgebra, FinModule, PolyAlgebra, hom_space, submodule
from .diffop import DiffSpace, _basis_elements, stabilization
from .dfunctors import ChainComplex, multi_derivations
from .exactcore import (
    BudgetError, Coords, ExactError, InvariantError, Quotient, get_budget,
    kernel_basis, matmul, matvec, rank, row_space, solve,
)


class FormsError(ExactError):
    pass


def _e(i, n, F):
    v = [F.zero] * n
    v[i] = F.one
    return v


def _columns_to_matrix(cols, nrows, F):
    return [[cols[c][r] for c in range(len(cols))] for r in range(nrows)]


def linear_extension(sources, targets, dim_src, dim_tgt, F):
    """Matrix M with M s = t for every pair; raises if inconsistent or not spanning."""
    if dim_src == 0:
        return [[] for _ in range(dim_tgt)]
    C = None
    basis, images = [], []
    for s, t in zip(sources, targets):
        if rank(basis + [s], F) > len(basis):
            basis.append(list(s))
            images.append(list(t))
        if len(basis) == dim_src:
            break
    if len(basis) < dim_src:
        raise InvariantError("spanning set does not span the source", len(basis))
    C = Coords(basis, F, dim_src)
    M = [[F.zero] * dim_src for _ in range(dim_tgt)]
    inv_cols = [C(_e(j, dim_src, F)) for j in range(dim_src)]
    for j, co in enumerate(inv_cols):
        for b, x in enumerate(co):
            if x:
                for r in range(dim_tgt):
                    if images[b][r]:
                        M[r][j] = F.norm(M[r][j] + x * images[b][r])
    for s, t in zip(sources, targets):
        if matvec(M, s, F) != [F.norm(x) for x in t]:
            raise InvariantError("map is not well defined on the quotient", list(s))
    return M


# ---------------------------------------------------------------------------
# jets

class JetModule:
    """J^k(P) = (A ⊗ P) / μ_{k+1} with the left A-structure on the first factor."""

    def __init__(self, A, P: FinModule | None = None, k: int = 1, budget: int | None = None,
                 D: int | None = None):
        self.truncated = False
        if isinstance(A, PolyAlgebra):
            A = A.truncated_carrier(D)
            self.truncated = True
            P = None
        self.A, self.F, self.k = A, A.F, k
        self.P = P if P is not None else A.regular_module()
        n, m = A.dim, self.P.dim
        self.N = n * m
        if self.N * self.N > get_budget(budget):
            raise BudgetError(f"A⊗P of dimension {self.N} exceeds budget", "budget")
        self.mu = self._mu()
        self.Qh = Quotient(self.N, self.mu, self.F)
        self.dim = self.Qh.dim
        self.module = self._module()

    def _delta(self, b, v):
        """δ^b(a⊗p) = ab⊗p - a⊗bp on a vector of A⊗P."""
        A, P, F = self.A, self.P, self.F
        n, m = A.dim, P.dim
        Lb, Pb = A.mul_matrix(b), P.action(b)
        out = [F.zero] * self.N
        for idx, x in enumerate(v):
            if not x:
                continue
            a, q = divmod(idx, m)
            for a2 in range(n):
                y = Lb[a2][a]
                if y:
                    out[a2 * m + q] = F.norm(out[a2 * m + q] + x * y)
            for q2 in range(m):
                y = Pb[q2][q]
                if y:
                    out[a * m + q2] = F.norm(out[a * m + q2] - x * y)
        return out

    def _mu(self):
        F = self.F
        current = [_e(i, self.N, F) for i in range(self.N)]
        elems = _basis_elements(self.A)
        for _ in range(self.k + 1):
            new = [self._delta(b, v) for b in elems for v in current]
            new = [v for v in new if any(v)]
            current = row_space(new, F) if new else []
            if not current:
                break
        return current

    def _module(self):
        A, F, m = self.A, self.F, self.P.dim
        acts = []
        for i in range(A.dim):
            L = A.L[i]
            cols = []
            for j in range(self.dim):
                v = self.Qh.lift(_e(j, self.dim, F))
                w = [F.zero] * self.N
                for idx, x in enumerate(v):
                    if x:
                        a, q = divmod(idx, m)
                        for a2 in range(A.dim):
                            if L[a2][a]:
                                w[a2 * m + q] = F.norm(w[a2 * m + q] + x * L[a2][a])
                cols.append(self.Qh.reduce(w))
            acts.append(_columns_to_matrix(cols, self.dim, F))
        return FinModule(A, acts, name=f"J^{self.k}({self.P.name})", validate=False)

    def tensor(self, a, p) -> list:
        """Class of a⊗p (a in A, p in P as coordinate vectors)."""
        F, m = self.F, self.P.dim
        v = [F.zero] * self.N
        for i, x in enumerate(a):
            if x:
                for q, y in enumerate(p):
                    if y:
                        v[i * m + q] = F.norm(v[i * m + q] + x * y)
        return self.Qh.reduce(v)

    def j(self, p) -> list:
        return self.tensor(self.A.unit, p)

    def j_matrix(self):
        cols = [self.j(_e(q, self.P.dim, self.F)) for q in range(self.P.dim)]
        return _columns_to_matrix(cols, self.dim, self.F)

    def projection(self, other: "JetModule"):
        """π_{k,l}: J^k(P) -> J^l(P) for l <= k."""
        if other.k > self.k:
            raise FormsError("projection goes to lower order")
        cols = [other.Qh.reduce(self.Qh.lift(_e(j, self.dim, self.F))) for j in range(self.dim)]
        return _columns_to_matrix(cols, other.dim, self.F)

    def h(self, Delta, Q: FinModule):
        """The A-homomorphism h_Δ with h_Δ ∘ j_k = Δ, for Δ: P -> Q given as a matrix."""
        A, F, m = self.A, self.F, self.P.dim
        full = [[F.zero] * self.N for _ in range(Q.dim)]
        for a in range(A.dim):
            Qa = Q.action(A.basis(a))
            for q in range(m):
                col = matvec(Qa, [Delta[r][q] for r in range(Q.dim)], F) if Q.dim else []
                for r in range(Q.dim):
                    full[r][a * m + q] = col[r]
        for g in self.mu:
            if any(matvec(full, g, F)) if Q.dim else False:
                raise InvariantError("operator order exceeds the jet order", g)
        cols = [matvec(full, self.Qh.lift(_e(j, self.dim, F)), F) if Q.dim else []
                for j in range(self.dim)]
        return _columns_to_matrix(cols, Q.dim, F)

    def right_action(self, c):
        """(a⊗b)·c = a⊗bc; only meaningful for P = A."""
        F, m = self.F, self.P.dim
        Pc = self.P.action(c)
        cols = []
        for j in range(self.dim):
            v = self.Qh.lift(_e(j, self.dim, F))
            w = [F.zero] * self.N
            for idx, x in enumerate(v):
                if x:
                    a, q = divmod(idx, m)
                    for q2 in range(m):
                        if Pc[q2][q]:
                            w[a * m + q2] = F.norm(w[a * m + q2] + x * Pc[q2][q])
            cols.append(self.Qh.reduce(w))
        return _columns_to_matrix(cols, self.dim, F)


def jet_module(A, P=None, k: int = 1, budget=None, D=None) -> JetModule:
    return JetModule(A, P, k, budget, D)


def jet_duality_check(A: FinAlgebra, P: FinModule | None = None, Q: FinModule | None = None,
                      k: int = 1) -> dict:
    P = P if P is not None else A.regular_module()
    Q = Q if Q is not None else A.regular_module()
    F = A.F
    J = JetModule(A, P, k)
    S = DiffSpace(P, Q, k, "recursive")
    jm = J.j_matrix()
    universal = True
    images = []
    for X in S.matrices():
        H = J.h(X, Q)
        images.append([x for row in H for x in row])
        if (matmul(H, jm, F) if Q.dim and J.dim else X) != X:
            universal = False
    injective = rank(images, F) == S.dim if images else True
    homs = hom_space(J.module, Q)
    inverse_ok = True
    for H in homs:
        X = matmul(H, jm, F)
        if not S.contains(X) or J.h(X, Q) != H:
            inverse_ok = False
    JA = JetModule(A, None, k)
    tensor_dim = _tensor_over_A(JA, P)
    return {
        "k": k, "dim_diff": S.dim, "dim_hom_jet": len(homs), "universal": universal,
        "injective": injective, "inverse_ok": inverse_ok,
        "dims_equal": S.dim == len(homs),
        "dim_J(P)": J.dim, "dim_J(A)⊗P": tensor_dim, "tensor_identity": J.dim == tensor_dim,
    }


def _tensor_over_A(JA: JetModule, P: FinModule) -> int:
    """dim J^k(A) ⊗_A P, using the right structure of J^k(A)."""
    F, A = JA.F, JA.A
    dJ, m = JA.dim, P.dim
    rows = []
    for c in range(A.dim):
        Rc = JA.right_action(A.basis(c))
        Pc = P.action(A.basis(c))
        for x in range(dJ):
            for q in range(m):
                row = {}
                for x2 in range(dJ):
                    if Rc[x2][x]:
                        row[x2 * m + q] = F.norm(row.get(x2 * m + q, 0) + Rc[x2][x])
                for q2 in range(m):
                    if Pc[q2][q]:
                        row[x * m + q2] = F.norm(row.get(x * m + q2, 0) - Pc[q2][q])
                row = {i: v for i, v in row.items() if v}
                if row:
                    rows.append(row)
    return Quotient(dJ * m, rows, F).dim


# ---------------------------------------------------------------------------
# forms

@dataclass
class FormAlgebra:
    A: FinAlgebra
    top: int
    lam1: FinModule
    d0: list                       # A -> Λ¹
    tensor_dims: list
    quotients: list                # Quotient per degree >= 1 (index 0 unused)
    modules: list                  # FinModule per degree
    d: list = field(default_factory=list)
    convention: str = "alternating"

    @property
    def F(self):
        return self.A.F

    @property
    def dims(self) -> list:
        return [m.dim for m in self.modules]

    def da(self, a) -> list:
        return matvec(self.d0, a, self.F) if self.lam1.dim else []

    def lift(self, k, w) -> list:
        return w if k == 0 else self.quotients[k].lift(w)

    def reduce(self, k, t) -> list:
        return t if k == 0 else self.quotients[k].reduce(t)

    def act(self, k, a, w) -> list:
        return self.modules[k].apply(a, w) if self.modules[k].dim else []

    def wedge(self, k, u, l, v) -> list:
        F = self.F
        if k + l > self.top:
            raise FormsError("degree above the computed range")
        if k == 0:
            return self.act(l, u, v)
        if l == 0:
            return self.act(k, v, u)
        tu, tv = self.lift(k, u), self.lift(l, v)
        r = self.lam1.dim
        out = [F.zero] * (r ** (k + l))
        for i, x in enumerate(tu):
            if x:
                for j, y in enumerate(tv):
                    if y:
                        idx = i * r ** l + j
                        out[idx] = F.norm(out[idx] + x * y)
        return self.reduce(k + l, out)

    def simple(self, a0, alist) -> list:
        """a0 da1 ∧ ... ∧ dak."""
        w = list(a0)
        deg = 0
        for a in alist:
            w = self.wedge(deg, w, 1, self.da(a))
            deg += 1
        return w

    def spanning(self, k):
        """Pairs ((a0, a1..ak), element) over basis indices; a1..ak skip the unit."""
        A = self.A
        elems = _nonunit_indices(A)
        for a0 in range(A.dim):
            for tail in product(elems, repeat=k):
                yield (a0,) + tail, self.simple(A.basis(a0), [A.basis(t) for t in tail])

    def complex(self) -> ChainComplex:
        labels = [f"Λ^{i}" for i in range(self.top + 1)]
        return ChainComplex(self.dims, self.d, self.F, labels)

    def cohomology_dims(self) -> list:
        return self.complex().homology_dims()


def _nonunit_indices(A: FinAlgebra) -> list:
    u = A.unit_index()
    return [i for i in range(A.dim) if i != u]


def kahler_forms(A: FinAlgebra, top: int = 2, budget: int | None = None) -> FormAlgebra:
    F = A.F
    J1, J0 = JetModule(A, None, 1), JetModule(A, None, 0)
    pi = J1.projection(J0)
    ker = kernel_basis(pi, F, J1.dim) if J1.dim else []
    lam1, C1 = submodule(J1.module, ker) if ker else (FinModule(A, [[] for _ in range(A.dim)], "0", False), None)
    one_j = J1.j(A.unit)
    cols = []
    for i in range(A.dim):
        a = A.basis(i)
        v = [x - y for x, y in zip(J1.j(a), J1.module.apply(a, one_j))]
        v = [F.norm(x) for x in v]
        cols.append(C1(v) if C1 is not None else [])
    d0 = _columns_to_matrix(cols, lam1.dim, F)
    r = lam1.dim
    limit = get_budget(budget)
    tensor_dims = [A.dim, r]
    quotients = [None, Quotient(r, [], F)]
    modules = [A.regular_module(), lam1]
    for k in range(2, top + 1):
        if r ** k * r * A.dim > limit:
            raise BudgetError(f"Λ^{k} tensor space of size {r ** k} exceeds budget", "degree")
        Qk = Quotient(r ** k, _exterior_relations(A, lam1, k), F)
        tensor_dims.append(r ** k)
        quotients.append(Qk)
        modules.append(_exterior_module(A, lam1, k, Qk))
    forms = FormAlgebra(A, top, lam1, d0, tensor_dims, quotients, modules)
    forms.d = [_exterior_d(forms, k) for k in range(top)]
    return forms


def _digits(idx, r, k):
    out = []
    for _ in range(k):
        idx, x = divmod(idx, r)
        out.append(x)
    return out[::-1]


def _undigits(ds, r):
    idx = 0
    for x in ds:
        idx = idx * r + x
    return idx


def _exterior_relations(A, lam1, k):
    F, r = A.F, lam1.dim
    rows = []
    acts = [lam1.act[i] for i in range(A.dim)]
    for idx in range(r ** k):
        ds = _digits(idx, r, k)
        for pos in range(k - 1):
            s, t = ds[pos], ds[pos + 1]
            # alternating: x⊗x and x⊗y + y⊗x in adjacent slots
            if s == t:
                rows.append({idx: F.one})
            elif s < t:
                sw = list(ds)
                sw[pos], sw[pos + 1] = t, s
                rows.append({idx: F.one, _undigits(sw, r): F.one})
            # balancing: c acting on slot pos minus c acting on slot pos+1
            for c in range(A.dim):
                M = acts[c]
                row = {}
                for y in range(r):
                    if M[y][s]:
                        e = list(ds)
                        e[pos] = y
                        j = _undigits(e, r)
                        row[j] = F.norm(row.get(j, 0) + M[y][s])
                    if M[y][t]:
                        e = list(ds)
                        e[pos + 1] = y
                        j = _undigits(e, r)
                        row[j] = F.norm(row.get(j, 0) - M[y][t])
                row = {j: x for j, x in row.items() if x}
                if row:
                    rows.append(row)
    return rows


def _exterior_module(A, lam1, k, Qk):
    F, r = A.F, lam1.dim
    acts = []
    for c in range(A.dim):
        M = lam1.act[c]
        cols = []
        for j in range(Qk.dim):
            v = Qk.lift(_e(j, Qk.dim, F))
            w = [F.zero] * (r ** k)
            for idx, x in enumerate(v):
                if x:
                    ds = _digits(idx, r, k)
                    for y in range(r):
                        if M[y][ds[0]]:
                            e = [y] + ds[1:]
                            jj = _undigits(e, r)
                            w[jj] = F.norm(w[jj] + x * M[y][ds[0]])
            cols.append(Qk.reduce(w))
        acts.append(_columns_to_matrix(cols, Qk.dim, F))
    return FinModule(A, acts, name=f"Λ^{k}", validate=False)


def _exterior_d(forms: FormAlgebra, k: int):
    A, F = forms.A, forms.F
    src_dim, tgt_dim = forms.dims[k], forms.dims[k + 1]
    if k == 0:
        return forms.d0
    sources, targets = [], []
    for idx, w in forms.spanning(k):
        sources.append(w)
        targets.append(forms.simple(A.one(), [A.basis(i) for i in idx]))
    return linear_extension(sources, targets, src_dim, tgt_dim, F)


def forms_checks(forms: FormAlgebra) -> dict:
    """d∘d = 0, d(1) = 0, derivation law of d, graded commutativity of ∧."""
    A, F = forms.A, forms.F
    dd = forms.complex().is_complex()
    d1 = not any(forms.da(A.unit))
    leibniz = True
    for i in range(A.dim):
        for j in range(A.dim):
            a, b = A.basis(i), A.basis(j)
            lhs = forms.da(A.mul(a, b))
            rhs = [F.norm(x + y) for x, y in zip(forms.act(1, b, forms.da(a)), forms.act(1, a, forms.da(b)))]
            if lhs != rhs:
                leibniz = False
    graded = True
    for k in range(forms.top + 1):
        for l in range(forms.top + 1 - k):
            sign = F.one if (k * l) % 2 == 0 else F(-1)
            for u in range(forms.dims[k]):
                for v in range(forms.dims[l]):
                    x = forms.wedge(k, _e(u, forms.dims[k], F), l, _e(v, forms.dims[l], F))
                    y = forms.wedge(l, _e(v, forms.dims[l], F), k, _e(u, forms.dims[k], F))
                    if x != [F.norm(sign * t) for t in y]:
                        graded = False
    antider = True
    for k in range(forms.top):
        for l in range(forms.top - k):
            if k + l + 1 > forms.top:
                continue
            for u in range(forms.dims[k]):
                for v in range(forms.dims[l]):
                    eu, ev = _e(u, forms.dims[k], F), _e(v, forms.dims[l], F)
                    lhs = _apply(forms.d[k + l], forms.wedge(k, eu, l, ev), F)
                    t1 = forms.wedge(k + 1, _apply(forms.d[k], eu, F), l, ev)
                    t2 = forms.wedge(k, eu, l + 1, _apply(forms.d[l], ev, F))
                    s = F.one if k % 2 == 0 else F(-1)
                    if lhs != [F.norm(x + s * y) for x, y in zip(t1, t2)]:
                        antider = False
    return {"dd_zero": dd, "d1_zero": d1, "leibniz": leibniz,
            "graded_commutative": graded, "d_antiderivation": antider,
            "convention": forms.convention}


def _apply(M, v, F):
    if not M or not v:
        return [F.zero] * len(M)
    return matvec(M, v, F)


def de_rham_complex(A: FinAlgebra, top: int = 2) -> ChainComplex:
    return kahler_forms(A, top).complex()


# ---------------------------------------------------------------------------
# insertion and Lie derivative

def insertion(forms: FormAlgebra, X, k: int):
    """i_X: Λ^k -> Λ^{k-1} for a derivation X (n x n matrix on A)."""
    A, F = forms.A, forms.F
    if k == 0:
        raise FormsError("insertion lowers degree; k must be positive")
    sources, targets = [], []
    for idx, w in forms.spanning(k):
        a0 = A.basis(idx[0])
        acc = [F.zero] * forms.dims[k - 1]
        for i in range(1, len(idx)):
            Xa = matvec(X, A.basis(idx[i]), F)
            rest = [A.basis(t) for j, t in enumerate(idx[1:], start=1) if j != i]
            term = forms.simple(A.mul(a0, Xa), rest)
            s = F.one if (i - 1) % 2 == 0 else F(-1)
            acc = [F.norm(x + s * y) for x, y in zip(acc, term)]
        sources.append(w)
        targets.append(acc)
    return linear_extension(sources, targets, forms.dims[k], forms.dims[k - 1], F)


def lie_derivative(forms: FormAlgebra, X, k: int):
    """L_X on Λ^k, defined directly on a0 da1 ∧ ... ∧ dak."""
    A, F = forms.A, forms.F
    if k == 0:
        return [list(r) for r in X]
    sources, targets = [], []
    for idx, w in forms.spanning(k):
        alist = [A.basis(t) for t in idx[1:]]
        a0 = A.basis(idx[0])
        acc = forms.simple(matvec(X, a0, F), alist)
        for i in range(len(alist)):
            Xa = matvec(X, alist[i], F)
            deg = 0
            term = list(a0)
            for j, a in enumerate(alist):
                piece = forms.da(Xa) if j == i else forms.da(a)
                term = forms.wedge(deg, term, 1, piece)
                deg += 1
            acc = [F.norm(x + y) for x, y in zip(acc, term)]
        sources.append(w)
        targets.append(acc)
    return linear_extension(sources, targets, forms.dims[k], forms.dims[k], F)


def cartan_check(forms: FormAlgebra, X) -> dict:
    """L_X = i_X∘d + d∘i_X on every degree, and i_X(da) = X(a)."""
    F, A = forms.F, forms.A
    ok = True
    for k in range(forms.top):
        L = lie_derivative(forms, X, k)
        iXd = matmul(insertion(forms, X, k + 1), forms.d[k], F) if forms.dims[k + 1] else \
            [[F.zero] * forms.dims[k] for _ in range(forms.dims[k])]
        if k > 0:
            diX = matmul(forms.d[k - 1], insertion(forms, X, k), F)
        else:
            diX = [[F.zero] * forms.dims[0] for _ in range(forms.dims[0])]
        rhs = [[F.norm(x + y) for x, y in zip(r1, r2)] for r1, r2 in zip(iXd, diX)]
        if L != rhs:
            ok = False
    pairing = True
    if forms.top >= 1 and forms.dims[1]:
        i1 = insertion(forms, X, 1)
        for a in range(A.dim):
            if matvec(i1, forms.da(A.basis(a)), F) != matvec(X, A.basis(a), F):
                pairing = False
    return {"cartan": ok, "pairing": pairing}


def insertion_antiderivation_check(forms: FormAlgebra, X) -> bool:
    F = forms.F
    for k in range(1, forms.top + 1):
        for l in range(1, forms.top + 1 - k):
            ik, il, ikl = insertion(forms, X, k), insertion(forms, X, l), insertion(forms, X, k + l)
            for u in range(forms.dims[k]):
                for v in range(forms.dims[l]):
                    eu, ev = _e(u, forms.dims[k], F), _e(v, forms.dims[l], F)
                    lhs = _apply(ikl, forms.wedge(k, eu, l, ev), F)
                    t1 = forms.wedge(k - 1, _apply(ik, eu, F), l, ev)
                    t2 = forms.wedge(k, eu, l - 1, _apply(il, ev, F))
                    s = F.one if k % 2 == 0 else F(-1)
                    if lhs != [F.norm(x + s * y) for x, y in zip(t1, t2)]:
                        return False
    return True


# ---------------------------------------------------------------------------
# representing objects, naturality, multiplicative structure

def representing_check(A: FinAlgebra, P: FinModule | None = None, k: int = 1) -> dict:
    if A.F.p is not None:
        raise FormsError("representing_check requires characteristic 0 (alternating convention)")
    P = P if P is not None else A.regular_module()
    forms = kahler_forms(A, max(k, 1))
    Dk = multi_derivations(A, P, k) if k > 0 else None
    lhs = Dk.dim if Dk is not None else P.dim
    rhs = len(hom_space(forms.modules[k], P)) if forms.modules[k].dim else 0
    return {"k": k, "dim_D_k(P)": lhs, "dim_Hom(Λ^k,P)": rhs, "ok": lhs == rhs}


def naturality_check(H, A1: FinAlgebra, A2: FinAlgebra) -> dict:
    """H_{Λ¹} ∘ d₁ = d₂ ∘ H for an algebra homomorphism given by its matrix or AlgHom."""
    F = A1.F
    if hasattr(H, "images"):
        Hm = _columns_to_matrix([list(v) for v in H.images], A2.dim, F)
    else:
        Hm = H
    f1, f2 = kahler_forms(A1, 1), kahler_forms(A2, 1)
    sources, targets = [], []
    for i in range(A1.dim):
        for j in range(A1.dim):
            a0, a1 = A1.basis(i), A1.basis(j)
            sources.append(f1.act(1, a0, f1.da(a1)))
            targets.append(f2.act(1, matvec(Hm, a0, F), f2.da(matvec(Hm, a1, F))))
    HL = linear_extension(sources, targets, f1.dims[1], f2.dims[1], F)
    ok = True
    for i in range(A1.dim):
        a = A1.basis(i)
        if _apply(HL, f1.da(a), F) != f2.da(matvec(Hm, a, F)):
            ok = False
    return {"ok": ok, "H_lambda1": HL}


def multiplicative_structure(A: FinAlgebra, P: FinModule | None = None, k: int = 1) -> dict:
    """Pairing J^k(A) x J^k(P) -> J^k(P), (a⊗b)(c⊗p) = ac⊗bp."""
    P = P if P is not None else A.regular_module()
    F = A.F
    JA, JP = JetModule(A, None, k), JetModule(A, P, k)
    n, m = A.dim, P.dim

    def raw(u, v):
        # u in A⊗A, v in A⊗P, both full vectors
        out = [F.zero] * JP.N
        for i, x in enumerate(u):
            if not x:
                continue
            a, b = divmod(i, n)
            for j, y in enumerate(v):
                if not y:
                    continue
                c, q = divmod(j, m)
                ac = A.table[a][c]
                bq = P.act[b] and [P.act[b][r][q] for r in range(m)]
                for s, z in enumerate(ac):
                    if z:
                        for r, w in enumerate(bq):
                            if w:
                                out[s * m + r] = F.norm(out[s * m + r] + x * y * z * w)
        return out

    well_defined = True
    for g in JA.mu:
        for j in range(JP.N):
            if any(JP.Qh.reduce(raw(g, _e(j, JP.N, F)))):
                well_defined = False
    for g in JP.mu:
        for i in range(JA.N):
            if any(JP.Qh.reduce(raw(_e(i, JA.N, F), g))):
                well_defined = False
    mats = []
    for x in range(JA.dim):
        u = JA.Qh.lift(_e(x, JA.dim, F))
        cols = [JP.Qh.reduce(raw(u, JP.Qh.lift(_e(y, JP.dim, F)))) for y in range(JP.dim)]
        mats.append(_columns_to_matrix(cols, JP.dim, F))

    def mult(u, v):
        acc = [F.zero] * JP.dim
        for x, c in enumerate(u):
            if c:
                acc = [F.norm(s + c * t) for s, t in zip(acc, matvec(mats[x], v, F))]
        return acc

    jj = True
    for a in range(n):
        for q in range(m):
            ea, eq = A.basis(a), _e(q, m, F)
            if mult(JA.j(ea), JP.j(eq)) != JP.j(P.apply(ea, eq)):
                jj = False
    unit_ok = all(mats and mult(JA.j(A.unit), _e(y, JP.dim, F)) == _e(y, JP.dim, F) for y in range(JP.dim))
    assoc = comm = None
    if P is None or P.dim == A.dim and P.act == A.regular_module().act:
        assoc = comm = True
        basis = [_e(x, JA.dim, F) for x in range(JA.dim)]
        for u in basis:
            for v in basis:
                if mult(u, v) != mult(v, u):
                    comm = False
                for w in basis:
                    if mult(mult(u, v), w) != mult(u, mult(v, w)):
                        assoc = False
    return {"k": k, "matrices": mats, "well_defined": well_defined, "jet_identity": jj,
            "unit_acts_identically": unit_ok, "associative": assoc, "commutative": comm,
            "multiply": mult, "JA": JA, "JP": JP}


# ---------------------------------------------------------------------------
# jet-Spencer and adjoint complexes

def jet_spencer_complex(A: FinAlgebra, n: int) -> dict:
    """J^n(Λ⁰) -> J^{n-1}(Λ¹) -> ... -> J^0(Λⁿ), induced by j_{k-1} ∘ d."""
    if n > 2:
        raise BudgetError("jet-Spencer complexes are limited to n <= 2", "n")
    F = A.F
    forms = kahler_forms(A, max(n, 1))
    terms = [JetModule(A, forms.modules[j], n - j) for j in range(n + 1)]
    maps = []
    for j in range(n):
        src, tgt = terms[j], terms[j + 1]
        jm = tgt.j_matrix()
        dj = forms.d[j]
        Delta = matmul(jm, dj, F) if jm and jm[0] and dj and dj[0] else \
            [[F.zero] * forms.dims[j] for _ in range(tgt.dim)]
        maps.append(src.h(Delta, tgt.module))
    labels = [f"J^{n - j}(Λ^{j})" for j in range(n + 1)]
    cx = ChainComplex([t.dim for t in terms], maps, F, labels)
    return {"complex": cx, "terms": terms, "forms": forms}


@dataclass
class AdjointModule:
    P: FinModule
    dims: list
    complex: ChainComplex
    spaces: list
    homology: list
    orders: list
    top_comparison: dict

    @property
    def graded_dims(self) -> list:
        return [h for h, _ in self.homology]

    def to_json(self) -> dict:
        return {"graded_dims": self.graded_dims, "complex_dims": self.dims,
                "stabilization_orders": self.orders, "top_term_comparison": self.top_comparison}


def _full_diff(P: FinModule, Q: FinModule):
    if Q.dim == 0 or P.dim == 0:
        return None, 0
    k, S = stabilization(P, Q)
    return S, k


def adjoint_module(A: FinAlgebra, P: FinModule | None = None, top: int | None = None,
                   forms: FormAlgebra | None = None) -> AdjointModule:
    """H(w_P) for 0 -> Diff(P, Λ⁰) -> Diff(P, Λ¹) -> ..., w_P(Δ) = d∘Δ."""
    P = P if P is not None else A.regular_module()
    F = A.F
    if forms is None:
        if top is None:
            top = 1
            f = kahler_forms(A, 1)
            r = f.dims[1]
            top = min(max(r, 1), 3)
        forms = kahler_forms(A, top)
    spaces, orders = [], []
    for i in range(forms.top + 1):
        S, k = _full_diff(P, forms.modules[i])
        spaces.append(S)
        orders.append(k)
    dims = [S.dim if S else 0 for S in spaces]
    maps = []
    for i in range(forms.top):
        S, T = spaces[i], spaces[i + 1]
        cols = []
        for X in (S.matrices() if S else []):
            Y = matmul(forms.d[i], X, F) if T else []
            c = T.coordinates(Y) if T else []
            if c is None:
                raise InvariantError("d∘Δ left the stabilized operator space", i)
            cols.append(c)
        maps.append(_columns_to_matrix(cols, dims[i + 1], F))
    cx = ChainComplex(dims, maps, F, [f"Diff(P,Λ^{i})" for i in range(forms.top + 1)])
    hom = cx.homology()
    n_top = max((i for i in range(forms.top + 1) if forms.dims[i]), default=0)
    top_hom = len(hom_space(P, forms.modules[n_top])) if forms.dims[n_top] else 0
    comparison = {"top_degree": n_top, "dim_Hom(P,Λ^top)": top_hom,
                  "total_adjoint_dim": sum(h for h, _ in hom),
                  "agree": top_hom == sum(h for h, _ in hom)}
    return AdjointModule(P, dims, cx, spaces, hom, orders, comparison)


def berezinian(A: FinAlgebra, top: int | None = None) -> AdjointModule:
    return adjoint_module(A, None, top)


def adjoint_operator(op, top: int | None = None) -> dict:
    """Induced map Q̂ -> P̂ of Δ ↦ Δ∘□ on w-cohomology, degree by degree."""
    A, F = op.P.A, op.F
    forms = kahler_forms(A, top if top is not None else 1)
    Pm = adjoint_module(A, op.P, forms=forms)
    Qm = adjoint_module(A, op.Q, forms=forms)
    out = []
    for i in range(forms.top + 1):
        SQ, SP = Qm.spaces[i], Pm.spaces[i]
        _, reps_Q = Qm.homology[i]
        _, reps_P = Pm.homology[i]
        im_prev = []
        if i > 0 and Pm.complex.maps[i - 1] and Pm.dims[i - 1]:
            M = Pm.complex.maps[i - 1]
            im_prev = [[M[r][c] for r in range(Pm.dims[i])] for c in range(Pm.dims[i - 1])]
        cols = []
        for v in reps_Q:
            X = SQ.matrix_of(v)
            Y = matmul(X, op.matrix, F)
            w = SP.coordinates(Y)
            if w is None:
                raise InvariantError("Δ∘□ left the operator space", i)
            basis = reps_P + [u for u in im_prev if any(u)]
            sol = solve(_columns_to_matrix(basis, Pm.dims[i], F), w, F) if basis else None
            if sol is None and any(w):
                raise InvariantError("image is not a cocycle", i)
            cols.append(sol[:len(reps_P)] if sol is not None else [F.zero] * len(reps_P))
        out.append(_columns_to_matrix(cols, len(reps_P), F))
    return {"maps": out, "source_dims": Qm.graded_dims, "target_dims": Pm.graded_dims}
