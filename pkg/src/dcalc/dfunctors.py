"""Derivation and multi-derivation functors, Diff-Spencer complexes, homology.

A multi-derivation of level l with values in a module M is stored as a
tensor T(a_l, ..., a_1) in M.  Coordinates are flattened with the value
index most significant and the outermost argument a_l least significant:

    index = ((q * n + a_1) * n + a_2) * n + ... + a_l

so that, viewed as a matrix (inner index) x (a_l), a level-l tensor is a
linear map A -> (level l-1 tensors), matching :class:`DiffSpace` layout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algpres import FinAlgebra, FinModule, PolyAlgebra
from .diffop import DiffSpace, NFOperator, diff_constraints, unit_evaluation
from .exactcore import (
    BudgetError, Coords, ExactError, InvariantError, Quotient, get_budget,
    kernel_basis, kernel_from_sparse, matmul, matvec, rank, rref,
)


class FunctorError(ExactError):
    pass


# configurable limits for the constrained solves
MAX_LEVEL = 3
MAX_ENTRY = 2


# ---------------------------------------------------------------------------
# tensor modules

def _outer_module(A: FinAlgebra, d: int) -> FinModule:
    """Hom_k(A, V), dim V = d, with A acting on the argument: (c.X)(a) = X(c a)."""
    F, n = A.F, A.dim
    N = d * n
    acts = []
    for i in range(A.dim):
        L = A.L[i]
        M = [[F.zero] * N for _ in range(N)]
        # (X L_c)[r][c'] = sum_c X[r][c] L[c][c']
        for r in range(d):
            for c in range(n):
                for c2 in range(n):
                    if L[c][c2]:
                        M[r * n + c2][r * n + c] = L[c][c2]
        acts.append(M)
    return FinModule(A, acts, name="Hom(A,V)", validate=False)


@dataclass
class TensorSpace:
    """A subspace of level-l tensors with values in a module M."""

    M: FinModule
    level: int
    signature: tuple
    vectors: list
    ambient_dim: int
    kind: str
    coords: Coords = field(init=False)

    def __post_init__(self):
        self.coords = Coords(self.vectors, self.M.F, self.ambient_dim)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def annihilator(self) -> list:
        """Functionals vanishing exactly on this subspace."""
        F = self.M.F
        if not self.vectors:
            return [[F.one if i == j else F.zero for j in range(self.ambient_dim)]
                    for i in range(self.ambient_dim)]
        return kernel_basis(self.vectors, F, self.ambient_dim)

    def left_module(self) -> FinModule:
        """(c, T) -> c_M o T: the value is multiplied."""
        A, F, M = self.M.A, self.M.F, self.M
        n = A.dim
        block = n ** self.level
        acts = []
        for i in range(A.dim):
            Mi = M.act[i]
            cols = []
            for v in self.vectors:
                w = [F.zero] * self.ambient_dim
                for q in range(M.dim):
                    for q2 in range(M.dim):
                        c = Mi[q2][q]
                        if c:
                            for t in range(block):
                                x = v[q * block + t]
                                if x:
                                    w[q2 * block + t] = F.norm(w[q2 * block + t] + c * x)
                co = self.coords(w)
                if co is None:
                    raise InvariantError("tensor space not closed under the left action", i)
                cols.append(co)
            acts.append([[cols[c][r] for c in range(self.dim)] for r in range(self.dim)])
        return FinModule(A, acts, name=f"{self.kind}{list(self.signature)}({M.name})", validate=False)


def _unit_rows(A: FinAlgebra, inner_dim: int) -> list:
    """Rows expressing X(1) = 0 for X a (inner_dim x n) matrix, flattened r * n + c."""
    F, n = A.F, A.dim
    rows = []
    for r in range(inner_dim):
        row = {r * n + c: A.unit[c] for c in range(n) if A.unit[c]}
        if row:
            rows.append(row)
    return rows


def multi_derivation_tower(M: FinModule, signature: Sequence[int], method: str = "recursive",
                           budget: int | None = None) -> list:
    """[(frak D_l, D_l)] for l = 1..len(signature), level 0 being M itself."""
    A, F, n = M.A, M.F, M.A.dim
    limit = get_budget(budget)
    Areg = A.regular_module()
    level0 = TensorSpace(M, 0, (), [M.basis(i) for i in range(M.dim)], M.dim, "D")
    tower = [(level0, level0)]
    target_module = M                          # right structure on level-(l-1) ambient
    prev_D = level0
    for l, k in enumerate(signature, start=1):
        inner_dim = prev_D.ambient_dim
        N = inner_dim * n
        if N * max(1, n) ** (k + 1) > limit:
            raise BudgetError(f"level {l} tensor space of size {N} exceeds budget", "budget")
        cons = diff_constraints(Areg, target_module, k, method)
        rows = [{r * n + c: x for r, R in enumerate(C) for c, x in enumerate(R) if x} for C in cons]
        # every slice T(a_l, ...) must lie in D_{l-1}
        for phi in prev_D.annihilator():
            nz = [(r, x) for r, x in enumerate(phi) if x]
            for c in range(n):
                rows.append({r * n + c: x for r, x in nz})
        frak = TensorSpace(M, l, tuple(signature[:l]), kernel_from_sparse(rows, N, F), N, "frakD")
        rows_D = rows + _unit_rows(A, inner_dim)
        D = TensorSpace(M, l, tuple(signature[:l]), kernel_from_sparse(rows_D, N, F), N, "D")
        tower.append((frak, D))
        target_module = _outer_module(A, inner_dim)
        prev_D = D
    return tower


def derivations(A, P: FinModule | None = None):
    """D(P) = {Delta in Diff_1(A, P) : Delta(1) = 0}."""
    if isinstance(A, PolyAlgebra):
        return [NFOperator.d(A, tuple(1 if i == j else 0 for j in range(A.nvars))) for i in range(A.nvars)]
    P = P if P is not None else A.regular_module()
    return multi_derivation_tower(P, (1,))[1][1]


def _check_signature(signature):
    if isinstance(signature, int):
        signature = (1,) * signature
    signature = tuple(signature)
    if len(signature) > MAX_LEVEL or any(k > MAX_ENTRY for k in signature):
        raise BudgetError(f"signature {signature} exceeds the configured limits", "signature")
    if any(k < 0 for k in signature):
        raise FunctorError("signature entries must be non-negative")
    return signature


def multi_derivations(A: FinAlgebra, P: FinModule | None, signature) -> TensorSpace:
    P = P if P is not None else A.regular_module()
    signature = _check_signature(signature)
    if len(signature) == 0:
        return multi_derivation_tower(P, ())[0][1]
    return multi_derivation_tower(P, tuple(signature))[-1][1]


def frak_derivations(A: FinAlgebra, P: FinModule | None, signature) -> TensorSpace:
    P = P if P is not None else A.regular_module()
    signature = _check_signature(signature)
    return multi_derivation_tower(P, tuple(signature))[-1][0]


def splitting_check(A: FinAlgebra, P: FinModule | None, m: int) -> dict:
    """frak D_m = D_{m-1} + D_m with the projections Delta -> Delta(1), Delta -> Delta - i(Delta(1))."""
    P = P if P is not None else A.regular_module()
    F, n = A.F, A.dim
    tower = multi_derivation_tower(P, (1,) * m)
    frak, Dm = tower[m]
    Dm1 = tower[m - 1][1]
    inner = Dm1.ambient_dim
    ok_proj = True
    for v in frak.vectors:
        # value at 1: sum_c unit[c] X[:, c]
        at1 = [F.norm(sum((A.unit[c] * v[r * n + c] for c in range(n)), F.zero)) for r in range(inner)]
        if Dm1.coords(at1) is None:
            ok_proj = False
            continue
        # iota(q)(a) = a_< q : multiply the value by a
        iota = _iota(A, P, m - 1, at1)
        rest = [F.norm(x - y) for x, y in zip(v, iota)]
        if Dm.coords(rest) is None or frak.coords(iota) is None:
            ok_proj = False
    return {
        "m": m, "dim_frakD_m": frak.dim, "dim_D_m-1": Dm1.dim, "dim_D_m": Dm.dim,
        "additive": frak.dim == Dm1.dim + Dm.dim, "projections_ok": ok_proj,
    }


def _iota(A: FinAlgebra, P: FinModule, level: int, q: list) -> list:
    """iota(q)(a) = a . q (value multiplied by a) as a level+1 tensor."""
    F, n = A.F, A.dim
    block = n ** level
    out = [F.zero] * (len(q) * n)
    for c in range(n):
        a = A.basis(c)
        Pa = P.action(a)
        for qi in range(P.dim):
            for qj in range(P.dim):
                x = Pa[qi][qj]
                if x:
                    for t in range(block):
                        y = q[qj * block + t]
                        if y:
                            r = qi * block + t
                            out[r * n + c] = F.norm(out[r * n + c] + x * y)
    return out


def alternating_check(T: TensorSpace) -> bool:
    """Level-2 tensors T(a, b) with T(a, b) = -T(b, a) on all basis pairs."""
    if T.level != 2:
        raise FunctorError("alternating check applies to level 2")
    F, n = T.M.F, T.M.A.dim
    for v in T.vectors:
        for q in range(T.M.dim):
            for a in range(n):
                for b in range(n):
                    # index ((q*n + a1)*n + a2) with a2 outermost
                    x = v[(q * n + b) * n + a]
                    y = v[(q * n + a) * n + b]
                    if F.norm(x + y):
                        return False
    return True


def wedge_pattern_check(poly: PolyAlgebra, D: int = 2) -> dict:
    """On k[x,y]/m^(D+1): every T in D_2 is T(x,y) * (a_x b_y - a_y b_x)."""
    if poly.nvars != 2:
        raise FunctorError("the wedge pattern check needs two variables")
    A = poly.truncated_carrier(D)
    F = A.F
    monos = poly.monomials(D)
    idx = {e: i for i, e in enumerate(monos)}
    n = A.dim
    D2 = multi_derivations(A, None, 2)

    def partial(i, var):
        e = monos[i]
        if e[var] == 0:
            return A.zero()
        f = list(e)
        f[var] -= 1
        v = A.zero()
        v[idx[tuple(f)]] = F(e[var])
        return v

    def T_of(v, a, b):
        # T(a, b) with b the inner slot, a outermost
        return [v[(q * n + b) * n + a] for q in range(n)]

    gx, gy = idx[(1, 0)], idx[(0, 1)]
    ok = True
    values = []
    for v in D2.vectors:
        f = T_of(v, gx, gy)
        values.append(f)
        for a in range(n):
            for b in range(n):
                J = A.sub(A.mul(partial(a, 0), partial(b, 1)), A.mul(partial(a, 1), partial(b, 0)))
                if T_of(v, a, b) != A.mul(f, J):
                    ok = False
    injective = rank(values, F) == D2.dim if values else True
    return {"dim_D2": D2.dim, "generator_rank": 1, "determined_by_T(x,y)": injective,
            "pattern_ok": ok, "alternating": alternating_check(D2)}


def regroup_check(P: FinModule, m: int, n_: int) -> dict:
    """D_{m+n}(P) lies inside D_m(D_n(P)) after regrouping the inner n slots."""
    A = P.A
    big = multi_derivations(A, P, m + n_)
    Dn = multi_derivations(A, P, n_)
    Dn_mod = Dn.left_module()
    outer = multi_derivations(A, Dn_mod, m)
    F, nA = A.F, A.dim
    inner_block = Dn.ambient_dim
    ok = True
    outer_block = nA ** m
    for v in big.vectors:
        w = [F.zero] * (Dn.dim * outer_block)
        for t in range(outer_block):
            col = [v[r * outer_block + t] for r in range(inner_block)]
            c = Dn.coords(col)
            if c is None:
                ok = False
                break
            for j, x in enumerate(c):
                w[j * outer_block + t] = x
        if not ok or outer.coords(w) is None:
            ok = False
            break
    return {"ok": ok, "dim_D_m+n": big.dim, "dim_D_m(D_n)": outer.dim}


# ---------------------------------------------------------------------------
# chain complexes

class ChainComplex:
    """Spaces of given dimensions with maps d_i: C_i -> C_{i+1} (matrices)."""

    def __init__(self, dims: Sequence[int], maps: Sequence, F, labels=None, check=True):
        self.dims = list(dims)
        self.maps = [list(m) for m in maps]
        self.F = F
        self.labels = list(labels) if labels else [f"C{i}" for i in range(len(dims))]
        if len(self.maps) != len(self.dims) - 1:
            raise FunctorError("need one map between consecutive terms")
        if check:
            w = self.dd_witness()
            if w is not None:
                raise InvariantError("d o d != 0", w)

    def dd_witness(self):
        F = self.F
        for i in range(len(self.maps) - 1):
            a, b = self.maps[i], self.maps[i + 1]
            if not a or not b or not a[0] or not b[0]:
                continue
            prod = matmul(b, a, F)
            for r, row in enumerate(prod):
                for c, x in enumerate(row):
                    if x:
                        return {"position": i, "entry": (r, c)}
        return None

    def is_complex(self) -> bool:
        return self.dd_witness() is None

    def homology(self) -> list:
        """[(dim H_i, basis of representatives)] with H_i = ker d_i / im d_{i-1}."""
        F = self.F
        out = []
        for i, d in enumerate(self.dims):
            if i < len(self.maps) and self.maps[i] and d:
                ker = kernel_basis(self.maps[i], F, d)
            else:
                ker = [[F.one if r == c else F.zero for c in range(d)] for r in range(d)]
            if i > 0 and self.maps[i - 1] and self.dims[i - 1]:
                M = self.maps[i - 1]
                im = [[M[r][c] for r in range(d)] for c in range(self.dims[i - 1])]
                im = [v for v in im if any(v)]
            else:
                im = []
            im_basis = rref(im, F, d)[0] if im else []
            rows = im_basis + ker
            reps = []
            current = list(im_basis)
            for v in ker:
                if rank(current + [v], F) > len(current):
                    current.append(v)
                    reps.append(v)
            out.append((len(reps), reps))
        return out

    def homology_dims(self) -> list:
        return [h for h, _ in self.homology()]

    def to_json(self) -> dict:
        return {"labels": self.labels, "dims": self.dims,
                "homology_dims": self.homology_dims(), "dd_zero": self.is_complex()}


def spencer_homology(c: ChainComplex) -> list:
    w = c.dd_witness()
    if w is not None:
        raise InvariantError("d o d != 0", w)
    return c.homology()


# ---------------------------------------------------------------------------
# Diff-Spencer complexes

def _diff_spaces(P: FinModule, top: int) -> list:
    Areg = P.A.regular_module()
    return [DiffSpace(Areg, P, k, "recursive") for k in range(top + 1)]


def spencer_complex(A: FinAlgebra, P: FinModule | None, n: int, budget: int | None = None) -> dict:
    """Sp_n(P): D_n(Diff_0 P) -> D_{n-1}(Diff_1 P) -> ... -> Diff_n(P) -> P."""
    P = P if P is not None else A.regular_module()
    if n > 3:
        raise BudgetError("Spencer complexes are limited to n <= 3", "n")
    F, nA = A.F, A.dim
    diffs = _diff_spaces(P, n)
    terms = []
    for j in range(n + 1):
        V = diffs[j].module(">")
        terms.append(multi_derivations(A, V, n - j) if n - j > 0 else
                     TensorSpace(V, 0, (), [V.basis(i) for i in range(V.dim)], V.dim, "D"))
    maps = []
    for j in range(n):
        maps.append(_spencer_map(A, P, terms[j], terms[j + 1], diffs[j], diffs[j + 1], n - j))
    # Diff_n(P) -> P, X -> X(1)
    ev = unit_evaluation(diffs[n])
    maps.append(ev)
    dims = [t.dim for t in terms] + [P.dim]
    labels = [f"D_{n - j}(Diff_{j} P)" for j in range(n + 1)] + ["P"]
    cx = ChainComplex(dims, maps, F, labels, check=False)
    return {"complex": cx, "terms": terms, "diffs": diffs}


def _spencer_map(A, P, src: TensorSpace, dst: TensorSpace, Vk: DiffSpace, Vk1: DiffSpace, m: int):
    """T(a_m..a_2, b)(1) regrouped: D_m(Diff_k P) -> D_{m-1}(Diff_{k+1} P)."""
    F, nA = A.F, A.dim
    inner = nA ** (m - 1)                       # index block for (a_{m}..a_2) below the value
    cols = []
    for v in src.vectors:
        # v index: ((val * n + a_1) * n + a_2) ... ; a_1 plays the role of b
        w = [F.zero] * dst.ambient_dim
        for t in range(inner):                  # t encodes (a_2..a_m)
            M = [[F.zero] * nA for _ in range(P.dim)]
            for b in range(nA):
                vals = [v[(val * nA + b) * inner + t] for val in range(Vk.dim)]
                if not any(vals):
                    continue
                X = Vk.matrix_of(vals)
                img = matvec(X, A.unit, F)
                for r in range(P.dim):
                    M[r][b] = img[r]
            c = Vk1.coordinates(M)
            if c is None:
                raise InvariantError("Spencer image is not of the expected order", t)
            for val, x in enumerate(c):
                if x:
                    w[val * inner + t] = x
        co = dst.coords(w)
        if co is None:
            raise InvariantError("Spencer image leaves the target multi-derivation space", None)
        cols.append(co)
    return [[cols[c][r] for c in range(src.dim)] for r in range(dst.dim)]


def spencer_inclusion_check(A: FinAlgebra, P: FinModule | None, n: int) -> dict:
    """Sp_n(P) embeds in Sp_{n+1}(P) as a subcomplex (aligned at the P end)."""
    P = P if P is not None else A.regular_module()
    F = A.F
    small = spencer_complex(A, P, n)
    big = spencer_complex(A, P, n + 1)
    incl = []
    ok = True
    for j in range(n + 1):
        s, b = small["terms"][j], big["terms"][j + 1]
        Vs, Vb = small["diffs"][j], big["diffs"][j + 1]
        cols = []
        nA = A.dim
        block = nA ** s.level
        for v in s.vectors:
            w = [F.zero] * b.ambient_dim
            for t in range(block):
                vals = [v[val * block + t] for val in range(Vs.dim)]
                if any(vals):
                    X = Vs.matrix_of(vals)
                    c = Vb.coordinates(X)
                    for val, x in enumerate(c):
                        w[val * block + t] = x
            co = b.coords(w)
            if co is None:
                ok = False
                co = [F.zero] * b.dim
            cols.append(co)
        incl.append([[cols[c][r] for c in range(s.dim)] for r in range(b.dim)])
    ident = [[F.one if i == j else F.zero for j in range(P.dim)] for i in range(P.dim)]
    incl.append(ident)
    cs, cb = small["complex"], big["complex"]
    commutes = True
    for j in range(n + 1):
        lhs = matmul(cb.maps[j + 1], incl[j], F) if incl[j] and incl[j][0] else None
        rhs = matmul(incl[j + 1], cs.maps[j], F) if cs.maps[j] and cs.maps[j][0] else None
        if lhs is not None and rhs is not None and lhs != rhs:
            commutes = False
    injective = all(rank(M, F) == (len(M[0]) if M else 0) for M in incl if M)
    return {"ok": ok and commutes and injective, "commutes": commutes, "injective": injective}


def spencer_chain_map(op, n: int) -> dict:
    """Chain map Sp_n(P) -> Sp_{n+r}(Q) induced by post-composition with op of order r."""
    A, F = op.A, op.F
    r = max(op.order, 0)
    SP = spencer_complex(A, op.P, n)
    SQ = spencer_complex(A, op.Q, n + r)
    maps = []
    ok = True
    for j in range(n + 1):
        s, t = SP["terms"][j], SQ["terms"][j + r]
        Vs, Vt = SP["diffs"][j], SQ["diffs"][j + r]
        block = A.dim ** s.level
        cols = []
        for v in s.vectors:
            w = [F.zero] * t.ambient_dim
            for u in range(block):
                vals = [v[val * block + u] for val in range(Vs.dim)]
                if any(vals):
                    X = matmul(op.matrix, Vs.matrix_of(vals), F)
                    c = Vt.coordinates(X)
                    if c is None:
                        ok = False
                        break
                    for val, x in enumerate(c):
                        w[val * block + u] = x
            co = t.coords(w)
            if co is None:
                ok = False
                co = [F.zero] * t.dim
            cols.append(co)
        maps.append([[cols[c][rr] for c in range(s.dim)] for rr in range(t.dim)])
    maps.append(op.matrix)
    cp, cq = SP["complex"], SQ["complex"]
    commutes = True
    for j in range(n + 1):
        lhs = matmul(cq.maps[j + r], maps[j], F) if maps[j] and maps[j][0] and cq.maps[j + r] else None
        rhs = matmul(maps[j + 1], cp.maps[j], F) if cp.maps[j] and cp.maps[j][0] else None
        if lhs is not None and rhs is not None and lhs != rhs:
            commutes = False
    return {"ok": ok and commutes, "shift": r, "commutes": commutes}


def d_sp_kernel_check(A: FinAlgebra, P: FinModule | None, m: int) -> dict:
    """D_m(P) is the kernel of D_{m-1}(Diff_1 P) -> D_{m-2}(Diff_2 P)."""
    res = spencer_complex(A, P, m)
    cx = res["complex"]
    F = A.F
    d0, d1 = cx.maps[0], cx.maps[1]
    ker_dim = cx.dims[1] - (rank(d1, F) if d1 and d1[0] else 0)
    im_dim = rank(d0, F) if d0 and d0[0] else 0
    return {"dim_D_m": cx.dims[0], "dim_kernel": ker_dim, "injective": im_dim == cx.dims[0],
            "ok": ker_dim == cx.dims[0] and im_dim == cx.dims[0]}
