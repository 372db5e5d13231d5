"""Levi-Civita forms of covariant 2-tensors, curvature, Ricci and the τ = g + ω decomposition.

Internally every component is a polynomial over a product of powers of a
few fixed denominators (the common denominator of τ and det g), so the
heavy arithmetic is polynomial; results are exported as reduced RatExpr.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .exactcore import QQ, ExactError, MPoly, RatExpr, parse_expr


class RiemannError(ExactError):
    def __init__(self, msg, minor=None):
        super().__init__(msg)
        self.minor = minor


CONVENTIONS = {
    "gamma": "γ_ijk = τ_ik,j + τ_kj,i − τ_ij,k (τ_ij,k = ∂_k τ_ij)",
    "levi_civita": "Γ^α_ij = ½ g^{αk} γ_ijk (the γ_kji index order would not give the "
                   "classical symbols for symmetric τ)",
    "curvature": "R^α_ijk = ∂_iΓ^α_jk − ∂_jΓ^α_ik + Γ^α_iβΓ^β_jk − Γ^α_jβΓ^β_ik",
    "ricci": "R_ik = R^j_ijk",
    "antisymmetrization": "∂_[m ω_il] = c' (∂_m ω_il + ∂_i ω_lm + ∂_l ω_mi)",
}


class _Frac:
    """num / prod(bases[i] ** exps[i]); num is a sympy ring element, bases are shared."""

    __slots__ = ("num", "exps", "ctx")

    def __init__(self, num, exps: tuple, ctx: "_Ctx"):
        self.num, self.exps, self.ctx = num, exps, ctx

    def _align(self, other):
        ctx = self.ctx
        if self.exps == other.exps:
            return self.num, other.num, self.exps
        e = tuple(max(a, b) for a, b in zip(self.exps, other.exps))
        n1 = self.num * ctx.power(tuple(x - y for x, y in zip(e, self.exps)))
        n2 = other.num * ctx.power(tuple(x - y for x, y in zip(e, other.exps)))
        return n1, n2, e

    def __add__(self, other):
        if not other.num:
            return self
        if not self.num:
            return other
        n1, n2, e = self._align(other)
        return _Frac(n1 + n2, e, self.ctx)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return _Frac(-self.num, self.exps, self.ctx)

    def __mul__(self, other):
        if isinstance(other, _Frac):
            if not self.num or not other.num:
                return self.ctx.zero
            return _Frac(self.num * other.num, tuple(a + b for a, b in zip(self.exps, other.exps)), self.ctx)
        return _Frac(self.num * self.ctx.scalar(other), self.exps, self.ctx)

    def is_zero(self) -> bool:
        return not self.num

    def partial(self, name):
        ctx = self.ctx
        x = ctx.gen[name]
        if not self.num:
            return self
        if not any(self.exps):
            return _Frac(self.num.diff(x), self.exps, ctx)
        # d(n / prod f^e) = (n' prod f - n sum e_i f_i' prod_{j != i} f_j) / prod f^(e+1)
        k = len(self.exps)
        active = [i for i, e in enumerate(self.exps) if e]
        top = self.num.diff(x) * ctx.power(tuple(1 if i in active else 0 for i in range(k)))
        for i in active:
            db = ctx.bases[i].diff(x)
            if db:
                others = ctx.power(tuple(1 if (j in active and j != i) else 0 for j in range(k)))
                top = top - self.num * db * others * self.exps[i]
        e = tuple(v + 1 if i in active else v for i, v in enumerate(self.exps))
        return _Frac(top, e, ctx)

    def to_rat(self) -> RatExpr:
        ctx = self.ctx
        return RatExpr(ctx.to_mpoly(self.num), ctx.to_mpoly(ctx.power(self.exps)))


class _Ctx:
    """Polynomial ring (sympy sparse polys over QQ) plus the shared denominator bases."""

    def __init__(self, vars):
        from sympy import QQ as SQQ
        from sympy.polys.rings import ring

        self.vars = list(vars)
        self.dom = SQQ
        self.R, *gens = ring(",".join(self.vars), SQQ)
        self.gen = dict(zip(self.vars, gens))
        self.bases = []
        self._cache = {}

    def set_bases(self, bases):
        self.bases = [b for b in bases if not b.is_ground]
        self._cache = {}
        self.zero = _Frac(self.R.zero, (0,) * len(self.bases), self)

    def scalar(self, c):
        c = Fraction(c)
        return self.dom(c.numerator, c.denominator)

    def from_mpoly(self, p: MPoly):
        return self.R.from_dict({e: self.dom(c.numerator, c.denominator) for e, c in p.terms.items()})

    def to_mpoly(self, p) -> MPoly:
        return MPoly(self.vars, QQ, {tuple(e): Fraction(int(c.numerator), int(c.denominator))
                                     for e, c in p.items()})

    def power(self, exps):
        p = self._cache.get(exps)
        if p is None:
            p = self.R.one
            for b, e in zip(self.bases, exps):
                if e:
                    p = p * b ** e
            self._cache[exps] = p
        return p

    def frac(self, p, exps=None) -> _Frac:
        return _Frac(p, exps or (0,) * len(self.bases), self)


# ---------------------------------------------------------------------------
# tensors

@dataclass
class CovariantTensor2:
    n: int
    coords: list
    tau: list                      # n x n RatExpr

    @classmethod
    def from_json(cls, doc) -> "CovariantTensor2":
        if isinstance(doc, str):
            doc = json.loads(doc)
        n, coords = int(doc["n"]), list(doc["coords"])
        if len(coords) != n or len(doc["tau"]) != n or any(len(r) != n for r in doc["tau"]):
            raise RiemannError("tau must be an n x n array over n coordinates")
        tau = [[parse_expr(str(x), coords, QQ) for x in row] for row in doc["tau"]]
        return cls(n, coords, tau)

    @classmethod
    def from_parts(cls, coords, g, omega=None) -> "CovariantTensor2":
        n = len(coords)
        conv = lambda x: x if isinstance(x, RatExpr) else parse_expr(str(x), coords, QQ)
        g = [[conv(x) for x in r] for r in g]
        if omega is None:
            return cls(n, list(coords), g)
        omega = [[conv(x) for x in r] for r in omega]
        return cls(n, list(coords), [[g[i][j] + omega[i][j] for j in range(n)] for i in range(n)])

    def sym(self) -> list:
        h = RatExpr.const(self.coords, QQ, Fraction(1, 2))
        return [[(self.tau[i][j] + self.tau[j][i]) * h for j in range(self.n)] for i in range(self.n)]

    def skew(self) -> list:
        h = RatExpr.const(self.coords, QQ, Fraction(1, 2))
        return [[(self.tau[i][j] - self.tau[j][i]) * h for j in range(self.n)] for i in range(self.n)]

    def to_json(self):
        return {"n": self.n, "coords": self.coords, "tau": [[repr(x) for x in r] for r in self.tau]}


def _det(M, one):
    n = len(M)
    if n == 0:
        return one
    if n == 1:
        return M[0][0]
    total = one * 0
    for j in range(n):
        if not M[0][j]:
            continue
        minor = [r[:j] + r[j + 1:] for r in M[1:]]
        term = M[0][j] * _det(minor, one)
        total = total - term if j % 2 else total + term
    return total


def _setup(t: CovariantTensor2):
    """Context with the common τ denominator L and det of the symmetric numerator part."""
    n = t.n
    ctx = _Ctx(t.coords)
    R = ctx.R
    L = R.one
    seen = []
    for r in t.tau:
        for x in r:
            if not x.den.is_const() and all(x.den != d for d in seen):
                seen.append(x.den)
                L = L * ctx.from_mpoly(x.den)
    # τ_ij = T_ij / L with polynomial T
    T = []
    for r in t.tau:
        row = []
        for x in r:
            q, rem = L.div(ctx.from_mpoly(x.den))
            if rem:
                raise RiemannError("internal: inexact division")
            row.append(ctx.from_mpoly(x.num) * q)
        T.append(row)
    half = ctx.scalar(Fraction(1, 2))
    S = [[(T[i][j] + T[j][i]) * half for j in range(n)] for i in range(n)]
    W = [[(T[i][j] - T[j][i]) * half for j in range(n)] for i in range(n)]
    D = _det(S, R.one)
    if not D:
        raise RiemannError("symmetric part g is degenerate", _vanishing_minor(S, R.one))
    ctx.set_bases([L, D])
    exps_L = tuple(1 if b is L else 0 for b in ctx.bases)
    exps_D = tuple(1 if b is D else 0 for b in ctx.bases)
    g = [[ctx.frac(S[i][j], exps_L) for j in range(n)] for i in range(n)]
    w = [[ctx.frac(W[i][j], exps_L) for j in range(n)] for i in range(n)]
    tau = [[ctx.frac(T[i][j], exps_L) for j in range(n)] for i in range(n)]
    # g^{-1} = L adj(S) / D
    dinv = R.one if not D.is_ground else R.one * (ctx.dom.one / D.LC)
    ginv = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:i] + r[i + 1:] for k, r in enumerate(S) if k != j]
            c = _det(minor, R.one) if n > 1 else R.one
            if (i + j) % 2:
                c = -c
            ginv[i][j] = ctx.frac(c * L * dinv, exps_D)
    return ctx, tau, g, w, ginv


def _vanishing_minor(S, one):
    n = len(S)
    for k in range(1, n + 1):
        if not _det([r[:k] for r in S[:k]], one):
            return {"leading_principal_minor": k}
    return {"leading_principal_minor": n}


# ---------------------------------------------------------------------------
# Christoffel data and curvature

@dataclass
class LeviCivitaForm:
    tensor: CovariantTensor2
    ctx: _Ctx
    gamma_first: list              # γ_ijk as _Frac
    Gamma: list                    # Γ^α_ij as _Frac, index [α][i][j]
    g: list
    ginv: list
    omega: list
    conventions: dict = field(default_factory=lambda: dict(CONVENTIONS))

    @property
    def n(self):
        return self.tensor.n

    def Gamma_rat(self, a, i, j) -> RatExpr:
        return self.Gamma[a][i][j].to_rat()

    def nonzero(self) -> dict:
        out = {}
        for a in range(self.n):
            for i in range(self.n):
                for j in range(self.n):
                    if not self.Gamma[a][i][j].is_zero():
                        out[(a + 1, i + 1, j + 1)] = self.Gamma_rat(a, i, j)
        return out

    def metric_compatibility(self) -> bool:
        """g_ij,k − Γ^α_ki g_αj − Γ^α_kj g_iα = 0."""
        n, v = self.n, self.ctx.vars
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    t = self.g[i][j].partial(v[k])
                    for a in range(n):
                        t = t - self.Gamma[a][k][i] * self.g[a][j] - self.Gamma[a][k][j] * self.g[i][a]
                    if not t.is_zero():
                        return False
        return True

    def to_json(self) -> dict:
        return {"conventions": self.conventions,
                "Gamma": {f"{a},{i},{j}": repr(x) for (a, i, j), x in sorted(self.nonzero().items())}}


def _christoffel(ctx, T, ginv, vars):
    n = len(T)
    d = [[[T[i][j].partial(vars[k]) for k in range(n)] for j in range(n)] for i in range(n)]
    gamma = [[[d[i][k][j] + d[k][j][i] - d[i][j][k] for k in range(n)] for j in range(n)] for i in range(n)]
    half = Fraction(1, 2)
    Gamma = [[[None] * n for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for i in range(n):
            for j in range(n):
                s = ctx.zero
                for k in range(n):
                    if not ginv[a][k].is_zero():
                        s = s + ginv[a][k] * gamma[i][j][k]
                Gamma[a][i][j] = s * half
    return gamma, Gamma


def christoffel_data(t: CovariantTensor2, metric_only: bool = False) -> LeviCivitaForm:
    """Levi-Civita form of τ; with metric_only, of its symmetric part over the same denominators."""
    ctx, tau, g, w, ginv = _setup(t)
    gamma, Gamma = _christoffel(ctx, g if metric_only else tau, ginv, t.coords)
    return LeviCivitaForm(t, ctx, gamma, Gamma, g, ginv, w)


@dataclass
class CurvatureData:
    form: LeviCivitaForm
    R: list                        # R[α][i][j][k]
    ricci: list                    # R_ik

    def ricci_rat(self):
        return [[x.to_rat() for x in r] for r in self.ricci]

    def is_flat(self) -> bool:
        return all(x.is_zero() for a in self.R for b in a for c in b for x in c)

    def antisymmetric(self) -> bool:
        n = self.form.n
        return all((self.R[a][i][j][k] + self.R[a][j][i][k]).is_zero()
                   for a in range(n) for i in range(n) for j in range(n) for k in range(n))

    def bianchi(self) -> bool:
        n = self.form.n
        return all((self.R[a][i][j][k] + self.R[a][j][k][i] + self.R[a][k][i][j]).is_zero()
                   for a in range(n) for i in range(n) for j in range(n) for k in range(n))

    def scalar(self) -> RatExpr:
        """g^{ik} R_ik."""
        f, s = self.form, self.form.ctx.zero
        for i in range(f.n):
            for k in range(f.n):
                s = s + f.ginv[i][k] * self.ricci[i][k]
        return s.to_rat()

    def ricci_ratio_to_metric(self):
        """Constant c with Ric = c g, or None."""
        form = self.form
        n = form.n
        c = None
        for i in range(n):
            for j in range(n):
                r, g = self.ricci[i][j], form.g[i][j]
                if g.is_zero():
                    if not r.is_zero():
                        return None
                    continue
                ratio = _const_ratio(r, g)
                if ratio is None or (c is not None and ratio != c):
                    return None
                c = ratio
        return c


def _const_ratio(a: _Frac, b: _Frac):
    """c with a = c b when such a constant exists."""
    n1, n2, _ = a._align(b)
    if not n2:
        return None
    if not n1:
        return Fraction(0)
    m, lc = n2.LM, n2.LC
    c1 = n1.get(m)
    if c1 is None:
        return None
    c = c1 / lc
    if n1 - n2 * c:
        return None
    return Fraction(int(c.numerator), int(c.denominator))


def _ricci(form: LeviCivitaForm) -> list:
    """R_ik = R^j_ijk contracted directly, without the full curvature tensor."""
    n, v, G, ctx = form.n, form.ctx.vars, form.Gamma, form.ctx
    trace = [ctx.zero] * n                           # Γ^j_jβ
    for b in range(n):
        for j in range(n):
            trace[b] = trace[b] + G[j][j][b]
    ric = [[None] * n for _ in range(n)]
    for i in range(n):
        for k in range(n):
            t = ctx.zero
            for j in range(n):
                t = t + G[j][j][k].partial(v[i]) - G[j][i][k].partial(v[j])
                for b in range(n):
                    t = t + G[j][i][b] * G[b][j][k]
            for b in range(n):
                t = t - trace[b] * G[b][i][k]
            ric[i][k] = t
    return ric


def curvature(form: LeviCivitaForm) -> CurvatureData:
    n, v, G = form.n, form.ctx.vars, form.Gamma
    dG = [[[[G[a][j][k].partial(v[i]) for k in range(n)] for j in range(n)] for a in range(n)] for i in range(n)]
    R = [[[[None] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if j < i:
                        R[a][i][j][k] = -R[a][j][i][k]
                        continue
                    t = dG[i][a][j][k] - dG[j][a][i][k]
                    for b in range(n):
                        t = t + G[a][i][b] * G[b][j][k] - G[a][j][b] * G[b][i][k]
                    R[a][i][j][k] = t
    ricci = [[None] * n for _ in range(n)]
    for i in range(n):
        for k in range(n):
            s = form.ctx.zero
            for j in range(n):
                s = s + R[j][i][j][k]
            ricci[i][k] = s
    return CurvatureData(form, R, ricci)


# ---------------------------------------------------------------------------
# the τ = g + ω decomposition

def _H(form: LeviCivitaForm):
    """H_ijk = ∂_i ω_jk + ∂_j ω_ki + ∂_k ω_ij."""
    n, v, w = form.n, form.ctx.vars, form.omega
    dw = [[[w[j][k].partial(v[i]) for k in range(n)] for j in range(n)] for i in range(n)]
    return [[[dw[i][j][k] + dw[j][k][i] + dw[k][i][j] for k in range(n)] for j in range(n)] for i in range(n)]


def _decomposition_terms(t: CovariantTensor2):
    form = christoffel_data(t)
    ctx, n, v = form.ctx, form.n, form.ctx.vars
    ric = _ricci(form)
    gamma_g, Gamma_g = _christoffel(ctx, form.g, form.ginv, v)
    form_g = LeviCivitaForm(t, ctx, gamma_g, Gamma_g, form.g, form.ginv, form.omega)
    ric_g = _ricci(form_g)
    H = _H(form)
    gi = form.ginv
    # Q_ij = g^{kl} g^{mp} H_mil H_kjp = Σ_{k,m} A[i][k][m] B[j][k][m]
    A = [[[sum((gi[k][l] * H[m][i][l] for l in range(n) if not gi[k][l].is_zero()), ctx.zero)
           for m in range(n)] for k in range(n)] for i in range(n)]
    B = [[[sum((gi[m][p] * H[k][j][p] for p in range(n) if not gi[m][p].is_zero()), ctx.zero)
           for m in range(n)] for k in range(n)] for j in range(n)]
    Q = [[sum((A[i][k][m] * B[j][k][m] for k in range(n) for m in range(n)), ctx.zero)
          for j in range(n)] for i in range(n)]
    G0 = form_g.Gamma
    nablaH = [[[[None] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                for m in range(n):
                    s = H[i][j][m].partial(v[k])
                    for p in range(n):
                        s = s - G0[p][k][i] * H[p][j][m] - G0[p][k][j] * H[i][p][m] - G0[p][k][m] * H[i][j][p]
                    nablaH[k][i][j][m] = s
    Div = [[ctx.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            s = ctx.zero
            for k in range(n):
                for m in range(n):
                    if not gi[k][m].is_zero():
                        s = s + gi[k][m] * nablaH[k][i][j][m]
            Div[i][j] = s
    return form, ric, ric_g, Q, Div, nablaH


def _exps(k, total):
    if k == 0:
        if total == 0:
            yield ()
        return
    for a in range(total + 1):
        for rest in _exps(k - 1, total - a):
            yield (a,) + rest


@dataclass
class Calibration:
    kappa: Fraction
    lam: Fraction

    @property
    def c_prime_squared(self) -> Fraction:
        return self.kappa * 16 / 9

    def c_prime(self):
        c2 = self.c_prime_squared
        if c2 < 0:
            return None
        num, den = _isqrt(c2.numerator), _isqrt(c2.denominator)
        if num is None or den is None:
            return None
        return Fraction(num, den)

    def to_json(self) -> dict:
        c = self.c_prime()
        return {"kappa": str(self.kappa), "lambda": str(self.lam),
                "c_prime_squared": str(self.c_prime_squared),
                "c_prime": str(c) if c is not None else None,
                "coefficient_9_16_real_under_calibration": self.c_prime_squared >= 0,
                "c_prime_squared_with_opposite_curvature_sign": str(-self.c_prime_squared),
                "normalization": CONVENTIONS["antisymmetrization"]}


def _isqrt(x: int):
    import math
    if x < 0:
        return None
    r = math.isqrt(x)
    return r if r * r == x else None


def calibrate(t: CovariantTensor2) -> Calibration:
    """Solve Ric(τ) = Ric(g) + κ Q + λ Div for the constants on one generic example."""
    form, ric, ric_g, Q, Div, _ = _decomposition_terms(t)
    n = form.n
    kappa = lam = None
    for i in range(n):
        for j in range(n):
            diff = ric[i][j] - ric_g[i][j]
            sym = (diff + (ric[j][i] - ric_g[j][i])) * Fraction(1, 2)
            asym = (diff - (ric[j][i] - ric_g[j][i])) * Fraction(1, 2)
            if kappa is None and not Q[i][j].is_zero():
                kappa = _const_ratio(sym, Q[i][j])
            if lam is None and not Div[i][j].is_zero():
                lam = _const_ratio(asym, Div[i][j])
    if kappa is None or lam is None:
        raise RiemannError("calibration example is not generic enough")
    return Calibration(kappa, lam)


def ricci_tau_residual(t: CovariantTensor2, calibration: Calibration | None = None) -> dict:
    form, ric, ric_g, Q, Div, nablaH = _decomposition_terms(t)
    n = form.n
    cal = calibration
    if cal is None:
        cal = DEFAULT_CALIBRATION
    first = [[ric_g[i][j] + Q[i][j] * cal.kappa for j in range(n)] for i in range(n)]
    identity = all((ric[i][j] - ric_g[i][j] - Q[i][j] * cal.kappa - Div[i][j] * cal.lam).is_zero()
                   for i in range(n) for j in range(n))
    second_zero = all(x.is_zero() for a in nablaH for b in a for c in b for x in c)
    first_zero = all(x.is_zero() for r in first for x in r)
    sym_equals_first = all(((ric[i][j] + ric[j][i]) * Fraction(1, 2) - first[i][j]).is_zero()
                           for i in range(n) for j in range(n))
    first_equals_direct = all((ric[i][j] - first[i][j]).is_zero() for i in range(n) for j in range(n))
    return {
        "conventions": dict(CONVENTIONS),
        "calibration": cal.to_json(),
        "first_residual_zero": first_zero,
        "first_residual": [[repr(x.to_rat()) for x in r] for r in first],
        "second_residual_zero": second_zero,
        "decomposition_identity": identity,
        "symmetric_part_equals_first_residual": sym_equals_first,
        "first_residual_equals_direct_ricci": first_equals_direct,
        "ricci_tau": [[repr(x.to_rat()) for x in r] for r in ric],
        "ricci_tau_zero": all(x.is_zero() for r in ric for x in r),
    }


# ---------------------------------------------------------------------------
# sample generators

def random_poly(coords, rng: random.Random, degree: int, lo=-3, hi=3, const=None) -> RatExpr:
    n = len(coords)
    terms = {}
    for e in _monomials(n, degree):
        c = rng.randint(lo, hi)
        if c:
            terms[e] = Fraction(c)
    if const is not None:
        terms[(0,) * n] = Fraction(const)
    return RatExpr(MPoly(coords, QQ, terms))


def _monomials(n, degree):
    for total in range(degree + 1):
        yield from _exps(n, total)


def random_metric(coords, rng: random.Random, degree: int = 1, diagonal: bool = False) -> list:
    """Symmetric polynomial matrix, non-degenerate: at the origin it is diagonal with nonzero entries."""
    n = len(coords)
    zero = RatExpr.const(coords, QQ, 0)
    g = [[zero] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = random_poly(coords, rng, degree, const=rng.choice([1, 2, 3]))
        for j in range(i + 1, n):
            if not diagonal:
                p = random_poly(coords, rng, degree, -1, 1, const=0)
                g[i][j] = g[j][i] = p
    return g


def random_skew(coords, rng: random.Random, degree: int = 2) -> list:
    n = len(coords)
    zero = RatExpr.const(coords, QQ, 0)
    w = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            p = random_poly(coords, rng, degree, -2, 2)
            w[i][j] = p
            w[j][i] = -p
    return w


def _calibration_example() -> CovariantTensor2:
    coords = ["x1", "x2", "x3"]
    g = [["1 + x1", "0", "0"], ["0", "2", "0"], ["0", "0", "1 + x2"]]
    w = [["0", "x2*x3", "x1^2"], ["-x2*x3", "0", "x1*x3 + x2"], ["-x1^2", "-x1*x3 - x2", "0"]]
    return CovariantTensor2.from_parts(coords, g, w)


_DEFAULT = None


def default_calibration() -> Calibration:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = calibrate(_calibration_example())
    return _DEFAULT


class _LazyCal:
    def __getattr__(self, name):
        return getattr(default_calibration(), name)


DEFAULT_CALIBRATION = _LazyCal()
