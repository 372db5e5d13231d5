"""Exact scalars, linear algebra and polynomial expressions over Q and GF(p).

Nothing in this module (or anywhere in the package) touches floating point.
Scalars over Q are :class:`fractions.Fraction`; scalars over GF(p) are
ints in ``range(p)``.  Matrices are lists of rows, vectors are lists.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Iterable, Sequence


class ExactError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Field:
    """Ground field: rationals when ``p`` is None, otherwise GF(p)."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not _is_prime(self.p):
            raise ExactError(f"{self.p} is not prime")

    @property
    def char(self) -> int:
        return self.p or 0

    @property
    def kind(self) -> str:
        return "rationals" if self.p is None else "prime-field"

    def __call__(self, x):
        """Coerce an int or Fraction into the field."""
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    def norm(self, x):
        return x if self.p is None else x % self.p

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("inverse of zero")
        if self.p is None:
            return 1 / Fraction(x)
        return pow(x, -1, self.p)

    def elements(self):
        if self.p is None:
            raise ExactError("cannot enumerate the rationals")
        return range(self.p)

    def to_json(self):
        return "Q" if self.p is None else {"Fp": self.p}

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"


QQ = Field()


def GF(p: int) -> Field:
    return Field(p)


# ---------------------------------------------------------------------------
# dense helpers

def zeros(n: int, F: Field) -> list:
    return [F.zero] * n


def identity(n: int, F: Field) -> list:
    return [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]


def zero_matrix(r: int, c: int, F: Field) -> list:
    return [[F.zero] * c for _ in range(r)]


def matmul(a, b, F: Field) -> list:
    if not a:
        return []
    cols = len(b[0]) if b else 0
    out = []
    bt = list(zip(*b)) if b else []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        out.append([F.norm(sum((x * bt[j][k] for k, x in nz), F.zero)) for j in range(cols)])
    return out


def matvec(a, v, F: Field) -> list:
    nz = [(k, x) for k, x in enumerate(v) if x]
    return [F.norm(sum((row[k] * x for k, x in nz), F.zero)) for row in a]


def transpose(a) -> list:
    return [list(r) for r in zip(*a)] if a else []


def vadd(u, v, F: Field) -> list:
    return [F.norm(x + y) for x, y in zip(u, v)]


def vsub(u, v, F: Field) -> list:
    return [F.norm(x - y) for x, y in zip(u, v)]


def vscale(c, v, F: Field) -> list:
    return [F.norm(c * x) for x in v]


def is_zero_vec(v) -> bool:
    return not any(v)


def is_zero_matrix(m) -> bool:
    return not any(any(r) for r in m)


# ---------------------------------------------------------------------------
# echelon machinery (sparse rows, leftmost pivot, first row wins)

def _rref_sparse(rows: Iterable[dict], F: Field) -> dict:
    """Return {pivot column: row dict} in fully reduced echelon form."""
    piv: dict = {}
    norm = F.norm
    for row in rows:
        r = {k: norm(v) for k, v in row.items() if norm(v)}
        while r:
            c = min(r)
            pr = piv.get(c)
            if pr is None:
                inv = F.inv(r[c])
                piv[c] = {k: norm(v * inv) for k, v in r.items()}
                break
            f = r[c]
            for k, v in pr.items():
                nv = norm(r.get(k, 0) - f * v)
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    for c in sorted(piv, reverse=True):
        row = piv[c]
        for c2 in sorted(k for k in row if k > c and k in piv):
            f = row.get(c2)
            if not f:
                continue
            for k, v in piv[c2].items():
                nv = norm(row.get(k, 0) - f * v)
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return piv


def _dense_rows(m) -> list:
    return [{j: x for j, x in enumerate(r) if x} for r in m]


def rref(m, F: Field, ncols: int | None = None):
    """Reduced row echelon form: (rows, pivot columns)."""
    if ncols is None:
        ncols = len(m[0]) if m else 0
    piv = _rref_sparse(_dense_rows(m), F)
    cols = sorted(piv)
    out = []
    for c in cols:
        row = [F.zero] * ncols
        for k, v in piv[c].items():
            row[k] = v
        out.append(row)
    return out, cols


def rank(m, F: Field) -> int:
    return len(_rref_sparse(_dense_rows(m), F))


def kernel_basis(m, F: Field, ncols: int | None = None) -> list:
    """Basis of {v : m v = 0}, one vector per free column (ascending)."""
    if ncols is None:
        ncols = len(m[0]) if m else 0
    return kernel_from_sparse(_dense_rows(m), ncols, F)


def kernel_from_sparse(rows: Iterable[dict], ncols: int, F: Field) -> list:
    piv = _rref_sparse(rows, F)
    free = [j for j in range(ncols) if j not in piv]
    basis = []
    for f in free:
        v = [F.zero] * ncols
        v[f] = F.one
        for c, row in piv.items():
            x = row.get(f)
            if x:
                v[c] = F.norm(-x)
        basis.append(v)
    # present the kernel in reduced echelon form as well
    return rref(basis, F, ncols)[0] if basis else []


def solve(m, b, F: Field):
    """One solution of m x = b (free variables set to zero), or None."""
    ncols = len(m[0]) if m else 0
    rows = []
    for r, bi in zip(m, b):
        d = {j: x for j, x in enumerate(r) if x}
        if bi:
            d[ncols] = bi
        rows.append(d)
    piv = _rref_sparse(rows, F)
    if ncols in piv:
        return None
    x = [F.zero] * ncols
    for c, row in piv.items():
        x[c] = row.get(ncols, F.zero)
    return x


def image_basis(m, F: Field) -> list:
    """Reduced basis of the column space of m."""
    return row_space(transpose(m), F)


def row_space(vectors, F: Field) -> list:
    if not vectors:
        return []
    return rref(vectors, F, len(vectors[0]))[0]


def intersect(U: list, W: list, n: int, F: Field) -> list:
    """Intersection of the spans of U and W inside F^n (reduced basis)."""
    if not U or not W:
        return []
    # u.x = w.y  <=>  [U^T | -W^T] (x, y) = 0
    m = [[U[i][r] for i in range(len(U))] + [F.norm(-W[j][r]) for j in range(len(W))]
         for r in range(n)]
    sols = kernel_basis(m, F, len(U) + len(W))
    vecs = []
    for s in sols:
        v = [F.zero] * n
        for i, c in enumerate(s[:len(U)]):
            if c:
                v = vadd(v, vscale(c, U[i], F), F)
        vecs.append(v)
    return row_space(vecs, F) if vecs else []


class Coords:
    """Coordinates with respect to a fixed (independent) list of vectors."""

    def __init__(self, basis: Sequence[Sequence], F: Field, n: int | None = None):
        self.F = F
        self.basis = [list(b) for b in basis]
        self.k = len(self.basis)
        self.n = n if n is not None else (len(self.basis[0]) if self.basis else 0)
        rows = []
        for i, b in enumerate(self.basis):
            d = {j: x for j, x in enumerate(b) if x}
            d[self.n + i] = F.one
            rows.append(d)
        piv = _rref_sparse(rows, F)
        self._piv = [(c, r) for c, r in sorted(piv.items()) if c < self.n]
        if len(self._piv) != self.k:
            raise ExactError("basis vectors are linearly dependent")

    def __call__(self, v):
        """Coordinates of v, or None when v is outside the span."""
        F = self.F
        r = {j: x for j, x in enumerate(v) if x}
        coeff = [F.zero] * self.k
        for c, row in self._piv:
            f = r.get(c)
            if not f:
                continue
            for k, x in row.items():
                if k < self.n:
                    nv = F.norm(r.get(k, 0) - f * x)
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
                else:
                    coeff[k - self.n] = F.norm(coeff[k - self.n] + f * x)
        if r:
            return None
        return coeff

    def contains(self, v) -> bool:
        return self(v) is not None

    def combine(self, coeff) -> list:
        F = self.F
        v = [F.zero] * self.n
        for c, b in zip(coeff, self.basis):
            if c:
                for j, x in enumerate(b):
                    if x:
                        v[j] = F.norm(v[j] + c * x)
        return v


class Quotient:
    """Quotient of F^n by the span of relation vectors.

    The quotient basis is the set of non-pivot coordinates of the reduced
    relation echelon form, so reduction is canonical.
    """

    def __init__(self, n: int, relations: Iterable, F: Field):
        self.F = F
        self.n = n
        rows = []
        for r in relations:
            if isinstance(r, dict):
                rows.append(r)
            else:
                rows.append({j: x for j, x in enumerate(r) if x})
        self._piv = _rref_sparse(rows, F)
        self.free = [j for j in range(n) if j not in self._piv]
        self._pos = {j: i for i, j in enumerate(self.free)}
        self.dim = len(self.free)

    def reduce(self, v) -> list:
        F = self.F
        out = [F.zero] * self.dim
        items = v.items() if isinstance(v, dict) else enumerate(v)
        for j, x in items:
            if not x:
                continue
            pr = self._piv.get(j)
            if pr is None:
                i = self._pos[j]
                out[i] = F.norm(out[i] + x)
            else:
                for k, y in pr.items():
                    if k != j:
                        i = self._pos[k]
                        out[i] = F.norm(out[i] - x * y)
        return out

    def lift(self, coords) -> list:
        v = [self.F.zero] * self.n
        for i, c in enumerate(coords):
            v[self.free[i]] = c
        return v

    def relation_rank(self) -> int:
        return len(self._piv)


def binomial(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    r = 1
    for i in range(1, k + 1):
        r = r * (n - k + i) // i
    return r


def factorial(n: int) -> int:
    r = 1
    for i in range(2, n + 1):
        r *= i
    return r


# ---------------------------------------------------------------------------
# multivariate polynomials

def _grlex_key(e):
    return (sum(e), e)


class MPoly:
    """Sparse polynomial: exponent tuple -> nonzero scalar.

    Terms are printed in graded lexicographic order (highest first).
    """

    __slots__ = ("vars", "F", "terms")

    def __init__(self, vars: Sequence[str], F: Field, terms: dict | None = None):
        self.vars = tuple(vars)
        self.F = F
        t = {}
        if terms:
            for e, c in terms.items():
                c = F(c)
                if c:
                    t[tuple(e)] = c
        self.terms = t

    # constructors
    @classmethod
    def const(cls, vars, F, c):
        return cls(vars, F, {(0,) * len(vars): F(c)} if F(c) else {})

    @classmethod
    def var(cls, vars, F, name):
        vars = tuple(vars)
        if name not in vars:
            raise ExactError(f"unknown variable {name!r}")
        e = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, F, {e: F.one})

    @classmethod
    def monomial(cls, vars, F, exps, c=1):
        return cls(vars, F, {tuple(exps): F(c)})

    def _new(self, terms):
        p = MPoly.__new__(MPoly)
        p.vars, p.F, p.terms = self.vars, self.F, terms
        return p

    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.vars != self.vars or other.F != self.F:
                raise ExactError("polynomial ring mismatch")
            return other
        return MPoly.const(self.vars, self.F, other)

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        norm = self.F.norm
        for e, c in other.terms.items():
            v = norm(t.get(e, 0) + c)
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return self._new(t)

    __radd__ = __add__

    def __neg__(self):
        norm = self.F.norm
        return self._new({e: norm(-c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = self.F(other)
            if not c:
                return self._new({})
            norm = self.F.norm
            return self._new({e: norm(v * c) for e, v in self.terms.items()})
        other = self._coerce(other)
        t: dict = {}
        norm = self.F.norm
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return self._new({e: norm(c) for e, c in t.items() if norm(c)})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ExactError("negative power of a polynomial")
        r = MPoly.const(self.vars, self.F, 1)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.vars == other.vars and self.terms == other.terms
        try:
            return self == self._coerce(other)
        except (ExactError, TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(not any(e) for e in self.terms)

    def const_term(self):
        return self.terms.get((0,) * len(self.vars), self.F.zero)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, name: str) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def truncate(self, D: int):
        """(polynomial without terms of total degree > D, whether anything was dropped)."""
        t = {e: c for e, c in self.terms.items() if sum(e) <= D}
        return self._new(t), len(t) != len(self.terms)

    def partial(self, name: str):
        if name not in self.vars:
            raise ExactError(f"unknown variable {name!r}")
        i = self.vars.index(name)
        norm = self.F.norm
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                v = norm(c * e[i])
                if v:
                    ne = list(e)
                    ne[i] -= 1
                    t[tuple(ne)] = v
        return self._new(t)

    def hasse(self, name: str, k: int):
        """Divided-power derivative: x^n -> C(n, k) x^(n-k) in ``name``."""
        i = self.vars.index(name)
        norm = self.F.norm
        t = {}
        for e, c in self.terms.items():
            if e[i] >= k:
                v = norm(c * binomial(e[i], k))
                if v:
                    ne = list(e)
                    ne[i] -= k
                    t[tuple(ne)] = v
        return self._new(t)

    def evaluate(self, values: Sequence):
        F = self.F
        total = F.zero
        for e, c in self.terms.items():
            term = c
            for x, k in zip(values, e):
                if k:
                    term = term * (F(x) ** k)
            total = F.norm(total + term)
        return total

    def substitute(self, images: Sequence["MPoly"]):
        """Compose: replace the i-th variable by images[i] (a common ring)."""
        if not images:
            return self
        target = images[0]
        out = target._new({})
        cache: dict = {}
        for e, c in self.terms.items():
            term = MPoly.const(target.vars, target.F, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            out = out + term
        return out

    def rename(self, vars: Sequence[str]):
        """Embed into a ring whose variables contain ours (missing ones get exponent 0)."""
        vars = tuple(vars)
        idx = [vars.index(v) for v in self.vars]
        t = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for i, k in zip(idx, e):
                ne[i] = k
            t[tuple(ne)] = c
        p = MPoly(vars, self.F)
        p.terms = t
        return p

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda ec: _grlex_key(ec[0]), reverse=True)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(self.vars, e) if k)
            cs = str(c)
            if mono:
                if cs == "1":
                    s = mono
                elif cs == "-1":
                    s = "-" + mono
                else:
                    s = f"({cs})*{mono}" if "/" in cs else f"{cs}*{mono}"
            else:
                s = cs
            parts.append(s)
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self):
        return [[list(e), str(c)] for e, c in self.sorted_terms()]


# ---------------------------------------------------------------------------
# rational expressions

def _sympy_cancel(num: MPoly, den: MPoly):
    """gcd-reduce num/den with sympy (size control only; equality never relies on it)."""
    from sympy import QQ as SQQ, GF as SGF
    from sympy.polys.rings import ring

    F = num.F
    dom = SQQ if F.p is None else SGF(F.p)
    R, *_ = ring(",".join(num.vars), dom) if num.vars else (None,)
    if R is None:
        return num, den
    a = R.from_dict({e: c for e, c in num.terms.items()})
    b = R.from_dict({e: c for e, c in den.terms.items()})
    g = a.gcd(b)
    if g.is_ground:
        return num, den
    a = a.exquo(g)
    b = b.exquo(g)

    def back(p):
        return MPoly(num.vars, F, {e: (Fraction(int(c.numerator), int(c.denominator)) if F.p is None else int(c))
                                   for e, c in p.items()})
    return back(a), back(b)


class RatExpr:
    """Quotient of two polynomials.  Equality is decided by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly | None = None, reduce: bool = True):
        if den is None:
            den = MPoly.const(num.vars, num.F, 1)
        if den.is_zero():
            raise ZeroDivisionError("denominator is identically zero")
        if num.is_zero():
            den = MPoly.const(num.vars, num.F, 1)
        elif reduce and not den.is_const():
            num, den = _sympy_cancel(num, den)
        if den.is_const():
            c = den.const_term()
            if c != 1:
                num = num * den.F.inv(c)
                den = MPoly.const(num.vars, num.F, 1)
        else:
            # normalize leading coefficient of the denominator to 1
            lead = den.sorted_terms()[0][1]
            if lead != 1:
                inv = den.F.inv(lead)
                num, den = num * inv, den * inv
        self.num = num
        self.den = den

    @property
    def vars(self):
        return self.num.vars

    @property
    def F(self):
        return self.num.F

    @classmethod
    def const(cls, vars, F, c):
        return cls(MPoly.const(vars, F, c))

    @classmethod
    def var(cls, vars, F, name):
        return cls(MPoly.var(vars, F, name))

    def _coerce(self, other):
        if isinstance(other, RatExpr):
            return other
        if isinstance(other, MPoly):
            return RatExpr(other)
        return RatExpr.const(self.vars, self.F, other)

    def __add__(self, other):
        o = self._coerce(other)
        if self.den == o.den:
            return RatExpr(self.num + o.num, self.den)
        if o.den.is_const():
            return RatExpr(self.num + o.num * self.den, self.den)
        if self.den.is_const():
            return RatExpr(self.num * o.den + o.num, o.den)
        return RatExpr(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatExpr(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if self.num.is_zero() or o.num.is_zero():
            return RatExpr.const(self.vars, self.F, 0)
        if self.den.is_const() and o.den.is_const():
            return RatExpr(self.num * o.num, reduce=False)
        return RatExpr(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero expression")
        return self * RatExpr(o.den, o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n >= 0:
            return RatExpr(self.num ** n, self.den ** n, reduce=False)
        return RatExpr(self.den ** (-n), self.num ** (-n), reduce=False)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (ExactError, TypeError, ValueError):
            return NotImplemented
        return (self.num * o.den - o.num * self.den).is_zero()

    def __hash__(self):
        raise TypeError("RatExpr is unhashable (equality is by cross-multiplication)")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def partial(self, name: str):
        if name not in self.vars:
            raise ExactError(f"unknown variable {name!r}")
        dn = self.num.partial(name)
        dd = self.den.partial(name)
        if dd.is_zero():
            return RatExpr(dn, self.den)
        return RatExpr(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, values):
        d = self.den.evaluate(values)
        if not d:
            raise ZeroDivisionError("denominator vanishes at this point")
        return self.F.norm(self.num.evaluate(values) * self.F.inv(d))

    def __repr__(self):
        if self.den.is_const():
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"

    def to_json(self):
        return str(self)


# ---------------------------------------------------------------------------
# expression parser: integers, names, + - * / ^, parentheses

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(s: str):
    pos = 0
    toks = []
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ExactError(f"cannot parse expression at {s[pos:]!r}")
        num, name, op = m.groups()
        toks.append(("num", int(num)) if num else ("name", name) if name else ("op", "^" if op == "**" else op))
        pos = m.end()
        while pos < len(s) and s[pos].isspace():
            pos += 1
    return toks


def parse_expr(text: str, vars: Sequence[str], F: Field = QQ) -> RatExpr:
    """Parse a rational expression over the given coordinate names."""
    toks = _tokenize(str(text))
    i = 0

    def peek():
        return toks[i] if i < len(toks) else (None, None)

    def take():
        nonlocal i
        t = peek()
        i += 1
        return t

    def atom():
        kind, val = take()
        if kind == "num":
            return RatExpr.const(vars, F, val)
        if kind == "name":
            if val not in vars:
                raise ExactError(f"unknown name {val!r}")
            return RatExpr.var(vars, F, val)
        if (kind, val) == ("op", "("):
            e = expr()
            if take() != ("op", ")"):
                raise ExactError("missing ')'")
            return e
        raise ExactError(f"unexpected token {val!r}")

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            sign = 1
            if peek() == ("op", "-"):
                take()
                sign = -1
            kind, val = take()
            if kind != "num":
                raise ExactError("exponents must be integer literals")
            return base ** (sign * val)
        return base

    def unary():
        if peek() == ("op", "-"):
            take()
            return -unary()
        if peek() == ("op", "+"):
            take()
            return unary()
        return power()

    def term():
        e = unary()
        while peek() in (("op", "*"), ("op", "/")):
            _, op = take()
            r = unary()
            e = e * r if op == "*" else e / r
        return e

    def expr():
        e = term()
        while peek() in (("op", "+"), ("op", "-")):
            _, op = take()
            r = term()
            e = e + r if op == "+" else e - r
        return e

    out = expr()
    if i != len(toks):
        raise ExactError(f"trailing input in {text!r}")
    return out


def all_vectors(F: Field, n: int):
    """Every vector of F^n in lexicographic order (prime fields only)."""
    return iproduct(F.elements(), repeat=n)


class BudgetError(ExactError):
    """A configured size budget or truncation bound is insufficient."""

    def __init__(self, msg, parameter=None):
        super().__init__(msg)
        self.parameter = parameter


class InvariantError(ExactError):
    """An internal identity that must hold exactly was violated."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


DEFAULT_BUDGET = 10 ** 6


def get_budget(override: int | None = None) -> int:
    """Computation budget: explicit override, else $DCALC_BUDGET, else 10^6."""
    import os

    if override is not None:
        return int(override)
    env = os.environ.get("DCALC_BUDGET")
    return int(env) if env else DEFAULT_BUDGET
