"""Sparse polynomials over prime-power symbols with exact rational coefficients,
plus the univariate tools (gcd, rational roots, resultants) the solver needs."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, NamedTuple, Union

from .sieve import factorize


class Sym(NamedTuple):
    """The unknown f(p**e). Tuple order gives the canonical (p, e) ordering."""

    p: int
    e: int

    @property
    def value(self) -> int:
        return self.p**self.e

    def __str__(self) -> str:
        return f"f({self.value})"

    @property
    def key(self) -> str:
        return f"{self.p}^{self.e}"

    @classmethod
    def parse(cls, key: str) -> "Sym":
        p, e = key.split("^")
        return cls(int(p), int(e))


Monomial = tuple  # tuple[tuple[Sym, int], ...], sorted by Sym
Scalar = Union[int, Fraction]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for s, k in b:
        d[s] = d.get(s, 0) + k
    return tuple(sorted(d.items()))


class Poly:
    """Immutable sparse polynomial: {monomial: coefficient}, zero terms dropped."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        self.terms: dict[Monomial, Fraction] = {
            m: Fraction(c) for m, c in (terms or {}).items() if c}
        self._hash = None

    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls({(): c})

    @classmethod
    def var(cls, s: Sym) -> "Poly":
        return cls({((s, 1),): 1})

    @classmethod
    def of_argument(cls, n: int) -> "Poly":
        """f(n) encoded through multiplicativity: product of prime-power symbols."""
        mono = tuple((Sym(p, e), 1) for p, e in factorize(n))
        return cls({mono: 1})

    # arithmetic
    def __add__(self, other) -> "Poly":
        other = _as_poly(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Poly":
        other = _as_poly(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # inspection
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def syms(self) -> set[Sym]:
        return {s for m in self.terms for s, _ in m}

    def total_degree(self) -> int:
        return max((sum(k for _, k in m) for m in self.terms), default=0)

    def degree(self, s: Sym) -> int:
        return max((k for m in self.terms for t, k in m if t == s), default=0)

    def collect(self, s: Sym) -> dict[int, "Poly"]:
        """Coefficients as polynomials in the remaining symbols, keyed by power of s."""
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            k = 0
            rest = []
            for t, j in m:
                if t == s:
                    k = j
                else:
                    rest.append((t, j))
            bucket = out.setdefault(k, {})
            bucket[tuple(rest)] = bucket.get(tuple(rest), 0) + c
        return {k: Poly(v) for k, v in out.items()}

    def solve_linear_for(self, s: Sym) -> "Poly | None":
        """If self = c*s + rest with constant c != 0 and s absent from rest, return -rest/c."""
        parts = self.collect(s)
        if set(parts) - {0, 1} or 1 not in parts:
            return None
        c = parts[1]
        if not c.is_constant():
            return None
        rest = parts.get(0, Poly())
        return rest * Fraction(-1, 1) * (1 / c.constant())

    def subs(self, values: Mapping[Sym, Scalar | "Poly"]) -> "Poly":
        """Substitute numbers or polynomials; a factor assigned 0 kills its monomial."""
        if not values:
            return self
        out = Poly()
        acc: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            coef = Fraction(c)
            keep = []
            poly_factor = None
            for s, k in m:
                if s in values:
                    v = values[s]
                    if isinstance(v, Poly):
                        term = v**k
                        poly_factor = term if poly_factor is None else poly_factor * term
                    else:
                        coef *= Fraction(v) ** k
                        if not coef:
                            break
                else:
                    keep.append((s, k))
            if not coef:
                continue
            if poly_factor is None:
                mono = tuple(keep)
                acc[mono] = acc.get(mono, 0) + coef
            else:
                out = out + poly_factor * Poly({tuple(keep): coef})
        return out + Poly(acc)

    def evaluate(self, values: Mapping[Sym, Scalar]) -> Fraction:
        r = self.subs(values)
        if not r.is_constant():
            raise ValueError(f"unassigned symbols {sorted(r.syms())}")
        return r.constant()

    def univariate(self, s: Sym) -> list[Fraction]:
        """Coefficient list (low to high) of a polynomial in s alone."""
        if self.syms() - {s}:
            raise ValueError(f"{self} is not univariate in {s}")
        coeffs = [Fraction(0)] * (self.degree(s) + 1)
        for m, c in self.terms.items():
            coeffs[m[0][1] if m else 0] += c
        return coeffs

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        def key(item):
            m = item[0]
            return (-sum(k for _, k in m), [(-s.value, -k) for s, k in m])
        return sorted(self.terms.items(), key=key)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            body = "*".join(str(s) if k == 1 else f"{s}^{k}" for s, k in m)
            if not body:
                txt = str(abs(c))
            elif abs(c) == 1:
                txt = body
            else:
                txt = f"{abs(c)}*{body}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, txt))
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return " ".join([head] + [f"{s} {t}" for s, t in parts[1:]])

    def __repr__(self) -> str:
        return f"Poly({self})"


def _as_poly(x) -> Poly:
    return x if isinstance(x, Poly) else Poly.const(x)


# ---- univariate helpers: coefficient lists, lowest degree first ----

def u_trim(a: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def u_eval(a: list[Fraction], x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(a):
        out = out * x + c
    return out


def u_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a, b = u_trim(a), u_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        c = r[-1] / b[-1]
        q[shift] = c
        for i, bc in enumerate(b):
            r[i + shift] -= c * bc
        r = u_trim(r)
    return q, r


def u_monic(a: list[Fraction]) -> list[Fraction]:
    a = u_trim(a)
    return [c / a[-1] for c in a] if a else a


def u_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = u_trim(a), u_trim(b)
    while b:
        a, b = b, u_divmod(a, b)[1]
    return u_monic(a)


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return divs


def rational_roots(a: list[Fraction]) -> tuple[list[tuple[Fraction, int]], list[Fraction]]:
    """Rational roots with multiplicity, and the cofactor left after removing them.

    Candidates come from the rational root theorem on the integer-scaled
    polynomial; each is confirmed by exact evaluation.
    """
    a = u_trim(a)
    if not a:
        raise ValueError("the zero polynomial has every root")
    den = reduce(math.lcm, (c.denominator for c in a), 1)
    rest = [c * den for c in a]
    roots: list[tuple[Fraction, int]] = []
    k = 0
    while rest and not rest[0]:
        rest = rest[1:]
        k += 1
    if k:
        roots.append((Fraction(0), k))
    if len(rest) > 1:
        lead, const = int(abs(rest[-1])), int(abs(rest[0]))
        cands = sorted({Fraction(s * p, q) for p in _divisors(const)
                        for q in _divisors(lead) for s in (1, -1)})
        for r in cands:
            mult = 0
            while len(rest) > 1 and u_eval(rest, r) == 0:
                rest = u_divmod(rest, [-r, Fraction(1)])[0]
                mult += 1
            if mult:
                roots.append((r, mult))
    roots.sort()
    return roots, u_monic(rest)


def _det(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] / m[c][c]
                for j in range(c, n):
                    m[r][j] -= f * m[c][j]
    return det


def _sylvester(a: list[Fraction], b: list[Fraction]) -> list[list[Fraction]]:
    # a, b low-to-high with formal degrees len-1
    da, db = len(a) - 1, len(b) - 1
    size = da + db
    rows = []
    for i in range(db):
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(a)):
            row[i + j] = c
        rows.append(row)
    for i in range(da):
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(b)):
            row[i + j] = c
        rows.append(row)
    return rows


def _interpolate(xs: list[Fraction], ys: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * len(xs)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if not yi:
            continue
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k, c in enumerate(basis):
            out[k] += yi * c / denom
    return u_trim(out)


def resultant(f: Poly, g: Poly, y: Sym, x: Sym) -> list[Fraction]:
    """Res_y(f, g) as a univariate polynomial in x; f and g involve only x and y.

    The Sylvester determinant is evaluated at enough integer points of x
    (with formal degrees in y, so specialization is exact) and interpolated.
    """
    fc, gc = f.collect(y), g.collect(y)
    df, dg = max(fc), max(gc)
    if df == 0 or dg == 0:
        raise ValueError("both polynomials must involve the eliminated symbol")
    fx = {k: v.univariate(x) if not v.is_zero() else [] for k, v in fc.items()}
    gx = {k: v.univariate(x) if not v.is_zero() else [] for k, v in gc.items()}
    ex = max(len(c) - 1 for c in fx.values())
    gxdeg = max(len(c) - 1 for c in gx.values())
    bound = dg * ex + df * gxdeg
    pts = [Fraction(t) for t in range(bound + 1)]
    vals = []
    for t in pts:
        a = [u_eval(fx.get(k, []), t) for k in range(df + 1)]
        b = [u_eval(gx.get(k, []), t) for k in range(dg + 1)]
        vals.append(_det(_sylvester(a, b)))
    return _interpolate(pts, vals)
