from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from adq.poly import Poly, Sym, rational_roots, resultant, u_divmod, u_eval, u_gcd, u_trim

X, Y, Z = Sym(2, 1), Sym(3, 1), Sym(3, 2)
SX, SY, SZ = sympy.symbols("x y z")
TO_SYMPY = {X: SX, Y: SY, Z: SZ}


def to_sympy(p: Poly):
    out = sympy.Integer(0)
    for mono, c in p.terms.items():
        t = sympy.Rational(c.numerator, c.denominator)
        for s, k in mono:
            t *= TO_SYMPY[s] ** k
        out += t
    return sympy.expand(out)


def test_sym_order_and_keys():
    assert sorted([Sym(3, 1), Sym(2, 4), Sym(2, 1)]) == [Sym(2, 1), Sym(2, 4), Sym(3, 1)]
    assert Sym(3, 2).value == 9 and Sym(3, 2).key == "3^2" and str(Sym(3, 2)) == "f(9)"
    assert Sym.parse("1009^2") == Sym(1009, 2)


def test_of_argument_is_multiplicative():
    p = Poly.of_argument(18)
    assert p == Poly.var(Sym(2, 1)) * Poly.var(Sym(3, 2))
    assert Poly.of_argument(1) == Poly.const(1)
    assert Poly.of_argument(16) == Poly.var(Sym(2, 4))


def test_zero_is_empty():
    p = Poly.var(X) - Poly.var(X)
    assert p.is_zero() and p == Poly() and not p.terms


small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def polys():
    mono = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1))

    def build(items):
        p = Poly()
        for (a, b, c), k in items:
            p = p + Poly.const(k) * Poly.var(X) ** a * Poly.var(Y) ** b * Poly.var(Z) ** c
        return p
    return st.lists(st.tuples(mono, small), max_size=5).map(build)


@settings(max_examples=150, deadline=None)
@given(polys(), polys())
def test_ring_ops_match_sympy(a, b):
    assert to_sympy(a + b) == sympy.expand(to_sympy(a) + to_sympy(b))
    assert to_sympy(a * b) == sympy.expand(to_sympy(a) * to_sympy(b))
    assert to_sympy(a - b) == sympy.expand(to_sympy(a) - to_sympy(b))


@settings(max_examples=150, deadline=None)
@given(polys(), small, polys())
def test_subs_matches_sympy(a, v, b):
    got = a.subs({X: v, Y: b})
    want = sympy.expand(to_sympy(a).subs({SX: sympy.Rational(v.numerator, v.denominator),
                                          SY: to_sympy(b)}, simultaneous=True))
    assert to_sympy(got) == want


def test_zero_annihilation():
    p = Poly.var(X) * Poly.var(Z) + Poly.var(Y)
    q = p.subs({X: 0})
    assert q == Poly.var(Y) and Z not in q.syms()


def test_solve_linear_for():
    p = Poly.const(3) * Poly.var(X) + Poly.var(Y) * Poly.var(Z) - Poly.const(6)
    sol = p.solve_linear_for(X)
    assert sol == (Poly.const(6) - Poly.var(Y) * Poly.var(Z)) * Poly.const(Fraction(1, 3))
    assert (Poly.var(X) ** 2).solve_linear_for(X) is None


def test_rational_roots_match_sympy():
    cases = [
        [Fraction(-2), Fraction(1)],                                  # x - 2
        [Fraction(0), Fraction(-2), Fraction(1)],                     # x^2 - 2x
        [Fraction(4), Fraction(-4), Fraction(1)],                     # (x - 2)^2
        [Fraction(-2), Fraction(0), Fraction(1)],                     # x^2 - 2, irrational
        [Fraction(-3), Fraction(1, 2), Fraction(9, 4), Fraction(1)],
        [Fraction(0), Fraction(0), Fraction(-1), Fraction(1)],        # x^3 - x^2
    ]
    for a in cases:
        roots, rest = rational_roots(a)
        poly = sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in a])), SX)
        want = {r: m for r, m in sympy.roots(poly).items() if r.is_rational}
        assert {sympy.Rational(r.numerator, r.denominator): m for r, m in roots} == want
        assert len(rest) - 1 == poly.degree() - sum(want.values())


def test_univariate_helpers():
    a = [Fraction(c) for c in (-6, 11, -6, 1)]     # (x-1)(x-2)(x-3)
    b = [Fraction(c) for c in (2, -3, 1)]          # (x-1)(x-2)
    q, r = u_divmod(a, b)
    assert q == [Fraction(-3), Fraction(1)] and u_trim(r) == []
    assert u_gcd(a, [Fraction(c) for c in (-3, 1)]) == [Fraction(-3), Fraction(1)]
    assert u_eval(a, Fraction(4)) == 6


def test_resultant_matches_sympy():
    f2, f3 = Poly.var(X), Poly.var(Y)
    two = Poly.const(2)
    # the classic pair from the small-prime system
    f = (f2 - two) * (f3 * (f2 - two) + f2)
    g = f3 * f3 - f2 * f3 - Poly.const(1)
    cases = [(f, g), (f2 * f3 - Poly.const(3), f3 * f3 + f2),
             (f3 ** 3 - f2 * f3 + Poly.const(Fraction(1, 2)), f3 - f2 * f2)]
    for a, b in cases:
        got = resultant(a, b, Y, X)
        want = sympy.Poly(sympy.resultant(to_sympy(a), to_sympy(b), SY), SX).all_coeffs()
        got_sym = [sympy.Rational(c.numerator, c.denominator) for c in reversed(u_trim(got))]
        # equal up to sign convention
        assert got_sym == list(want) or got_sym == [-c for c in want]
