"""Rediscovery of the solution families by exact constraint solving.

The functional equation is instantiated for every admissible pair of primes
(or of members of PRIMES-1). Each argument is expanded into its prime-power
symbols, so multiplicativity is part of the encoding. The system is then
solved by propagation, triangular elimination, resultants and rational-root
branching. Every surviving family is checked against the original constraints.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import CapabilityError, DomainError
from .multfunc import FORMS, PRIMESM1, SHIFTED, format_rational, parse_rational
from .poly import Poly, Sym, rational_roots, resultant, u_gcd, u_trim
from .sieve import factorize, shared_primes

log = logging.getLogger(__name__)

F2 = Sym(2, 1)


@dataclass(frozen=True)
class Constraint:
    """lhs - rhs = 0 where lhs = f(argument) and rhs is the additive side."""

    pair: tuple[int, int]
    argument: int
    lhs: Poly
    rhs: Poly

    @property
    def poly(self) -> Poly:
        return self.lhs - self.rhs

    @property
    def label(self) -> str:
        return f"({self.pair[0]},{self.pair[1]})"

    def __str__(self) -> str:
        return f"{self.label}: {self.lhs} = {self.rhs}"


@dataclass
class ConstraintSystem:
    form: str
    prime_limit: int
    constraints: list[Constraint]

    def polys(self) -> list[Poly]:
        return [c.poly for c in self.constraints]

    def syms(self) -> set[Sym]:
        out: set[Sym] = set()
        for c in self.constraints:
            out |= c.poly.syms()
        return out

    def shuffled(self, rng) -> "ConstraintSystem":
        cons = list(self.constraints)
        rng.shuffle(cons)
        return ConstraintSystem(self.form, self.prime_limit, cons)


def build_system(form: str, prime_limit: int) -> ConstraintSystem:
    """One constraint per admissible pair; identically-zero ones (any pair with p = 2
    in the shifted form) are dropped."""
    if form not in FORMS:
        raise DomainError(f"unknown form {form!r}")
    floor = 3 if form == SHIFTED else 2
    if prime_limit < floor:
        raise DomainError(f"prime_limit must be >= {floor} for the {form} form")
    ps = shared_primes(prime_limit).primes()
    ps = ps[ps <= prime_limit].tolist()
    cons = []
    if form == SHIFTED:
        f2 = Poly.var(F2)
        for p, q in itertools.combinations_with_replacement(ps, 2):
            lhs = Poly.of_argument(p + q - 2)
            rhs = Poly.of_argument(p) + Poly.of_argument(q) - f2
            if not (lhs - rhs).is_zero():
                cons.append(Constraint((p, q), p + q - 2, lhs, rhs))
    else:
        xs = [p - 1 for p in ps]
        for a, b in itertools.combinations_with_replacement(xs, 2):
            lhs = Poly.of_argument(a + b)
            rhs = Poly.of_argument(a) + Poly.of_argument(b)
            if not (lhs - rhs).is_zero():
                cons.append(Constraint((a, b), a + b, lhs, rhs))
    return ConstraintSystem(form, prime_limit, cons)


# ---------------------------------------------------------------- propagation

PROGRESSED, STALLED, CONTRADICTION = "progressed", "stalled", "contradiction"


@dataclass
class Propagation:
    status: str
    assignment: dict[Sym, Fraction]
    remaining: list[tuple[int, Poly]]      # (constraint index, reduced polynomial)
    conflict: str | None = None
    conflict_indices: tuple[int, ...] = ()


def _conflict_text(system: ConstraintSystem, i: int, assign: Mapping[Sym, Fraction]) -> str:
    c = system.constraints[i]
    lhs, rhs = c.lhs.subs(assign), c.rhs.subs(assign)
    return f"constraint {c.label}: f({c.argument}) = {lhs} but {c.rhs} = {rhs}"


def _linear_closure(rows: list[tuple[int, Poly]]):
    """Row-reduce the linear constraints.

    Returns (new assignments, None) or (None, origin indices of an inconsistent row).
    """
    cols = sorted({s for _, p in rows for s in p.syms()}, key=lambda s: -s.value)
    mat = []
    for i, p in rows:
        coeffs = {s: Fraction(0) for s in cols}
        for m, c in p.terms.items():
            if m:
                coeffs[m[0][0]] += c
        mat.append(([coeffs[s] for s in cols], -p.constant(), frozenset([i])))
    r = 0
    pivots = []
    for c in range(len(cols)):
        piv = next((k for k in range(r, len(mat)) if mat[k][0][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        vec, rhs, org = mat[r]
        inv = 1 / vec[c]
        vec = [v * inv for v in vec]
        rhs *= inv
        mat[r] = (vec, rhs, org)
        for k in range(len(mat)):
            if k != r and mat[k][0][c]:
                f = mat[k][0][c]
                mat[k] = ([a - f * b for a, b in zip(mat[k][0], vec)],
                          mat[k][1] - f * rhs, mat[k][2] | org)
        pivots.append(c)
        r += 1
    for vec, rhs, org in mat[r:]:
        if rhs:
            return None, tuple(sorted(org))
    out = {}
    for vec, rhs, _ in mat[:r]:
        nz = [j for j, v in enumerate(vec) if v]
        if len(nz) == 1:
            out[cols[nz[0]]] = rhs
    return out, None


def propagate(system: ConstraintSystem, assignment: Mapping[Sym, Fraction] | None = None) -> Propagation:
    """Substitute, annihilate zero factors and solve single-symbol linear
    constraints (lowest constraint index first) until nothing changes; when
    stalled, row-reduce the linear constraints once more before giving up."""
    assign = {s: Fraction(v) for s, v in (assignment or {}).items()}
    start = len(assign)
    live: dict[int, Poly] = {}
    index: dict[Sym, set[int]] = {}

    def fail(idx: Sequence[int]) -> Propagation:
        text = "; ".join(_conflict_text(system, i, assign) for i in idx)
        rem = sorted(live.items())
        return Propagation(CONTRADICTION, assign, rem, text, tuple(idx))

    for i, c in enumerate(system.constraints):
        r = c.poly.subs(assign)
        if r.is_zero():
            continue
        if r.is_constant():
            return fail([i])
        live[i] = r
        for s in r.syms():
            index.setdefault(s, set()).add(i)

    def set_value(s: Sym, v: Fraction) -> int | None:
        assign[s] = v
        for i in sorted(index.pop(s, ())):
            if i not in live:
                continue
            r = live[i].subs({s: v})
            if r.is_zero():
                del live[i]
            elif r.is_constant():
                live[i] = r
                return i
            else:
                live[i] = r
        return None

    while True:
        for i in sorted(live):
            r = live[i]
            syms = r.syms()
            if len(syms) == 1 and r.total_degree() == 1:
                (s,) = syms
                bad = set_value(s, r.solve_linear_for(s).constant())
                if bad is not None:
                    return fail([bad])
                break
        else:
            linear = [(i, p) for i, p in sorted(live.items()) if p.total_degree() == 1]
            if not linear:
                break
            found, origin = _linear_closure(linear)
            if origin is not None:
                return fail(origin)
            if not found:
                break
            for s, v in sorted(found.items()):
                bad = set_value(s, v)
                if bad is not None:
                    return fail([bad])
    status = PROGRESSED if len(assign) > start else STALLED
    return Propagation(status, assign, sorted(live.items()))


# ---------------------------------------------------------------- families

@dataclass
class SolutionFamily:
    assignments: dict[Sym, Fraction]
    free: frozenset[Sym]
    provenance: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    relations: list[Poly] = field(default_factory=list)

    @property
    def f2(self) -> Fraction | None:
        return self.assignments.get(F2)

    @property
    def universe(self) -> set[Sym]:
        return set(self.assignments) | set(self.free)

    def sort_key(self):
        f2 = self.f2
        return (f2 is None, f2 if f2 is not None else 0,
                sorted((s, v) for s, v in self.assignments.items()))

    def to_dict(self) -> dict:
        out = {
            "f2": format_rational(self.f2) if self.f2 is not None else None,
            "assignments": [[s.key, format_rational(v)] for s, v in sorted(self.assignments.items())],
            "free": [s.key for s in sorted(self.free)],
            "warnings": list(self.warnings),
            "provenance": list(self.provenance),
        }
        if self.relations:
            out["relations"] = [str(r) for r in self.relations]
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "SolutionFamily":
        return cls({Sym.parse(k): parse_rational(v) for k, v in d["assignments"]},
                   frozenset(Sym.parse(k) for k in d.get("free", [])),
                   list(d.get("provenance", [])), list(d.get("warnings", [])))

    def extended_by(self, f) -> bool:
        """True when the multiplicative function f agrees with every assigned value."""
        return all(f.rule(s.p, s.e) == v for s, v in self.assignments.items())


def verify_family(system: ConstraintSystem, fam: SolutionFamily) -> list[str]:
    """Failures after substituting the family into the original constraints."""
    allowed = {r for r in fam.relations}
    bad = []
    for c in system.constraints:
        r = c.poly.subs(fam.assignments)
        if not r.is_zero() and r not in allowed and -r not in allowed:
            bad.append(f"{c.label}: residual {r}")
    return bad


# ---------------------------------------------------------------- elimination

def triangularize(polys: Iterable[Poly]) -> tuple[dict[Sym, Poly], list[Poly]]:
    """Solve each constraint for its largest-argument symbol that occurs linearly
    with a constant coefficient; what cannot be pivoted is the residue."""
    pivots: dict[Sym, Poly] = {}
    residue: list[Poly] = []
    queue = list(polys)
    while queue:
        r = queue.pop(0).subs(pivots)
        if r.is_zero():
            continue
        for s in sorted(r.syms(), key=lambda s: -s.value):
            expr = r.solve_linear_for(s)
            if expr is not None:
                break
        else:
            residue.append(r)
            continue
        pivots = {k: v.subs({s: expr}) for k, v in pivots.items()}
        pivots[s] = expr
        # earlier residue may now pivot
        queue = residue + queue
        residue = []
    return pivots, residue


def _too_high(p: Poly, max_degree: int) -> bool:
    return any(p.degree(s) > max_degree for s in p.syms())


def _eliminant(residue: list[Poly], max_base: int, max_degree: int):
    """Pick the base symbol x and return (x, univariate eliminant in x, note)."""
    usable = [p for p in residue if 1 <= len(p.syms()) <= max_base and not _too_high(p, max_degree)]
    if not usable:
        small = [p for p in residue if len(p.syms()) <= max_base]
        if small:
            raise CapabilityError(f"constraint {small[0]} exceeds max_degree {max_degree}")
        worst = min(residue, key=lambda p: len(p.syms()))
        raise CapabilityError(f"constraint {worst} needs {len(worst.syms())} base symbols "
                              f"(max_base {max_base})")
    uni: dict[Sym, list[Poly]] = {}
    bi: dict[tuple[Sym, Sym], list[Poly]] = {}
    for p in usable:
        syms = sorted(p.syms(), key=lambda s: s.value)
        if len(syms) == 1:
            uni.setdefault(syms[0], []).append(p)
        else:
            bi.setdefault((syms[0], syms[1]), []).append(p)
    if uni:
        x = min(uni, key=lambda s: s.value)
        g: list[Fraction] = []
        for p in uni[x]:
            g = u_gcd(g, p.univariate(x))
        return x, g, f"univariate constraints in {x}"
    for (x, y) in sorted(bi, key=lambda k: (k[0].value, k[1].value)):
        group = bi[(x, y)]
        g = []
        for a, b in itertools.combinations(group, 2):
            res = resultant(a, b, y, x)
            if u_trim(res):
                g = u_gcd(g, res)
        if g:
            return x, g, f"resultants over {y} of {len(group)} constraints in {x}, {y}"
    p = next(iter(bi.values()))[0]
    raise CapabilityError(f"no nonzero resultant available; offending constraint {p}")


def eliminate_and_branch(system: ConstraintSystem, max_base: int = 2, max_degree: int = 2,
                         warnings: list[str] | None = None) -> list[SolutionFamily]:
    """Enumerate the rational solution families of ``system``.

    Branch nodes propagate, triangularize, reduce the residue to one base
    symbol and split on the rational roots of its eliminant. Factors of the
    eliminant without rational roots are reported as warnings. Leaves are
    verified against the original constraints.
    """
    if max_base < 2 or max_degree < 2:
        raise DomainError("max_base and max_degree must be >= 2")
    base_cap = min(max_base, 2)
    # canonical constraint order keeps pivot choice, and so the output, independent of input order
    system = ConstraintSystem(system.form, system.prime_limit,
                              sorted(system.constraints, key=lambda c: c.pair))
    sink = warnings if warnings is not None else []
    families: list[SolutionFamily] = []

    def branch(assign: dict[Sym, Fraction], trace: list[str], warns: list[str]) -> None:
        prop = propagate(system, assign)
        if prop.status == CONTRADICTION:
            log.debug("branch %s closed: %s", trace, prop.conflict)
            return
        remaining = [p for _, p in prop.remaining]
        assigned = prop.assignment
        if remaining:
            pivots, residue = triangularize(remaining)
            if any(r.is_constant() for r in residue):
                return
            fixed = {s: e.constant() for s, e in pivots.items() if e.is_constant()}
            if fixed:
                note = ", ".join(f"{k}={v}" for k, v in sorted(fixed.items(), key=lambda kv: kv[0].value))
                branch({**assigned, **fixed}, trace + [f"elimination fixed {note}"], warns)
                return
            if residue:
                x, elim, note = _eliminant(residue, base_cap, max_degree)
                if len(elim) <= 1:      # constant eliminant: no common root
                    return
                roots, rest = rational_roots(elim)
                here = list(warns)
                if len(rest) > 1:
                    msg = (f"{' & '.join(trace) or 'root'}: eliminant factor "
                           f"{_upoly_str(rest, x)} has no rational roots; not explored")
                    here.append(msg)
                    sink.append(msg)
                for r, mult in roots:
                    branch({**assigned, x: r}, trace + [f"{x}={r} [{note}]"], here)
                return
            # no residue: the remaining symbols satisfy parametric relations only
            msg = (f"{' & '.join(trace) or 'root'}: {len(remaining)} constraints remain "
                   f"as relations among free symbols")
            warns = warns + [msg]
            sink.append(msg)
        fam = SolutionFamily(dict(assigned), frozenset(system.syms() - set(assigned)),
                             trace + [f"propagated to {len(assigned)} symbols"],
                             list(warns), remaining)
        failures = verify_family(system, fam)
        if failures:
            msg = f"family {' & '.join(trace)} failed verification: {failures[0]}"
            sink.append(msg)
            return
        families.append(fam)

    branch({}, [], [])
    families.sort(key=SolutionFamily.sort_key)
    return families


def _upoly_str(coeffs: list[Fraction], x: Sym) -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if not c:
            continue
        body = "" if k == 0 else (str(x) if k == 1 else f"{x}^{k}")
        terms.append(f"{c}*{body}" if body else str(c))
    return " + ".join(terms) or "0"


def classify(form: str, prime_limit: int, max_degree: int = 2, max_base: int = 2,
             warnings: list[str] | None = None) -> list[SolutionFamily]:
    return eliminate_and_branch(build_system(form, prime_limit), max_base, max_degree, warnings)


FREE, UNDETERMINED = "free", "undetermined"


def forced_values(fam: SolutionFamily, up_to: int) -> dict[int, Fraction | str]:
    """f(n) for n <= up_to as implied by the family.

    A factor assigned 0 makes f(n) = 0 outright. Otherwise a factor that never
    occurred in the system makes f(n) undetermined, and a free factor makes it free.
    """
    universe = fam.universe
    out: dict[int, Fraction | str] = {}
    for n in range(1, up_to + 1):
        syms = [Sym(p, e) for p, e in factorize(n)]
        if any(fam.assignments.get(s) == 0 for s in syms):
            out[n] = Fraction(0)
        elif any(s not in universe for s in syms):
            out[n] = UNDETERMINED
        elif any(s in fam.free for s in syms):
            out[n] = FREE
        else:
            v = Fraction(1)
            for s in syms:
                v *= fam.assignments[s]
            out[n] = v
    return out
