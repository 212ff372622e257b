"""Multiplicative functions with exact rational values, the three solution
families, and checks of the functional equation in both forms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import DomainError
from .sieve import factorize, is_prime, shared_primes

SHIFTED = "shifted"
PRIMESM1 = "primesm1"
FORMS = (SHIFTED, PRIMESM1)

IDENTITY = "identity"
ONE = "one"
ODD_SQUAREFUL = "odd_squareful_indicator"
KINDS = (IDENTITY, ONE, ODD_SQUAREFUL)
_KIND_ALIASES = {"odd-squareful": ODD_SQUAREFUL, "odd_squareful": ODD_SQUAREFUL,
                 "constant-one": ONE}


def parse_rational(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text).strip())


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class MultiplicativeFn:
    name: str
    rule: Callable[[int, int], Fraction]
    assignments: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __call__(self, n: int) -> Fraction:
        return evaluate(self, n)


def evaluate(f: MultiplicativeFn, n: int) -> Fraction:
    """f(n) as the product of the prime-power rule over the factorization of n."""
    if n < 1:
        raise DomainError(f"multiplicative functions live on n >= 1, got {n}")
    out = Fraction(1)
    for p, e in factorize(n):
        out *= f.rule(p, e)
        if not out:
            break
    return out


def is_squareful(n: int) -> bool:
    """Powerful in the usual sense: every prime exponent is at least 2."""
    if n < 2:
        raise DomainError(f"is_squareful is defined for n >= 2, got {n}")
    return all(e >= 2 for _, e in factorize(n))


def family(kind: str, assignments: Mapping[tuple[int, int], object] | None = None) -> MultiplicativeFn:
    kind = _KIND_ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise DomainError(f"unknown family {kind!r}")
    assigned = {(int(p), int(e)): parse_rational(v) for (p, e), v in (assignments or {}).items()}
    if assigned and kind != ODD_SQUAREFUL:
        raise DomainError(f"family {kind!r} takes no assignments")
    for p, e in assigned:
        if p == 2 or e < 2:
            raise DomainError(f"f({p}^{e}) is forced to 0; only odd p with e >= 2 is free")
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")

    if kind == IDENTITY:
        def rule(p, e):
            return Fraction(p**e)
    elif kind == ONE:
        def rule(p, e):
            return Fraction(1)
    else:
        def rule(p, e):
            if p == 2 or e == 1:
                return Fraction(0)
            return assigned.get((p, e), Fraction(1))
    return MultiplicativeFn(kind, rule, assigned)


def family_from_config(cfg: Mapping) -> MultiplicativeFn:
    """Build from ``{"kind": ..., "assignments": [[p, e, "num/den"], ...]}``."""
    assigns = {(int(p), int(e)): parse_rational(v) for p, e, v in cfg.get("assignments", [])}
    return family(cfg["kind"], assigns)


def family_to_config(f: MultiplicativeFn) -> dict:
    return {"kind": f.name,
            "assignments": [[p, e, format_rational(v)] for (p, e), v in sorted(f.assignments.items())]}


@dataclass(frozen=True, order=True)
class ViolationRecord:
    """Failure of the equation at (x, y): primes for the shifted form,
    members of PRIMES-1 for the other."""

    form: str
    x: int
    y: int
    lhs: Fraction
    rhs: Fraction

    def to_dict(self) -> dict:
        return {"form": self.form, "x": self.x, "y": self.y,
                "lhs": format_rational(self.lhs), "rhs": format_rational(self.rhs)}


def value_table(f: MultiplicativeFn, upto: int) -> list[Fraction]:
    """[f(0) placeholder, f(1), ..., f(upto)]."""
    return [Fraction(0)] + [evaluate(f, n) for n in range(1, upto + 1)]


def _scaled(values: list[Fraction]) -> np.ndarray:
    # common denominator turns the linear equation into an integer one
    den = reduce(math.lcm, (v.denominator for v in values), 1)
    ints = [v.numerator * (den // v.denominator) for v in values]
    big = max((abs(v) for v in ints), default=0)
    if 4 * big < 2**62:
        return np.array(ints, dtype=np.int64)
    return np.array(ints, dtype=object)


def _domain(form: str, limit: int) -> np.ndarray:
    ps = shared_primes(limit + 1).primes()
    if form == SHIFTED:
        return ps[ps <= limit]
    if form == PRIMESM1:
        return ps[ps <= limit + 1] - 1
    raise DomainError(f"unknown form {form!r}")


def check_equation(f: MultiplicativeFn, form: str, limit: int,
                   values: list[Fraction] | None = None) -> list[ViolationRecord]:
    """Every violation of the chosen form over all pairs x <= y <= limit.

    shifted:  f(p + q - 2) = f(p) + f(q) - f(2) for primes p, q
    primesm1: f(a + b) = f(a) + f(b)             for a, b in PRIMES - 1
    """
    if limit < 2:
        raise DomainError(f"limit must be >= 2, got {limit}")
    xs = _domain(form, limit)
    if values is None:
        values = value_table(f, 2 * limit)
    v = _scaled(values)
    shift = 2 if form == SHIFTED else 0
    out: list[ViolationRecord] = []
    for i, x in enumerate(xs.tolist()):
        ys = xs[i:]
        lhs = v[ys + (x - shift)]
        rhs = v[ys] + v[x]
        if shift:
            rhs = rhs - v[2]
        bad = np.flatnonzero(lhs != rhs)
        for j in bad.tolist():
            y = int(ys[j])
            r = values[x] + values[y] - (values[2] if shift else 0)
            out.append(ViolationRecord(form, x, y, values[x + y - shift], r))
    out.sort(key=lambda r: (r.x, r.y))
    return out


@dataclass
class ShiftImplication:
    limit: int
    premise_holds: bool
    premise_witness: ViolationRecord | None = None
    f2_is_two: bool | None = None
    prime_steps_hold: bool | None = None
    prime_step_failures: list[int] = field(default_factory=list)
    shifted_violations: list[ViolationRecord] = field(default_factory=list)

    @property
    def conclusion_holds(self) -> bool | None:
        if not self.premise_holds:
            return None
        return bool(self.f2_is_two and self.prime_steps_hold and not self.shifted_violations)

    def to_dict(self) -> dict:
        w = self.premise_witness
        return {"limit": self.limit, "premise_holds": self.premise_holds,
                "premise_witness": w.to_dict() if w else None,
                "f2_is_two": self.f2_is_two, "prime_steps_hold": self.prime_steps_hold,
                "prime_step_failures": self.prime_step_failures,
                "shifted_violations": [r.to_dict() for r in self.shifted_violations],
                "conclusion_holds": self.conclusion_holds}


def check_shift_implication(f: MultiplicativeFn, limit: int) -> ShiftImplication:
    """If f is additive on PRIMES-1 up to ``limit``, confirm the shifted form."""
    if limit < 3:
        raise DomainError(f"limit must be >= 3, got {limit}")
    values = value_table(f, 2 * limit + 2)
    premise = check_equation(f, PRIMESM1, limit, values)
    if premise:
        return ShiftImplication(limit, False, premise_witness=premise[0])
    ps = shared_primes(limit).primes()
    bad_steps = [p for p in ps[ps <= limit].tolist() if values[p] != values[p - 1] + 1]
    return ShiftImplication(limit, True, f2_is_two=values[2] == 2,
                            prime_steps_hold=not bad_steps, prime_step_failures=bad_steps,
                            shifted_violations=check_equation(f, SHIFTED, limit, values))


def random_assignments(rng, count: int, max_prime: int = 97, max_exp: int = 4,
                       max_num: int = 50) -> dict[tuple[int, int], Fraction]:
    """Random values for odd prime powers p^e with e >= 2."""
    odd = [p for p in shared_primes(max_prime).primes().tolist() if 2 < p <= max_prime]
    out: dict[tuple[int, int], Fraction] = {}
    while len(out) < count:
        key = (int(rng.choice(odd)), int(rng.integers(2, max_exp + 1)))
        out[key] = Fraction(int(rng.integers(-max_num, max_num + 1)),
                            int(rng.integers(1, max_num + 1)))
    return out


def primes_minus_one(limit: int) -> Iterable[int]:
    return _domain(PRIMESM1, limit).tolist()
