"""Goldbach partitions and the residue-class prime choices used by the inductions."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundsError, DomainError
from .sieve import PrimeSet, shared_primes

CHUNK = 1 << 20     # even numbers per vectorized scan block


@dataclass(frozen=True)
class GoldbachPair:
    n: int
    p: int
    q: int


class NoGoldbachPair(Exception):
    """An even number with no prime pair. Never observed; kept as a loud signal."""

    def __init__(self, n: int):
        super().__init__(f"no Goldbach pair for {n}")
        self.n = n


@dataclass
class ExceptionReport:
    lo: int
    hi: int
    exceptions: list[int] = field(default_factory=list)
    scanned: int = 0
    max_min_p: int = 0          # largest minimal p seen in the range
    max_min_p_at: int = 0

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "exceptions": list(self.exceptions),
                "scanned": self.scanned, "max_min_p": self.max_min_p,
                "max_min_p_at": self.max_min_p_at}


def goldbach_pair(n: int, primes: PrimeSet | None = None) -> GoldbachPair:
    """Minimal-p decomposition n = p + q with p <= q."""
    if n < 4 or n % 2:
        raise DomainError(f"goldbach_pair needs an even n >= 4, got {n}")
    if primes is None or primes.limit < n:
        primes = shared_primes(n)
    for p in primes.prime_list():
        if 2 * p > n:
            break
        if primes.is_prime(n - p):
            return GoldbachPair(n, p, n - p)
    raise NoGoldbachPair(n)


def _scan_block(lo: int, hi: int, primes: PrimeSet) -> tuple[list[int], int, int]:
    ps = primes.primes()
    todo = np.arange(lo, hi + 1, 2, dtype=np.int64)
    exceptions: list[int] = []
    best_p, best_n = 0, 0
    if todo.size and todo[0] == 4:
        best_p, best_n = 2, 4
        todo = todo[1:]
    i = 1                       # p = 2 only ever pairs with 4
    while todo.size:
        if i >= ps.size:
            exceptions.extend(todo.tolist())
            break
        p = int(ps[i])
        dead = todo < 2 * p
        if dead.any():
            exceptions.extend(todo[dead].tolist())
            todo = todo[~dead]
        hit = primes.contains_array(todo - p)
        if hit.any():
            best_p, best_n = p, int(todo[hit][0])
            todo = todo[~hit]
        i += 1
    return exceptions, best_p, best_n


def scan_goldbach(lo: int, hi: int, jobs: int | None = None,
                  primes: PrimeSet | None = None) -> ExceptionReport:
    """Exhaustively check every even n in [lo, hi] for a prime pair.

    The range is cut into fixed blocks; ``jobs`` only changes how many
    blocks run at once, so the report does not depend on it.
    """
    if lo % 2 or hi % 2 or lo < 4 or lo > hi:
        raise BoundsError(f"need even bounds with 4 <= lo <= hi, got [{lo}, {hi}]")
    if primes is None or primes.limit < hi:
        primes = shared_primes(hi)
    jobs = jobs or os.cpu_count() or 1
    span = 2 * CHUNK
    blocks = [(a, min(a + span - 2, hi)) for a in range(lo, hi + 1, span)]
    if jobs > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda b: _scan_block(b[0], b[1], primes), blocks))
    else:
        parts = [_scan_block(a, b, primes) for a, b in blocks]
    report = ExceptionReport(lo, hi, scanned=(hi - lo) // 2 + 1)
    for exc, p, n in parts:
        report.exceptions.extend(exc)
        if p > report.max_min_p or (p == report.max_min_p and n < report.max_min_p_at):
            report.max_min_p, report.max_min_p_at = p, n
    report.exceptions.sort()
    return report


def choose_q_mod4(m: int) -> int:
    """The q in {3, 5} with m + q divisible by 4."""
    if m % 2 == 0:
        raise DomainError(f"choose_q_mod4 needs an odd argument, got {m}")
    return 3 if m % 4 == 1 else 5


# q mod 8 -> r in {3, 5, 7, 17} with q + r = 6 (mod 8)
_R_MOD8 = {1: 5, 3: 3, 5: 17, 7: 7}


def choose_r_mod8(q: int) -> int:
    if q % 2 == 0:
        raise DomainError(f"choose_r_mod8 needs an odd argument, got {q}")
    return _R_MOD8[q % 8]


def unbalanced_split(m: int, primes: PrimeSet | None = None) -> tuple[int, int] | None:
    """Primes p < m + 1 < q with p + q = 2m + 2, p minimal; None if no split exists."""
    if m < 2:
        raise DomainError(f"unbalanced_split needs m >= 2, got {m}")
    total = 2 * m + 2
    if primes is None or primes.limit < total:
        primes = shared_primes(total)
    for p in primes.prime_list():
        if p > m:
            break
        if primes.is_prime(total - p):
            return p, total - p
    return None
