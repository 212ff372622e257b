"""The Spiro set H, its exponent caps, the sets H_n and witness searches.

n is in H when every prime p <= prime_threshold occurs with exponent at most
the largest e with p**e <= cap_bound, and every larger prime occurs at most once.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import DomainError
from .sieve import factorize, is_prime, shared_primes


@dataclass(frozen=True)
class HParams:
    cap_bound: int = 10**9
    prime_threshold: int = 1000
    minus_one: bool = False     # literal "floor(9 log_p 10) - 1" variant

    def __post_init__(self):
        if self.cap_bound < 2 or self.prime_threshold < 2:
            raise DomainError("cap_bound and prime_threshold must be >= 2")


DEFAULT = HParams()


def _largest_exponent(p: int, bound: int) -> int:
    e, x = 0, p
    while x <= bound:
        e += 1
        x *= p
    return e


def h_cap(p: int, params: HParams = DEFAULT) -> int:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p > params.prime_threshold:
        return 1
    e = _largest_exponent(p, params.cap_bound)
    return e - 1 if params.minus_one else e


def in_h(n: int, params: HParams = DEFAULT) -> bool:
    if n < 1:
        raise DomainError(f"in_h needs n >= 1, got {n}")
    return all(e <= h_cap(p, params) for p, e in factorize(n))


@lru_cache(maxsize=8)
def _forbidden(limit: int, params: HParams) -> tuple[int, ...]:
    # minimal non-members p**(cap+1) that fit under limit
    out = []
    small = max(2, min(limit, params.prime_threshold))
    for p in shared_primes(small).primes_between(2, small).tolist():
        q = p ** (h_cap(p, params) + 1)
        if q <= limit:
            out.append(q)
    r = int(limit**0.5) + 1
    if r > params.prime_threshold:
        for p in shared_primes(r).primes_between(params.prime_threshold + 1, r).tolist():
            if p * p <= limit:
                out.append(p * p)
    return tuple(out)


@lru_cache(maxsize=4)
def h_mask(limit: int, params: HParams = DEFAULT) -> np.ndarray:
    """Boolean membership for 0..limit (index 0 is False)."""
    mask = np.ones(limit + 1, dtype=bool)
    mask[0] = False
    for q in _forbidden(limit, params):
        mask[q::q] = False
    mask.flags.writeable = False
    return mask


def smallest_non_member(limit: int, params: HParams = DEFAULT) -> int | None:
    if limit < 1:
        raise DomainError(f"limit must be >= 1, got {limit}")
    bad = np.flatnonzero(~h_mask(limit, params)[1:])
    return int(bad[0]) + 1 if bad.size else None


def _hn_array(n: int, limit: int, params: HParams) -> np.ndarray:
    if n < 1:
        raise DomainError(f"H_n needs n >= 1, got {n}")
    if n % 2 == 0:
        top = limit // n
        if top < 1:
            return np.array([], dtype=np.int64)
        m = np.flatnonzero(h_mask(limit, params)[:top + 1])
        m = m[np.gcd(m, n) == 1]
        return m * n
    top = limit // (2 * n)
    if top < 1:
        return np.array([], dtype=np.int64)
    twice = np.flatnonzero(h_mask(limit, params)[:2 * top + 1])
    m = twice[twice % 2 == 0] // 2
    m = m[np.gcd(m, n) == 1]
    return 2 * m * n


def hn_stream(n: int, limit: int, params: HParams = DEFAULT) -> Iterator[int]:
    """Ascending members of H_n up to ``limit``:
    {m n : m in H, (m, n) = 1} for even n, {2 m n : 2m in H, (m, n) = 1} for odd n."""
    yield from _hn_array(n, limit, params).tolist()


def hn_density(n: int, limit: int, params: HParams = DEFAULT) -> Fraction:
    if limit < n:
        raise DomainError(f"limit {limit} must be >= n = {n}")
    return Fraction(int(_hn_array(n, limit, params).size), limit)


def find_q_for_m(m: int, params: HParams = DEFAULT) -> int | None:
    """Smallest odd prime q <= m - 1 with m + q in H, or None."""
    if m < 4:
        raise DomainError(f"find_q_for_m needs m >= 4, got {m}")
    for q in itertools.islice(shared_primes(m - 1).prime_list(), 1, None):
        if q > m - 1:
            break
        if in_h(m + q, params):
            return q
    return None
