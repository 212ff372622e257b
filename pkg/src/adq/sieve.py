"""Prime generation, primality and factorization.

The prime table is an odd-only segmented sieve of Eratosthenes. Index ``i``
of the odd map stands for the integer ``2*i + 1``; 2 is handled separately.
"""
from __future__ import annotations

import math
import os
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import BoundsError, DomainError

MAX_LIMIT = 10**9
SEGMENT_SIZE = 1 << 20          # integers per segment
SPF_LIMIT = 1 << 21             # smallest-prime-factor table size
CACHE_MAGIC = b"ADQ1"


def _small_sieve(limit: int) -> np.ndarray:
    """Plain sieve, returns the primes <= limit."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _sieve_segment(odd: np.ndarray, lo: int, hi: int, base: np.ndarray) -> None:
    # marks composites among odd integers in [lo, hi); lo is odd
    seg = odd[lo // 2:(hi + 1) // 2]
    for p in base:
        p = int(p)
        pp = p * p
        if pp >= hi:
            break
        start = max(pp, ((lo + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        if start >= hi:
            continue
        seg[(start - lo) // 2::p] = False


@dataclass(frozen=True, eq=False)
class PrimeSet:
    """Immutable membership table for the primes in [2, limit]."""

    limit: int
    odd: np.ndarray
    count: int

    def __contains__(self, n: int) -> bool:
        return self.is_prime(n)

    def is_prime(self, n: int) -> bool:
        if n > self.limit:
            raise BoundsError(f"{n} exceeds sieve limit {self.limit}")
        if n < 2:
            return False
        if n % 2 == 0:
            return n == 2
        return bool(self.odd[n >> 1])

    def contains_array(self, ns: np.ndarray) -> np.ndarray:
        """Vectorized membership for an integer array with entries in [0, limit]."""
        ns = np.asarray(ns, dtype=np.int64)
        out = ns == 2
        odd = (ns & 1).astype(bool)
        out[odd] = self.odd[ns[odd] >> 1]
        return out

    def primes(self) -> np.ndarray:
        cached = self.__dict__.get("_primes")
        if cached is None:
            odds = 2 * np.flatnonzero(self.odd).astype(np.int64) + 1
            cached = np.concatenate(([2], odds)) if self.limit >= 2 else odds
            cached.flags.writeable = False
            object.__setattr__(self, "_primes", cached)
        return cached

    def prime_list(self) -> list[int]:
        cached = self.__dict__.get("_list")
        if cached is None:
            cached = self.primes().tolist()
            object.__setattr__(self, "_list", cached)
        return cached

    def primes_between(self, lo: int, hi: int) -> np.ndarray:
        ps = self.primes()
        return ps[np.searchsorted(ps, lo):np.searchsorted(ps, hi, side="right")]

    def __iter__(self) -> Iterator[int]:
        return iter(self.prime_list())

    def __len__(self) -> int:
        return self.count

    def __repr__(self) -> str:
        return f"PrimeSet(limit={self.limit}, count={self.count})"


def _cache_path(cache_dir: str | os.PathLike, limit: int) -> Path:
    return Path(cache_dir) / f"sieve_{limit}.adq"


def write_cache(ps: PrimeSet, path: str | os.PathLike) -> Path:
    """Write the odd-only bitmap atomically (temp file + rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = np.packbits(ps.odd, bitorder="little").tobytes()
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(CACHE_MAGIC)
            fh.write(ps.limit.to_bytes(8, "little"))
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_cache(path: str | os.PathLike) -> PrimeSet:
    raw = Path(path).read_bytes()
    if raw[:4] != CACHE_MAGIC or len(raw) < 12:
        raise ValueError(f"{path}: not a sieve cache file")
    limit = int.from_bytes(raw[4:12], "little")
    nbits = (limit + 1) // 2
    bits = np.frombuffer(raw, dtype=np.uint8, offset=12)
    if bits.size != (nbits + 7) // 8:
        raise ValueError(f"{path}: truncated bitmap")
    odd = np.unpackbits(bits, bitorder="little", count=nbits).astype(bool)
    odd.flags.writeable = False
    return PrimeSet(limit, odd, int(odd.sum()) + 1)


def build_prime_set(limit: int, *, cache_dir: str | os.PathLike | None = None,
                    max_limit: int = MAX_LIMIT, segment_size: int = SEGMENT_SIZE,
                    jobs: int = 1) -> PrimeSet:
    """Sieve the primes up to ``limit``.

    With ``cache_dir`` an existing ``sieve_<limit>.adq`` file is reused and a
    fresh sieve is written there. Segments are independent, so ``jobs > 1``
    fans them out over threads without changing the result.
    """
    if limit < 2 or limit > max_limit:
        raise BoundsError(f"limit must lie in [2, {max_limit}], got {limit}")
    if cache_dir is not None:
        path = _cache_path(cache_dir, limit)
        if path.exists():
            return read_cache(path)

    base = _small_sieve(math.isqrt(limit))[1:]     # odd base primes
    odd = np.ones((limit + 1) // 2, dtype=bool)
    odd[0] = False                                  # 1 is not prime
    seg = max(2, segment_size - segment_size % 2)
    bounds = [(lo, min(lo + seg, limit + 1)) for lo in range(1, limit + 1, seg)]
    if jobs > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(lambda b: _sieve_segment(odd, b[0], b[1], base), bounds))
    else:
        for lo, hi in bounds:
            _sieve_segment(odd, lo, hi, base)
    odd.flags.writeable = False
    ps = PrimeSet(limit, odd, int(odd.sum()) + 1)
    if cache_dir is not None:
        write_cache(ps, _cache_path(cache_dir, limit))
    return ps


_lock = threading.Lock()
_shared: PrimeSet | None = None


def shared_primes(limit: int) -> PrimeSet:
    """Process-wide prime table covering at least ``limit``; grows by doubling."""
    global _shared
    with _lock:
        if _shared is None or _shared.limit < limit:
            size = max(limit, 1 << 16, 2 * _shared.limit if _shared is not None else 0)
            size = min(size, max(MAX_LIMIT, limit))
            _shared = build_prime_set(size, max_limit=size)
        return _shared


def is_prime(n: int, primes: PrimeSet | None = None) -> bool:
    """Deterministic primality: table lookup when covered, trial division otherwise."""
    if n < 2:
        return False
    if primes is not None and n <= primes.limit:
        return primes.is_prime(n)
    table = _shared
    if table is not None and n <= table.limit:
        return table.is_prime(n)
    if n <= (1 << 22):
        return shared_primes(n).is_prime(n)
    if n % 2 == 0:
        return False
    r = math.isqrt(n)
    for p in shared_primes(r).primes_between(3, r).tolist():
        if n % p == 0:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as ``((p, e), ...)`` with strictly increasing p."""

    factors: tuple[tuple[int, int], ...]

    @property
    def n(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    def __iter__(self):
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def prime_powers(self) -> list[int]:
        return [p**e for p, e in self.factors]


_spf: np.ndarray | None = None


def _spf_table() -> np.ndarray:
    global _spf
    if _spf is None:
        with _lock:
            if _spf is None:
                spf = np.zeros(SPF_LIMIT + 1, dtype=np.int32)
                for p in _small_sieve(math.isqrt(SPF_LIMIT)).tolist():
                    view = spf[p * p::p]
                    view[view == 0] = p
                idx = np.flatnonzero(spf == 0)
                spf[idx] = idx
                _spf = spf
    return _spf


def _factor_small(n: int, out: dict[int, int]) -> None:
    spf = _spf_table()
    while n > 1:
        p = int(spf[n])
        n //= p
        out[p] = out.get(p, 0) + 1


def factorize(n: int) -> Factorization:
    """Smallest-prime-factor table below ``SPF_LIMIT``, trial division above."""
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    out: dict[int, int] = {}
    if n <= SPF_LIMIT:
        _factor_small(n, out)
    else:
        r = math.isqrt(n)
        table = shared_primes(max(r, 1 << 16))
        for p in table.prime_list():
            if p * p > n:
                break
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out[p] = e
                if n <= SPF_LIMIT:
                    break
                if n <= table.limit and table.is_prime(n):
                    break
        if 1 < n <= SPF_LIMIT:
            _factor_small(n, out)
        elif n > 1:
            out[n] = out.get(n, 0) + 1
    return Factorization(tuple(sorted(out.items())))
