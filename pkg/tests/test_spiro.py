import math
from fractions import Fraction

import numpy as np
import pytest

from adq.errors import DomainError
from adq.spiro import (DEFAULT, HParams, find_q_for_m, h_cap, h_mask, hn_density, hn_stream,
                       in_h, smallest_non_member)

from conftest import trial_factor, trial_is_prime


def oracle_in_h(n, bound=10**9, threshold=1000):
    for p, e in trial_factor(n):
        cap = 1 if p > threshold else int(math.floor(math.log(bound) / math.log(p) + 1e-12))
        if e > cap:
            return False
    return True


def test_cap_examples():
    assert h_cap(2) == 29 and h_cap(997) == 3 and h_cap(1009) == 1
    with pytest.raises(DomainError):
        h_cap(9)


def test_minus_one_variant():
    v = HParams(minus_one=True)
    assert h_cap(2, v) == 28 and h_cap(1009, v) == 1
    assert smallest_non_member(2 * 10**6, v) == 1018081


def test_membership_examples():
    assert not in_h(1018081)
    assert in_h(2**29) and not in_h(2**30)
    assert in_h(1)


def test_smallest_non_member():
    assert smallest_non_member(2 * 10**6) == 1018081
    assert smallest_non_member(10**6) is None
    assert smallest_non_member(1) is None


def test_mask_matches_membership():
    mask = h_mask(200_000)
    xs = list(range(1, 2000)) + list(range(1018070, 1018090))
    big = h_mask(1_018_100)
    for n in xs:
        assert bool(big[n]) == in_h(n) == oracle_in_h(n)
    assert mask[1:].all() == (smallest_non_member(200_000) is None)


@pytest.mark.parametrize("n,limit,want", [(9, 40, [18, 36]), (4, 20, [4, 12, 20]),
                                          (1, 10, [2, 4, 6, 8, 10])])
def test_hn_examples(n, limit, want):
    assert list(hn_stream(n, limit)) == want


def hn_oracle(n, limit):
    out = []
    for k in range(2, limit + 1, 2):
        if n % 2 == 0:
            m, ok = divmod(k, n)
            if ok == 0 and m >= 1 and math.gcd(m, n) == 1 and oracle_in_h(m):
                out.append(k)
        elif k % (2 * n) == 0:
            m = k // (2 * n)
            if math.gcd(m, n) == 1 and oracle_in_h(2 * m):
                out.append(k)
    return out


def test_hn_against_enumeration():
    for n in (1, 2, 3, 6, 9, 10, 15, 1009, 2018):
        assert list(hn_stream(n, 30_000)) == hn_oracle(n, 30_000)


def test_hn_density():
    assert hn_density(1, 10) == Fraction(1, 2)
    d = hn_density(9, 10**6)
    assert d == Fraction(37037, 10**6)       # golden, from the enumeration oracle below
    # H has no non-members below 10^6, so the count is the number of m <= 10^6/18 coprime to 9
    top = 10**6 // 18
    assert d * 10**6 == sum(1 for m in range(1, top + 1) if m % 3)
    with pytest.raises(DomainError):
        hn_density(10, 5)


def test_hn_members_even_and_ascending():
    for n in range(1, 60):
        xs = list(hn_stream(n, 5000))
        assert all(x % 2 == 0 for x in xs)
        assert xs == sorted(set(xs))


def test_find_q():
    assert find_q_for_m(20) == 3 and find_q_for_m(4) == 3
    assert find_q_for_m(1018078) == 5     # 1018078 + 3 = 1009^2 is not in H
    for m in range(4, 3000):
        q = find_q_for_m(m)
        assert trial_is_prime(q) and q % 2 and q <= m - 1 and oracle_in_h(m + q)
        assert all(not (trial_is_prime(x) and oracle_in_h(m + x)) for x in range(3, q, 2))
    with pytest.raises(DomainError):
        find_q_for_m(3)


def test_divisor_closure_sample(rng):
    members = np.flatnonzero(h_mask(2 * 10**6))
    for n in rng.choice(members, size=500).tolist():
        for p, _ in trial_factor(n):
            assert in_h(n // p)
