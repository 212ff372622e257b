import math

import pytest


def trial_is_prime(n: int) -> bool:
    """Independent oracle: plain trial division."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def trial_factor(n: int) -> list[tuple[int, int]]:
    out, d = [], 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(20240601)


# acceptance results, filled by test_acceptance.py and printed after the run
ACCEPTANCE: list[tuple[int, bool, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, title, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {num:2d}: {title} -- {detail}")
