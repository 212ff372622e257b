"""Workbench for multiplicative solutions of f(p+q-2) = f(p) + f(q) - f(2) over primes."""

__version__ = "0.1.0"
