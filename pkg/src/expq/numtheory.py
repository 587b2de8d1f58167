"""Exact integer helpers: lambda, log-of-ratio bounds, and 2^x = r (mod q)."""

from __future__ import annotations

from dataclasses import dataclass


def lam(n: int) -> int:
    """Largest power of two not exceeding |n|; lam(0) = 0."""
    n = abs(n)
    if n == 0:
        return 0
    return 1 << (n.bit_length() - 1)


def log2_exact(p: int) -> int:
    if p <= 0 or p & (p - 1):
        raise ValueError(f"{p} is not a power of two")
    return p.bit_length() - 1


def _scaled_ge(a: int, k: int, b: int) -> bool:
    # a * 2^k >= b, for any integer k
    if k >= 0:
        return (a << k) >= b
    return a >= (b << -k)


def ceil_log2_ratio(b: int, a: int) -> int:
    """Smallest integer k with a * 2^k >= b, i.e. ceil(log2(b/a))."""
    if a < 1 or b < 1:
        raise ValueError("ceil_log2_ratio expects positive arguments")
    k = b.bit_length() - a.bit_length() - 1
    while not _scaled_ge(a, k, b):
        k += 1
    while _scaled_ge(a, k - 1, b):
        k -= 1
    return k


def floor_log2_ratio(b: int, a: int) -> int:
    """Largest integer k with a * 2^k <= b, i.e. floor(log2(b/a))."""
    if a < 1 or b < 1:
        raise ValueError("floor_log2_ratio expects positive arguments")
    k = b.bit_length() - a.bit_length() + 1
    while _scaled_ge(a, k, b + 1):
        k -= 1
    while not _scaled_ge(a, k + 1, b + 1):
        k += 1
    return k


@dataclass(frozen=True)
class Unsat:
    def contains(self, x: int) -> bool:
        return False


@dataclass(frozen=True)
class Single:
    s: int

    def contains(self, x: int) -> bool:
        return x == self.s


@dataclass(frozen=True)
class Progression:
    s: int
    t: int

    def contains(self, x: int) -> bool:
        return x >= self.s and (x - self.s) % self.t == 0


CongruenceSolution = Unsat | Single | Progression


def solve_pow_congruence(q: int, r: int, base: int = 2) -> CongruenceSolution:
    """Solve base^x = r (mod q) over x >= 0.

    Both the least solution s and the period t are searched up to q - 1
    (at least 1, so that the trivial modulus q = 1 still has its period).
    """
    if q < 1:
        raise ValueError("modulus must be positive")
    if not 0 <= r < q:
        raise ValueError("residue must lie in [0, q-1]")
    cap = max(q - 1, 1)
    s = None
    p = 1 % q
    for e in range(cap + 1):
        if p == r:
            s = e
            break
        p = p * base % q
    if s is None:
        return Unsat()
    p = base % q
    for u in range(1, cap + 1):
        if r * (p - 1) % q == 0:
            return Progression(s, u)
        p = p * base % q
    return Single(s)


def totient(n: int) -> int:
    """Euler's phi by trial division.  Only used by the test oracles."""
    if n < 1:
        raise ValueError("totient of a non-positive number")
    out = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


def odd_part(n: int) -> int:
    while n and n % 2 == 0:
        n //= 2
    return n
