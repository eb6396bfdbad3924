"""Small shared number-theory helpers: factorization, primes, smooth numbers."""

import math
from functools import reduce

import numpy as np

from ._kernels import spf_sieve


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    spf = spf_sieve(limit)
    idx = np.arange(limit + 1, dtype=np.int64)
    return idx[2:][spf[2:] == idx[2:]]


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 by trial division, as (p, exponent) pairs."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    d = 5
    while d * d <= n:
        for p in (d, d + 2):
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out.append((p, e))
        d += 6
    if n > 1:
        out.append((n, 1))
    return out


def factorize_spf(n: int, spf) -> list[tuple[int, int]]:
    """Factorization of 1 <= n <= len(spf)-1 using a smallest-prime-factor table."""
    out = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def divisors(factorization: list[tuple[int, int]], cap: int | None = None) -> list[int]:
    """All divisors built from a factorization, optionally only those <= cap."""
    divs = [1]
    for p, e in factorization:
        block = []
        pk = 1
        for _ in range(e):
            pk *= p
            for d in divs:
                v = d * pk
                if cap is None or v <= cap:
                    block.append(v)
        divs.extend(block)
    return sorted(divs)


def totient(n: int) -> int:
    """Euler's phi(n)."""
    result = n
    for p, _ in factorize(n):
        result -= result // p
    return result


def lcm_all(values) -> int:
    return reduce(math.lcm, values, 1)


def prime_power_value(n: int) -> tuple[int, int] | None:
    """(p, k) if n = p^k for a prime p and k >= 1, else None."""
    if n < 2:
        return None
    fac = factorize(n)
    if len(fac) == 1:
        return fac[0]
    return None


def smooth_numbers(primes, cap: int) -> list[int]:
    """Sorted list of integers <= cap composed only of the given primes (includes 1)."""
    out = [1]
    for p in primes:
        p = int(p)
        extended = []
        for m in out:
            v = m * p
            while v <= cap:
                extended.append(v)
                v *= p
        out.extend(extended)
    return sorted(out)


def smooth_part(n: int, bound: float) -> int:
    """Largest divisor of n composed only of primes <= bound."""
    part = 1
    for p, e in factorize(n):
        if p <= bound:
            part *= p**e
    return part


def square_part_root(factorization: list[tuple[int, int]]) -> int:
    """Largest d such that d^2 divides the factorised integer."""
    d = 1
    for p, e in factorization:
        d *= p ** (e // 2)
    return d
