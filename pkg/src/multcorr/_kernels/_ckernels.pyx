# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: spf sieve, multiplicative table assembly, correlation inner sums.

Each function has a numpy twin in ``_py.py`` with the same signature; the
package selects a backend at import time and the test suite checks the two
backends agree element-for-element.
"""

import numpy as np


def spf_sieve(long long limit):
    """Smallest-prime-factor table for 0..limit (spf[0]=0, spf[1]=1).

    Linear sieve: every composite is written exactly once, as (smallest
    prime) * (cofactor).
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    out = np.zeros(limit + 1, dtype=np.int64)
    cdef long long[::1] spf = out
    primes_arr = np.empty(max(16, limit // 2 + 1), dtype=np.int64)
    cdef long long[::1] primes = primes_arr
    cdef long long count = 0
    cdef long long i, p
    cdef Py_ssize_t j
    spf[1] = 1
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            primes[count] = i
            count += 1
        j = 0
        while j < count:
            p = primes[j]
            if p > spf[i] or p > limit // i:
                break
            spf[i * p] = p
            j += 1
    return out


def fill_multiplicative(const long long[::1] spf, double[::1] values):
    """Complete a multiplicative value table from its prime-power entries.

    On entry ``values[p^k]`` must hold f(p^k) for every prime power <= limit
    and ``values[1] = 1``.  On exit ``values[n] = prod f(p^{v_p(n)})`` for all
    n in [1, limit].  Runs the linear smallest-prime-factor recurrence
    values[n] = values[n / p^v] * values[p^v] with p = spf[n], v = v_p(n).
    """
    cdef long long limit = spf.shape[0] - 1
    cdef long long n, p, rest, pk
    for n in range(2, limit + 1):
        p = spf[n]
        rest = n // p
        if rest == 1:
            continue  # prime: preset
        pk = p
        while rest % p == 0:
            rest //= p
            pk *= p
        if rest == 1:
            continue  # prime power: preset
        values[n] = values[rest] * values[pk]


def corr_inner1(long long t0, long long t1,
                long long c1, long long a1, const double[::1] v1):
    """sum_{t=t0..t1} v1[c1 + a1*t]; caller guarantees indices in range."""
    cdef double acc = 0.0
    cdef long long t
    for t in range(t0, t1 + 1):
        acc += v1[c1 + a1 * t]
    return acc


def corr_inner2(long long t0, long long t1,
                long long c1, long long a1, const double[::1] v1,
                long long c2, long long a2, const double[::1] v2):
    """sum_{t=t0..t1} v1[c1 + a1*t] * v2[c2 + a2*t]."""
    cdef double acc = 0.0
    cdef long long t
    for t in range(t0, t1 + 1):
        acc += v1[c1 + a1 * t] * v2[c2 + a2 * t]
    return acc


def corr_inner3(long long t0, long long t1,
                long long c1, long long a1, const double[::1] v1,
                long long c2, long long a2, const double[::1] v2,
                long long c3, long long a3, const double[::1] v3):
    """sum_{t=t0..t1} v1[c1 + a1*t] * v2[c2 + a2*t] * v3[c3 + a3*t]."""
    cdef double acc = 0.0
    cdef long long t
    for t in range(t0, t1 + 1):
        acc += v1[c1 + a1 * t] * v2[c2 + a2 * t] * v3[c3 + a3 * t]
    return acc
