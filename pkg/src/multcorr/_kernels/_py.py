"""Pure numpy fallback for the compiled kernels.

Same contracts as ``_ckernels``; used when the extension is not built or
when MULTCORR_PURE=1 forces it.
"""

import numpy as np


def spf_sieve(limit):
    """Smallest-prime-factor table for 0..limit (spf[0]=0, spf[1]=1)."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    spf = np.zeros(limit + 1, dtype=np.int64)
    spf[1] = 1
    for i in range(2, int(limit**0.5) + 1):
        if spf[i] == 0:
            block = spf[i * i :: i]
            block[block == 0] = i
    rest = spf[2:] == 0
    spf[2:][rest] = np.arange(2, limit + 1, dtype=np.int64)[rest]
    return spf


def fill_multiplicative(spf, values):
    """Complete a multiplicative value table from its prime-power entries.

    Vectorised variant: instead of the per-n recurrence, multiply the strata
    of exact p-adic valuation.  values[p^k] entries are consumed as the
    per-prime-power factors; composites start from 1 implicitly, so the table
    is rebuilt with stratified multiplications.
    """
    limit = len(spf) - 1
    primes = np.nonzero(spf[2:] == np.arange(2, limit + 1, dtype=np.int64))[0] + 2
    # Save the preset prime-power factors before overwriting the table.
    factors = {}
    for p in primes:
        p = int(p)
        pk = p
        while pk <= limit:
            factors[pk] = values[pk]
            pk *= p
    values[1:] = 1.0
    for p in primes:
        p = int(p)
        pk = p
        while pk <= limit:
            fac = factors[pk]
            mult = np.arange(pk, limit + 1, pk, dtype=np.int64)
            exact = mult[(mult // pk) % p != 0]
            values[exact] *= fac
            pk *= p


def corr_inner1(t0, t1, c1, a1, v1):
    """sum_{t=t0..t1} v1[c1 + a1*t]; caller guarantees indices in range."""
    t = np.arange(t0, t1 + 1, dtype=np.int64)
    return float(np.sum(v1[c1 + a1 * t]))


def corr_inner2(t0, t1, c1, a1, v1, c2, a2, v2):
    """sum_{t=t0..t1} v1[c1 + a1*t] * v2[c2 + a2*t]."""
    t = np.arange(t0, t1 + 1, dtype=np.int64)
    return float(np.sum(v1[c1 + a1 * t] * v2[c2 + a2 * t]))


def corr_inner3(t0, t1, c1, a1, v1, c2, a2, v2, c3, a3, v3):
    """sum_{t=t0..t1} v1[c1 + a1*t] * v2[c2 + a2*t] * v3[c3 + a3*t]."""
    t = np.arange(t0, t1 + 1, dtype=np.int64)
    return float(np.sum(v1[c1 + a1 * t] * v2[c2 + a2 * t] * v3[c3 + a3 * t]))
