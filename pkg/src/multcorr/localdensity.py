"""Local densities of divisibility conditions on linear systems, the per-prime
Euler factors weighted by multiplicative functions, the archimedean factor,
and the assembled main-term predictions for correlation sums.

Densities are exact rationals.  Small moduli are counted by direct residue
enumeration; large prime powers go through an exact Smith-normal-form count
of the affine congruence system (no CRT across primes is ever needed because
everything is assembled one prime at a time).
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .linsys import ConvexBody, LinearSystem, lattice_count
from .multfunc import MultiplicativeFunction, SieveTable
from .numtheory import factorize, lcm_all, smooth_numbers

ENUMERATION_BUDGET = 2_000_000


class EnumerationBudgetError(ValueError):
    """Requested residue enumeration exceeds the budget."""


def count_affine_solutions(rows: Sequence[Sequence[int]], rhs: Sequence[int], modulus: int) -> int:
    """Number of v in (Z/modulus)^s with rows . v = rhs (mod modulus), exactly.

    Diagonalizes the matrix by unimodular row/column operations (row ops are
    mirrored on rhs; column ops only reparametrize v), then multiplies the
    per-coordinate solution counts gcd(d_i, modulus).
    """
    m = [list(map(int, row)) for row in rows]
    c = [int(x) for x in rhs]
    r = len(m)
    s = len(m[0]) if r else 0
    t = 0
    while t < min(r, s):
        # locate smallest nonzero pivot in the trailing submatrix
        pivot = None
        for i in range(t, r):
            for j in range(t, s):
                if m[i][j] != 0 and (pivot is None or abs(m[i][j]) < abs(m[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        i0, j0 = pivot
        if i0 != t:
            m[t], m[i0] = m[i0], m[t]
            c[t], c[i0] = c[i0], c[t]
        if j0 != t:
            for row in m:
                row[t], row[j0] = row[j0], row[t]
        dirty = False
        for i in range(t + 1, r):
            q = m[i][t] // m[t][t]
            if q:
                for j in range(t, s):
                    m[i][j] -= q * m[t][j]
                c[i] -= q * c[t]
            if m[i][t]:
                dirty = True
        for j in range(t + 1, s):
            q = m[t][j] // m[t][t]
            if q:
                for i in range(t, r):
                    m[i][j] -= q * m[i][t]
            if m[t][j]:
                dirty = True
        if not dirty:
            t += 1
        # otherwise repeat with the (smaller) remainders as pivot candidates
    count = modulus ** (s - t)
    for i in range(t):
        g = math.gcd(m[i][i], modulus)
        if c[i] % g:
            return 0
        count *= g
    for i in range(t, r):
        if c[i] % modulus:
            return 0
    return count


def _density_direct(system: LinearSystem, p: int, exps: Sequence[int]) -> Fraction:
    """Direct vectorized count over (Z/p^m)^s; m = max exps."""
    m = max(exps)
    mod = p**m
    s = system.s
    grids = np.indices((mod,) * s).reshape(s, -1)
    mask = np.ones(grids.shape[1], dtype=bool)
    for f, c in zip(system.forms, exps):
        if c == 0:
            continue
        vals = f.constant * np.ones(grids.shape[1], dtype=np.int64)
        for coef, g in zip(f.coeffs, grids):
            vals += coef * g
        mask &= np.mod(vals, p**c) == 0
    return Fraction(int(np.count_nonzero(mask)), mod**s)


def _density_lifted(system: LinearSystem, p: int, exps: Sequence[int]) -> Fraction:
    """Smith-normal-form count of the congruences p^{c_i} | phi_i(v) mod p^m."""
    m = max(exps)
    mod = p**m
    rows, rhs = [], []
    for f, c in zip(system.forms, exps):
        if c == 0:
            continue
        scale = p ** (m - c)
        rows.append([scale * a for a in f.coeffs])
        rhs.append(-scale * f.constant)
    if not rows:
        return Fraction(1)
    return Fraction(count_affine_solutions(rows, rhs, mod), mod**system.s)


def prime_power_divisor_density(
    system: LinearSystem, p: int, exps: Sequence[int], budget: int = ENUMERATION_BUDGET
) -> Fraction:
    """Exact density of {v mod p^m : p^{c_i} | phi_i(v) for all i}, m = max c_i.

    Direct enumeration when p^{m s} fits the budget, exact linear-algebra
    lifting otherwise; the two agree (tested), so the budget only affects cost.
    """
    if len(exps) != system.r:
        raise ValueError("one exponent per form required")
    if any(c < 0 for c in exps):
        raise ValueError("exponents must be >= 0")
    m = max(exps)
    if m == 0:
        return Fraction(1)
    if p ** (m * system.s) <= budget:
        return _density_direct(system, p, exps)
    return _density_lifted(system, p, exps)


def composite_divisor_density(system: LinearSystem, moduli: Sequence[int]) -> Fraction:
    """Density of {v : M_i | phi_i(v)} modulo lcm(M_i), multiplicative over primes."""
    if any(m < 1 for m in moduli):
        raise ValueError("moduli must be >= 1")
    L = lcm_all(moduli)
    if L == 1:
        return Fraction(1)
    out = Fraction(1)
    for prime, _ in factorize(L):
        exps = []
        for m in moduli:
            e = 0
            while m % prime == 0:
                m //= prime
                e += 1
            exps.append(e)
        out *= prime_power_divisor_density(system, prime, exps)
    return out


# ---------------------------------------------------------------------------
# Euler factors
# ---------------------------------------------------------------------------


@dataclass
class EulerFactor:
    """Truncated local factor at p with its rigorous truncation tail bound.

    `value` is the literal truncated sum times prod_j (1 + f_j(p)/p)^{-1};
    `normalized` additionally divides out the same factor evaluated for each
    f_j on the reference single form phi(n) = n, i.e. it is the ratio of the
    joint local mean to the product of marginal local means.  The normalized
    factor is the one satisfying 1 + O(p^{-2}) and the one whose product over
    p converges; the literal factor is what the closed-form oracles pin down.
    """

    p: int
    value: float
    max_exp: int
    tail_bound: float
    exact_value: Optional[Fraction] = None
    normalized: float = 0.0


def _exact_divisibility_density(
    system: LinearSystem, p: int, exps: tuple[int, ...], cache: dict
) -> Fraction:
    """Density of {v : p^{a_j} exactly divides phi_j(v) for all j}.

    Inclusion-exclusion over which forms get one extra power; all pieces are
    plain divisibility densities, evaluated at modulus p^{max+1} where exact
    divisibility is unambiguous (densities are modulus-free, so only the
    inclusion-exclusion matters here).
    """
    total = Fraction(0)
    r = len(exps)
    for pattern in itertools.product((0, 1), repeat=r):
        bumped = tuple(a + b for a, b in zip(exps, pattern))
        key = (p, bumped)
        if key not in cache:
            cache[key] = prime_power_divisor_density(system, p, bumped)
        sign = -1 if sum(pattern) % 2 else 1
        total += sign * cache[key]
    return total


def _form_content_valuation(form, p: int) -> int:
    g = 0
    for c in form.coeffs:
        g = math.gcd(g, abs(c))
    v = 0
    while g and g % p == 0:
        g //= p
        v += 1
    return v


def euler_factor(
    system: LinearSystem,
    funcs: Sequence[MultiplicativeFunction],
    p: int,
    max_exp: int,
    exact: bool = False,
) -> EulerFactor:
    """Local factor at p:

        sum over (a_1..a_r) in [0, max_exp]^r of
            prod_j f_j(p^{a_j}) * dens(exact divisibility pattern a)
        times prod_j (1 + f_j(p)/p)^{-1}.

    Requires nonnegative functions.  The tail bound covers every discarded
    tuple via |f(p^a)| <= H^a and the content-adjusted envelope
    dens <= p^{content - max_j a_j}; it is infinite when max_j H_j^r >= p
    (reported, never asserted finite).
    """
    if max_exp < 1:
        raise ValueError("max_exp must be >= 1")
    for f in funcs:
        if not f.nonnegative:
            raise ValueError(f"{f.name} is not flagged nonnegative")
    r = system.r
    cache: dict = {}
    vals: dict[int, list] = {}
    for j, f in enumerate(funcs):
        vals[j] = [1.0] + [f.at_prime_power(p, k) for k in range(1, max_exp + 1)]
    total_f = Fraction(0) if exact else 0.0
    for tup in itertools.product(range(max_exp + 1), repeat=r):
        dens = _exact_divisibility_density(system, p, tup, cache)
        if dens == 0:
            continue
        if exact:
            w = Fraction(1)
            for j, a in enumerate(tup):
                w *= Fraction(vals[j][a])
            total_f += w * dens
        else:
            w = 1.0
            for j, a in enumerate(tup):
                w *= vals[j][a]
            total_f += w * float(dens)
    if exact:
        norm = Fraction(1)
        for j, f in enumerate(funcs):
            norm *= 1 / (1 + Fraction(vals[j][1]) / p)
        exact_value = total_f * norm
        value = float(exact_value)
    else:
        norm = 1.0
        for j in range(r):
            norm /= 1.0 + vals[j][1] / p
        exact_value = None
        value = total_f * norm

    # tail over tuples with max exponent M > max_exp
    h_max = max(f.growth_bound for f in funcs)
    content = max(_form_content_valuation(f, p) for f in system.forms)
    q = h_max**r / p
    if q >= 1.0:
        tail = math.inf
    else:
        tail = 0.0
        term_cap = 400
        for k in range(1, term_cap + 1):
            M = max_exp + k
            tail += r * (M + 1) ** (r - 1) * q**M
        tail += r * (max_exp + term_cap + 2) ** (r - 1) * q ** (max_exp + term_cap) * q / (1 - q)
        tail *= p**content * float(norm)
    marginal = 1.0
    for j, f in enumerate(funcs):
        # local mean of f_j on the reference form phi(n) = n, same truncation
        # and the same (1 + f(p)/p)^{-1} factor as the joint sum
        mean_j = math.fsum(
            vals[j][a] * (p**-a) * (1.0 - 1.0 / p) for a in range(max_exp + 1)
        )
        marginal *= mean_j / (1.0 + vals[j][1] / p)
    return EulerFactor(
        p=p,
        value=value,
        max_exp=max_exp,
        tail_bound=tail,
        exact_value=exact_value,
        normalized=value / marginal if marginal else math.inf,
    )


def archimedean_factor(
    system: LinearSystem,
    funcs: Sequence[MultiplicativeFunction],
    tbls: Sequence[SieveTable],
    body: ConvexBody,
    T: int,
) -> float:
    """lattice_count(T*body) * (log T)^{-r} * prod_j prod_{p<=T} (1 + f_j(p)/p).

    The exact lattice count stands in for vol * T^s (they differ by a
    boundary term absorbed in the error).
    """
    r = len(funcs)
    count = lattice_count(body, T)
    log_factor = math.log(T) ** (-r)
    euler = 0.0
    for tbl in tbls:
        p = tbl.primes()
        p = p[p <= T]
        ratios = tbl.values[p] / p
        if np.any(ratios <= -1):
            raise ValueError("Euler product undefined: some 1 + f(p)/p <= 0")
        euler += math.fsum(np.log1p(ratios).tolist())
    return count * log_factor * math.exp(euler)


@dataclass
class LocalDensityReport:
    """Per-prime factors with truncation data plus the assembled prediction."""

    prime_cutoff: int
    max_exp: int
    entries: list[EulerFactor] = field(default_factory=list)
    beta_infinity: float = 0.0
    product_over_primes: float = 1.0
    prediction: float = 0.0
    envelope_constant: float = 0.0
    tail_factor_bound: float = 1.0


def corollary_prediction(
    system: LinearSystem,
    funcs: Sequence[MultiplicativeFunction],
    tbls: Sequence[SieveTable],
    body: ConvexBody,
    T: int,
    max_exp: int = 6,
    prime_cutoff: int = 100,
    threads: int = 1,
) -> LocalDensityReport:
    """Archimedean factor times the truncated product of local factors.

    Local factors at distinct primes are independent; with threads > 1 they
    are computed in a pool and merged in prime order (deterministic).
    """
    from .numtheory import primes_up_to

    report = LocalDensityReport(prime_cutoff=prime_cutoff, max_exp=max_exp)
    primes = [int(p) for p in primes_up_to(prime_cutoff)]
    if threads > 1 and len(primes) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            report.entries = list(
                pool.map(lambda p: euler_factor(system, funcs, p, max_exp), primes)
            )
    else:
        report.entries = [euler_factor(system, funcs, p, max_exp) for p in primes]
    report.beta_infinity = archimedean_factor(system, funcs, tbls, body, T)
    # the assembled prediction multiplies the literal truncated local factors;
    # the marginal-normalized factors (whose product converges, deviating from
    # 1 by O(p^-2)) are reported alongside and drive the envelope constant
    report.product_over_primes = math.prod(e.value for e in report.entries)
    report.prediction = report.beta_infinity * report.product_over_primes
    if report.entries:
        report.envelope_constant = max(
            abs(e.normalized - 1.0) * e.p**2 for e in report.entries
        )
        # residual factor for the primes beyond the cutoff, using the fitted
        # c/p^2 envelope on the normalized factors: |log prod| <= c/cutoff
        report.tail_factor_bound = math.exp(report.envelope_constant / prime_cutoff)
    return report


# ---------------------------------------------------------------------------
# Main-term evaluation of the full smooth-residue double sum
# ---------------------------------------------------------------------------


@dataclass
class TheoremPrediction:
    value: float
    tuples_used: int
    smooth_cap: float
    w_tilde: int


def theorem_prediction(
    system: LinearSystem,
    funcs: Sequence[MultiplicativeFunction],
    wctx,
    tbls: Sequence[SieveTable],
    T: int,
    b2: Optional[float] = None,
) -> TheoremPrediction:
    """Average per lattice point predicted by the smooth-residue double sum:

        sum over w-smooth tuples (w_1..w_r), w_i <= (log T)^{B2}
        sum over (A_1..A_r) in ((Z/W~)^*)^r
            prod_i f_i(w_i) S_{f_i}(T; W~, A_i)
            * density{ v mod w W~ : phi_j(v) = w_j A_j  (mod w_j W~) }

    with w = lcm(w_i).  The residue density is assembled prime by prime with
    the exact affine-congruence count, never by enumerating v mod w W~.
    """
    from .wtrick import residue_mean_table

    b2 = wctx.B2 if b2 is None else b2
    cap = math.log(T) ** b2
    w_tilde = wctx.W_tilde
    small_primes = [int(p) for p in wctx.prime_list]
    smooth = smooth_numbers(small_primes, int(cap))
    r = system.r
    tables = [residue_mean_table(tbl, T, w_tilde, wctx) for tbl in tbls]
    coprime_res = sorted(tables[0].means.keys())
    f_at = [{w: f(w) for w in smooth} for f in funcs]

    total = 0.0
    used = 0
    for w_vec in itertools.product(smooth, repeat=r):
        f_weight = 1.0
        for j in range(r):
            f_weight *= f_at[j][w_vec[j]]
        if f_weight == 0.0:
            continue
        w = lcm_all(w_vec)
        mod_full = w * w_tilde
        for a_vec in itertools.product(coprime_res, repeat=r):
            dens = Fraction(1)
            for prime, _ in factorize(mod_full):
                e_full = 0
                m = mod_full
                while m % prime == 0:
                    m //= prime
                    e_full += 1
                rows, rhs = [], []
                for j, form in enumerate(system.forms):
                    mj = w_vec[j] * w_tilde
                    ej = 0
                    while mj % prime == 0:
                        mj //= prime
                        ej += 1
                    if ej == 0:
                        continue
                    scale = prime ** (e_full - ej)
                    rows.append([scale * cc for cc in form.coeffs])
                    rhs.append(scale * (w_vec[j] * a_vec[j] - form.constant))
                if rows:
                    cnt = count_affine_solutions(rows, rhs, prime**e_full)
                    dens *= Fraction(cnt, prime ** (e_full * system.s))
            if dens == 0:
                continue
            term = f_weight * float(dens)
            for j in range(r):
                term *= tables[j].means[a_vec[j]]
            total += term
            used += 1
    return TheoremPrediction(value=total, tuples_used=used, smooth_cap=cap, w_tilde=w_tilde)
