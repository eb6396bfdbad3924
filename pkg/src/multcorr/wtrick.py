"""Small-prime regularization scaffolding: the context (w(x), W(x), W~(x)),
residue mean-value tables, exceptional sets of integers with large square
divisors, the exact smooth-part partition of correlation sums, and the
progression-mean stability scan.

Throughout, W(x) = prod_{p <= w(x)} p with w(x) defaulting to log log x
(clamped below at 2 so W >= 2 at desk scale; every clamp is recorded in the
context's audit log), and W~(x) = q* W(x) for a w(x)-smooth multiplier q*.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .linsys import ConvexBody, FormRangeError, LinearSystem, correlation_sum
from .multfunc import SieveTable, mean_value_progression
from .numtheory import factorize, primes_up_to, smooth_numbers, square_part_root, totient


@dataclass
class WContext:
    """Resolved parameters of the small-prime trick at scale x."""

    x: int
    w_of_x: float
    W: int
    q_star: int
    W_tilde: int
    C: float
    B1: float
    B2: float
    prime_list: tuple[int, ...]
    audit: list[str] = field(default_factory=list)

    def chebyshev_report(self) -> tuple[float, int, float]:
        """(theta(w(x)), W, log x): e^theta = W is compared against log x."""
        theta = math.fsum(math.log(p) for p in self.prime_list)
        return theta, self.W, math.log(self.x)


def make_wcontext(
    x: int,
    w_of_x: Optional[float] = None,
    q_star: int = 1,
    C: float = 3.0,
    B1: float = 6.0,
    B2: float = 10.0,
) -> WContext:
    """Build the context; defaults w(x) = log log x (upper endpoint), clamped at 2.

    The bound W~ <= (log x)^B1 is enforced: with the default w the constructor
    walks w down (dropping the largest prime) until it holds and records each
    adjustment; an explicit override that violates it is an error.
    """
    if x < 16:
        raise ValueError("x must be >= 16 so iterated logarithms are defined")
    audit: list[str] = []
    defaulted = w_of_x is None
    if defaulted:
        w_of_x = math.log(math.log(x))
        if w_of_x < 2.0:
            audit.append(f"w(x) = log log x = {w_of_x:.4f} clamped to 2")
            w_of_x = 2.0
    if w_of_x < 2.0:
        raise ValueError("w(x) must be >= 2 so that W >= 2")
    if q_star < 1:
        raise ValueError("q_star must be >= 1")

    def build(w):
        ps = tuple(int(p) for p in primes_up_to(int(w)))
        return ps, math.prod(ps)

    prime_list, W = build(w_of_x)
    for p, _ in factorize(q_star):
        if p > w_of_x:
            raise ValueError(f"q_star = {q_star} has prime factor {p} > w(x) = {w_of_x}")
    cap = math.log(x) ** B1
    while q_star * W > cap and defaulted and len(prime_list) > 1:
        dropped = prime_list[-1]
        prime_list, W = prime_list[:-1], W // dropped
        w_of_x = float(prime_list[-1])
        audit.append(f"dropped prime {dropped} to satisfy W~ <= (log x)^B1; w(x) -> {w_of_x}")
    w_tilde = q_star * W
    if w_tilde > cap:
        raise ValueError(f"W~ = {w_tilde} exceeds (log x)^B1 = {cap:.3f}")
    return WContext(
        x=x,
        w_of_x=w_of_x,
        W=W,
        q_star=q_star,
        W_tilde=w_tilde,
        C=C,
        B1=B1,
        B2=B2,
        prime_list=prime_list,
        audit=audit,
    )


# ---------------------------------------------------------------------------
# Exceptional sets: large square divisors
# ---------------------------------------------------------------------------


def square_root_part(n: int) -> int:
    """Largest d with d^2 | n."""
    return square_part_root(factorize(n))


def exceptional_prime_square(n: int, T: int, C: float) -> bool:
    """True iff some d > (log T)^C has d^2 | n (checked via the full square part)."""
    if not 1 <= n <= T:
        raise ValueError("need 1 <= n <= T")
    return square_root_part(n) > math.log(T) ** C


def square_root_part_table(T: int, spf: Optional[np.ndarray] = None) -> np.ndarray:
    """Array d[n] = largest d with d^2 | n, for 0 <= n <= T (d[0] unused)."""
    out = np.ones(T + 1, dtype=np.int64)
    out[0] = 0
    limit = int(math.isqrt(T))
    for p in primes_up_to(limit):
        p = int(p)
        p2k = p * p
        while p2k <= T:
            out[p2k::p2k] *= p
            p2k *= p * p
    return out


def exceptional_density(T: int, C: float) -> tuple[float, float]:
    """(empirical density of the large-square-divisor set in [1, T], union bound).

    The union bound sum_{(log T)^C < d <= sqrt(T)} floor(T/d^2) / T dominates
    the empirical density exactly (every member is counted at least once).
    """
    threshold = math.log(T) ** C
    droot = square_root_part_table(T)
    count = int(np.count_nonzero(droot[1:] > threshold))
    d = np.arange(int(threshold) + 1, int(math.isqrt(T)) + 1, dtype=np.int64)
    bound = float(np.sum(T // (d * d))) / T if len(d) else 0.0
    return count / T, bound


@dataclass
class SmoothTruncationResult:
    applies: bool
    ok: bool
    witness: Optional[int] = None
    squarefree_part: Optional[int] = None


def smooth_truncation_check(w: int, T: int, C: float, wctx: Optional[WContext] = None) -> SmoothTruncationResult:
    """For smooth w > (log T)^{3C}, exhibit a square divisor w2^2 > (log T)^{2C}.

    Writes w = w1 * w2^2 with w1 squarefree.  Guaranteed to succeed for T
    large; for small T the failure is reported, not raised.  Not applicable
    (applies=False) when w <= (log T)^{3C}.
    """
    if C <= 1:
        raise ValueError("C must exceed 1")
    ctx = wctx if wctx is not None else make_wcontext(max(T, 16))
    fac = factorize(w)
    for p, _ in fac:
        if p > ctx.w_of_x:
            raise ValueError(f"w = {w} is not {ctx.w_of_x}-smooth (prime {p})")
    logT = math.log(T)
    if w <= logT ** (3 * C):
        return SmoothTruncationResult(applies=False, ok=True)
    w2 = square_part_root(fac)
    w1 = w // (w2 * w2)
    return SmoothTruncationResult(
        applies=True, ok=w2 * w2 > logT ** (2 * C), witness=w2, squarefree_part=w1
    )


# ---------------------------------------------------------------------------
# Residue mean tables
# ---------------------------------------------------------------------------


@dataclass
class ResidueMeanTable:
    """S_f(x; modulus, A) for every A mod modulus coprime to the context's W."""

    modulus: int
    x: int
    means: dict[int, float]


def residue_mean_table(tbl: SieveTable, x: int, modulus: int, wctx: WContext) -> ResidueMeanTable:
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    if x > tbl.T:
        raise ValueError("x exceeds table range")
    means = {}
    for a in range(modulus):
        if math.gcd(a, wctx.W) == 1:
            means[a] = mean_value_progression(tbl, x, modulus, a)
    return ResidueMeanTable(modulus=modulus, x=x, means=means)


# ---------------------------------------------------------------------------
# Exact smooth-part partition of a correlation sum
# ---------------------------------------------------------------------------


def smooth_part_table(T: int, primes: Sequence[int]) -> np.ndarray:
    """Array s[n] = prod_{p in primes} p^{v_p(n)} for 0 <= n <= T (s[0] = 1)."""
    out = np.ones(T + 1, dtype=np.int64)
    for p in primes:
        p = int(p)
        pk = p
        while pk <= T:
            out[pk::pk] *= p
            pk *= p
    return out


@dataclass
class PartitionGroup:
    w_tuple: tuple[int, ...]
    group_sum: float
    group_count: int
    truncated: bool


@dataclass
class PartitionReport:
    T: int
    total_from_groups: float
    correlation: float
    lattice_count: int
    truncated_mass: float
    truncated_count: int
    groups: list[PartitionGroup]

    @property
    def relative_residual(self) -> float:
        scale = max(abs(self.correlation), 1e-300)
        return abs(self.total_from_groups - self.correlation) / scale


def exact_smooth_partition(
    tbls: Sequence[SieveTable],
    system: LinearSystem,
    body: ConvexBody,
    T: int,
    wctx: WContext,
) -> PartitionReport:
    """Group the correlation sum by the W(T)-smooth parts of the form values.

    Each lattice point n contributes its product prod_i f_i(phi_i(n)) to the
    group keyed by (w_1, ..., w_r), where w_i is the unique divisor of
    phi_i(n) composed of primes <= w(T) whose cofactor is coprime to W(T).
    The partition is a function of n, so summing the groups reproduces the
    correlation sum exactly (up to float accumulation); the mass of groups
    with some w_i > (log T)^{B2} is reported separately as the truncation
    tail.
    """
    r = system.r
    if len(tbls) != r:
        raise ValueError("one table per form required")
    max_t = max(t.T for t in tbls)
    smooth_vals = smooth_part_table(max_t, wctx.prime_list)
    support = np.array(smooth_numbers(wctx.prime_list, max_t), dtype=np.int64)
    K = len(support)
    if K**r > 5_000_000:
        raise ValueError("smooth key space too large; raise w thresholds")
    sums = np.zeros(K**r, dtype=np.float64)
    counts = np.zeros(K**r, dtype=np.int64)
    tau = Fraction(T)
    arrays = [t.values for t in tbls]
    limits = [t.T for t in tbls]
    from .linsys import _prefixes

    for prefix in _prefixes(body, tau, body.s - 1):
        rng = body.coordinate_interval(prefix, tau)
        if rng is None:
            continue
        lo, hi = rng
        t_range = np.arange(lo, hi + 1, dtype=np.int64)
        key = np.zeros(len(t_range), dtype=np.int64)
        prod = np.ones(len(t_range), dtype=np.float64)
        for i, form in enumerate(system.forms):
            c = sum(a * x for a, x in zip(form.coeffs[:-1], prefix)) + form.constant
            a_s = form.coeffs[-1]
            for t_end in (lo, hi):
                val = c + a_s * t_end
                if not 1 <= val <= limits[i]:
                    raise FormRangeError(i, prefix + (t_end,), val, limits[i])
            idx = c + a_s * t_range
            prod *= arrays[i][idx]
            key = key * K + np.searchsorted(support, smooth_vals[idx])
        np.add.at(sums, key, prod)
        np.add.at(counts, key, 1)

    corr = correlation_sum(tbls, system, body, T)
    cap = math.log(T) ** wctx.B2
    groups = []
    truncated_mass = 0.0
    truncated_count = 0
    nonzero = np.nonzero(counts)[0]
    for flat in nonzero:
        digits = []
        rem = int(flat)
        for _ in range(r):
            digits.append(int(support[rem % K]))
            rem //= K
        w_tuple = tuple(reversed(digits))
        truncated = any(w > cap for w in w_tuple)
        g = PartitionGroup(
            w_tuple=w_tuple,
            group_sum=float(sums[flat]),
            group_count=int(counts[flat]),
            truncated=truncated,
        )
        groups.append(g)
        if truncated:
            truncated_mass += g.group_sum
            truncated_count += g.group_count
    total = math.fsum(g.group_sum for g in groups)
    return PartitionReport(
        T=T,
        total_from_groups=total,
        correlation=corr.raw_sum,
        lattice_count=corr.lattice_count,
        truncated_mass=truncated_mass,
        truncated_count=truncated_count,
        groups=sorted(groups, key=lambda g: g.w_tuple),
    )


# ---------------------------------------------------------------------------
# Stability of progression means
# ---------------------------------------------------------------------------


@dataclass
class StabilityReport:
    x: int
    q: int
    residue: int
    envelope: float
    rows: list[tuple[int, float, float]]  # (x', raw delta, normalized delta)
    max_normalized: float


def _progression_envelope(tbl: SieveTable, x: int, q: int) -> float:
    """(q/phi(q)) (1/log x) prod_{p<=x, p∤q} (1 + |f(p)|/p)."""
    p = tbl.primes()
    p = p[p <= x]
    if q > 1:
        p = p[np.mod(q, p) != 0]
    log_prod = math.fsum(np.log1p(np.abs(tbl.values[p]) / p).tolist())
    return (q / totient(q)) * math.exp(log_prod) / math.log(x)


def stability_scan(
    tbl: SieveTable,
    x: int,
    C: float,
    q: int,
    A: int,
    grid_points: int = 8,
) -> StabilityReport:
    """Max over x' in (x (log x)^{-C}, x) of the normalized drift
    |S_f(x';q,A) - S_f(x;q,A)| / envelope; the empirical stability modulus.
    """
    if math.gcd(q, A) != 1:
        raise ValueError("need gcd(q, A) = 1")
    if q >= math.log(x) ** C:
        raise ValueError(f"need q < (log x)^C = {math.log(x) ** C:.2f}")
    if x > tbl.T:
        raise ValueError("x exceeds table range")
    lo = max(2, int(math.ceil(x * math.log(x) ** (-C))))
    envelope = _progression_envelope(tbl, x, q)
    base = mean_value_progression(tbl, x, q, A)
    rows = []
    for j in range(grid_points):
        xp = int(round(lo * (x / lo) ** (j / max(grid_points - 1, 1))))
        xp = min(max(xp, lo), x)
        delta = mean_value_progression(tbl, xp, q, A) - base
        rows.append((xp, delta, abs(delta) / envelope))
    return StabilityReport(
        x=x,
        q=q,
        residue=A,
        envelope=envelope,
        rows=rows,
        max_normalized=max(r[2] for r in rows),
    )
