"""Pseudorandom majorant construction for a multiplicative function h:

    nu(n) = nu_sharp(n) * nu_flat(n)

where nu_sharp dominates the >=1 multiplicative part h# (truncated divisor
sums of g = mu * h# with a smooth cutoff, plus sparse corrections u from
dyadic prime intervals) and nu_flat dominates the <=1 part hb (divisor sums
over the small-prime-value support with sieve weights sigma that detect the
absence of small flat primes).  Membership in the exceptional set of integers
with huge prime-power divisors is evaluated literally.

Every evaluator exists twice: a per-point reference (the oracle) and a bulk
table builder using stratified strided array passes; the test suite pins them
together.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .linsys import ConvexBody, LinearSystem, correlation_sum_wtricked
from .multfunc import (
    MultiplicativeFunction,
    SieveTable,
    build_sieve,
    mean_value_progression,
)
from .numtheory import factorize, factorize_spf, primes_up_to, smooth_numbers
from .wtrick import WContext


# ---------------------------------------------------------------------------
# Sharp / flat split
# ---------------------------------------------------------------------------


@dataclass
class SharpFlatSplit:
    """h'(n) = sharp(n) * flat(n) >= |h(n)| with sharp >= 1 and flat <= 1
    on every prime power."""

    base: MultiplicativeFunction
    sharp: MultiplicativeFunction
    flat: MultiplicativeFunction
    residue: MultiplicativeFunction  # g = mu * sharp, so sharp = 1 * g

    def is_flat_prime(self, p: int) -> bool:
        """p with |h(p)| < 1: the primes the flat sieve weights watch."""
        return abs(self.base.at_prime_power(p, 1)) < 1.0


def sharp_flat_split(h: MultiplicativeFunction) -> SharpFlatSplit:
    base_rule = h.at_prime_power

    def sharp_rule(p, k):
        return max(1.0, max(abs(base_rule(p, j)) for j in range(1, k + 1)))

    def flat_rule(p, k):
        return min(1.0, abs(base_rule(p, k)))

    def residue_rule(p, k):
        prev = 1.0 if k == 1 else sharp_rule(p, k - 1)
        return sharp_rule(p, k) - prev

    sharp = MultiplicativeFunction(
        name=f"{h.name}.sharp",
        prime_power_rule=sharp_rule,
        growth_bound=h.growth_bound,
        nonnegative=True,
    )
    flat = MultiplicativeFunction(
        name=f"{h.name}.flat",
        prime_power_rule=flat_rule,
        growth_bound=1.0,
        nonnegative=True,
    )
    residue = MultiplicativeFunction(
        name=f"{h.name}.sharp_residue",
        prime_power_rule=residue_rule,
        growth_bound=h.growth_bound,
        nonnegative=True,
    )
    return SharpFlatSplit(base=h, sharp=sharp, flat=flat, residue=residue)


# ---------------------------------------------------------------------------
# Smooth cutoffs
# ---------------------------------------------------------------------------


def _transition(t: float) -> float:
    """C^infinity ramp 0 -> 1 on [0,1]: e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})."""
    if t <= 0.0:
        return 0.0
    if t >= 1.0:
        return 1.0
    a = math.exp(-1.0 / t)
    b = math.exp(-1.0 / (1.0 - t))
    return a / (a + b)


@dataclass(frozen=True)
class SmoothCutoff:
    """Plateau-1 smooth bump: 0 outside [support_lo, support_hi], 1 on
    [plateau_lo, plateau_hi], monotone smooth ramps in between."""

    support_lo: float
    plateau_lo: float
    plateau_hi: float
    support_hi: float

    def __post_init__(self):
        if not self.support_lo < self.plateau_lo <= self.plateau_hi < self.support_hi:
            raise ValueError("cutoff endpoints must be strictly nested")

    def __call__(self, x: float) -> float:
        if x <= self.support_lo or x >= self.support_hi:
            return 0.0
        if self.plateau_lo <= x <= self.plateau_hi:
            return 1.0
        if x < self.plateau_lo:
            return _transition((x - self.support_lo) / (self.plateau_lo - self.support_lo))
        return 1.0 - _transition((x - self.plateau_hi) / (self.support_hi - self.plateau_hi))

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x, dtype=np.float64)
        out[(x > self.support_lo) & (x < self.support_hi)] = 1.0
        lo_ramp = (x > self.support_lo) & (x < self.plateau_lo)
        hi_ramp = (x > self.plateau_hi) & (x < self.support_hi)
        if np.any(lo_ramp):
            t = (x[lo_ramp] - self.support_lo) / (self.plateau_lo - self.support_lo)
            a = np.exp(-1.0 / t)
            out[lo_ramp] = a / (a + np.exp(-1.0 / (1.0 - t)))
        if np.any(hi_ramp):
            t = (x[hi_ramp] - self.plateau_hi) / (self.support_hi - self.plateau_hi)
            a = np.exp(-1.0 / t)
            out[hi_ramp] = 1.0 - a / (a + np.exp(-1.0 / (1.0 - t)))
        return out


def plateau_cutoff() -> SmoothCutoff:
    """Even cutoff: support [-1,1], identically 1 on [-1/2, 1/2]."""
    return SmoothCutoff(-1.0, -0.5, 0.5, 1.0)


def window_cutoff(gamma: float) -> SmoothCutoff:
    """Window around [gamma, 2 gamma], supported in [gamma/2, 4 gamma]."""
    return SmoothCutoff(gamma / 2.0, gamma, 2.0 * gamma, 4.0 * gamma)


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


@dataclass
class MajorantParams:
    """Shape parameters of the majorant at scale T."""

    T: int
    gamma: float = 0.25
    C1: float = 20.0
    chi: SmoothCutoff = field(default_factory=plateau_cutoff)
    window: SmoothCutoff = None

    def __post_init__(self):
        if not 0.0 < self.gamma < 0.5:
            raise ValueError("gamma must lie strictly inside (0, 1/2)")
        if self.window is None:
            self.window = window_cutoff(self.gamma)

    @property
    def loglog_cubed(self) -> float:
        return math.log(math.log(self.T)) ** 3

    @property
    def kappa_min(self) -> int:
        return math.ceil(4.0 / self.gamma)

    @property
    def kappa_max(self) -> int:
        return math.floor(self.loglog_cubed)

    @property
    def lambda_max(self) -> int:
        return math.floor(math.log2(self.loglog_cubed))

    def lambda_min(self, kappa: int) -> int:
        return math.ceil(math.log2(kappa) - 2.0)

    @property
    def base_lambda(self) -> int:
        return self.lambda_min(self.kappa_min)

    def omega(self, lam: int, kappa: int) -> int:
        return math.ceil(self.gamma * kappa * (lam + 3 - math.log2(kappa)) / 200.0)

    def interval(self, lam: int) -> tuple[float, float]:
        """I_lambda = [T^{1/2^{lambda+1}}, T^{1/2^lambda}]."""
        return self.T ** (1.0 / 2 ** (lam + 1)), self.T ** (1.0 / 2**lam)

    @property
    def small_prime_cutoff(self) -> float:
        return self.T ** (1.0 / self.loglog_cubed)

    @property
    def small_part_threshold(self) -> float:
        return self.T ** (self.gamma / math.log(math.log(self.T)))


@dataclass(frozen=True)
class USetSpec:
    """Shape of one sparse correction set: products of omega distinct primes
    from the dyadic interval I_lambda at which the sharp part is nontrivial."""

    lambda_idx: int
    kappa_idx: int
    omega: int
    interval: tuple[float, float]


def u_set_spec(params: MajorantParams, lam: int, kappa: int) -> USetSpec:
    return USetSpec(
        lambda_idx=lam,
        kappa_idx=kappa,
        omega=params.omega(lam, kappa),
        interval=params.interval(lam),
    )


# ---------------------------------------------------------------------------
# Truncated divisor sum for the sharp part
# ---------------------------------------------------------------------------


def truncated_divisor_sum(
    g_tbl: SieveTable, m: int, T: int, gamma: float, chi: SmoothCutoff
) -> float:
    """sum over d | m of g(d) chi(log d / log T^gamma), g = mu * h#.

    Divisors beyond T^gamma fall outside the cutoff's support and are pruned
    during enumeration.
    """
    if m < 1 or m > g_tbl.T:
        raise ValueError("m outside table range")
    log_cut = gamma * math.log(T)
    cap = math.exp(log_cut)
    fac = factorize_spf(m, g_tbl.spf)
    divs = [1]
    for p, e in fac:
        new = []
        pk = 1
        for _ in range(e):
            pk *= p
            for d in divs:
                v = d * pk
                if v <= cap:
                    new.append(v)
        divs.extend(new)
    total = 0.0
    for d in divs:
        c = chi(math.log(d) / log_cut) if d > 1 else 1.0
        if c:
            total += g_tbl.values[d] * c
    return total


def h_gamma_table(
    g_tbl: SieveTable, T: int, gamma: float, chi: SmoothCutoff, size: int
) -> np.ndarray:
    """Bulk version: out[m] = truncated_divisor_sum(m) for 1 <= m <= size."""
    if size > g_tbl.T:
        raise ValueError("size exceeds g table")
    log_cut = gamma * math.log(T)
    cap = int(math.exp(log_cut))
    out = np.zeros(size + 1, dtype=np.float64)
    out[1:] = 1.0  # d = 1 term: g(1) chi(0) = 1
    for d in range(2, cap + 1):
        c = chi(math.log(d) / log_cut)
        if c:
            out[d::d] += g_tbl.values[d] * c
    return out


# ---------------------------------------------------------------------------
# Erdos divisor assignment
# ---------------------------------------------------------------------------


def erdos_divisor(n: int, x: int, gamma: float) -> int:
    """Largest divisor of the form prod_{p <= Q} p^{v_p(n)} not exceeding x^gamma.

    Domain: x^gamma <= n <= x.  The empty product Q = 1 is allowed, so primes
    exceeding x^gamma map to 1.
    """
    cap = x**gamma
    if not cap <= n <= x:
        raise ValueError(f"n = {n} outside [x^gamma, x] = [{cap:.3f}, {x}]")
    best = 1
    acc = 1
    for p, e in factorize(n):
        acc *= p**e
        if acc > cap:
            break
        best = acc
    return best


def erdos_divisor_flat(
    n: int, x: int, gamma: float, is_flat: Callable[[int], bool]
) -> int:
    """Two-branch variant restricted to the flat-prime part m of n:
    m itself when m <= x^gamma, else its Erdos divisor."""
    if not 1 <= n <= x:
        raise ValueError("need 1 <= n <= x")
    m = 1
    for p, e in factorize(n):
        if is_flat(p):
            m *= p**e
    if m <= x**gamma:
        return m
    return erdos_divisor(m, x, gamma)


# ---------------------------------------------------------------------------
# Sieve weight sigma
# ---------------------------------------------------------------------------


def sigma_flat(
    Q: float, m: int, is_flat: Callable[[int], bool], chi: SmoothCutoff
) -> float:
    """( sum over squarefree flat-composed d | m of mu(d) chi(log d / log Q) )^2.

    Equals 1 when m has no flat prime factor <= Q (only d = 1 contributes).
    """
    if Q <= 1:
        raise ValueError("Q must exceed 1")
    logq = math.log(Q)
    ps = [p for p, _ in factorize(m) if p <= Q and is_flat(p)]
    total = 0.0
    stack = [(0, 1, 1)]  # (index, product, sign)
    while stack:
        i, prod, sign = stack.pop()
        if i == len(ps):
            c = chi(math.log(prod) / logq) if prod > 1 else 1.0
            total += sign * c
            continue
        stack.append((i + 1, prod, sign))
        nxt = prod * ps[i]
        if nxt <= Q:  # beyond Q the cutoff vanishes
            stack.append((i + 1, nxt, -sign))
    return total * total


def _sigma_table(Q: float, size: int, flat_sqfree: Sequence[int], chi: SmoothCutoff) -> np.ndarray:
    """sigma(Q; k) for 0 <= k <= size, via strided adds over flat squarefree d <= Q."""
    inner = np.zeros(size + 1, dtype=np.float64)
    inner[1:] = 1.0
    logq = math.log(Q)
    for d, mu in flat_sqfree:
        if d == 1 or d > Q:
            continue
        c = chi(math.log(d) / logq)
        if c:
            inner[d::d] += mu * c
    return inner * inner


def _flat_squarefree(split: SharpFlatSplit, cap: int) -> list[tuple[int, int]]:
    """(d, mu(d)) for squarefree d <= cap composed of flat primes."""
    ps = [int(p) for p in primes_up_to(cap) if split.is_flat_prime(int(p))]
    out = [(1, 1)]
    for p in ps:
        out.extend((d * p, -mu) for d, mu in list(out) if d * p <= cap)
    return sorted(out)


# ---------------------------------------------------------------------------
# Exceptional set membership
# ---------------------------------------------------------------------------


def in_exceptional_set(n: int, params: MajorantParams) -> bool:
    """Literal evaluation of both clauses: some v_p(n) >= max(2, C1 log_p log T),
    or the small-prime part of n reaches T^{gamma / log log T}."""
    if not 1 <= n <= params.T:
        raise ValueError("need 1 <= n <= T")
    loglog_t = math.log(math.log(params.T))
    small_cut = params.small_prime_cutoff
    small_part = 1
    for p, e in factorize(n):
        threshold = max(2.0, params.C1 * loglog_t / math.log(p))
        if e >= threshold:
            return True
        if p <= small_cut:
            small_part *= p**e
    return small_part >= params.small_part_threshold


def exceptional_table(params: MajorantParams, size: Optional[int] = None) -> np.ndarray:
    """Bool array flagging exceptional n <= size (default T)."""
    size = params.T if size is None else size
    out = np.zeros(size + 1, dtype=bool)
    loglog_t = math.log(math.log(params.T))
    for p in primes_up_to(int(math.isqrt(size)) + 1):
        p = int(p)
        kmin = max(2, math.ceil(params.C1 * loglog_t / math.log(p)))
        if p**kmin <= size:
            out[p**kmin :: p**kmin] = True
    small_primes = [int(p) for p in primes_up_to(int(params.small_prime_cutoff))]
    small_part = np.ones(size + 1, dtype=np.float64)
    for p in small_primes:
        pk = p
        while pk <= size:
            small_part[pk::pk] *= p
            pk *= p
    out |= small_part >= params.small_part_threshold
    out[0] = False
    return out


# ---------------------------------------------------------------------------
# nu_sharp
# ---------------------------------------------------------------------------


def _u_term_specs(params: MajorantParams) -> list[tuple[int, int, int]]:
    """(kappa, lambda, omega) for all correction blocks with kappa > kappa_min."""
    specs = []
    if params.kappa_max < params.kappa_min:
        return specs
    for kappa in range(params.kappa_min + 1, params.kappa_max + 1):
        for lam in range(params.lambda_min(kappa), params.lambda_max + 1):
            specs.append((kappa, lam, params.omega(lam, kappa)))
    return specs


def nu_sharp(
    n: int,
    params: MajorantParams,
    split: SharpFlatSplit,
    g_tbl: SieveTable,
    exceptional: Optional[bool] = None,
) -> float:
    """Pointwise majorant for the sharp part.

    Correction terms read admissible u off n's factorization: only u | n with
    all prime factors in I_lambda and sharp(p) != 1 contribute, so the sparse
    sets are never materialized.  The base block (u = 1) contributes
    H^{kappa_min} h_gamma(n); degenerate parameter ranges contribute nothing.
    """
    if not 1 <= n <= params.T:
        raise ValueError("need 1 <= n <= T")
    H = split.base.growth_bound
    fac = factorize_spf(n, g_tbl.spf) if n <= g_tbl.T else factorize(n)
    total = 0.0
    if params.kappa_max >= params.kappa_min and params.base_lambda <= params.lambda_max:
        total += H**params.kappa_min * truncated_divisor_sum(
            g_tbl, n, params.T, params.gamma, params.chi
        )
    for kappa, lam, omega in _u_term_specs(params):
        lo, hi = params.interval(lam)
        cands = [
            (p, e)
            for p, e in fac
            if lo <= p <= hi and split.sharp.at_prime_power(p, 1) != 1.0
        ]
        if len(cands) < omega:
            continue
        for combo in itertools.combinations(cands, omega):
            u = math.prod(p for p, _ in combo)
            stripped = n
            for p, e in combo:
                stripped //= p**e
            sharp_u = math.prod(split.sharp.at_prime_power(p, 1) for p, _ in combo)
            total += (
                H**kappa
                * sharp_u
                * truncated_divisor_sum(g_tbl, stripped, params.T, params.gamma, params.chi)
            )
    if exceptional is None:
        exceptional = in_exceptional_set(n, params)
    if exceptional:
        total += split.sharp(n) if n > g_tbl.T else _sharp_value(split, fac)
    return total


def _sharp_value(split: SharpFlatSplit, fac) -> float:
    v = 1.0
    for p, e in fac:
        v *= split.sharp.at_prime_power(p, e)
    return v


def nu_sharp_table(
    params: MajorantParams,
    split: SharpFlatSplit,
    g_tbl: SieveTable,
    size: Optional[int] = None,
    exceptional: Optional[np.ndarray] = None,
    sharp_tbl: Optional[SieveTable] = None,
) -> np.ndarray:
    """Bulk nu_sharp over 1..size via stratified strided passes."""
    size = params.T if size is None else size
    if size > g_tbl.T:
        raise ValueError("size exceeds g table")
    hgam = h_gamma_table(g_tbl, params.T, params.gamma, params.chi, size)
    out = np.zeros(size + 1, dtype=np.float64)
    H = split.base.growth_bound
    if params.kappa_max >= params.kappa_min and params.base_lambda <= params.lambda_max:
        out[1:] = H**params.kappa_min * hgam[1:]
    for kappa, lam, omega in _u_term_specs(params):
        lo, hi = params.interval(lam)
        ps = [
            int(p)
            for p in primes_up_to(min(int(hi), size))
            if p >= lo and split.sharp.at_prime_power(int(p), 1) != 1.0
        ]
        if len(ps) < omega:
            continue
        if math.comb(len(ps), omega) > 200_000:
            raise ValueError("u-set enumeration exceeds budget; shrink gamma or T")
        for combo in itertools.combinations(ps, omega):
            u = math.prod(combo)
            if u > size:
                continue
            sharp_u = math.prod(split.sharp.at_prime_power(p, 1) for p in combo)
            coef = H**kappa * sharp_u
            # stratify over exact exponent vectors of the primes of u
            exp_ranges = []
            for p in combo:
                exps = []
                pe = p
                while pe <= size:
                    exps.append(pe)
                    pe *= p
                exp_ranges.append(exps)
            for pk_combo in itertools.product(*exp_ranges):
                base = math.prod(pk_combo)
                if base > size:
                    continue
                j = np.arange(1, size // base + 1, dtype=np.int64)
                mask = np.ones(len(j), dtype=bool)
                for p in combo:
                    mask &= j % p != 0
                idx = j[mask]
                out[idx * base] += coef * hgam[idx]
    if exceptional is None:
        exceptional = exceptional_table(params, size)
    if sharp_tbl is None:
        sharp_tbl = build_sieve(split.sharp, size)
    flagged = np.nonzero(exceptional[: size + 1])[0]
    out[flagged] += sharp_tbl.values[flagged]
    return out


# ---------------------------------------------------------------------------
# nu_flat
# ---------------------------------------------------------------------------


def nu_flat(
    n: int,
    x: int,
    params: MajorantParams,
    split: SharpFlatSplit,
) -> float:
    """Pointwise majorant for the flat part.

    First block: divisor sum over flat-composed m with the plateau cutoff and
    the sigma(x^gamma; .) sieve weight.  Second block: for every divisor
    d = Q^k m of n whose largest prime factor Q exceeds x^{gamma/(llT)^3},
    the windowed weight flat(d) lambda(log d / log x) sigma(Q; n/d).  The
    power sum over Q^k is retained from the intermediate construction: the
    asymptotic argument that discards k >= 2 (any multiple of Q^2 being
    exceptional) fails at desk scale, where dropping it would zero the
    majorant on integers whose flat part is a small-prime power above
    x^gamma.
    """
    if not 1 <= n <= x:
        raise ValueError("need 1 <= n <= x")
    fac = factorize(n)
    log_x = math.log(x)
    cap1 = x**params.gamma
    total = 0.0
    # first block: flat-composed divisors m <= x^gamma
    flat_fac = [(p, e) for p, e in fac if split.is_flat_prime(p)]
    flat_divs = [1]
    for p, e in flat_fac:
        new = []
        pk = 1
        for _ in range(e):
            pk *= p
            for d in flat_divs:
                if d * pk <= cap1:
                    new.append(d * pk)
        flat_divs.extend(new)
    for m in flat_divs:
        c = params.chi(math.log(m) / (params.gamma * log_x)) if m > 1 else 1.0
        if c:
            total += (
                split.flat(m) * c * sigma_flat(cap1, n // m, split.is_flat_prime, params.chi)
            )
    # second block: divisors with a large leading prime
    q_cut = x ** (params.gamma / params.loglog_cubed)
    from .numtheory import divisors

    for d in divisors(fac):
        if d == 1:
            continue
        q_lead = max(p for p, _ in factorize(d))
        if q_lead <= q_cut:
            continue
        lam_val = params.window(math.log(d) / log_x)
        if not lam_val:
            continue
        total += (
            split.flat(d)
            * lam_val
            * sigma_flat(q_lead, n // d, split.is_flat_prime, params.chi)
        )
    return total


def _largest_prime_factor_table(size: int) -> np.ndarray:
    out = np.ones(size + 1, dtype=np.int64)
    out[0] = 0
    for p in primes_up_to(size):
        p = int(p)
        out[p::p] = p
    return out


def nu_flat_table(
    x: int,
    params: MajorantParams,
    split: SharpFlatSplit,
    flat_tbl: SieveTable,
    size: Optional[int] = None,
) -> np.ndarray:
    """Bulk nu_flat over 1..size.

    First block: loop over flat-composed m <= x^gamma, strided add of
    flat(m) chi(...) sigma(x^gamma; .).  Second block: the summands are
    indexed by divisors d with a large leading prime, so one pass over all
    integers d <= size with lpf(d) above the threshold (grouped by that prime
    so each sigma(Q; .) array is built once) adds flat(d) lambda(.) sigma to
    every multiple of d.
    """
    size = x if size is None else size
    if size > flat_tbl.T:
        raise ValueError("size exceeds flat table")
    log_x = math.log(x)
    cap1 = x**params.gamma
    out = np.zeros(size + 1, dtype=np.float64)
    # sigma(Q; k) only sees d <= min(Q, k) and k <= size/Q, so d <= sqrt(size)
    flat_sqfree = _flat_squarefree(split, max(int(cap1), math.isqrt(size)))
    sigma_x = _sigma_table(cap1, size, flat_sqfree, params.chi)
    flat_primes = [p for p in primes_up_to(int(cap1)) if split.is_flat_prime(int(p))]
    for m in smooth_numbers(flat_primes, int(cap1)):
        c = params.chi(math.log(m) / (params.gamma * log_x)) if m > 1 else 1.0
        if not c:
            continue
        c *= flat_tbl.values[m]
        if not c:
            continue
        j = np.arange(1, size // m + 1, dtype=np.int64)
        out[j * m] += c * sigma_x[j]

    q_cut = x ** (params.gamma / params.loglog_cubed)
    lpf = _largest_prime_factor_table(size)
    n_all = np.arange(2, size + 1, dtype=np.int64)
    q_arr = lpf[n_all]
    keep = q_arr > q_cut
    n_all, q_arr = n_all[keep], q_arr[keep]
    lam_vals = params.window.eval_array(np.log(n_all) / log_x)
    coef = flat_tbl.values[n_all] * lam_vals
    keep = coef != 0.0
    n_all, q_arr, coef = n_all[keep], q_arr[keep], coef[keep]
    order = np.argsort(q_arr, kind="stable")
    n_all, q_arr, coef = n_all[order], q_arr[order], coef[order]
    # batch all length-1 slices (Qm > size/2): sigma(Q; 1) = 1
    single = n_all > size // 2
    np.add.at(out, n_all[single], coef[single])
    n_all, q_arr, coef = n_all[~single], q_arr[~single], coef[~single]
    i = 0
    while i < len(n_all):
        q = int(q_arr[i])
        j_end = i
        while j_end < len(n_all) and q_arr[j_end] == q:
            j_end += 1
        sig_q = _sigma_table(float(q), size // int(n_all[i]), flat_sqfree, params.chi)
        for idx in range(i, j_end):
            base = int(n_all[idx])
            jj = size // base
            if len(sig_q) < jj + 1:
                sig_q = _sigma_table(float(q), jj, flat_sqfree, params.chi)
            out[base : base * jj + 1 : base] += coef[idx] * sig_q[1 : jj + 1]
        i = j_end
    return out


# ---------------------------------------------------------------------------
# Experiments: average order and the linear-forms factorization ratio
# ---------------------------------------------------------------------------


@dataclass
class AverageOrderReport:
    T: int
    residue: int
    modulus: int
    s_h: float
    s_nu: float
    envelope: float
    ratio_lower: float  # |S_h| / S_nu
    ratio_upper: float  # S_nu / envelope


def average_order_report(
    h_tbl: SieveTable,
    nu_values: np.ndarray,
    wctx: WContext,
    T: int,
    A: int,
) -> AverageOrderReport:
    """Compare S_nu(T; W~, A) against |S_h(T; W~, A)| below and against the
    mean-value envelope (log w / log T) prod_{w<p<T} (1 + |h(p)|/p) above."""
    if math.gcd(A, wctx.W) != 1:
        raise ValueError("A must be coprime to W")
    q = wctx.W_tilde
    first = A % q
    if first == 0:
        first = q
    s_nu = q * math.fsum(nu_values[first : T + 1 : q].tolist()) / T
    s_h = mean_value_progression(h_tbl, T, q, A)
    p = h_tbl.primes()
    p = p[(p > wctx.w_of_x) & (p < T)]
    log_prod = math.fsum(np.log1p(np.abs(h_tbl.values[p]) / p).tolist())
    envelope = (math.log(wctx.w_of_x) / math.log(T)) * math.exp(log_prod)
    return AverageOrderReport(
        T=T,
        residue=A,
        modulus=q,
        s_h=s_h,
        s_nu=s_nu,
        envelope=envelope,
        ratio_lower=abs(s_h) / s_nu if s_nu else math.inf,
        ratio_upper=s_nu / envelope if envelope else math.inf,
    )


@dataclass
class LinearFormsRatio:
    T: int
    joint_average: float
    marginal_averages: list[float]
    ratio: float


def linear_forms_ratio(
    nu_tbls: Sequence[SieveTable],
    system: LinearSystem,
    body: ConvexBody,
    T: int,
    W_list: Sequence[int],
    A_list: Sequence[int],
    coprime_to: Optional[int] = None,
) -> LinearFormsRatio:
    """(empirical joint average of prod_i nu_i(W_i phi_i(n) + A_i)) divided by
    the product of the marginal averages (1/T) sum_{n<=T} nu_i(W_i n + A_i).

    The factorization estimate predicts this ratio drifts to 1.
    """
    res = correlation_sum_wtricked(nu_tbls, system, body, T, W_list, A_list, coprime_to)
    joint = res.raw_sum / res.lattice_count if res.lattice_count else math.nan
    marginals = []
    for tbl, w, a in zip(nu_tbls, W_list, A_list):
        n = np.arange(1, T + 1, dtype=np.int64)
        idx = w * n + a
        if idx[-1] > tbl.T:
            raise ValueError(f"marginal index {idx[-1]} exceeds table {tbl.T}")
        marginals.append(float(np.sum(tbl.values[idx])) / T)
    denom = math.prod(marginals)
    return LinearFormsRatio(
        T=T,
        joint_average=joint,
        marginal_averages=marginals,
        ratio=joint / denom if denom else math.inf,
    )
