"""Multiplicative functions given by prime-power rules, bulk sieve evaluation,
and normalized mean values, plain and in arithmetic progressions.

The two mean values used everywhere downstream are

    S_f(x)      = (1/x) * sum_{1 <= n <= x} f(n)
    S_f(x;q,a)  = (q/x) * sum_{n <= x, n = a mod q} f(n)

note the q/x normalization of the progression mean (not 1/#{n <= x: n = a}).
Also hosts the built-in example functions (registry addressable by string),
the Ramanujan tau power series, and the semicircle distribution of normalized
Hecke eigenvalues.
"""

import math
import struct
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from ._kernels import fill_multiplicative, spf_sieve
from .numtheory import factorize, totient


class GrowthBoundError(ValueError):
    """|f(p^k)| exceeded growth_bound**k."""


@dataclass
class MultiplicativeFunction:
    """A multiplicative function f determined by its values on prime powers.

    Attributes:
        name: registry identifier, parameters included (e.g. "delta_omega:0.5").
        prime_power_rule: (p, k) -> f(p^k) for primes p and k >= 1.
        growth_bound: H >= 1 with |f(p^k)| <= H^k; checked on every evaluation.
        nonnegative: whether f >= 0 everywhere (trusted by the Euler-factor code).
        alpha_lower_hint: a priori value of the prime mean (1/x) sum_{p<=x} |f(p)| log p,
            if known (e.g. 1/2 for the sums-of-two-squares indicator); purely advisory.
    """

    name: str
    prime_power_rule: Callable[[int, int], float]
    growth_bound: float = 1.0
    nonnegative: bool = True
    alpha_lower_hint: Optional[float] = None

    def __post_init__(self):
        if self.growth_bound < 1.0:
            raise ValueError("growth_bound must be >= 1")

    def at_prime_power(self, p: int, k: int) -> float:
        """f(p^k), with the lazy growth-bound check."""
        v = float(self.prime_power_rule(p, k))
        if abs(v) > self.growth_bound**k * (1.0 + 1e-12):
            raise GrowthBoundError(
                f"{self.name}: |f({p}^{k})| = {abs(v)} exceeds "
                f"{self.growth_bound}^{k} = {self.growth_bound ** k}"
            )
        return v

    def __call__(self, n: int) -> float:
        """f(n) by trial-division factorization; f(1) = 1 (empty product)."""
        if n < 1:
            raise ValueError("multiplicative functions are defined on n >= 1")
        result = 1.0
        for p, e in factorize(n):
            result *= self.at_prime_power(p, e)
        return result


@dataclass
class SieveTable:
    """Bulk-evaluated f(n) for 1 <= n <= T plus the smallest-prime-factor array.

    values[n] = f(n) exactly as assembled from the prime-power rule; values[0]
    is unused (0.0).  Immutable by convention after construction: every
    consumer treats both arrays as read-only.
    """

    T: int
    spf: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    function: Optional[MultiplicativeFunction] = None

    def primes(self) -> np.ndarray:
        idx = np.arange(self.T + 1, dtype=np.int64)
        return idx[2:][self.spf[2:] == idx[2:]]


def build_sieve(f: MultiplicativeFunction, T: int) -> SieveTable:
    """Evaluate f on 1..T: spf sieve, then one multiplicative assembly pass.

    The rule is queried once per prime power p^k <= T (growth-checked); the
    kernel fills composite entries from those.
    """
    if T < 2:
        raise ValueError("build_sieve needs T >= 2")
    spf = spf_sieve(T)
    values = np.zeros(T + 1, dtype=np.float64)
    values[1] = 1.0
    idx = np.arange(T + 1, dtype=np.int64)
    for p in idx[2:][spf[2:] == idx[2:]]:
        p = int(p)
        pk, k = p, 1
        while pk <= T:
            values[pk] = f.at_prime_power(p, k)
            pk *= p
            k += 1
    fill_multiplicative(spf, values)
    return SieveTable(T=T, spf=spf, values=values, function=f)


def mean_value(tbl: SieveTable, x: int) -> float:
    """S_f(x) = (1/x) sum_{n<=x} f(n), exactly-rounded accumulation."""
    if not 1 <= x <= tbl.T:
        raise ValueError(f"x = {x} outside table range [1, {tbl.T}]")
    return math.fsum(tbl.values[1 : x + 1].tolist()) / x


def mean_value_progression(tbl: SieveTable, x: int, q: int, a: int) -> float:
    """S_f(x;q,a) = (q/x) sum_{n<=x, n=a mod q} f(n)."""
    if q == 0:
        raise ValueError("q must be nonzero")
    q = abs(q)
    if not 1 <= x <= tbl.T:
        raise ValueError(f"x = {x} outside table range [1, {tbl.T}]")
    first = a % q
    if first == 0:
        first = q
    if first > x:
        return 0.0
    return q * math.fsum(tbl.values[first : x + 1 : q].tolist()) / x


def progression_sum(tbl: SieveTable, x: int, q: int, a: int) -> float:
    """Unnormalized sum_{n<=x, n=a mod q} f(n)."""
    return mean_value_progression(tbl, x, q, a) * x / abs(q)


def estimate_alpha(tbl: SieveTable, x: int) -> float:
    """(1/x) sum_{p<=x} |f(p)| log p, the empirical prime-mean lower-bound statistic."""
    if not 1 <= x <= tbl.T:
        raise ValueError(f"x = {x} outside table range [1, {tbl.T}]")
    p = tbl.primes()
    p = p[p <= x]
    if len(p) == 0:
        return 0.0
    return float(np.dot(np.abs(tbl.values[p]), np.log(p))) / x


def shiu_upper_bound(tbl: SieveTable, x: int, q: int) -> float:
    """Comparison envelope (q/phi(q)) (1/log x) exp(sum_{p<=x, p∤q} |f(p)|/p).

    The absolute implied constant in front is not modelled; callers report
    fitted ratios against this envelope.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if q * q > x:
        raise ValueError(f"requires q <= sqrt(x); got q = {q}, x = {x}")
    if not 2 <= x <= tbl.T:
        raise ValueError(f"x = {x} outside table range [2, {tbl.T}]")
    p = tbl.primes()
    p = p[p <= x]
    if q > 1:
        p = p[np.mod(q, p) != 0]
    s = float(np.sum(np.abs(tbl.values[p]) / p))
    return (q / totient(q)) * math.exp(s) / math.log(x)


def elliott_partial_sum(f: MultiplicativeFunction, X: int, t: float) -> float:
    """sum_{p<=X} (|f(p)| - Re(f(p) p^{it})) / p.

    Diagnostic only: boundedness in X is reported as a trend, never asserted.
    For real f the summand is |f(p)| - f(p) cos(t log p).
    """
    if X < 2:
        raise ValueError("X must be >= 2")
    from .numtheory import primes_up_to

    ps = primes_up_to(X)
    vals = np.array([f.at_prime_power(int(p), 1) for p in ps])
    return math.fsum(((np.abs(vals) - vals * np.cos(t * np.log(ps))) / ps).tolist())


# ---------------------------------------------------------------------------
# Ramanujan tau via the eta product
# ---------------------------------------------------------------------------

_TAU_CACHE: dict = {"limit": 0, "tau": []}


def _poly_mul_trunc(a: list[int], b: list[int], n_out: int) -> list[int]:
    """Truncated product of integer polynomials via Kronecker substitution.

    Coefficients are packed into one big integer per factor with a digit
    width that provably avoids carries; CPython's subquadratic integer
    multiplication then does the convolution exactly.  Signed coefficients
    are handled by a per-digit bias added before unpacking.
    """
    a = a[:n_out]
    b = b[:n_out]
    max_a = max(1, max(abs(c) for c in a))
    max_b = max(1, max(abs(c) for c in b))
    bound = max_a * max_b * min(len(a), len(b))
    w = (bound.bit_length() + 2 + 7) // 8  # bytes per digit; |coef| < 2^(8w-1)
    half = 1 << (8 * w - 1)

    def encode(coeffs):
        pos = b"".join((c if c > 0 else 0).to_bytes(w, "little") for c in coeffs)
        neg = b"".join((-c if c < 0 else 0).to_bytes(w, "little") for c in coeffs)
        return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")

    n_digits = len(a) + len(b) - 1
    prod = encode(a) * encode(b)
    bias = int.from_bytes((half.to_bytes(w, "little")) * n_digits, "little")
    raw = (prod + bias).to_bytes(w * n_digits, "little")
    n_keep = min(n_out, n_digits)
    return [
        int.from_bytes(raw[i * w : (i + 1) * w], "little") - half for i in range(n_keep)
    ]


def _eta_series(n_terms: int) -> list[int]:
    """prod_{m>=1} (1 - q^m) to n_terms coefficients, by the pentagonal number theorem."""
    e = [0] * n_terms
    e[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 >= n_terms and g2 >= n_terms:
            break
        s = -1 if k % 2 else 1
        if g1 < n_terms:
            e[g1] += s
        if g2 < n_terms:
            e[g2] += s
        k += 1
    return e


def tau_coefficients(T: int, check_bound: bool = True) -> list[int]:
    """Ramanujan tau(1..T): expand q prod (1-q^n)^24 as a truncated power series.

    Exact arbitrary-precision integers throughout (tau(n) exceeds 64 bits near
    n ~ 10^4).  When check_bound is set, verifies |tau(n)| <= d(n) n^{11/2}
    exactly for every n <= T via the integer comparison tau(n)^2 <= d(n)^2 n^11.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if _TAU_CACHE["limit"] >= T:
        tau = _TAU_CACHE["tau"][:T]
    else:
        eta = _eta_series(T)
        # square-and-multiply for eta^24 = ((eta^3)^2)^2)^2 style chain
        power = {1: eta}
        for e in (2, 4, 8, 16):
            power[e] = _poly_mul_trunc(power[e // 2], power[e // 2], T)
        e24 = _poly_mul_trunc(power[16], power[8], T)
        tau = e24[:T]  # tau(n) = [q^{n-1}] eta^24
        _TAU_CACHE["limit"] = T
        _TAU_CACHE["tau"] = list(tau)
    if check_bound:
        d = np.zeros(T + 1, dtype=np.int64)
        for i in range(1, T + 1):
            d[i::i] += 1
        for n in range(1, T + 1):
            if tau[n - 1] ** 2 > int(d[n]) ** 2 * n**11:
                raise AssertionError(f"divisor bound fails at n = {n}")
    return tau


def _tau_at(n: int) -> int:
    """tau(n) from the module cache, growing the series geometrically."""
    if _TAU_CACHE["limit"] < n:
        tau_coefficients(max(2 * n, 1024), check_bound=False)
    return _TAU_CACHE["tau"][n - 1]


# ---------------------------------------------------------------------------
# Semicircle law for normalized eigenvalues
# ---------------------------------------------------------------------------


def sato_tate_mu(alpha: float) -> float:
    """mu(alpha) = (2/pi) arcsin(alpha/2) + (1/pi) sin(2 arcsin(alpha/2)), 0 <= alpha <= 2."""
    if not 0.0 <= alpha <= 2.0:
        raise ValueError("alpha must lie in [0, 2]")
    u = math.asin(alpha / 2.0)
    return (2.0 / math.pi) * u + math.sin(2.0 * u) / math.pi


def sato_tate_density(alpha: float) -> float:
    """d mu / d alpha = sqrt(4 - alpha^2) / pi (differentiating the closed form)."""
    return math.sqrt(max(0.0, 4.0 - alpha * alpha)) / math.pi


def sato_tate_mean() -> float:
    """int_0^2 alpha dmu(alpha) by adaptive quadrature of alpha * mu'(alpha)."""
    val, _err = quad(lambda a: a * sato_tate_density(a), 0.0, 2.0, epsabs=1e-12)
    return val


# ---------------------------------------------------------------------------
# Built-in example functions
# ---------------------------------------------------------------------------


def _make_all_one() -> MultiplicativeFunction:
    return MultiplicativeFunction(
        name="all_one",
        prime_power_rule=lambda p, k: 1.0,
        growth_bound=1.0,
        nonnegative=True,
        alpha_lower_hint=1.0,
    )


def _make_delta_omega(delta: float) -> MultiplicativeFunction:
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return MultiplicativeFunction(
        name=f"delta_omega:{delta:g}",
        prime_power_rule=lambda p, k: delta,
        growth_bound=1.0,
        nonnegative=True,
        alpha_lower_hint=delta,
    )


def _two_squares_rule(p: int, k: int) -> float:
    # n is a sum of two squares iff every prime p = 3 mod 4 divides n to an
    # even power; the indicator is multiplicative with these prime-power values.
    if p % 4 == 3 and k % 2 == 1:
        return 0.0
    return 1.0


def _make_two_squares() -> MultiplicativeFunction:
    return MultiplicativeFunction(
        name="two_squares",
        prime_power_rule=_two_squares_rule,
        growth_bound=1.0,
        nonnegative=True,
        alpha_lower_hint=0.5,
    )


def _make_split_primes_gaussian() -> MultiplicativeFunction:
    # indicator of integers composed only of primes p = 1 mod 4 (the primes
    # splitting in the Gaussian integers)
    return MultiplicativeFunction(
        name="split_primes_gaussian",
        prime_power_rule=lambda p, k: 1.0 if p % 4 == 1 else 0.0,
        growth_bound=1.0,
        nonnegative=True,
        alpha_lower_hint=0.5,
    )


def _abs_lambda_rule(p: int, k: int) -> float:
    # normalized |tau| at prime powers via the Hecke recursion
    # lam(p^{k+1}) = lam(p) lam(p^k) - lam(p^{k-1}), lam(p) = tau(p)/p^{11/2}
    lam_p = float(_tau_at(p)) / p**5.5
    if k == 1:
        return abs(lam_p)
    prev2, prev1 = 1.0, lam_p
    for _ in range(2, k + 1):
        prev2, prev1 = prev1, lam_p * prev1 - prev2
    return abs(prev1)


def _make_abs_lambda_delta() -> MultiplicativeFunction:
    return MultiplicativeFunction(
        name="abs_lambda_delta",
        prime_power_rule=_abs_lambda_rule,
        growth_bound=2.0,
        nonnegative=True,
        alpha_lower_hint=8.0 / (3.0 * math.pi),
    )


def _make_divisor_d() -> MultiplicativeFunction:
    return MultiplicativeFunction(
        name="divisor_d",
        prime_power_rule=lambda p, k: float(k + 1),
        growth_bound=2.0,
        nonnegative=True,
        alpha_lower_hint=2.0,
    )


_FACTORIES: dict[str, Callable[..., MultiplicativeFunction]] = {
    "all_one": _make_all_one,
    "delta_omega": _make_delta_omega,
    "two_squares": _make_two_squares,
    "split_primes_gaussian": _make_split_primes_gaussian,
    "abs_lambda_delta": _make_abs_lambda_delta,
    "divisor_d": _make_divisor_d,
}


def get_function(spec: str) -> MultiplicativeFunction:
    """Resolve a registry string like "two_squares" or "delta_omega:0.5"."""
    parts = spec.split(":")
    name, params = parts[0], parts[1:]
    if name not in _FACTORIES:
        raise KeyError(f"unknown function {name!r}; known: {sorted(_FACTORIES)}")
    return _FACTORIES[name](*(float(x) for x in params))


def registered_names() -> list[str]:
    return sorted(_FACTORIES)


# ---------------------------------------------------------------------------
# Flat binary serialization of sieve tables
# ---------------------------------------------------------------------------

_MAGIC = b"MCSV"
_VERSION = 1


def save_table(tbl: SieveTable, path: str) -> None:
    """Write T, function name and values[1..T] as little-endian float64."""
    name = (tbl.function.name if tbl.function else "").encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IQH", _VERSION, tbl.T, len(name)))
        fh.write(name)
        fh.write(tbl.values[1:].astype("<f8").tobytes())


def load_table(path: str) -> SieveTable:
    """Read a table written by save_table; the spf array is rebuilt."""
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a sieve table file")
        version, T, name_len = struct.unpack("<IQH", fh.read(14))
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        name = fh.read(name_len).decode("utf-8")
        payload = fh.read(8 * T)
    values = np.zeros(T + 1, dtype=np.float64)
    values[1:] = np.frombuffer(payload, dtype="<f8")
    func = None
    if name:
        try:
            func = get_function(name)
        except (KeyError, ValueError):
            func = None
    return SieveTable(T=int(T), spf=spf_sieve(int(T)), values=values, function=func)
