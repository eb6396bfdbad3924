"""Dirichlet characters, twisted mean values, the exact identity expressing a
difference of progression means through characters not induced from the
smaller modulus, and the empirical major-arc stability probe.

Characters are stored as exponent vectors against a fixed generator
decomposition of (Z/qZ)^*; evaluation is exact integer exponent arithmetic
followed by one lookup in a root-of-unity table, so orthogonality holds to
machine noise and induction tests are exact integer comparisons.
"""

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .multfunc import SieveTable
from .numtheory import factorize, totient


def _primitive_root(p: int) -> int:
    """Smallest primitive root mod an odd prime p."""
    fac = [r for r, _ in factorize(p - 1)]
    g = 2
    while True:
        if all(pow(g, (p - 1) // r, p) != 1 for r in fac):
            return g
        g += 1


def _odd_prime_power_generator(p: int, e: int) -> int:
    """Generator of the cyclic group (Z/p^e)^*, p odd."""
    g = _primitive_root(p)
    if e >= 2 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


class CharacterGroup:
    """All phi(q) Dirichlet characters mod q, addressable by exponent tuples."""

    def __init__(self, q: int):
        if q < 1:
            raise ValueError("modulus must be >= 1")
        self.q = q
        # components: (generator mod q via CRT, order)
        gens: list[int] = []
        orders: list[int] = []
        parts = factorize(q) if q > 1 else []
        moduli = [p**e for p, e in parts]

        def crt_embed(local: int, idx: int) -> int:
            # element that is `local` mod moduli[idx] and 1 mod the others
            x = 1
            for k, m in enumerate(moduli):
                r = local % m if k == idx else 1
                # combine x (mod prod so far) with r mod m
                x = _crt_pair(x, math.prod(moduli[:k]) if k else 1, r, m)
            return x % q if q > 1 else 0

        # build per-part generators, then embed through the CRT
        for idx, (p, e) in enumerate(parts):
            if p == 2:
                if e == 1:
                    continue
                if e == 2:
                    gens.append(crt_embed(3, idx))
                    orders.append(2)
                else:
                    gens.append(crt_embed(2**e - 1, idx))
                    orders.append(2)
                    gens.append(crt_embed(3, idx))
                    orders.append(2 ** (e - 2))
            else:
                gens.append(crt_embed(_odd_prime_power_generator(p, e), idx))
                orders.append(totient(p**e))
        self.generators = tuple(gens)
        self.orders = tuple(orders)
        self.exponent = math.lcm(*orders) if orders else 1
        self._roots = np.exp(2j * math.pi * np.arange(self.exponent) / self.exponent)
        # discrete logs of every unit
        self._dlog: dict[int, tuple[int, ...]] = {}
        import itertools

        for exps in itertools.product(*(range(d) for d in orders)):
            n = 1
            for g, k in zip(gens, exps):
                n = (n * pow(g, k, q)) % q
            self._dlog[n % q if q > 1 else 0] = exps
        if q == 1:
            self._dlog[0] = ()

    @property
    def size(self) -> int:
        return math.prod(self.orders) if self.orders else 1

    def dlog(self, n: int) -> Optional[tuple[int, ...]]:
        """Exponent vector of n, or None when gcd(n, q) > 1."""
        return self._dlog.get(n % self.q if self.q > 1 else 0)

    def characters(self) -> Iterator["Character"]:
        import itertools

        for exps in itertools.product(*(range(d) for d in self.orders)):
            yield Character(self, exps)

    def principal(self) -> "Character":
        return Character(self, tuple(0 for _ in self.orders))


def _crt_pair(a1: int, m1: int, a2: int, m2: int) -> int:
    if m1 == 1:
        return a2 % m2 if m2 > 1 else 0
    inv = pow(m1, -1, m2)
    return (a1 + m1 * ((a2 - a1) * inv % m2)) % (m1 * m2)


@dataclass(frozen=True)
class Character:
    """chi determined by its exponents against the group's generators."""

    group: CharacterGroup
    exps: tuple[int, ...]

    def root_exponent(self, n: int) -> Optional[int]:
        """t with chi(n) = e^{2 pi i t / E}, exact; None when gcd(n, q) > 1."""
        x = self.group.dlog(n)
        if x is None:
            return None
        E = self.group.exponent
        total = 0
        for k, xi, d in zip(self.exps, x, self.group.orders):
            total += k * xi * (E // d)
        return total % E

    def __call__(self, n: int) -> complex:
        t = self.root_exponent(n)
        return 0j if t is None else complex(self.group._roots[t])

    @property
    def is_principal(self) -> bool:
        return all(k == 0 for k in self.exps)

    def is_induced_from(self, m: int) -> bool:
        """True iff chi factors through (Z/mZ)^* for m | q: exactly when chi
        kills every unit n = 1 (mod m).  Integer-exact test."""
        q = self.group.q
        if m < 1 or q % m != 0:
            raise ValueError("m must divide the modulus")
        if q == 1:
            return True
        for n in range(1, q, m):
            if math.gcd(n, q) == 1 and self.root_exponent(n) != 0:
                return False
        return True


def build_characters(q: int) -> CharacterGroup:
    return CharacterGroup(q)


def restricted_characters(q0: int, w_tilde: int) -> list[Character]:
    """Characters mod q0*W~ NOT induced from characters mod W~."""
    group = CharacterGroup(q0 * w_tilde)
    return [chi for chi in group.characters() if not chi.is_induced_from(w_tilde)]


def twisted_mean(tbl: SieveTable, x: int, chi: Character) -> complex:
    """sum_{n <= x} f(n) conj(chi(n)): exactly-rounded residue blocks weighted
    by the (conjugated) root-of-unity values."""
    if x > tbl.T:
        raise ValueError("x exceeds table range")
    q = chi.group.q
    if q == 1:
        return complex(math.fsum(tbl.values[1 : x + 1].tolist()), 0.0)
    re_parts: list[float] = []
    im_parts: list[float] = []
    for a in range(1, q + 1):
        t = chi.root_exponent(a)
        if t is None:
            continue
        block = math.fsum(tbl.values[a : x + 1 : q].tolist())
        w = complex(chi.group._roots[t]).conjugate()
        re_parts.append(w.real * block)
        im_parts.append(w.imag * block)
    return complex(math.fsum(re_parts), math.fsum(im_parts))


@dataclass
class IdentityCheck:
    """Both sides of the exact progression-difference identity."""

    lhs: float
    rhs: float
    residual: float
    restricted_term: float
    correction_noncoprime: float
    correction_induced: float
    n_restricted: int


def progression_difference_identity(
    tbl: SieveTable, y: int, q0: int, w_tilde: int, A: int
) -> IdentityCheck:
    """Check S_f(y; W~, A) - S_f(y; q0 W~, A) against its character expansion.

    The expansion over characters mod q0 W~ that are not induced from mod W~
    is exact once two finite corrections are carried along: the mass of
    n = A (mod W~) sharing a factor with q0, and a per-induced-character
    deficiency (the number of coprime lifts of A falls short of q0 when q0
    has primes outside W~).  Both corrections vanish identically when every
    prime of q0 divides W~.  Everything is evaluated at the same cutoff y,
    so the residual is floating noise.
    """
    q = q0 * w_tilde
    if math.gcd(A, q) != 1:
        raise ValueError("A must be coprime to q0 * W~")
    if y > tbl.T:
        raise ValueError("y exceeds table range")
    from .multfunc import mean_value_progression

    lhs = mean_value_progression(tbl, y, w_tilde, A) - mean_value_progression(tbl, y, q, A)

    group = CharacterGroup(q)
    phi_q = group.size
    restricted_sum = 0j
    induced_sum = 0j
    n_restricted = 0
    # coprime lifts of A mod W~ to mod q
    c_lifts = sum(
        1 for t in range(q0) if math.gcd(A + w_tilde * t, q) == 1
    )
    for chi in group.characters():
        t_chi = twisted_mean(tbl, y, chi)
        if chi.is_induced_from(w_tilde):
            induced_sum += (c_lifts - q0) * chi(A) * t_chi
        else:
            restricted_sum += chi(A) * t_chi
            n_restricted += 1
    restricted_term = -(q0 * w_tilde / (y * phi_q)) * restricted_sum.real
    correction_induced = (w_tilde / (y * phi_q)) * induced_sum.real
    # mass of n = A (mod W~) with gcd(n, q0) > 1
    noncop = 0.0
    for a_prime in range(A % w_tilde, q, w_tilde):
        if a_prime > 0 and math.gcd(a_prime, q) > 1:
            noncop += math.fsum(tbl.values[a_prime : y + 1 : q].tolist())
    correction_noncoprime = (w_tilde / y) * noncop
    rhs = restricted_term + correction_induced + correction_noncoprime
    return IdentityCheck(
        lhs=lhs,
        rhs=rhs,
        residual=abs(lhs - rhs),
        restricted_term=restricted_term,
        correction_noncoprime=correction_noncoprime,
        correction_induced=correction_induced,
        n_restricted=n_restricted,
    )


@dataclass
class MajorArcReport:
    x: int
    q0: int
    w_tilde: int
    residue: int
    interval_length: int
    envelope: float
    rows: list[tuple[int, float, float]]  # (interval start, raw, normalized)
    max_normalized: float


def major_arc_probe(
    tbl: SieveTable,
    x: int,
    q0: int,
    w_tilde: int,
    A: int,
    theta: float,
    wctx=None,
    n_intervals: int = 10,
) -> MajorArcReport:
    """Scan threshold-length intervals I and compare the interval progression
    mean against S_f(x; W~, A), normalized by the mean-value envelope
    (1/log x)(W q0/phi(W q0)) prod_{p<x, p∤W q0}(1 + |f(p)|/p)."""
    from .multfunc import mean_value_progression
    from .wtrick import make_wcontext

    q = q0 * w_tilde
    if math.gcd(A, q) != 1:
        raise ValueError("A must be coprime to q0 * W~")
    if not 0 < q0 <= math.log(x) ** theta:
        raise ValueError("need 0 < q0 <= (log x)^theta")
    if x > tbl.T:
        raise ValueError("x exceeds table range")
    ctx = wctx if wctx is not None else make_wcontext(x)
    length = int(x * math.log(x) ** (-theta)) + 1
    base = mean_value_progression(tbl, x, w_tilde, A)
    wq = ctx.W * q0
    p = tbl.primes()
    p = p[p < x]
    p = p[np.mod(wq, p) != 0]
    envelope = (
        (wq / totient(wq))
        * math.exp(math.fsum(np.log1p(np.abs(tbl.values[p]) / p).tolist()))
        / math.log(x)
    )
    rows = []
    starts = np.linspace(0, x - length, n_intervals).astype(np.int64)
    for y1 in starts:
        y1 = int(y1)
        first = y1 + ((A - y1 - 1) % q) + 1  # smallest element > y1 congruent to A
        block = float(np.sum(tbl.values[first : y1 + length + 1 : q])) if first <= y1 + length else 0.0
        interval_mean = q * block / length
        raw = interval_mean - base
        rows.append((y1 + 1, raw, abs(raw) / envelope))
    return MajorArcReport(
        x=x,
        q0=q0,
        w_tilde=w_tilde,
        residue=A,
        interval_length=length,
        envelope=envelope,
        rows=rows,
        max_normalized=max(r[2] for r in rows),
    )
