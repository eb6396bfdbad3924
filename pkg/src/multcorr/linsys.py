"""Integer affine-linear systems, convex bodies in [-1,1]^s, lattice point
enumeration of dilated bodies, and correlation sums sum_n prod_i f_i(phi_i(n)).

Enumeration slices coordinates recursively: a Fourier-Motzkin elimination of
trailing variables is precomputed once (it commutes with dilation because
every offset scales linearly with it), so the feasible interval of each
coordinate given a fixed prefix is exact rational arithmetic.  The plain
bounding-box scan survives in the test suite as the enumeration oracle.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from ._kernels import corr_inner1, corr_inner2, corr_inner3
from .multfunc import SieveTable


class FormRangeError(ValueError):
    """A form escaped its table range on a lattice point; carries the witness."""

    def __init__(self, form_index: int, point: tuple, value: int, limit: int):
        self.form_index = form_index
        self.point = point
        self.value = value
        self.limit = limit
        super().__init__(
            f"form {form_index} evaluates to {value} at lattice point {point}, "
            f"outside [1, {limit}]"
        )


@dataclass(frozen=True)
class LinearForm:
    """phi(x) = <coeffs, x> + constant with integer coefficients."""

    coeffs: tuple[int, ...]
    constant: int = 0

    def __post_init__(self):
        if not any(self.coeffs):
            raise ValueError("non-constant part must be nontrivial")

    def __call__(self, point: Sequence[int]) -> int:
        return sum(c * x for c, x in zip(self.coeffs, point)) + self.constant

    def shifted(self, v: Sequence[int]) -> "LinearForm":
        """phi(. + v)."""
        return LinearForm(self.coeffs, self(v))


@dataclass(frozen=True)
class LinearSystem:
    """r affine forms in s variables with pairwise independent linear parts."""

    forms: tuple[LinearForm, ...]

    def __post_init__(self):
        if not self.forms:
            raise ValueError("need at least one form")
        s = len(self.forms[0].coeffs)
        if any(len(f.coeffs) != s for f in self.forms):
            raise ValueError("all forms must share the variable count")
        # pairwise independence via 2x2 minors of the extended (coeffs, constant)
        # vectors: rejects duplicated forms up to scaling while admitting
        # shifted pairs like (n, n+2) in one variable
        for i in range(len(self.forms)):
            for j in range(i + 1, len(self.forms)):
                vi = self.forms[i].coeffs + (self.forms[i].constant,)
                vj = self.forms[j].coeffs + (self.forms[j].constant,)
                if _proportional(vi, vj):
                    raise ValueError(
                        f"forms {i} and {j} are proportional (duplicate condition)"
                    )

    @property
    def r(self) -> int:
        return len(self.forms)

    @property
    def s(self) -> int:
        return len(self.forms[0].coeffs)


def _proportional(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    """True iff all 2x2 minors of (a; b) vanish (integer exact)."""
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            if a[i] * b[j] - a[j] * b[i] != 0:
                return False
    return True


def _normalize_constraint(coeffs, offset):
    g = 0
    for c in coeffs:
        g = math.gcd(g, abs(c))
    if g > 1:
        coeffs = tuple(c // g for c in coeffs)
        offset = Fraction(offset) / g
    return coeffs, Fraction(offset)


class ConvexBody:
    """Intersection of rational halfspaces <a, x> <= b inside [-1, 1]^s.

    The box constraints are appended automatically so the region is always
    contained in [-1,1]^s.  Dilating by tau maps each offset b to tau*b;
    boundary points (equality) count as inside.
    """

    def __init__(self, s: int, halfspaces: Sequence[tuple[Sequence, object]]):
        self.s = s
        cleaned = []
        for normal, offset in halfspaces:
            normal = tuple(Fraction(c) for c in normal)
            if len(normal) != s:
                raise ValueError("halfspace dimension mismatch")
            den = math.lcm(*(f.denominator for f in normal))
            coeffs = tuple(int(f * den) for f in normal)
            cleaned.append(_normalize_constraint(coeffs, Fraction(offset) * den))
        for i in range(s):
            e = [0] * s
            e[i] = 1
            cleaned.append((tuple(e), Fraction(1)))
            e[i] = -1
            cleaned.append((tuple(e), Fraction(1)))
        self.halfspaces = cleaned
        self._levels = self._eliminate()

    def _eliminate(self):
        """Fourier-Motzkin projections; _levels[j] constrains x_1..x_{j+1}."""
        levels: list = [None] * self.s
        current = list(dict.fromkeys(self.halfspaces))
        levels[self.s - 1] = current
        for j in range(self.s - 1, 0, -1):
            nxt = []
            pos, neg = [], []
            for coeffs, off in current:
                cj = coeffs[j]
                if cj == 0:
                    nxt.append((coeffs[:j], off))
                elif cj > 0:
                    pos.append((coeffs, off))
                else:
                    neg.append((coeffs, off))
            for cp, bp in pos:
                for cn, bn in neg:
                    alpha, beta = cp[j], -cn[j]
                    comb = tuple(beta * cp[i] + alpha * cn[i] for i in range(j))
                    nxt.append(_normalize_constraint(comb, beta * bp + alpha * bn))
            pruned = []
            for coeffs, off in dict.fromkeys(nxt):
                if any(coeffs) or off < 0:
                    pruned.append((coeffs, off))
            levels[j - 1] = pruned
            current = pruned
        return levels

    def coordinate_interval(
        self, prefix: tuple[int, ...], tau: Fraction
    ) -> Optional[tuple[int, int]]:
        """Integer range of coordinate len(prefix)+1 in the tau-dilated body,
        or None if the prefix admits no completion."""
        j = len(prefix)
        lo, hi = None, None
        for coeffs, off in self._levels[j]:
            partial = sum(c * x for c, x in zip(coeffs, prefix))
            bound = off * tau - partial
            cj = coeffs[j] if len(coeffs) > j else 0
            if cj == 0:
                if bound < 0:
                    return None
                continue
            if cj > 0:
                cand = math.floor(bound / cj)
                hi = cand if hi is None else min(hi, cand)
            else:
                cand = math.ceil(bound / cj)
                lo = cand if lo is None else max(lo, cand)
        if lo is None or hi is None or lo > hi:
            return None
        return (lo, hi)

    def interior_point(self) -> tuple[float, ...]:
        """Chebyshev center; raises if the body has empty interior."""
        from scipy.optimize import linprog

        n = len(self.halfspaces)
        a_ub = np.zeros((n, self.s + 1))
        b_ub = np.zeros(n)
        for i, (coeffs, off) in enumerate(self.halfspaces):
            a_ub[i, : self.s] = coeffs
            a_ub[i, self.s] = math.sqrt(sum(c * c for c in coeffs))
            b_ub[i] = float(off)
        cost = np.zeros(self.s + 1)
        cost[self.s] = -1.0
        res = linprog(
            cost, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * self.s + [(0, None)]
        )
        if not res.success or res.x[self.s] <= 1e-9:
            raise ValueError("body has empty interior")
        return tuple(res.x[: self.s])


def box_body(bounds: Sequence[tuple[object, object]]) -> ConvexBody:
    """Axis-aligned product body: bounds[i] = (lo_i, hi_i) as rationals."""
    s = len(bounds)
    halfspaces = []
    for i, (lo, hi) in enumerate(bounds):
        e = [0] * s
        e[i] = 1
        halfspaces.append((tuple(e), Fraction(hi)))
        e2 = [0] * s
        e2[i] = -1
        halfspaces.append((tuple(e2), -Fraction(lo)))
    return ConvexBody(s, halfspaces)


def _prefixes(body: ConvexBody, tau: Fraction, depth: int) -> Iterator[tuple[int, ...]]:
    """All integer prefixes of the first `depth` coordinates, lexicographic."""
    if depth == 0:
        yield ()
        return
    for prefix in _prefixes(body, tau, depth - 1):
        rng = body.coordinate_interval(prefix, tau)
        if rng is None:
            continue
        for v in range(rng[0], rng[1] + 1):
            yield prefix + (v,)


def enumerate_lattice(body: ConvexBody, tau) -> Iterator[tuple[int, ...]]:
    """Integer points of the tau-dilated body, lexicographic; boundary included."""
    tau = Fraction(tau)
    if tau <= 0:
        raise ValueError("dilation must be positive")
    yield from _prefixes(body, tau, body.s)


def lattice_count(body: ConvexBody, tau) -> int:
    """#(Z^s intersect tau*body), without materializing the points."""
    tau = Fraction(tau)
    count = 0
    for prefix in _prefixes(body, tau, body.s - 1):
        rng = body.coordinate_interval(prefix, tau)
        if rng is not None:
            count += rng[1] - rng[0] + 1
    return count


@dataclass
class CorrelationResult:
    T: int
    dilation: Fraction
    raw_sum: float
    lattice_count: int
    range_failures: int = 0


def _inner_dispatch(t0, t1, consts, strides, arrays):
    r = len(arrays)
    if r == 1:
        return corr_inner1(t0, t1, consts[0], strides[0], arrays[0])
    if r == 2:
        return corr_inner2(
            t0, t1, consts[0], strides[0], arrays[0], consts[1], strides[1], arrays[1]
        )
    if r == 3:
        return corr_inner3(
            t0, t1,
            consts[0], strides[0], arrays[0],
            consts[1], strides[1], arrays[1],
            consts[2], strides[2], arrays[2],
        )
    t = np.arange(t0, t1 + 1, dtype=np.int64)
    acc = arrays[0][consts[0] + strides[0] * t]
    for c, a, v in zip(consts[1:], strides[1:], arrays[1:]):
        acc = acc * v[c + a * t]
    return float(np.sum(acc))


def _accumulate(
    tbls: Sequence[SieveTable],
    forms: Sequence[LinearForm],
    body: ConvexBody,
    tau: Fraction,
) -> tuple[float, int]:
    """Shared engine: sliced enumeration with exact endpoint range checks.

    Indices are affine in the innermost coordinate, so checking both interval
    endpoints against [1, tbl.T] in exact integer arithmetic certifies every
    index the kernel will touch.
    """
    arrays = [t.values for t in tbls]
    limits = [t.T for t in tbls]
    partials = []
    count = 0
    for prefix in _prefixes(body, tau, body.s - 1):
        rng = body.coordinate_interval(prefix, tau)
        if rng is None:
            continue
        lo, hi = rng
        consts, strides = [], []
        for i, f in enumerate(forms):
            c = sum(a * x for a, x in zip(f.coeffs[:-1], prefix)) + f.constant
            a_s = f.coeffs[-1]
            for t_end in (lo, hi):
                val = c + a_s * t_end
                if not 1 <= val <= limits[i]:
                    raise FormRangeError(i, prefix + (t_end,), val, limits[i])
            consts.append(c)
            strides.append(a_s)
        partials.append(_inner_dispatch(lo, hi, consts, strides, arrays))
        count += hi - lo + 1
    return math.fsum(partials), count


def correlation_sum(
    tbls: Sequence[SieveTable],
    system: LinearSystem,
    body: ConvexBody,
    T: int,
) -> CorrelationResult:
    """sum over n in Z^s cap T*body of prod_i values_i[phi_i(n)].

    Form evaluation is exact integer arithmetic; any index outside
    [1, tbl_i.T] raises FormRangeError naming the form and a witness point
    (no clamping -- a range violation voids the experiment).
    """
    if len(tbls) != system.r:
        raise ValueError("one table per form required")
    tau = Fraction(T)
    raw, count = _accumulate(tbls, system.forms, body, tau)
    return CorrelationResult(T=T, dilation=tau, raw_sum=raw, lattice_count=count)


def correlation_sum_wtricked(
    tbls: Sequence[SieveTable],
    system: LinearSystem,
    body: ConvexBody,
    T: int,
    W_list: Sequence[int],
    A_list: Sequence[int],
    coprime_to: Optional[int] = None,
) -> CorrelationResult:
    """sum over n in Z^s cap (T/W')*body of prod_i values_i[W_i*phi_i(n) + A_i],
    with W' = lcm(W_1, ..., W_r).

    A_i must be coprime to `coprime_to` (the small-prime product W of the
    ambient context).  When not supplied, W' itself is used, which keeps the
    untricked case W_i = 1, A_i = 0 a strict identity with correlation_sum.
    """
    r = system.r
    if len(W_list) != r or len(A_list) != r:
        raise ValueError("W_list and A_list must have one entry per form")
    if any(w < 1 for w in W_list):
        raise ValueError("every W_i must be >= 1")
    w_prime = math.lcm(*W_list)
    modulus = coprime_to if coprime_to is not None else w_prime
    for i, a in enumerate(A_list):
        if math.gcd(a, modulus) != 1:
            raise ValueError(f"A_{i} = {a} shares a factor with modulus {modulus}")
    tricked = tuple(
        LinearForm(tuple(w * c for c in f.coeffs), w * f.constant + a)
        for f, w, a in zip(system.forms, W_list, A_list)
    )
    tau = Fraction(T, w_prime)
    raw, count = _accumulate(tbls, tricked, body, tau)
    return CorrelationResult(T=T, dilation=tau, raw_sum=raw, lattice_count=count)
