"""Local densities against brute-force residue scans, the exact local factor
closed forms, and both prediction engines against naive reimplementations."""

import itertools
import math
import random
from fractions import Fraction

import pytest

from multcorr import linsys, localdensity as ld, multfunc as mf, wtrick


def residue_scan_density(system, moduli):
    """Oracle: count solutions over the full residue cube mod lcm."""
    L = math.lcm(*moduli)
    count = 0
    for v in itertools.product(range(L), repeat=system.s):
        if all(f(v) % m == 0 for f, m in zip(system.forms, moduli)):
            count += 1
    return Fraction(count, L**system.s)


def line(coeffs, const=0):
    return linsys.LinearForm(tuple(coeffs), const)


def random_system(rng, max_r=2, max_s=2, coeff_bound=3):
    """Random small system with nontrivial, pairwise non-proportional forms."""
    s = rng.randint(1, max_s)
    r = rng.randint(1, max_r)
    forms: list[linsys.LinearForm] = []
    while len(forms) < r:
        coeffs = tuple(rng.randint(-coeff_bound, coeff_bound) for _ in range(s))
        if not any(coeffs):
            continue
        cand = line(coeffs, rng.randint(-coeff_bound, coeff_bound))
        try:
            linsys.LinearSystem(tuple(forms) + (cand,))
        except ValueError:
            continue
        forms.append(cand)
    return linsys.LinearSystem(tuple(forms))


SYS_N = linsys.LinearSystem((line((1,)),))


class TestAffineSolutionCount:
    def test_identity_line(self):
        # v = 0 mod 8 inside Z/8: one solution
        assert ld.count_affine_solutions([[1]], [0], 8) == 1

    def test_free_variable(self):
        # 2 is invertible mod 9, so y = 0 and x free: 9 solutions
        assert ld.count_affine_solutions([[0, 2]], [0], 9) == 9

    def test_inconsistent(self):
        assert ld.count_affine_solutions([[2]], [1], 4) == 0

    def test_gcd_solutions(self):
        # 2x = 2 mod 4 has two solutions x in {1, 3}
        assert ld.count_affine_solutions([[2]], [2], 4) == 2

    def test_random_systems_match_enumeration(self):
        rng = random.Random(3)
        for _ in range(60):
            s = rng.choice([1, 2])
            r = rng.choice([1, 2])
            mod = rng.choice([2, 3, 4, 5, 8, 9, 25, 27])
            rows = [[rng.randint(-4, 4) for _ in range(s)] for _ in range(r)]
            rhs = [rng.randint(-4, 4) for _ in range(r)]
            direct = sum(
                1
                for v in itertools.product(range(mod), repeat=s)
                if all(
                    (sum(a * x for a, x in zip(row, v)) - b) % mod == 0
                    for row, b in zip(rows, rhs)
                )
            )
            assert ld.count_affine_solutions(rows, rhs, mod) == direct, (rows, rhs, mod)


class TestDivisorDensity:
    def test_identity_form(self):
        for p, c in ((2, 3), (3, 2), (5, 1)):
            assert ld.prime_power_divisor_density(SYS_N, p, [c]) == Fraction(1, p**c)

    def test_odd_form_at_two(self):
        sys_odd = linsys.LinearSystem((line((2,), 1),))
        assert ld.prime_power_divisor_density(sys_odd, 2, [1]) == 0

    def test_nine_point_oracle(self):
        sys2 = linsys.LinearSystem((line((1, 0)), line((1, 2))))
        got = ld.prime_power_divisor_density(sys2, 3, [1, 1])
        assert got == residue_scan_density(sys2, [3, 3]) == Fraction(1, 9)

    def test_direct_and_lifted_agree(self):
        rng = random.Random(11)
        for _ in range(40):
            system = random_system(rng)
            p = rng.choice([2, 3, 5])
            exps = [rng.randint(0, 3) for _ in range(system.r)]
            if max(exps) == 0:
                continue
            assert ld._density_direct(system, p, exps) == ld._density_lifted(
                system, p, exps
            )

    def test_range_bounds(self):
        sys2 = linsys.LinearSystem((line((1, 0)), line((0, 1), 1)))
        for p in (2, 3):
            for exps in ([1, 0], [2, 1], [0, 0]):
                a = ld.prime_power_divisor_density(sys2, p, exps)
                assert 0 <= a <= 1
                if max(exps) == 0:
                    assert a == 1


class TestCompositeDensity:
    def test_all_ones(self):
        assert ld.composite_divisor_density(SYS_N, [1]) == 1

    def test_mod_twelve(self):
        assert ld.composite_divisor_density(SYS_N, [12]) == Fraction(1, 12)

    def test_random_systems_against_scan(self):
        rng = random.Random(5)
        for _ in range(15):
            system = random_system(rng)
            moduli = [
                rng.choice([2, 3, 4, 6, 10, 12, 15]) for _ in range(system.r)
            ]
            assert ld.composite_divisor_density(system, moduli) == residue_scan_density(
                system, moduli
            )


def residue_scan_exact_divisibility(system, funcs, p, a_max):
    """Oracle for the local factor: weighted count over Z/p^{a_max+1},
    where exact divisibility is unambiguous for exponents <= a_max."""
    mod = p ** (a_max + 1)
    total = Fraction(0)
    for v in itertools.product(range(mod), repeat=system.s):
        w = Fraction(1)
        for f, func in zip(system.forms, funcs):
            val = f(v) % mod
            e = 0
            tmp = val
            while tmp and tmp % p == 0:
                tmp //= p
                e += 1
            if val == 0:
                e = a_max + 1  # divisible by the full modulus: beyond range
            if e > a_max:
                w = Fraction(0)
                break
            w *= Fraction(func.at_prime_power(p, e)) if e else 1
        total += w
    norm = Fraction(1)
    for func in funcs:
        norm *= 1 / (1 + Fraction(func.at_prime_power(p, 1)) / p)
    return total / mod**system.s * norm


class TestEulerFactor:
    def test_all_one_closed_form_exact(self):
        f = mf.get_function("all_one")
        for p in (2, 3, 5, 7):
            for a_max in (3, 6):
                ef = ld.euler_factor(SYS_N, [f], p, a_max, exact=True)
                expect = (1 - Fraction(1, p ** (a_max + 1))) / (1 + Fraction(1, p))
                assert ef.exact_value == expect

    def test_zero_on_primes(self):
        f = mf.MultiplicativeFunction("zp", lambda p, k: 0.0)
        ef = ld.euler_factor(SYS_N, [f], 3, 4, exact=True)
        assert ef.exact_value == Fraction(2, 3)

    def test_two_squares_pair_against_residue_scan(self):
        f = mf.get_function("two_squares")
        system = linsys.LinearSystem((line((1,)), line((1,), 1)))
        for p in (2, 3):
            a_max = 2
            ef = ld.euler_factor(system, [f, f], p, a_max, exact=True)
            oracle = residue_scan_exact_divisibility(system, [f, f], p, a_max)
            assert ef.exact_value == oracle, (p, ef.exact_value, oracle)

    def test_truncation_monotone_with_valid_tail(self):
        f = mf.get_function("two_squares")
        system = linsys.LinearSystem((line((1,)), line((1,), 2)))
        for p in (2, 3, 5):
            vals = [ld.euler_factor(system, [f, f], p, a) for a in (1, 2, 3, 5)]
            for lo, hi in zip(vals, vals[1:]):
                assert hi.value >= lo.value - 1e-15  # nonneg terms only
                assert hi.value - lo.value <= lo.tail_bound + 1e-12

    def test_tail_infinite_when_growth_beats_prime(self):
        f = mf.get_function("divisor_d")  # growth bound 2
        ef = ld.euler_factor(SYS_N, [f], 2, 4)
        assert math.isinf(ef.tail_bound)
        ef3 = ld.euler_factor(SYS_N, [f], 3, 4)
        assert math.isfinite(ef3.tail_bound)

    def test_nonnegative_required(self):
        f = mf.MultiplicativeFunction("neg", lambda p, k: -1.0, nonnegative=False)
        with pytest.raises(ValueError, match="nonnegative"):
            ld.euler_factor(SYS_N, [f], 2, 2)

    def test_normalized_factor_near_one(self):
        f = mf.get_function("two_squares")
        system = linsys.LinearSystem((line((1,)), line((1,), 2)))
        for p in (7, 11, 19, 31):
            ef = ld.euler_factor(system, [f, f], p, 4)
            assert abs(ef.normalized - 1.0) <= 4.0 / p**2


class TestExactDivisibilityPartition:
    def test_strata_partition_residues(self):
        # at modulus p^{A+1}, the exact-exponent counts for a = 0..A plus the
        # residues divisible by p^{A+1} partition everything (integer identity)
        for p, A in ((2, 4), (3, 3), (5, 2)):
            mod = p ** (A + 1)
            strata = 0
            for a in range(A + 1):
                strata += sum(
                    1
                    for v in range(mod)
                    if v % p**a == 0 and (v % p ** (a + 1)) != 0
                )
            divisible_beyond = sum(1 for v in range(mod) if v % mod == 0)
            assert strata + divisible_beyond == mod

    def test_density_identity_from_machinery(self):
        # the exact-divisibility densities over a = 0..A sum to
        # 1 - density(p^{A+1} | v)
        cache = {}
        for p, A in ((2, 5), (3, 3)):
            total = sum(
                ld._exact_divisibility_density(SYS_N, p, (a,), cache) for a in range(A + 1)
            )
            assert total == 1 - Fraction(1, p ** (A + 1))


class TestArchimedean:
    def test_formula_instantiation_all_one(self, all_one_10k):
        body = linsys.box_body([(Fraction(1, 100), 1)])
        T = 100
        got = ld.archimedean_factor(SYS_N, [mf.get_function("all_one")], [all_one_10k], body, T)
        primes = [p for p in all_one_10k.primes() if p <= T]
        expect = 100 * math.prod(1 + 1 / p for p in primes) / math.log(T)
        assert got == pytest.approx(expect, rel=1e-9)

    def test_euler_product_direct_oracle(self, two_squares_10k):
        body = linsys.box_body([(Fraction(1, 1000), 1)])
        T = 1000
        got = ld.archimedean_factor(
            SYS_N, [mf.get_function("two_squares")], [two_squares_10k], body, T
        )
        direct = 1.0
        for p in two_squares_10k.primes():
            p = int(p)
            if p <= T:
                direct *= 1 + two_squares_10k.values[p] / p
        expect = 1000 * direct / math.log(T)
        assert got == pytest.approx(expect, rel=1e-9)

    def test_no_forms_degenerate(self, all_one_10k):
        body = linsys.box_body([(Fraction(1, 50), 1)])
        got = ld.archimedean_factor(SYS_N, [], [], body, 50)
        assert got == 50.0  # empty products, bare lattice count


class TestCorollaryPrediction:
    def test_pmax_one_returns_archimedean(self, two_squares_10k):
        body = linsys.box_body([(Fraction(1, 500), 1)])
        f = mf.get_function("two_squares")
        rep = ld.corollary_prediction(SYS_N, [f], [two_squares_10k], body, 500, prime_cutoff=1)
        assert rep.entries == []
        assert rep.prediction == rep.beta_infinity

    def test_all_one_literal_product(self, all_one_10k):
        body = linsys.box_body([(Fraction(1, 200), 1)])
        f = mf.get_function("all_one")
        rep = ld.corollary_prediction(
            SYS_N, [f], [all_one_10k], body, 200, max_exp=8, prime_cutoff=7
        )
        lit = math.prod(
            (1 - p ** -9.0) / (1 + 1 / p) for p in (2, 3, 5, 7)
        )
        assert rep.product_over_primes == pytest.approx(lit, rel=1e-12)
        assert rep.prediction == pytest.approx(rep.beta_infinity * lit, rel=1e-12)

    def test_threads_deterministic(self, two_squares_10k):
        body = linsys.box_body([(Fraction(1, 500), 1)])
        f = mf.get_function("two_squares")
        a = ld.corollary_prediction(SYS_N, [f], [two_squares_10k], body, 500, prime_cutoff=30, threads=1)
        b = ld.corollary_prediction(SYS_N, [f], [two_squares_10k], body, 500, prime_cutoff=30, threads=4)
        assert a.prediction == b.prediction
        assert [e.p for e in a.entries] == [e.p for e in b.entries]


def naive_theorem_main_term(system, funcs, wctx, tbls, T, b2):
    """Oracle: the identical finite double sum with direct residue enumeration
    over v mod w*W~ (small moduli only)."""
    cap = int(math.log(T) ** b2)
    smooth = wtrick.smooth_numbers(wctx.prime_list, cap)
    w_tilde = wctx.W_tilde
    residues = [
        {
            a: mf.mean_value_progression(tbl, T, w_tilde, a)
            for a in range(w_tilde)
            if math.gcd(a, wctx.W) == 1
        }
        for tbl in tbls
    ]
    total = 0.0
    r = system.r
    for w_vec in itertools.product(smooth, repeat=r):
        w = math.lcm(*w_vec)
        mod = w * w_tilde
        for a_vec in itertools.product(*[sorted(res.keys()) for res in residues]):
            count = 0
            for v in itertools.product(range(mod), repeat=system.s):
                ok = True
                for j, form in enumerate(system.forms):
                    if (form(v) - w_vec[j] * a_vec[j]) % (w_vec[j] * w_tilde) != 0:
                        ok = False
                        break
                if ok:
                    count += 1
            if count == 0:
                continue
            term = count / mod**system.s
            for j in range(r):
                term *= funcs[j](w_vec[j]) * residues[j][a_vec[j]]
            total += term
    return total


class TestTheoremPrediction:
    def test_against_naive_oracle_r1(self):
        f = mf.get_function("all_one")
        tbl = mf.build_sieve(f, 200)
        wctx = wtrick.make_wcontext(200, B2=2.0)
        got = ld.theorem_prediction(SYS_N, [f], wctx, [tbl], 200, b2=2.0)
        oracle = naive_theorem_main_term(SYS_N, [f], wctx, [tbl], 200, 2.0)
        assert got.value == pytest.approx(oracle, rel=1e-12)

    def test_against_naive_oracle_r2(self):
        f = mf.get_function("delta_omega:0.5")
        system = linsys.LinearSystem((line((1, 0)), line((1, 2), 1)))
        tbl = mf.build_sieve(f, 400)
        wctx = wtrick.make_wcontext(300, B2=2.0)
        got = ld.theorem_prediction(system, [f, f], wctx, [tbl, tbl], 300, b2=2.0)
        oracle = naive_theorem_main_term(system, [f, f], wctx, [tbl, tbl], 300, 2.0)
        assert got.value == pytest.approx(oracle, rel=1e-12)

    def test_support_collapse_single_tuple(self):
        # function vanishing on every smooth w > 1 collapses the outer sum
        f = mf.MultiplicativeFunction("kill2", lambda p, k: 0.0 if p == 2 else 1.0)
        tbl = mf.build_sieve(f, 200)
        wctx = wtrick.make_wcontext(200, B2=3.0)
        assert wctx.W == 2
        got = ld.theorem_prediction(SYS_N, [f], wctx, [tbl], 200, b2=3.0)
        # only w = 1 contributes: S_f(T; 2, 1) * density(v = A mod 2) = S/2
        expect = mf.mean_value_progression(tbl, 200, 2, 1) / 2
        assert got.value == pytest.approx(expect, rel=1e-12)
