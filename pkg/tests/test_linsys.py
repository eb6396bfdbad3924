"""Lattice enumeration against the box-scan oracle, and correlation sums
against independent double loops."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multcorr import linsys, multfunc as mf


def box_scan_oracle(body: linsys.ConvexBody, T) -> list[tuple[int, ...]]:
    """Oracle: test every integer point of the bounding box [-T, T]^s."""
    tau = Fraction(T)
    lo, hi = math.floor(-tau), math.ceil(tau)
    pts = []

    def rec(prefix):
        if len(prefix) == body.s:
            for coeffs, off in body.halfspaces:
                if sum(c * x for c, x in zip(coeffs, prefix)) > off * tau:
                    return
            pts.append(prefix)
            return
        for v in range(lo, hi + 1):
            rec(prefix + (v,))

    rec(())
    return pts


class TestForms:
    def test_constant_only_rejected(self):
        with pytest.raises(ValueError):
            linsys.LinearForm((0, 0), 5)

    def test_evaluation_exact(self):
        f = linsys.LinearForm((3, -2), 7)
        assert f((10, 4)) == 29

    def test_duplicate_forms_rejected(self):
        with pytest.raises(ValueError, match="proportional"):
            linsys.LinearSystem(
                (linsys.LinearForm((1, 0), 0), linsys.LinearForm((2, 0), 0))
            )

    def test_shifted_pair_allowed(self):
        sys1 = linsys.LinearSystem(
            (linsys.LinearForm((1,), 0), linsys.LinearForm((1,), 2))
        )
        assert sys1.r == 2 and sys1.s == 1

    @given(st.integers(-(2**40), 2**40), st.integers(-(2**40), 2**40), st.integers(-(2**40), 2**40))
    @settings(max_examples=50, deadline=None)
    def test_no_silent_wrap_near_wide_boundary(self, a, b, c):
        # evaluation is plain python integers: never wraps
        if a == 0 and b == 0:
            return
        f = linsys.LinearForm((a, b), c)
        x, y = 2**20 + 1, -(2**20) + 3
        assert f((x, y)) == a * x + b * y + c


class TestEnumeration:
    def test_unit_box(self):
        body = linsys.box_body([(0, 1), (0, 1)])
        pts = list(linsys.enumerate_lattice(body, 3))
        assert len(pts) == 16
        assert pts == sorted(pts)  # lexicographic

    def test_simplex(self):
        body = linsys.ConvexBody(2, [((1, 1), 1), ((-1, 0), 0), ((0, -1), 0)])
        assert linsys.lattice_count(body, 2) == 6

    def test_boundary_points_included(self):
        body = linsys.box_body([(0, 1)])
        assert list(linsys.enumerate_lattice(body, 5)) == [(i,) for i in range(6)]

    def test_empty_body(self):
        body = linsys.ConvexBody(1, [((1,), Fraction(-1, 2)), ((-1,), Fraction(-1, 4))])
        # x <= -T/2 and x >= T/4: empty for T > 0
        assert list(linsys.enumerate_lattice(body, 4)) == []

    def test_random_polytopes_match_box_scan(self):
        rng = random.Random(7)
        for trial in range(25):
            s = rng.choice([1, 2, 3])
            halfspaces = []
            for _ in range(rng.randint(1, 4)):
                normal = tuple(rng.randint(-3, 3) for _ in range(s))
                if not any(normal):
                    continue
                halfspaces.append((normal, Fraction(rng.randint(1, 8), rng.randint(1, 4))))
            body = linsys.ConvexBody(s, halfspaces)
            for T in (1, 3, rng.randint(4, 15)):
                got = list(linsys.enumerate_lattice(body, T))
                assert got == box_scan_oracle(body, T), (trial, T, halfspaces)

    def test_rational_dilation(self):
        body = linsys.box_body([(0, 1)])
        got = list(linsys.enumerate_lattice(body, Fraction(7, 2)))
        assert got == [(i,) for i in range(4)]

    def test_interior_point_certificate(self):
        body = linsys.box_body([(0, 1), (0, 1)])
        x = body.interior_point()
        for coeffs, off in body.halfspaces:
            assert sum(c * v for c, v in zip(coeffs, x)) < float(off)

    def test_flat_body_has_no_interior(self):
        body = linsys.ConvexBody(2, [((1, 0), 0), ((-1, 0), 0)])  # x = 0 slab
        with pytest.raises(ValueError):
            body.interior_point()


class TestCorrelationSum:
    def test_r1_interval(self, all_one_10k):
        body = linsys.box_body([(Fraction(1, 100), 1)])
        system = linsys.LinearSystem((linsys.LinearForm((1,), 0),))
        res = linsys.correlation_sum([all_one_10k], system, body, 100)
        assert res.raw_sum == 100.0
        assert res.lattice_count == 100

    def test_product_body_counts(self, all_one_10k):
        body = linsys.box_body([(Fraction(1, 50), 1), (Fraction(1, 50), 1)])
        system = linsys.LinearSystem(
            (linsys.LinearForm((1, 0), 0), linsys.LinearForm((0, 1), 0))
        )
        res = linsys.correlation_sum([all_one_10k] * 2, system, body, 50)
        assert res.raw_sum == float(res.lattice_count) == 2500.0

    def test_r3_against_double_loop_oracle(self, two_squares_10k):
        T = 2000
        tbl = mf.build_sieve(mf.get_function("two_squares"), 2 * T)
        body = linsys.box_body([(Fraction(1, T), Fraction(1, 2))] * 2)
        system = linsys.LinearSystem(
            (
                linsys.LinearForm((1, 0), 0),
                linsys.LinearForm((0, 1), 0),
                linsys.LinearForm((1, 1), 0),
            )
        )
        res = linsys.correlation_sum([tbl] * 3, system, body, T)
        v = tbl.values
        oracle = 0.0
        for n1 in range(1, T // 2 + 1):
            for n2 in range(1, T // 2 + 1):
                oracle += v[n1] * v[n2] * v[n1 + n2]
        assert res.raw_sum == pytest.approx(oracle, rel=1e-12)

    def test_all_one_equals_lattice_count_any_system(self, all_one_10k):
        body = linsys.ConvexBody(
            2, [((1, 1), 1), ((-1, 0), Fraction(-1, 97)), ((0, -1), Fraction(-1, 97))]
        )
        system = linsys.LinearSystem(
            (linsys.LinearForm((1, 0), 0), linsys.LinearForm((1, 2), 3))
        )
        res = linsys.correlation_sum([all_one_10k] * 2, system, body, 97)
        assert res.raw_sum == float(res.lattice_count)

    def test_range_violation_carries_witness(self, all_one_10k):
        body = linsys.box_body([(0, 1)])  # includes n = 0: phi(0) = 0 < 1
        system = linsys.LinearSystem((linsys.LinearForm((1,), 0),))
        with pytest.raises(linsys.FormRangeError) as exc:
            linsys.correlation_sum([all_one_10k], system, body, 10)
        assert exc.value.form_index == 0
        assert exc.value.value == 0

    def test_affine_covariance(self, two_squares_10k):
        # translating the body by v and shifting the forms by v leaves the
        # sum unchanged, exactly
        T = 60
        v = (3, -2)
        system = linsys.LinearSystem(
            (linsys.LinearForm((1, 0), 20), linsys.LinearForm((1, 1), 35))
        )
        body = linsys.ConvexBody(
            2,
            [((1, 0), Fraction(1, 3)), ((-1, 0), Fraction(1, 4)),
             ((0, 1), Fraction(1, 3)), ((0, -1), Fraction(1, 4)),
             ((1, 1), Fraction(1, 2))],
        )
        res = linsys.correlation_sum([two_squares_10k] * 2, system, body, T)
        shifted_body = linsys.ConvexBody(
            2,
            [
                (coeffs, off + Fraction(sum(c * w for c, w in zip(coeffs, v)), T))
                for coeffs, off in body.halfspaces[:-4]  # strip auto box rows
            ]
            + [((1, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1)],
        )
        shifted_forms = tuple(f.shifted([-w for w in v]) for f in system.forms)
        shifted_system = linsys.LinearSystem(shifted_forms)
        res2 = linsys.correlation_sum([two_squares_10k] * 2, shifted_system, shifted_body, T)
        assert res2.raw_sum == res.raw_sum
        assert res2.lattice_count == res.lattice_count


class TestWTrickedCorrelation:
    def test_identity_case(self, two_squares_10k):
        body = linsys.box_body([(Fraction(1, 80), 1)])
        system = linsys.LinearSystem((linsys.LinearForm((1,), 0),))
        plain = linsys.correlation_sum([two_squares_10k], system, body, 80)
        tricked = linsys.correlation_sum_wtricked(
            [two_squares_10k], system, body, 80, [1], [0]
        )
        assert tricked.raw_sum == plain.raw_sum
        assert tricked.lattice_count == plain.lattice_count

    def test_odd_counting(self, all_one_10k):
        body = linsys.box_body([(0, 1)])
        system = linsys.LinearSystem((linsys.LinearForm((1,), 0),))
        res = linsys.correlation_sum_wtricked(
            [all_one_10k], system, body, 100, [2], [1]
        )
        # lattice points n in [0, 50], indices 2n + 1 in {1, 3, ..., 101}
        assert res.raw_sum == 51.0

    def test_r2_against_filtered_loop(self, delta_half_10k):
        T = 600
        v = delta_half_10k.values
        body = linsys.box_body([(Fraction(1, T), Fraction(1, 4))] * 2)
        system = linsys.LinearSystem(
            (linsys.LinearForm((1, 0), 0), linsys.LinearForm((1, 1), 0))
        )
        res = linsys.correlation_sum_wtricked(
            [delta_half_10k] * 2, system, body, T, [6, 6], [1, 5]
        )
        oracle = 0.0
        hi = T // 24  # dilation T/6 of the quarter box
        for n1 in range(1, hi + 1):
            for n2 in range(1, hi + 1):
                oracle += v[6 * n1 + 1] * v[6 * (n1 + n2) + 5]
        assert res.raw_sum == pytest.approx(oracle, rel=1e-12)

    def test_gcd_violation(self, all_one_10k):
        body = linsys.box_body([(Fraction(1, 50), 1)])
        system = linsys.LinearSystem((linsys.LinearForm((1,), 0),))
        with pytest.raises(ValueError, match="shares a factor"):
            linsys.correlation_sum_wtricked(
                [all_one_10k], system, body, 50, [6], [3]
            )
