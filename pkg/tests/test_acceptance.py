"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Exact identities are held to 1e-9 relative; order-of-magnitude experiments
assert the stated brackets and trends.  The final test drives the entire
config directory through the CLI and enforces the wall-clock budget.
"""

import math
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from multcorr import charsum as cs
from multcorr import linsys, localdensity as ld
from multcorr import majorant as mj
from multcorr import multfunc as mf
from multcorr import wtrick

ROOT = Path(__file__).resolve().parent.parent


def report(ok: bool, label: str):
    print(f"{'PASS' if ok else 'FAIL'} {label}")
    assert ok, label


def line(coeffs, const=0):
    return linsys.LinearForm(tuple(coeffs), const)


# ---------------------------------------------------------------------------
# 1. Exact identities
# ---------------------------------------------------------------------------


def test_criterion_1a_partition_reproduces_correlation():
    T = 10_000
    f = mf.get_function("two_squares")
    tbl = mf.build_sieve(f, 2 * T + 2)
    ctx = wtrick.make_wcontext(T)
    body = linsys.box_body(
        [(Fraction(1, T), Fraction(1, 2)), (Fraction(1, T), Fraction(1, 2))]
    )
    worst = 0.0
    for shift in (1, 2):  # phi_2 = n_2 + 1 and the +2 variant
        system = linsys.LinearSystem((line((1, 0)), line((0, 1), shift)))
        rep = wtrick.exact_smooth_partition([tbl, tbl], system, body, T, ctx)
        worst = max(worst, rep.relative_residual)
    report(
        worst <= 1e-9,
        f"criterion 1a: smooth partition == correlation at T=1e4 "
        f"(worst relative residual {worst:.2e})",
    )


def test_criterion_1b_restricted_identity_random_tuples():
    rng = random.Random(0)
    names = ["all_one", "two_squares", "delta_omega:0.5"]
    tables = {n: mf.build_sieve(mf.get_function(n), 10_000) for n in names}
    worst = 0.0
    for _ in range(20):
        name = rng.choice(names)
        w_tilde = rng.choice([2, 4, 6])
        q0 = rng.randint(1, 7)
        q = q0 * w_tilde
        y = rng.randint(max(200, 4 * q), 10_000)
        A = rng.choice([a for a in range(1, q) if math.gcd(a, q) == 1])
        chk = cs.progression_difference_identity(tables[name], y, q0, w_tilde, A)
        worst = max(worst, chk.residual)
    report(
        worst <= 1e-9,
        f"criterion 1b: 20 random restricted-character identities "
        f"(worst residual {worst:.2e})",
    )


def test_criterion_1c_alpha_multiplicativity_exhaustive():
    rng = random.Random(1)
    checked = 0
    while checked < 25:
        s = rng.randint(1, 2)
        r = rng.randint(1, 2)
        forms = []
        while len(forms) < r:
            coeffs = tuple(rng.randint(-3, 3) for _ in range(s))
            if not any(coeffs):
                continue
            cand = line(coeffs, rng.randint(-3, 3))
            try:
                linsys.LinearSystem(tuple(forms) + (cand,))
            except ValueError:
                continue
            forms.append(cand)
        system = linsys.LinearSystem(tuple(forms))
        moduli = [rng.choice([2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 20]) for _ in range(r)]
        L = math.lcm(*moduli)
        if L > 300:
            continue
        got = ld.composite_divisor_density(system, moduli)
        # exhaustive residue scan over (Z/L)^s
        grids = np.indices((L,) * s).reshape(s, -1)
        mask = np.ones(grids.shape[1], dtype=bool)
        for f, m in zip(system.forms, moduli):
            vals = f.constant * np.ones(grids.shape[1], dtype=np.int64)
            for c, g in zip(f.coeffs, grids):
                vals += c * g
            mask &= np.mod(vals, m) == 0
        direct = Fraction(int(np.count_nonzero(mask)), L**s)
        assert got == direct, (system, moduli)
        # per-prime product equals the composite value
        prod = Fraction(1)
        for p, _ in ld.factorize(L):
            exps = []
            for m in moduli:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                exps.append(e)
            prod *= ld.prime_power_divisor_density(system, p, exps)
        assert prod == got
        checked += 1
    report(True, "criterion 1c: 25 random systems, density == exhaustive scan, exact")


# ---------------------------------------------------------------------------
# 2. Closed-form / oracle equivalences
# ---------------------------------------------------------------------------


def test_criterion_2a_local_factor_closed_form():
    f = mf.get_function("all_one")
    system = linsys.LinearSystem((line((1,)),))
    a_max = 6
    for p in (2, 3, 5, 7):
        ef = ld.euler_factor(system, [f], p, a_max, exact=True)
        closed = (1 - Fraction(1, p ** (a_max + 1))) / (1 + Fraction(1, p))
        assert ef.exact_value == closed, p
    report(True, "criterion 2a: local factor matches (1+1/p)^-1 closed form, exact rational")


def test_criterion_2b_tau_values_and_divisor_bound():
    tau = mf.tau_coefficients(10_000, check_bound=True)  # bound asserted inside
    ok = tau[1] == -24 and tau[5] == tau[1] * tau[2]
    report(
        ok,
        "criterion 2b: tau(2) = -24, tau(6) = tau(2) tau(3), divisor bound exact to 1e4",
    )


def test_criterion_2c_distribution_mean():
    err = abs(mf.sato_tate_mean() - 8 / (3 * math.pi))
    ok = err < 1e-6 and mf.sato_tate_mu(0.0) == 0.0 and mf.sato_tate_mu(2.0) == 1.0
    report(ok, f"criterion 2c: semicircle mean = 8/(3 pi) within 1e-6 (err {err:.2e})")


# ---------------------------------------------------------------------------
# 3. Majorant properties
# ---------------------------------------------------------------------------


def _domination_ratios(name: str, grids=(10_000, 100_000)):
    f = mf.get_function(name)
    split = mj.sharp_flat_split(f)
    prm = mj.MajorantParams(T=10**6, gamma=0.25)
    size = grids[-1]
    g_tbl = mf.build_sieve(split.residue, size)
    flat_tbl = mf.build_sieve(split.flat, size)
    h_tbl = mf.build_sieve(f, size)
    exc = mj.exceptional_table(prm, size)
    nu = mj.nu_sharp_table(prm, split, g_tbl, size, exceptional=exc) * mj.nu_flat_table(
        10**6, prm, split, flat_tbl, size
    )
    out = []
    for g in grids:
        habs = np.abs(h_tbl.values[1 : g + 1])
        live = (~exc[1 : g + 1]) & (habs > 0)
        out.append(float(np.max(habs[live] / nu[1 : g + 1][live])))
    return out


@pytest.mark.parametrize("name", ["two_squares", "delta_omega:0.5", "abs_lambda_delta"])
def test_criterion_3a_domination_constant_stable(name):
    ratios = _domination_ratios(name)
    finite = all(math.isfinite(r) and r > 0 for r in ratios)
    vary = max(ratios) / min(ratios) if finite else math.inf
    report(
        finite and vary < 2.0,
        f"criterion 3a[{name}]: domination constant finite, varies {vary:.3f}x "
        f"< 2x between 1e4 and 1e5 grids (values {['%.3g' % r for r in ratios]})",
    )


def test_criterion_3b_exceptional_densities():
    c1 = 20.0
    fitted = 0.0
    densities = {}
    for T in (10**4, 10**5, 10**6):
        prm = mj.MajorantParams(T=T, gamma=0.25, C1=c1)
        d = float(np.mean(mj.exceptional_table(prm, T)[1:]))
        densities[T] = d
        fitted = max(fitted, d * math.log(T) ** (c1 / 2))
    envelope = fitted * math.log(10**6) ** (-c1 / 2)
    ok1 = densities[10**6] <= envelope + 1e-12
    density, bound = wtrick.exceptional_density(10**6, 2.0)
    ok2 = 0 < density <= bound
    report(
        ok1 and ok2,
        f"criterion 3b: huge-power density {densities[10 ** 6]:.4f} within fitted "
        f"envelope {envelope:.4f}; square-divisor density {density:.3e} <= "
        f"zeta-tail bound {bound:.3e}",
    )


def test_criterion_3c_average_order_bounded():
    for name in ("two_squares", "delta_omega:0.5"):
        f = mf.get_function(name)
        split = mj.sharp_flat_split(f)
        lowers, uppers = [], []
        for T in (10**4, 10**5, 10**6):
            prm = mj.MajorantParams(T=T, gamma=0.4)
            ctx = wtrick.make_wcontext(T)
            g_tbl = mf.build_sieve(split.residue, T)
            flat_tbl = mf.build_sieve(split.flat, T)
            h_tbl = mf.build_sieve(f, T)
            nu = mj.nu_sharp_table(prm, split, g_tbl, T) * mj.nu_flat_table(
                T, prm, split, flat_tbl, T
            )
            rep = mj.average_order_report(h_tbl, nu, ctx, T, 1)
            lowers.append(rep.ratio_lower)
            uppers.append(rep.ratio_upper)
        spread_lo = max(lowers) / min(lowers)
        spread_up = max(uppers) / min(uppers)
        report(
            spread_lo <= 3.0 and spread_up <= 3.0,
            f"criterion 3c[{name}]: average-order ratios within 3x across "
            f"{{1e4,1e5,1e6}} (spreads {spread_lo:.3f}, {spread_up:.3f})",
        )


# ---------------------------------------------------------------------------
# 4. Convergence-trend experiments
# ---------------------------------------------------------------------------


def test_criterion_4a_linear_forms_ratio():
    t0 = time.perf_counter()
    f = mf.get_function("two_squares")
    split = mj.sharp_flat_split(f)
    system = linsys.LinearSystem((line((1, 0)), line((0, 1)), line((1, 1))))
    body = linsys.box_body(
        [(Fraction(1, 1000), Fraction(1, 2)), (Fraction(1, 1000), Fraction(1, 2))]
    )
    gaps = {}
    ratios = {}
    for T in (1000, 10_000, 30_000):
        prm = mj.MajorantParams(T=T, gamma=0.45)
        bound = 2 * T + 1
        g_tbl = mf.build_sieve(split.residue, bound)
        flat_tbl = mf.build_sieve(split.flat, bound)
        nu = mj.nu_sharp_table(prm, split, g_tbl, bound) * mj.nu_flat_table(
            T, prm, split, flat_tbl, bound
        )
        nu_tbl = mf.SieveTable(T=bound, spf=g_tbl.spf, values=nu, function=None)
        res = mj.linear_forms_ratio([nu_tbl] * 3, system, body, T, [1, 1, 1], [0, 0, 0])
        ratios[T] = res.ratio
        gaps[T] = abs(res.ratio - 1.0)
    elapsed = time.perf_counter() - t0
    ok = (
        1 / 3 <= ratios[30_000] <= 3
        and gaps[10_000] < gaps[1000]
        and gaps[30_000] < gaps[1000]
        and elapsed <= 300
    )
    report(
        ok,
        f"criterion 4a: factorization ratio {ratios[30_000]:.4f} in [1/3,3] at "
        f"T=3e4, each step closer to 1 than at T=1e3 "
        f"(gaps {gaps[1000]:.3f} -> {gaps[10_000]:.3f}, {gaps[30_000]:.3f}; "
        f"{elapsed:.0f}s <= 300s)",
    )


def test_criterion_4b_corollary_prediction_ratio():
    f = mf.get_function("two_squares")
    system = linsys.LinearSystem((line((1,)), line((1,), 2)))
    body = linsys.ConvexBody(1, [((1,), 1), ((-1,), Fraction(-1, 1000))])
    ratios = []
    for T in (1000, 10_000, 100_000):
        tbl = mf.build_sieve(f, T + 2)
        emp = linsys.correlation_sum([tbl, tbl], system, body, T)
        rep = ld.corollary_prediction(
            system, [f, f], [tbl, tbl], body, T, max_exp=6, prime_cutoff=5
        )
        ratios.append(emp.raw_sum / rep.prediction)
    drifts = [abs(b - a) for a, b in zip(ratios, ratios[1:])]
    ok = 1 / 3 <= ratios[-1] <= 3 and drifts[1] < drifts[0]
    report(
        ok,
        f"criterion 4b: empirical/predicted {['%.4f' % r for r in ratios]} in "
        f"[1/3,3] at T=1e5 with shrinking drift ({drifts[0]:.4f} -> {drifts[1]:.4f})",
    )


def test_criterion_4c_stability_and_major_arc_trends():
    for name in ("two_squares", "delta_omega:0.5"):
        f = mf.get_function(name)
        tbl = mf.build_sieve(f, 10**6)
        stab, arcs = [], []
        for x in (10**4, 10**5, 10**6):
            ctx = wtrick.make_wcontext(x)
            stab.append(wtrick.stability_scan(tbl, x, 3.0, 3, 1).max_normalized)
            arcs.append(
                cs.major_arc_probe(tbl, x, 3, ctx.W_tilde, 1, 2.0, wctx=ctx).max_normalized
            )
        ok = all(b < a for a, b in zip(stab, stab[1:])) and all(
            b < a for a, b in zip(arcs, arcs[1:])
        )
        report(
            ok,
            f"criterion 4c[{name}]: stability {['%.3f' % v for v in stab]} and "
            f"major-arc {['%.3f' % v for v in arcs]} decreasing over x grid",
        )


# ---------------------------------------------------------------------------
# 5. Full primary suite through the CLI
# ---------------------------------------------------------------------------


def test_criterion_5_full_suite_via_cli(tmp_path):
    config_dir = ROOT / "configs" / "acceptance"
    configs = sorted(config_dir.glob("*.cfg"))
    assert configs, "no acceptance configs found"
    total = 0.0
    for cfg in configs:
        kind = cfg.stem.split("__")[0]
        t0 = time.perf_counter()
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "multcorr",
                kind,
                "--config",
                str(cfg),
                "--out",
                str(tmp_path / cfg.stem),
            ],
            capture_output=True,
            text=True,
            cwd=str(ROOT),
            env={"PYTHONPATH": str(ROOT / "src"), "PATH": "/usr/bin:/bin"},
        )
        dt = time.perf_counter() - t0
        total += dt
        print(f"  {cfg.name}: exit={proc.returncode} {dt:.1f}s")
        assert proc.returncode == 0, (cfg.name, proc.stdout[-2000:], proc.stderr[-2000:])
    report(
        total <= 1800,
        f"criterion 5: full suite of {len(configs)} configs exits 0 in "
        f"{total:.0f}s <= 1800s",
    )
