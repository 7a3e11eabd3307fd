"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the lines stream; every
tolerance below is pinned, nothing is deferred to later calibration.
"""

import math
import time

import numpy as np
import pytest
from scipy.special import gammaln

from radial_toeplitz.asymptotics import predicted_law, run_counterexample, run_periphery
from radial_toeplitz.ordering import (
    BijectionPrefix, counting, dense_subsequence, reorder_share, sharpness_bijection,
)
from radial_toeplitz.quadrature import bessel_square_ball_log
from radial_toeplitz.spectra import SpaceSpec, eigenvalue, spectrum
from radial_toeplitz.specfun import bessel_l2_ball_log, power_from_bessel
from radial_toeplitz.symbols import DecayClass, decompose_signs, parse_symbol


def report(num, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_01_closed_form_spectra():
    cases = [("BergmanComplex", d, 0.5, 1.0) for d in (1, 2, 3)]
    cases += [("BergmanHarmonic", d, 0.5, 1.0) for d in (2, 3)]
    cases += [("BergmanComplex", 2, 0.7, 1.4)]
    t0 = time.perf_counter()
    worst = 0.0
    for kind, d, b, R in cases:
        sp = SpaceSpec(kind, d, R=R)
        V = parse_symbol(f"chi(0,{b:g})")
        tab = spectrum(sp, V, 500, 1e-11, with_abs_tail=False)
        expo = (2 + 2 * d) if kind == "BergmanComplex" else (2 + d)
        for e in tab.entries:
            want_log = (2 * e.k + (2 * d if kind == "BergmanComplex" else d)) \
                * math.log(b / R)
            rel = abs(e.value.log_abs - want_log) / abs(want_log)
            worst = max(worst, rel)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5.0
    report(1, ok, f"closed-form Bergman spectra, worst log-relative error "
                  f"{worst:.2e} (<=1e-9), runtime {elapsed:.2f}s (<5s)")


def test_criterion_02_normalization():
    spaces = [
        SpaceSpec("BergmanComplex", 2, R=1.0),
        SpaceSpec("BergmanHarmonic", 3, R=1.0),
        SpaceSpec("BergmanHelmholtz", 2, R=1.0),
        SpaceSpec("BargmannComplex", 1),
        SpaceSpec("BargmannHarmonic", 2),
        SpaceSpec("BargmannHelmholtz", 3),
    ]
    one = parse_symbol("1")
    worst = 0.0
    for sp in spaces:
        tab = spectrum(sp, one, 200, 1e-12, with_abs_tail=False)
        for e in tab.entries:
            worst = max(worst, abs(e.value.to_float() - 1.0))
    ok = worst <= 1e-10
    report(2, ok, f"V=1 normalization across Bergman/Bargmann kinds, worst "
                  f"|Lambda_k - 1| = {worst:.2e} (<=1e-10, k<=200)")


def test_criterion_03_bessel_identities():
    worst_ident = 0.0
    for nu in range(1, 51):
        for R in range(1, 21):
            ident = bessel_l2_ball_log(float(nu), float(R))
            quadv = bessel_square_ball_log(float(nu), float(R), tol=1e-12)
            worst_ident = max(worst_ident,
                              abs(math.exp(ident.log_abs - quadv.log_abs) - 1))
    worst_neumann = 0.0
    for m in range(0, 11):
        for r in (0.5, 1.0, 2.0, 3.0, 4.0, 5.0):
            got = power_from_bessel(m, r, 60)
            worst_neumann = max(worst_neumann, abs(got / r ** (2 * m) - 1))
    ok = worst_ident <= 1e-9 and worst_neumann <= 1e-8
    report(3, ok, f"L2-ball identity vs quadrature worst {worst_ident:.2e} "
                  f"(<=1e-9 on nu 1..50 x R 1..20); Neumann reconstruction "
                  f"worst {worst_neumann:.2e} (<=1e-8, m<=10, r<=5)")


def test_criterion_04_counting_asymptotics():
    t0 = time.perf_counter()
    sp = SpaceSpec("BergmanComplex", 2, R=1.0)
    tab = spectrum(sp, parse_symbol("chi(0,0.5)"), 80, 1e-10)
    lam = 1e-40
    n, _, _ = counting(tab, lam)
    ratio = n * math.factorial(2) * (2 * math.log(2)) ** 2 / abs(math.log(lam)) ** 2
    elapsed = time.perf_counter() - t0
    ok = 0.90 <= ratio <= 1.10 and elapsed < 10.0
    report(4, ok, f"n(1e-40) d! (2 ln 2)^2 / |log lambda|^2 = {ratio:.4f} "
                  f"(in [0.90, 1.10]), runtime {elapsed:.2f}s (<10s)")


def test_criterion_05_bargmann_slope():
    from radial_toeplitz.asymptotics import log_slope_fit
    sp = SpaceSpec("BargmannComplex", 1)
    tab = spectrum(sp, parse_symbol("chi(0,1)"), 500, 1e-10, with_abs_tail=False)
    a, _b = log_slope_fit(tab, (100, 500))
    ok = 0.9 <= a <= 1.1
    report(5, ok, f"Bargmann k log k slope over [100,500] = {a:.4f} (in [0.9, 1.1])")


def test_criterion_06_helmholtz_bergman_ratio():
    sp = SpaceSpec("BergmanHelmholtz", 2, R=2.0)
    V = parse_symbol("chi(0,1)")
    ratios = {}
    for k in range(50, 301):
        val = eigenvalue(sp, V, k, 1e-10).value
        ratios[k] = math.exp(val.log_abs - (2 * k + 2) * math.log(0.5))
    inside = all(0.5 <= r <= 2.0 for r in ratios.values())
    first = np.mean([abs(ratios[k] - 1) for k in range(50, 81)])
    last = np.mean([abs(ratios[k] - 1) for k in range(270, 301)])
    ok = inside and last < first
    report(6, ok, f"Helmholtz-Bergman ratio to (b/R)^(2k+d) in [0.5,2] on k in "
                  f"[50,300] ({min(ratios.values()):.3f}..{max(ratios.values()):.3f}), "
                  f"|ratio-1| first decade {first:.4f} -> last {last:.4f}")


def _random_mixed_symbol(rng):
    n_terms = int(rng.integers(2, 5))
    parts = []
    for i in range(n_terms):
        a = round(float(rng.uniform(0.0, 0.7)), 3)
        b = round(float(rng.uniform(a + 0.05, 0.95)), 3)
        c = round(float(rng.uniform(0.2, 3.0)), 3)
        if i % 2 == 1:
            c = -c
        body = f"chi({a:g},{b:g})"
        if rng.random() < 0.35:
            body = f"r^2*{body}"
        parts.append(f"({c:g})*{body}")
    return parse_symbol("+".join(parts))


def test_criterion_07_domination_all_spaces():
    spaces = [
        SpaceSpec("BergmanComplex", 2, R=1.0),
        SpaceSpec("BergmanHarmonic", 2, R=1.0),
        SpaceSpec("BergmanHelmholtz", 2, R=1.0),
        SpaceSpec("BargmannComplex", 1),
        SpaceSpec("BargmannHarmonic", 3),
        SpaceSpec("BargmannHelmholtz", 2),
        SpaceSpec("AgmonHormander", 2),
    ]
    rng = np.random.default_rng(7)
    tol = 1e-8
    slack = math.log1p(3 * tol)
    violations = 0
    checked = 0
    for _ in range(20):
        V = _random_mixed_symbol(rng)
        _, _, Vabs = decompose_signs(V)
        for sp in spaces:
            tabV = spectrum(sp, V, 200, tol, with_abs_tail=False)
            tabA = spectrum(sp, Vabs, 200, tol, with_abs_tail=False)
            for ev, ea in zip(tabV.entries, tabA.entries):
                checked += 1
                if ev.value.sign == 0:
                    continue
                if ev.value.log_abs > ea.value.log_abs + slack:
                    violations += 1
    ok = violations == 0
    report(7, ok, f"domination |Lambda_k(V)| <= Lambda_k(|V|)(1+3 tol): "
                  f"{violations} violations over {checked} eigenvalues "
                  f"(20 symbols x 7 spaces x k<=200)")


def test_criterion_08_reordering_combinatorics():
    rng = np.random.default_rng(8)
    N = 10_000
    share_ok = True
    for _ in range(1000):
        b = BijectionPrefix(rng.permutation(N + 1))
        for beta in (1.5, 2.0, 3.0):
            if reorder_share(b, beta, N) < (beta - 1) / beta * N - 1:
                share_ok = False
    sharp_ok = True
    sharp_detail = []
    for beta in (1.5, 2.0, 3.0):
        sb = sharpness_bijection(beta, 10 ** 5)
        ratio = reorder_share(sb, beta, 10 ** 5) / 10 ** 5
        target = (beta - 1) / beta
        sharp_detail.append(f"beta={beta:g}: {ratio:.4f}/{target:.4f}")
        if abs(ratio - target) > 0.02 * target:
            sharp_ok = False
    dense_viol = 0
    for _ in range(1000):
        n = int(rng.integers(30, 400))
        b = np.sort(rng.uniform(1e-6, 1.0, n))[::-1]
        a = (b * rng.uniform(0.05, 1.0, n))[rng.permutation(n)] * rng.choice([-1, 1], n)
        beta = float(rng.choice([1.5, 2.0, 3.0]))
        ks = dense_subsequence(a, b, beta)
        for l, k in enumerate(ks, start=1):
            if abs(a[k]) > b[int(k // beta)] or k > math.floor(beta / (beta - 1) * l) + 1:
                dense_viol += 1
    ok = share_ok and sharp_ok and dense_viol == 0
    report(8, ok, f"share bound on 1000 permutations x 3 beta: {'ok' if share_ok else 'violated'}; "
                  f"sharpness {', '.join(sharp_detail)}; dense-subsequence violations {dense_viol}")


def test_criterion_09_cancelation_experiment():
    t0 = time.perf_counter()
    rep = run_counterexample(2.0, 4.0, 300, tol=1e-8)
    elapsed = time.perf_counter() - t0
    ok = (0.45 <= rep.slope_abs <= 0.55
          and 0.675 <= rep.slope_v <= 0.90
          and rep.separation >= 0.15
          and rep.assertions["rotation_bound"]
          and elapsed < 300.0)
    report(9, ok, f"cancelation: a_|V| = {rep.slope_abs:.4f} (in [0.45,0.55]), "
                  f"a_V = {rep.slope_v:.4f} (in [0.675,0.90]), separation "
                  f"{rep.separation:.4f} (>=0.15), bound margin "
                  f"{rep.bound_margin_log:.2e} (<=0), runtime {elapsed:.1f}s (<300s)")


def test_criterion_10_periphery():
    c, b0, b1, b2 = 5.0, 0.3, 0.4, 0.8
    k0_oracle = 0
    for k in range(200):
        if b2 ** (2 * k + 2) - b1 ** (2 * k + 2) < c * b0 ** (2 * k + 2):
            k0_oracle = k + 1
    V = parse_symbol(f"chi({b1:g},{b2:g})-{c:g}*chi(0,{b0:g})")
    rep = run_periphery(V, SpaceSpec("BergmanComplex", 1, R=1.0), 215)
    k0_computed = (rep.largest_negative_k + 1) if rep.largest_negative_k is not None else 0
    ok = (k0_computed == k0_oracle and k0_oracle <= 20
          and 0.85 <= rep.ratio_at_min_lambda <= 1.15)
    report(10, ok, f"periphery: negatives vanish for k >= {k0_computed} "
                   f"(oracle {k0_oracle}, <=20); positive-spectrum ratio at "
                   f"1e-40 = {rep.ratio_at_min_lambda:.4f} (in [0.85,1.15])")


def test_criterion_11_limsup_proxy():
    cases = [
        ("chi(0,0.5)-chi(0.2,0.35)", SpaceSpec("BergmanComplex", 1, R=1.0)),
        ("chi(0.4,0.8)-5*chi(0,0.3)", SpaceSpec("BergmanComplex", 2, R=1.0)),
        ("chi(0,0.6)-0.5*chi(0.1,0.3)", SpaceSpec("BergmanHarmonic", 2, R=1.0)),
        ("2*chi(0.3,0.7)-chi(0,0.2)", SpaceSpec("BergmanHarmonic", 3, R=1.0)),
        ("chi(0,0.55)-0.8*chi(0.25,0.45)", SpaceSpec("BergmanComplex", 1, R=1.0)),
    ]
    grid = np.logspace(-40, -8, 24)
    details = []
    ok = True
    for text, sp in cases:
        V = parse_symbol(text)
        _, _, Vabs = decompose_signs(V)
        from radial_toeplitz.symbols import exact_support_radius
        b = exact_support_radius(V)
        k_max = int(46.1 / abs(math.log(b))) + 12
        tabV = spectrum(sp, V, k_max, 1e-10)
        tabA = spectrum(sp, Vabs, k_max, 1e-10)
        best = 0.0
        for lam in grid:
            nV = counting(tabV, lam)[0]
            nA = counting(tabA, lam)[0]
            if nA:
                best = max(best, nV / nA)
        details.append(f"{text}: {best:.3f}")
        if best < 0.85:
            ok = False
    report(11, ok, "max-over-grid n(lambda;V)/n(lambda;|V|) per symbol "
                   "(each >=0.85): " + "; ".join(details))
