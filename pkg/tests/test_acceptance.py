"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""

import io
import itertools
import math
import os
import time

import numpy as np
import pytest

from mldist.cli import run_cli
from mldist.ml_core import MLParams, ml_laplace, ml_mellin, ml_pdf, mellin_strip
from mldist.pathway import (PathwayParams, PrabhakarParams, pathway_limit_gap, pathway_pdf,
                            stirling_ratio, tsallis_ode_residual)
from mldist.sampling import gamma_power_mellin, make_stream, ml_sample_array, ml_sample_via_stable_mean_array
from mldist.stable_levy import levy_mellin, levy_pdf
from mldist.tables import parse_csv
from mldist.verify import (TransformProbe, clt_convergence_report, empirical_laplace, ks_critical,
                           ks_statistic, ks_two_sample, levy_limit_report, ml_cdf_table, total_mass,
                           transform_oracle)

import oracles

GRID = list(itertools.product([0.3, 0.5, 0.7, 1.0], [0.5, 1.0, 2.0], [0.5, 1.0, 2.0]))
HALF = MLParams(0.5, 1.0, 1.0)
GOLDEN = os.path.join(os.path.dirname(__file__), "golden")

# frozen before use: the exact finite-beta bias sup|F_ML(0.5, 100, 0.01) - F_Levy|
# is 0.00456 and the sampled KS at N = 1e5 was 0.0055
LEVY_LIMIT_KS = 0.02


def test_criterion_1_normalization(criterion):
    t0 = time.perf_counter()
    worst = max(abs(total_mass(lambda x: ml_pdf(x, MLParams(*c))) - 1) for c in GRID)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and dt < 30
    assert criterion(1, ok, f"worst |mass - 1| = {worst:.2e} over 36 sets (tol 1e-6) in {dt:.1f}s")


def test_criterion_2_transform_identities(criterion):
    t0 = time.perf_counter()
    s_lap = (0.1, 0.5, 1.0, 2.0)
    worst_l = worst_m = 0.0
    for c in GRID:
        p = MLParams(*c)
        f = lambda x: ml_pdf(x, p)
        lap = transform_oracle(f, TransformProbe(s_lap))
        worst_l = max(worst_l, max(abs(v - ml_laplace(s, p)) for s, v in zip(s_lap, lap)))
        lo, hi = mellin_strip(p)
        s_mel = tuple(lo + (hi - lo) * t for t in (0.2, 0.4, 0.6, 0.8))
        mel = transform_oracle(f, TransformProbe(s_mel, "mellin", (lo, hi)))
        worst_m = max(worst_m, max(abs(v - ml_mellin(s, p)) for s, v in zip(s_mel, mel)))
    dt = time.perf_counter() - t0
    ok = worst_l <= 1e-8 and worst_m <= 1e-7 and dt < 60
    assert criterion(2, ok, f"laplace {worst_l:.2e} (tol 1e-8), mellin {worst_m:.2e} (tol 1e-7) in {dt:.1f}s")


def test_criterion_3_factorization(criterion):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(20):
        a, b, d = rng.uniform(0.1, 0.95), rng.uniform(0.2, 4), rng.uniform(0.2, 4)
        p = MLParams(a, b, d)
        lo, hi = mellin_strip(p)
        s = lo + (hi - lo) * rng.uniform(0.05, 0.95)
        prod = levy_mellin(s, a) * gamma_power_mellin(s, b, d, a)
        worst = max(worst, abs(ml_mellin(s, p) / prod - 1))
    assert criterion(3, worst <= 1e-12, f"worst relative mismatch {worst:.2e} at 20 pairs (tol 1e-12)")


def test_criterion_4_half_order_anchor(criterion):
    pdf = levy_pdf(2.0, 0.5).value
    mel = levy_mellin(0.5, 0.5)
    closed_pdf = oracles.levy_pdf_half(2.0)
    closed_mel = 2 / math.sqrt(math.pi)
    ok = (abs(pdf - 0.088016) <= 1e-6 and abs(pdf - closed_pdf) <= 1e-6
          and abs(mel - closed_mel) <= 1e-9 and round(mel, 7) == 1.1283792)
    assert criterion(4, ok, f"levy_pdf(2, 0.5) = {pdf:.9f} vs closed form {closed_pdf:.9f}; "
                            f"levy_mellin(0.5, 0.5) = {mel:.12f} vs 2/sqrt(pi) {closed_mel:.12f}")


def test_criterion_5_structural_sampler(criterion):
    x = ml_sample_array(make_stream(2024, 5), HALF, 1_000_000)
    s = (0.25, 0.5, 1.0, 2.0)
    emp = empirical_laplace(x, TransformProbe(s))
    z = [abs(m - (1 + si ** 0.5) ** -1) / se for si, (m, se) in zip(s, emp)]
    y = ml_sample_array(make_stream(2024, 6), HALF, 100_000)
    d = ks_statistic(y, ml_cdf_table(HALF, y))
    ok = max(z) < 3 and d < ks_critical(y.size)
    assert criterion(5, ok, f"max |z| = {max(z):.2f} (< 3) at N=1e6; KS = {d:.5f} "
                            f"(< {ks_critical(y.size):.5f}) at N=1e5")


def _two_sample(seed, size):
    a = ml_sample_via_stable_mean_array(make_stream(seed, 60), HALF, 5, size)
    b = ml_sample_array(make_stream(seed, 61), HALF, size)
    return ks_two_sample(a, b), ks_critical(size, size)


def test_criterion_6_stability(criterion):
    t0 = time.perf_counter()
    passes = sum(d < c for d, c in (_two_sample(seed, 10_000) for seed in range(100)))
    fast = time.perf_counter() - t0
    d, c = _two_sample(1000, 100_000)
    ok = passes >= 95 and d < c and fast < 180
    assert criterion(6, ok, f"{passes}/100 seeds pass at N=1e4 (need 95) in {fast:.1f}s; "
                            f"full N=1e5 KS = {d:.5f} (< {c:.5f})")


def test_criterion_7_clt_report(criterion):
    r = clt_convergence_report(HALF, [1, 10, 100], TransformProbe((1.0,)), mc_size=100_000, seed=7)
    vals = r.analytic_values[0]
    dev = max(abs(v - t) for v, t in zip(vals, (0.5, 0.3855433, 0.3697112)))
    z = max(abs(e - a) / se for e, a, se in zip(r.empirical[0], vals, r.stderr[0]))
    ok = dev <= 1e-7 and r.strictly_decreasing and abs(r.limit_values[0] - 0.3678794) <= 1e-7 and z < 4
    assert criterion(7, ok, f"analytic max deviation {dev:.1e} (tol 1e-7); gap strictly decreasing "
                            f"{r.strictly_decreasing}; MC max |z| = {z:.2f} (< 4)")


def test_criterion_8_levy_limit(criterion):
    r = levy_limit_report(HALF, [1, 10, 100], TransformProbe((0.5, 1.0, 2.0)))
    mc = levy_limit_report(HALF, [100], TransformProbe((1.0,)), mc_size=100_000, seed=8)
    ks = mc.empirical_ks[0]
    ok = r.strictly_decreasing and ks < LEVY_LIMIT_KS
    assert criterion(8, ok, f"gap strictly decreasing {r.strictly_decreasing}; KS at beta=100 = {ks:.4f} "
                            f"(< {LEVY_LIMIT_KS})")


def _pathway_checks():
    out = {}
    worst = 0.0
    for q, eta, a, al in itertools.product([0.0, 0.5, 0.9, 1.0, 1.1, 1.5], [0.0, 1.0], [0.5, 1.0], [1.0, 2.0]):
        if q > 1 and not 1 / (q - 1) - (eta + 1) / al > 0:
            continue
        pw = PathwayParams(eta, a, al, q)
        worst = max(worst, abs(total_mass(lambda x: pathway_pdf(x, pw), pw.support) - 1))
    out["normalization"] = (worst <= 1e-8, f"norm {worst:.1e}")
    res = max(abs(tsallis_ode_residual(x, q)) for q in (0.5, 1 - 1e-8, 1 + 1e-8, 2.0)
              for x in np.linspace(0.1, 3.0, 30) if not (q < 1 and x > 1 / (1 - q)))
    out["ode"] = (res < 1e-10, f"ode {res:.1e}")
    xs = np.linspace(0, 10, 2001)
    ref = PathwayParams(0, 1, 1, 1.0)
    gap = max(max(abs(pathway_pdf(x, PathwayParams(0, 1, 1, q)) - pathway_pdf(x, ref)) for x in xs)
              for q in (0.99, 1.01))
    out["q_limit"] = (gap < 0.02, f"q-gap {gap:.4f}")
    pp = PrabhakarParams(0, 2, 1, 1, 1)
    gaps = [pathway_limit_gap(b, pp, np.linspace(0, 5, 51)) for b in (5, 10, 20, 40)]
    out["limit_gap"] = (all(b < a for a, b in zip(gaps, gaps[1:])), "limit gaps " + ",".join(f"{g:.2e}" for g in gaps))
    st = stirling_ratio(10, 0.5)
    out["stirling"] = (abs(st - 1.012583) <= 1e-6, f"stirling {st:.10f} vs listed 1.012583")
    return out


@pytest.mark.xfail(strict=True, reason="the listed stirling_ratio(10, 0.5) = 1.012583 disagrees with "
                                       "Gamma(10) sqrt(10) / Gamma(10.5) = 1.0125731934 by 1e-5; "
                                       "every other sub-check passes")
def test_criterion_9_pathway_suite(criterion):
    t0 = time.perf_counter()
    checks = _pathway_checks()
    dt = time.perf_counter() - t0
    failed = [k for k, (ok, _) in checks.items() if not ok]
    detail = "; ".join(d for _, d in checks.values()) + f"; failed: {','.join(failed) or 'none'} in {dt:.1f}s"
    assert criterion(9, not failed and dt < 60, detail)


def _cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def test_criterion_10_cli_determinism(criterion):
    t0 = time.perf_counter()
    cases = [
        ("pdf --alpha 1 --beta 1 --delta 1 --x 0.5", 0, "pdf_exponential.csv", 1),
        ("pdf --alpha 1.5 --beta 1 --delta 1 --x 1", 2, "pdf_bad_alpha.err", 2),
        ("limit-clt --alpha 0.5 --beta 1 --delta 1 --s 1 --n 1,10,100", 0, "limit_clt.csv", 1),
    ]
    ok = True
    for argv, code, name, stream in cases:
        first, second = _cli(argv.split()), _cli(argv.split())
        with open(os.path.join(GOLDEN, name)) as fh:
            gold = fh.read()
        ok &= first == second and first[0] == code and first[stream] == gold
    rows = parse_csv(_cli(cases[0][0].split())[1])[2]
    ok &= rows[0][1] == ml_pdf(0.5, MLParams(1, 1, 1)).value
    rows = parse_csv(_cli(cases[2][0].split())[1])[2]
    lib = clt_convergence_report(HALF, [1, 10, 100], TransformProbe((1.0,)))
    ok &= rows == lib.rows()
    dt = time.perf_counter() - t0
    ok &= dt < 10
    assert criterion(10, ok, f"three golden outputs byte-identical across two runs, round-trip equal, in {dt:.1f}s")
