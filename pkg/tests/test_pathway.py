import itertools
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from mldist.errors import DomainError, SeriesNonConvergence
from mldist.ml_core import MLParams, ml_pdf
from mldist.pathway import (PathwayParams, PrabhakarParams, fstar_scaled, pathway_limit_gap, pathway_norm_const,
                            pathway_pdf, pathway_regime, pathway_sample_array, prabhakar_fstar,
                            stirling_ratio, tsallis_ode_residual)
from mldist.sampling import make_stream
from mldist.verify import ks_critical, total_mass

import oracles

Q_GRID = [0.0, 0.5, 0.9, 1.0, 1.1, 1.5]


def _normalizable(eta, a, alpha, q):
    return q <= 1 or 1 / (q - 1) - (eta + 1) / alpha > 0


NORM_GRID = [c for c in itertools.product(Q_GRID, [0.0, 1.0], [0.5, 1.0], [1.0, 2.0])
             if _normalizable(c[1], c[2], c[3], c[0])]


def test_params_validation_names_condition():
    with pytest.raises(DomainError, match="a > 0"):
        PathwayParams(0, 0, 1, 0.5)
    with pytest.raises(DomainError, match="eta > -1"):
        PathwayParams(-1, 1, 1, 0.5)
    with pytest.raises(DomainError, match="not normalizable"):
        PathwayParams(1, 1, 1, 1.5)
    with pytest.raises(DomainError, match="delta > 0"):
        PrabhakarParams(0, 1, 1, 1, 0)
    assert PathwayParams(0, 1, 2, 0.5).support == (0.0, pytest.approx(math.sqrt(2)))
    assert PathwayParams(0, 1, 1, 1 + 1e-9).family == "gamma_limit"


def test_fstar_examples():
    pp = PrabhakarParams(0, 1, 1, 1, 1)
    assert prabhakar_fstar(1.0, pp).value == pytest.approx(0.3678794, abs=1e-7)
    pp = PrabhakarParams(0.5, 1.3, 0.6, 2.0, 1.0, c=2.0)
    x = 1e-20
    assert prabhakar_fstar(x, pp).value == pytest.approx(2 * x ** 0.5 / math.gamma(2.0), rel=1e-10)
    assert prabhakar_fstar(0.0, pp).value == 0.0


@pytest.mark.parametrize("alpha,beta,delta", [(0.5, 1, 1), (0.7, 2.0, 0.5), (0.3, 0.5, 2), (1.0, 1.5, 1)])
def test_fstar_reduces_to_ml_density(alpha, beta, delta):
    # the Gamma argument of the density series is alpha*beta + alpha*k
    pp = PrabhakarParams(alpha * beta - 1, beta, alpha, alpha * beta, 1 / delta, c=delta ** -beta)
    p = MLParams(alpha, beta, delta)
    for x in (0.01, 0.3, 1.0, 3.0, 12.0):
        assert prabhakar_fstar(x, pp).value == pytest.approx(ml_pdf(x, p).value, rel=1e-12)


def _stirling_mp(beta, t):
    with mp.workdps(40):
        return float(mp.gamma(beta) * mp.mpf(beta) ** t / mp.gamma(mp.mpf(beta) + t))


def test_stirling_examples():
    assert stirling_ratio(10, 0.5) == pytest.approx(_stirling_mp(10, 0.5), rel=1e-14)
    assert stirling_ratio(10, 0.5) == pytest.approx(362880 * math.sqrt(10) / math.gamma(10.5), rel=1e-14)
    assert stirling_ratio(3.3, 0.0) == 1.0
    assert stirling_ratio(1e6, 1) == pytest.approx(1.0, abs=1e-5)
    with pytest.raises(DomainError):
        stirling_ratio(1.0, -1.0)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.5])
def test_stirling_limit(t):
    betas = [10, 20, 50, 100, 1e3, 1e4, 1e6]
    r = [stirling_ratio(b, t) for b in betas]
    dist = [abs(v - 1) for v in r]
    if t == 1.0:
        # Gamma(beta) beta / Gamma(beta + 1) is identically one
        assert max(dist) < 1e-14
    else:
        assert all(b < a for a, b in zip(dist, dist[1:]))
    assert dist[-1] < 1e-4
    for b, v in zip(betas, r):
        assert v == pytest.approx(_stirling_mp(b, t), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(beta=st.floats(0.1, 1e4), t=st.floats(-0.09, 5))
def test_stirling_matches_mpmath(beta, t):
    assert stirling_ratio(beta, t) == pytest.approx(_stirling_mp(beta, t), rel=1e-10)


def test_norm_const_examples():
    assert pathway_norm_const(PathwayParams(0, 1, 1, 1.0)) == pytest.approx(1.0, rel=1e-15)
    assert pathway_norm_const(PathwayParams(0, 1, 1, 1.5)) == pytest.approx(0.5, rel=1e-14)
    assert pathway_norm_const(PathwayParams(0, 1, 1, 0.0)) == pytest.approx(2.0, rel=1e-14)


def test_pdf_examples():
    assert pathway_pdf(0.0, PathwayParams(0, 1, 1, 1.0)) == pytest.approx(1.0)
    assert pathway_pdf(0.0, PathwayParams(0, 1, 1, 1.5)) == pytest.approx(0.5)
    assert pathway_pdf(0.5, PathwayParams(0, 1, 1, 0.0)) == pytest.approx(1.0)
    assert pathway_pdf(1.5, PathwayParams(0, 1, 1, 0.0)) == 0.0
    with pytest.raises(DomainError):
        pathway_pdf(-0.1, PathwayParams(0, 1, 1, 0.0))


@pytest.mark.parametrize("q,eta,a,alpha", NORM_GRID)
def test_normalization(q, eta, a, alpha):
    pw = PathwayParams(eta, a, alpha, q)
    assert total_mass(lambda x: pathway_pdf(x, pw), pw.support) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("q,eta,a,alpha", NORM_GRID)
def test_norm_const_against_plain_quadrature(q, eta, a, alpha):
    # unnormalized kernel integrated directly, not through the package
    hi = (a * (1 - q)) ** (-1 / alpha) if q < 1 else np.inf
    if q < 1:
        k = lambda x: x ** eta * max(1 - a * (1 - q) * x ** alpha, 0) ** (1 / (1 - q))
    elif q > 1:
        k = lambda x: x ** eta * (1 + a * (q - 1) * x ** alpha) ** (-1 / (q - 1))
    else:
        k = lambda x: x ** eta * math.exp(-a * x ** alpha)
    mid = min(1.0, hi / 2)
    i1 = integrate.quad(k, 0, mid, epsabs=0, epsrel=1e-13, limit=200)[0]
    i2 = integrate.quad(k, mid, hi, epsabs=0, epsrel=1e-13, limit=200)[0]
    assert pathway_norm_const(PathwayParams(eta, a, alpha, q)) == pytest.approx(1 / (i1 + i2), rel=1e-10)


def _sup_gap(q, xs):
    ref = PathwayParams(0, 1, 1, 1.0)
    pw = PathwayParams(0, 1, 1, q)
    return max(abs(pathway_pdf(x, pw) - pathway_pdf(x, ref)) for x in xs)


@pytest.mark.parametrize("qs", [[1.2, 1.1, 1.05, 1.01], [0.8, 0.9, 0.95, 0.99]])
def test_q_continuity(qs):
    xs = np.linspace(0, 10, 2001)
    gaps = [_sup_gap(q, xs) for q in qs]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.02


def test_regime_examples():
    r = pathway_regime(PathwayParams(0, 1, 1, 1.5))
    assert (r.family, r.tsallis, r.superstatistics) == ("type2", True, True)
    r = pathway_regime(PathwayParams(0, 1, 1, 0.5))
    assert (r.family, r.tsallis, r.superstatistics) == ("type1", True, False)
    r = pathway_regime(PathwayParams(2, 3, 2, 1.0))
    assert (r.family, r.tsallis, r.superstatistics) == ("gamma_limit", False, False)
    r = pathway_regime(PathwayParams(0, 1, 1, 1.0))
    assert r.superstatistics


@pytest.mark.parametrize("q", [0.5, 1 - 1e-8, 1 + 1e-8, 2.0])
def test_ode_residual(q):
    for x in np.linspace(0.1, 3.0, 30):
        if q < 1 and x > 1 / (1 - q):
            continue
        assert abs(tsallis_ode_residual(x, q)) < 1e-10


def test_ode_examples_and_support():
    assert tsallis_ode_residual(0.5, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert tsallis_ode_residual(1.0, 2.0) == pytest.approx(0.0, abs=1e-15)
    assert tsallis_ode_residual(1.0, 1.0) == 0.0
    with pytest.raises(DomainError, match="support"):
        tsallis_ode_residual(3.0, 0.5)


def _gap_mp(beta, grid, gamma=2.0):
    # Gamma(beta) f*(beta x) with f* summed in extended precision
    worst = 0.0
    for x in grid:
        if x == 0:
            continue
        lhs = math.gamma(beta) * oracles.e3_series(beta * x, 1.0, beta, gamma)
        worst = max(worst, abs(lhs - (1 + x) ** -gamma))
    return worst


def test_limit_gap_decreasing():
    pp = PrabhakarParams(0, 2, 1, 1, 1)
    grid = np.linspace(0, 5, 51)
    gaps = [pathway_limit_gap(b, pp, grid) for b in (5, 10, 20, 40)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    for b, g in zip((5, 10, 20), gaps):
        assert g == pytest.approx(_gap_mp(b, grid), rel=1e-8)


def test_limit_gap_boundary_cases():
    pp = PrabhakarParams(1.0, 1, 1, 1, 1)
    assert pathway_limit_gap(5.0, pp, [0.0]) == 0.0
    with pytest.raises(DomainError):
        pathway_limit_gap(5.0, pp, [-1.0])
    with pytest.raises(DomainError):
        pathway_limit_gap(0.0, pp, [1.0])


@pytest.mark.parametrize("q", [0.5, 1.0, 1.5])
def test_sampler_matches_density(q):
    pw = PathwayParams(0.5, 1.0, 2.0, q)
    x = pathway_sample_array(make_stream(30), pw, 20_000)
    cdf = lambda t: min(1.0, total_mass(lambda u: pathway_pdf(u, pw), (0.0, float(t)))) if t > 0 else 0.0
    xs = np.sort(x)[::50]
    F = np.array([cdf(t) for t in xs])
    ecdf = (np.arange(xs.size) * 50 + 1) / x.size
    assert np.max(np.abs(F - ecdf)) < ks_critical(x.size)


def test_fstar_scaled_large_beta_reaches_limit():
    pp = PrabhakarParams(0.5, 2, 1, 1, 0.5, c=3.0)
    for x in (0.2, 1.0, 4.0):
        target = 3.0 * x ** 0.5 * (1 + 0.5 * x) ** -2
        errs = [abs(fstar_scaled(x, b, pp).value - target) for b in (50, 500, 2000)]
        assert errs[2] < errs[1] < errs[0] and errs[2] < 1e-2 * target
    with pytest.raises(DomainError):
        fstar_scaled(0.0, 10, pp)
    # the Kummer sum needs about z = delta beta x terms; the policy cap is reported, not hidden
    with pytest.raises(SeriesNonConvergence):
        fstar_scaled(4.0, 5000, pp)
