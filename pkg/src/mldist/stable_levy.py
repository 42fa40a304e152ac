"""Positive (one-sided) stable law with Laplace transform exp(-s^alpha).

Density, distribution function and sampler all derive from the Zolotarev
kernel

    A(phi) = sin(alpha phi)^(alpha/(1-alpha)) sin((1-alpha) phi) / sin(phi)^(1/(1-alpha)),

on (0, pi), for which

    F(u) = 1/pi int_0^pi exp(-A(phi) u^(-alpha/(1-alpha))) dphi

and the Kanter variate (A(phi)/E)^((1-alpha)/alpha), phi ~ U(0, pi), E ~ Exp(1),
has exactly this law.  For u >= 1.2 the density is instead summed from the
residue series

    g(u) = alpha u^(-1-alpha) sum_nu (-1)^nu / nu! u^(-alpha nu) / Gamma(1 - alpha - alpha nu).

The factor ``alpha`` in front comes from the residue of Gamma(1 + 1/alpha - s/alpha)
in s; without it the series is too large by 1/alpha (at alpha = 1/2, u = 2 it
would give 0.176033 instead of 0.088016).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NumericalError, QuadratureError
from .series import DEFAULT_POLICY, EPS, EvalResult, SeriesPolicy, direct_series, log_recip_gamma

SERIES_THRESHOLD = 1.2


@dataclass(frozen=True)
class StableParams:
    """Index alpha of the positive stable law; alpha = 1 is the point mass at 1."""

    alpha: float

    def __post_init__(self):
        a = self.alpha
        if not (isinstance(a, (int, float, np.floating, np.integer)) and math.isfinite(a)):
            raise DomainError(f"alpha must be a finite real number, got {a!r}")
        if not 0 < a <= 1:
            raise DomainError(f"alpha={a} violates 0 < alpha <= 1")

    def echo(self) -> str:
        return f"alpha={self.alpha!r}"


def _as_params(sp) -> StableParams:
    return sp if isinstance(sp, StableParams) else StableParams(float(sp))


def levy_laplace(s: float, sp) -> float:
    """exp(-s^alpha)."""
    sp = _as_params(sp)
    s = float(s)
    if not s >= 0:
        raise DomainError(f"Laplace argument must be s >= 0, got {s}")
    return math.exp(-(s ** sp.alpha))


def levy_mellin(s: float, sp) -> float:
    """E(u^(s-1)) = Gamma(1 + (1-s)/alpha) / Gamma(2-s), finite for s < 1 + alpha."""
    sp = _as_params(sp)
    s = float(s)
    if not s < 1 + sp.alpha:
        raise DomainError(f"s={s} violates s < 1 + alpha = {1 + sp.alpha}: moment diverges")
    return math.exp(math.lgamma(1.0 + (1.0 - s) / sp.alpha) - math.lgamma(2.0 - s))


def zolotarev_kernel(phi, alpha: float):
    """A(phi) for 0 < alpha < 1, vectorized; A(0) is the continuous limit."""
    if not 0 < alpha < 1:
        raise DomainError(f"Zolotarev kernel requires 0 < alpha < 1, got {alpha}")
    phi = np.asarray(phi, dtype=float)
    p = 1.0 / (1.0 - alpha)
    at_zero = phi == 0
    ph = np.where(at_zero, 1.0, phi)
    with np.errstate(divide="ignore"):
        log_a = ((p - 1.0) * np.log(np.sin(alpha * ph)) + np.log(np.sin((1.0 - alpha) * ph))
                 - p * np.log(np.sin(ph)))
    limit = (p - 1.0) * math.log(alpha) + math.log(1.0 - alpha)
    out = np.exp(np.where(at_zero, limit, log_a))
    return out if out.ndim else float(out)


def _kernel_floor(alpha: float) -> float:
    return zolotarev_kernel(0.0, alpha)


def _zolotarev_pdf(u: float, alpha: float, pol: SeriesPolicy) -> EvalResult:
    p = 1.0 / (1.0 - alpha)
    log_w = -alpha * p * math.log(u)
    a0 = _kernel_floor(alpha)
    if log_w + math.log(a0) > math.log(800.0):
        return EvalResult(0.0, 0.0, 0, "quadrature")
    w = math.exp(log_w)
    log_c = math.log(alpha * p / math.pi) - p * math.log(u) - a0 * w
    if log_c < -800:
        return EvalResult(0.0, 0.0, 0, "quadrature")

    def integrand(phi):
        a = zolotarev_kernel(phi, alpha)
        return a * math.exp(-max(a - a0, 0.0) * w)

    val, err, info = _quad(integrand, pol, w)
    c = math.exp(log_c)
    return EvalResult(c * val, c * err + 4 * EPS * c * val, 0, "quadrature")


def _quad(integrand, pol: SeriesPolicy, w: float = 1.0):
    # A(phi) - A(0) grows like phi^2, so for large w the integrand is a spike
    # of width ~ w^-1/2 at the origin; breakpoints let quad resolve it
    pts = [c / math.sqrt(w) for c in (0.5, 2.0, 8.0, 32.0) if c / math.sqrt(w) < math.pi]
    with np.errstate(all="ignore"):
        val, err, info = integrate.quad(integrand, 0.0, math.pi, epsabs=0.0,
                                        epsrel=max(pol.rel_tol, 1e-13), limit=400,
                                        points=pts or None, full_output=1)[:3]
    if not math.isfinite(val) or err > max(1e-8, 1e3 * pol.rel_tol) * abs(val) and val != 0:
        raise QuadratureError(f"Zolotarev quadrature failed: value {val}, error {err}")
    return val, err, info


def levy_pdf(u: float, sp, pol: SeriesPolicy = DEFAULT_POLICY, method: str = "auto") -> EvalResult:
    """Density of the positive stable law, 0 < alpha < 1.

    ``method`` forces a branch ("series" or "quadrature"); "auto" uses the
    residue series from u >= 1.2 and the Zolotarev integral below it.
    """
    sp = _as_params(sp)
    a = sp.alpha
    if not a < 1:
        raise DomainError("alpha = 1 is a point mass at 1 and has no density")
    u = float(u)
    if not u > 0:
        if u == 0:
            return EvalResult(0.0, 0.0, 0, "quadrature")
        raise DomainError(f"u must be > 0, got {u}")
    if math.isinf(u):
        return EvalResult(0.0, 0.0, 0, "series")
    if method == "auto":
        method = "series" if u >= SERIES_THRESHOLD else "quadrature"
    if method == "series":
        try:
            return direct_series(u ** -a, -a, 1.0 - a, None, pol,
                                 math.log(a) - (1.0 + a) * math.log(u))
        except NumericalError:
            if u < SERIES_THRESHOLD:
                raise
            method = "quadrature"
    if method == "quadrature":
        return _zolotarev_pdf(u, a, pol)
    raise DomainError(f"unknown levy_pdf method {method!r}")


def _series_sf(u: float, alpha: float, pol: SeriesPolicy) -> float:
    """1 - F(u) from the term-wise integrated residue series."""
    nu = np.arange(0, min(pol.max_terms, 2000), dtype=float)
    lr, sr = log_recip_gamma(1.0 - alpha * (nu + 1.0))
    L = -alpha * (nu + 1.0) * math.log(u) - special.gammaln(nu + 2.0) + lr
    terms = np.where(sr != 0, sr * np.where(nu % 2 == 0, 1.0, -1.0) * np.exp(np.where(sr != 0, L, 0.0)), 0.0)
    return math.fsum(terms.tolist())


def levy_cdf(u: float, sp, pol: SeriesPolicy = DEFAULT_POLICY) -> float:
    """Distribution function: the Zolotarev integral below u = 1.2, the
    integrated residue series above it."""
    sp = _as_params(sp)
    a = sp.alpha
    u = float(u)
    if a == 1:
        return 1.0 if u >= 1 else 0.0
    if u <= 0:
        return 0.0
    if math.isinf(u):
        return 1.0
    if u >= SERIES_THRESHOLD:
        return 1.0 - _series_sf(u, a, pol)
    p = 1.0 / (1.0 - a)
    log_w = -a * p * math.log(u)
    a0 = _kernel_floor(a)
    if log_w + math.log(a0) > math.log(800.0):
        return 0.0
    w = math.exp(log_w)
    val, _, _ = _quad(lambda phi: math.exp(-max(zolotarev_kernel(phi, a) - a0, 0.0) * w), pol, w)
    return math.exp(-a0 * w) * val / math.pi


def levy_sf(u: float, sp, pol: SeriesPolicy = DEFAULT_POLICY) -> float:
    sp = _as_params(sp)
    if sp.alpha < 1 and float(u) >= SERIES_THRESHOLD:
        return _series_sf(float(u), sp.alpha, pol)
    return 1.0 - levy_cdf(u, sp, pol)


def levy_sample(rng: np.random.Generator, sp) -> float:
    """One Kanter variate; alpha = 1 returns exactly 1 without consuming the stream."""
    sp = _as_params(sp)
    if sp.alpha == 1:
        return 1.0
    return float(levy_sample_array(rng, sp.alpha, 1)[0])


def levy_sample_array(rng: np.random.Generator, alpha: float, size: int) -> np.ndarray:
    """``size`` Kanter variates: all uniforms are drawn first, then all exponentials."""
    sp = _as_params(alpha)
    if sp.alpha == 1:
        return np.ones(size)
    phi = math.pi * (1.0 - rng.random(size))
    e = rng.standard_exponential(size)
    a = zolotarev_kernel(phi, sp.alpha)
    return (a / e) ** ((1.0 - sp.alpha) / sp.alpha)


def stable_mean_array(rng: np.random.Generator, alpha: float, n: int, size: int) -> np.ndarray:
    """(u_1 + ... + u_n) / n^(1/alpha) for ``size`` independent groups."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if alpha == 1:
        return np.ones(size)
    u = levy_sample_array(rng, alpha, n * size).reshape(size, n)
    return u.sum(axis=1) / n ** (1.0 / alpha)
