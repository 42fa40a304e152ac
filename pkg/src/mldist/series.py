"""Series machinery shared by the Mittag-Leffler, Levy and f* evaluators.

Every evaluator in the package reduces to the three-parameter function

    E(z; alpha, beta, gamma) = sum_k (gamma)_k / k! * (-z)^k / Gamma(beta + alpha*k),  z >= 0,

multiplied by a positive prefactor.  This module sums that series in log
space (so that ``Gamma(beta + alpha*k)`` never overflows), tracks the
cancellation ratio ``max|term| / |sum|``, and provides the large-argument
expansion and an extended-precision fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath
import numpy as np
from scipy import special

from .errors import CancellationError, DomainError, SeriesNonConvergence

EPS = float(np.finfo(float).eps)
_CHUNK = 64
_LOG_MAX = math.log(np.finfo(float).max)

METHODS = ("series", "tail_series", "quadrature")


@dataclass(frozen=True)
class SeriesPolicy:
    """Truncation and accuracy policy for every series evaluator.

    ``tail_threshold`` is the reduced argument ``x**alpha / delta`` above which
    the direct series is not attempted at all.
    """

    rel_tol: float = 1e-12
    max_terms: int = 10000
    cancel_guard: float = 1e8
    tail_threshold: float = 30.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")
        if not self.cancel_guard > 1:
            raise DomainError(f"cancel_guard must be > 1, got {self.cancel_guard}")


DEFAULT_POLICY = SeriesPolicy()


@dataclass(frozen=True)
class EvalResult:
    """A value with its error estimate and the route that produced it.

    ``singular`` marks boundary values that are limits rather than sums
    (for example an infinite density at the origin).
    """

    value: float
    abs_err_est: float
    terms_used: int
    method: str
    singular: bool = field(default=False, compare=False)

    def __float__(self):
        return float(self.value)

    @property
    def rel_err_est(self) -> float:
        if self.value == 0:
            return 0.0 if self.abs_err_est == 0 else math.inf
        return self.abs_err_est / abs(self.value)

    def scaled(self, factor: float) -> "EvalResult":
        return EvalResult(self.value * factor, self.abs_err_est * abs(factor),
                          self.terms_used, self.method, self.singular)


def pochhammer(beta: float, k: int) -> float:
    """Rising factorial beta (beta+1) ... (beta+k-1) for beta > 0."""
    if not beta > 0:
        raise DomainError(f"pochhammer requires beta > 0, got {beta}")
    if k < 0 or int(k) != k:
        raise DomainError(f"pochhammer requires a nonnegative integer k, got {k}")
    k = int(k)
    if k <= 32:
        out = 1.0
        for j in range(k):
            out *= beta + j
        if math.isinf(out):
            raise OverflowError(f"({beta})_{k} overflows")
        return out
    log_val = math.lgamma(beta + k) - math.lgamma(beta)
    if log_val > _LOG_MAX:
        raise OverflowError(f"({beta})_{k} overflows: log value {log_val:.6g}")
    return math.exp(log_val)


def log_recip_gamma(z):
    """Return ``(log|1/Gamma(z)|, sign(1/Gamma(z)))`` elementwise.

    At the poles z = 0, -1, -2, ... the log is -inf and the sign 0.
    """
    z = np.asarray(z, dtype=float)
    pole = (z <= 0) & (z == np.floor(z))
    with np.errstate(divide="ignore", invalid="ignore"):
        log_abs = -special.gammaln(z)
        sign = special.gammasgn(z)
    log_abs = np.where(pole, -np.inf, log_abs)
    sign = np.where(pole, 0.0, sign)
    return log_abs, sign


def recip_gamma(z: float) -> float:
    """1/Gamma(z), exactly zero at the poles of Gamma."""
    z = float(z)
    if z <= 0 and z == math.floor(z):
        return 0.0
    if 0 < z < 1e-8:
        # 1/Gamma(z) = z + euler_gamma z^2 + O(z^3); math.gamma overflows near 0
        return z * (1.0 + 0.5772156649015329 * z)
    if z > 0:
        if z < 170:
            return 1.0 / math.gamma(z)
        return math.exp(-math.lgamma(z))
    # reflection: 1/Gamma(z) = Gamma(1-z) sin(pi z) / pi, with sin(pi z)
    # reduced to the nearest integer first so it stays accurate near poles
    n = round(z)
    s = math.sin(math.pi * (z - n)) * (-1.0 if n % 2 else 1.0)
    log_val = math.lgamma(1.0 - z) + math.log(abs(s)) - math.log(math.pi)
    return math.copysign(math.exp(log_val), s)


def log_pochhammer(a: float, k):
    """``(log|(a)_k|, sign((a)_k))`` for real ``a`` and an integer array ``k``."""
    k = np.asarray(k, dtype=float)
    if a > 0:
        return special.gammaln(a + k) - special.gammaln(a), np.ones_like(k)
    if a == math.floor(a):
        n = -a
        inside = k <= n
        kk = np.where(inside, k, 0.0)
        log_abs = np.where(inside, special.gammaln(n + 1) - special.gammaln(n - kk + 1), -np.inf)
        sign = np.where(inside, np.where(kk % 2 == 0, 1.0, -1.0), 0.0)
        return log_abs, sign
    log_abs = special.gammaln(a + k) - special.gammaln(a)
    sign = special.gammasgn(a + k) * special.gammasgn(a)
    return log_abs, sign


# ----------------------------------------------------------------------------
# summation kernels


@dataclass
class _Terms:
    """Log magnitudes, signs and rounding weights of a block of terms."""

    log_abs: np.ndarray
    sign: np.ndarray
    weight: np.ndarray
    # log of an upper envelope of |term|; differs from log_abs only where
    # 1/Gamma is near one of its zeros, which must not count as convergence
    env: np.ndarray

    def extend(self, other: "_Terms") -> "_Terms":
        return _Terms(np.concatenate([self.log_abs, other.log_abs]),
                      np.concatenate([self.sign, other.sign]),
                      np.concatenate([self.weight, other.weight]),
                      np.concatenate([self.env, other.env]))


def _envelope_lr(arg: np.ndarray, lr: np.ndarray) -> np.ndarray:
    """log of a bound on |1/Gamma(arg)|: exact for arg > 0, and
    Gamma(1-arg)/pi (from the reflection formula) for arg <= 0."""
    neg = special.gammaln(1.0 - np.minimum(arg, 0.0)) - math.log(math.pi)
    return np.where(arg > 0, np.where(np.isfinite(lr), lr, 0.0), neg)


def _finish(terms: _Terms, n_used: int, tail_err_log: float, pol: SeriesPolicy,
            method: str, check_guard: bool = True):
    """Sum the first ``n_used`` terms with a scaled ``math.fsum``."""
    L = terms.log_abs[:n_used]
    sg = terms.sign[:n_used]
    finite = np.isfinite(L) & (sg != 0)
    if not finite.any():
        err = math.exp(tail_err_log) if np.isfinite(tail_err_log) else 0.0
        return 0.0, err, 1.0
    Lmax = float(L[finite].max())
    scaled = np.where(finite, sg * np.exp(np.where(finite, L - Lmax, 0.0)), 0.0)
    total = math.fsum(scaled.tolist())
    abs_scaled = np.abs(scaled)
    ratio = math.inf if total == 0 else 1.0 / abs(total)
    if check_guard and ratio > pol.cancel_guard:
        raise CancellationError(
            f"{method}: cancellation ratio {ratio:.3g} exceeds guard {pol.cancel_guard:.3g}",
            ratio=ratio)
    rounding = 2.0 * EPS * float(np.sum(abs_scaled * (32.0 + terms.weight[:n_used])))
    scale_log = Lmax
    if scale_log > _LOG_MAX:
        raise OverflowError(f"{method}: result overflows (log scale {scale_log:.6g})")
    scale = math.exp(scale_log)
    value = total * scale
    err = rounding * scale + 2.0 * EPS * abs(value)
    if np.isfinite(tail_err_log):
        err += math.exp(tail_err_log)
    return value, err, ratio


def _converged_index(terms: _Terms, rel_tol: float) -> Optional[int]:
    """Index ``k`` such that terms ``k`` and ``k+1`` are both below
    ``rel_tol * |partial sum|`` after the peak term, or None."""
    L, sg, env = terms.log_abs, terms.sign, terms.env
    finite = np.isfinite(L) & (sg != 0)
    fe = np.isfinite(env)
    if not finite.any() or len(L) < 3:
        return None
    Lmax = float(L[finite].max())
    peak = int(np.argmax(np.where(fe, env, -np.inf)))
    scaled = np.where(finite, sg * np.exp(np.where(finite, L - Lmax, 0.0)), 0.0)
    partial = np.abs(np.cumsum(scaled))
    env_scaled = np.where(fe, np.exp(np.where(fe, env - Lmax, -np.inf)), 0.0)
    small = env_scaled <= rel_tol * partial
    both = small[:-2] & small[1:-1]
    both[: peak + 1] = False
    hits = np.flatnonzero(both)
    return int(hits[0]) if hits.size else None


def _lgamma_scale(a: float) -> float:
    """Magnitude of the log-gamma constant subtracted inside a Pochhammer log."""
    if a <= 0 and a == math.floor(a):
        return abs(math.lgamma(1 - a))
    return abs(math.lgamma(a))


def _direct_block(k, z, alpha, beta, gamma, log_pre, poch_a=None):
    logz = math.log(z)
    if poch_a is None and gamma is None:
        lp, sp = np.zeros_like(k), np.ones_like(k)
        alt = np.where(k % 2 == 0, 1.0, -1.0)
    elif poch_a is None:
        lp, sp = log_pochhammer(gamma, k)
        alt = np.where(k % 2 == 0, 1.0, -1.0)
    else:
        lp, sp = log_pochhammer(poch_a, k)
        alt = np.ones_like(k, dtype=float)
    lk = special.gammaln(k + 1.0)
    arg = beta + alpha * k
    lr, sr = log_recip_gamma(arg)
    base_log = log_pre + lp - lk + k * logz
    L = base_log + lr
    base = gamma if poch_a is None else poch_a
    weight = (np.where(np.isfinite(lp), np.abs(lp), 0.0)
              + (0.0 if base is None else 2 * _lgamma_scale(base))
              + np.abs(lk) + np.abs(k * logz) + np.where(np.isfinite(lr), np.abs(lr), 0.0)
              + abs(log_pre))
    env = np.where(sp != 0, base_log + _envelope_lr(arg, lr), -np.inf)
    return _Terms(L, alt * sp * sr, weight, env)


def direct_series(z: float, alpha: float, beta: float, gamma: float,
                  pol: SeriesPolicy = DEFAULT_POLICY, log_pre: float = 0.0,
                  kummer: bool = False) -> EvalResult:
    """Sum ``exp(log_pre) * E(z; alpha, beta, gamma)`` term by term.

    With ``kummer=True`` (valid only for alpha == 1) the Kummer-transformed
    series ``exp(-z) * sum (beta-gamma)_k z^k / (k! Gamma(beta+k))`` is summed
    instead; its terms do not alternate so there is no cancellation.

    ``gamma=None`` drops the Pochhammer factor, leaving coefficients 1/k!.

    Raises SeriesNonConvergence when the stopping rule is not met within
    ``pol.max_terms`` and CancellationError when the guard is exceeded.
    """
    if z < 0:
        raise DomainError(f"series argument must be >= 0, got {z}")
    if z == 0:
        v = math.exp(log_pre) * recip_gamma(beta)
        return EvalResult(v, 2 * EPS * abs(v) * (1 + abs(log_pre)), 1, "series")
    if kummer:
        if alpha != 1:
            raise DomainError("Kummer transformation requires alpha == 1")
        log_pre = log_pre - z
        poch_a = beta - gamma
    else:
        poch_a = None
    terms = None
    k0 = 0
    while True:
        k1 = min(k0 + _CHUNK, pol.max_terms + 1)
        block = _direct_block(np.arange(k0, k1, dtype=float), z, alpha, beta, gamma,
                              log_pre, poch_a)
        terms = block if terms is None else terms.extend(block)
        idx = _converged_index(terms, pol.rel_tol)
        if idx is not None:
            n_used = idx + 2
            value, err, _ = _finish(terms, n_used, float(terms.env[n_used]), pol, "series")
            return EvalResult(value, err, n_used, "series")
        if k1 > pol.max_terms:
            raise SeriesNonConvergence(
                f"series for z={z:.6g} (alpha={alpha}, beta={beta}, gamma={gamma}) "
                f"not converged after {pol.max_terms} terms")
        k0 = k1


def tail_series(z: float, alpha: float, beta: float, gamma: float,
                pol: SeriesPolicy = DEFAULT_POLICY, log_pre: float = 0.0) -> EvalResult:
    """Large-argument expansion of ``exp(log_pre) * E(z; alpha, beta, gamma)``.

    Residues at s = gamma + m of the Mellin-Barnes integrand give

        E ~ z^-gamma * sum_m (gamma)_m / m! * (-1)^m z^-m / Gamma(beta - alpha*gamma - alpha*m),

    an asymptotic series for 0 < alpha < 1.  Summation stops by the usual
    two-small-terms rule or, if the terms start to grow, just before the
    smallest one; the error estimate is twice the first omitted term.
    """
    if not 0 < alpha < 1:
        raise DomainError(f"tail expansion requires 0 < alpha < 1, got {alpha}")
    if not z > 0:
        raise DomainError(f"tail expansion requires z > 0, got {z}")
    logz = math.log(z)
    terms = None
    m0 = 0
    while True:
        m1 = min(m0 + _CHUNK, pol.max_terms + 1)
        m = np.arange(m0, m1, dtype=float)
        lp, sp = log_pochhammer(gamma, m)
        lm = special.gammaln(m + 1.0)
        arg = beta - alpha * gamma - alpha * m
        lr, sr = log_recip_gamma(arg)
        base = log_pre - gamma * logz + lp - lm - m * logz
        weight = (np.abs(lp) + 2 * _lgamma_scale(gamma) + np.abs(lm) + np.abs((m + gamma) * logz)
                  + np.where(np.isfinite(lr), np.abs(lr), 0.0) + abs(log_pre))
        env = np.where(sp != 0, base + _envelope_lr(arg, lr), -np.inf)
        block = _Terms(base + lr, np.where(m % 2 == 0, 1.0, -1.0) * sp * sr, weight, env)
        terms = block if terms is None else terms.extend(block)
        idx = _converged_index(terms, pol.rel_tol)
        if idx is not None:
            n_used = idx + 2
            value, err, _ = _finish(terms, n_used, float(terms.env[n_used]) + math.log(2), pol,
                                    "tail_series", check_guard=False)
            return EvalResult(value, err, n_used, "tail_series")
        env = terms.env
        nz = np.isfinite(env)
        if nz.any():
            j = int(np.argmin(np.where(nz, env, np.inf)))
            grown = nz[j + 1:].any() and float(np.max(np.where(nz[j + 1:], env[j + 1:], -np.inf))) > env[j] + 30
            if grown or m1 > pol.max_terms:
                value, err, _ = _finish(terms, j, float(env[j]) + math.log(2), pol,
                                        "tail_series", check_guard=False)
                return EvalResult(value, err, max(j, 1), "tail_series")
        elif m1 > pol.max_terms:
            return EvalResult(0.0, 0.0, pol.max_terms, "tail_series")
        m0 = m1


def mp_series(z: float, alpha: float, beta: float, gamma: float,
              pol: SeriesPolicy = DEFAULT_POLICY, log_pre: float = 0.0,
              dps: Optional[int] = None) -> EvalResult:
    """Direct series in extended precision, raising precision until the
    observed cancellation is covered by at least 20 spare digits."""
    if z == 0:
        return direct_series(z, alpha, beta, gamma, pol, log_pre)
    if dps is None:
        k = np.arange(0, pol.max_terms + 1, dtype=float)
        L = _direct_block(k, z, alpha, beta, gamma, 0.0).log_abs
        spread = float(np.max(L[np.isfinite(L)]) - L[0]) if np.isfinite(L[0]) else 0.0
        dps = 30 + max(0, int(spread / math.log(10)))
    # summing well past double precision is cheap here and leaves only the
    # final rounding in the error budget
    tol = mpmath.mpf(min(pol.rel_tol, 1e-18)) / 100
    while True:
        with mpmath.workdps(dps):
            # parameters enter exactly; beta + alpha*k in double precision would
            # perturb every term by an ulp, which the cancellation then amplifies
            zz, a_, b_, g_ = (mpmath.mpf(v) for v in (z, alpha, beta, gamma))
            coef = mpmath.mpf(1)
            total = mpmath.mpf(0)
            biggest = mpmath.mpf(0)
            prev_small = False
            prev_mag = None
            passed_peak = False
            k = 0
            done = False
            while k <= pol.max_terms:
                t = coef * mpmath.rgamma(b_ + a_ * k)
                total += t
                mag = abs(t)
                biggest = max(biggest, mag)
                if prev_mag is not None and mag < prev_mag:
                    passed_peak = True
                small = mag <= tol * abs(total)
                if passed_peak and small and prev_small:
                    done = True
                    break
                prev_small = small
                if t != 0:
                    prev_mag = mag
                coef *= (g_ + k) / mpmath.mpf(k + 1) * (-zz)
                k += 1
            if not done:
                raise SeriesNonConvergence(
                    f"extended-precision series for z={z:.6g} not converged after "
                    f"{pol.max_terms} terms")
            coef *= (g_ + k) / mpmath.mpf(k + 1) * (-zz)
            nxt = abs(coef * mpmath.rgamma(b_ + a_ * (k + 1)))
            if total == 0:
                ratio_digits = dps
            else:
                ratio_digits = float(mpmath.log10(biggest / abs(total)))
            if ratio_digits + 20 > dps:
                dps = int(ratio_digits) + 30
                continue
            pre = mpmath.exp(log_pre)
            value = float(total * pre)
            err = float((nxt + biggest * mpmath.mpf(10) ** (-dps + 2)) * pre)
            err += EPS * abs(value) * (2.0 + abs(log_pre))
            return EvalResult(value, err, k + 1, "series")


def evaluate(z: float, alpha: float, beta: float, gamma: float,
             pol: SeriesPolicy = DEFAULT_POLICY, log_pre: float = 0.0,
             quadrature: Optional[Callable[[], EvalResult]] = None) -> EvalResult:
    """Pick a route for ``exp(log_pre) * E(z; alpha, beta, gamma)``.

    alpha == 1 uses the Kummer form.  Otherwise the direct series is tried
    when the predicted cancellation ``exp(z**(1/alpha))`` is within the guard
    and ``z`` is below the policy threshold, then the large-argument
    expansion (alpha < 1), then ``quadrature`` if supplied, and finally the
    extended-precision series.  The first result within ``rel_tol`` wins;
    otherwise the most accurate candidate is returned.
    """
    if z < 0:
        raise DomainError(f"series argument must be >= 0, got {z}")
    if z == 0:
        return direct_series(0.0, alpha, beta, gamma, pol, log_pre)
    if alpha == 1:
        return direct_series(z, alpha, beta, gamma, pol, log_pre, kummer=True)

    candidates = []

    def good(res):
        candidates.append(res)
        return res.abs_err_est <= pol.rel_tol * abs(res.value)

    predicted = z ** (1.0 / alpha)
    if (z < pol.tail_threshold or alpha >= 1) and predicted <= math.log(pol.cancel_guard):
        try:
            res = direct_series(z, alpha, beta, gamma, pol, log_pre)
            if good(res):
                return res
        except (CancellationError, SeriesNonConvergence):
            pass
    if alpha < 1:
        res = tail_series(z, alpha, beta, gamma, pol, log_pre)
        if good(res):
            return res
    if quadrature is not None:
        res = quadrature()
        if good(res):
            return res
    try:
        res = mp_series(z, alpha, beta, gamma, pol, log_pre)
        if good(res):
            return res
    except SeriesNonConvergence:
        if not candidates:
            raise
    return min(candidates, key=lambda r: r.rel_err_est)
