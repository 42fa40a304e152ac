"""The f* series, its large-beta scaling limit and the pathway densities.

    f*(x) = c x^eta sum_k (gamma)_k / k! (-delta x^alpha)^k / Gamma(beta + alpha k)

satisfies Gamma(beta) f*(beta x) / beta^eta -> c x^eta (1 + delta x^alpha)^(-gamma)
as beta -> inf, because Gamma(beta) beta^t / Gamma(beta + t) -> 1.  With
delta = a(q-1) and gamma = 1/(q-1) the limit is the pathway density

    q > 1:   f2(x) = c2 x^eta [1 + a(q-1) x^alpha]^(-1/(q-1))      (type-2 beta)
    q < 1:   f1(x) = c1 x^eta [1 - a(1-q) x^alpha]^( 1/(1-q))      (type-1 beta)
    q -> 1:  f3(x) = c3 x^eta exp(-a x^alpha)                       (generalized gamma)

The normalizing constants are 1 / I with, writing h = (eta + 1)/alpha,

    I1 = B(h, 1/(1-q) + 1)     / (alpha (a(1-q))^h)
    I2 = B(h, 1/(q-1) - h)     / (alpha (a(q-1))^h)
    I3 = Gamma(h)              / (alpha a^h)
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError
from .series import DEFAULT_POLICY, EvalResult, SeriesPolicy, evaluate, recip_gamma

Q_LIMIT_TOL = 1e-8


def _finite(name, v):
    if not (isinstance(v, (int, float, np.floating, np.integer)) and math.isfinite(v)):
        raise DomainError(f"{name} must be a finite real number, got {v!r}")


@dataclass(frozen=True)
class PathwayParams:
    eta: float
    a: float
    alpha: float
    q: float

    def __post_init__(self):
        for name in ("eta", "a", "alpha", "q"):
            _finite(name, getattr(self, name))
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.a > 0:
            raise DomainError(f"a={self.a} violates a > 0")
        if not self.alpha > 0:
            raise DomainError(f"alpha={self.alpha} violates alpha > 0")
        if not self.eta > -1:
            raise DomainError(f"eta={self.eta} violates eta > -1")
        if self.family == "type2":
            h = (self.eta + 1) / self.alpha
            if not 1 / (self.q - 1) - h > 0:
                raise DomainError(
                    f"q={self.q} violates 1/(q-1) - (eta+1)/alpha > 0 (not normalizable)")

    @property
    def family(self) -> str:
        if abs(self.q - 1) < Q_LIMIT_TOL:
            return "gamma_limit"
        return "type1" if self.q < 1 else "type2"

    @property
    def support(self) -> tuple[float, float]:
        if self.family == "type1":
            return 0.0, (self.a * (1 - self.q)) ** (-1 / self.alpha)
        return 0.0, math.inf

    def echo(self) -> str:
        return f"eta={self.eta!r},a={self.a!r},alpha={self.alpha!r},q={self.q!r}"


@dataclass(frozen=True)
class PrabhakarParams:
    """Parameters of f*: power ``eta``, series parameter ``gamma_p``, ``alpha``,
    ``beta``, ``delta`` and the front constant ``c``."""

    eta: float
    gamma_p: float
    alpha: float
    beta: float
    delta: float
    c: float = 1.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            _finite(f.name, getattr(self, f.name))
            object.__setattr__(self, f.name, float(getattr(self, f.name)))
        for name in ("gamma_p", "alpha", "beta", "delta", "c"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name}={getattr(self, name)} violates {name} > 0")


@dataclass(frozen=True)
class RegimeReport:
    family: str
    tsallis: bool
    superstatistics: bool


def prabhakar_fstar(x: float, pp: PrabhakarParams, pol: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    x = float(x)
    if not x >= 0:
        raise DomainError(f"x must be >= 0, got {x}")
    if x == 0:
        if pp.eta > 0:
            return EvalResult(0.0, 0.0, 1, "series")
        if pp.eta == 0:
            return EvalResult(pp.c * recip_gamma(pp.beta), 0.0, 1, "series")
        return EvalResult(math.inf, 0.0, 1, "series", singular=True)
    z = pp.delta * x ** pp.alpha
    log_pre = math.log(pp.c) + pp.eta * math.log(x)
    return evaluate(z, pp.alpha, pp.beta, pp.gamma_p, pol, log_pre)


def stirling_ratio(beta: float, t: float) -> float:
    """Gamma(beta) beta^t / Gamma(beta + t)."""
    if not beta > 0:
        raise DomainError(f"beta={beta} violates beta > 0")
    if not beta + t > 0:
        raise DomainError(f"beta + t = {beta + t} is not > 0")
    if min(beta, beta + t) < _STIRLING_MIN:
        return math.exp(math.lgamma(beta) + t * math.log(beta) - math.lgamma(beta + t))
    # the two log-gammas are ~beta log beta and cancel; expand them instead
    log_r = t - (beta + t - 0.5) * math.log1p(t / beta) + _stirling_tail(beta) - _stirling_tail(beta + t)
    return math.exp(log_r)


_STIRLING_MIN = 30.0
_STIRLING_COEF = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188)


def _stirling_tail(x: float) -> float:
    """log Gamma(x) - (x - 1/2) log x + x - log(2 pi)/2, accurate for x >= 30."""
    inv2 = 1.0 / (x * x)
    acc = 0.0
    for c in reversed(_STIRLING_COEF):
        acc = acc * inv2 + c
    return acc / x


def _log_norm_integral(pw: PathwayParams) -> float:
    h = (pw.eta + 1) / pw.alpha
    fam = pw.family
    if fam == "type1":
        return special.betaln(h, 1 / (1 - pw.q) + 1) - math.log(pw.alpha) - h * math.log(pw.a * (1 - pw.q))
    if fam == "type2":
        return special.betaln(h, 1 / (pw.q - 1) - h) - math.log(pw.alpha) - h * math.log(pw.a * (pw.q - 1))
    return math.lgamma(h) - math.log(pw.alpha) - h * math.log(pw.a)


def pathway_norm_const(pw: PathwayParams) -> float:
    return math.exp(-_log_norm_integral(pw))


def _log_kernel(x: float, pw: PathwayParams) -> float:
    fam = pw.family
    xa = x ** pw.alpha
    if fam == "type1":
        arg = -pw.a * (1 - pw.q) * xa
        if arg <= -1:
            return -math.inf
        return math.log1p(arg) / (1 - pw.q)
    if fam == "type2":
        return -math.log1p(pw.a * (pw.q - 1) * xa) / (pw.q - 1)
    return -pw.a * xa


def pathway_pdf(x: float, pw: PathwayParams) -> float:
    """Normalized pathway density; zero outside the type-1 support."""
    x = float(x)
    if not x >= 0:
        raise DomainError(f"x must be >= 0, got {x}")
    log_c = -_log_norm_integral(pw)
    if x == 0:
        if pw.eta > 0:
            return 0.0
        if pw.eta < 0:
            return math.inf
        return math.exp(log_c)
    if x >= pw.support[1]:
        return 0.0
    lk = _log_kernel(x, pw)
    if lk == -math.inf:
        return 0.0
    return math.exp(log_c + pw.eta * math.log(x) + lk)


def pathway_regime(pw: PathwayParams) -> RegimeReport:
    fam = pw.family
    tsallis = pw.eta == 0 and pw.a == 1 and pw.alpha == 1
    superstat = pw.a == 1 and fam in ("type2", "gamma_limit")
    return RegimeReport(fam, tsallis, superstat)


def tsallis_ode_residual(x: float, q: float) -> float:
    """d/dx k(x) + k(x)^q for the unit-constant kernel k(x) = [1 - (1-q) x]^(1/(1-q)).

    The identity only holds without a normalizing constant: for c k the
    derivative is -c^(1-q) (c k)^q.
    """
    x = float(x)
    if not x >= 0:
        raise DomainError(f"x must be >= 0, got {x}")
    if abs(q - 1) < Q_LIMIT_TOL:
        k = math.exp(-x)
        return -k + k
    arg = -(1 - q) * x
    if arg < -1:
        raise DomainError(f"x={x} lies outside the support [0, {1 / (1 - q)}] for q={q}")
    if arg == -1:
        return 0.0
    L = math.log1p(arg)
    derivative = -math.exp(q / (1 - q) * L)
    k_pow_q = math.exp(q * (L / (1 - q)))
    return derivative + k_pow_q


def fstar_scaled(x: float, beta: float, pp: PrabhakarParams, pol: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    """Gamma(beta) f*(beta x) / beta^eta with f* taken at series parameter ``beta``
    (``pp.beta`` is ignored).  The scale is folded into the series prefactor so
    large beta does not overflow."""
    x = float(x)
    if not beta > 0:
        raise DomainError(f"beta={beta} violates beta > 0")
    if not x > 0:
        raise DomainError(f"x must be > 0, got {x}")
    z = pp.delta * (beta * x) ** pp.alpha
    log_pre = math.lgamma(beta) + math.log(pp.c) + pp.eta * math.log(x)
    return evaluate(z, pp.alpha, beta, pp.gamma_p, pol, log_pre)


def pathway_limit_gap(beta: float, pp: PrabhakarParams, grid, pol: SeriesPolicy = DEFAULT_POLICY) -> float:
    """sup over ``grid`` of |Gamma(beta) f*(beta x) / beta^eta - c x^eta (1 + delta x^alpha)^(-gamma)|,
    with f* evaluated at series parameter ``beta``.

    The divisor beta^eta is applied for every eta (the undivided form only
    agrees with it at eta = 0).
    """
    if not beta > 0:
        raise DomainError(f"beta={beta} violates beta > 0")
    gap = 0.0
    for x in np.asarray(grid, dtype=float):
        if not x >= 0:
            raise DomainError(f"grid points must be >= 0, got {x}")
        if x == 0:
            if pp.eta > 0:
                continue
            if pp.eta < 0:
                raise DomainError("x = 0 is singular for eta < 0")
            # both sides equal c
            continue
        lhs = fstar_scaled(x, beta, pp, pol).value
        target = pp.c * x ** pp.eta * (1 + pp.delta * x ** pp.alpha) ** (-pp.gamma_p)
        gap = max(gap, abs(lhs - target))
    return gap


def pathway_sample_array(rng: np.random.Generator, pw: PathwayParams, size: int) -> np.ndarray:
    """Exact variates: a(1-q)x^alpha is beta distributed (q < 1), its type-2
    analogue for q > 1, and a x^alpha is gamma distributed in the limit."""
    h = (pw.eta + 1) / pw.alpha
    fam = pw.family
    if fam == "type1":
        t = rng.beta(h, 1 / (1 - pw.q) + 1, size)
        return (t / (pw.a * (1 - pw.q))) ** (1 / pw.alpha)
    if fam == "type2":
        b = rng.beta(h, 1 / (pw.q - 1) - h, size)
        return (b / (1 - b) / (pw.a * (pw.q - 1))) ** (1 / pw.alpha)
    y = rng.standard_gamma(h, size)
    return (y / pw.a) ** (1 / pw.alpha)
