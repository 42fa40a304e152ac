"""Independent numerical oracles and the limit-theorem experiments.

``transform_oracle`` integrates a density against exp(-s x) or x^(s-1) with
adaptive Gauss-Kronrod quadrature in the variable y = log x, where both the
algebraic singularity at the origin and a heavy algebraic tail become
exponential decay.  The integration window is grown outward until the
integrand falls below 1e-16 of its peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, interpolate

from . import __version__
from .errors import DomainError, QuadratureError
from .ml_core import MLParams, ml_cdf, ml_laplace, ml_pdf
from .sampling import SampleBatch, make_stream, ml_sample_array
from .stable_levy import levy_cdf, levy_pdf
from .tables import render_csv, render_json

KS_C01 = 1.63
_Y_MIN, _Y_MAX = -700.0, 700.0


@dataclass(frozen=True)
class TransformProbe:
    s_values: tuple
    kind: str = "laplace"
    strip: Optional[tuple] = None

    def __post_init__(self):
        s = tuple(float(v) for v in np.atleast_1d(self.s_values))
        object.__setattr__(self, "s_values", s)
        if not s:
            raise DomainError("a probe needs at least one s value")
        if not all(math.isfinite(v) for v in s):
            raise DomainError("probe s values must be finite")
        if self.kind not in ("laplace", "mellin"):
            raise DomainError(f"unknown transform kind {self.kind!r}")
        if self.kind == "laplace" and min(s) < 0:
            raise DomainError("Laplace probe values must be >= 0")
        if self.kind == "mellin" and self.strip is not None:
            lo, hi = self.strip
            bad = [v for v in s if not lo < v < hi]
            if bad:
                raise DomainError(f"Mellin probe values {bad} lie outside the strip ({lo}, {hi})")


def _as_float(v) -> float:
    return float(v.value) if hasattr(v, "value") else float(v)


def _integrand(density, probe: TransformProbe):
    s = np.asarray(probe.s_values)

    def g(y):
        x = math.exp(y)
        d = _as_float(density(x))
        if d == 0:
            return np.zeros_like(s)
        ld = math.log(d)
        with np.errstate(over="ignore"):
            # overflow here means the transform diverges; the caller reports it
            if probe.kind == "laplace":
                return np.exp(-s * x + y + ld)
            return np.exp(s * y + ld)

    return g


def _window(g, y_start: float, y_lo: float, y_hi: float):
    """Grow [a, b] from y_start until |g| < 1e-16 * peak on both sides."""
    peak = float(np.max(np.abs(g(y_start))))

    def walk(direction, limit):
        nonlocal peak
        y = y_start
        quiet = 0
        step = 0.5
        while True:
            y_next = y + direction * step
            if (direction > 0 and y_next >= limit) or (direction < 0 and y_next <= limit):
                return limit, False
            y = y_next
            m = float(np.max(np.abs(g(y))))
            peak = max(peak, m)
            quiet = quiet + 1 if m <= 1e-16 * peak else 0
            if quiet >= 3:
                return y, True
            step = min(step * 1.15, 4.0)

    b, _ = walk(+1, y_hi)
    a, _ = walk(-1, y_lo)
    return a, b, peak


def transform_oracle(density: Callable[[float], float], probe: TransformProbe,
                     domain: tuple = (0.0, math.inf)) -> np.ndarray:
    """Quadrature values of int exp(-s x) f(x) dx or int x^(s-1) f(x) dx over ``domain``."""
    lo, hi = domain
    if lo < 0 or not hi > lo:
        raise DomainError(f"invalid integration domain {domain}")
    y_lo = _Y_MIN if lo == 0 else math.log(lo)
    y_hi = _Y_MAX if math.isinf(hi) else math.log(hi)
    g = _integrand(density, probe)
    start = min(max(0.0, y_lo + 1e-9), y_hi - 1e-9)
    if math.isfinite(hi) and lo == 0:
        start = y_hi - 1.0
    a, b, peak = _window(g, start, y_lo, y_hi)
    if b == _Y_MAX and math.isinf(hi) and float(np.max(np.abs(g(b)))) > 1e-12 * peak:
        raise QuadratureError(f"integrand does not decay for s={list(probe.s_values)}",
                              s=probe.s_values)
    pts = list(np.arange(math.ceil(a), b, 4.0))
    with np.errstate(all="ignore"):
        res = integrate.quad_vec(g, a, b, epsabs=1e-13, epsrel=1e-12, limit=2000,
                                 points=pts or None, full_output=True)
    vals, err, info = res[0], res[1], res[2]
    if not info.success or not np.all(np.isfinite(vals)) or err > 1e-9:
        raise QuadratureError(f"quadrature failed (error {err:.3g}) for s={list(probe.s_values)}",
                              s=probe.s_values)
    return np.asarray(vals, dtype=float)


def total_mass(density: Callable[[float], float], domain: tuple = (0.0, math.inf)) -> float:
    return float(transform_oracle(density, TransformProbe((0.0,), "laplace"), domain)[0])


def _values(batch) -> np.ndarray:
    v = batch.values if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float)
    if v.size == 0:
        raise DomainError("empty sample")
    return v


def empirical_laplace(batch, probe: TransformProbe) -> np.ndarray:
    """Rows of (mean, standard error) of exp(-s X) for each probe s."""
    if probe.kind != "laplace":
        raise DomainError("empirical transforms are only defined for the Laplace kind")
    x = _values(batch)
    out = np.empty((len(probe.s_values), 2))
    for i, s in enumerate(probe.s_values):
        y = np.exp(-s * x)
        out[i, 0] = y.mean()
        out[i, 1] = y.std(ddof=1) / math.sqrt(y.size) if y.size > 1 else 0.0
    return out


def ks_critical(n: int, m: Optional[int] = None) -> float:
    """Asymptotic 1% critical value, one-sample (n) or two-sample (n, m)."""
    if m is None:
        return KS_C01 / math.sqrt(n)
    return KS_C01 * math.sqrt((n + m) / (n * m))


def _eval_cdf(cdf, x: np.ndarray) -> np.ndarray:
    try:
        F = np.asarray(cdf(x), dtype=float)
        if F.shape == x.shape:
            return F
    except (TypeError, ValueError):
        pass
    return np.array([_as_float(cdf(float(v))) for v in x])


def ks_statistic(batch, cdf: Callable) -> float:
    """Two-sided one-sample Kolmogorov-Smirnov distance sup |F_n - F|."""
    x = np.sort(_values(batch))
    F = _eval_cdf(cdf, x)
    if np.any(np.diff(F) < -1e-12) or np.any(F < -1e-12) or np.any(F > 1 + 1e-12):
        raise DomainError("cdf is not nondecreasing onto [0, 1] on the sample points")
    n = x.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_two_sample(a, b) -> float:
    a = np.sort(_values(a))
    b = np.sort(_values(b))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def tabulate_cdf(cdf: Callable[[float], float], pdf: Callable[[float], float],
                 lo: float, hi: float, per_decade: int = 40) -> Callable:
    """Cubic Hermite interpolant of F in log x using exact slopes x f(x);
    points outside [lo, hi] are evaluated directly."""
    if not 0 < lo < hi:
        raise DomainError("tabulation range must satisfy 0 < lo < hi")
    n = max(8, int(per_decade * math.log10(hi / lo)) + 1)
    t = np.linspace(math.log(lo), math.log(hi), n)
    xs = np.exp(t)
    F = np.array([_as_float(cdf(x)) for x in xs])
    dF = np.array([x * _as_float(pdf(x)) for x in xs])
    spline = interpolate.CubicHermiteSpline(t, F, dF)

    def table(x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        inside = (x >= lo) & (x <= hi)
        out[inside] = spline(np.log(x[inside]))
        for j in np.flatnonzero(~inside):
            out[j] = _as_float(cdf(float(x[j]))) if x[j] > 0 else 0.0
        return np.clip(out, 0.0, 1.0)

    return table


def ml_cdf_table(p: MLParams, sample) -> Callable:
    v = _values(sample)
    lo = max(float(v[v > 0].min()) if np.any(v > 0) else 1e-300, 1e-300)
    hi = max(float(v.max()), lo * 10)
    return tabulate_cdf(lambda x: ml_cdf(x, p), lambda x: ml_pdf(x, p), lo, hi)


@lru_cache(maxsize=16)
def _levy_table(alpha: float, lo: float, hi: float):
    return tabulate_cdf(lambda u: levy_cdf(u, alpha), lambda u: levy_pdf(u, alpha), lo, hi)


def levy_cdf_table(alpha: float, sample=None, scale: float = 1.0) -> Callable:
    """CDF of ``scale * U`` with U positive stable(alpha), tabulated over the sample range."""
    if sample is None:
        lo, hi = 1e-3, 1e12
    else:
        v = _values(sample) / scale
        lo = float(10 ** math.floor(math.log10(max(v[v > 0].min(), 1e-300))))
        hi = float(10 ** math.ceil(math.log10(max(v.max(), lo * 10))))
    base = _levy_table(float(alpha), lo, hi)
    return lambda x: base(np.asarray(x, dtype=float) / scale)


# ----------------------------------------------------------------------------
# convergence reports

CSV_COLUMNS = ("step", "s", "analytic", "limit", "gap", "empirical", "stderr", "ks")


@dataclass
class ConvergenceReport:
    kind: str
    n_or_beta: list
    s_values: list
    analytic_values: list
    limit_values: list
    empirical: Optional[list] = None
    stderr: Optional[list] = None
    empirical_ks: Optional[list] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        m, k = len(self.n_or_beta), len(self.s_values)
        if len(self.analytic_values) != k or any(len(r) != m for r in self.analytic_values):
            raise DomainError("analytic_values must be |s| x |steps|")
        if len(self.limit_values) != k:
            raise DomainError("limit_values must have one entry per s")

    def gaps(self) -> np.ndarray:
        return np.abs(np.asarray(self.analytic_values) - np.asarray(self.limit_values)[:, None])

    @property
    def monotone_gap(self) -> bool:
        g = self.gaps().max(axis=0)
        return bool(np.all(np.diff(g) <= 0))

    @property
    def strictly_decreasing(self) -> bool:
        g = self.gaps()
        return bool(np.all(np.diff(g, axis=1) < 0))

    def rows(self) -> list:
        out = []
        for j, step in enumerate(self.n_or_beta):
            for i, s in enumerate(self.s_values):
                a = self.analytic_values[i][j]
                lim = self.limit_values[i]
                emp = self.empirical[i][j] if self.empirical else None
                se = self.stderr[i][j] if self.stderr else None
                ks = self.empirical_ks[j] if self.empirical_ks else None
                out.append([step, s, a, lim, abs(a - lim), emp, se, ks])
        return out

    def meta(self) -> dict:
        m = {"report": self.kind, "version": __version__}
        m.update(self.params)
        m["monotone_gap"] = self.monotone_gap
        return m

    def to_json(self) -> str:
        return render_json(self.meta(), CSV_COLUMNS, self.rows())

    def to_csv(self) -> str:
        return render_csv(self.meta(), CSV_COLUMNS, self.rows())


def _laplace_probe(probe) -> TransformProbe:
    probe = probe if isinstance(probe, TransformProbe) else TransformProbe(probe)
    if probe.kind != "laplace":
        raise DomainError("convergence reports use Laplace probes")
    return probe


def _increasing(seq, name):
    if len(seq) == 0 or any(b <= a for a, b in zip(seq, seq[1:])):
        raise DomainError(f"{name} must be a nonempty increasing sequence")


def clt_convergence_report(p: MLParams, n_list: Sequence[int], probe, mc_size: int = 0,
                           seed: int = 0, stream_id: int = 0) -> ConvergenceReport:
    """Laplace transform of w = (x_1 + ... + x_n) / n^(1/alpha) against its limit exp(-delta beta s^alpha)."""
    probe = _laplace_probe(probe)
    n_list = [int(n) for n in n_list]
    _increasing(n_list, "n_list")
    if n_list[0] < 1:
        raise DomainError("n must be >= 1")
    a, b, d = p.alpha, p.beta, p.delta
    analytic = [[math.exp(-n * b * math.log1p(d * s ** a / n)) for n in n_list] for s in probe.s_values]
    limit = [math.exp(-d * b * s ** a) for s in probe.s_values]
    emp = se = None
    if mc_size > 0:
        emp = [[0.0] * len(n_list) for _ in probe.s_values]
        se = [[0.0] * len(n_list) for _ in probe.s_values]
        for j, n in enumerate(n_list):
            rng = make_stream(seed, stream_id + j)
            total = np.zeros(mc_size)
            for _ in range(n):
                total += ml_sample_array(rng, p, mc_size)
            w = total / n ** (1.0 / a)
            el = empirical_laplace(w, probe)
            for i in range(len(probe.s_values)):
                emp[i][j], se[i][j] = float(el[i, 0]), float(el[i, 1])
    params = {"alpha": a, "beta": b, "delta": d, "mc_size": mc_size, "seed": seed,
              "stream_id": stream_id}
    return ConvergenceReport("limit-clt", n_list, list(probe.s_values), analytic, limit, emp, se,
                             None, params)


def levy_limit_report(p: MLParams, beta_list: Sequence[float], probe, mc_size: int = 0,
                      seed: int = 0, stream_id: int = 0) -> ConvergenceReport:
    """ML(alpha, beta, delta/beta) against delta^(1/alpha) times a positive stable variate."""
    probe = _laplace_probe(probe)
    beta_list = [float(v) for v in beta_list]
    _increasing(beta_list, "beta_list")
    a, d = p.alpha, p.delta
    analytic = [[math.exp(-bb * math.log1p(d / bb * s ** a)) for bb in beta_list] for s in probe.s_values]
    limit = [math.exp(-d * s ** a) for s in probe.s_values]
    emp = se = ks = None
    if mc_size > 0:
        emp = [[0.0] * len(beta_list) for _ in probe.s_values]
        se = [[0.0] * len(beta_list) for _ in probe.s_values]
        ks = []
        scale = d ** (1.0 / a)
        for j, bb in enumerate(beta_list):
            rng = make_stream(seed, stream_id + j)
            x = ml_sample_array(rng, MLParams(a, bb, d / bb), mc_size)
            el = empirical_laplace(x, probe)
            for i in range(len(probe.s_values)):
                emp[i][j], se[i][j] = float(el[i, 0]), float(el[i, 1])
            if a < 1:
                ks.append(ks_statistic(x, levy_cdf_table(a, x, scale)))
            else:
                ks.append(float(np.max(np.abs(x - scale))))
    params = {"alpha": a, "delta": d, "mc_size": mc_size, "seed": seed, "stream_id": stream_id}
    return ConvergenceReport("limit-levy", beta_list, list(probe.s_values), analytic, limit, emp,
                             se, ks, params)


# ----------------------------------------------------------------------------
# quick self-check battery used by the command line


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    target: float
    tolerance: float
    passed: bool


def _check(name, value, target, tol, kind="abs") -> Check:
    if kind == "below":
        ok = value < target
    elif kind == "rel":
        ok = abs(value - target) <= tol * abs(target)
    else:
        ok = abs(value - target) <= tol
    return Check(name, float(value), float(target), float(tol), bool(ok))


def run_checks(p: MLParams, size: int = 100_000, seed: int = 0, stream_id: int = 0) -> list:
    """Deterministic oracles plus a seeded sampler check for one parameter set."""
    from .ml_core import ml_mellin, mellin_strip
    from .sampling import gamma_power_mellin
    from .stable_levy import levy_mellin

    f = lambda x: ml_pdf(x, p)
    out = [_check("normalization", total_mass(f), 1.0, 1e-6)]
    s_lap = (0.25, 0.5, 1.0, 2.0)
    lap = transform_oracle(f, TransformProbe(s_lap))
    for s, v in zip(s_lap, lap):
        out.append(_check(f"laplace_oracle s={s!r}", v, ml_laplace(s, p), 1e-8))
    lo, hi = mellin_strip(p)
    s_mel = tuple(lo + (hi - lo) * t for t in (0.25, 0.5, 0.75))
    mel = transform_oracle(f, TransformProbe(s_mel, "mellin", (lo, hi)))
    for s, v in zip(s_mel, mel):
        out.append(_check(f"mellin_oracle s={s!r}", v, ml_mellin(s, p), 1e-7))
    if p.alpha < 1:
        for s in s_mel:
            prod = levy_mellin(s, p.alpha) * gamma_power_mellin(s, p.beta, p.delta, p.alpha)
            out.append(_check(f"factorization s={s!r}", prod, ml_mellin(s, p), 1e-12, "rel"))
    x = ml_sample_array(make_stream(seed, stream_id), p, size)
    emp = empirical_laplace(x, TransformProbe(s_lap))
    for s, (m, se) in zip(s_lap, emp):
        out.append(_check(f"sampler_laplace s={s!r}", m, ml_laplace(s, p), 3 * se))
    out.append(_check("sampler_ks", ks_statistic(x, ml_cdf_table(p, x)), ks_critical(size), 0.0,
                      "below"))
    return out
