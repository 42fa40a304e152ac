"""Gamma and structural Mittag-Leffler samplers, plus reproducible batches.

A Mittag-Leffler variate is generated as ``u * v**(1/alpha)`` with ``u`` a
positive stable variate and ``v`` a gamma(beta, delta) variate.  Within one
call the stable part is always drawn before the gamma part, from the same
stream, so a (seed, stream_id) pair reproduces a batch bit for bit.

Streams are Philox counter-based generators keyed by
``SeedSequence(seed, spawn_key=(stream_id, chunk))`` and never overlap.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .errors import DomainError
from .ml_core import MLParams
from .stable_levy import StableParams, levy_sample, levy_sample_array, stable_mean_array

DIST_TAGS = ("ml", "levy", "gamma", "pathway")


def make_stream(seed: int, stream_id: int = 0, chunk: Optional[int] = None) -> np.random.Generator:
    """Independent generator for ``(seed, stream_id[, chunk])``."""
    if seed < 0 or stream_id < 0:
        raise DomainError("seed and stream_id must be nonnegative integers")
    key = (int(stream_id),) if chunk is None else (int(stream_id), int(chunk))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=key)))


def _check_gamma(beta: float, delta: float):
    if not beta > 0:
        raise DomainError(f"beta={beta} violates beta > 0")
    if not delta > 0:
        raise DomainError(f"delta={delta} violates delta > 0")


def gamma_sample(rng: np.random.Generator, beta: float, delta: float) -> float:
    _check_gamma(beta, delta)
    return float(delta * rng.standard_gamma(beta))


def gamma_sample_array(rng: np.random.Generator, beta: float, delta: float, size: int) -> np.ndarray:
    # numpy uses Marsaglia-Tsang rejection, with the U^(1/beta) boost for beta < 1
    _check_gamma(beta, delta)
    return delta * rng.standard_gamma(beta, size)


def gamma_power_mellin(s: float, beta: float, delta: float, alpha: float) -> float:
    """E[(v^(1/alpha))^(s-1)] = delta^((s-1)/alpha) Gamma(beta + (s-1)/alpha) / Gamma(beta)."""
    _check_gamma(beta, delta)
    if not alpha > 0:
        raise DomainError(f"alpha={alpha} violates alpha > 0")
    s = float(s)
    if not s > 1 - alpha * beta:
        raise DomainError(f"s={s} violates s > 1 - alpha*beta = {1 - alpha * beta}")
    t = (s - 1.0) / alpha
    return math.exp(t * math.log(delta) + math.lgamma(beta + t) - math.lgamma(beta))


def ml_sample(rng: np.random.Generator, p: MLParams) -> float:
    u = levy_sample(rng, StableParams(p.alpha))
    v = gamma_sample(rng, p.beta, p.delta)
    return u * v ** (1.0 / p.alpha)


def ml_sample_array(rng: np.random.Generator, p: MLParams, size: int) -> np.ndarray:
    u = levy_sample_array(rng, p.alpha, size)
    v = gamma_sample_array(rng, p.beta, p.delta, size)
    return u * v ** (1.0 / p.alpha)


def ml_sample_via_stable_mean(rng: np.random.Generator, p: MLParams, n: int) -> float:
    """t * v^(1/alpha) with t the normalized sum of n stable draws."""
    return float(ml_sample_via_stable_mean_array(rng, p, n, 1)[0])


def ml_sample_via_stable_mean_array(rng: np.random.Generator, p: MLParams, n: int,
                                    size: int) -> np.ndarray:
    t = stable_mean_array(rng, p.alpha, int(n), size)
    v = gamma_sample_array(rng, p.beta, p.delta, size)
    return t * v ** (1.0 / p.alpha)


@dataclass
class SampleBatch:
    """Seeded array of variates with the metadata that reproduces it."""

    values: np.ndarray
    seed: int
    stream_id: int
    dist_tag: str
    params_echo: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size == 0:
            raise DomainError("a sample batch must be a nonempty 1-d array")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise DomainError("sample values must be finite and nonnegative")
        if self.dist_tag not in DIST_TAGS:
            raise DomainError(f"unknown dist_tag {self.dist_tag!r}")

    def __len__(self):
        return self.values.size

    def header(self) -> dict:
        out = {"seed": self.seed, "stream_id": self.stream_id, "dist_tag": self.dist_tag,
               "params": self.params_echo, "size": int(self.values.size),
               "version": __version__}
        out.update(self.meta)
        return out

    def to_csv(self) -> str:
        lines = [f"# {k}={v}" for k, v in self.header().items()]
        lines.append("value")
        lines.extend(repr(float(x)) for x in self.values)
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"meta": self.header(), "values": [float(x) for x in self.values]})

    @classmethod
    def from_csv(cls, text: str) -> "SampleBatch":
        meta, values = {}, []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key] = val
            elif line.strip() and line.strip() != "value":
                values.append(float(line))
        return cls._from_meta(meta, values)

    @classmethod
    def from_json(cls, text: str) -> "SampleBatch":
        doc = json.loads(text)
        return cls._from_meta(dict(doc["meta"]), doc["values"])

    @classmethod
    def _from_meta(cls, meta: dict, values) -> "SampleBatch":
        seed = int(meta.pop("seed"))
        stream_id = int(meta.pop("stream_id"))
        tag = meta.pop("dist_tag")
        params = meta.pop("params")
        meta.pop("size", None)
        meta.pop("version", None)
        return cls(np.asarray(values, dtype=float), seed, stream_id, tag, params, meta)


def _draw(dist: str, params, size: int, rng: np.random.Generator, n: int) -> np.ndarray:
    if dist == "ml":
        if n > 1:
            return ml_sample_via_stable_mean_array(rng, params, n, size)
        return ml_sample_array(rng, params, size)
    if dist == "levy":
        alpha = params.alpha if hasattr(params, "alpha") else float(params)
        if n > 1:
            return stable_mean_array(rng, alpha, n, size)
        return levy_sample_array(rng, alpha, size)
    if dist == "gamma":
        beta, delta = params
        return gamma_sample_array(rng, beta, delta, size)
    if dist == "pathway":
        from .pathway import pathway_sample_array
        return pathway_sample_array(rng, params, size)
    raise DomainError(f"unknown distribution {dist!r}")


def _echo(dist: str, params) -> str:
    if hasattr(params, "echo"):
        return params.echo()
    if dist == "gamma":
        beta, delta = params
        return f"beta={float(beta)!r},delta={float(delta)!r}"
    return f"alpha={float(params)!r}"


def sample_batch(dist: str, params, size: int, seed: int, stream_id: int = 0, n: int = 1,
                 chunks: int = 1, workers: int = 1) -> SampleBatch:
    """Draw ``size`` variates.  ``n > 1`` selects the stable-mean construction
    (ml) or the normalized stable sum (levy).  With ``chunks > 1`` the batch is
    split across derived streams and merged in chunk order, so the result
    depends on ``chunks`` but never on ``workers``."""
    if size < 1:
        raise DomainError(f"size must be >= 1, got {size}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if chunks == 1:
        values = _draw(dist, params, size, make_stream(seed, stream_id), n)
    else:
        sizes = [size // chunks + (1 if i < size % chunks else 0) for i in range(chunks)]

        def job(i):
            return _draw(dist, params, sizes[i], make_stream(seed, stream_id, i), n)

        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            parts = list(pool.map(job, range(chunks)))
        values = np.concatenate(parts)
    echo = _echo(dist, params)
    if n > 1:
        echo += f",n={n}"
    meta = {"chunks": chunks} if chunks > 1 else {}
    return SampleBatch(values, seed, stream_id, dist, echo, meta)
