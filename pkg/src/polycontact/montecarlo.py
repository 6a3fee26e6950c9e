"""Seeded SRW sampling and estimators for range, pattern and degeneracy statistics.

Every random step is a pure function of ``(seed, sample_index, step_index)``:
a SplitMix64 finaliser is applied to a per-sample stream key plus a step
counter. Samples can therefore be generated in any order, on any number of
workers, and each estimate is bit-identical for fixed parameters. Per-sample
values are collected into an array indexed by sample and reduced with numpy's
fixed-order pairwise summation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

from .census import CensusResult, run_census
from .lattice import Walk, WalkModel
from .patterns import BUILTIN_PATTERNS, PatternSpec, SiteIndex, certificate_size, pattern_centers

# read-only reference constants, reported alongside estimates
M1_Q = 2.78e-3
M1_P = 2.5e-3
A_P = 1.2e-2
FLUCTUATION_A = 1.3034

_MASK = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= _M1
    z ^= z >> np.uint64(27)
    z *= _M2
    z ^= z >> np.uint64(31)
    return z


def stream_keys(seed: int, indices) -> np.ndarray:
    """Per-sample 64-bit stream keys derived from ``(seed, index)``."""
    s = _mix64(np.array([(int(seed) & _MASK) ^ 0x6A09E667F3BCC909], dtype=np.uint64))
    k = np.asarray(indices, dtype=np.uint64) + np.uint64(1)
    return _mix64(s + k * _GOLDEN)


def random_directions(seed: int, indices, n_steps: int, n_dir: int) -> np.ndarray:
    """Uniform direction indices, shape ``(len(indices), n_steps)``."""
    keys = stream_keys(seed, np.atleast_1d(indices))[:, None]
    t = np.arange(1, n_steps + 1, dtype=np.uint64)[None, :]
    v = _mix64(keys + t * _GOLDEN)
    # multiply-shift on the high half: bias below 2^-32
    return (((v >> np.uint64(32)) * np.uint64(n_dir)) >> np.uint64(32)).astype(np.int64)


def _points_from_directions(dirs: np.ndarray, dimension: int) -> np.ndarray:
    """Positions ``(..., N+1, n)`` of walks with the given direction indices."""
    *lead, N = dirs.shape
    steps = np.zeros((*lead, N, dimension), dtype=np.int64)
    axis = dirs // 2
    sign = 1 - 2 * (dirs % 2)
    np.put_along_axis(steps, axis[..., None], sign[..., None], axis=-1)
    pts = np.zeros((*lead, N + 1, dimension), dtype=np.int64)
    np.cumsum(steps, axis=-2, out=pts[..., 1:, :])
    return pts


def srw_points(dimension: int, N: int, seed: int, sample_index: int) -> np.ndarray:
    dirs = random_directions(seed, [sample_index], N, 2 * dimension)[0]
    return _points_from_directions(dirs, dimension)


def sample_srw(dimension: int, N: int, seed: int, sample_index: int) -> Walk:
    """The SRW with ``N`` steps for stream ``(seed, sample_index)``."""
    return Walk.from_array(srw_points(dimension, N, seed, sample_index), WalkModel.SRW)


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int
    N: int
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, values: np.ndarray, seed: int, N: int, metadata: dict) -> "Estimate":
        values = np.asarray(values, dtype=float)
        n = len(values)
        mean = float(values.mean()) if n else float("nan")
        sd = float(values.std(ddof=1)) if n > 1 else 0.0
        return cls(mean, sd / math.sqrt(n) if n else float("nan"), n, int(seed), int(N), metadata)

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "N": self.N,
            "metadata": self.metadata,
        }

    def within(self, value: float, n_sigma: float = 4.0) -> bool:
        return abs(self.mean - value) <= n_sigma * self.stderr


def _per_sample(fn: Callable[[int], float], samples: int, n_jobs: int = 1) -> np.ndarray:
    out = np.empty(samples, dtype=float)
    if n_jobs <= 1:
        for k in range(samples):
            out[k] = fn(k)
        return out

    def chunk(bounds):
        lo, hi = bounds
        for k in range(lo, hi):
            out[k] = fn(k)

    edges = np.linspace(0, samples, 4 * n_jobs + 1).astype(int)
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        list(pool.map(chunk, zip(edges[:-1], edges[1:])))
    return out


def _walk_range(points: np.ndarray) -> int:
    return SiteIndex(points, pad=0).range


# -- exact small-N counterparts ------------------------------------------------


def exact_mean_range(dimension: int, N: int, census: CensusResult | None = None) -> float:
    census = census or run_census(WalkModel.SRW, dimension, N)
    total = sum(c.degeneracy * c.range_of_representative for c in census.classes.values())
    return total / census.total_walks


def exact_return_probability(dimension: int, steps: int) -> float:
    """P(w(steps) = 0) by exact counting of walk endpoints."""
    counts = {(0,) * dimension: 1}
    for _ in range(steps):
        nxt: dict = {}
        for p, c in counts.items():
            for a in range(dimension):
                for s in (1, -1):
                    q = p[:a] + (p[a] + s,) + p[a + 1:]
                    nxt[q] = nxt.get(q, 0) + c
        counts = nxt
    return counts.get((0,) * dimension, 0) / (2 * dimension) ** steps


def exact_small_range_prob(census: CensusResult, epsilon: float) -> float:
    N = census.N
    hits = sum(c.degeneracy for c in census.classes.values() if c.range_of_representative <= epsilon * N)
    return hits / census.total_walks


def tail_threshold(dimension: int, N: int, nu: float) -> float:
    """Exponent threshold nu N / (ln N)^2 on Z^2 and nu N otherwise."""
    if dimension == 2:
        if N < 2:
            raise ValueError("the Z^2 threshold needs N >= 2")
        return nu * N / math.log(N) ** 2
    return nu * N


def exact_degeneracy_tail(census: CensusResult, nu: float) -> float:
    """P(ln deg C >= threshold) under the uniform measure, from a census."""
    thr = tail_threshold(census.dimension, census.N, nu)
    hits = sum(c.degeneracy for c in census.classes.values() if math.log(c.degeneracy) >= thr)
    return hits / census.total_walks


# -- estimators -------------------------------------------------------------


def estimate_mean_range(dimension: int, N: int, samples: int, seed: int, *, n_jobs: int = 1) -> Estimate:
    """Sample mean of the number of distinct sites R_N."""
    vals = _per_sample(lambda k: _walk_range(srw_points(dimension, N, seed, k)), samples, n_jobs)
    meta = {"estimator": "mean_range", "dimension": dimension, "samples": samples}
    if dimension == 2 and N >= 1:
        meta["reference"] = math.pi * N / math.log(8 * N)
    return Estimate.from_values(vals, seed, N, meta)


def _resolve_pattern(pattern) -> PatternSpec:
    if isinstance(pattern, PatternSpec):
        return pattern
    try:
        return BUILTIN_PATTERNS[str(pattern).lower()]
    except KeyError:
        raise ValueError(f"unknown pattern {pattern!r}; expected 'q', 'p' or a PatternSpec") from None


def estimate_pattern_density(dimension: int, N: int, pattern, samples: int, seed: int, *,
                             n_jobs: int = 1) -> Estimate:
    """Mean number of pattern occurrences in the support, plus its normalised density.

    Q is normalised as ``E(Q_N) (ln 8N)^2 / (pi^2 N)`` and P as ``E(P_N) / N``;
    those land in ``metadata["normalized"]``.
    """
    pat = _resolve_pattern(pattern)
    if pat.dimension != dimension:
        raise ValueError(f"pattern {pat.name or '?'} is {pat.dimension}-dimensional, not {dimension}")
    vals = _per_sample(lambda k: len(pattern_centers(srw_points(dimension, N, seed, k), pat)), samples, n_jobs)
    est = Estimate.from_values(vals, seed, N, {})
    meta = {"estimator": "pattern_density", "pattern": pat.name or "custom", "dimension": dimension,
            "samples": samples}
    scale = None
    if pat.name == "q" and N >= 1:
        scale = math.log(8 * N) ** 2 / (math.pi ** 2 * N)
        meta.update(reference_m1=M1_Q, reference_fluctuation_A=FLUCTUATION_A)
    elif pat.name == "p" and N >= 1:
        scale = 1.0 / N
        meta.update(reference_m1=M1_P, reference_a_P=A_P)
    if scale is not None:
        meta["normalized"] = est.mean * scale
        meta["normalized_stderr"] = est.stderr * scale
    return Estimate(est.mean, est.stderr, est.n_samples, est.seed, est.N, meta)


def estimate_return_probability(dimension: int, steps: int, samples: int, seed: int, *,
                                batch: int = 1 << 16) -> Estimate:
    """Frequency of ``w(steps) = 0``; odd ``steps`` return the exact 0 without sampling."""
    meta = {"estimator": "return_probability", "dimension": dimension, "steps": steps, "samples": samples}
    if steps % 2:
        meta.update(exact=0.0, sampled=False)
        return Estimate(0.0, 0.0, 0, int(seed), steps, meta)
    hits = np.empty(samples, dtype=float)
    for lo in range(0, samples, batch):
        idx = np.arange(lo, min(lo + batch, samples))
        dirs = random_directions(seed, idx, steps, 2 * dimension)
        end = np.zeros((len(idx), dimension), dtype=np.int64)
        axis = dirs // 2
        sign = 1 - 2 * (dirs % 2)
        for a in range(dimension):
            end[:, a] = np.where(axis == a, sign, 0).sum(axis=1)
        hits[lo:lo + len(idx)] = (end == 0).all(axis=1)
    if (2 * dimension) ** steps <= 4 ** 12:
        meta["exact"] = exact_return_probability(dimension, steps)
    meta["sampled"] = True
    return Estimate.from_values(hits, seed, steps, meta)


def _binomial_meta(hits: int, n: int) -> dict:
    ci = stats.binomtest(hits, n).proportion_ci(confidence_level=0.95, method="exact")
    meta = {"ci95": [float(ci.low), float(ci.high)], "hits": hits}
    if hits == 0:
        meta["rare_event_limited"] = True
        meta["upper_bound"] = float(ci.high)
    return meta


def estimate_small_range_prob(dimension: int, N: int, epsilon: float, samples: int, seed: int, *,
                              n_jobs: int = 1) -> Estimate:
    """P(R_N / N <= epsilon) with an exact binomial 95% interval."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not 0 < epsilon:
        raise ValueError("epsilon must be positive")
    meta = {"estimator": "small_range_prob", "dimension": dimension, "epsilon": epsilon, "samples": samples}
    if epsilon >= 1 + 1 / N:
        meta.update(exact=1.0, sampled=False)
        return Estimate(1.0, 0.0, 0, int(seed), N, meta)
    vals = _per_sample(lambda k: float(_walk_range(srw_points(dimension, N, seed, k)) <= epsilon * N),
                       samples, n_jobs)
    meta.update(_binomial_meta(int(vals.sum()), samples))
    if dimension == 2 and N <= 8:
        meta["exact"] = exact_small_range_prob(run_census(WalkModel.SRW, dimension, N), epsilon)
    meta["sampled"] = True
    return Estimate.from_values(vals, seed, N, meta)


def estimate_degeneracy_tail(dimension: int, N: int, nu: float, samples: int, seed: int, *,
                             n_jobs: int = 1) -> Estimate:
    """Fraction of walks whose certificate exponent ``m ln 2`` reaches the threshold.

    Certificates undercount deg C, so this is a one-sided (conservative)
    estimate of P(deg C >= e^threshold). ``metadata["delta_upper_diagnostic"]``
    is the implied upper bound on delta_N.
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    thr = tail_threshold(dimension, N, nu)
    log2 = math.log(2)
    vals = _per_sample(lambda k: float(certificate_size(srw_points(dimension, N, seed, k)) * log2 >= thr),
                       samples, n_jobs)
    est = Estimate.from_values(vals, seed, N, {})
    if dimension == 2:
        diag = 1 - est.mean * nu / (math.log(4) * math.log(N) ** 2)
    else:
        diag = 1 - est.mean * nu / math.log(2 * dimension)
    meta = {
        "estimator": "degeneracy_tail",
        "dimension": dimension,
        "nu": nu,
        "threshold": thr,
        "samples": samples,
        "delta_upper_diagnostic": diag,
        "one_sided": "certificate lower bounds undercount deg C",
    }
    meta.update(_binomial_meta(int(vals.sum()), samples))
    return Estimate(est.mean, est.stderr, est.n_samples, est.seed, est.N, meta)
