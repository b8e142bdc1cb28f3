"""Convergence diagnostics over replicated path evaluations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import GridMismatch, OverlappingIncrements, TooFewSamples
from .kac_stroock import PathEvaluation

KS_SERIES_TOL = 1e-10


@dataclass
class SampleSet:
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.values.size == 0:
            raise TooFewSamples("a sample set must be non-empty")

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    sample_size: int
    label: str = ""

    def to_dict(self) -> dict:
        return {"label": self.label, "statistic": self.statistic, "p_value": self.p_value, "M": self.sample_size}


def normal_cdf(x):
    """Standard normal CDF; scalar in, float out, arrays map elementwise."""
    out = ndtr(x)
    return float(out) if np.ndim(out) == 0 else out


def kolmogorov_sf(lam: float) -> float:
    """``P(K > lam)`` for the limiting Kolmogorov distribution.

    Uses the alternating series for large ``lam`` and the theta-function
    form for small ``lam``; both are truncated once terms drop below
    ``KS_SERIES_TOL``.
    """
    if lam <= 0:
        return 1.0
    if lam < 1.18:
        total, k = 0.0, 1
        c = math.pi**2 / (8.0 * lam * lam)
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * c)
            total += term
            if term < KS_SERIES_TOL:
                break
            k += 1
        cdf = math.sqrt(2.0 * math.pi) / lam * total
        return min(1.0, max(0.0, 1.0 - cdf))
    total, k = 0.0, 1
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        total += term if k % 2 else -term
        if term < KS_SERIES_TOL:
            break
        k += 1
    return min(1.0, max(0.0, 2.0 * total))


def ks_statistic(values: np.ndarray, cdf: Callable) -> float:
    x = np.sort(np.asarray(values, dtype=float))
    m = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - f), np.max(f - (i - 1) / m)))


def ks_test(samples: SampleSet, cdf: Callable) -> KsResult:
    """One-sample Kolmogorov-Smirnov test with the asymptotic p-value."""
    m = len(samples)
    if m < 10:
        raise TooFewSamples(f"KS test needs at least 10 samples, got {m}")
    d = ks_statistic(samples.values, cdf)
    return KsResult(d, kolmogorov_sf(math.sqrt(m) * d), m, samples.label)


def ks_normal(samples: SampleSet, variance: float = 1.0) -> KsResult:
    """KS test against ``N(0, variance)`` by rescaling the samples to unit variance."""
    scaled = SampleSet(samples.values / math.sqrt(variance), samples.label)
    return ks_test(scaled, normal_cdf)


def empirical_moments(samples: SampleSet) -> tuple[float, float, float]:
    """``(mean, unbiased variance, standard error of the mean)``."""
    m = len(samples)
    if m < 2:
        raise TooFewSamples("need at least 2 samples for a variance")
    mean = float(np.mean(samples.values))
    var = float(np.var(samples.values, ddof=1))
    return mean, var, math.sqrt(var / m)


def _common_grid(paths: Sequence[PathEvaluation]) -> np.ndarray:
    grid = paths[0].grid
    for p in paths[1:]:
        if p.grid.shape != grid.shape or not np.array_equal(p.grid, grid):
            raise GridMismatch("path evaluations do not share a common grid")
    return grid


def _columns(paths: Sequence[PathEvaluation], times: Sequence[float], name: str = "x") -> np.ndarray:
    grid = _common_grid(paths)
    idx = []
    for t in times:
        hits = np.flatnonzero(np.abs(grid - t) <= 1e-12)
        if hits.size == 0:
            raise GridMismatch(f"time {t} is not a grid point")
        idx.append(hits[0])
    return np.stack([p.component(name)[idx] for p in paths])


@dataclass
class CovarianceEstimate:
    times: np.ndarray
    matrix: np.ndarray
    stderr: np.ndarray
    replicates: int

    def z_scores(self, target: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (self.matrix - target) / self.stderr
        return np.where(self.stderr > 0, z, np.where(self.matrix == target, 0.0, np.inf))

    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh(self.matrix)))


def covariance_grid(paths: Sequence[PathEvaluation], times: Sequence[float]) -> CovarianceEstimate:
    """Empirical ``Cov(X(s), X(t))`` across replicates, with per-entry standard errors.

    The standard error of entry ``(s, t)`` is the standard deviation of the
    centred products ``(X_s - mean_s)(X_t - mean_t)`` divided by ``sqrt(M)``.
    """
    if len(paths) < 2:
        raise TooFewSamples("covariance needs at least 2 paths")
    v = _columns(paths, times)
    m = v.shape[0]
    centred = v - v.mean(axis=0)
    products = centred[:, :, None] * centred[:, None, :]
    cov = products.sum(axis=0) / (m - 1)
    cov = 0.5 * (cov + cov.T)
    stderr = products.std(axis=0, ddof=1) / math.sqrt(m)
    return CovarianceEstimate(np.asarray(times, dtype=float), cov, stderr, m)


def sup_norm_stats(paths: Sequence[PathEvaluation], field: str = "x") -> SampleSet:
    """Per-replicate ``max_grid |field|`` for ``field`` in ``{"x", "w", "r"}``."""
    if not paths:
        raise TooFewSamples("no paths given")
    if field not in ("x", "w", "r"):
        raise ValueError(f"field must be one of x, w, r; got {field!r}")
    _common_grid(paths)
    sups = [float(np.max(np.abs(p.component(field)))) for p in paths]
    return SampleSet(np.array(sups), f"sup|{field}|")


def increment_independence_check(
    paths: Sequence[PathEvaluation], quadruple: tuple[float, float, float, float]
) -> tuple[float, float]:
    """Correlation of ``X(t1) - X(s1)`` and ``X(t2) - X(s2)`` for disjoint increments.

    Returns ``(corr, 1/sqrt(M))``.
    """
    s1, t1, s2, t2 = quadruple
    if not (s1 < t1 <= s2 < t2):
        raise OverlappingIncrements(f"increments ({s1},{t1}) and ({s2},{t2}) must satisfy s1 < t1 <= s2 < t2")
    if len(paths) < 3:
        raise TooFewSamples("correlation needs at least 3 paths")
    v = _columns(paths, (s1, t1, s2, t2))
    first = v[:, 1] - v[:, 0]
    second = v[:, 3] - v[:, 2]
    corr = float(np.corrcoef(first, second)[0, 1])
    return corr, 1.0 / math.sqrt(v.shape[0])
