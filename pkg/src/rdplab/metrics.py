"""Shared estimators: distortion, entropies, perception distances."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np

from .quadrature import adaptive_simpson

# Asymptotic Kolmogorov-Smirnov critical coefficient at alpha = 0.01.
# Acceptance gates use KS; Wasserstein-1 is reported for diagnostics only.
KS_COEFF_01 = 1.628


def ks_threshold(n_samples: int) -> float:
    """alpha = 0.01 acceptance threshold for the one-sample KS statistic."""
    return KS_COEFF_01 / math.sqrt(n_samples)


class RunningMoments:
    """One-pass (Welford) mean/variance accumulator with associative merge.

    Parallel use: one accumulator per worker, merged in a fixed order so
    results stay bit-reproducible.
    """

    __slots__ = ("n", "mean", "m2")

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def update(self, values) -> None:
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            return
        cnt = values.size
        mu = float(values.mean())
        m2 = float(((values - mu) ** 2).sum())
        self._combine(cnt, mu, m2)

    def merge(self, other: "RunningMoments") -> None:
        self._combine(other.n, other.mean, other.m2)

    def _combine(self, n_b, mean_b, m2_b):
        if n_b == 0:
            return
        n_a = self.n
        delta = mean_b - self.mean
        n = n_a + n_b
        self.mean += delta * n_b / n
        self.m2 += m2_b + delta * delta * n_a * n_b / n
        self.n = n

    def variance(self) -> float:
        if self.n < 2:
            return 0.0
        return self.m2 / (self.n - 1)

    def std(self) -> float:
        return math.sqrt(self.variance())

    def mc_radius(self) -> float:
        """Three-sigma Monte Carlo half-width of the mean estimate."""
        if self.n == 0:
            return 0.0
        return 3.0 * self.std() / math.sqrt(self.n)


def mse(pairs) -> tuple[float, float]:
    """Mean squared error over (x, xhat) pairs with its 3-sigma MC radius.

    ``pairs`` is either an iterable of 2-tuples or a pair of equal-length
    arrays.  Empty input is an error.
    """
    acc = RunningMoments()
    if isinstance(pairs, tuple) and len(pairs) == 2 \
            and isinstance(pairs[0], np.ndarray):
        x = np.asarray(pairs[0], dtype=float)
        xhat = np.asarray(pairs[1], dtype=float)
        if x.shape != xhat.shape:
            raise ValueError("x and xhat must have the same shape")
        acc.update((x - xhat) ** 2)
    else:
        for x, xhat in pairs:
            acc.update([(x - xhat) ** 2])
    if acc.n == 0:
        raise ValueError("mse of an empty stream")
    return acc.mean, acc.mc_radius()


def plugin_entropy(counts) -> float:
    """Plug-in entropy -sum p log2 p of a count table, in bits.

    Zero counts contribute nothing.  No bias correction is applied; at the
    sample sizes used here (>= 1e6) the bias is far below reporting
    precision.
    """
    if isinstance(counts, Mapping):
        values = np.asarray(list(counts.values()), dtype=float)
    else:
        values = np.asarray(counts, dtype=float).ravel()
    if np.any(values < 0):
        raise ValueError("negative count")
    total = values.sum()
    if total < 1:
        raise ValueError("plugin_entropy needs a total count >= 1")
    p = values[values > 0] / total
    return float(-(p * np.log2(p)).sum())


def avg_conditional_entropy(per_group_counts: Iterable) -> float:
    """Average of per-group plug-in entropies (one tailored code per group)."""
    ents = [plugin_entropy(c) for c in per_group_counts]
    if not ents:
        raise ValueError("no groups")
    return float(np.mean(ents))


def ks_statistic(samples, cdf) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a CDF callable."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 1:
        raise ValueError("ks_statistic needs at least one sample")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(max(d_plus, d_minus))


def wasserstein1(samples_a, samples_b) -> float:
    """Empirical W1: mean absolute gap between sorted order statistics."""
    a = np.sort(np.asarray(samples_a, dtype=float).ravel())
    b = np.sort(np.asarray(samples_b, dtype=float).ravel())
    if a.size != b.size or a.size == 0:
        raise ValueError("wasserstein1 needs two equal-length nonempty samples")
    return float(np.mean(np.abs(a - b)))


def differential_entropy_quadrature(pdf, support, tol: float = 1e-9) -> float:
    """-integral p ln p over the support, in nats, by adaptive Simpson."""
    lo, hi = support

    def integrand(x):
        p = pdf(x)
        if p <= 0.0:
            return 0.0
        return -p * math.log(p)

    return adaptive_simpson(integrand, lo, hi, tol=tol)


@dataclass(frozen=True)
class ExperimentResult:
    """Empirical statistics of one simulated coding scheme.

    ``rate_bits`` is the scheme's operational rate (index entropy for
    staggered coders, log2 L for fixed-rate dithered coders, average
    per-offset entropy for scalar staggered pipelines).
    ``index_entropy_bits`` is the plug-in entropy of the pooled transmitted
    index, kept as a diagnostic.
    """

    rate_bits: float
    mse: float
    perception_ks: float
    perception_w1: float
    n_samples: int
    seed: int
    mc_radius_mse: float
    index_entropy_bits: float

    def __post_init__(self):
        if self.mse < 0 or not 0.0 <= self.perception_ks <= 1.0:
            raise ValueError("malformed experiment result")
