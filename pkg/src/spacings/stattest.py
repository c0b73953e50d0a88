"""One- and two-sample spacing tests, plus classical baselines.

The two-sample statistic counts how many second-sample points land between
consecutive order statistics of the first sample and takes a weighted
p-th-power norm of the counts; under the null the count vector is a
uniform weak composition.  The one-sample statistic applies the null CDF
and takes the same norm of the resulting gaps; under the null the gaps are
uniform on the simplex.  P-values come from the exact pmf, from
moment-based CDF reconstruction, or from a normal limit, and every
stochastic choice (tie breaking) is driven by an explicit seed.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from gmpy2 import mpq, mpz

from .moments import (
    StatisticSpec,
    WeightVector,
    continuous_moments,
    discrete_moments,
    statistic_scale,
)
from .numeric import binomial
from .oracle import Pmf, exact_pmf, mann_whitney_pmf, rank_sum_offset
from .reconstruct import CdfEstimate, reconstruct_cdf

Side = Literal["left", "right", "two-sided"]

PMF_AUTO_CAP = 10 ** 6
DEFAULT_DISCRETE_M = 600
DEFAULT_CONTINUOUS_M = 1000
MOMENTS_GRID_CAP = 120_000  # (n+1)(M+1) ceiling for the auto exact-moments route
CLT_SMALL_K = 20


@dataclass(frozen=True)
class TestResult:
    """Outcome of one hypothesis test; fully determined by inputs and seed."""

    raw_statistic: float
    normalized_statistic: float
    p_value: float
    side: Side
    method: str
    moments_used: int
    certified_error: float | None
    seed: int | None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p-value outside [0,1]")
        if self.certified_error is not None and self.certified_error < 0:
            raise ValueError("certified error must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "raw_statistic": self.raw_statistic,
            "normalized_statistic": self.normalized_statistic,
            "p_value": self.p_value,
            "side": self.side,
            "method": self.method,
            "moments_used": self.moments_used,
            "certified_error": self.certified_error,
            "seed": self.seed,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class NullCdfSpec:
    """Continuous null distribution for the one-sample test."""

    family: Literal["uniform", "normal", "exponential", "table"]
    params: tuple = ()

    @classmethod
    def uniform(cls) -> "NullCdfSpec":
        return cls("uniform")

    @classmethod
    def normal(cls, mu: float, sigma: float) -> "NullCdfSpec":
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        return cls("normal", (mu, sigma))

    @classmethod
    def exponential(cls, rate: float) -> "NullCdfSpec":
        if rate <= 0:
            raise ValueError("rate must be positive")
        return cls("exponential", (rate,))

    @classmethod
    def table(cls, xs: Sequence[float], fs: Sequence[float]) -> "NullCdfSpec":
        xs = tuple(float(x) for x in xs)
        fs = tuple(float(f) for f in fs)
        if len(xs) != len(fs) or len(xs) < 2:
            raise ValueError("table needs matching x/F arrays of length >= 2")
        if any(b <= a for a, b in zip(xs, xs[1:])) or any(b < a for a, b in zip(fs, fs[1:])):
            raise ValueError("table must be strictly increasing in x, nondecreasing in F")
        if not (abs(fs[0]) < 1e-12 and abs(fs[-1] - 1) < 1e-12):
            raise ValueError("table must span F=0 to F=1")
        return cls("table", (xs, fs))

    @classmethod
    def parse(cls, text: str) -> "NullCdfSpec":
        """Parse CLI-style specs: uniform | normal:mu,sigma | exp:rate."""
        name, _, arg = text.partition(":")
        try:
            if name == "uniform":
                return cls.uniform()
            if name == "normal":
                mu, sigma = (float(v) for v in arg.split(","))
                return cls.normal(mu, sigma)
            if name in ("exp", "exponential"):
                return cls.exponential(float(arg))
        except (ValueError, TypeError) as exc:
            raise ValueError(f"bad null spec {text!r}: {exc}") from None
        raise ValueError(f"unknown null family {name!r}")

    def check_support(self, z: np.ndarray) -> None:
        if self.family == "uniform" and ((z < 0).any() or (z > 1).any()):
            raise ValueError("sample outside the uniform support [0,1]")
        if self.family == "exponential" and (z < 0).any():
            raise ValueError("sample outside the exponential support [0,inf)")
        if self.family == "table":
            xs, _ = self.params
            if (z < xs[0]).any() or (z > xs[-1]).any():
                raise ValueError("sample outside the tabulated support")

    def cdf(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self.family == "uniform":
            return np.clip(z, 0.0, 1.0)
        if self.family == "normal":
            mu, sigma = self.params
            return _norm_cdf((z - mu) / sigma)
        if self.family == "exponential":
            (rate,) = self.params
            return -np.expm1(-rate * z)
        xs, fs = self.params
        return np.interp(z, xs, fs)


def _norm_cdf(z: np.ndarray) -> np.ndarray:
    from scipy.stats import norm

    return norm.cdf(z)


# ---------------------------------------------------------------------------
# spacing construction
# ---------------------------------------------------------------------------

def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def two_sample_spacings(x, y, seed=0) -> np.ndarray:
    """Counts of y-values between consecutive order statistics of x.

    Bins are [X_(j-1), X_(j)) with sentinels at -inf and +inf, so the
    result has length len(x)+1 and sums to len(y).  Exact ties anywhere in
    the pooled sample are broken by a seeded random strict order that
    depends only on the sample sizes and the seed, which keeps the counts
    invariant under monotone transformations of the data.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0:
        raise ValueError("first sample must be non-empty")
    rng = _as_rng(seed)
    pooled = np.concatenate([x, y])
    tiebreak = rng.permutation(pooled.size)
    order = np.lexsort((tiebreak, pooled))
    is_x = order < x.size
    x_before = np.cumsum(is_x)
    bins = x_before[~is_x]  # per y, number of x's strictly before it
    return np.bincount(bins, minlength=x.size + 1).astype(np.int64)


def one_sample_spacings(z, null_cdf: NullCdfSpec) -> np.ndarray:
    """Gaps of 0, F(z_(1)), ..., F(z_(N)), 1 under the null CDF F."""
    z = np.asarray(z, dtype=float)
    if z.size < 1:
        raise ValueError("sample must contain at least one value")
    null_cdf.check_support(z)
    u = np.sort(null_cdf.cdf(z))
    padded = np.concatenate([[0.0], u, [1.0]])
    return np.diff(padded)


def _weighted_norm_exact(counts: np.ndarray, p: int, weights: WeightVector) -> mpq:
    return sum(
        (w * mpz(int(c)) ** p for w, c in zip(weights.entries, counts)), mpq(0)
    )


# ---------------------------------------------------------------------------
# null distributions (precomputable, shared across replicates)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteNull:
    """Null law of the two-sample statistic under one of the three methods."""

    spec: StatisticSpec
    method: str
    pmf: Pmf | None = None
    estimate: CdfEstimate | None = None
    clt_mean: float | None = None
    clt_sd: float | None = None

    def pvalues(self, stat: mpq) -> tuple[float, float]:
        """(left, right) tail p-values at the exact statistic value."""
        if self.method == "oracle-pmf":
            left, right = self.pmf.tail_probabilities(stat)
            return float(left), float(right)
        if self.method == "exact-moments":
            s = float(stat / statistic_scale(self.spec))
            return self.estimate.pvalues(s)
        z = (float(stat) - self.clt_mean) / self.clt_sd
        return _phi(z), _phi(-z)

    @property
    def moments_used(self) -> int:
        if self.method == "exact-moments":
            return self.estimate.M
        if self.method == "clt":
            return 2
        return 0

    @property
    def certified_error(self) -> float | None:
        if self.method == "oracle-pmf":
            return 0.0
        if self.method == "exact-moments":
            return self.estimate.error_bound
        return None


def _phi(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def two_sample_null(
    n: int,
    k: int,
    p: int,
    weights: WeightVector,
    method: str = "auto",
    M: int | None = None,
    pmf_cap: int = PMF_AUTO_CAP,
) -> DiscreteNull:
    """Precompute the null distribution for repeated testing at fixed sizes.

    Results are cached; treat them as immutable.
    """
    if method == "auto":
        method = _auto_method(n, k, M or DEFAULT_DISCRETE_M, pmf_cap)
    return _two_sample_null_cached(n, k, p, weights, method, M, pmf_cap)


@functools.lru_cache(maxsize=64)
def _two_sample_null_cached(
    n: int,
    k: int,
    p: int,
    weights: WeightVector,
    method: str,
    M: int | None,
    pmf_cap: int,
) -> DiscreteNull:
    spec = StatisticSpec.discrete(n, k, p, weights)
    if method == "oracle-pmf":
        return DiscreteNull(spec, "oracle-pmf", pmf=exact_pmf(spec, cap=max(pmf_cap, PMF_AUTO_CAP)))
    if method == "exact-moments":
        ms = discrete_moments(spec, M or DEFAULT_DISCRETE_M)
        return DiscreteNull(spec, "exact-moments", estimate=reconstruct_cdf(ms))
    if method == "clt":
        mean, sd = clt_standardization(spec)
        return DiscreteNull(spec, "clt", clt_mean=mean, clt_sd=sd)
    raise ValueError(f"unknown method {method!r}")


def _auto_method(n: int, k: int, M: int, pmf_cap: int) -> str:
    if binomial(n + k - 1, k - 1) <= pmf_cap:
        return "oracle-pmf"
    if (n + 1) * (M + 1) <= MOMENTS_GRID_CAP:
        return "exact-moments"
    return "clt"


def clt_standardization(spec: StatisticSpec) -> tuple[float, float]:
    """Normal-limit mean and sd of the statistic from exact moments.

    The centering uses the exact first two moments of the unit-weight
    statistic scaled by the weight sums; weights must be strictly positive.
    """
    if any(w <= 0 for w in spec.weights.entries):
        raise ValueError("normal limit requires strictly positive weights")
    unit = StatisticSpec.discrete(spec.n, spec.k, spec.p, WeightVector.uniform(spec.k))
    ms = discrete_moments(unit, 2)
    mean_unit = ms.raw(1) / spec.k
    var_unit = (ms.raw(2) - ms.raw(1) ** 2) / spec.k
    wsum = sum(spec.weights.entries, mpq(0))
    wsq = sum((w * w for w in spec.weights.entries), mpq(0))
    mean = float(mean_unit * wsum)
    sd = math.sqrt(float(var_unit * wsq))
    return mean, sd


def clt_pvalue(spec: StatisticSpec, statistic: float, side: Side = "two-sided") -> float:
    """Normal-limit p-value for the discrete statistic."""
    mean, sd = clt_standardization(spec)
    z = (float(statistic) - mean) / sd
    return _combine(_phi(z), _phi(-z), side)


def _combine(left: float, right: float, side: Side) -> float:
    if side == "left":
        return min(1.0, left)
    if side == "right":
        return min(1.0, right)
    if side == "two-sided":
        return min(1.0, 2.0 * min(left, right))
    raise ValueError(f"unknown side {side!r}")


# ---------------------------------------------------------------------------
# the two headline tests
# ---------------------------------------------------------------------------

def two_sample_test(
    x,
    y,
    p: int = 2,
    weights=None,
    side: Side = "two-sided",
    method: str = "auto",
    M: int | None = None,
    alpha: float = 0.05,
    seed: int = 0,
    null: DiscreteNull | None = None,
    pmf_cap: int = PMF_AUTO_CAP,
) -> TestResult:
    """Two-sample test of equal generating distributions.

    The first sample defines k = len(x)+1 bins; the second fills them.
    `method` is one of auto, oracle-pmf, exact-moments, clt; auto prefers
    the exact pmf when binom(n+k-1, k-1) <= pmf_cap, then moment
    reconstruction, then the normal limit.  A precomputed `null` (from
    two_sample_null) is reused across calls with identical sizes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0:
        raise ValueError("first sample must be non-empty")
    k = x.size + 1
    n = y.size
    w = weights if isinstance(weights, WeightVector) else (
        WeightVector.uniform(k) if weights is None else WeightVector.of(weights)
    )
    if w.k != k:
        raise ValueError(f"weights length {w.k} != k = {k}")
    counts = two_sample_spacings(x, y, seed=seed)
    if n == 0:
        return TestResult(0.0, 0.0, 1.0, side, "oracle-pmf", 0, 0.0, seed)
    stat = _weighted_norm_exact(counts, p, w)
    scale = statistic_scale(StatisticSpec.discrete(n, k, p, w))
    warnings: list[str] = []
    if null is None:
        chosen = method
        if chosen == "auto":
            chosen = _auto_method(n, k, M or DEFAULT_DISCRETE_M, pmf_cap)
        if chosen == "clt" and k < CLT_SMALL_K:
            warnings.append(f"clt requested with k={k} < {CLT_SMALL_K}; normal limit is unreliable")
        null = two_sample_null(n, k, p, w, method=chosen, M=M, pmf_cap=pmf_cap)
    else:
        expected = StatisticSpec.discrete(n, k, p, w)
        if null.spec != expected:
            raise ValueError("precomputed null does not match the data sizes/weights")
        if null.method == "clt" and k < CLT_SMALL_K:
            warnings.append(f"clt requested with k={k} < {CLT_SMALL_K}; normal limit is unreliable")
    left, right = null.pvalues(stat)
    return TestResult(
        raw_statistic=float(stat),
        normalized_statistic=float(stat / scale),
        p_value=_combine(left, right, side),
        side=side,
        method=null.method,
        moments_used=null.moments_used,
        certified_error=null.certified_error,
        seed=seed,
        warnings=tuple(warnings),
    )


@functools.lru_cache(maxsize=64)
def one_sample_null(
    k: int, p: int, weights: WeightVector, M: int | None = None
) -> CdfEstimate:
    """Reconstructed null CDF of the one-sample (simplex) statistic (cached)."""
    spec = StatisticSpec.continuous(k, p, weights)
    ms = continuous_moments(spec, M or DEFAULT_CONTINUOUS_M)
    return reconstruct_cdf(ms)


def one_sample_test(
    z,
    null_cdf: NullCdfSpec,
    p: int = 2,
    weights=None,
    side: Side = "two-sided",
    M: int | None = None,
    alpha: float = 0.05,
    null: CdfEstimate | None = None,
) -> TestResult:
    """One-sample goodness-of-fit test against a fully specified CDF.

    A sample of size N is transformed through the null CDF and the k = N+1
    gaps (both endpoints included) feed the weighted norm; the p-value
    comes from the reconstructed continuous null law.
    """
    z = np.asarray(z, dtype=float)
    gaps = one_sample_spacings(z, null_cdf)
    k = gaps.size
    w = weights if isinstance(weights, WeightVector) else (
        WeightVector.uniform(k) if weights is None else WeightVector.of(weights)
    )
    if w.k != k:
        raise ValueError(f"weights length {w.k} != N+1 = {k}")
    spec = StatisticSpec.continuous(k, p, w)
    wf = np.array([float(v) for v in w.entries])
    stat = float(np.sum(wf * gaps ** p))
    scale = float(statistic_scale(spec))
    if null is None:
        null = one_sample_null(k, p, w, M=M)
    norm_stat = stat / scale
    left, right = null.pvalues(norm_stat)
    return TestResult(
        raw_statistic=stat,
        normalized_statistic=norm_stat,
        p_value=_combine(left, right, side),
        side=side,
        method="exact-moments",
        moments_used=null.M,
        certified_error=null.error_bound,
        seed=None,
    )


# ---------------------------------------------------------------------------
# classical baselines
# ---------------------------------------------------------------------------

def _baseline_result(stat: float, pvalue: float, method: str, side: Side = "two-sided") -> TestResult:
    return TestResult(
        raw_statistic=float(stat),
        normalized_statistic=float(stat),
        p_value=float(min(1.0, max(0.0, pvalue))),
        side=side,
        method=method,
        moments_used=0,
        certified_error=None,
        seed=None,
    )


def ks_two_sample(x, y) -> TestResult:
    from scipy import stats

    res = stats.ks_2samp(x, y)
    return _baseline_result(res.statistic, res.pvalue, "ks-two-sample")


def cvm_two_sample(x, y) -> TestResult:
    from scipy import stats

    res = stats.cramervonmises_2samp(x, y)
    return _baseline_result(res.statistic, res.pvalue, "cvm-two-sample")


def mann_whitney(x, y, exact_cap: int = 10 ** 6) -> TestResult:
    """Rank-sum test; exact via the two-term recursion when feasible."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pooled = np.concatenate([x, y])
    has_ties = np.unique(pooled).size < pooled.size
    n, k = y.size, x.size + 1
    if not has_ties and binomial(n + k - 1, k - 1) <= exact_cap:
        counts = two_sample_spacings(x, y)
        wdown = WeightVector.of(range(k - 1, -1, -1))
        stat = _weighted_norm_exact(counts, 1, wdown)
        ranksum = stat + rank_sum_offset(k)
        pmf = mann_whitney_pmf(n, k)
        left, right = pmf.tail_probabilities(stat)
        return TestResult(
            raw_statistic=float(ranksum),
            normalized_statistic=float(ranksum),
            p_value=min(1.0, 2.0 * float(min(left, right))),
            side="two-sided",
            method="mann-whitney-exact",
            moments_used=0,
            certified_error=0.0,
            seed=None,
        )
    from scipy import stats

    res = stats.mannwhitneyu(x, y, alternative="two-sided")
    return _baseline_result(res.statistic, res.pvalue, "mann-whitney-normal")


def ks_one_sample(z, null_cdf: NullCdfSpec) -> TestResult:
    from scipy import stats

    res = stats.kstest(np.asarray(z, dtype=float), null_cdf.cdf)
    return _baseline_result(res.statistic, res.pvalue, "ks-one-sample")


def cvm_one_sample(z, null_cdf: NullCdfSpec) -> TestResult:
    from scipy import stats

    res = stats.cramervonmises(np.asarray(z, dtype=float), null_cdf.cdf)
    return _baseline_result(res.statistic, res.pvalue, "cvm-one-sample")


def chi2_uniformity(z, bins: int = 5) -> TestResult:
    """Pearson chi-square of binned counts against the uniform law on [0,1]."""
    from scipy import stats

    z = np.asarray(z, dtype=float)
    if (z < 0).any() or (z > 1).any():
        raise ValueError("chi2_uniformity expects values in [0,1]")
    counts, _ = np.histogram(z, bins=bins, range=(0.0, 1.0))
    res = stats.chisquare(counts)
    return _baseline_result(res.statistic, res.pvalue, "chi2-uniformity")
