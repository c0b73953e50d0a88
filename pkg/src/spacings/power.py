"""Power studies, weight/exponent selection, and ensemble tests.

All experiments are driven by replicate-indexed seed sequences, so results
are bit-identical across runs and independent of any worker parallelism.
The heteroskedasticity objective is an exact rational computed from the
exact null pmf and the two degenerate large/small-scale limits of the bin
count vector.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
from gmpy2 import mpq, mpz

from .moments import StatisticSpec, WeightVector
from .numeric import binomial, rational
from .oracle import exact_pmf
from .stattest import (
    NullCdfSpec,
    Side,
    TestResult,
    chi2_uniformity,
    cvm_one_sample,
    cvm_two_sample,
    ks_one_sample,
    ks_two_sample,
    mann_whitney,
    one_sample_null,
    one_sample_test,
    two_sample_null,
    two_sample_test,
)


# ---------------------------------------------------------------------------
# alternatives and samplers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArrivalDist:
    """Inter-arrival distribution for uniformity experiments."""

    family: Literal["exponential", "erlang", "hyperexp"]
    params: tuple

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "ArrivalDist":
        return cls("exponential", (rate,))

    @classmethod
    def erlang(cls, shape: int, mean: float = 1.0) -> "ArrivalDist":
        """Erlang with given shape; squared coefficient of variation 1/shape."""
        return cls("erlang", (shape, mean))

    @classmethod
    def hyperexp(cls, probs: Sequence[float], rates: Sequence[float]) -> "ArrivalDist":
        return cls("hyperexp", (tuple(probs), tuple(rates)))

    def cv_squared(self) -> float:
        if self.family == "exponential":
            return 1.0
        if self.family == "erlang":
            return 1.0 / self.params[0]
        probs, rates = self.params
        m1 = sum(p / r for p, r in zip(probs, rates))
        m2 = sum(2.0 * p / r ** 2 for p, r in zip(probs, rates))
        return (m2 - m1 ** 2) / m1 ** 2

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.family == "exponential":
            (rate,) = self.params
            return rng.exponential(1.0 / rate, size)
        if self.family == "erlang":
            shape, mean = self.params
            return rng.gamma(shape, mean / shape, size)
        probs, rates = self.params
        comp = rng.choice(len(probs), size=size, p=np.asarray(probs))
        return rng.exponential(1.0, size) / np.asarray(rates)[comp]


@dataclass(frozen=True)
class AlternativeSpec:
    """Alternative family for power studies.

    scale(sigma): Y = sigma * X.  location(mu): Y = X + mu.
    location-scale(mu, sigma): Y = sigma * X + mu.
    mixture: list of (probability, AlternativeSpec), sampled per replicate.
    spiked: arrival vector with one overdispersed entry at a uniform index.
    """

    family: Literal["scale", "location", "location-scale", "mixture", "spiked", "arrivals"]
    params: tuple = ()

    @classmethod
    def scale(cls, sigma: float) -> "AlternativeSpec":
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        return cls("scale", (sigma,))

    @classmethod
    def location(cls, mu: float) -> "AlternativeSpec":
        return cls("location", (mu,))

    @classmethod
    def location_scale(cls, mu: float, sigma: float) -> "AlternativeSpec":
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        return cls("location-scale", (mu, sigma))

    @classmethod
    def mixture(cls, components: Sequence[tuple[float, "AlternativeSpec"]]) -> "AlternativeSpec":
        total = sum(w for w, _ in components)
        if abs(total - 1.0) > 1e-9:
            raise ValueError("mixture weights must sum to 1")
        return cls("mixture", tuple(components))

    @classmethod
    def spiked(cls, minus: ArrivalDist, plus: ArrivalDist) -> "AlternativeSpec":
        return cls("spiked", (minus, plus))

    @classmethod
    def arrivals(cls, dist: ArrivalDist) -> "AlternativeSpec":
        return cls("arrivals", (dist,))

    def apply(self, base: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Transform a null-distributed sample into an alternative one."""
        if self.family == "scale":
            return base * self.params[0]
        if self.family == "location":
            return base + self.params[0]
        if self.family == "location-scale":
            mu, sigma = self.params
            return base * sigma + mu
        if self.family == "mixture":
            weights = [w for w, _ in self.params]
            idx = rng.choice(len(self.params), p=weights)
            return self.params[idx][1].apply(base, rng)
        raise ValueError(f"{self.family} alternative does not transform samples")

    def sample_arrivals(self, rng: np.random.Generator, k: int) -> np.ndarray:
        """Draw k inter-arrival times under the alternative."""
        if self.family == "spiked":
            minus, plus = self.params
            t = minus.sample(rng, k)
            t[rng.integers(k)] = plus.sample(rng, 1)[0]
            return t
        if self.family == "arrivals":
            return self.params[0].sample(rng, k)
        if self.family == "mixture":
            weights = [w for w, _ in self.params]
            idx = rng.choice(len(self.params), p=weights)
            return self.params[idx][1].sample_arrivals(rng, k)
        raise ValueError(f"{self.family} alternative does not generate arrivals")


def normal_sampler(mu: float = 0.0, sigma: float = 1.0) -> Callable:
    return lambda rng, size: rng.normal(mu, sigma, size)


def uniform_sampler() -> Callable:
    return lambda rng, size: rng.random(size)


def arrivals_to_points(t: np.ndarray) -> np.ndarray:
    """Normalized partial sums of k arrival times: k-1 points in (0,1)."""
    return np.cumsum(t)[:-1] / np.sum(t)


# ---------------------------------------------------------------------------
# power estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerEstimate:
    power: float
    standard_error: float
    alpha: float
    replicates: int
    seed: int

    def __post_init__(self):
        expected = math.sqrt(self.power * (1.0 - self.power) / self.replicates)
        if abs(self.standard_error - expected) > 1e-12:
            raise ValueError("standard error must equal sqrt(p(1-p)/replicates)")


@dataclass(frozen=True)
class TestConfig:
    """Which spacing test a power experiment runs."""

    __test__ = False  # keep pytest from collecting this as a test class

    kind: Literal["two-sample", "one-sample"]
    p: int = 2
    weights: WeightVector | None = None
    side: Side = "two-sided"
    method: str = "auto"
    M: int | None = None


def _worker_count() -> int:
    value = os.environ.get("MOCHIS_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def _replicate_map(fn, replicates: int) -> list:
    workers = _worker_count()
    indices = range(replicates)
    if workers == 1:
        return [fn(r) for r in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, indices))


def _rng_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


def replicate_pvalues(
    test: TestConfig,
    null_sampler: Callable,
    alt: AlternativeSpec | None,
    k: int,
    n: int,
    replicates: int,
    seed: int,
) -> np.ndarray:
    """P-values across seeded replicates; alt=None draws from the null."""
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    weights = test.weights or WeightVector.uniform(k)
    if test.kind == "two-sample":
        null = two_sample_null(n, k, test.p, weights, method=test.method, M=test.M)

        def one(r: int) -> float:
            rng = _rng_for(seed, r)
            x = np.asarray(null_sampler(rng, k - 1), dtype=float)
            y = np.asarray(null_sampler(rng, n), dtype=float)
            if alt is not None:
                y = alt.apply(y, rng)
            res = two_sample_test(
                x, y, test.p, weights, side=test.side, seed=int(rng.integers(2 ** 31)),
                null=null,
            )
            return res.p_value

    elif test.kind == "one-sample":
        null = one_sample_null(k, test.p, weights, M=test.M)
        uniform = NullCdfSpec.uniform()

        def one(r: int) -> float:
            rng = _rng_for(seed, r)
            if alt is None:
                t = rng.exponential(1.0, k)
            else:
                t = alt.sample_arrivals(rng, k)
            z = arrivals_to_points(t)
            res = one_sample_test(z, uniform, test.p, weights, side=test.side, null=null)
            return res.p_value

    else:
        raise ValueError(f"unknown test kind {test.kind!r}")
    return np.array(_replicate_map(one, replicates))


def estimate_power(
    test: TestConfig,
    null_sampler: Callable,
    alt: AlternativeSpec | None,
    k: int,
    n: int,
    replicates: int,
    alpha: float = 0.05,
    seed: int = 0,
) -> PowerEstimate:
    """Fraction of seeded replicates rejected at level alpha."""
    pvals = replicate_pvalues(test, null_sampler, alt, k, n, replicates, seed)
    power = float(np.mean(pvals <= alpha))
    se = math.sqrt(power * (1.0 - power) / replicates)
    return PowerEstimate(power, se, alpha, replicates, seed)


def roc_curve(
    test: TestConfig,
    null_sampler: Callable,
    alt: AlternativeSpec | None,
    replicates: int,
    alphas: Sequence[float],
    k: int,
    n: int,
    seed: int = 0,
) -> list[tuple[float, float, float]]:
    """(alpha, power, se) rows over an alpha grid; power is monotone in alpha."""
    pvals = replicate_pvalues(test, null_sampler, alt, k, n, replicates, seed)
    rows = []
    for a in alphas:
        power = float(np.mean(pvals <= a))
        rows.append((float(a), power, math.sqrt(power * (1.0 - power) / replicates)))
    return rows


# ---------------------------------------------------------------------------
# ensemble test (union of tests at a split threshold)
# ---------------------------------------------------------------------------

def ensemble_test(
    configs: Sequence[tuple[int, Sequence]],
    x,
    y,
    alpha: float = 0.05,
    seed: int = 0,
    method: str = "auto",
    M: int | None = None,
) -> TestResult:
    """Union test over several (p, weights) members.

    Each member runs at level alpha/len(configs); the reported p-value is
    the smallest member p-value scaled by the member count (capped at 1),
    so `p_value <= alpha` reproduces the union decision.
    """
    if not configs:
        raise ValueError("need at least one (p, weights) config")
    members = [
        two_sample_test(x, y, p, weights, method=method, M=M, seed=seed)
        for p, weights in configs
    ]
    best = min(members, key=lambda r: r.p_value)
    certified = [m.certified_error for m in members]
    return TestResult(
        raw_statistic=best.raw_statistic,
        normalized_statistic=best.normalized_statistic,
        p_value=min(1.0, len(members) * best.p_value),
        side=best.side,
        method="ensemble",
        moments_used=max(m.moments_used for m in members),
        certified_error=None if any(c is None for c in certified) else max(certified),
        seed=seed,
        warnings=tuple(w for m in members for w in m.warnings),
    )


# ---------------------------------------------------------------------------
# heteroskedasticity objective and parameter search
# ---------------------------------------------------------------------------

def _binomial_pmf_exact(n: int, q: mpq) -> list[mpq]:
    return [binomial(n, i) * q ** i * (1 - q) ** (n - i) for i in range(n + 1)]


def heteroskedastic_objective(
    p: int, weights, n: int, k: int, F0, cap: int = 10 ** 9
) -> mpq:
    """Null probability that the statistic escapes the degenerate-scale bracket.

    As the alternative scale grows the count vector collapses onto
    (N_inf, 0, ..., 0, n - N_inf) with N_inf ~ Binomial(n, F0); as it
    shrinks, all n counts land in the single bin holding F^{-1}(0), whose
    index is 1 + Binomial(k-1, F0).  The objective averages, over both
    binomial mixtures, the exact null probability that the statistic falls
    outside the interval spanned by the two limit values.  Small values
    mean the bracket is a high-probability acceptance region, hence a
    powerful scale test.
    """
    w = weights if isinstance(weights, WeightVector) else WeightVector.of(weights)
    if w.k != k:
        raise ValueError("weights length must equal k")
    if w.all_zero:
        return mpq(0)
    q0 = rational(F0)
    if not 0 < q0 < 1:
        raise ValueError("F0 must lie strictly inside (0,1)")
    spec = StatisticSpec.discrete(n, k, p, w)
    pmf = exact_pmf(spec, cap=cap)
    support = pmf.support()
    probs = [pmf.entries[v] for v in support]
    prefix = []
    acc = mpq(0)
    for pr in probs:
        acc += pr
        prefix.append(acc)

    import bisect

    def prob_in(lo: mpq, hi: mpq) -> mpq:
        left = bisect.bisect_left(support, lo)
        right = bisect.bisect_right(support, hi)
        if right == 0 or left >= len(support) or left >= right:
            return mpq(0)
        upper = prefix[right - 1]
        lower = prefix[left - 1] if left > 0 else mpq(0)
        return upper - lower

    n_pow = mpz(n) ** p
    inf_probs = _binomial_pmf_exact(n, q0)
    bin_probs = _binomial_pmf_exact(k - 1, q0)
    total = mpq(0)
    for i, pi in enumerate(inf_probs):
        v_inf = w.entries[0] * mpz(i) ** p + w.entries[-1] * mpz(n - i) ** p
        for b, pb in enumerate(bin_probs):
            v_zero = w.entries[b] * n_pow
            lo, hi = (v_inf, v_zero) if v_inf <= v_zero else (v_zero, v_inf)
            total += pi * pb * (1 - prob_in(lo, hi))
    return total


def _expand_template(free: Sequence[mpq], k: int, template: str) -> WeightVector:
    free = list(free)
    if template == "symmetric":
        mirrored = free + free[: k - len(free)][::-1]
        return WeightVector(tuple(mirrored[:k]))
    if template == "monotone":
        ordered = sorted(free, reverse=True)
        return WeightVector(tuple(ordered))
    return WeightVector(tuple(free))


def _free_count(k: int, template: str) -> int:
    if template == "symmetric":
        return (k + 1) // 2
    return k


def search_parameters(
    objective: Callable[[int, WeightVector], object],
    p_grid: Sequence[int],
    weight_search_config: dict,
    seed: int = 0,
) -> tuple[int, WeightVector, object]:
    """Coordinate-descent grid minimizer over templated weight vectors.

    weight_search_config keys: k (required), grid (candidate coordinate
    values, default j/10 for j=0..10), template ("symmetric" | "monotone"
    | "free"), starts (explicit starting weight vectors), restarts (random
    restarts per p), sweeps (coordinate passes, default 3).
    """
    if not p_grid:
        raise ValueError("p grid must be non-empty")
    k = weight_search_config["k"]
    grid = [rational(g) for g in weight_search_config.get("grid", [mpq(j, 10) for j in range(11)])]
    template = weight_search_config.get("template", "symmetric")
    sweeps = weight_search_config.get("sweeps", 3)
    restarts = weight_search_config.get("restarts", 2)
    starts = [
        [rational(v) for v in s] for s in weight_search_config.get("starts", [])
    ]
    nfree = _free_count(k, template)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 97]))
    start_vectors = [s[:nfree] for s in starts if len(s) >= nfree]
    for _ in range(restarts):
        start_vectors.append([grid[i] for i in rng.integers(0, len(grid), nfree)])
    if not start_vectors:
        start_vectors.append([grid[-1]] + [grid[0]] * (nfree - 1))

    best: tuple[int, WeightVector, object] | None = None
    for p in p_grid:
        for start in start_vectors:
            free = list(start)
            current = objective(p, _expand_template(free, k, template))
            for _ in range(sweeps):
                improved = False
                for coord in range(nfree):
                    for candidate in grid:
                        if candidate == free[coord]:
                            continue
                        trial = list(free)
                        trial[coord] = candidate
                        w_trial = _expand_template(trial, k, template)
                        if w_trial.all_zero:
                            continue
                        value = objective(p, w_trial)
                        if value < current:
                            current = value
                            free = trial
                            improved = True
                if not improved:
                    break
            candidate = (p, _expand_template(free, k, template), current)
            if best is None or candidate[2] < best[2]:
                best = candidate
    return best


# ---------------------------------------------------------------------------
# figure-style studies: shared samples across all tests
# ---------------------------------------------------------------------------

TWO_SAMPLE_BASELINES = {
    "ks": lambda x, y: ks_two_sample(x, y),
    "cvm": lambda x, y: cvm_two_sample(x, y),
    "mw": lambda x, y: mann_whitney(x, y),
}


def two_sample_power_study(
    p: int,
    weights,
    k: int,
    n: int,
    alt: AlternativeSpec | None,
    replicates: int,
    alpha: float = 0.05,
    seed: int = 0,
    baselines: Sequence[str] = ("ks", "cvm", "mw"),
    null_sampler: Callable | None = None,
    method: str = "auto",
    M: int | None = None,
) -> dict:
    """Spacing-test power against baselines on a shared seed schedule.

    Every test sees the identical (x, y) pair in each replicate, so power
    differences are not sampling artifacts.
    """
    unknown = [b for b in baselines if b not in TWO_SAMPLE_BASELINES]
    if unknown:
        raise ValueError(f"unknown baselines: {unknown}")
    w = weights if isinstance(weights, WeightVector) else WeightVector.of(weights)
    sampler = null_sampler or normal_sampler()
    null = two_sample_null(n, k, p, w, method=method, M=M)
    pvals = {name: np.empty(replicates) for name in ("spacing", *baselines)}

    def one(r: int):
        rng = _rng_for(seed, r)
        x = np.asarray(sampler(rng, k - 1), dtype=float)
        y = np.asarray(sampler(rng, n), dtype=float)
        if alt is not None:
            y = alt.apply(y, rng)
        out = {"spacing": two_sample_test(x, y, p, w, null=null, seed=0).p_value}
        for name in baselines:
            out[name] = TWO_SAMPLE_BASELINES[name](x, y).p_value
        return out

    for r, row in enumerate(_replicate_map(one, replicates)):
        for name, val in row.items():
            pvals[name][r] = val
    powers = {name: float(np.mean(v <= alpha)) for name, v in pvals.items()}
    return {
        "alpha": alpha,
        "replicates": replicates,
        "seed": seed,
        "powers": powers,
        "pvalues": pvals,
    }


ONE_SAMPLE_BASELINES = {
    "chi2": lambda z: chi2_uniformity(z),
    "ks": lambda z: ks_one_sample(z, NullCdfSpec.uniform()),
    "cvm": lambda z: cvm_one_sample(z, NullCdfSpec.uniform()),
}


def one_sample_roc_study(
    p: int,
    weights,
    k: int,
    alt: AlternativeSpec,
    replicates: int,
    alphas: Sequence[float],
    seed: int = 0,
    baselines: Sequence[str] = ("chi2", "ks", "cvm"),
    M: int | None = None,
) -> dict:
    """ROC curves of the arrival-uniformity test against baselines."""
    unknown = [b for b in baselines if b not in ONE_SAMPLE_BASELINES]
    if unknown:
        raise ValueError(f"unknown baselines: {unknown}")
    w = weights if isinstance(weights, WeightVector) else WeightVector.of(weights)
    null = one_sample_null(k, p, w, M=M)
    uniform = NullCdfSpec.uniform()
    pvals = {name: np.empty(replicates) for name in ("spacing", *baselines)}

    def one(r: int):
        rng = _rng_for(seed, r)
        t = alt.sample_arrivals(rng, k)
        z = arrivals_to_points(t)
        out = {"spacing": one_sample_test(z, uniform, p, w, null=null).p_value}
        for name in baselines:
            out[name] = ONE_SAMPLE_BASELINES[name](z).p_value
        return out

    for r, row in enumerate(_replicate_map(one, replicates)):
        for name, val in row.items():
            pvals[name][r] = val
    curves = {
        name: [(float(a), float(np.mean(v <= a))) for a in alphas]
        for name, v in pvals.items()
    }
    return {
        "alphas": list(alphas),
        "replicates": replicates,
        "seed": seed,
        "curves": curves,
        "pvalues": pvals,
    }
