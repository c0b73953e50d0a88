import itertools

import numpy as np
import pytest
from gmpy2 import mpq
from scipy import stats

from spacings import (
    SizeCapError,
    StatisticSpec,
    binomial,
    discrete_moments,
    enumerate_compositions,
    enumeration_pmf,
    exact_pmf,
    mann_whitney_pmf,
    monte_carlo_moments,
    rank_sum_offset,
    sample_composition,
    sample_compositions,
    sample_spacings,
    sample_spacings_batch,
)


class TestEnumerateCompositions:
    def test_small_set(self):
        assert set(enumerate_compositions(2, 2)) == {(2, 0), (1, 1), (0, 2)}

    def test_zero_balls(self):
        assert list(enumerate_compositions(0, 4)) == [(0, 0, 0, 0)]

    def test_count_matches_binomial(self):
        comps = list(enumerate_compositions(4, 3))
        assert len(comps) == len(set(comps)) == 15 == binomial(6, 2)
        for n, k in [(5, 4), (7, 2), (3, 5)]:
            assert sum(1 for _ in enumerate_compositions(n, k)) == binomial(n + k - 1, k - 1)


class TestExactPmf:
    def test_examples(self):
        pmf = exact_pmf(StatisticSpec.discrete(2, 2, 2, [1, 1]))
        assert pmf.entries == {mpq(4): mpq(2, 3), mpq(2): mpq(1, 3)}
        pmf = exact_pmf(StatisticSpec.discrete(0, 3, 2, [1, 1, 1]))
        assert pmf.entries == {mpq(0): mpq(1)}
        pmf = exact_pmf(StatisticSpec.discrete(3, 1, 2, [2]))
        assert pmf.entries == {mpq(18): mpq(1)}

    def test_probabilities_sum_to_one(self):
        pmf = exact_pmf(StatisticSpec.discrete(6, 4, 2, [1, "1/3", 2, 1]))
        assert sum(pmf.entries.values(), mpq(0)) == 1

    def test_matches_enumeration_including_rational_and_negative_weights(self, rng):
        for _ in range(12):
            n = int(rng.integers(0, 7))
            k = int(rng.integers(1, 5))
            p = int(rng.integers(1, 4))
            weights = [
                mpq(int(rng.integers(-3, 7)), int(rng.integers(1, 4))) for _ in range(k)
            ]
            spec = StatisticSpec.discrete(n, k, p, weights)
            assert exact_pmf(spec).entries == enumeration_pmf(spec).entries

    def test_size_cap(self):
        with pytest.raises(SizeCapError):
            exact_pmf(StatisticSpec.discrete(100, 10, 2, [1] * 10), cap=10 ** 6)
        # raising the cap admits the instance
        exact_pmf(StatisticSpec.discrete(30, 10, 1, [1] * 10), cap=10 ** 9)

    def test_moments_match_series_route(self):
        # cross-module closure: pmf power sums equal coefficient extraction
        for n, k, p in [(5, 3, 2), (6, 4, 1), (4, 2, 3)]:
            spec = StatisticSpec.discrete(n, k, p, list(range(1, k + 1)))
            pmf = exact_pmf(spec)
            series = discrete_moments(spec, 4, method="series")
            assert pmf.raw_moments(4) == [series.raw(m) for m in range(5)]


class TestMannWhitney:
    def test_examples(self):
        assert mann_whitney_pmf(2, 3).entries == {
            mpq(0): mpq(1, 6),
            mpq(1): mpq(1, 6),
            mpq(2): mpq(2, 6),
            mpq(3): mpq(1, 6),
            mpq(4): mpq(1, 6),
        }
        assert mann_whitney_pmf(3, 1).entries == {mpq(0): mpq(1)}
        assert mann_whitney_pmf(1, 2).entries == {mpq(0): mpq(1, 2), mpq(1): mpq(1, 2)}

    def test_equals_weighted_pmf(self):
        for n, k in itertools.product(range(0, 7), range(1, 7)):
            weights = list(range(k - 1, -1, -1))
            spec = StatisticSpec.discrete(n, k, 1, weights)
            assert mann_whitney_pmf(n, k).entries == exact_pmf(spec).entries

    def test_rank_sum_offset_by_enumeration(self, rng):
        # sum of x-ranks in the pooled sample equals offset + statistic;
        # the k=2 case already separates binom(k,2) from binom(k-1,2)
        from spacings import two_sample_spacings

        for _ in range(20):
            k = int(rng.integers(2, 7))
            n = int(rng.integers(0, 7))
            pooled = rng.normal(size=k - 1 + n)
            x, y = pooled[: k - 1], pooled[k - 1:]
            ranks = stats.rankdata(np.concatenate([x, y]))[: k - 1]
            counts = two_sample_spacings(x, y)
            statistic = sum((k - 1 - j) * int(c) for j, c in enumerate(counts))
            assert int(ranks.sum()) == rank_sum_offset(k) + statistic
        assert rank_sum_offset(2) == 1  # not binom(1,2) = 0


class TestSamplers:
    def test_degenerate_shapes(self):
        rng = np.random.default_rng(0)
        assert sample_composition(5, 1, rng) == (5,)
        assert sample_composition(0, 4, rng) == (0, 0, 0, 0)
        assert sample_spacings(1, rng).tolist() == [1.0]

    def test_composition_sampler_deterministic(self):
        a = sample_compositions(6, 3, 5, np.random.default_rng(42))
        b = sample_compositions(6, 3, 5, np.random.default_rng(42))
        assert (a == b).all()
        assert (a.sum(axis=1) == 6).all()

    def test_composition_sampler_uniform_chi2(self):
        rng = np.random.default_rng(7)
        draws = sample_compositions(3, 3, 10 ** 5, rng)
        comps = sorted(enumerate_compositions(3, 3))
        index = {c: i for i, c in enumerate(comps)}
        counts = np.zeros(len(comps))
        for row in map(tuple, draws.tolist()):
            counts[index[row]] += 1
        res = stats.chisquare(counts)
        assert res.pvalue > 1e-3

    def test_spacings_sum_to_one(self):
        rng = np.random.default_rng(3)
        gaps = sample_spacings_batch(8, 100, rng)
        assert np.abs(gaps.sum(axis=1) - 1.0).max() < 1e-12
        assert (gaps >= 0).all()

    def test_spacings_mean(self):
        rng = np.random.default_rng(11)
        k = 5
        gaps = sample_spacings_batch(k, 10 ** 6, rng)
        first = gaps[:, 0]
        se = first.std(ddof=1) / np.sqrt(len(first))
        assert abs(first.mean() - 1 / k) < 4 * se


class TestMonteCarloMoments:
    def test_constant_statistic(self):
        spec = StatisticSpec.discrete(1, 2, 1, [1, 1])
        est, se = monte_carlo_moments(spec, 3, 500, np.random.default_rng(0))
        assert np.allclose(est, 1.0) and np.allclose(se, 0.0)

    def test_continuous_k2_mean(self):
        spec = StatisticSpec.continuous(2, 2, [1, 1])
        est, se = monte_carlo_moments(spec, 1, 10 ** 5, np.random.default_rng(1))
        assert abs(est[1] - 2 / 3) < 4 * se[1]

    def test_discrete_mean(self):
        spec = StatisticSpec.discrete(2, 2, 2, [1, 1])
        est, se = monte_carlo_moments(spec, 1, 10 ** 5, np.random.default_rng(2))
        assert abs(est[1] - float(mpq(10, 3) / 4)) < 4 * se[1]
