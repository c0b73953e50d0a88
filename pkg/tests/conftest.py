import numpy as np
import pytest
from gmpy2 import mpq, mpz

from spacings import StatisticSpec, enumerate_compositions


def enum_raw_moments(spec: StatisticSpec, M: int) -> list[mpq]:
    """Brute-force E(statistic^m) by walking all compositions."""
    w = spec.weights.entries
    totals = [mpq(0)] * (M + 1)
    count = 0
    for comp in enumerate_compositions(spec.n, spec.k):
        value = sum((w[j] * mpz(comp[j]) ** spec.p for j in range(spec.k)), mpq(0))
        acc = mpq(1)
        for m in range(M + 1):
            totals[m] += acc
            acc *= value
        count += 1
    return [t / count for t in totals]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
