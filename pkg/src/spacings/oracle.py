"""Ground-truth small-instance machinery.

Exhaustive enumeration over compositions, the exact value-indexed pmf
recursion, the classical two-term rank-statistic recursion, and seeded
Monte-Carlo samplers.  Everything here is either exactly rational or
driven by an explicit numpy Generator so runs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from gmpy2 import mpq, mpz

from .moments import StatisticSpec
from .numeric import binomial

Composition = tuple[int, ...]


class SizeCapError(ValueError):
    """Instance too large for the exact pmf recursion."""


def enumerate_compositions(n: int, k: int) -> Iterator[Composition]:
    """Yield every weak composition of n into k parts exactly once."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in enumerate_compositions(n - first, k - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class Pmf:
    """Exact finite pmf: statistic value -> probability, both rational."""

    entries: dict

    def __post_init__(self):
        total = sum(self.entries.values(), mpq(0))
        if total != 1:
            raise ValueError("probabilities must sum to exactly 1")
        if any(p <= 0 for p in self.entries.values()):
            raise ValueError("probabilities must be positive")

    def support(self) -> list[mpq]:
        return sorted(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, value) -> mpq:
        return self.entries.get(mpq(value), mpq(0))

    def raw_moments(self, M: int) -> list[mpq]:
        """E(value^m) for m = 0..M."""
        out = []
        powers = {v: mpq(1) for v in self.entries}
        for m in range(M + 1):
            out.append(sum((powers[v] * p for v, p in self.entries.items()), mpq(0)))
            if m < M:
                for v in powers:
                    powers[v] *= v
        return out

    def cdf_pairs(self) -> list[tuple[mpq, mpq]]:
        """Sorted (value, P(X <= value)) pairs."""
        acc = mpq(0)
        out = []
        for v in self.support():
            acc += self.entries[v]
            out.append((v, acc))
        return out

    def tail_probabilities(self, value) -> tuple[mpq, mpq]:
        """(P(X <= value), P(X >= value)), exact."""
        v = mpq(value)
        left = sum((p for x, p in self.entries.items() if x <= v), mpq(0))
        right = sum((p for x, p in self.entries.items() if x >= v), mpq(0))
        return left, right


def enumeration_pmf(spec: StatisticSpec) -> Pmf:
    """Brute-force pmf by walking all of the composition set (test oracle)."""
    if spec.mode != "discrete":
        raise ValueError("enumeration works on discrete specs")
    w = spec.weights.entries
    counts: dict[mpq, mpz] = {}
    total = 0
    for comp in enumerate_compositions(spec.n, spec.k):
        v = sum((w[j] * mpz(comp[j]) ** spec.p for j in range(spec.k)), mpq(0))
        counts[v] = counts.get(v, mpz(0)) + 1
        total += 1
    return Pmf({v: mpq(c, total) for v, c in counts.items()})


_INT64_SAFE = 2 ** 62


def exact_pmf(spec: StatisticSpec, cap: int = 10 ** 6) -> Pmf:
    """Exact pmf via the occupancy-conditioned recursion over bins.

    Runs a value-indexed dynamic program: after processing bin j the state
    maps (balls used, accumulated statistic) to a composition count, so the
    support is discovered rather than pre-declared.  Guarded by
    binom(n+k-1, k-1) <= cap.
    """
    if spec.mode != "discrete":
        raise ValueError("exact_pmf requires a discrete spec")
    n, k, p = spec.n, spec.k, spec.p
    B = binomial(n + k - 1, k - 1)
    if B > cap:
        raise SizeCapError(
            f"binom(n+k-1,k-1) = {B} exceeds the cap {cap}; raise `cap` explicitly"
        )
    nums, d = spec.weights.cleared()
    if all(u >= 0 for u in nums) and B < _INT64_SAFE:
        grid = _pmf_grid_int64(n, k, p, nums)
        if grid is not None:
            return Pmf({mpq(v, d): mpq(c, B) for v, c in grid})
    # dict DP, fully general
    states: dict[tuple[int, int], mpz] = {(0, 0): mpz(1)}
    powers = [mpz(s) ** p for s in range(n + 1)]
    for u in nums:
        nxt: dict[tuple[int, int], mpz] = {}
        for (b, v), c in states.items():
            for s in range(n - b + 1):
                key = (b + s, v + u * powers[s])
                if key in nxt:
                    nxt[key] += c
                else:
                    nxt[key] = c
        states = nxt
    counts: dict[int, mpz] = {}
    for (b, v), c in states.items():
        if b == n:
            counts[v] = counts.get(v, mpz(0)) + c
    return Pmf({mpq(v, d): mpq(c, B) for v, c in counts.items()})


def _pmf_grid_int64(n: int, k: int, p: int, nums: Sequence[int]):
    """Dense int64 DP over (balls, scaled value); None if the grid is too big."""
    vmax = max(nums) * n ** p
    if vmax > 4_000_000 or (n + 1) * (vmax + 1) > 80_000_000:
        return None
    dp = np.zeros((n + 1, vmax + 1), dtype=np.int64)
    dp[0, 0] = 1
    for u in nums:
        nxt = np.zeros_like(dp)
        for s in range(n + 1):
            shift = u * s ** p
            if shift == 0:
                nxt[s:, :] += dp[: n + 1 - s, :]
            else:
                nxt[s:, shift:] += dp[: n + 1 - s, : vmax + 1 - shift]
        dp = nxt
    row = dp[n]
    return [(int(v), int(row[v])) for v in np.nonzero(row)[0]]


def mann_whitney_pmf(n: int, k: int) -> Pmf:
    """Exact pmf of the rank statistic (p = 1, weights (k-1, k-2, ..., 1, 0)).

    Uses the two-term count recursion c(n,k,x) = c(n-1,k,x) + c(n,k-1,x-n):
    conditioning on whether the last bin is occupied.
    """
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    table: dict[tuple[int, int], dict[int, int]] = {}
    for kk in range(1, k + 1):
        for nn in range(n + 1):
            if nn == 0 or kk == 1:
                table[(nn, kk)] = {0: 1}
                continue
            counts = dict(table[(nn - 1, kk)])
            for x, c in table[(nn, kk - 1)].items():
                counts[x + nn] = counts.get(x + nn, 0) + c
            table[(nn, kk)] = counts
    B = binomial(n + k - 1, k - 1)
    return Pmf({mpq(x): mpq(c, B) for x, c in table[(n, k)].items()})


def rank_sum_offset(k: int) -> int:
    """Constant tying the rank-sum statistic to the spacing statistic.

    sum of x-ranks = offset + ||S||_{1,(k-1)down}; equals binom(k, 2)
    (settled by enumeration; see the oracle test suite).
    """
    return k * (k - 1) // 2


def sample_composition(n: int, k: int, rng: np.random.Generator) -> Composition:
    """One uniform weak composition of n into k parts (stars and bars)."""
    return tuple(sample_compositions(n, k, 1, rng)[0])


def sample_compositions(n: int, k: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """(size, k) array of independent uniform compositions."""
    if k == 1:
        return np.full((size, 1), n, dtype=np.int64)
    if n == 0:
        return np.zeros((size, k), dtype=np.int64)
    keys = rng.random((size, n + k - 1))
    bars = np.sort(np.argpartition(keys, k - 1, axis=1)[:, : k - 1], axis=1)
    edges = np.concatenate(
        [np.full((size, 1), -1), bars, np.full((size, 1), n + k - 1)], axis=1
    )
    return np.diff(edges, axis=1) - 1


def sample_spacings(k: int, rng: np.random.Generator) -> np.ndarray:
    """One uniform point of the (k-1)-simplex via sorted-uniform gaps."""
    return sample_spacings_batch(k, 1, rng)[0]


def sample_spacings_batch(k: int, size: int, rng: np.random.Generator) -> np.ndarray:
    if k == 1:
        return np.ones((size, 1))
    u = np.sort(rng.random((size, k - 1)), axis=1)
    padded = np.concatenate([np.zeros((size, 1)), u, np.ones((size, 1))], axis=1)
    return np.diff(padded, axis=1)


def monte_carlo_moments(
    spec: StatisticSpec, M: int, reps: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Empirical normalized moments with standard errors.

    Returns (estimates, standard_errors), both of length M+1; entry m
    estimates E((statistic/scale)^m).
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    from .moments import statistic_scale

    w = np.array([float(x) for x in spec.weights.entries])
    scale = float(statistic_scale(spec))
    stats = np.empty(reps)
    batch = max(1, min(reps, 200_000 // max(spec.k, 1) + 1))
    done = 0
    while done < reps:
        b = min(batch, reps - done)
        if spec.mode == "discrete":
            parts = sample_compositions(spec.n, spec.k, b, rng).astype(np.float64)
        else:
            parts = sample_spacings_batch(spec.k, b, rng)
        stats[done : done + b] = (parts ** spec.p) @ w
        done += b
    normalized = stats / scale
    est = np.empty(M + 1)
    se = np.empty(M + 1)
    powers = np.ones_like(normalized)
    for m in range(M + 1):
        est[m] = powers.mean()
        se[m] = powers.std(ddof=1) / np.sqrt(reps) if reps > 1 else 0.0
        if m < M:
            powers = powers * normalized
    return est, se
