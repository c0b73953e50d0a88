"""Exact moment sequences of generalized spacing statistics.

The discrete statistic is the weighted p-th power norm of a uniformly
random weak composition of n into k parts; the continuous statistic is the
same functional of a uniform point on the (k-1)-simplex.  Both moment
sequences come out of coefficient extraction in truncated generating
function products, carried out over exact rationals.

Internally the series work in an integer representation: weights are
cleared by a common denominator d (substituting y -> y/d) and every
coefficient is scaled by M!, which turns the per-bin factors into integer
arrays while keeping all products exact.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from gmpy2 import mpq, mpz

from .numeric import (
    TruncatedPoly2,
    binomial,
    conv_int,
    conv2_int,
    factorial,
    rational,
)


class DegenerateStatisticError(ValueError):
    """Raised for all-zero weight vectors (the statistic is constant 0)."""


@dataclass(frozen=True)
class WeightVector:
    """Fixed weight vector w_1..w_k, exact rationals."""

    entries: tuple[mpq, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("weight vector must have length k >= 1")

    @classmethod
    def of(cls, values: Iterable) -> "WeightVector":
        return cls(tuple(rational(v) for v in values))

    @classmethod
    def uniform(cls, k: int) -> "WeightVector":
        return cls((mpq(1),) * k)

    @property
    def k(self) -> int:
        return len(self.entries)

    @property
    def ones_count(self) -> int:
        """Number of entries equal to 1 (drives the moment-decay limit)."""
        return sum(1 for w in self.entries if w == 1)

    @property
    def max_abs(self) -> mpq:
        return max(abs(w) for w in self.entries)

    @property
    def all_zero(self) -> bool:
        return all(w == 0 for w in self.entries)

    @property
    def nonnegative(self) -> bool:
        return all(w >= 0 for w in self.entries)

    def in_unit_interval(self) -> bool:
        return all(0 <= w <= 1 for w in self.entries)

    def cleared(self) -> tuple[tuple[int, ...], int]:
        """Integer numerators and the common denominator d with w_i = u_i/d."""
        den = 1
        for w in self.entries:
            g = gcd(den, int(w.denominator))
            den = den // g * int(w.denominator)
        nums = tuple(int(w.numerator) * (den // int(w.denominator)) for w in self.entries)
        return nums, den


def gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@dataclass(frozen=True)
class StatisticSpec:
    """Identifies one statistic: mode (discrete n / continuous), k, p, weights."""

    mode: Literal["discrete", "continuous"]
    k: int
    p: int
    weights: WeightVector
    n: int | None = None

    def __post_init__(self):
        if self.mode not in ("discrete", "continuous"):
            raise ValueError("mode must be 'discrete' or 'continuous'")
        if self.mode == "discrete" and (self.n is None or self.n < 0):
            raise ValueError("discrete mode requires n >= 0")
        if self.mode == "continuous" and self.n is not None:
            raise ValueError("continuous mode takes no n")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.p < 1:
            raise ValueError("p must be a positive integer")
        if self.weights.k != self.k:
            raise ValueError("weights length must equal k")

    @classmethod
    def discrete(cls, n: int, k: int, p: int, weights) -> "StatisticSpec":
        w = weights if isinstance(weights, WeightVector) else WeightVector.of(weights)
        return cls("discrete", k, p, w, n)

    @classmethod
    def continuous(cls, k: int, p: int, weights) -> "StatisticSpec":
        w = weights if isinstance(weights, WeightVector) else WeightVector.of(weights)
        return cls("continuous", k, p, w)


@dataclass(frozen=True)
class MomentSequence:
    """Moments mu_0..mu_M of statistic/scale, exact rationals.

    For nonnegative weights the normalized statistic lives in [0,1], so the
    sequence is completely monotone (Hausdorff condition); hausdorff_ok
    verifies the full finite-difference triangle.
    """

    spec: StatisticSpec
    scale: mpq
    values: tuple[mpq, ...]

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, m: int) -> mpq:
        return self.values[m]

    def raw(self, m: int) -> mpq:
        """Unnormalized moment E(statistic^m) = mu_m * scale^m."""
        return self.values[m] * self.scale ** m

    def hausdorff_ok(self) -> bool:
        """Check (-1)^r (delta^r mu)_j >= 0 for all r + j <= order."""
        row = list(self.values)
        sign = 1
        while row:
            if any(sign * x < 0 for x in row):
                return False
            row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
            sign = -sign
        return True


def statistic_scale(spec: StatisticSpec) -> mpq:
    """Normalization constant: max|w_j| * n^p (discrete) or max|w_j| (continuous)."""
    if spec.weights.all_zero:
        raise DegenerateStatisticError("all-zero weight vector")
    if spec.mode == "discrete":
        return spec.weights.max_abs * mpq(spec.n) ** spec.p
    return spec.weights.max_abs


def bin_series(n: int, M: int, p: int, w) -> TruncatedPoly2:
    """Per-bin factor of the discrete generating function, truncated at (n, M).

    Coefficient of x^s y^t is s^(pt) w^t / t! for s >= 1; the empty-bin
    term (s = t = 0) is 1 via the 0^0 = 1 convention, and s = 0 contributes
    nothing for t >= 1.
    """
    if n < 0 or M < 0:
        raise ValueError("degrees must be nonnegative")
    wq = rational(w)
    rows = []
    for s in range(n + 1):
        if s == 0:
            rows.append([mpq(1)] + [mpq(0)] * M)
            continue
        row = []
        sp = mpz(s) ** p
        for t in range(M + 1):
            row.append(mpq(sp ** t) * wq ** t / factorial(t))
        rows.append(row)
    return TruncatedPoly2.from_coeffs(rows, n, M)


# ---------------------------------------------------------------------------
# internal integer-cleared series
# ---------------------------------------------------------------------------

def _discrete_leaf(n: int, M: int, p: int, u: int, mfac: mpz) -> list[list[mpz]]:
    rows = [[mpz(0)] * (M + 1) for _ in range(n + 1)]
    rows[0][0] = mfac
    uz = mpz(u)
    for s in range(1, n + 1):
        sp = mpz(s) ** p
        spu = sp * uz
        acc = mfac
        row = rows[s]
        row[0] = mfac
        for t in range(1, M + 1):
            acc = acc * spu // t
            row[t] = acc
    return rows


def _series_product_2d(
    leaves: Sequence[tuple[int, int]], n: int, M: int, p: int, mfac: mpz
) -> list[list[mpz]]:
    """Product over (u, multiplicity) leaves; every node is M! * true coeffs."""

    def mul(a, b):
        out = conv2_int(a, b, n + 1, M + 1)
        return [[x // mfac for x in row] for row in out]

    def power(base, e):
        result = None
        while e:
            if e & 1:
                result = base if result is None else mul(result, base)
            e >>= 1
            if e:
                base = mul(base, base)
        return result

    nodes = [power(_discrete_leaf(n, M, p, u, mfac), mult) for u, mult in leaves]
    while len(nodes) > 1:
        nxt = [mul(nodes[i], nodes[i + 1]) for i in range(0, len(nodes) - 1, 2)]
        if len(nodes) % 2:
            nxt.append(nodes[-1])
        nodes = nxt
    return nodes[0]


def _discrete_series_raw(n: int, k: int, p: int, nums: tuple[int, ...], d: int, M: int):
    """Raw moments E(statistic^m), m = 0..M, via bivariate coefficient extraction."""
    mfac = factorial(M)
    counts: dict[int, int] = {}
    for u in nums:
        counts[u] = counts.get(u, 0) + 1
    top = _series_product_2d(sorted(counts.items()), n, M, p, mfac)
    B = binomial(n + k - 1, k - 1)
    dz = mpz(d)
    return [
        mpq(factorial(m) * top[n][m], B * mfac * dz ** m) for m in range(M + 1)
    ]


def _continuous_series_raw(k: int, p: int, nums: tuple[int, ...], d: int, M: int):
    """Raw moments of the simplex statistic via univariate coefficient extraction."""
    mfac = factorial(M)

    def leaf(u):
        out = [mpz(0)] * (M + 1)
        out[0] = mfac
        acc = mfac
        uz = mpz(u)
        for t in range(1, M + 1):
            # multiply by (pt)!/(p(t-1))! * u / t
            for j in range(p * (t - 1) + 1, p * t + 1):
                acc *= j
            acc = acc * uz // t
            out[t] = acc
        return out

    def mul(a, b):
        return [x // mfac for x in conv_int(a, b, M + 1)]

    def power(base, e):
        result = None
        while e:
            if e & 1:
                result = base if result is None else mul(result, base)
            e >>= 1
            if e:
                base = mul(base, base)
        return result

    counts: dict[int, int] = {}
    for u in nums:
        counts[u] = counts.get(u, 0) + 1
    nodes = [power(leaf(u), mult) for u, mult in sorted(counts.items())]
    while len(nodes) > 1:
        nxt = [mul(nodes[i], nodes[i + 1]) for i in range(0, len(nodes) - 1, 2)]
        if len(nodes) % 2:
            nxt.append(nodes[-1])
        nodes = nxt
    top = nodes[0]
    kf = factorial(k - 1)
    dz = mpz(d)
    return [
        mpq(kf * factorial(m) * top[m], factorial(p * m + k - 1) * mfac * dz ** m)
        for m in range(M + 1)
    ]


# ---------------------------------------------------------------------------
# public moment operations
# ---------------------------------------------------------------------------

def _check_weights(spec: StatisticSpec, allow_negative: bool) -> None:
    if spec.weights.all_zero:
        raise DegenerateStatisticError("all-zero weight vector")
    if not allow_negative and not spec.weights.nonnegative:
        raise ValueError(
            "negative weights put the normalized statistic outside [0,1]; "
            "pass allow_negative_weights=True for raw moment queries"
        )


@functools.lru_cache(maxsize=256)
def _discrete_moments_cached(
    n: int, k: int, p: int, entries: tuple, M: int, method: str, pmf_cap: int
) -> tuple:
    weights = WeightVector(entries)
    nums, d = weights.cleared()
    if method == "auto":
        method = _pick_discrete_method(n, k, p, nums, d, M)
    if method == "series":
        raw = _discrete_series_raw(n, k, p, nums, d, M)
    elif method == "pmf":
        from . import oracle

        spec = StatisticSpec.discrete(n, k, p, weights)
        pmf = oracle.exact_pmf(spec, cap=pmf_cap)
        raw = pmf.raw_moments(M)
    else:
        raise ValueError(f"unknown moment method {method!r}")
    return tuple(raw)


def _pick_discrete_method(n, k, p, nums, d, M) -> str:
    if n == 0:
        return "series"
    grid = (n + 1) * (M + 1)
    if grid <= 4096:
        return "series"
    value_grid = d * max(abs(u) for u in nums) * n ** p
    dp_work = k * n * min(value_grid + 1, (n + 1) ** min(k - 1, 4))
    if value_grid <= 2_000_000 and dp_work <= 200_000_000:
        return "pmf"
    return "series"


def discrete_moments(
    spec: StatisticSpec,
    M: int,
    method: str = "auto",
    allow_negative_weights: bool = False,
    pmf_cap: int = 10 ** 9,
) -> MomentSequence:
    """Exact normalized moments mu_0..mu_M of the composition statistic.

    mu_m * scale^m equals m!/binom(n+k-1,k-1) [x^n y^m] prod_i G(x, w_i y)
    where G carries the empty-bin constant term.  `method` selects the
    coefficient-extraction route ("series"), the value-indexed pmf route
    ("pmf"), or a cost-based choice ("auto"); all routes agree exactly.
    """
    if spec.mode != "discrete":
        raise ValueError("discrete_moments requires a discrete spec")
    if M < 0:
        raise ValueError("M must be >= 0")
    _check_weights(spec, allow_negative_weights)
    if spec.n == 0:
        scale = statistic_scale(spec)  # zero; the statistic is identically 0
        values = (mpq(1),) + (mpq(0),) * M
        return MomentSequence(spec, scale, values)
    raw = _discrete_moments_cached(
        spec.n, spec.k, spec.p, spec.weights.entries, M, method, pmf_cap
    )
    scale = statistic_scale(spec)
    values = tuple(r / scale ** m for m, r in enumerate(raw))
    return MomentSequence(spec, scale, values)


@functools.lru_cache(maxsize=256)
def _continuous_moments_cached(k: int, p: int, entries: tuple, M: int) -> tuple:
    weights = WeightVector(entries)
    nums, d = weights.cleared()
    return tuple(_continuous_series_raw(k, p, nums, d, M))


def continuous_moments(
    spec: StatisticSpec, M: int, allow_negative_weights: bool = False
) -> MomentSequence:
    """Exact normalized moments of the simplex statistic.

    mu_m * scale^m = (k-1)! m!/(pm+k-1)! [x^m] prod_j Q_p(w_j x), with
    Q_p(x) = sum_t (pt)! x^t / t!.
    """
    if spec.mode != "continuous":
        raise ValueError("continuous_moments requires a continuous spec")
    if M < 0:
        raise ValueError("M must be >= 0")
    _check_weights(spec, allow_negative_weights)
    raw = _continuous_moments_cached(spec.k, spec.p, spec.weights.entries, M)
    scale = statistic_scale(spec)
    values = tuple(r / scale ** m for m, r in enumerate(raw))
    return MomentSequence(spec, scale, values)


def moment_decay_limit(spec: StatisticSpec) -> mpq:
    """Limit of m^(k-1) E(statistic^m): (k-1)! W_w / p^(k-1).

    W_w counts weights equal to 1.  Requires p >= 2, k >= 2 and weights in
    [0,1].  For the squared-norm statistic with unit weights this is
    k!/2^(k-1).
    """
    if spec.p < 2 or spec.k < 2:
        raise ValueError("moment decay limit requires p >= 2 and k >= 2")
    if not spec.weights.in_unit_interval():
        raise ValueError("moment decay limit requires weights in [0,1]")
    return mpq(factorial(spec.k - 1) * spec.weights.ones_count, mpz(spec.p) ** (spec.k - 1))
