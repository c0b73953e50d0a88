"""CDF recovery from exact moment sequences, with certified error bounds.

The estimator is the Bernstein-mass step function: with M moments the mass
at grid point j/M is binom(M,j) (-1)^(M-j) (delta^(M-j) mu)_j, a quantity
that is nonnegative exactly when the moment sequence is completely
monotone.  All finite differences are carried out in integer arithmetic on
a cleared common denominator; each mass is converted to floating point
only once it is a finished number in [0,1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpq, mpz

from .moments import MomentSequence, StatisticSpec
from .numeric import binomial

DEFAULT_DENSITY_ENVELOPE = 12.0  # default f_sup + 2 f'_sup + 2 in the continuous bound


class InvalidMomentsError(ValueError):
    """Moment sequence violates the complete-monotonicity condition."""


def bernstein_masses(values: Sequence[mpq], M: int) -> list[mpq]:
    """Exact Bernstein masses c_j = binom(M,j) (-1)^(M-j) (delta^(M-j) mu)_j."""
    if M + 1 > len(values):
        raise ValueError("need at least M+1 moments")
    mus = list(values[: M + 1])
    den = mpz(1)
    for x in mus:
        den = gmpy2.lcm(den, x.denominator)
    row = [mpz(x.numerator * (den // x.denominator)) for x in mus]
    # walk the difference triangle, keeping the entry at j = M - r per row
    anti = [row[M]]
    for r in range(1, M + 1):
        row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
        anti.append(row[M - r])
    masses = []
    for j in range(M + 1):
        r = M - j
        signed = anti[r] if r % 2 == 0 else -anti[r]
        masses.append(mpq(binomial(M, j) * signed, den))
    return masses


@dataclass
class CdfEstimate:
    """Monotone step CDF on [0,1] reconstructed from M exact moments."""

    M: int
    kind: Literal["continuous", "discrete"]
    error_bound: float
    masses: np.ndarray
    moments: MomentSequence | None = None
    cum: np.ndarray = field(init=False)

    def __post_init__(self):
        self.cum = np.cumsum(self.masses)
        self.cum[-1] = 1.0

    def cdf(self, x: float) -> float:
        """F_hat(x) = sum of masses at grid points j/M <= x."""
        if x < 0:
            return 0.0
        j = math.floor(x * self.M + 1e-12)
        return float(self.cum[min(j, self.M)])

    def cdf_below(self, x: float) -> float:
        """Left limit: sum of masses at grid points strictly below x."""
        j = math.ceil(x * self.M - 1e-12) - 1
        if j < 0:
            return 0.0
        return float(self.cum[min(j, self.M)])

    def quantile(self, q: float, side: Literal["lower", "upper"] = "lower") -> float:
        return quantile(self, q, side)

    def pvalues(self, x: float) -> tuple[float, float]:
        """(left, right) conservative tail p-values at a statistic value."""
        left = self.cdf(x)
        right = 1.0 - self.cdf_below(x)
        return left, right


def reconstruct_cdf(
    moments: MomentSequence,
    M: int | None = None,
    error_profile: dict | None = None,
) -> CdfEstimate:
    """Build the step-function CDF estimate from the first M moments.

    Raises InvalidMomentsError when any Bernstein mass is negative, which
    signals an upstream bug (the inputs were not moments of a [0,1]
    variable).  `error_profile` feeds the certified bound; see
    `error_bound` for the accepted shapes.  Without a profile the default
    continuous envelope is used.
    """
    if M is None:
        M = moments.order
    if M > moments.order:
        raise ValueError(f"requested M={M} but only {moments.order} moments available")
    exact = bernstein_masses(moments.values, M)
    bad = [j for j, c in enumerate(exact) if c < 0]
    if bad:
        raise InvalidMomentsError(
            f"Hausdorff condition violated: negative Bernstein mass at j={bad[0]}"
        )
    kind = "discrete" if moments.spec.mode == "discrete" else "continuous"
    if error_profile is None:
        bound = continuous_error_bound(DEFAULT_DENSITY_ENVELOPE - 2.0, 0.0, M)
    else:
        bound = error_bound(error_profile, M)
    masses = np.array([float(c) for c in exact])
    return CdfEstimate(M=M, kind=kind, error_bound=bound, masses=masses, moments=moments)


def continuous_error_bound(f_sup: float, fprime_sup: float, M: int) -> float:
    """Sup-norm certificate (f_sup + 2 f'_sup + 2)/(M+1) for C^1 densities."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if f_sup < 0 or fprime_sup < 0:
        raise ValueError("density bounds must be nonnegative")
    return (f_sup + 2.0 * fprime_sup + 2.0) / (M + 1)


def discrete_error_bound(support_size: int, mesh: float, M: int, epsilon: float) -> float:
    """Off-support certificate 2 e^(-2 M eps^2) + (|supp|-2) e^(-2 M h^2)."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if support_size < 2:
        raise ValueError("support must have at least two atoms")
    if not (0 < epsilon < mesh / 2):
        raise ValueError("need 0 < epsilon < mesh/2")
    return 2.0 * math.exp(-2.0 * M * epsilon ** 2) + (support_size - 2) * math.exp(
        -2.0 * M * mesh ** 2
    )


def error_bound(profile: dict, M: int, epsilon: float | None = None) -> float:
    """Dispatch on the profile kind.

    continuous: {"kind": "continuous", "f_sup": ..., "fprime_sup": ...}
    discrete:   {"kind": "discrete", "support_size": ..., "mesh": ...} plus
                epsilon (here or in the profile).
    """
    kind = profile.get("kind")
    if kind == "continuous":
        return continuous_error_bound(profile["f_sup"], profile.get("fprime_sup", 0.0), M)
    if kind == "discrete":
        eps = profile.get("epsilon", epsilon)
        if eps is None:
            raise ValueError("discrete profile requires epsilon")
        return discrete_error_bound(profile["support_size"], profile["mesh"], M, eps)
    raise ValueError(f"unknown error profile kind {kind!r}")


def quantile(estimate: CdfEstimate, q: float, side: Literal["lower", "upper"] = "lower") -> float:
    """Step-function quantile over the jump grid {j/M}.

    lower: inf{x : F_hat(x) >= q}; upper: sup{x : F_hat(x) <= q}.
    """
    if not 0 < q < 1:
        raise ValueError("q must lie strictly between 0 and 1")
    cum = estimate.cum
    M = estimate.M
    if side == "lower":
        j = int(np.searchsorted(cum, q - 1e-15, side="left"))
        return min(j, M) / M
    if side == "upper":
        j = int(np.searchsorted(cum, q + 1e-15, side="right"))
        return min(j, M) / M
    raise ValueError("side must be 'lower' or 'upper'")


def moment_count_for_error(eps: float, envelope: float = DEFAULT_DENSITY_ENVELOPE) -> int:
    """Moment count hitting a target continuous-case sup error."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return int(math.ceil(envelope / eps))


def tail_leading_coefficient(spec: StatisticSpec) -> mpq:
    """Leading Taylor coefficient of the density at the upper endpoint.

    For weights in [0,1] with W_w >= 1 entries equal to 1 and p >= 2, the
    density near x0 = 1 is c (1-x)^(k-2) + O((1-x)^(k-1)) with
    c = (k-1) W_w / p^(k-1); the squared-norm unit-weight case gives
    binom(k,2)/2^(k-2).
    """
    if spec.weights.ones_count < 1:
        raise ValueError("tail expansion requires at least one weight equal to 1")
    if not spec.weights.in_unit_interval():
        raise ValueError("tail expansion requires weights in [0,1]")
    if spec.p < 2:
        raise ValueError("tail expansion requires p >= 2")
    return mpq(
        (spec.k - 1) * spec.weights.ones_count, mpz(spec.p) ** (spec.k - 1)
    )
