"""Exact and asymptotic inference for 2x2 tables with an explicit
alternative direction, plus the normal-distribution numerics used
throughout the package.

Every operation here is a pure function; there is no shared mutable
state and concurrent use needs no synchronization.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.special import ndtri

from seqtrial._backend import kernels

__all__ = [
    "Direction",
    "TwoByTwoTable",
    "TestResult",
    "normal_cdf",
    "normal_quantile",
    "hypergeom_pmf",
    "fisher_one_sided_p",
    "fisher_exact_test",
    "max_significance_one_sided_p",
    "two_prop_z_test",
]

_SQRT2 = math.sqrt(2.0)


class Direction(enum.Enum):
    """Alternative hypothesis: the named group has the higher event rate."""

    A_EXCEEDS_B = "a_exceeds_b"
    B_EXCEEDS_A = "b_exceeds_a"

    def flipped(self) -> "Direction":
        if self is Direction.A_EXCEEDS_B:
            return Direction.B_EXCEEDS_A
        return Direction.A_EXCEEDS_B


@dataclass(frozen=True)
class TwoByTwoTable:
    """Event counts per arm; the atom of all inference in this package."""

    events_a: int
    total_a: int
    events_b: int
    total_b: int

    def __post_init__(self) -> None:
        for name in ("events_a", "total_a", "events_b", "total_b"):
            v = getattr(self, name)
            if not isinstance(v, (int,)) or isinstance(v, bool):
                raise ValueError(f"{name} must be an integer, got {v!r}")
        if self.total_a < 1 or self.total_b < 1:
            raise ValueError("both group sizes must be at least 1")
        if not 0 <= self.events_a <= self.total_a:
            raise ValueError("events_a must lie in [0, total_a]")
        if not 0 <= self.events_b <= self.total_b:
            raise ValueError("events_b must lie in [0, total_b]")

    @property
    def rate_a(self) -> float:
        return self.events_a / self.total_a

    @property
    def rate_b(self) -> float:
        return self.events_b / self.total_b

    @property
    def pooled_rate(self) -> float:
        return (self.events_a + self.events_b) / (self.total_a + self.total_b)

    def swapped(self) -> "TwoByTwoTable":
        """The same data with group labels exchanged."""
        return TwoByTwoTable(self.events_b, self.total_b, self.events_a, self.total_a)

    @property
    def degenerate(self) -> bool:
        """True when the margins pin the table (all events or no events)."""
        s = self.events_a + self.events_b
        return s == 0 or s == self.total_a + self.total_b


class TestMethod(enum.Enum):
    EXACT = "exact"
    NORMAL_APPROX = "normal_approx"


@dataclass(frozen=True)
class TestResult:
    """Outcome of a directional two-sample test on a 2x2 table.

    ``z`` is the signed standardized rate difference (positive when group
    A's rate is higher).  For the exact method ``z`` is descriptive (NaN
    when the pooled variance is degenerate) and the one-sided p-values
    satisfy p_one_sided + p_other_side = 1 + P(observed table | margins);
    for the normal approximation they sum to exactly 1.
    """

    z: float
    p_one_sided: float
    p_other_side: float
    p_two_sided: float
    method: TestMethod
    degenerate: bool = False


def normal_cdf(x: float) -> float:
    """Standard normal CDF, accurate to well below 1e-12."""
    if not math.isfinite(x):
        raise ValueError(f"normal_cdf requires finite input, got {x!r}")
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_quantile(p: float) -> float:
    """Inverse of :func:`normal_cdf` on (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"normal_quantile requires 0 < p < 1, got {p!r}")
    return float(ndtri(p))


def hypergeom_pmf(k: int, population: int, successes: int, draws: int) -> float:
    """Probability of k marked draws in a hypergeometric sample.

    Evaluated by log-factorial accumulation; exactly 0 outside the
    support, and the pmf sums to 1 over the support.
    """
    if population < 0 or not 0 <= successes <= population:
        raise ValueError("need 0 <= successes <= population")
    if not 0 <= draws <= population:
        raise ValueError("need 0 <= draws <= population")
    return kernels.hypergeom_pmf(k, population, successes, draws)


def _tails(table: TwoByTwoTable) -> tuple[float, float, float, float]:
    return kernels.fisher_tails(
        table.events_a, table.total_a, table.events_b, table.total_b
    )


def fisher_one_sided_p(table: TwoByTwoTable, alt: Direction) -> float:
    """One-sided Fisher exact p-value for the stated alternative.

    With the margins fixed, this is the null probability of tables at
    least as extreme as the one observed in the direction ``alt``,
    including the observed table's own mass.  Degenerate margins (no
    events, or no non-events) give 1.0; see
    :func:`fisher_exact_test` for an explicit degeneracy flag.
    """
    hi, lo, _, _ = _tails(table)
    return hi if alt is Direction.A_EXCEEDS_B else lo


def fisher_exact_test(table: TwoByTwoTable, alt: Direction) -> TestResult:
    """Full exact-test result for ``alt``, including the two-sided p.

    The two-sided p-value follows the small-p rule: the total null
    probability of tables no more likely than the observed one.
    """
    hi, lo, _, two = _tails(table)
    if alt is Direction.A_EXCEEDS_B:
        p_one, p_other = hi, lo
    else:
        p_one, p_other = lo, hi
    pooled = table.pooled_rate
    if 0.0 < pooled < 1.0:
        z = (table.rate_a - table.rate_b) / _pooled_se(table, pooled)
    else:
        z = float("nan")
    return TestResult(
        z=z,
        p_one_sided=p_one,
        p_other_side=p_other,
        p_two_sided=two,
        method=TestMethod.EXACT,
        degenerate=table.degenerate,
    )


def max_significance_one_sided_p(table: TwoByTwoTable) -> tuple[float, Direction]:
    """The smaller of the two one-sided exact p-values and its direction.

    This is the label-invariant quantity a directionless report hands a
    blinded reader: the one-sided test "suggested by the data".  Ties
    (balanced tables) resolve to ``A_EXCEEDS_B``.
    """
    hi, lo, _, _ = _tails(table)
    if hi <= lo:
        return hi, Direction.A_EXCEEDS_B
    return lo, Direction.B_EXCEEDS_A


def _pooled_se(table: TwoByTwoTable, pooled: float) -> float:
    return math.sqrt(
        pooled * (1.0 - pooled) * (1.0 / table.total_a + 1.0 / table.total_b)
    )


def two_prop_z_test(table: TwoByTwoTable, alt: Direction) -> TestResult:
    """Two-proportion z-test with pooled-variance standard error.

    p_one_sided is Phi(-z) for ``A_EXCEEDS_B`` and Phi(z) otherwise, so
    swapping the group labels and flipping ``alt`` negates z and leaves
    every p-value unchanged.
    """
    pooled = table.pooled_rate
    if pooled <= 0.0 or pooled >= 1.0:
        raise ValueError(
            "pooled event rate is 0 or 1: the z-test variance is undefined"
        )
    z = (table.rate_a - table.rate_b) / _pooled_se(table, pooled)
    p_hi = normal_cdf(-z)
    p_lo = 1.0 - p_hi
    if alt is Direction.A_EXCEEDS_B:
        p_one, p_other = p_hi, p_lo
    else:
        p_one, p_other = p_lo, p_hi
    return TestResult(
        z=z,
        p_one_sided=p_one,
        p_other_side=p_other,
        p_two_sided=2.0 * min(p_hi, p_lo),
        method=TestMethod.NORMAL_APPROX,
    )
