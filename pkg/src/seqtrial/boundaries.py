"""Interim decision rules on the p-value scale.

The conditional-probability stopping rule compares the interim one-sided
p-value against two thresholds: below ``p_sig`` the trial stops for
significance, above ``p_fut`` it stops for futility.  The thresholds are
the p-value images of conditional-power levels under the current-trend
drift, so a (gamma_sig, gamma_fut) pair generates thresholds at any
information fraction, and quoted thresholds can be inverted back to the
conditional-power levels that produced them.

Comparator boundaries (Pocock, O'Brien-Fleming, Haybittle-Peto) are
calibrated so the overall one-sided size equals alpha, using the
boundary-crossing recursion from :mod:`seqtrial.optimize`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from seqtrial.stats import normal_cdf, normal_quantile

__all__ = [
    "Decision",
    "BoundarySource",
    "BoundarySpec",
    "ComparatorMethod",
    "conditional_power",
    "thresholds_from_gamma",
    "calibrate_gamma",
    "comparator_boundary",
    "decide",
    "CalibrationError",
]

CURRENT_TREND = "current_trend"
NULL_DRIFT = "null"


class CalibrationError(ValueError):
    """Raised when no p-value threshold satisfies the requested level."""


class Decision(enum.Enum):
    CONTINUE = "continue"
    STOP_SIGNIFICANCE = "stop_significance"
    STOP_FUTILITY = "stop_futility"


class BoundarySource(enum.Enum):
    DIRECT = "direct"
    CONDITIONAL_POWER = "conditional_power"
    POCOCK = "pocock"
    OBRIEN_FLEMING = "obrien_fleming"
    HAYBITTLE_PETO = "haybittle_peto"


class ComparatorMethod(enum.Enum):
    POCOCK = "pocock"
    OBRIEN_FLEMING = "obrien_fleming"
    HAYBITTLE_PETO = "haybittle_peto"


@dataclass(frozen=True)
class BoundarySpec:
    """An interim decision rule at information fraction ``t``.

    ``gamma_sig``/``gamma_fut`` are present when the thresholds were
    produced from conditional-power levels, in which case the rule can
    be re-derived at other information fractions.
    """

    t: float
    p_sig: float
    p_fut: float
    alpha_one_sided: float = 0.025
    source: BoundarySource = BoundarySource.DIRECT
    gamma_sig: float | None = None
    gamma_fut: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.t <= 1.0:
            raise ValueError("information fraction must lie in (0, 1]")
        if not 0.0 < self.p_sig < self.p_fut < 1.0:
            raise ValueError("need 0 < p_sig < p_fut < 1")
        if not 0.0 < self.alpha_one_sided < 1.0:
            raise ValueError("alpha_one_sided must lie in (0, 1)")

    def at_fraction(self, t: float) -> "BoundarySpec":
        """The same rule recomputed at a different information fraction.

        Requires conditional-power provenance; direct thresholds carry no
        rule to transport.
        """
        if self.gamma_sig is None or self.gamma_fut is None:
            raise ValueError(
                "thresholds without conditional-power levels cannot be moved "
                "to another information fraction; calibrate_gamma them first"
            )
        return thresholds_from_gamma(
            self.gamma_sig, self.gamma_fut, t, self.alpha_one_sided
        )


def conditional_power(
    z_t: float,
    t: float,
    alpha_one_sided: float,
    drift: str | float = CURRENT_TREND,
) -> float:
    """Probability of final significance given the interim z-value.

    The sequential statistic is treated as a Brownian motion on the score
    scale, S(t) = z_t * sqrt(t).  The remainder of the path gets drift
    ``theta * (1 - t)`` where ``theta`` is the assumed full-information
    drift: the current trend estimate S(t)/t, zero under ``"null"``, or
    any number passed directly.
    """
    if not 0.0 < t < 1.0:
        raise ValueError("conditional power needs 0 < t < 1")
    if not math.isfinite(z_t):
        raise ValueError("z_t must be finite")
    z_crit = normal_quantile(1.0 - alpha_one_sided)
    score = z_t * math.sqrt(t)
    if drift == CURRENT_TREND:
        theta = score / t
    elif drift == NULL_DRIFT:
        theta = 0.0
    elif isinstance(drift, (int, float)) and not isinstance(drift, bool):
        theta = float(drift)
    else:
        raise ValueError(f"drift must be 'current_trend', 'null', or a number, got {drift!r}")
    return normal_cdf((score + theta * (1.0 - t) - z_crit) / math.sqrt(1.0 - t))


def thresholds_from_gamma(
    gamma_sig: float,
    gamma_fut: float,
    t: float,
    alpha_one_sided: float = 0.025,
) -> BoundarySpec:
    """P-value thresholds whose current-trend conditional power equals
    the given levels.

    Inverts :func:`conditional_power` in closed form: the interim z at
    conditional power gamma is ``sqrt(t) * (z_crit + qnorm(gamma) *
    sqrt(1 - t))``, mapped to a p-value threshold.
    """
    if not 0.0 < gamma_fut < gamma_sig < 1.0:
        raise ValueError("need 0 < gamma_fut < gamma_sig < 1")
    if not 0.0 < t < 1.0:
        raise ValueError("thresholds need 0 < t < 1")
    z_crit = normal_quantile(1.0 - alpha_one_sided)
    root_1t = math.sqrt(1.0 - t)

    def p_at(gamma: float) -> float:
        z = math.sqrt(t) * (z_crit + normal_quantile(gamma) * root_1t)
        return 1.0 - normal_cdf(z)

    p_sig, p_fut = p_at(gamma_sig), p_at(gamma_fut)
    if not 0.0 < p_sig < p_fut < 1.0:
        raise CalibrationError(
            f"conditional-power levels ({gamma_sig}, {gamma_fut}) at t={t} do "
            f"not map to ordered p thresholds ({p_sig}, {p_fut})"
        )
    return BoundarySpec(
        t=t,
        p_sig=p_sig,
        p_fut=p_fut,
        alpha_one_sided=alpha_one_sided,
        source=BoundarySource.CONDITIONAL_POWER,
        gamma_sig=gamma_sig,
        gamma_fut=gamma_fut,
    )


def calibrate_gamma(
    p_sig: float,
    p_fut: float,
    t: float,
    alpha_one_sided: float = 0.025,
) -> tuple[float, float]:
    """Conditional-power levels implied by quoted p-value thresholds.

    Exact inverse of :func:`thresholds_from_gamma`: evaluating the
    current-trend conditional power at each threshold's z-value.
    """
    if not 0.0 < p_sig < p_fut < 1.0:
        raise ValueError("need 0 < p_sig < p_fut < 1")
    gamma_sig = conditional_power(normal_quantile(1.0 - p_sig), t, alpha_one_sided)
    gamma_fut = conditional_power(normal_quantile(1.0 - p_fut), t, alpha_one_sided)
    return gamma_sig, gamma_fut


def comparator_boundary(
    method: ComparatorMethod,
    k: int,
    K: int,
    alpha_one_sided: float = 0.025,
) -> float:
    """Nominal one-sided p threshold at look k of K for a standard rule.

    Pocock uses a constant nominal level across looks and O'Brien-Fleming
    a level increasing in k; both are calibrated by root-finding on the
    crossing-probability recursion so the overall size equals alpha.
    Haybittle-Peto spends 0.001 at every interim look and adjusts only
    the final level.
    """
    if not 1 <= k <= K:
        raise ValueError(f"look index k={k} must lie in 1..K={K}")
    zs = _comparator_z_boundaries(method, K, alpha_one_sided)
    return 1.0 - normal_cdf(zs[k - 1])


def _comparator_z_boundaries(
    method: ComparatorMethod, K: int, alpha: float
) -> tuple[float, ...]:
    from scipy.optimize import brentq

    from seqtrial.optimize import GroupSequentialDesign, crossing_probabilities

    if K == 1:
        return (normal_quantile(1.0 - alpha),)
    fractions = tuple((j + 1) / K for j in range(K))

    def shape(c: float) -> tuple[float, ...]:
        if method is ComparatorMethod.POCOCK:
            return tuple(c for _ in fractions)
        if method is ComparatorMethod.OBRIEN_FLEMING:
            return tuple(c / math.sqrt(t) for t in fractions)
        interim = normal_quantile(1.0 - 0.001)
        return tuple(interim for _ in fractions[:-1]) + (c,)

    def size_excess(c: float) -> float:
        upper = shape(c)
        design = GroupSequentialDesign(
            info_fractions=fractions,
            upper_z=upper,
            lower_z=tuple(-8.0 for _ in fractions[:-1]) + (upper[-1],),
            n_fixed_reference=1,
        )
        return crossing_probabilities(design, 0.0).total_stop_high - alpha

    c = brentq(size_excess, normal_quantile(1.0 - alpha) - 1e-9, 8.0, xtol=1e-10)
    return shape(c)


def decide(p_one_sided: float, boundary: BoundarySpec) -> Decision:
    """Apply the stopping rule to an interim one-sided p-value.

    Threshold comparisons are strict, so a p-value exactly at either
    threshold continues.
    """
    if not 0.0 <= p_one_sided <= 1.0:
        raise ValueError("p-value must lie in [0, 1]")
    if p_one_sided < boundary.p_sig:
        return Decision.STOP_SIGNIFICANCE
    if p_one_sided > boundary.p_fut:
        return Decision.STOP_FUTILITY
    return Decision.CONTINUE
