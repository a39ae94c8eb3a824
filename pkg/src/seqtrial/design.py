"""Fixed sample sizes for two proportions, dilution adjustment, and
blinded sample-size re-estimation.

Two normal-approximation formulas are shipped because published trial
sizes are rarely attributable to a unique recipe:

* ``SIMPLE_POOLED``: ``(z_a + z_b)^2 (p0 q0 + p1 q1) / delta^2``.
* ``POOLED_PLUS_ALT_VARIANCE``: the pooled-null / alternative-variance
  form ``(z_a sqrt(2 pbar qbar) + z_b sqrt(p0 q0 + p1 q1))^2 / delta^2``
  with the Fleiss continuity correction ``+ 2/delta``.

The first is anti-conservative, the second conservative; real protocols
tend to land between them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from seqtrial.stats import normal_quantile

__all__ = [
    "Sided",
    "SampleSizeFormula",
    "DesignSpec",
    "SampleSizeResult",
    "fixed_sample_size",
    "diluted_design",
    "reestimate_sample_size",
]


class Sided(enum.Enum):
    ONE = 1
    TWO = 2


class SampleSizeFormula(enum.Enum):
    SIMPLE_POOLED = "simple_pooled"
    POOLED_PLUS_ALT_VARIANCE = "pooled_plus_alt_variance"


@dataclass(frozen=True)
class DesignSpec:
    """Fixed-design parameters for a two-arm binary-endpoint trial.

    ``dilution`` is the fraction of enrollees expected to be event-free
    mild cases; it is carried as metadata and only changes the rates via
    :func:`diluted_design` (never silently inside the size formulas).
    """

    alpha: float = 0.05
    sided: Sided = Sided.TWO
    power: float = 0.80
    p_control: float = 0.50
    p_treatment: float = 0.30
    dilution: float = 0.0
    allocation: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0.0 < self.power < 1.0:
            raise ValueError("power must lie in (0, 1)")
        for name in ("p_control", "p_treatment"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.p_control == self.p_treatment:
            raise ValueError("control and treatment rates must differ")
        if not 0.0 <= self.dilution < 1.0:
            raise ValueError("dilution must lie in [0, 1)")
        if self.allocation != 1.0:
            raise ValueError("only 1:1 allocation is supported")

    @property
    def alpha_one_sided(self) -> float:
        return self.alpha / 2.0 if self.sided is Sided.TWO else self.alpha

    @property
    def expected_pooled_rate(self) -> float:
        return (self.p_control + self.p_treatment) / 2.0


@dataclass(frozen=True)
class SampleSizeResult:
    n_per_group: int
    n_total: int
    formula: SampleSizeFormula
    effective_rates: tuple[float, float]


def _n_unrounded(spec: DesignSpec, formula: SampleSizeFormula) -> float:
    p0, p1 = spec.p_control, spec.p_treatment
    delta = abs(p0 - p1)
    z_a = normal_quantile(1.0 - spec.alpha_one_sided)
    z_b = normal_quantile(spec.power)
    v_alt = p0 * (1.0 - p0) + p1 * (1.0 - p1)
    if formula is SampleSizeFormula.SIMPLE_POOLED:
        return (z_a + z_b) ** 2 * v_alt / delta**2
    pbar = (p0 + p1) / 2.0
    v_null = 2.0 * pbar * (1.0 - pbar)
    n = (z_a * math.sqrt(v_null) + z_b * math.sqrt(v_alt)) ** 2 / delta**2
    return n + 2.0 / delta  # Fleiss continuity correction


def fixed_sample_size(
    spec: DesignSpec,
    formula: SampleSizeFormula = SampleSizeFormula.SIMPLE_POOLED,
) -> SampleSizeResult:
    """Per-group and total sample size for the requested formula.

    Rounds up per group; the total is then even under 1:1 allocation.
    """
    n = math.ceil(_n_unrounded(spec, formula))
    n = max(n, 2)
    return SampleSizeResult(
        n_per_group=n,
        n_total=2 * n,
        formula=formula,
        effective_rates=(spec.p_control, spec.p_treatment),
    )


def diluted_design(spec: DesignSpec) -> DesignSpec:
    """Fold the event-free mild-case fraction into the event rates.

    Mild cases are modeled as event-free in both arms, so each rate is
    scaled by ``1 - dilution``; the returned spec has ``dilution = 0``,
    making the transform idempotent.
    """
    if spec.dilution == 0.0:
        return spec
    scale = 1.0 - spec.dilution
    return replace(
        spec,
        p_control=spec.p_control * scale,
        p_treatment=spec.p_treatment * scale,
        dilution=0.0,
    )


def reestimate_sample_size(
    spec: DesignSpec,
    observed_pooled_rate: float,
    n_observed: int,
    formula: SampleSizeFormula = SampleSizeFormula.SIMPLE_POOLED,
) -> SampleSizeResult:
    """Blinded re-estimation holding the relative effect fixed.

    The design's rate ratio ``p_treatment / p_control`` is applied to the
    blinded pooled rate to recover per-arm rates, and the sample size is
    recomputed.  The returned total never falls below ``n_observed``.
    """
    if not 0.0 < observed_pooled_rate < 1.0:
        raise ValueError("observed pooled rate must lie in (0, 1)")
    if n_observed < 0:
        raise ValueError("n_observed must be nonnegative")
    ratio = spec.p_treatment / spec.p_control
    p_control_new = 2.0 * observed_pooled_rate / (1.0 + ratio)
    p_treatment_new = ratio * p_control_new
    if not (0.0 < p_control_new < 1.0 and 0.0 < p_treatment_new < 1.0):
        raise ValueError(
            "observed pooled rate is incompatible with the design's relative "
            f"effect: implied rates ({p_control_new:.4f}, {p_treatment_new:.4f}) "
            "leave (0, 1)"
        )
    new_spec = replace(
        spec, p_control=p_control_new, p_treatment=p_treatment_new, dilution=0.0
    )
    base = fixed_sample_size(new_spec, formula)
    if base.n_total >= n_observed:
        return base
    n_per_group = math.ceil(n_observed / 2)
    return SampleSizeResult(
        n_per_group=n_per_group,
        n_total=2 * n_per_group,
        formula=formula,
        effective_rates=base.effective_rates,
    )
