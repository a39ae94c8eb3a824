"""Group-sequential boundary crossing probabilities and expected-sample-
size-minimal designs.

The sequential z statistic is modeled on the score scale: with
information fraction t, the score S(t) = Z(t) * sqrt(t) has independent
increments, S(t_k) - S(t_{k-1}) ~ N(theta * dt, dt), where theta is the
drift of the full-information z value.  Crossing probabilities follow
the classical recursion: propagate the sub-density over the continue
region from look to look by numerical convolution (composite Simpson).

Drifts are expressed on that standardized scale (effect divided by the
standard error of the estimate at the full fixed sample size), so a
design problem is characterized by (alpha, power) alone and
``n_fixed_reference`` only converts information fractions to patients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from seqtrial.stats import normal_cdf, normal_quantile

__all__ = [
    "GroupSequentialDesign",
    "CrossingResult",
    "DesignEvaluation",
    "InfeasibleDesignError",
    "crossing_probabilities",
    "evaluate_design",
    "optimize_design",
    "propatria_counterfactuals",
    "CounterfactualScenario",
    "CounterfactualReport",
]

_SQRT2PI = math.sqrt(2.0 * math.pi)


class InfeasibleDesignError(ValueError):
    """Raised when no design can meet the size/power constraints."""


@dataclass(frozen=True)
class GroupSequentialDesign:
    """K-look design: information fractions with z-scale boundaries.

    The final lower and upper boundaries coincide so the last analysis
    always decides.  ``n_fixed_reference`` is the fixed-design total the
    fractions refer to.
    """

    info_fractions: tuple[float, ...]
    upper_z: tuple[float, ...]
    lower_z: tuple[float, ...]
    n_fixed_reference: int

    def __post_init__(self) -> None:
        t = self.info_fractions
        if len(t) < 1:
            raise ValueError("need at least one look")
        if len(self.upper_z) != len(t) or len(self.lower_z) != len(t):
            raise ValueError("boundary vectors must match the number of looks")
        if any(b <= a for a, b in zip(t, t[1:])) or not 0.0 < t[0]:
            raise ValueError("information fractions must be strictly increasing in (0, 1]")
        if t[-1] != 1.0:
            raise ValueError("the last information fraction must be 1")
        for k, (lo, up) in enumerate(zip(self.lower_z, self.upper_z)):
            if k < len(t) - 1 and lo >= up:
                raise ValueError(f"lower boundary must stay below upper at look {k + 1}")
        if self.lower_z[-1] != self.upper_z[-1]:
            raise ValueError("the final look must force a decision (equal boundaries)")
        if self.n_fixed_reference < 1:
            raise ValueError("n_fixed_reference must be positive")

    @property
    def k_looks(self) -> int:
        return len(self.info_fractions)


@dataclass(frozen=True)
class CrossingResult:
    """Per-look stop probabilities plus any residual continue mass."""

    stop_high: np.ndarray
    stop_low: np.ndarray
    residual: float

    @property
    def total_stop_high(self) -> float:
        return float(self.stop_high.sum())

    @property
    def total_stop_low(self) -> float:
        return float(self.stop_low.sum())


def _phi(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * x * x) / _SQRT2PI


def _Phi(x: np.ndarray) -> np.ndarray:
    from scipy.special import ndtr

    return ndtr(x)


def crossing_probabilities(
    design: GroupSequentialDesign, drift: float, npoints: int = 1001
) -> CrossingResult:
    """Exact boundary-crossing probabilities by recursive integration.

    ``drift`` is the mean of the full-information z value.  Numbers of
    grid points per look are rounded up to an odd count for Simpson
    weights; the defaults hold the normalization error below 1e-6.
    """
    if not math.isfinite(drift):
        raise ValueError("drift must be finite")
    if npoints < 21:
        raise ValueError("npoints too small for a stable recursion")
    if npoints % 2 == 0:
        npoints += 1

    t = np.asarray(design.info_fractions)
    up_b = np.asarray(design.upper_z) * np.sqrt(t)  # score scale
    lo_b = np.asarray(design.lower_z) * np.sqrt(t)
    K = len(t)
    p_hi = np.zeros(K)
    p_lo = np.zeros(K)

    # look 1 directly from the normal law of S(t1)
    sd = math.sqrt(t[0])
    mean = drift * t[0]
    p_hi[0] = float(_Phi(np.array([(mean - up_b[0]) / sd]))[0])
    p_lo[0] = float(_Phi(np.array([(lo_b[0] - mean) / sd]))[0])
    if K == 1:
        return CrossingResult(p_hi, p_lo, residual=1.0 - p_hi[0] - p_lo[0])

    grid = np.linspace(lo_b[0], up_b[0], npoints)
    dens = _phi((grid - mean) / sd) / sd
    h = (grid[-1] - grid[0]) / (npoints - 1)
    w = np.full(npoints, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    w *= h / 3.0

    for k in range(1, K):
        dt = t[k] - t[k - 1]
        sd = math.sqrt(dt)
        shift = drift * dt
        gw = dens * w
        p_hi[k] = float(gw @ _Phi((grid + shift - up_b[k]) / sd))
        p_lo[k] = float(gw @ _Phi((lo_b[k] - grid - shift) / sd))
        if k == K - 1:
            break
        new_grid = np.linspace(lo_b[k], up_b[k], npoints)
        diff = (new_grid[None, :] - grid[:, None] - shift) / sd
        dens = (gw @ _phi(diff)) / sd
        grid = new_grid
        h = (grid[-1] - grid[0]) / (npoints - 1)
        w = np.full(npoints, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        w *= h / 3.0

    residual = 1.0 - p_hi.sum() - p_lo.sum()
    return CrossingResult(p_hi, p_lo, residual=residual)


@dataclass(frozen=True)
class DesignEvaluation:
    """Size, power, and expected enrollment of a design under named drifts."""

    size: float
    power: float
    expected_n: dict[str, float]
    en_ratio_negative: float
    drifts: dict[str, float] = field(default_factory=dict)


def _expected_n(design: GroupSequentialDesign, cross: CrossingResult) -> float:
    t = np.asarray(design.info_fractions)
    n = t * design.n_fixed_reference
    en = float(((cross.stop_high + cross.stop_low) * n).sum())
    return en + cross.residual * float(n[-1])


def evaluate_design(
    design: GroupSequentialDesign,
    alt_drift: float,
    negative_drift: float,
    null_drift: float = 0.0,
    npoints: int = 1001,
) -> DesignEvaluation:
    """Size, power, and E[N] per drift scenario for one design."""
    crossings = {
        "null": crossing_probabilities(design, null_drift, npoints),
        "alternative": crossing_probabilities(design, alt_drift, npoints),
        "negative": crossing_probabilities(design, negative_drift, npoints),
    }
    expected = {name: _expected_n(design, c) for name, c in crossings.items()}
    return DesignEvaluation(
        size=crossings["null"].total_stop_high,
        power=crossings["alternative"].total_stop_high,
        expected_n=expected,
        en_ratio_negative=expected["negative"] / design.n_fixed_reference,
        drifts={"null": null_drift, "alternative": alt_drift, "negative": negative_drift},
    )


def _with_final(fractions, upper_head, lower_head, z_final) -> GroupSequentialDesign:
    return GroupSequentialDesign(
        info_fractions=tuple(fractions),
        upper_z=tuple(upper_head) + (z_final,),
        lower_z=tuple(lower_head) + (z_final,),
        n_fixed_reference=1,
    )


def _project_size(fractions, upper_head, lower_head, alpha, npoints):
    """Solve the final boundary so the overall size equals alpha.

    Returns None when the earlier upper boundaries already spend more
    than alpha.
    """

    def size_at(zf: float) -> float:
        d = _with_final(fractions, upper_head, lower_head, zf)
        return crossing_probabilities(d, 0.0, npoints).total_stop_high - alpha

    lo, hi = normal_quantile(1.0 - alpha) - 0.5, 8.0
    try:
        f_lo, f_hi = size_at(lo), size_at(hi)
        if f_lo < 0.0:
            lo = 0.5
            f_lo = size_at(lo)
        if f_lo < 0.0 or f_hi > 0.0:
            return None
        return brentq(size_at, lo, hi, xtol=1e-10)
    except ValueError:
        return None


def optimize_design(
    K: int,
    alpha: float,
    power: float,
    objective_drift: float,
    n_fixed: int,
    alt_drift: float | None = None,
    power_slack: float = 1e-3,
    npoints: int = 401,
    step_schedule: tuple[float, ...] = (0.4, 0.15, 0.05),
) -> GroupSequentialDesign:
    """Search for a K-look design minimizing E[N] at ``objective_drift``.

    Looks are equally spaced.  Candidates are projected onto the size
    constraint by root-finding on the final boundary; the power
    constraint (power >= target - power_slack at ``alt_drift``) is
    enforced through a penalty, so the returned design satisfies
    |size - alpha| <= 1e-3 and the power floor.  The search is a
    deterministic coordinate descent over the interior boundary values
    with steps ``step_schedule`` (ties break toward the lexicographically
    smallest boundary vector); it returns a grid-local minimum, not a
    certified global one.
    """
    if K < 2:
        raise ValueError("optimize_design needs at least two looks")
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 0.5)")
    if not 0.0 < power < 1.0:
        raise ValueError("power must lie in (0, 1)")
    if alt_drift is None:
        alt_drift = normal_quantile(1.0 - alpha) + normal_quantile(power)
    fixed_power = normal_cdf(alt_drift - normal_quantile(1.0 - alpha))
    if fixed_power < power - power_slack:
        raise InfeasibleDesignError(
            f"even the fixed design reaches only power {fixed_power:.4f} "
            f"< {power} - {power_slack} at drift {alt_drift:.4f}"
        )

    fractions = tuple((j + 1) / K for j in range(K))

    def assemble(upper_head, lower_head):
        zf = _project_size(fractions, upper_head, lower_head, alpha, npoints)
        if zf is None:
            return None, math.inf
        design = _with_final(fractions, upper_head, lower_head, zf)
        pw = crossing_probabilities(design, alt_drift, npoints).total_stop_high
        en = _expected_n(design, crossing_probabilities(design, objective_drift, npoints))
        penalty = 1e4 * max(0.0, (power - power_slack) - pw)
        return design, en + penalty

    # seed the lower boundary with the best feasible flat level
    upper0 = [3.3] * (K - 1)
    best_head = None
    best_obj = math.inf
    for level in [x / 4.0 for x in range(-12, 0)]:  # -3.0 .. -0.25
        lower0 = [level] * (K - 1)
        _, obj = assemble(upper0, lower0)
        if obj < best_obj:
            best_obj = obj
            best_head = lower0
    if best_head is None or not math.isfinite(best_obj):
        raise InfeasibleDesignError("no feasible starting design found")

    upper = list(upper0)
    lower = list(best_head)
    current = best_obj
    for step in step_schedule:
        improved = True
        while improved:
            improved = False
            for vec, idx in [(lower, i) for i in range(K - 1)] + [
                (upper, i) for i in range(K - 1)
            ]:
                base_val = vec[idx]
                for delta in (-step, step):
                    trial = base_val + delta
                    if vec is lower:
                        if trial < -6.0 or trial > upper[idx] - 0.2:
                            continue
                    else:
                        if trial > 6.0 or trial < lower[idx] + 0.2:
                            continue
                    vec[idx] = trial
                    _, obj = assemble(upper, lower)
                    if obj < current - 1e-12:
                        current = obj
                        base_val = trial
                        improved = True
                    else:
                        vec[idx] = base_val
    design, obj = assemble(upper, lower)
    if design is None or not math.isfinite(obj):
        raise InfeasibleDesignError("coordinate descent ended without a feasible design")
    return GroupSequentialDesign(
        info_fractions=design.info_fractions,
        upper_z=design.upper_z,
        lower_z=design.lower_z,
        n_fixed_reference=n_fixed,
    )


@dataclass(frozen=True)
class CounterfactualScenario:
    """One endpoint's what-if: an E[N]-optimal design next to the fixed one."""

    name: str
    p_control: float
    p_treatment_expected: float
    k_looks: int
    n_fixed: int
    alt_drift: float
    adverse_drift: float
    design: GroupSequentialDesign
    evaluation: DesignEvaluation
    expected_n_adverse: float
    en_ratio_adverse: float


@dataclass(frozen=True)
class CounterfactualReport:
    """Both trial counterfactuals, with expected-harm deltas.

    ``reference_en_ratio`` and ``reference_stop_n`` are the published
    what-if figures (15% of fixed size; stopping near 100 patients) the
    computed values are reported next to; the design families behind
    those figures are not fully specified, so agreement is qualitative.
    """

    infection: CounterfactualScenario
    infection_k10_en_ratio: float
    mortality: CounterfactualScenario
    deaths_fixed_296: tuple[float, float]
    deaths_optimized: tuple[float, float]
    consistency_null_en_ratio: float
    reference_en_ratio: float = 0.15
    reference_stop_n: float = 100.0


def _design_scale_drift(p_control: float, p_treatment: float, n_group: int) -> float:
    """Effect divided by the SE of the rate difference at the full size."""
    v = p_control * (1 - p_control) + p_treatment * (1 - p_treatment)
    return (p_control - p_treatment) / math.sqrt(v / n_group)


def _counterfactual(
    name: str,
    p_control: float,
    p_treatment: float,
    k_looks: int,
    alpha_one_sided: float,
    power: float,
    npoints: int,
) -> CounterfactualScenario:
    from seqtrial.design import DesignSpec, Sided, fixed_sample_size

    spec = DesignSpec(
        alpha=alpha_one_sided,
        sided=Sided.ONE,
        power=power,
        p_control=p_control,
        p_treatment=p_treatment,
    )
    n_group = fixed_sample_size(spec).n_per_group
    alt = _design_scale_drift(p_control, p_treatment, n_group)
    # adverse truth: the design effect reversed and doubled on the same
    # standardized scale (risk doubling where halving was expected)
    adverse = -2.0 * alt
    design = optimize_design(
        K=k_looks,
        alpha=alpha_one_sided,
        power=power,
        objective_drift=adverse,
        n_fixed=2 * n_group,
        alt_drift=alt,
        npoints=npoints,
    )
    ev = evaluate_design(design, alt_drift=alt, negative_drift=adverse)
    return CounterfactualScenario(
        name=name,
        p_control=p_control,
        p_treatment_expected=p_treatment,
        k_looks=k_looks,
        n_fixed=2 * n_group,
        alt_drift=alt,
        adverse_drift=adverse,
        design=design,
        evaluation=ev,
        expected_n_adverse=ev.expected_n["negative"],
        en_ratio_adverse=ev.en_ratio_negative,
    )


def propatria_counterfactuals(npoints: int = 401) -> CounterfactualReport:
    """Re-run the trial's two what-if designs end to end.

    Infection endpoint: the protocol design (50% vs 30%, two-sided 5%,
    power 80%) optimized with K = 5 looks for early stopping when the
    risk doubles instead of halving; also reported at K = 10.  Mortality
    endpoint: 10% vs 5% under the same error rates, optimized for the
    mortality-doubling scenario.  Expected-death comparisons use the
    infection-to-death chain with the doubled conditional mortality and
    put the 296-patient fixed design next to the optimized one.
    """
    infection = _counterfactual("infection", 0.50, 0.30, 5, 0.025, 0.80, npoints)
    inf_k10 = _counterfactual("infection", 0.50, 0.30, 10, 0.025, 0.80, npoints)
    mortality = _counterfactual("mortality", 0.10, 0.05, 10, 0.025, 0.80, npoints)

    from seqtrial.simulate import propatria_harm_scenario

    harm = propatria_harm_scenario(n_max=296)
    death_t = (
        harm.p_infect_treatment * harm.p_death_given_infection_treatment
        + (1 - harm.p_infect_treatment) * harm.p_death_no_infection
    )
    death_c = (
        harm.p_infect_control * harm.p_death_given_infection_control
        + (1 - harm.p_infect_control) * harm.p_death_no_infection
    )
    deaths_fixed = (148 * death_t, 148 * death_c)
    n_opt = infection.expected_n_adverse
    deaths_opt = (n_opt / 2 * death_t, n_opt / 2 * death_c)

    null_cross = crossing_probabilities(infection.design, 0.0)
    consistency = _expected_n(infection.design, null_cross) / infection.n_fixed

    return CounterfactualReport(
        infection=infection,
        infection_k10_en_ratio=inf_k10.en_ratio_adverse,
        mortality=mortality,
        deaths_fixed_296=deaths_fixed,
        deaths_optimized=deaths_opt,
        consistency_null_en_ratio=consistency,
    )
