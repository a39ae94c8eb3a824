"""Pure-Python exact-test kernels.

Fallback twin of the compiled module ``seqtrial._ckernels``.  Both
implementations perform the same floating-point operations in the same
order against the same libm calls, so results are bit-identical
regardless of which backend is selected.  Keep any change here in
lockstep with the .pyx file.

Log-binomials come from a shared cumulative log-factorial table rather
than lgamma: CPython's math.lgamma is not the platform lgamma, while
math.log and C log are the same libm routine.
"""

from __future__ import annotations

import math

BACKEND = "python"

_LFACT = [0.0, 0.0]  # _LFACT[i] = log(i!)


def _lfact_grow(n: int) -> None:
    lf = _LFACT
    i = len(lf)
    while i <= n:
        lf.append(lf[i - 1] + math.log(float(i)))
        i += 1


def _lbinom(m: int, j: int) -> float:
    # canonicalize j so that lbinom(m, j) and lbinom(m, m-j) evaluate the
    # exact same expression (bitwise tie symmetry on balanced tables)
    if m - j < j:
        j = m - j
    return _LFACT[m] - _LFACT[j] - _LFACT[m - j]


def hypergeom_pmf(k: int, population: int, successes: int, draws: int) -> float:
    """P(X = k) for X hypergeometric(population, successes, draws)."""
    lo = successes + draws - population
    if lo < 0:
        lo = 0
    hi = successes if successes < draws else draws
    if k < lo or k > hi:
        return 0.0
    _lfact_grow(population)
    return math.exp(
        _lbinom(successes, k)
        + _lbinom(population - successes, draws - k)
        - _lbinom(population, draws)
    )


def fisher_tails(
    events_a: int, total_a: int, events_b: int, total_b: int
) -> tuple[float, float, float, float]:
    """One-pass Fisher tail probabilities for a 2x2 table.

    Returns ``(p_a_exceeds_b, p_b_exceeds_a, point_mass, p_two_sided)``
    where the one-sided values both include the observed table's mass and
    the two-sided value follows the small-p rule (total probability of
    tables no more likely than the observed one).
    """
    s = events_a + events_b
    n = total_a + total_b
    kmin = s - total_b if s > total_b else 0
    kmax = s if s < total_a else total_a
    if kmin == kmax:
        # degenerate margins: a single table carries all the mass
        return 1.0, 1.0, 1.0, 1.0
    _lfact_grow(n)

    lden = _lbinom(n, total_a)
    a = events_a
    nst = n - s  # non-events overall

    # upper tail, accumulated from kmax down to the observed table
    pk = math.exp(_lbinom(s, kmax) + _lbinom(nst, total_a - kmax) - lden)
    upper = pk
    pm_hi = pk
    k = kmax
    while k > a:
        # pmf(k-1) from pmf(k)
        pk = pk * ((k * (nst - total_a + k)) / ((s - k + 1.0) * (total_a - k + 1.0)))
        upper += pk
        pm_hi = pk
        k -= 1

    # lower tail, accumulated from kmin up to the observed table
    pk = math.exp(_lbinom(s, kmin) + _lbinom(nst, total_a - kmin) - lden)
    lower = pk
    k = kmin
    while k < a:
        # pmf(k+1) from pmf(k)
        pk = pk * (((s - k) * (total_a - k)) / ((k + 1.0) * (nst - total_a + k + 1.0)))
        lower += pk
        k += 1

    # two-sided by the small-p rule; relative slack absorbs roundoff ties
    gate = pm_hi * (1.0 + 1e-7)
    two = 0.0
    excluded = 0
    pk = math.exp(_lbinom(s, kmin) + _lbinom(nst, total_a - kmin) - lden)
    if pk <= gate:
        two += pk
    else:
        excluded += 1
    k = kmin
    while k < kmax:
        pk = pk * (((s - k) * (total_a - k)) / ((k + 1.0) * (nst - total_a + k + 1.0)))
        if pk <= gate:
            two += pk
        else:
            excluded += 1
        k += 1
    if excluded == 0 or two > 1.0:
        two = 1.0

    return upper, lower, pm_hi, two


def fisher_tails_batch(events_a, total_a, events_b, total_b, out_hi, out_lo, out_pm):
    """Vector form of :func:`fisher_tails` over index-aligned sequences."""
    for i in range(len(events_a)):
        hi, lo, pm, _ = fisher_tails(
            int(events_a[i]), int(total_a[i]), int(events_b[i]), int(total_b[i])
        )
        out_hi[i] = hi
        out_lo[i] = lo
        out_pm[i] = pm
