# cython: language_level=3
"""Compiled exact-test kernels.

Statement-for-statement twin of ``seqtrial._pykernels``; both backends
must produce bit-identical floats (same libm calls, same operation
order, compiled with -ffp-contract=off).  See the twin module for the
log-factorial-table rationale.
"""

from libc.math cimport exp, log
from libc.stdlib cimport free, realloc

BACKEND = "compiled"

cdef double* _lfact = NULL
cdef long _lfact_len = 0


cdef int _lfact_grow(long n) except -1:
    """Extend the log-factorial table to cover n (requires the GIL)."""
    global _lfact, _lfact_len
    cdef long cap, i
    if n + 1 <= _lfact_len:
        return 0
    cap = _lfact_len * 2 if _lfact_len > 0 else 256
    if cap < n + 1:
        cap = n + 1
    _lfact = <double*> realloc(_lfact, cap * sizeof(double))
    if _lfact is NULL:
        raise MemoryError("log-factorial table allocation failed")
    if _lfact_len == 0:
        _lfact[0] = 0.0
        _lfact[1] = 0.0
        _lfact_len = 2
    i = _lfact_len
    while i < cap:
        _lfact[i] = _lfact[i - 1] + log(<double> i)
        i += 1
    _lfact_len = cap
    return 0


cdef inline double _lbinom(long m, long j) nogil:
    if m - j < j:
        j = m - j
    return _lfact[m] - _lfact[j] - _lfact[m - j]


def hypergeom_pmf(long k, long population, long successes, long draws):
    """P(X = k) for X hypergeometric(population, successes, draws)."""
    cdef long lo = successes + draws - population
    if lo < 0:
        lo = 0
    cdef long hi = successes if successes < draws else draws
    if k < lo or k > hi:
        return 0.0
    _lfact_grow(population)
    return exp(
        _lbinom(successes, k)
        + _lbinom(population - successes, draws - k)
        - _lbinom(population, draws)
    )


cdef inline (double, double, double, double) _fisher_tails(
    long events_a, long total_a, long events_b, long total_b
) nogil:
    cdef long s = events_a + events_b
    cdef long n = total_a + total_b
    cdef long kmin = s - total_b if s > total_b else 0
    cdef long kmax = s if s < total_a else total_a
    if kmin == kmax:
        return 1.0, 1.0, 1.0, 1.0

    cdef double lden = _lbinom(n, total_a)
    cdef long a = events_a
    cdef long nst = n - s
    cdef double pk, upper, lower, pm_hi, gate, two
    cdef long k
    cdef long excluded = 0

    pk = exp(_lbinom(s, kmax) + _lbinom(nst, total_a - kmax) - lden)
    upper = pk
    pm_hi = pk
    k = kmax
    while k > a:
        pk = pk * ((k * (nst - total_a + k)) / ((s - k + 1.0) * (total_a - k + 1.0)))
        upper += pk
        pm_hi = pk
        k -= 1

    pk = exp(_lbinom(s, kmin) + _lbinom(nst, total_a - kmin) - lden)
    lower = pk
    k = kmin
    while k < a:
        pk = pk * (((s - k) * (total_a - k)) / ((k + 1.0) * (nst - total_a + k + 1.0)))
        lower += pk
        k += 1

    gate = pm_hi * (1.0 + 1e-7)
    two = 0.0
    pk = exp(_lbinom(s, kmin) + _lbinom(nst, total_a - kmin) - lden)
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


def fisher_tails(long events_a, long total_a, long events_b, long total_b):
    """One-pass Fisher tail probabilities for a 2x2 table.

    Returns ``(p_a_exceeds_b, p_b_exceeds_a, point_mass, p_two_sided)``.
    """
    _lfact_grow(total_a + total_b)
    cdef (double, double, double, double) r = _fisher_tails(
        events_a, total_a, events_b, total_b
    )
    return r[0], r[1], r[2], r[3]


def fisher_tails_batch(
    long[::1] events_a,
    long[::1] total_a,
    long[::1] events_b,
    long[::1] total_b,
    double[::1] out_hi,
    double[::1] out_lo,
    double[::1] out_pm,
):
    """Vector form of :func:`fisher_tails` over index-aligned arrays."""
    cdef Py_ssize_t i, m = events_a.shape[0]
    cdef long nmax = 0
    cdef (double, double, double, double) r
    for i in range(m):
        if total_a[i] + total_b[i] > nmax:
            nmax = total_a[i] + total_b[i]
    _lfact_grow(nmax)
    with nogil:
        for i in range(m):
            r = _fisher_tails(events_a[i], total_a[i], events_b[i], total_b[i])
            out_hi[i] = r[0]
            out_lo[i] = r[1]
            out_pm[i] = r[2]
