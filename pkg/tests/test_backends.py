"""The compiled and pure-Python kernels must agree bit-for-bit."""

import numpy as np
import pytest

from seqtrial import _pykernels

try:
    from seqtrial import _ckernels
except ImportError:
    _ckernels = None

needs_compiled = pytest.mark.skipif(
    _ckernels is None, reason="compiled extension not built"
)


def _all_tables(max_total):
    for ta in range(1, max_total):
        for tb in range(1, max_total - ta + 1):
            for ea in range(ta + 1):
                for eb in range(tb + 1):
                    yield ea, ta, eb, tb


@needs_compiled
def test_fisher_tails_bit_identical():
    for ea, ta, eb, tb in _all_tables(14):
        py = _pykernels.fisher_tails(ea, ta, eb, tb)
        cy = _ckernels.fisher_tails(ea, ta, eb, tb)
        assert py == cy, (ea, ta, eb, tb)


@needs_compiled
def test_fisher_tails_bit_identical_large_tables():
    rng = np.random.default_rng(1234)
    for _ in range(500):
        ta, tb = rng.integers(50, 300, size=2)
        ea, eb = rng.integers(0, ta + 1), rng.integers(0, tb + 1)
        py = _pykernels.fisher_tails(int(ea), int(ta), int(eb), int(tb))
        cy = _ckernels.fisher_tails(int(ea), int(ta), int(eb), int(tb))
        assert py == cy


@needs_compiled
def test_hypergeom_pmf_bit_identical():
    for pop in (5, 17, 60):
        for succ in range(0, pop + 1, 3):
            for draws in range(0, pop + 1, 4):
                for k in range(draws + 1):
                    assert _pykernels.hypergeom_pmf(
                        k, pop, succ, draws
                    ) == _ckernels.hypergeom_pmf(k, pop, succ, draws)


@needs_compiled
def test_batch_matches_scalar():
    rng = np.random.default_rng(7)
    n = 200
    ta = rng.integers(2, 120, size=n)
    tb = rng.integers(2, 120, size=n)
    ea = (rng.random(n) * (ta + 1)).astype(np.int64)
    eb = (rng.random(n) * (tb + 1)).astype(np.int64)
    hi = np.empty(n)
    lo = np.empty(n)
    pm = np.empty(n)
    _ckernels.fisher_tails_batch(
        ea.astype(np.int64),
        ta.astype(np.int64),
        eb.astype(np.int64),
        tb.astype(np.int64),
        hi,
        lo,
        pm,
    )
    hi2 = np.empty(n)
    lo2 = np.empty(n)
    pm2 = np.empty(n)
    _pykernels.fisher_tails_batch(ea, ta, eb, tb, hi2, lo2, pm2)
    assert np.array_equal(hi, hi2)
    assert np.array_equal(lo, lo2)
    assert np.array_equal(pm, pm2)
