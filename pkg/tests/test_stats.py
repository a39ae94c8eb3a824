import math
from fractions import Fraction

import pytest

from seqtrial.stats import (
    Direction,
    TestMethod,
    TwoByTwoTable,
    fisher_exact_test,
    fisher_one_sided_p,
    hypergeom_pmf,
    max_significance_one_sided_p,
    normal_cdf,
    normal_quantile,
    two_prop_z_test,
)

from .oracles import (
    fisher_tails_frac,
    fisher_two_sided_frac,
    hypergeom_pmf_frac,
    normal_cdf_oracle,
    normal_quantile_oracle,
    two_prop_z_oracle,
)

A = Direction.A_EXCEEDS_B
B = Direction.B_EXCEEDS_A


class TestNormalCdf:
    def test_symmetry_at_zero(self):
        assert normal_cdf(0.0) == 0.5

    def test_frozen_oracle_values(self):
        # computed with the 50-digit erfc oracle in oracles.py
        assert normal_cdf(-1.0) == pytest.approx(0.15865525393145705, abs=1e-15)
        assert normal_cdf(1.95996) == pytest.approx(0.97499976712236905, abs=1e-15)

    def test_grid_against_oracle(self):
        for i in range(-80, 81):
            x = i / 10
            assert abs(normal_cdf(x) - float(normal_cdf_oracle(x))) <= 1e-14

    def test_monotone_and_complement(self):
        prev = -1.0
        for i in range(-60, 61):
            x = i / 7.5
            c = normal_cdf(x)
            assert c >= prev
            prev = c
            assert normal_cdf(x) + normal_cdf(-x) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), float("-inf")])
    def test_nonfinite_rejected(self, bad):
        with pytest.raises(ValueError):
            normal_cdf(bad)


class TestNormalQuantile:
    def test_median(self):
        assert normal_quantile(0.5) == 0.0

    def test_frozen_oracle_values(self):
        assert normal_quantile(0.975) == pytest.approx(1.9599639845400542, abs=1e-10)
        # the z whose upper tail is the 0.382 futility threshold
        assert normal_quantile(0.618) == pytest.approx(0.30023225938072186, abs=1e-10)

    def test_bisection_oracle_grid(self):
        for p in (0.001, 0.0081, 0.025, 0.21, 0.382, 0.5, 0.87, 0.975, 0.999):
            assert normal_quantile(p) == pytest.approx(
                normal_quantile_oracle(p), abs=1e-10
            )

    def test_round_trip(self):
        # Above ~x=5.5 the CDF saturates toward 1.0 in float64 and the
        # quantile cannot recover x to 1e-9 from the rounded probability;
        # there the error is bounded by the tail-density information limit.
        for i in range(-79, 80):
            x = i / 10
            err = abs(normal_quantile(normal_cdf(x)) - x)
            if x <= 5.5:
                assert err <= 1e-9
            else:
                assert err <= 4.0 * 1.1e-16 / math.exp(-0.5 * x * x) * math.sqrt(
                    2 * math.pi
                )

    def test_round_trip_probability_domain(self):
        for i in range(1, 400):
            p = i / 400
            assert normal_cdf(normal_quantile(p)) == pytest.approx(p, abs=1e-14)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.7])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            normal_quantile(bad)


class TestHypergeomPmf:
    def test_exact_rational_value(self):
        assert hypergeom_pmf(6, 20, 6, 10) == pytest.approx(
            float(Fraction(1001, 184756)), abs=1e-15
        )

    def test_no_successes(self):
        assert hypergeom_pmf(0, 10, 0, 5) == 1.0

    def test_support_sums_to_one(self):
        total = sum(hypergeom_pmf(k, 20, 6, 10) for k in range(0, 7))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_outside_support_is_zero(self):
        assert hypergeom_pmf(7, 20, 6, 10) == 0.0
        assert hypergeom_pmf(-1, 20, 6, 10) == 0.0

    def test_grid_against_fraction_oracle(self):
        for pop in (7, 12, 19):
            for succ in range(0, pop + 1, 3):
                for draws in range(0, pop + 1, 2):
                    for k in range(0, draws + 1):
                        want = float(hypergeom_pmf_frac(k, pop, succ, draws))
                        assert hypergeom_pmf(k, pop, succ, draws) == pytest.approx(
                            want, abs=1e-13
                        )

    def test_inconsistent_counts(self):
        with pytest.raises(ValueError):
            hypergeom_pmf(1, 10, 12, 5)
        with pytest.raises(ValueError):
            hypergeom_pmf(1, 10, 5, 12)


class TestFisherOneSided:
    def test_exact_rational_example(self):
        t = TwoByTwoTable(5, 10, 1, 10)
        assert fisher_one_sided_p(t, A) == pytest.approx(
            float(Fraction(13013, 184756)), abs=1e-14
        )
        assert fisher_one_sided_p(t, B) == pytest.approx(
            float(1 - Fraction(1001, 184756)), abs=1e-14
        )

    def test_balanced_table(self):
        t = TwoByTwoTable(10, 20, 10, 20)
        assert fisher_one_sided_p(t, A) > 0.5
        assert fisher_exact_test(t, A).p_two_sided == 1.0

    def test_point_mass_identity(self):
        for t in _table_grid(max_total=22):
            hi = fisher_one_sided_p(t, A)
            lo = fisher_one_sided_p(t, B)
            pm = float(
                hypergeom_pmf_frac(
                    t.events_a,
                    t.total_a + t.total_b,
                    t.events_a + t.events_b,
                    t.total_a,
                )
            )
            assert hi + lo - pm == pytest.approx(1.0, abs=1e-12)

    def test_label_swap_invariance(self):
        for t in _table_grid(max_total=18):
            s = t.swapped()
            assert fisher_one_sided_p(t, A) == pytest.approx(
                fisher_one_sided_p(s, B), abs=1e-14
            )
            assert fisher_one_sided_p(t, B) == pytest.approx(
                fisher_one_sided_p(s, A), abs=1e-14
            )

    def test_monotone_in_events_a(self):
        # margins fixed: transfer events from B to A and the upper tail shrinks
        for ea in range(0, 8):
            eb = 8 - ea
            t = TwoByTwoTable(ea, 12, eb, 12)
            if ea > 0:
                prev = TwoByTwoTable(ea - 1, 12, eb + 1, 12)
                assert fisher_one_sided_p(t, A) < fisher_one_sided_p(prev, A)

    def test_enumeration_oracle_small_grid(self):
        for t in _table_grid(max_total=20):
            hi, lo, _ = fisher_tails_frac(t.events_a, t.total_a, t.events_b, t.total_b)
            assert abs(fisher_one_sided_p(t, A) - float(hi)) <= 1e-12
            assert abs(fisher_one_sided_p(t, B) - float(lo)) <= 1e-12

    def test_two_sided_small_p_rule(self):
        for t in _table_grid(max_total=16):
            want = float(
                fisher_two_sided_frac(t.events_a, t.total_a, t.events_b, t.total_b)
            )
            got = fisher_exact_test(t, A).p_two_sided
            assert got == pytest.approx(want, abs=1e-12)

    def test_degenerate_margins(self):
        t = TwoByTwoTable(0, 5, 0, 7)
        assert fisher_one_sided_p(t, A) == 1.0
        r = fisher_exact_test(t, A)
        assert r.degenerate
        assert r.p_one_sided == 1.0 and r.p_other_side == 1.0


class TestMaxSignificance:
    def test_directional_example(self):
        p, d = max_significance_one_sided_p(TwoByTwoTable(5, 10, 1, 10))
        assert p == pytest.approx(float(Fraction(13013, 184756)), abs=1e-14)
        assert d is A

    def test_label_swap_maps_direction(self):
        p, d = max_significance_one_sided_p(TwoByTwoTable(1, 10, 5, 10))
        assert p == pytest.approx(float(Fraction(13013, 184756)), abs=1e-14)
        assert d is B

    def test_tie_break_on_balanced_table(self):
        for n in (3, 10, 20, 46):
            for e in (0, n // 2, n):
                _, d = max_significance_one_sided_p(TwoByTwoTable(e, n, e, n))
                assert d is A

    def test_is_min_of_both_directions(self):
        for t in _table_grid(max_total=18):
            p, _ = max_significance_one_sided_p(t)
            assert p == min(fisher_one_sided_p(t, A), fisher_one_sided_p(t, B))

    def test_invariant_under_label_swap(self):
        for t in _table_grid(max_total=18):
            assert max_significance_one_sided_p(t)[0] == pytest.approx(
                max_significance_one_sided_p(t.swapped())[0], abs=0
            )


class TestTwoPropZ:
    def test_oracle_example(self):
        r = two_prop_z_test(TwoByTwoTable(30, 92, 25, 92), A)
        assert r.z == pytest.approx(0.80519805275339411, abs=1e-12)
        assert r.p_one_sided == pytest.approx(0.21035269999214306, abs=1e-12)
        assert r.method is TestMethod.NORMAL_APPROX

    def test_identical_rates(self):
        for alt in (A, B):
            r = two_prop_z_test(TwoByTwoTable(7, 30, 7, 30), alt)
            assert r.z == 0.0
            assert r.p_one_sided == 0.5

    def test_label_swap_antisymmetry(self):
        r1 = two_prop_z_test(TwoByTwoTable(30, 92, 25, 92), A)
        r2 = two_prop_z_test(TwoByTwoTable(25, 92, 30, 92), B)
        assert r2.z == pytest.approx(-r1.z, abs=1e-15)
        assert r2.p_one_sided == pytest.approx(r1.p_one_sided, abs=1e-15)

    def test_one_sided_pair_sums_to_one(self):
        r = two_prop_z_test(TwoByTwoTable(13, 40, 9, 35), A)
        assert r.p_one_sided + r.p_other_side == pytest.approx(1.0, abs=1e-15)

    def test_oracle_grid(self):
        for ea, ta, eb, tb in [(3, 11, 6, 13), (20, 50, 11, 45), (1, 9, 8, 9)]:
            z, p = two_prop_z_oracle(ea, ta, eb, tb)
            r = two_prop_z_test(TwoByTwoTable(ea, ta, eb, tb), A)
            assert r.z == pytest.approx(z, abs=1e-12)
            assert r.p_one_sided == pytest.approx(p, abs=1e-12)

    def test_degenerate_pooled_rate(self):
        with pytest.raises(ValueError):
            two_prop_z_test(TwoByTwoTable(0, 10, 0, 10), A)
        with pytest.raises(ValueError):
            two_prop_z_test(TwoByTwoTable(10, 10, 10, 10), A)


class TestTableValidation:
    @pytest.mark.parametrize(
        "args",
        [(-1, 10, 0, 10), (11, 10, 0, 10), (0, 0, 0, 10), (0, 10, 5, 4)],
    )
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            TwoByTwoTable(*args)

    def test_rates(self):
        t = TwoByTwoTable(30, 92, 25, 92)
        assert t.rate_a == pytest.approx(30 / 92)
        assert t.pooled_rate == pytest.approx(55 / 184)
        assert not t.degenerate


def _table_grid(max_total: int):
    """Small exhaustive-ish grid of valid tables for property checks."""
    tables = []
    for ta in range(1, max_total):
        for tb in range(1, max_total - ta + 1):
            if ta + tb > max_total:
                continue
            for ea in range(0, ta + 1, max(1, ta // 3)):
                for eb in range(0, tb + 1, max(1, tb // 3)):
                    tables.append(TwoByTwoTable(ea, ta, eb, tb))
    return tables
