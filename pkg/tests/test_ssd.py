import math

import pytest

from src.errors import InfeasibleTargetError, MonotonicityError
from src.model import DesignPrior, NormalMomentPrior, NormalPrior, Orientation, PointPrior, TestSpec
from src.power import PowerQuery, power
from src.ssd import (
    SizingMethod,
    feasibility,
    freq_n,
    lambert_feasibility,
    n_local_normal,
    n_point_analysis,
    n_search,
    sample_size,
)

K_COLUMNS = (1 / 3, 1 / 4, 1 / 5, 1 / 6, 1 / 7, 1 / 8, 1 / 9, 1 / 10, 1 / 30, 1 / 100, 1 / 300, 1 / 1000)

# per-group n, point analysis prior and point design prior at the alternative, unit variance 2, effect 1
MATCHED_DESIGN_N = {
    0.50: (5, 6, 7, 8, 8, 9, 9, 10, 14, 19, 23, 28),
    0.55: (6, 7, 8, 9, 9, 10, 10, 11, 15, 21, 25, 30),
    0.60: (7, 8, 9, 10, 11, 11, 12, 12, 17, 22, 27, 32),
    0.65: (8, 9, 10, 11, 12, 13, 13, 14, 19, 24, 29, 34),
    0.70: (9, 11, 12, 13, 14, 14, 15, 15, 21, 26, 32, 37),
    0.75: (11, 13, 14, 15, 16, 16, 17, 18, 23, 29, 34, 40),
    0.80: (13, 15, 16, 17, 18, 19, 20, 20, 26, 32, 38, 44),
    0.85: (17, 18, 20, 21, 22, 23, 23, 24, 30, 37, 42, 48),
    0.90: (22, 23, 25, 26, 27, 28, 28, 29, 36, 42, 48, 55),
    0.95: (30, 32, 34, 35, 36, 37, 38, 38, 45, 52, 59, 66),
}

# unit information n, normal analysis and design priors centred on the null with the unit variance
UNIT_INFORMATION_N = {
    0.50: (10, 12, 13, 14, 15, 16, 16, 17, 22, 28, 33, 39),
    0.55: (14, 16, 17, 19, 20, 21, 21, 22, 29, 36, 43, 50),
    0.60: (19, 22, 24, 25, 27, 28, 29, 29, 38, 48, 57, 66),
    0.65: (27, 30, 33, 35, 37, 38, 40, 41, 53, 66, 77, 89),
    0.70: (40, 45, 48, 51, 53, 56, 57, 59, 75, 93, 109, 126),
    0.75: (63, 70, 75, 79, 82, 85, 88, 90, 114, 140, 163, 188),
    0.80: (108, 118, 126, 132, 138, 143, 147, 150, 188, 229, 265, 305),
    0.85: (212, 230, 244, 256, 265, 274, 281, 287, 355, 427, 493, 564),
    0.90: (538, 579, 610, 636, 658, 677, 693, 708, 859, 1023, 1170, 1331),
    0.95: (2554, 2716, 2841, 2943, 3029, 3103, 3168, 3226, 3829, 4481, 5071, 5714),
}


def _cells(table):
    return [(target, k, row[j]) for target, row in table.items() for j, k in enumerate(K_COLUMNS)]


@pytest.mark.parametrize("target, k, expected", _cells(MATCHED_DESIGN_N))
def test_matched_design_table(target, k, expected):
    test = TestSpec(0.0, k, Orientation.EVIDENCE_FOR_H1, 2.0)
    result = n_point_analysis(test, PointPrior(1.0), DesignPrior(1.0), target)
    assert result.n_integer == expected
    assert result.method is SizingMethod.ANALYTIC_MATCHED_DESIGN


@pytest.mark.parametrize("target, k, expected", _cells(UNIT_INFORMATION_N))
def test_unit_information_table(target, k, expected):
    result = n_local_normal(k, target, 1.0, 1.0)
    assert math.ceil(result.unit_information_n) == expected
    assert result.method is SizingMethod.LAMBERT_W


@pytest.mark.parametrize("target, k, n", _cells(UNIT_INFORMATION_N))
def test_unit_information_table_reaches_target(target, k, n):
    test = TestSpec(0.0, k, Orientation.EVIDENCE_FOR_H1, 1.0)
    achieved = power(PowerQuery(test, NormalPrior(0.0, 1.0), DesignPrior(0.0, 1.0), float(n))).probability
    assert achieved >= target - 0.01


def test_unit_information_scales_with_prior_variance():
    result = n_local_normal(1 / 10, 0.8, 2.0, 0.5)
    assert result.n_real == pytest.approx(8.0 * result.unit_information_n, rel=1e-12)
    assert math.ceil(result.unit_information_n) == 150


def test_lambert_refined_n_reaches_target():
    result = n_local_normal(1 / 10, 0.8, 1.0, 1.0)
    test = TestSpec(0.0, 1 / 10, Orientation.EVIDENCE_FOR_H1, 1.0)
    prior = NormalPrior(0.0, 1.0)
    exact = power(PowerQuery(test, prior, DesignPrior(0.0, 1.0), result.refined_n)).probability
    assert exact == pytest.approx(0.8, abs=1e-8)


class TestLambertFeasibility:
    def test_branch_point_bound(self):
        verdict = lambert_feasibility(1.0, 0.5)
        assert not verdict.feasible
        assert "-1/e" in verdict.reason

    def test_infeasible_sizing_raises(self):
        with pytest.raises(InfeasibleTargetError):
            n_local_normal(1.0, 0.5, 1.0, 1.0)

    def test_feasible(self):
        assert lambert_feasibility(1 / 10, 0.8).feasible


class TestMirtazapine:
    def test_point_design(self, mirtazapine):
        test, prior = mirtazapine
        result = n_point_analysis(test, prior, DesignPrior(-6.0), 0.8)
        assert result.n_integer == 124
        assert result.achieved_power >= 0.8

    def test_normal_design(self, mirtazapine):
        test, prior = mirtazapine
        result = sample_size(test, prior, DesignPrior(-6.0, 2.0), 0.8)
        assert result.n_integer == 195
        assert result.method is SizingMethod.ANALYTIC_NORMAL_DESIGN

    def test_frequentist_baseline(self):
        assert freq_n(0.05, 0.8, -6.0, sigma=15.0).n_integer == 99


def test_frequentist_standardized():
    assert freq_n(0.05, 0.8, 1.0, sigma=1 / math.sqrt(2.0)).n_real == pytest.approx(7.85, abs=0.005)


class TestStandardizedEffectDesign:
    def test_point_design(self, smd_test, unit_information_prior):
        result = sample_size(smd_test, unit_information_prior, DesignPrior(0.5), 0.95)
        assert result.n_integer == 153
        assert result.method is SizingMethod.ROOT_SEARCH

    def test_normal_design(self, smd_test, unit_information_prior):
        assert sample_size(smd_test, unit_information_prior, DesignPrior(0.5, 0.1), 0.95).n_integer == 211

    def test_evidence_for_null(self, unit_information_prior):
        test = TestSpec(0.0, 6.0, Orientation.EVIDENCE_FOR_H0, 2.0)
        assert sample_size(test, unit_information_prior, DesignPrior(0.0), 0.95).n_integer == 6691


class TestNormalMoment:
    prior = NormalMomentPrior(0.5 / math.sqrt(2.0))

    def test_point_design(self, smd_test):
        assert sample_size(smd_test, self.prior, DesignPrior(0.5), 0.95).n_integer == 302

    def test_evidence_for_null(self):
        test = TestSpec(0.0, 6.0, Orientation.EVIDENCE_FOR_H0, 2.0)
        assert sample_size(test, self.prior, DesignPrior(0.0), 0.95).n_integer == 997


@pytest.mark.slow
def test_one_sided_jzs_t_test(jzs_one_sided):
    test = TestSpec(0.0, 1 / 6, Orientation.EVIDENCE_FOR_H1)
    result = sample_size(test, jzs_one_sided, DesignPrior(0.5), 0.95)
    assert result.n_integer == 143


class TestFeasibility:
    test = TestSpec(0.0, 1 / 10, Orientation.EVIDENCE_FOR_H1, 1.0)

    def test_target_above_limit(self):
        verdict = feasibility(self.test, PointPrior(0.3), DesignPrior(0.3, 0.2), 0.8)
        assert not verdict.feasible
        assert verdict.limiting_power == pytest.approx(0.7734, abs=1e-4)

    def test_infeasible_sizing_reports_limit(self):
        with pytest.raises(InfeasibleTargetError) as info:
            sample_size(self.test, PointPrior(0.3), DesignPrior(0.3, 0.2), 0.8)
        assert info.value.limiting_power == pytest.approx(0.7734, abs=1e-4)

    def test_target_below_limit(self):
        result = sample_size(self.test, PointPrior(0.3), DesignPrior(0.3, 0.2), 0.7)
        assert result.feasibility.feasible
        assert power(PowerQuery(self.test, PointPrior(0.3), DesignPrior(0.3, 0.2), result.n_real)).probability == \
            pytest.approx(0.7, abs=1e-6)

    def test_null_design_never_gives_h1_evidence(self):
        with pytest.raises(InfeasibleTargetError):
            sample_size(self.test, NormalPrior(0.0, 1.0), DesignPrior(0.0), 0.8)

    @pytest.mark.parametrize("target", [0.0, 1.0, -0.2, 1.3])
    def test_target_must_be_a_probability(self, target):
        with pytest.raises(ValueError):
            feasibility(self.test, PointPrior(0.3), DesignPrior(0.3), target)


class TestClosedFormAgreesWithSearch:
    @pytest.mark.parametrize("prior, design, target", [
        (PointPrior(0.5), DesignPrior(0.5), 0.8),
        (PointPrior(0.5), DesignPrior(0.4), 0.9),
        (PointPrior(0.5), DesignPrior(0.6, 0.1), 0.8),
        (PointPrior(-0.3), DesignPrior(-0.35, 0.05), 0.85),
    ])
    def test_within_one_unit(self, prior, design, target):
        test = TestSpec(0.0, 1 / 10, Orientation.EVIDENCE_FOR_H1, 2.0)
        closed = n_point_analysis(test, prior, design, target)

        def power_fn(n):
            return power(PowerQuery(test, prior, design, n)).probability

        searched = n_search(power_fn, target)
        assert abs(closed.n_real - searched.n_real) < 1.0
        assert closed.n_integer == searched.n_integer

    def test_swapping_null_and_alternative(self):
        forward = n_point_analysis(TestSpec(0.0, 1 / 10, Orientation.EVIDENCE_FOR_H1, 2.0),
                                   PointPrior(1.0), DesignPrior(1.0), 0.8)
        swapped = n_point_analysis(TestSpec(1.0, 1 / 10, Orientation.EVIDENCE_FOR_H1, 2.0),
                                   PointPrior(0.0), DesignPrior(0.0), 0.8)
        assert swapped.n_real == pytest.approx(forward.n_real, rel=1e-12)

    def test_null_evidence_mirrors_alternative_evidence(self):
        h1 = n_point_analysis(TestSpec(0.0, 1 / 10, Orientation.EVIDENCE_FOR_H1, 2.0),
                              PointPrior(1.0), DesignPrior(1.0), 0.8)
        h0 = n_point_analysis(TestSpec(0.0, 10.0, Orientation.EVIDENCE_FOR_H0, 2.0),
                              PointPrior(1.0), DesignPrior(0.0), 0.8)
        assert h0.n_real == pytest.approx(h1.n_real, rel=1e-10)
        assert h0.achieved_power >= 0.8


class TestSearch:
    def test_finds_root(self):
        result = n_search(lambda n: 1.0 - math.exp(-n / 100.0), 0.5)
        assert result.n_real == pytest.approx(100.0 * math.log(2.0), rel=1e-9)
        assert result.n_integer == 70
        assert result.method is SizingMethod.ROOT_SEARCH

    def test_target_reached_at_lower_bound(self):
        assert n_search(lambda n: 0.99, 0.8, n_lo=3.0).n_real == 3.0

    def test_decreasing_power(self):
        with pytest.raises(MonotonicityError):
            n_search(lambda n: 0.9 / (1.0 + n), 0.5)

    def test_plateau_below_target(self):
        with pytest.raises(InfeasibleTargetError) as info:
            n_search(lambda n: 0.7 * (1.0 - 1.0 / (n + 1.0)), 0.8)
        assert info.value.limiting_power == pytest.approx(0.7, abs=1e-6)

    def test_bad_range(self):
        with pytest.raises(ValueError):
            n_search(lambda n: 0.5, 0.8, n_lo=10.0, n_hi=5.0)


def test_lambert_needs_centred_priors(smd_test):
    with pytest.raises(ValueError):
        sample_size(smd_test, NormalPrior(0.2, 0.5), DesignPrior(0.2, 0.5), 0.8, use_lambert=True)


def test_lambert_dispatch(smd_test):
    result = sample_size(smd_test, NormalPrior(0.0, 0.5), DesignPrior(0.0, 0.5), 0.8, use_lambert=True)
    assert result.method is SizingMethod.LAMBERT_W
    assert result.n_real == pytest.approx(2.0 / 0.25 * result.unit_information_n)
