import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy import stats

from src.bf import TTestKind, log_bf01_values, t_design
from src.bf.ttest import log_tbf01_at
from src.errors import DomainError
from src.model import (
    DesignPrior,
    NormalMomentPrior,
    NormalPrior,
    Orientation,
    PointPrior,
    TestSpec,
    TruncatedTPrior,
    estimate_unit_variance,
)
from src.power import (
    PowerQuery,
    limiting_power,
    power,
    power_curve,
    power_limit_point_analysis,
    power_t,
    t_success_region,
    type_one_error,
)
from src.power.ttest import limit_t


def grid_oracle(test, prior, design, n):
    """Integrate the predictive density of the estimate over {BF01 <= k} on a fine grid."""
    variance = estimate_unit_variance(test, prior) / n
    sd = math.sqrt(design.sd ** 2 + variance)
    estimates = np.linspace(design.mean - 12.0 * sd, design.mean + 12.0 * sd, 400001)
    log_bf = log_bf01_values(estimates, variance, test.null, prior)
    if test.orientation is Orientation.EVIDENCE_FOR_H1:
        success = log_bf <= test.log_k
    else:
        success = log_bf > test.log_k
    return sp_integrate.trapezoid(stats.norm.pdf(estimates, design.mean, sd) * success, estimates)


H1 = TestSpec(0.0, 1 / 10, Orientation.EVIDENCE_FOR_H1, 2.0)
H0 = TestSpec(0.0, 6.0, Orientation.EVIDENCE_FOR_H0, 2.0)

CONDITIONS = [
    (H1, PointPrior(0.5), DesignPrior(0.5), 40.0),
    (H1, PointPrior(0.5), DesignPrior(0.3, 0.2), 60.0),
    (H1, PointPrior(-0.4), DesignPrior(-0.2, 0.1), 100.0),
    (H1, NormalPrior(0.0, 0.7071), DesignPrior(0.5), 80.0),
    (H1, NormalPrior(0.3, 0.2), DesignPrior(0.2, 0.3), 30.0),
    (H1, NormalMomentPrior(0.354), DesignPrior(0.5), 90.0),
    (H1, NormalMomentPrior(0.354), DesignPrior(0.4, 0.1), 120.0),
    (H0, NormalPrior(0.0, 0.7071), DesignPrior(0.0), 500.0),
    (H0, NormalMomentPrior(0.354), DesignPrior(0.0), 400.0),
    (H0, PointPrior(0.5), DesignPrior(0.0, 0.05), 50.0),
]


@pytest.mark.parametrize("test, prior, design, n", CONDITIONS)
def test_closed_forms_match_grid_integration(test, prior, design, n):
    result = power(PowerQuery(test, prior, design, n))
    assert result.probability == pytest.approx(grid_oracle(test, prior, design, n), abs=2e-4)
    assert result.orientation is test.orientation
    assert result.n == n


def test_point_analysis_intermediates():
    v = 2.0 / 40.0
    result = power(PowerQuery(H1, PointPrior(0.5), DesignPrior(0.5), 40.0))
    assert set(result.intermediates) == {"Z", "predictive_sd"}
    assert result.intermediates["predictive_sd"] == pytest.approx(math.sqrt(2.0 / 40.0))
    # BF01 <= k once the estimate exceeds the midpoint by v log(1/k) / (mu - theta0)
    threshold = 0.25 + v * math.log(10.0) / 0.5
    assert result.probability == pytest.approx(stats.norm.sf(threshold, 0.5, math.sqrt(v)), rel=1e-12)


def test_normal_and_moment_intermediates():
    assert {"M", "X"} <= set(power(PowerQuery(H1, NormalPrior(0.0, 1.0), DesignPrior(0.5), 20.0)).intermediates)
    assert {"Y", "A", "W0"} <= set(power(PowerQuery(H1, NormalMomentPrior(0.5), DesignPrior(0.5), 20.0)).intermediates)


def test_point_analysis_at_null_is_undefined():
    with pytest.raises(DomainError):
        power(PowerQuery(H1, PointPrior(0.0), DesignPrior(0.5), 10.0))


def test_smd_n_153_reaches_95_percent(smd_test, unit_information_prior):
    design = DesignPrior(0.5)
    assert power(PowerQuery(smd_test, unit_information_prior, design, 153.0)).probability >= 0.95
    assert power(PowerQuery(smd_test, unit_information_prior, design, 152.0)).probability < 0.95


def test_moment_prior_bounded_below_threshold_gives_no_null_evidence():
    # BF01 never exceeds (1 + tau^2 / v)^(3/2), far below k = 6 for a tiny spread
    result = power(PowerQuery(H0, NormalMomentPrior(1e-3), DesignPrior(0.0), 10.0))
    assert result.probability == 0.0
    assert result.intermediates["Y"] == 0.0


class TestLimitingPower:
    def test_point_analysis_with_normal_design(self):
        test = TestSpec(0.0, 1 / 10, Orientation.EVIDENCE_FOR_H1, 1.0)
        limit = power_limit_point_analysis(test, PointPrior(0.3), DesignPrior(0.3, 0.2))
        assert limit == pytest.approx(0.7734, abs=1e-4)
        assert limit == pytest.approx(stats.norm.cdf(0.75), rel=1e-12)

    def test_negative_alternative_mirrors(self):
        test = TestSpec(0.0, 1 / 10, Orientation.EVIDENCE_FOR_H1, 1.0)
        assert power_limit_point_analysis(test, PointPrior(-0.3), DesignPrior(-0.3, 0.2)) == pytest.approx(
            stats.norm.cdf(0.75), rel=1e-12)

    @pytest.mark.parametrize("design_mean, expected", [(0.5, 1.0), (0.1, 0.0), (0.25, 0.5)])
    def test_point_analysis_with_point_design(self, design_mean, expected):
        assert power_limit_point_analysis(H1, PointPrior(0.5), DesignPrior(design_mean)) == expected

    def test_null_orientation_is_complement(self):
        assert limiting_power(H0, PointPrior(0.5), DesignPrior(0.3, 0.2)) == pytest.approx(
            1.0 - stats.norm.cdf((0.3 - 0.25) / 0.2), rel=1e-12)

    def test_consistent_priors(self):
        assert limiting_power(H1, NormalPrior(0.0, 1.0), DesignPrior(0.5, 0.3)) == 1.0
        assert limiting_power(H1, NormalMomentPrior(0.5), DesignPrior(0.0)) == 0.0
        assert limiting_power(H0, NormalPrior(0.0, 1.0), DesignPrior(0.0)) == 1.0

    def test_power_approaches_limit(self):
        query = PowerQuery(TestSpec(0.0, 1 / 10, Orientation.EVIDENCE_FOR_H1, 1.0), PointPrior(0.3),
                           DesignPrior(0.3, 0.2), 1e7)
        result = power(query)
        assert result.probability == pytest.approx(result.limiting_power, abs=1e-3)

    def test_t_prior_limit_is_design_mass_in_support(self):
        prior = TruncatedTPrior(0.0, 0.7071, 1.0, lower=0.0)
        assert limit_t(prior, DesignPrior(0.5), Orientation.EVIDENCE_FOR_H1) == 1.0
        assert limit_t(prior, DesignPrior(-0.5), Orientation.EVIDENCE_FOR_H1) == 0.0
        assert limit_t(prior, DesignPrior(0.0), Orientation.EVIDENCE_FOR_H1) == 0.0
        assert limit_t(prior, DesignPrior(0.1, 0.1), Orientation.EVIDENCE_FOR_H1) == pytest.approx(
            stats.norm.cdf(1.0), rel=1e-12)
        assert limit_t(prior, DesignPrior(0.1, 0.1), Orientation.EVIDENCE_FOR_H0) == pytest.approx(
            stats.norm.cdf(-1.0), rel=1e-9)


def test_power_increases_with_n():
    query = PowerQuery(H1, NormalPrior(0.0, 0.7071), DesignPrior(0.4), 5.0)
    values = [r.probability for r in power_curve(query, [5, 10, 20, 40, 80, 160, 320])]
    assert values == sorted(values)


def test_power_curve_keeps_order():
    query = PowerQuery(H1, PointPrior(0.5), DesignPrior(0.5), 5.0)
    n_values = [80.0, 10.0, 40.0, 20.0]
    results = power_curve(query, n_values)
    assert [r.n for r in results] == n_values
    assert [r.probability for r in results] == [power(query.at(n)).probability for n in n_values]


class TestTypeOneError:
    def test_is_power_under_point_null(self):
        prior = NormalPrior(0.0, 0.7071)
        expected = power(PowerQuery(H1, prior, DesignPrior(0.0), 50.0)).probability
        assert type_one_error(H1, prior, 50.0) == expected
        assert 0.0 < expected < 0.05

    def test_vanishes_for_large_n(self):
        assert type_one_error(H1, NormalPrior(0.0, 0.7071), 1e6) < 1e-3

    def test_needs_h1_orientation(self):
        with pytest.raises(ValueError):
            type_one_error(H0, NormalPrior(0.0, 1.0), 50.0)


class TestTTestPath:
    two_sided = TruncatedTPrior(0.0, 1 / math.sqrt(2.0), 1.0)
    one_sided = TruncatedTPrior(0.0, 1 / math.sqrt(2.0), 1.0, lower=0.0)

    def test_symmetric_region(self):
        t_lower, t_upper = t_success_region(50.0, self.two_sided, 1 / 6)
        assert t_lower == pytest.approx(-t_upper, rel=1e-8)
        n_eff, df = t_design(50.0)
        assert log_tbf01_at(t_upper, n_eff, df, self.two_sided) == pytest.approx(math.log(1 / 6), abs=1e-6)

    def test_one_sided_region_has_upper_crossing_only(self):
        t_lower, t_upper = t_success_region(50.0, self.one_sided, 1 / 6)
        assert t_lower == -math.inf
        assert 1.5 < t_upper < 4.0
        n_eff, df = t_design(50.0)
        assert log_tbf01_at(t_upper, n_eff, df, self.one_sided) == pytest.approx(math.log(1 / 6), abs=1e-6)

    def test_one_sample_region(self):
        _, t_upper = t_success_region(30.0, self.one_sided, 1 / 10, TTestKind.ONE_SAMPLE)
        n_eff, df = t_design(30.0, TTestKind.ONE_SAMPLE)
        assert log_tbf01_at(t_upper, n_eff, df, self.one_sided) == pytest.approx(math.log(1 / 10), abs=1e-6)

    def test_normal_approximation_close_to_exact(self):
        test = TestSpec(0.0, 1 / 6, Orientation.EVIDENCE_FOR_H1)
        approx = power_t(PowerQuery(test, self.one_sided, DesignPrior(0.5), 60.0)).probability
        exact = power_t(PowerQuery(test, self.one_sided, DesignPrior(0.5), 60.0, exact_t=True)).probability
        assert exact == pytest.approx(approx, abs=0.01)

    def test_exact_path_with_normal_design(self):
        test = TestSpec(0.0, 1 / 6, Orientation.EVIDENCE_FOR_H1)
        result = power_t(PowerQuery(test, self.one_sided, DesignPrior(0.5, 0.1), 60.0, exact_t=True))
        point = power_t(PowerQuery(test, self.one_sided, DesignPrior(0.5), 60.0, exact_t=True))
        assert 0.0 < result.probability < 1.0
        assert result.probability == pytest.approx(point.probability, abs=0.05)

    def test_null_evidence_is_complement(self):
        h1 = TestSpec(0.0, 1 / 6, Orientation.EVIDENCE_FOR_H1)
        h0 = TestSpec(0.0, 6.0, Orientation.EVIDENCE_FOR_H0)
        result = power_t(PowerQuery(h0, self.two_sided, DesignPrior(0.0), 400.0))
        t_lower, t_upper = t_success_region(400.0, self.two_sided, 6.0)
        assert result.probability == pytest.approx(stats.norm.cdf(t_upper) - stats.norm.cdf(t_lower), rel=1e-9)
        assert result.intermediates["t_crit_upper"] == t_upper
        assert power_t(PowerQuery(h1, self.two_sided, DesignPrior(0.0), 400.0)).probability < 0.05

    def test_intermediates(self):
        test = TestSpec(0.0, 1 / 6, Orientation.EVIDENCE_FOR_H1)
        result = power(PowerQuery(test, self.one_sided, DesignPrior(0.5), 40.0))
        assert result.intermediates["n_eff"] == pytest.approx(20.0)
        assert result.intermediates["df"] == 78.0
        assert result.intermediates["t_mean"] == pytest.approx(0.5 * math.sqrt(20.0))
        assert result.intermediates["t_sd"] == 1.0
        assert result.limiting_power == 1.0

    def test_needs_zero_null(self):
        test = TestSpec(0.2, 1 / 6, Orientation.EVIDENCE_FOR_H1)
        with pytest.raises(DomainError):
            power_t(PowerQuery(test, self.one_sided, DesignPrior(0.5), 40.0))


class TestNormalMomentPerGroup:
    prior = NormalMomentPrior(0.5 / math.sqrt(2.0))

    def test_n_counts_each_of_two_arms(self, smd_test):
        assert power(PowerQuery(smd_test, self.prior, DesignPrior(0.5), 302.0)).probability >= 0.95
        assert power(PowerQuery(smd_test, self.prior, DesignPrior(0.5), 301.0)).probability < 0.95

    def test_predictive_sd_uses_twice_the_unit_variance(self, smd_test):
        result = power(PowerQuery(smd_test, self.prior, DesignPrior(0.5), 100.0))
        assert result.intermediates["predictive_sd"] == pytest.approx(math.sqrt(4.0 / 100.0))


@pytest.mark.parametrize("mean, k", [(0.5, 1 / 6), (-0.3, 1 / 10), (1.0, 1 / 3)])
def test_point_and_normal_design_curves_cross_at_one_half(mean, k):
    # a design spread leaves the power at 1/2 where the point-design power is 1/2
    test = TestSpec(0.0, k, Orientation.EVIDENCE_FOR_H1, 2.0)
    prior = PointPrior(mean)
    # n at which the success threshold sits on the design mean: mean / 2 = 2 log(1/k) / (n mean)
    n = 4.0 * math.log(1 / k) / mean ** 2
    point = power(PowerQuery(test, prior, DesignPrior(mean), n)).probability
    spread = power(PowerQuery(test, prior, DesignPrior(mean, 0.2), n)).probability
    assert point == pytest.approx(0.5, abs=1e-9)
    assert spread == pytest.approx(0.5, abs=1e-9)
    assert power(PowerQuery(test, prior, DesignPrior(mean, 0.2), 2 * n)).probability < \
        power(PowerQuery(test, prior, DesignPrior(mean), 2 * n)).probability


@pytest.mark.parametrize("mean, n", [(0.5, 40.0), (-0.4, 120.0), (0.2, 15.0)])
def test_normal_analysis_tends_to_point_analysis(mean, n):
    design = DesignPrior(0.5, 0.1)
    normal = power(PowerQuery(H1, NormalPrior(mean, 1e-8), design, n)).probability
    point = power(PowerQuery(H1, PointPrior(mean), design, n)).probability
    assert normal == pytest.approx(point, rel=1e-9)


@pytest.mark.parametrize("design", [DesignPrior(0.5), DesignPrior(-0.3, 0.05), DesignPrior(0.2, 0.01)])
def test_normal_analysis_power_tends_to_one(design):
    assert power(PowerQuery(H1, NormalPrior(0.0, 0.7071), design, 1e8)).probability >= 1.0 - 1e-3


def test_exact_t_power_at_large_df():
    test = TestSpec(0.0, 1 / 6, Orientation.EVIDENCE_FOR_H1)
    prior = TruncatedTPrior(0.0, 1 / math.sqrt(2.0), 1.0)
    result = power_t(PowerQuery(test, prior, DesignPrior(0.5), 400.0, exact_t=True))
    assert 0.99 < result.probability <= 1.0
