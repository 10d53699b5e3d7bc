import dataclasses

import numpy as np
import pytest

from distributions import (Distribution, UncertaintySpec, apply_parameters, get_parameter, sample_distribution,
                           set_parameter)
from errors import ConfigurationError
from finance import CostModel


def test_point_ignores_variate():
    assert sample_distribution(Distribution.point(5.0), 0.0) == 5.0
    assert sample_distribution(Distribution.point(5.0), 0.99) == 5.0


def test_uniform_linear_map():
    assert sample_distribution(Distribution.uniform(0.0, 10.0), 0.25) == pytest.approx(2.5)


def test_triangular_inverse_cdf():
    dist = Distribution.triangular(0.0, 5.0, 10.0)
    assert sample_distribution(dist, 0.5) == pytest.approx(5.0)
    assert sample_distribution(dist, 0.0) == pytest.approx(0.0)
    # F(x) = x^2 / 50 on the left branch
    assert sample_distribution(dist, 0.125) == pytest.approx(2.5)


def test_triangular_with_zero_width():
    assert sample_distribution(Distribution.triangular(3.0, 3.0, 3.0), 0.7) == 3.0


def test_truncated_normal_stays_in_bounds():
    dist = Distribution.normal(145.0, 15.0, lo=120.0, hi=170.0)
    values = sample_distribution(dist, np.linspace(0.0, 0.999999, 1001))
    assert values.min() >= 120.0
    assert values.max() <= 170.0
    assert sample_distribution(dist, 0.5) == pytest.approx(145.0)


def test_untruncated_normal_median():
    assert sample_distribution(Distribution.normal(10.0, 2.0), 0.5) == pytest.approx(10.0)
    assert np.isfinite(sample_distribution(Distribution.normal(10.0, 2.0), 0.0))


def test_uniform_sample_mean_converges():
    rng = np.random.default_rng(11)
    n = 10_000
    values = sample_distribution(Distribution.uniform(2.0, 6.0), rng.random(n))
    sd = 4.0 / np.sqrt(12.0)
    assert abs(values.mean() - 4.0) <= 3 * sd / np.sqrt(n)


def test_relative_distribution_scales_base():
    dist = Distribution.triangular(0.8, 1.0, 1.2, relative=True)
    assert dist.apply(sample_distribution(dist, 0.5), 25e6) == pytest.approx(25e6)


@pytest.mark.parametrize("build", [
    lambda: Distribution.uniform(1.0, 1.0),
    lambda: Distribution.triangular(0.0, 11.0, 10.0),
    lambda: Distribution.normal(1.0, 0.0),
    lambda: Distribution.normal(1.0, 1.0, lo=2.0, hi=1.0),
    lambda: Distribution("lognormal", mean=1.0, sd=1.0),
    lambda: Distribution("uniform", lo=1.0),
])
def test_invalid_distributions_fail_at_construction(build):
    with pytest.raises(ConfigurationError):
        build()


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        UncertaintySpec(samples=0)
    with pytest.raises(ConfigurationError):
        UncertaintySpec(seed=-1)
    with pytest.raises(ConfigurationError):
        UncertaintySpec(seed=2 ** 64)
    assert UncertaintySpec({'b.x': Distribution.point(1), 'a.y': Distribution.point(2)}).paths == ['a.y', 'b.x']


def test_get_parameter(egs_baseline):
    assert get_parameter(egs_baseline, 'costs.capex') == 25e6
    assert get_parameter(egs_baseline, 'assumptions.discount_rate') == 0.06
    assert get_parameter(egs_baseline, 'site.gradient') == 30.0


@pytest.mark.parametrize("path", [
    'plant.nonexistent',
    'plant.pathway',
    'plant.cop',
    'plant.temperature_coupled',
    'effective_costs',
    'costs.__class__',
    'site',
])
def test_get_parameter_rejects_non_numeric_paths(egs_baseline, path):
    with pytest.raises(ConfigurationError):
        get_parameter(egs_baseline, path)


def test_spec_validate_paths(egs_baseline):
    UncertaintySpec({'costs.opex': Distribution.point(1.0)}).validate_paths(egs_baseline)
    with pytest.raises(ConfigurationError):
        UncertaintySpec({'costs.nothing': Distribution.point(1.0)}).validate_paths(egs_baseline)


def test_set_parameter_rechecks_invariants(egs_baseline):
    with pytest.raises(ConfigurationError) as excinfo:
        set_parameter(egs_baseline, 'plant.capacity_factor', 1.4)
    assert excinfo.value.field == 'plant.capacity_factor'


def test_set_parameter_returns_copy(egs_baseline):
    updated = set_parameter(egs_baseline, 'assumptions.discount_rate', 0.08)
    assert updated.assumptions.discount_rate == 0.08
    assert egs_baseline.assumptions.discount_rate == 0.06


def test_set_capex_keeps_schedule_shape(egs_baseline):
    phased = dataclasses.replace(egs_baseline, costs=CostModel(((0, 15e6), (1, 10e6)), opex=1.2e6))
    updated = set_parameter(phased, 'costs.capex', 30e6)
    assert [amount for _, amount in updated.costs.capex_schedule] == pytest.approx([18e6, 12e6])


def test_apply_parameters(egs_baseline):
    updated = apply_parameters(egs_baseline, {'costs.opex': 1e6, 'assumptions.energy_tariff': 150.0})
    assert updated.costs.opex == 1e6
    assert updated.assumptions.energy_tariff == 150.0
