import logging

import pytest

from emissions import (EmissionsContext, StageEmissions, avoided_emissions, emissions_report,
                       gshp_avoided_emissions, gshp_displaced_electricity, lifetime_emissions_balance,
                       reference_plants)
from errors import ConfigurationError, DomainError
from model import Pathway, PlantSpec


@pytest.fixture
def examples():
    return reference_plants()


def test_egs_5mw_avoided(examples):
    report = emissions_report(examples['egs_5mw'], EmissionsContext())
    assert report.annual_displaced_mwh == pytest.approx(35_040.0)
    assert report.avoided_annual == pytest.approx(17_625.12)
    assert report.avoided_annual == pytest.approx(17_600, rel=0.01)


def test_wells_2mw_avoided(examples):
    report = emissions_report(examples['wells_2mw'], EmissionsContext())
    assert report.avoided_annual == pytest.approx(6_609.42)
    assert report.avoided_annual == pytest.approx(6_600, rel=0.01)


def test_gshp_district_lands_in_published_band(examples):
    avoided = gshp_avoided_emissions(examples['gshp_district_10mw'], EmissionsContext())
    assert 4_000 <= avoided <= 5_000
    assert avoided == pytest.approx(4_443.0, abs=1.0)


def test_gshp_cop_ratio_without_savings_fraction():
    plant = PlantSpec(Pathway.GSHP, rated_capacity=10.0, capacity_factor=0.55, utilization=0.55, cop=5.5)
    assert gshp_displaced_electricity(plant) == pytest.approx(48_180.0 / 3.0 - 48_180.0 / 5.5)
    assert gshp_avoided_emissions(plant, EmissionsContext()) == pytest.approx(3_672.0, abs=1.0)


def test_gshp_report_carries_assumptions(examples):
    report = emissions_report(examples['gshp_district_10mw'], EmissionsContext())
    assert report.assumptions['cooling_mwh'] == pytest.approx(48_180.0)
    assert report.assumptions['electricity_savings_fraction'] == 0.55
    assert report.assumptions['effective_cop'] == pytest.approx(3.0 / 0.45)


def test_gshp_worse_than_baseline_warns(caplog):
    plant = PlantSpec(Pathway.GSHP, rated_capacity=1.0, capacity_factor=0.55, cop=2.5, baseline_cop=3.0)
    with caplog.at_level(logging.WARNING):
        avoided = gshp_avoided_emissions(plant, EmissionsContext())
    assert avoided < 0
    assert "more electricity than the baseline" in caplog.text


def test_avoided_emissions_rejects_negative_generation():
    with pytest.raises(DomainError):
        avoided_emissions(-1.0, EmissionsContext())


def test_displacement_requires_gshp(examples):
    with pytest.raises(DomainError):
        gshp_displaced_electricity(examples['egs_5mw'])


def test_grid_factor_must_be_positive():
    with pytest.raises(ConfigurationError):
        EmissionsContext(grid_factor=0.0)


def test_lifetime_balance_subtracts_stages():
    ctx = EmissionsContext(stages=StageEmissions(construction=500.0, operation=10.0, decommissioning=100.0))
    assert lifetime_emissions_balance(100.0, 25, ctx) == pytest.approx(2500.0 - 500.0 - 250.0 - 100.0)
    with pytest.raises(DomainError):
        lifetime_emissions_balance(100.0, 0, ctx)


def test_report_lifetime_defaults_to_plant(examples):
    report = emissions_report(examples['wells_2mw'], EmissionsContext())
    assert report.lifetime == 25
    assert report.avoided_lifetime_net == pytest.approx(25 * report.avoided_annual)


def test_custom_grid_factor():
    plant = PlantSpec(Pathway.EGS, rated_capacity=1.0, capacity_factor=1.0)
    report = emissions_report(plant, EmissionsContext(grid_factor=0.4))
    assert report.avoided_annual == pytest.approx(8760 * 0.4)
