"""Avoided-CO2 accounting against a grid emission factor.

Units: generation in MWh, emissions in metric tonnes. A grid factor in
kg CO2/kWh is numerically the same as t CO2/MWh, so no conversion appears in
the arithmetic below.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import model
from errors import ConfigurationError, DomainError, require_finite
from model import Pathway, PlantSpec

logger = logging.getLogger(__name__)

QATAR_GRID_FACTOR = 0.503  # kg CO2/kWh


@dataclass(frozen=True)
class StageEmissions:
    construction: float = 0.0  # t
    operation: float = 0.0  # t/yr
    decommissioning: float = 0.0  # t

    def __post_init__(self):
        for name in ('construction', 'operation', 'decommissioning'):
            if require_finite(name, getattr(self, name)) < 0:
                raise ConfigurationError(name, 'must be >= 0')


@dataclass(frozen=True)
class EmissionsContext:
    grid_factor: float = QATAR_GRID_FACTOR
    stages: StageEmissions = field(default_factory=StageEmissions)

    def __post_init__(self):
        if require_finite('grid_factor', self.grid_factor) <= 0:
            raise ConfigurationError('grid_factor', 'must be > 0')


@dataclass
class EmissionsReport:
    annual_displaced_mwh: float
    avoided_annual: float  # t/yr
    avoided_lifetime_net: float  # t
    grid_factor: float
    lifetime: int
    assumptions: dict = field(default_factory=dict)


def avoided_emissions(annual_generation: float, ctx: EmissionsContext) -> float:
    """Tonnes of CO2 per year displaced by the given grid-equivalent MWh."""
    if annual_generation < 0:
        raise DomainError(f"annual_generation must be >= 0, got {annual_generation}")
    return annual_generation * ctx.grid_factor


def gshp_displaced_electricity(plant: PlantSpec, cooling_delivered: Optional[float] = None) -> float:
    """Grid MWh avoided by serving the cooling with the GSHP instead of the baseline chiller."""
    if plant.pathway is not Pathway.GSHP:
        raise DomainError(f"GSHP displacement requires a GSHP plant, got {plant.pathway.value}")
    if cooling_delivered is None:
        cooling_delivered = model.annual_energy(plant.rated_capacity, plant.utilization)
    baseline = model.gshp_electricity(cooling_delivered, plant.baseline_cop)
    gshp = model.gshp_electricity(cooling_delivered, model.gshp_effective_cop(plant))
    return baseline - gshp


def gshp_avoided_emissions(plant: PlantSpec, ctx: EmissionsContext,
                           cooling_delivered: Optional[float] = None) -> float:
    displaced = gshp_displaced_electricity(plant, cooling_delivered)
    if displaced < 0:
        logger.warning(f"GSHP uses more electricity than the baseline ({displaced:.1f} MWh/yr)")
    return displaced * ctx.grid_factor


def lifetime_emissions_balance(annual_avoided: float, lifetime: int, ctx: EmissionsContext) -> float:
    if lifetime < 1:
        raise DomainError(f"lifetime must be >= 1, got {lifetime}")
    stages = ctx.stages
    return (annual_avoided * lifetime
            - stages.construction
            - stages.operation * lifetime
            - stages.decommissioning)


def emissions_report(plant: PlantSpec, ctx: EmissionsContext, annual_energy: Optional[float] = None,
                     lifetime: Optional[int] = None) -> EmissionsReport:
    """Annual and lifetime avoided CO2 for one plant.

    `annual_energy` is the project's energy basis: electricity for generating
    pathways, cooling delivered for GSHP.
    """
    lifetime = lifetime or plant.lifetime
    assumptions = {}
    if plant.pathway is Pathway.GSHP:
        displaced = gshp_displaced_electricity(plant, annual_energy)
        assumptions = {
            'cooling_mwh': annual_energy if annual_energy is not None
            else model.annual_energy(plant.rated_capacity, plant.utilization),
            'utilization': plant.utilization,
            'cop': plant.cop,
            'effective_cop': model.gshp_effective_cop(plant),
            'baseline_cop': plant.baseline_cop,
        }
        if plant.electricity_savings_fraction is not None:
            assumptions['electricity_savings_fraction'] = plant.electricity_savings_fraction
    else:
        displaced = annual_energy if annual_energy is not None \
            else model.annual_energy(plant.rated_capacity, plant.capacity_factor)

    annual = displaced * ctx.grid_factor
    return EmissionsReport(
        annual_displaced_mwh=displaced,
        avoided_annual=annual,
        avoided_lifetime_net=lifetime_emissions_balance(annual, lifetime, ctx),
        grid_factor=ctx.grid_factor,
        lifetime=lifetime,
        assumptions=assumptions,
    )


def reference_plants():
    """Reference plants for the avoided-emissions checks, keyed by a short name."""
    return {
        'egs_5mw': PlantSpec(Pathway.EGS, rated_capacity=5.0, capacity_factor=0.80),
        'wells_2mw': PlantSpec(Pathway.WELL_REPURPOSING, rated_capacity=2.0, capacity_factor=0.75),
        # 10 MW of cooling at the 55% midpoint of a 50–60% grid saving
        'gshp_district_10mw': PlantSpec(Pathway.GSHP, rated_capacity=10.0, capacity_factor=0.55,
                                        utilization=0.55, cop=5.5, baseline_cop=3.0,
                                        electricity_savings_fraction=0.55),
    }
