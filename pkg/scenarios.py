"""Automation scenarios, pathway presets and project evaluation.

Preset calibration
------------------
The reference costs give CAPEX, OPEX, LCOE and payback per pathway but no
capacities or tariffs. The annual energies are back-derived by inverting the
LCOE at r = 6 %, n = 25 against each pathway's baseline (annuity factor 12.7834):

    EGS    (25.0M + 1.20M * 12.7834) / (145 * 12.7834) = 21,764 MWh
    wells  ( 8.0M + 0.35M * 12.7834) / ( 95 * 12.7834) = 10,272 MWh
    GSHP   ( 5.0M + 0.18M * 12.7834) / ( 72 * 12.7834) =  7,932 MWh cooling

Tariffs come from the baseline paybacks: revenue = CAPEX / payback + OPEX,
e.g. EGS 3.2M/yr / 21,764 MWh = 147.03 USD/MWh. Full-automation paybacks then
follow from the same tariff. A 10.5 yr EGS full-automation payback would need
a lower revenue (3.05M/yr) than the baseline, so the engine reports 9.8 yr
there.

Full-automation fractions are the ratios of full to baseline costs (CAPEX
14/10/12 %, OPEX 1/6, 1/7, 1/6). The headline 12–14 % CAPEX saving does not
hold for wells, whose costs imply 10 %; the costs win. Moderate automation is
taken as the midpoint of baseline and full.

The GSHP preset splits its 5M capex into 3.96M of borehole drilling (1,650 kW
at 50 W/m is 33,000 m, at 120 USD/m) and 1.04M for everything else, so a
different extraction rate changes the borehole length and the capex with it.
"""
import dataclasses
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import model
from distributions import UncertaintySpec
from emissions import EmissionsContext, EmissionsReport, emissions_report
from errors import ConfigurationError, GeothermalError, require_finite
from finance import (CashFlowSeries, CostModel, FinancialAssumptions, MetricsReport,
                     build_cash_flows, compute_metrics)
from model import Pathway, PlantSpec, SiteProfile

logger = logging.getLogger(__name__)


class AutomationLevel(str, Enum):
    BASELINE = "baseline"
    MODERATE = "moderate"
    FULL = "full"

    @property
    def label(self):
        return {
            AutomationLevel.BASELINE: "Baseline",
            AutomationLevel.MODERATE: "Moderate Automation",
            AutomationLevel.FULL: "Full Automation",
        }[self]


@dataclass(frozen=True)
class AutomationScenario:
    level: AutomationLevel = AutomationLevel.BASELINE
    capex_reduction: float = 0.0
    opex_reduction: float = 0.0

    def __post_init__(self):
        if not isinstance(self.level, AutomationLevel):
            try:
                object.__setattr__(self, 'level', AutomationLevel(str(self.level).lower()))
            except ValueError:
                raise ConfigurationError('level', f"unknown automation level {self.level!r}")
        for name in ('capex_reduction', 'opex_reduction'):
            value = getattr(self, name)
            if not 0 <= require_finite(name, value) < 1:
                raise ConfigurationError(name, 'must satisfy 0 <= reduction < 1')
            if self.level is AutomationLevel.BASELINE and value != 0:
                raise ConfigurationError(name, 'must be 0 for the Baseline level')


# Full-automation (capex, opex) reductions: ratio of full to baseline costs
FULL_REDUCTIONS = {
    Pathway.EGS: (0.14, 1 / 6),
    Pathway.WELL_REPURPOSING: (0.10, 1 / 7),
    Pathway.GSHP: (0.12, 1 / 6),
}

PATHWAY_IDS = {
    'egs': Pathway.EGS,
    'wells': Pathway.WELL_REPURPOSING,
    'gshp': Pathway.GSHP,
}

PATHWAY_LABELS = {
    Pathway.EGS: "Enhanced Geothermal System (EGS)",
    Pathway.WELL_REPURPOSING: "Well Repurposing",
    Pathway.GSHP: "Ground-Source Heat Pump (District Scale)",
}


def automation_scenario(pathway, level) -> AutomationScenario:
    """The preset reduction fractions for one pathway and level."""
    pathway = _pathway(pathway)
    level = _level(level)
    capex, opex = FULL_REDUCTIONS[pathway]
    if level is AutomationLevel.BASELINE:
        return AutomationScenario(level)
    if level is AutomationLevel.MODERATE:
        return AutomationScenario(level, capex / 2, opex / 2)
    return AutomationScenario(level, capex, opex)


def apply_automation(costs: CostModel, scenario: AutomationScenario) -> CostModel:
    keep_capex = 1 - scenario.capex_reduction
    return dataclasses.replace(
        costs,
        capex_schedule=tuple((year, amount * keep_capex) for year, amount in costs.capex_schedule),
        opex=costs.opex * (1 - scenario.opex_reduction),
        drilling_cost_per_m=costs.drilling_cost_per_m * keep_capex,
    )


@dataclass(frozen=True)
class ProjectConfig:
    name: str
    site: SiteProfile
    plant: PlantSpec
    costs: CostModel  # before automation
    automation: AutomationScenario = field(default_factory=AutomationScenario)
    assumptions: FinancialAssumptions = field(default_factory=FinancialAssumptions)
    annual_energy_override: Optional[float] = None  # MWh, bypasses capacity-factor energy
    emissions: EmissionsContext = field(default_factory=EmissionsContext)
    uncertainty: Optional[UncertaintySpec] = None

    def __post_init__(self):
        require_finite('annual_energy_override', self.annual_energy_override)
        if self.annual_energy_override is not None and self.annual_energy_override < 0:
            raise ConfigurationError('annual_energy_override', 'must be >= 0')
        if self.plant.lifetime != self.assumptions.lifetime:
            raise ConfigurationError('plant.lifetime', f'must equal assumptions.lifetime ({self.assumptions.lifetime})')
        for year, _ in self.costs.capex_schedule:
            if year > self.assumptions.lifetime:
                raise ConfigurationError('costs.capex_schedule', f'year {year} beyond lifetime {self.assumptions.lifetime}')
        if self.costs.drilling_cost_per_m > 0 and self.plant.peak_cooling_load is None:
            raise ConfigurationError('costs.drilling_cost_per_m', 'needs plant.peak_cooling_load to size the boreholes')

    def effective_costs(self) -> CostModel:
        """Costs after automation, with any borehole drilling already in year-0 capex."""
        return apply_automation(self.costs.with_drilling(self.plant), self.automation)

    def band_warnings(self):
        return ([f"site: {m}" for m in self.site.band_warnings()]
                + [f"plant: {m}" for m in self.plant.band_warnings()])


@dataclass
class Assessment:
    config: ProjectConfig
    annual_energy: float
    series: CashFlowSeries
    metrics: MetricsReport
    emissions: EmissionsReport
    resource: dict

    @property
    def levelized_label(self):
        return "LCOC" if self.config.plant.pathway is Pathway.GSHP else "LCOE"


def resolve_annual_energy(config: ProjectConfig) -> float:
    """Energy basis in MWh/yr: coupled output, else override, else rated capacity x capacity factor."""
    plant = config.plant
    if plant.temperature_coupled:
        return model.annual_energy(model.egs_net_power(config.site, plant), plant.capacity_factor)
    if config.annual_energy_override is not None:
        return config.annual_energy_override
    if plant.pathway is Pathway.GSHP:
        return model.annual_energy(plant.rated_capacity, plant.utilization)
    return model.annual_energy(plant.rated_capacity, plant.capacity_factor)


def project_cash_flows(config: ProjectConfig) -> CashFlowSeries:
    return build_cash_flows(config.plant, config.effective_costs(), config.assumptions,
                            annual_energy=resolve_annual_energy(config))


def evaluate(config: ProjectConfig) -> Assessment:
    energy = resolve_annual_energy(config)
    series = build_cash_flows(config.plant, config.effective_costs(), config.assumptions, annual_energy=energy)
    metrics = compute_metrics(series, config.assumptions)
    report = emissions_report(config.plant, config.emissions, annual_energy=energy,
                              lifetime=config.assumptions.lifetime)
    resource = model.resource_summary(config.site, config.plant)
    return Assessment(config, energy, series, metrics, report, resource)


def couple_to_temperature(config: ProjectConfig) -> ProjectConfig:
    """Derive output from production temperature, keeping today's energy as the base point.

    The circulation mass flow is recalibrated so egs_net_power reproduces the
    current annual energy; afterwards temperature, efficiency and flow move
    the output linearly.
    """
    plant = config.plant
    if plant.temperature_coupled:
        return config
    if not plant.pathway.generates_power:
        raise ConfigurationError('plant.pathway', 'temperature coupling needs a power-generating pathway')
    for name in ('fluid_specific_heat', 'conversion_efficiency', 'injection_temperature'):
        if getattr(plant, name) is None:
            raise ConfigurationError(f'plant.{name}', 'required for temperature-coupled output')
    if plant.capacity_factor == 0:
        raise ConfigurationError('plant.capacity_factor', 'must be > 0 for temperature-coupled output')

    energy = resolve_annual_energy(config)
    drop = model.production_temperature(config.site, plant) - plant.injection_temperature
    if drop <= 0 or plant.conversion_efficiency == 0:
        raise ConfigurationError('plant.production_temperature', 'no heat can be converted at the base point')
    power = energy / (model.HOURS_PER_YEAR * plant.capacity_factor)
    mass_flow = power * 1e6 / (plant.fluid_specific_heat * drop * plant.conversion_efficiency)
    logger.info(f"Coupling {config.name} output to production temperature (mass flow {mass_flow:.2f} kg/s)")
    coupled = dataclasses.replace(plant, circulation_mass_flow=mass_flow, temperature_coupled=True)
    return dataclasses.replace(config, plant=coupled, annual_energy_override=None)


def with_automation(config: ProjectConfig, level) -> ProjectConfig:
    return dataclasses.replace(config, automation=automation_scenario(config.plant.pathway, level))


# --- presets ---------------------------------------------------------------

BACK_DERIVED_ENERGY = {
    Pathway.EGS: 21_764.0,
    Pathway.WELL_REPURPOSING: 10_272.0,
    Pathway.GSHP: 7_932.0,
}

BASELINE_COSTS = {
    # capex, opex, payback (years)
    Pathway.EGS: (25_000_000.0, 1_200_000.0, 12.5),
    Pathway.WELL_REPURPOSING: (8_000_000.0, 350_000.0, 8.0),
    Pathway.GSHP: (5_000_000.0, 180_000.0, 6.5),
}

# 33,000 m of borehole at 120 USD/m is 3.96M of the 5M GSHP capex
GSHP_DRILLING_COST_PER_M = 120.0


def preset_tariff(pathway) -> float:
    """USD/MWh that reproduces the baseline payback: (CAPEX / payback + OPEX) / energy.

    Rounded to 4 decimals so project files carry the exact preset value.
    """
    pathway = _pathway(pathway)
    capex, opex, payback = BASELINE_COSTS[pathway]
    return round((capex / payback + opex) / BACK_DERIVED_ENERGY[pathway], 4)


def _preset_site_and_plant(pathway):
    if pathway is Pathway.EGS:
        site = SiteProfile(surface_temperature=27.0, gradient=30.0, rock_density=2500.0,
                           specific_heat=900.0, reservoir_volume=1e9)
        plant = PlantSpec(Pathway.EGS, rated_capacity=3.1, capacity_factor=0.80,
                          production_temperature=145.0, injection_temperature=70.0,
                          conversion_efficiency=model.DEFAULT_CONVERSION_EFFICIENCY,
                          circulation_mass_flow=82.0, fluid_specific_heat=4200.0, well_depth=4.0)
    elif pathway is Pathway.WELL_REPURPOSING:
        site = SiteProfile(surface_temperature=27.0, gradient=25.0, rock_density=2500.0,
                           specific_heat=900.0, reservoir_volume=2e8)
        plant = PlantSpec(Pathway.WELL_REPURPOSING, rated_capacity=1.56, capacity_factor=0.75,
                          production_temperature=110.0, injection_temperature=70.0,
                          conversion_efficiency=0.10, circulation_mass_flow=93.0,
                          fluid_specific_heat=4200.0, well_depth=3.5)
    else:
        site = SiteProfile(surface_temperature=29.0, gradient=25.0, rock_density=2300.0,
                           specific_heat=900.0, reservoir_volume=1e7)
        plant = PlantSpec(Pathway.GSHP, rated_capacity=1.65, capacity_factor=0.55,
                          utilization=0.55, cop=5.0, baseline_cop=3.0, well_depth=0.2,
                          peak_cooling_load=1650.0, extraction_rate=50.0)
    return site, plant


def preset(pathway, level) -> ProjectConfig:
    """A pathway preset at one automation level as a full project config."""
    pathway = _pathway(pathway)
    level = _level(level)
    site, plant = _preset_site_and_plant(pathway)
    capex, opex, _ = BASELINE_COSTS[pathway]
    costs = CostModel.single(capex, opex)
    if pathway is Pathway.GSHP:
        drilling = GSHP_DRILLING_COST_PER_M * model.borehole_length(plant.peak_cooling_load, plant.extraction_rate)
        costs = CostModel.single(capex - drilling, opex, drilling_cost_per_m=GSHP_DRILLING_COST_PER_M)
    return ProjectConfig(
        name=f"{preset_id(pathway)}-{level.value}",
        site=site,
        plant=plant,
        costs=costs,
        automation=automation_scenario(pathway, level),
        assumptions=FinancialAssumptions(discount_rate=0.06, inflation_rate=0.02, lifetime=25,
                                         energy_tariff=preset_tariff(pathway)),
        annual_energy_override=BACK_DERIVED_ENERGY[pathway],
    )


def preset_id(pathway):
    pathway = _pathway(pathway)
    return next(key for key, value in PATHWAY_IDS.items() if value is pathway)


def list_presets():
    return [(key, level.value) for key in PATHWAY_IDS for level in AutomationLevel]


def _pathway(pathway):
    if isinstance(pathway, Pathway):
        return pathway
    key = str(pathway).strip()
    if key.lower() in PATHWAY_IDS:
        return PATHWAY_IDS[key.lower()]
    try:
        return Pathway(key)
    except ValueError:
        raise ConfigurationError('pathway', f"unknown pathway {pathway!r}; expected one of {sorted(PATHWAY_IDS)}")


def _level(level):
    if isinstance(level, AutomationLevel):
        return level
    try:
        return AutomationLevel(str(level).strip().lower())
    except ValueError:
        raise ConfigurationError('level', f"unknown automation level {level!r}; expected baseline, moderate or full")


# --- comparison ------------------------------------------------------------

@dataclass
class ComparisonRow:
    name: str
    pathway: str
    scenario: str
    capex: float
    opex: float
    levelized_cost: Optional[float] = None
    levelized_label: str = "LCOE"
    payback: Optional[float] = None
    npv: Optional[float] = None
    avoided_co2: Optional[float] = None
    undefined: dict = field(default_factory=dict)


@dataclass
class ComparisonTable:
    rows: List[ComparisonRow] = field(default_factory=list)


def compare_pathways(configs: List[ProjectConfig]) -> ComparisonTable:
    """One row per config in input order; failures become undefined cells."""
    table = ComparisonTable()
    for config in configs:
        costs = config.effective_costs()
        row = ComparisonRow(
            name=config.name,
            pathway=PATHWAY_LABELS[config.plant.pathway],
            scenario=config.automation.level.label,
            capex=costs.capex,
            opex=costs.opex,
            levelized_label="LCOC" if config.plant.pathway is Pathway.GSHP else "LCOE",
        )
        try:
            assessment = evaluate(config)
        except GeothermalError as e:
            logger.error(f"Could not evaluate {config.name}: {e}")
            row.undefined = {cell: str(e) for cell in ('levelized_cost', 'payback', 'npv', 'avoided_co2')}
            table.rows.append(row)
            continue

        metrics = assessment.metrics
        row.levelized_cost = metrics.lcoe
        row.payback = metrics.payback_simple
        row.npv = metrics.npv
        row.avoided_co2 = assessment.emissions.avoided_annual
        for metric, cell in (('lcoe', 'levelized_cost'), ('payback_simple', 'payback'), ('npv', 'npv')):
            if metric in metrics.undefined:
                row.undefined[cell] = metrics.undefined[metric]
        table.rows.append(row)
    return table
