"""Resource physics and performance conversions for geothermal plants."""
import dataclasses
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from errors import ConfigurationError, DomainError, require_finite, require_whole

logger = logging.getLogger(__name__)

HOURS_PER_YEAR = 8760

# Binary ORC at 120–170 °C; user-overridable per plant
DEFAULT_CONVERSION_EFFICIENCY = 0.12
DEFAULT_GSHP_COP = 4.75
DEFAULT_BASELINE_COP = 3.0
DEFAULT_UTILIZATION = 0.55
DEFAULT_EXTRACTION_RATE = 50.0  # W/m

GRADIENT_BAND = (20.0, 35.0)
DENSITY_BAND = (2300.0, 2700.0)
SPECIFIC_HEAT_BAND = (700.0, 1100.0)
GSHP_COP_BAND = (4.0, 5.5)
CAPACITY_FACTOR_BAND = (0.70, 0.90)
EXTRACTION_RATE_BAND = (40.0, 60.0)  # W/m

NUMERIC_PLANT_FIELDS = ('rated_capacity', 'capacity_factor', 'production_temperature', 'injection_temperature',
                        'conversion_efficiency', 'circulation_mass_flow', 'fluid_specific_heat', 'well_depth',
                        'cop', 'baseline_cop', 'utilization', 'electricity_savings_fraction',
                        'peak_cooling_load', 'extraction_rate')


class Pathway(str, Enum):
    EGS = "EGS"
    WELL_REPURPOSING = "WellRepurposing"
    GSHP = "GSHP"

    @property
    def generates_power(self):
        return self is not Pathway.GSHP


@dataclass(frozen=True)
class SiteProfile:
    surface_temperature: float = 27.0  # °C
    gradient: float = 30.0  # °C/km
    rock_density: float = 2500.0  # kg/m³
    specific_heat: float = 900.0  # J/(kg·°C)
    reservoir_volume: float = 1e9  # m³
    reference_temperature: Optional[float] = None  # °C, surface when unset
    recovery_factor: float = 1.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            require_finite(f.name, getattr(self, f.name))
        if self.reference_temperature is None:
            object.__setattr__(self, 'reference_temperature', self.surface_temperature)
        if self.gradient <= 0:
            raise ConfigurationError('gradient', 'must be > 0')
        if self.rock_density <= 0:
            raise ConfigurationError('rock_density', 'must be > 0')
        if self.specific_heat <= 0:
            raise ConfigurationError('specific_heat', 'must be > 0')
        if self.reservoir_volume <= 0:
            raise ConfigurationError('reservoir_volume', 'must be > 0')
        if not 0 < self.recovery_factor <= 1:
            raise ConfigurationError('recovery_factor', 'must be in (0, 1]')

    def band_warnings(self):
        """Messages for parameters outside the sedimentary-basin bands."""
        messages = []
        if not GRADIENT_BAND[0] <= self.gradient <= GRADIENT_BAND[1]:
            messages.append(f"gradient {self.gradient} °C/km outside typical {GRADIENT_BAND} band")
        if not DENSITY_BAND[0] <= self.rock_density <= DENSITY_BAND[1]:
            messages.append(f"rock_density {self.rock_density} kg/m³ outside typical {DENSITY_BAND} band")
        if not SPECIFIC_HEAT_BAND[0] <= self.specific_heat <= SPECIFIC_HEAT_BAND[1]:
            messages.append(f"specific_heat {self.specific_heat} J/(kg·°C) outside typical {SPECIFIC_HEAT_BAND} band")
        return messages


@dataclass(frozen=True)
class PlantSpec:
    pathway: Pathway
    rated_capacity: float  # MW, electric or thermal-cooling for GSHP
    capacity_factor: float
    lifetime: int = 25
    generation_start_year: int = 1
    production_temperature: Optional[float] = None
    injection_temperature: Optional[float] = None
    conversion_efficiency: Optional[float] = None
    circulation_mass_flow: Optional[float] = None  # kg/s
    fluid_specific_heat: Optional[float] = None  # J/(kg·°C)
    well_depth: Optional[float] = None  # km
    temperature_coupled: bool = False
    cop: Optional[float] = None
    baseline_cop: float = DEFAULT_BASELINE_COP
    utilization: float = DEFAULT_UTILIZATION
    electricity_savings_fraction: Optional[float] = None
    peak_cooling_load: Optional[float] = None  # kW
    extraction_rate: float = DEFAULT_EXTRACTION_RATE  # W/m

    def __post_init__(self):
        if not isinstance(self.pathway, Pathway):
            try:
                object.__setattr__(self, 'pathway', Pathway(self.pathway))
            except ValueError:
                raise ConfigurationError('pathway', f"unknown pathway {self.pathway!r}")
        if self.pathway is Pathway.GSHP and self.cop is None:
            object.__setattr__(self, 'cop', DEFAULT_GSHP_COP)
        for name in NUMERIC_PLANT_FIELDS:
            require_finite(name, getattr(self, name))
        for name in ('lifetime', 'generation_start_year'):
            object.__setattr__(self, name, require_whole(name, getattr(self, name)))

        if self.rated_capacity <= 0:
            raise ConfigurationError('rated_capacity', 'must be > 0')
        if not 0 <= self.capacity_factor <= 1:
            raise ConfigurationError('capacity_factor', 'must satisfy 0 <= capacity_factor <= 1')
        if self.lifetime < 1:
            raise ConfigurationError('lifetime', 'must be >= 1')
        if not 1 <= self.generation_start_year <= self.lifetime:
            raise ConfigurationError('generation_start_year', 'must satisfy 1 <= generation_start_year <= lifetime')
        if (self.production_temperature is not None and self.injection_temperature is not None
                and self.production_temperature <= self.injection_temperature):
            raise ConfigurationError('production_temperature', 'must exceed injection_temperature')
        if self.conversion_efficiency is not None and not 0 <= self.conversion_efficiency <= 1:
            raise ConfigurationError('conversion_efficiency', 'must be in [0, 1]')
        if self.circulation_mass_flow is not None and self.circulation_mass_flow < 0:
            raise ConfigurationError('circulation_mass_flow', 'must be >= 0')
        if self.fluid_specific_heat is not None and self.fluid_specific_heat <= 0:
            raise ConfigurationError('fluid_specific_heat', 'must be > 0')
        if self.well_depth is not None and self.well_depth < 0:
            raise ConfigurationError('well_depth', 'must be >= 0')
        if self.pathway is Pathway.GSHP:
            if self.cop <= 1:
                raise ConfigurationError('cop', 'must be > 1 for GSHP')
            if self.baseline_cop <= 1:
                raise ConfigurationError('baseline_cop', 'must be > 1 for GSHP')
            if not 0 <= self.utilization <= 1:
                raise ConfigurationError('utilization', 'must be in [0, 1]')
            if self.temperature_coupled:
                raise ConfigurationError('temperature_coupled', 'not available for GSHP')
        if self.electricity_savings_fraction is not None and not 0 <= self.electricity_savings_fraction < 1:
            raise ConfigurationError('electricity_savings_fraction', 'must be in [0, 1)')
        if self.extraction_rate <= 0:
            raise ConfigurationError('extraction_rate', 'must be > 0')
        if self.peak_cooling_load is not None and self.peak_cooling_load < 0:
            raise ConfigurationError('peak_cooling_load', 'must be >= 0')

    def band_warnings(self):
        messages = []
        if self.pathway is Pathway.GSHP:
            if self.cop <= self.baseline_cop:
                messages.append(
                    f"cop {self.cop} does not exceed baseline_cop {self.baseline_cop}; savings are not positive")
            if not GSHP_COP_BAND[0] <= self.cop <= GSHP_COP_BAND[1]:
                messages.append(f"cop {self.cop} outside typical {GSHP_COP_BAND} band")
            if not EXTRACTION_RATE_BAND[0] <= self.extraction_rate <= EXTRACTION_RATE_BAND[1]:
                messages.append(f"extraction_rate {self.extraction_rate} W/m outside typical {EXTRACTION_RATE_BAND} band")
        elif not CAPACITY_FACTOR_BAND[0] <= self.capacity_factor <= CAPACITY_FACTOR_BAND[1]:
            messages.append(f"capacity_factor {self.capacity_factor} outside typical {CAPACITY_FACTOR_BAND} band")
        return messages


def temperature_at_depth(site: SiteProfile, depth: float) -> float:
    """Linear gradient model: T(z) = T_surface + G·z, depth in km."""
    if depth < 0:
        raise DomainError(f"depth must be >= 0, got {depth}")
    return site.surface_temperature + site.gradient * depth


def heat_in_place(site: SiteProfile, depth: float) -> float:
    """Stored heat above the reference temperature, in J."""
    delta = temperature_at_depth(site, depth) - site.reference_temperature
    if delta < 0:
        raise DomainError(
            f"temperature at {depth} km is below reference temperature {site.reference_temperature} °C")
    return site.rock_density * site.specific_heat * site.reservoir_volume * delta * site.recovery_factor


def capacity_factor(annual_energy: float, rated_capacity: float) -> float:
    if rated_capacity <= 0:
        raise DomainError(f"rated_capacity must be > 0, got {rated_capacity}")
    if annual_energy < 0:
        raise DomainError(f"annual_energy must be >= 0, got {annual_energy}")
    cf = annual_energy / (rated_capacity * HOURS_PER_YEAR)
    if cf > 1:
        logger.warning(f"Capacity factor {cf:.4f} exceeds 1 for {annual_energy} MWh at {rated_capacity} MW")
    return cf


def annual_energy(rated_capacity: float, capacity_factor: float) -> float:
    """Annual output in MWh for a capacity in MW."""
    if rated_capacity < 0:
        raise DomainError(f"rated_capacity must be >= 0, got {rated_capacity}")
    if not 0 <= capacity_factor <= 1:
        raise DomainError(f"capacity_factor must be in [0, 1], got {capacity_factor}")
    return rated_capacity * HOURS_PER_YEAR * capacity_factor


def production_temperature(site: SiteProfile, plant: PlantSpec) -> float:
    if plant.production_temperature is not None:
        return plant.production_temperature
    if plant.well_depth is not None:
        return temperature_at_depth(site, plant.well_depth)
    raise ConfigurationError('plant.production_temperature', 'required (or plant.well_depth) for temperature-coupled output')


def egs_net_power(site: SiteProfile, plant: PlantSpec) -> float:
    """Net electric output in MW from circulation heat and conversion efficiency."""
    required = {
        'circulation_mass_flow': plant.circulation_mass_flow,
        'fluid_specific_heat': plant.fluid_specific_heat,
        'conversion_efficiency': plant.conversion_efficiency,
        'injection_temperature': plant.injection_temperature,
    }
    for field, value in required.items():
        if value is None:
            raise ConfigurationError(f'plant.{field}', 'required for temperature-coupled output')

    t_prod = production_temperature(site, plant)
    drop = t_prod - plant.injection_temperature
    if drop < 0:
        raise DomainError(
            f"production temperature {t_prod} °C is below injection temperature {plant.injection_temperature} °C")
    watts = plant.circulation_mass_flow * plant.fluid_specific_heat * drop * plant.conversion_efficiency
    return watts / 1e6


def gshp_electricity(cooling_delivered: float, cop: float) -> float:
    """Electricity (MWh) needed to deliver the given cooling (MWh thermal)."""
    if cop <= 0:
        raise DomainError(f"cop must be > 0, got {cop}")
    return cooling_delivered / cop


def gshp_savings_fraction(cop_gshp: float, cop_baseline: float) -> float:
    if cop_gshp <= 0 or cop_baseline <= 0:
        raise DomainError(f"COPs must be > 0, got {cop_gshp} and {cop_baseline}")
    return 1 - cop_baseline / cop_gshp


def gshp_effective_cop(plant: PlantSpec) -> float:
    """COP used for displacement; a stated savings fraction overrides the plant COP."""
    if plant.electricity_savings_fraction is not None:
        return plant.baseline_cop / (1 - plant.electricity_savings_fraction)
    return plant.cop


def borehole_length(peak_cooling_load: float, extraction_rate: float) -> float:
    """Borehole metres for a peak load in kW at a specific extraction rate in W/m."""
    if extraction_rate <= 0:
        raise DomainError(f"extraction_rate must be > 0, got {extraction_rate}")
    return peak_cooling_load * 1000 / extraction_rate


def resource_summary(site: SiteProfile, plant: PlantSpec) -> dict:
    """Resource figures reported alongside the financial metrics."""
    summary = {}
    if plant.well_depth is not None:
        summary['well_depth_km'] = plant.well_depth
        summary['temperature_at_depth_c'] = temperature_at_depth(site, plant.well_depth)
        try:
            summary['heat_in_place_j'] = heat_in_place(site, plant.well_depth)
        except DomainError as e:
            logger.warning(f"Heat in place undefined: {e}")
    if plant.pathway.generates_power and plant.temperature_coupled:
        summary['net_power_mw'] = egs_net_power(site, plant)
    if plant.pathway is Pathway.GSHP:
        summary['savings_fraction'] = gshp_savings_fraction(gshp_effective_cop(plant), plant.baseline_cop)
        if plant.peak_cooling_load is not None:
            summary['borehole_length_m'] = borehole_length(plant.peak_cooling_load, plant.extraction_rate)
    return summary
