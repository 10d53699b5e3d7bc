"""Project, calibration and tornado-range files (JSON).

Project file layout:

    {
      "name": "egs-baseline",
      "site": {"surface_temperature": 27.0, "gradient": 30.0, ...},
      "plant": {"pathway": "EGS", "rated_capacity": 3.1, "capacity_factor": 0.8, ...},
      "costs": {"capex": 25000000, "opex": 1200000}            (or "capex_schedule": [[0, ...], [1, ...]])
                                                                ("drilling_cost_per_m" prices GSHP boreholes, USD/m)
      "automation": {"level": "full"},                          (reductions default to the pathway preset)
      "assumptions": {"discount_rate": 0.06, "lifetime": 25, "energy_tariff": 147.0318},
      "annual_energy_override": 21764,                          optional
      "emissions": {"grid_factor": 0.503, "stages": {...}},     optional
      "uncertainty": {"samples": 10000, "seed": 1, "parameters": {"costs.capex": {...}}}   optional
    }

Units: USD, MW, MWh, °C, km, kg/s, fractions as decimals.
"""
import dataclasses
import json
import logging
import re
from pathlib import Path

from distributions import Distribution, UncertaintySpec
from emissions import EmissionsContext, StageEmissions
from errors import ConfigurationError, require_finite
from finance import CostModel, FinancialAssumptions
from model import PlantSpec, SiteProfile
from scenarios import AutomationLevel, AutomationScenario, ProjectConfig, automation_scenario

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {'name', 'site', 'plant', 'costs', 'automation', 'assumptions', 'annual_energy_override',
                  'emissions', 'uncertainty'}
REQUIRED_KEYS = ('name', 'plant', 'costs')
COST_KEYS = {'capex', 'capex_schedule', 'opex', 'fuel_cost', 'opex_escalation', 'drilling_cost_per_m'}
DISTRIBUTION_KEYS = {f.name for f in dataclasses.fields(Distribution)}


def _locate(text, key):
    """Line and column of the first `"key"` occurrence, for error messages."""
    if text is None:
        return None, None
    match = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not match:
        return None, None
    line = text.count('\n', 0, match.start()) + 1
    column = match.start() - (text.rfind('\n', 0, match.start()) + 1) + 1
    return line, column


def _parse(text, source):
    if not text or not text.strip():
        raise ConfigurationError(None, f'{source}: empty document', line=1, column=1)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigurationError(None, f'{source}: parse error: {e.msg}', line=e.lineno, column=e.colno)
    if not isinstance(data, dict):
        raise ConfigurationError(None, f'{source}: top level must be an object', line=1, column=1)
    return data


def _read(path):
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(None, f'file not found: {path}')
    with open(path, 'r', encoding='utf-8') as f:
        return f.read()


def _check_keys(data, allowed, section, text):
    if not isinstance(data, dict):
        raise ConfigurationError(section, 'must be an object')
    for key in data:
        if key not in allowed:
            line, column = _locate(text, key)
            field = f'{section}.{key}' if section else key
            raise ConfigurationError(field, 'unknown key', line, column)


def _build(cls, data, section, text):
    allowed = {f.name for f in dataclasses.fields(cls)}
    _check_keys(data, allowed, section, text)
    try:
        return cls(**data)
    except ConfigurationError as e:
        line, column = _locate(text, e.field.split('.')[-1]) if e.field else (None, None)
        raise ConfigurationError(f'{section}.{e.field}' if e.field else section, e.rule, line, column)
    except TypeError as e:
        raise ConfigurationError(section, f'invalid or missing value ({e})')


def _costs(data, text):
    _check_keys(data, COST_KEYS, 'costs', text)
    data = dict(data)
    if 'capex' in data and 'capex_schedule' in data:
        raise ConfigurationError('costs.capex', 'give either capex or capex_schedule, not both', *_locate(text, 'capex'))
    if 'capex' in data:
        data['capex_schedule'] = ((0, data.pop('capex')),)
    elif 'capex_schedule' in data:
        schedule = data['capex_schedule']
        if not isinstance(schedule, list) or not all(isinstance(item, list) and len(item) == 2 for item in schedule):
            raise ConfigurationError('costs.capex_schedule', 'must be a list of [year, amount] pairs',
                                     *_locate(text, 'capex_schedule'))
        data['capex_schedule'] = tuple(tuple(item) for item in schedule)
    return _build(CostModel, data, 'costs', text)


def _automation(data, plant, text):
    if data is None:
        return AutomationScenario()
    _check_keys(data, {'level', 'capex_reduction', 'opex_reduction'}, 'automation', text)
    level = data.get('level', AutomationLevel.BASELINE.value)
    if 'capex_reduction' not in data and 'opex_reduction' not in data:
        try:
            return automation_scenario(plant.pathway, level)
        except ConfigurationError as e:
            raise e.with_prefix('automation')
    return _build(AutomationScenario, data, 'automation', text)


def _emissions(data, text):
    if data is None:
        return EmissionsContext()
    _check_keys(data, {'grid_factor', 'stages'}, 'emissions', text)
    data = dict(data)
    if 'stages' in data:
        data['stages'] = _build(StageEmissions, data['stages'], 'emissions.stages', text)
    return _build(EmissionsContext, data, 'emissions', text)


def parse_distribution(data, path, text=None) -> Distribution:
    section = f'parameters.{path}'
    _check_keys(data, DISTRIBUTION_KEYS, section, text)
    if 'kind' not in data:
        raise ConfigurationError(f'{section}.kind', 'required')
    return _build(Distribution, data, section, text)


def _uncertainty(data, text, section='uncertainty'):
    _check_keys(data, {'samples', 'seed', 'parameters'}, section, text)
    parameters = data.get('parameters', {})
    if not isinstance(parameters, dict):
        raise ConfigurationError(f'{section}.parameters', 'must be an object keyed by parameter path')
    try:
        distributions = {path: parse_distribution(dist, path, text) for path, dist in parameters.items()}
    except ConfigurationError as e:
        raise e.with_prefix(section)
    options = {key: data[key] for key in ('samples', 'seed') if key in data}
    try:
        return UncertaintySpec(distributions, **options)
    except ConfigurationError as e:
        raise e.with_prefix(section)


def project_from_dict(data, text=None) -> ProjectConfig:
    _check_keys(data, TOP_LEVEL_KEYS, '', text)
    for key in REQUIRED_KEYS:
        if key not in data:
            raise ConfigurationError(key, 'required key missing')

    site = _build(SiteProfile, data.get('site', {}), 'site', text)
    assumptions = _build(FinancialAssumptions, data.get('assumptions', {}), 'assumptions', text)
    plant_data = dict(data['plant'])
    # The plant inherits the financial lifetime unless it states its own
    plant_data.setdefault('lifetime', assumptions.lifetime)
    plant = _build(PlantSpec, plant_data, 'plant', text)
    costs = _costs(data['costs'], text)
    automation = _automation(data.get('automation'), plant, text)
    emissions = _emissions(data.get('emissions'), text)
    uncertainty = _uncertainty(data['uncertainty'], text) if data.get('uncertainty') is not None else None

    try:
        config = ProjectConfig(
            name=str(data['name']),
            site=site,
            plant=plant,
            costs=costs,
            automation=automation,
            assumptions=assumptions,
            annual_energy_override=data.get('annual_energy_override'),
            emissions=emissions,
            uncertainty=uncertainty,
        )
    except TypeError as e:
        raise ConfigurationError('annual_energy_override', f'invalid value ({e})')
    if uncertainty is not None:
        uncertainty.validate_paths(config)
    return config


def load_project(path) -> ProjectConfig:
    """Parse and validate a project file; band violations are logged as warnings."""
    text = _read(path)
    config = project_from_dict(_parse(text, path), text)
    for message in config.band_warnings():
        logger.warning(f"{config.name}: {message}")
    logger.info(f"Loaded project {config.name} ({config.plant.pathway.value}) from {path}")
    return config


def _drop_none(values):
    return {key: value for key, value in values.items() if value is not None}


def serialize_distribution(dist: Distribution) -> dict:
    data = _drop_none(dataclasses.asdict(dist))
    data['kind'] = dist.kind.value
    if not dist.relative:
        data.pop('relative')
    return data


def serialize_project(config: ProjectConfig) -> dict:
    plant = _drop_none(dataclasses.asdict(config.plant))
    plant['pathway'] = config.plant.pathway.value
    costs = config.costs
    data = {
        'name': config.name,
        'site': dataclasses.asdict(config.site),
        'plant': plant,
        'costs': {
            'capex_schedule': [[year, amount] for year, amount in costs.capex_schedule],
            'opex': costs.opex,
            'fuel_cost': costs.fuel_cost,
            'opex_escalation': costs.opex_escalation.value,
        },
        'automation': {
            'level': config.automation.level.value,
            'capex_reduction': config.automation.capex_reduction,
            'opex_reduction': config.automation.opex_reduction,
        },
        'assumptions': dataclasses.asdict(config.assumptions),
        'emissions': {
            'grid_factor': config.emissions.grid_factor,
            'stages': dataclasses.asdict(config.emissions.stages),
        },
    }
    if costs.drilling_cost_per_m:
        data['costs']['drilling_cost_per_m'] = costs.drilling_cost_per_m
    if config.annual_energy_override is not None:
        data['annual_energy_override'] = config.annual_energy_override
    if config.uncertainty is not None:
        data['uncertainty'] = {
            'samples': config.uncertainty.samples,
            'seed': config.uncertainty.seed,
            'parameters': {path: serialize_distribution(config.uncertainty.parameters[path])
                           for path in config.uncertainty.paths},
        }
    return data


def dump_project(config: ProjectConfig, path=None):
    """JSON text of the project; also written to `path` when given."""
    text = json.dumps(serialize_project(config), indent=2, ensure_ascii=False) + "\n"
    if path is not None:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info(f"Wrote project {config.name} to {path}")
    return text


def load_calibration(path) -> UncertaintySpec:
    """Distribution file: {"samples": N, "seed": S, "parameters": {path: distribution}}."""
    text = _read(path)
    return _uncertainty(_parse(text, path), text, section='calibration')


def load_ranges(path) -> dict:
    """Tornado ranges file: {"ranges": {path: [low, high]}}."""
    text = _read(path)
    data = _parse(text, path)
    _check_keys(data, {'ranges'}, '', text)
    ranges = {}
    for key, bounds in data.get('ranges', {}).items():
        if not isinstance(bounds, list) or len(bounds) != 2:
            raise ConfigurationError(f'ranges.{key}', 'must be [low, high]', *_locate(text, key))
        low, high = bounds
        try:
            require_finite(f'ranges.{key}', low)
            require_finite(f'ranges.{key}', high)
        except ConfigurationError as e:
            raise ConfigurationError(e.field, e.rule, *_locate(text, key))
        if low > high:
            raise ConfigurationError(f'ranges.{key}', f'low {low} exceeds high {high}', *_locate(text, key))
        ranges[key] = (float(low), float(high))
    return ranges
