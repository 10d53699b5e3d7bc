"""Seeded Monte Carlo over project parameters and one-at-a-time tornado sensitivity.

Every sample i draws its uniforms from its own Philox stream keyed by
(seed, i), one variate per parameter in sorted path order. Samples can then be
evaluated in any order or on any number of workers and still land in the same
slot of the result arrays, so summaries are bit-identical across worker counts.
"""
import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from joblib import Parallel, delayed

import settings
from distributions import Distribution, UncertaintySpec, apply_parameters, get_parameter, sample_distribution, \
    set_parameter
from errors import ConfigurationError, DomainError, GeothermalError, MonteCarloAbort, UndefinedMetricError
from finance import lcoe, npv
from scenarios import AutomationLevel, ProjectConfig, couple_to_temperature, project_cash_flows, with_automation

logger = logging.getLogger(__name__)

METRICS = ('lcoe', 'npv')

# Paths that only move the output once it is derived from temperature
RESOURCE_PATHS = frozenset({
    'plant.production_temperature',
    'plant.injection_temperature',
    'plant.conversion_efficiency',
    'plant.circulation_mass_flow',
    'plant.fluid_specific_heat',
    'plant.well_depth',
    'site.gradient',
    'site.surface_temperature',
})


@dataclass
class MetricSummary:
    mean: float
    sd: float
    p5: float
    p50: float
    p95: float
    histogram_counts: np.ndarray
    histogram_edges: np.ndarray
    n: int

    @classmethod
    def from_samples(cls, values, bins=settings.HISTOGRAM_BINS):
        values = np.asarray(values, dtype=float)
        p1, p5, p50, p95, p99 = np.percentile(values, [1, 5, 50, 95, 99])
        counts, edges = np.histogram(values, bins=bins, range=(p1, p99))
        return cls(
            mean=float(np.mean(values)),
            sd=float(np.std(values)),
            p5=float(p5),
            p50=float(p50),
            p95=float(p95),
            histogram_counts=counts,
            histogram_edges=edges,
            n=len(values),
        )


@dataclass
class MonteCarloSummary:
    samples: int
    seed: int
    metrics: Dict[str, MetricSummary] = field(default_factory=dict)
    prob_npv_positive: Optional[float] = None
    n_failed: int = 0
    first_failure: Optional[str] = None
    lcoe_samples: Optional[np.ndarray] = None
    npv_samples: Optional[np.ndarray] = None


@dataclass
class PairedMonteCarloResult:
    level: AutomationLevel
    baseline: MonteCarloSummary
    variant: MonteCarloSummary
    dominance_fraction: Optional[float]

    @property
    def baseline_npv(self):
        return self.baseline.npv_samples

    @property
    def variant_npv(self):
        return self.variant.npv_samples


@dataclass
class TornadoEntry:
    parameter: str
    low: float
    high: float
    output_low: Optional[float]
    output_high: Optional[float]
    base: float
    swing: Optional[float]
    flagged: bool = False
    reason: Optional[str] = None


def prob_positive(samples) -> float:
    """Share of defined samples strictly above zero."""
    values = np.asarray([np.nan if v is None else v for v in samples], dtype=float)
    if values.size == 0:
        raise DomainError("prob_positive needs at least one sample")
    defined = values[~np.isnan(values)]
    if defined.size == 0:
        raise DomainError("prob_positive: every sample is undefined")
    return float(np.count_nonzero(defined > 0)) / defined.size


def _drills_boreholes(config: ProjectConfig) -> bool:
    return config.costs.drilling_cost_per_m > 0 and config.plant.peak_cooling_load is not None


def default_distributions(config: ProjectConfig, samples=settings.DEFAULT_SAMPLES,
                          seed=settings.DEFAULT_SEED) -> UncertaintySpec:
    """Generic calibration: ±20% triangular costs, 4–8% discount rate, truncated-normal temperature.

    Projects that pay for GSHP boreholes also vary the drilling cost per metre
    and the extraction rate.
    """
    parameters = {
        'costs.capex': Distribution.triangular(0.8, 1.0, 1.2, relative=True),
        'costs.opex': Distribution.triangular(0.8, 1.0, 1.2, relative=True),
        'assumptions.discount_rate': Distribution.uniform(0.04, 0.08),
    }
    t_prod = config.plant.production_temperature
    if config.plant.pathway.generates_power and t_prod is not None:
        t_inj = config.plant.injection_temperature
        lo = t_prod - 20.0 if t_inj is None else max(t_prod - 20.0, t_inj + 1.0)
        parameters['plant.production_temperature'] = Distribution.normal(t_prod, 10.0, lo=lo, hi=t_prod + 20.0)
    if _drills_boreholes(config):
        rate = config.plant.extraction_rate
        parameters['costs.drilling_cost_per_m'] = Distribution.triangular(0.8, 1.0, 1.2, relative=True)
        parameters['plant.extraction_rate'] = Distribution.uniform(rate * 0.8, rate * 1.2)
    return UncertaintySpec(parameters, samples=samples, seed=seed)


def default_tornado_ranges(config: ProjectConfig) -> Dict[str, tuple]:
    r = config.assumptions.discount_rate
    ranges = {'assumptions.discount_rate': (r - 0.02, r + 0.02)}
    t_prod = config.plant.production_temperature
    if config.plant.pathway.generates_power and t_prod is not None:
        ranges['plant.production_temperature'] = (t_prod - 20.0, t_prod + 20.0)
    capex = config.costs.capex
    opex = config.costs.opex
    ranges['costs.capex'] = (capex * 0.85, capex * 1.15)
    ranges['costs.opex'] = (opex * 0.85, opex * 1.15)
    if _drills_boreholes(config):
        drilling = config.costs.drilling_cost_per_m
        rate = config.plant.extraction_rate
        ranges['costs.drilling_cost_per_m'] = (drilling * 0.85, drilling * 1.15)
        # 40–60 W/m around the 50 W/m default
        ranges['plant.extraction_rate'] = (rate * 0.8, rate * 1.2)
    tariff = config.assumptions.energy_tariff
    if tariff is not None:
        ranges['assumptions.energy_tariff'] = (tariff * 0.85, tariff * 1.15)
    return ranges


def _prepare(config: ProjectConfig, paths) -> ProjectConfig:
    if config.plant.pathway.generates_power and RESOURCE_PATHS.intersection(paths):
        return couple_to_temperature(config)
    return config


def _sample_uniforms(seed, index, count):
    stream = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))
    return stream.random(count)


def _draw(spec: UncertaintySpec, bases, index):
    paths = spec.paths
    u = _sample_uniforms(spec.seed, index, len(paths))
    values = {}
    for k, path in enumerate(paths):
        dist = spec.parameters[path]
        values[path] = dist.apply(sample_distribution(dist, u[k]), bases[path])
    return values


def _metrics_for(config: ProjectConfig):
    series = project_cash_flows(config)
    r = config.assumptions.discount_rate
    value_lcoe = lcoe(series, r)
    value_npv = npv(series, r) if series.has_revenue else np.nan
    return value_lcoe, value_npv


def _run_chunk(configs, spec, bases, indices):
    """Evaluate samples for each config on shared draws; returns (index, [(lcoe, npv)|error]) rows."""
    rows = []
    for i in indices:
        values = _draw(spec, bases, i)
        outcomes = []
        for config in configs:
            try:
                outcomes.append(_metrics_for(apply_parameters(config, values)))
            except GeothermalError as e:
                drawn = ", ".join(f"{path}={value:.6g}" for path, value in values.items())
                outcomes.append(f"sample {i} ({drawn}): {e}")
        rows.append((i, outcomes))
    return rows


def _simulate(configs: List[ProjectConfig], spec: UncertaintySpec, workers=None):
    workers = max(1, int(workers or settings.DEFAULT_WORKERS))
    paths = spec.paths
    for config in configs:
        spec.validate_paths(config)
    bases = {path: get_parameter(configs[0], path) for path in paths}

    n = spec.samples
    chunks = [chunk for chunk in np.array_split(np.arange(n), workers) if len(chunk)]
    if workers == 1:
        results = [_run_chunk(configs, spec, bases, chunks[0])]
    else:
        results = Parallel(n_jobs=workers, backend='threading')(
            delayed(_run_chunk)(configs, spec, bases, chunk) for chunk in chunks)

    lcoe_samples = [np.full(n, np.nan) for _ in configs]
    npv_samples = [np.full(n, np.nan) for _ in configs]
    failures = [{} for _ in configs]
    for rows in results:
        for i, outcomes in rows:
            for c, outcome in enumerate(outcomes):
                if isinstance(outcome, str):
                    failures[c][i] = outcome
                else:
                    lcoe_samples[c][i], npv_samples[c][i] = outcome
    return lcoe_samples, npv_samples, failures


def _summarize(config, spec, lcoe_values, npv_values, failures, workers):
    n = spec.samples
    first_failure = failures[min(failures)] if failures else None
    if len(failures) > settings.MAX_FAILED_FRACTION * n:
        raise MonteCarloAbort(f"{len(failures)} of {n} samples failed for {config.name}; first: {first_failure}")

    has_tariff = config.assumptions.energy_tariff is not None
    ok = np.ones(n, dtype=bool)
    if failures:
        ok[list(failures)] = False
    summary = MonteCarloSummary(samples=n, seed=spec.seed, n_failed=len(failures), first_failure=first_failure,
                                lcoe_samples=lcoe_values, npv_samples=npv_values if has_tariff else None)
    summary.metrics['lcoe'] = MetricSummary.from_samples(lcoe_values[ok])
    if has_tariff:
        summary.metrics['npv'] = MetricSummary.from_samples(npv_values[ok])
        summary.prob_npv_positive = prob_positive(npv_values[ok])

    logger.info(f"Monte Carlo {config.name}: {n} samples, seed {spec.seed}, {workers or settings.DEFAULT_WORKERS} "
                f"worker(s), {len(failures)} failed")
    if failures:
        logger.warning(f"First failed sample: {first_failure}")
    return summary


def run_monte_carlo(config: ProjectConfig, spec: Optional[UncertaintySpec] = None,
                    workers=None) -> MonteCarloSummary:
    spec = spec or config.uncertainty or default_distributions(config)
    prepared = _prepare(config, spec.paths)
    lcoe_samples, npv_samples, failures = _simulate([prepared], spec, workers)
    return _summarize(config, spec, lcoe_samples[0], npv_samples[0], failures[0], workers)


def run_paired_monte_carlo(config: ProjectConfig, spec: Optional[UncertaintySpec] = None,
                           level=AutomationLevel.FULL, workers=None) -> PairedMonteCarloResult:
    """Baseline and an automation level evaluated on common random numbers."""
    spec = spec or config.uncertainty or default_distributions(config)
    baseline = _prepare(with_automation(config, AutomationLevel.BASELINE), spec.paths)
    variant = dataclasses.replace(baseline, automation=with_automation(config, level).automation)

    lcoe_samples, npv_samples, failures = _simulate([baseline, variant], spec, workers)
    base_summary = _summarize(baseline, spec, lcoe_samples[0], npv_samples[0], failures[0], workers)
    variant_summary = _summarize(variant, spec, lcoe_samples[1], npv_samples[1], failures[1], workers)

    dominance = None
    if base_summary.npv_samples is not None:
        both = ~np.isnan(npv_samples[0]) & ~np.isnan(npv_samples[1])
        if np.any(both):
            dominance = float(np.mean(npv_samples[1][both] >= npv_samples[0][both]))
    return PairedMonteCarloResult(variant.automation.level, base_summary, variant_summary, dominance)


def _metric(config, metric):
    value_lcoe, value_npv = _metrics_for(config)
    if metric == 'lcoe':
        return value_lcoe
    if np.isnan(value_npv):
        raise UndefinedMetricError("NPV undefined: no energy tariff, revenue unknown")
    return value_npv


def tornado(config: ProjectConfig, ranges: Optional[Dict[str, tuple]] = None, metric='lcoe') -> List[TornadoEntry]:
    """One-at-a-time swings, largest first; endpoints that fail are flagged, not dropped."""
    if metric not in METRICS:
        raise ConfigurationError('metric', f"unknown metric {metric!r}; expected lcoe or npv")
    ranges = ranges if ranges is not None else default_tornado_ranges(config)
    for path, (low, high) in ranges.items():
        if low > high:
            raise ConfigurationError(path, f'range low {low} exceeds high {high}')
        get_parameter(config, path)

    prepared = _prepare(config, ranges)
    base = _metric(prepared, metric)

    entries = []
    for path, (low, high) in ranges.items():
        outputs = []
        reasons = []
        for value in (low, high):
            try:
                outputs.append(_metric(set_parameter(prepared, path, value), metric))
            except GeothermalError as e:
                outputs.append(None)
                reasons.append(f"{path}={value:.6g}: {e}")
        flagged = None in outputs
        swing = None if flagged else abs(outputs[1] - outputs[0])
        entries.append(TornadoEntry(path, low, high, outputs[0], outputs[1], base, swing,
                                    flagged=flagged, reason="; ".join(reasons) or None))

    entries.sort(key=lambda entry: -1.0 if entry.swing is None else entry.swing, reverse=True)
    return entries
