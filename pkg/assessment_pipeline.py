import dataclasses
import json
import logging
import re
from pathlib import Path

import settings
from emissions import emissions_report
from errors import ConfigurationError
from project_io import load_calibration, load_project, load_ranges
from reports import NumpyEncoder, ReportFormat, render_report
from scenarios import AutomationLevel, PATHWAY_IDS, compare_pathways, evaluate, preset, resolve_annual_energy
from uncertainty import default_distributions, run_monte_carlo, run_paired_monte_carlo, tornado

logger = logging.getLogger(__name__)

COMPARISON_LEVELS = ('baseline', 'full')


def _file_stem(name):
    return re.sub(r'[^A-Za-z0-9_.-]+', '_', name).strip('_') or 'project'


def parse_selection(value, allowed, option):
    """'all' or a comma list, validated against `allowed` and kept in `allowed` order."""
    if value is None or value.strip().lower() == 'all':
        return list(allowed)
    chosen = [item.strip().lower() for item in value.split(',') if item.strip()]
    unknown = [item for item in chosen if item not in allowed]
    if unknown:
        raise ConfigurationError(option, f"unknown value(s) {unknown}; expected 'all' or a subset of {list(allowed)}")
    return [item for item in allowed if item in chosen]


class AssessmentPipeline:
    """Facade the CLI and the HTTP API drive: load, evaluate, render and save."""

    def __init__(self, output_dir=None):
        self.output_dir = Path(output_dir or settings.OUTPUT_DIR)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        logger.info(f"Initialized pipeline with output_dir: {self.output_dir}")

    def load(self, path):
        return load_project(path)

    def assess(self, config, save=False):
        logger.info(f"Assessing {config.name}...")
        assessment = evaluate(config)
        for metric, reason in assessment.metrics.undefined.items():
            logger.warning(f"{config.name}: {metric} undefined ({reason})")
        if save:
            self.save_assessment(assessment)
        return assessment

    def save_assessment(self, assessment):
        """Write <name>_metrics.json and <name>_cashflows.csv into the output directory."""
        stem = _file_stem(assessment.config.name)
        metrics_file = self.output_dir / f"{stem}_metrics.json"
        cashflow_file = self.output_dir / f"{stem}_cashflows.csv"

        document = json.loads(render_report(assessment, ReportFormat.STRUCTURED))
        document['metrics'] = dataclasses.asdict(assessment.metrics)
        with open(metrics_file, 'w', encoding='utf-8') as f:
            json.dump(document, f, indent=2, ensure_ascii=False, sort_keys=True, cls=NumpyEncoder)
        logger.info(f"Saved metrics to {metrics_file}")

        assessment.series.to_frame().to_csv(cashflow_file, index=False, lineterminator='\n')
        logger.info(f"Saved {len(assessment.series)} cash-flow years to {cashflow_file}")
        return metrics_file, cashflow_file

    def compare(self, files=(), presets=None, levels=None):
        """Configs from files first, then presets (pathway order, then level order)."""
        configs = [load_project(path) for path in files]
        if presets is not None or not files:
            pathways = parse_selection(presets, list(PATHWAY_IDS), 'presets')
            chosen_levels = parse_selection(levels or ','.join(COMPARISON_LEVELS), [lvl.value for lvl in AutomationLevel],
                                            'levels')
            configs += [preset(pathway, level) for pathway in pathways for level in chosen_levels]
        logger.info(f"Comparing {len(configs)} project(s)")
        return compare_pathways(configs)

    def monte_carlo(self, config, samples=None, seed=None, calibration=None, workers=None, paired_level=None):
        spec = load_calibration(calibration) if calibration else None
        spec = spec or config.uncertainty
        if spec is not None and (samples is not None or seed is not None):
            spec = dataclasses.replace(spec, samples=spec.samples if samples is None else samples,
                                       seed=spec.seed if seed is None else seed)
        elif spec is None:
            spec = default_distributions(config, samples=settings.DEFAULT_SAMPLES if samples is None else samples,
                                         seed=settings.DEFAULT_SEED if seed is None else seed)
        if paired_level:
            return run_paired_monte_carlo(config, spec, level=paired_level, workers=workers)
        return run_monte_carlo(config, spec, workers=workers)

    def tornado(self, config, metric='lcoe', ranges=None):
        loaded = load_ranges(ranges) if ranges else None
        return tornado(config, loaded, metric=metric)

    def emissions(self, config):
        return emissions_report(config.plant, config.emissions, annual_energy=resolve_annual_energy(config),
                                lifetime=config.assumptions.lifetime)


def main():
    logging.basicConfig(level=settings.LOG_LEVEL, format=settings.LOG_FORMAT)
    pipeline = AssessmentPipeline()

    logger.info("=== Reproducing the pathway comparison (baseline vs full automation) ===")
    table = pipeline.compare()
    output_file = pipeline.output_dir / "pathway_comparison.csv"
    with open(output_file, 'w', encoding='utf-8') as f:
        f.write(render_report(table, ReportFormat.CSV))
    logger.info(f"Saved comparison to {output_file}")
    for row in table.rows:
        logger.info(f"{row.pathway} / {row.scenario}: {row.levelized_label} {row.levelized_cost:.2f} USD/MWh, "
                    f"payback {row.payback:.2f} years")

    logger.info("=== Saving preset assessments ===")
    for pathway in PATHWAY_IDS:
        pipeline.assess(preset(pathway, AutomationLevel.BASELINE), save=True)


if __name__ == "__main__":
    main()
