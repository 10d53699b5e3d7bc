"""Report rendering: aligned text tables, CSV and structured JSON.

csv and structured output are byte-stable for identical inputs. Currency is
printed in whole USD; undefined values are `—` in tables and empty in csv.
"""
import dataclasses
import io
import json
import math
from enum import Enum

import numpy as np
import pandas as pd

from emissions import EmissionsReport
from finance import CURRENCY, MetricsReport
from model import Pathway
from scenarios import PATHWAY_LABELS, Assessment, AutomationLevel, ComparisonRow, ComparisonTable, preset
from uncertainty import MonteCarloSummary, PairedMonteCarloResult, TornadoEntry

UNDEFINED = "—"
LCOC_MARKER = "*"
LCOC_NOTE = f"{LCOC_MARKER} LCOC: levelized cost of cooling, USD per MWh of delivered cooling."
PAYBACK_MARKER = "†"
EGS_FULL_PAYBACK_NOTE = (f"{PAYBACK_MARKER} EGS full-automation payback uses the tariff implied by the 12.5 yr baseline "
                         "payback; the published comparison lists 10.5 yr, which would need lower revenue than "
                         "the baseline.")

BOLD = "\033[1m"
RED = "\033[31m"
RESET = "\033[0m"

COMPARISON_COLUMNS = ['Pathway', 'Scenario', 'CAPEX (USD)', 'OPEX (USD/yr)', 'LCOE (USD/MWh)', 'Payback (years)',
                      'NPV (USD)', 'Avoided CO2 (t/yr)']
COMPARISON_CSV_COLUMNS = ['name', 'pathway', 'scenario', 'capex_usd', 'opex_usd_per_yr', 'levelized_cost_usd_per_mwh',
                          'levelized_label', 'payback_years', 'npv_usd', 'avoided_co2_t_per_yr']
MONTE_CARLO_COLUMNS = ['metric', 'mean', 'sd', 'p5', 'p50', 'p95', 'prob_npv_positive', 'n_failed']
TORNADO_COLUMNS = ['parameter', 'low', 'high', 'output_low', 'output_high', 'base', 'swing', 'flagged']


class ReportFormat(str, Enum):
    TABLE = "table"
    CSV = "csv"
    STRUCTURED = "structured"


class NumpyEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        elif isinstance(obj, np.floating):
            return float(obj)
        elif isinstance(obj, np.ndarray):
            return obj.tolist()
        elif isinstance(obj, Enum):
            return obj.value
        return super(NumpyEncoder, self).default(obj)


def _defined(value):
    return value is not None and not (isinstance(value, float) and math.isnan(value))


def _usd(value):
    return f"{value:,.0f}" if _defined(value) else UNDEFINED


def _num(value, digits=2):
    return f"{value:,.{digits}f}" if _defined(value) else UNDEFINED


def _csv_usd(value):
    return f"{value:.0f}" if _defined(value) else None


def _csv_num(value):
    return format(float(value), '.10g') if _defined(value) else None


def _clean(obj):
    """NaN becomes null so structured output stays valid JSON."""
    if isinstance(obj, dict):
        return {key: _clean(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (float, np.floating)) and math.isnan(obj):
        return None
    return obj


def _to_csv(columns, rows):
    frame = pd.DataFrame(rows, columns=columns)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, na_rep='', lineterminator='\n')
    return buffer.getvalue()


def _to_table(columns, rows, color=False):
    cells = [[UNDEFINED if cell is None else str(cell) for cell in row] for row in rows]
    widths = [max([len(column)] + [len(row[k]) for row in cells]) for k, column in enumerate(columns)]
    header = "  ".join(column.ljust(widths[k]) for k, column in enumerate(columns)).rstrip()
    if color:
        header = f"{BOLD}{header}{RESET}"
    lines = [header, "  ".join("-" * width for width in widths)]
    for row in cells:
        line = "  ".join(cell.ljust(widths[k]) if k < 2 else cell.rjust(widths[k]) for k, cell in enumerate(row))
        lines.append(line.rstrip())
    return "\n".join(lines) + "\n"


def _structured(data):
    return json.dumps(_clean(data), cls=NumpyEncoder, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# --- comparison ------------------------------------------------------------

def _render_comparison(table: ComparisonTable, fmt, color):
    if fmt is ReportFormat.CSV:
        rows = [[row.name, row.pathway, row.scenario, _csv_usd(row.capex), _csv_usd(row.opex),
                 _csv_num(row.levelized_cost), row.levelized_label, _csv_num(row.payback), _csv_usd(row.npv),
                 _csv_num(row.avoided_co2)] for row in table.rows]
        return _to_csv(COMPARISON_CSV_COLUMNS, rows)
    if fmt is ReportFormat.STRUCTURED:
        return _structured({'currency': CURRENCY, 'rows': [dataclasses.asdict(row) for row in table.rows]})

    rows = []
    footnote = False
    payback_footnote = False
    for row in table.rows:
        levelized = _num(row.levelized_cost)
        if row.levelized_label == "LCOC" and _defined(row.levelized_cost):
            levelized = f"{levelized} {LCOC_MARKER}"
            footnote = True
        payback = _num(row.payback, 1)
        if _defined(row.payback) and _is_egs_full_reference(row):
            payback = f"{payback} {PAYBACK_MARKER}"
            payback_footnote = True
        npv = _usd(row.npv)
        if color and _defined(row.npv) and row.npv < 0:
            npv = f"{RED}{npv}{RESET}"
        rows.append([row.pathway, row.scenario, _usd(row.capex), _usd(row.opex), levelized, payback,
                     npv, _num(row.avoided_co2, 0)])
    text = _to_table(COMPARISON_COLUMNS, rows, color)
    if footnote:
        text += f"\n{LCOC_NOTE}\n"
    if payback_footnote:
        text += f"\n{EGS_FULL_PAYBACK_NOTE}\n"
    return text


def _is_egs_full_reference(row: ComparisonRow):
    """An EGS full-automation row carrying the reference EGS costs."""
    if row.pathway != PATHWAY_LABELS[Pathway.EGS] or row.scenario != AutomationLevel.FULL.label:
        return False
    costs = preset(Pathway.EGS, AutomationLevel.FULL).effective_costs()
    return math.isclose(row.capex, costs.capex) and math.isclose(row.opex, costs.opex)


# --- single assessment -----------------------------------------------------

def _metrics_rows(metrics: MetricsReport, label="LCOE"):
    return [
        (label.lower(), f"{label} (USD/MWh)", metrics.lcoe, 'num'),
        ('npv', "NPV (USD)", metrics.npv, 'usd'),
        ('irr', "IRR", metrics.irr, 'pct'),
        ('payback_simple', "Payback, simple (years)", metrics.payback_simple, 'num'),
        ('payback_cumulative', "Payback, cumulative (years)", metrics.payback_cumulative, 'num'),
    ]


def _emissions_rows(report: EmissionsReport):
    return [
        ('annual_displaced_mwh', "Grid electricity displaced (MWh/yr)", report.annual_displaced_mwh, 'num0'),
        ('avoided_co2_t_per_yr', "Avoided CO2 (t/yr)", report.avoided_annual, 'num0'),
        ('avoided_co2_lifetime_net_t', f"Avoided CO2, {report.lifetime}-yr net (t)", report.avoided_lifetime_net,
         'num0'),
        ('grid_factor_kg_per_kwh', "Grid factor (kg CO2/kWh)", report.grid_factor, 'num3'),
    ]


def _format_cell(value, kind):
    if kind == 'usd':
        return _usd(value)
    if kind == 'pct':
        return f"{value * 100:.2f} %" if _defined(value) else UNDEFINED
    if kind == 'num0':
        return _num(value, 0)
    if kind == 'num3':
        return _num(value, 3)
    return _num(value)


def _format_csv_cell(value, kind):
    return _csv_usd(value) if kind == 'usd' else _csv_num(value)


def _render_rows(rows, fmt, title=None, extra=None):
    if fmt is ReportFormat.CSV:
        return _to_csv(['metric', 'value'], [[key, _format_csv_cell(value, kind)] for key, _, value, kind in rows])
    if fmt is ReportFormat.STRUCTURED:
        data = {key: value for key, _, value, _ in rows}
        data.update(extra or {})
        return _structured(data)
    text = _to_table(['Metric', 'Value'], [[label, _format_cell(value, kind)] for _, label, value, kind in rows])
    return f"{title}\n{text}" if title else text


def _render_assessment(assessment: Assessment, fmt):
    config = assessment.config
    label = assessment.levelized_label
    rows = [('annual_energy_mwh', "Annual energy (MWh/yr)", assessment.annual_energy, 'num0')]
    rows += _metrics_rows(assessment.metrics, label)
    rows += _emissions_rows(assessment.emissions)
    extra = {
        'name': config.name,
        'pathway': config.plant.pathway.value,
        'scenario': config.automation.level.value,
        'currency': CURRENCY,
        'irr_ambiguous': assessment.metrics.irr_ambiguous,
        'undefined': assessment.metrics.undefined,
        'resource': assessment.resource,
        'emissions_assumptions': assessment.emissions.assumptions,
    }
    title = f"{config.name} ({config.plant.pathway.value}, {config.automation.level.label})"
    text = _render_rows(rows, fmt, title, extra)
    if fmt is ReportFormat.TABLE and label == "LCOC":
        text += f"\n{LCOC_NOTE}\n"
    return text


# --- uncertainty -----------------------------------------------------------

def _monte_carlo_rows(summary: MonteCarloSummary, scenario=None):
    rows = []
    for metric in ('lcoe', 'npv'):
        stats = summary.metrics.get(metric)
        if stats is None:
            continue
        fmt = _csv_usd if metric == 'npv' else _csv_num
        row = [metric, fmt(stats.mean), fmt(stats.sd), fmt(stats.p5), fmt(stats.p50), fmt(stats.p95),
               _csv_num(summary.prob_npv_positive), str(summary.n_failed)]
        rows.append([scenario] + row if scenario else row)
    return rows


def _monte_carlo_structured(summary: MonteCarloSummary):
    data = {
        'samples': summary.samples,
        'seed': summary.seed,
        'prob_npv_positive': summary.prob_npv_positive,
        'n_failed': summary.n_failed,
        'first_failure': summary.first_failure,
        'metrics': {},
    }
    for metric, stats in summary.metrics.items():
        data['metrics'][metric] = {
            'mean': stats.mean, 'sd': stats.sd, 'p5': stats.p5, 'p50': stats.p50, 'p95': stats.p95, 'n': stats.n,
            'histogram': {'counts': stats.histogram_counts, 'edges': stats.histogram_edges},
        }
    return data


def _monte_carlo_table(summary: MonteCarloSummary, color):
    rows = []
    for metric, stats in summary.metrics.items():
        fmt = _usd if metric == 'npv' else _num
        rows.append([metric.upper(), fmt(stats.mean), fmt(stats.sd), fmt(stats.p5), fmt(stats.p50), fmt(stats.p95),
                     str(stats.n)])
    text = _to_table(['Metric', 'Mean', 'SD', 'P5', 'P50', 'P95', 'N'], rows, color)
    prob = _num(summary.prob_npv_positive * 100, 1) + " %" if _defined(summary.prob_npv_positive) else UNDEFINED
    return (f"{text}\nSamples: {summary.samples}  Seed: {summary.seed}  Failed: {summary.n_failed}\n"
            f"P(NPV > 0): {prob}\n")


def _render_monte_carlo(summary: MonteCarloSummary, fmt, color):
    if fmt is ReportFormat.CSV:
        return _to_csv(MONTE_CARLO_COLUMNS, _monte_carlo_rows(summary))
    if fmt is ReportFormat.STRUCTURED:
        return _structured(_monte_carlo_structured(summary))
    return _monte_carlo_table(summary, color)


def _render_paired(result: PairedMonteCarloResult, fmt, color):
    variant = result.level.value
    if fmt is ReportFormat.CSV:
        rows = _monte_carlo_rows(result.baseline, 'baseline') + _monte_carlo_rows(result.variant, variant)
        return _to_csv(['scenario'] + MONTE_CARLO_COLUMNS, rows)
    if fmt is ReportFormat.STRUCTURED:
        return _structured({
            'baseline': _monte_carlo_structured(result.baseline),
            variant: _monte_carlo_structured(result.variant),
            'dominance_fraction': result.dominance_fraction,
        })
    dominance = _num(result.dominance_fraction * 100, 1) + " %" if _defined(result.dominance_fraction) else UNDEFINED
    return (f"Baseline\n{_monte_carlo_table(result.baseline, color)}\n"
            f"{result.level.label}\n{_monte_carlo_table(result.variant, color)}\n"
            f"Paired samples where {result.level.label} NPV >= baseline: {dominance}\n")


def _render_tornado(entries, fmt, color):
    if fmt is ReportFormat.CSV:
        rows = [[e.parameter, _csv_num(e.low), _csv_num(e.high), _csv_num(e.output_low), _csv_num(e.output_high),
                 _csv_num(e.base), _csv_num(e.swing), str(e.flagged).lower()] for e in entries]
        return _to_csv(TORNADO_COLUMNS, rows)
    if fmt is ReportFormat.STRUCTURED:
        return _structured({'entries': [dataclasses.asdict(e) for e in entries]})
    rows = [[e.parameter, f"{e.low:g}", f"{e.high:g}", _num(e.output_low), _num(e.output_high), _num(e.swing),
             "yes" if e.flagged else ""] for e in entries]
    text = _to_table(['Parameter', 'Low', 'High', 'Output @ low', 'Output @ high', 'Swing', 'Flagged'], rows, color)
    reasons = [f"  {e.parameter}: {e.reason}" for e in entries if e.reason]
    if reasons:
        text += "\nUndefined endpoints:\n" + "\n".join(reasons) + "\n"
    return text


def render_report(results, fmt=ReportFormat.TABLE, color=False) -> str:
    """Render any engine result; rendering never fails for well-formed results."""
    fmt = ReportFormat(fmt)
    if isinstance(results, ComparisonTable):
        return _render_comparison(results, fmt, color)
    if isinstance(results, Assessment):
        return _render_assessment(results, fmt)
    if isinstance(results, MetricsReport):
        return _render_rows(_metrics_rows(results), fmt, extra={'undefined': results.undefined})
    if isinstance(results, EmissionsReport):
        return _render_rows(_emissions_rows(results), fmt, extra={'assumptions': results.assumptions})
    if isinstance(results, PairedMonteCarloResult):
        return _render_paired(results, fmt, color)
    if isinstance(results, MonteCarloSummary):
        return _render_monte_carlo(results, fmt, color)
    if isinstance(results, (list, tuple)) and all(isinstance(e, TornadoEntry) for e in results):
        return _render_tornado(results, fmt, color)
    raise TypeError(f"cannot render {type(results).__name__}")
