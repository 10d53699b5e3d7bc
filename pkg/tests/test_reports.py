import dataclasses
import io
import json

import pandas as pd
import pytest

from distributions import Distribution, UncertaintySpec
from finance import FinancialAssumptions
from reports import (COMPARISON_CSV_COLUMNS, EGS_FULL_PAYBACK_NOTE, LCOC_NOTE, PAYBACK_MARKER, UNDEFINED, ReportFormat,
                     render_report)
from scenarios import compare_pathways, evaluate, preset
from uncertainty import run_monte_carlo, run_paired_monte_carlo, tornado


@pytest.fixture
def table():
    return compare_pathways([preset(p, level) for p in ('egs', 'wells', 'gshp') for level in ('baseline', 'full')])


def small_spec():
    return UncertaintySpec({
        'costs.capex': Distribution.triangular(0.8, 1.0, 1.2, relative=True),
        'assumptions.discount_rate': Distribution.uniform(0.04, 0.08),
    }, samples=200, seed=5)


def test_comparison_table_layout(table):
    text = render_report(table, ReportFormat.TABLE)
    header = text.splitlines()[0]
    for column in ('Pathway', 'Scenario', 'CAPEX (USD)', 'LCOE (USD/MWh)', 'Payback (years)', 'NPV (USD)'):
        assert column in header
    assert '21,500,000' in text
    assert 'Full Automation' in text
    assert LCOC_NOTE in text
    assert '\033[' not in text


def test_comparison_table_color_marks_header(table):
    assert render_report(table, ReportFormat.TABLE, color=True).startswith('\033[1m')


def test_egs_full_payback_is_footnoted(table):
    text = render_report(table, ReportFormat.TABLE)
    assert EGS_FULL_PAYBACK_NOTE in text
    egs_full = next(line for line in text.splitlines() if line.startswith('Enhanced') and 'Full Automation' in line)
    assert f"9.8 {PAYBACK_MARKER}" in egs_full
    assert sum(PAYBACK_MARKER in line for line in text.splitlines()) == 2


def test_payback_footnote_needs_the_reference_egs_row():
    text = render_report(compare_pathways([preset('egs', 'baseline'), preset('wells', 'full')]), ReportFormat.TABLE)
    assert PAYBACK_MARKER not in text
    custom = dataclasses.replace(preset('egs', 'full'), costs=preset('egs', 'full').costs.with_capex(20e6))
    assert PAYBACK_MARKER not in render_report(compare_pathways([custom]), ReportFormat.TABLE)


def test_empty_comparison_is_header_only():
    empty = compare_pathways([])
    assert render_report(empty, 'csv') == ','.join(COMPARISON_CSV_COLUMNS) + '\n'
    assert len(render_report(empty, 'table').splitlines()) == 2


def test_comparison_csv_parses_back(table):
    frame = pd.read_csv(io.StringIO(render_report(table, 'csv')))
    assert list(frame.columns) == COMPARISON_CSV_COLUMNS
    assert len(frame) == len(table.rows)
    for (_, parsed), row in zip(frame.iterrows(), table.rows):
        assert parsed['name'] == row.name
        assert parsed['capex_usd'] == round(row.capex)
        assert parsed['levelized_cost_usd_per_mwh'] == pytest.approx(row.levelized_cost, abs=1e-6)
        assert parsed['npv_usd'] == pytest.approx(row.npv, abs=0.5)
        assert parsed['levelized_label'] == row.levelized_label


def test_undefined_cells(egs_baseline):
    no_tariff = dataclasses.replace(egs_baseline, name='no-tariff', assumptions=FinancialAssumptions(lifetime=25))
    table = compare_pathways([no_tariff])
    frame = pd.read_csv(io.StringIO(render_report(table, 'csv')))
    assert pd.isna(frame.loc[0, 'npv_usd'])
    assert pd.isna(frame.loc[0, 'payback_years'])
    assert frame.loc[0, 'levelized_cost_usd_per_mwh'] == pytest.approx(table.rows[0].levelized_cost, abs=1e-6)

    row_line = render_report(table, 'table').splitlines()[2]
    assert UNDEFINED in row_line


def test_structured_comparison_is_valid_json(table):
    data = json.loads(render_report(table, ReportFormat.STRUCTURED))
    assert data['currency'].startswith('USD')
    assert [row['name'] for row in data['rows']] == [row.name for row in table.rows]


def test_assessment_csv(egs_baseline):
    text = render_report(evaluate(egs_baseline), 'csv')
    frame = pd.read_csv(io.StringIO(text))
    values = dict(zip(frame['metric'], frame['value']))
    assert values['lcoe'] == pytest.approx(145.0, rel=0.01)
    assert values['annual_energy_mwh'] == pytest.approx(21_764.0)
    assert 'avoided_co2_t_per_yr' in values


def test_gshp_assessment_table_carries_note(gshp_baseline):
    text = render_report(evaluate(gshp_baseline))
    assert 'LCOC (USD/MWh)' in text
    assert LCOC_NOTE in text


def test_assessment_structured_nan_free(egs_baseline):
    no_tariff = dataclasses.replace(egs_baseline, assumptions=FinancialAssumptions(lifetime=25))
    data = json.loads(render_report(evaluate(no_tariff), 'structured'))
    assert data['npv'] is None
    assert 'npv' in data['undefined']


def test_monte_carlo_csv_is_stable(egs_baseline):
    first = render_report(run_monte_carlo(egs_baseline, small_spec()), 'csv')
    second = render_report(run_monte_carlo(egs_baseline, small_spec()), 'csv')
    assert first == second
    lines = first.splitlines()
    assert lines[0] == 'metric,mean,sd,p5,p50,p95,prob_npv_positive,n_failed'
    assert [line.split(',')[0] for line in lines[1:]] == ['lcoe', 'npv']


def test_monte_carlo_structured_has_histograms(egs_baseline):
    data = json.loads(render_report(run_monte_carlo(egs_baseline, small_spec()), 'structured'))
    assert data['seed'] == 5
    assert len(data['metrics']['lcoe']['histogram']['counts']) == 50
    assert sum(data['metrics']['lcoe']['histogram']['counts']) <= data['samples']
    assert data['metrics']['lcoe']['n'] == 200
    assert data['metrics']['npv']['n'] == 200


def test_paired_csv_has_scenario_column(egs_baseline):
    result = run_paired_monte_carlo(egs_baseline, small_spec(), level='full')
    lines = render_report(result, 'csv').splitlines()
    assert lines[0].startswith('scenario,metric,')
    assert {line.split(',')[0] for line in lines[1:]} == {'baseline', 'full'}
    assert 'Full Automation' in render_report(result, 'table')


def test_tornado_csv(egs_baseline):
    entries = tornado(egs_baseline, {'assumptions.discount_rate': (0.04, 0.08), 'costs.capex': (2e7, 3e7)})
    lines = render_report(entries, 'csv').splitlines()
    assert lines[0] == 'parameter,low,high,output_low,output_high,base,swing,flagged'
    discount = next(line for line in lines[1:] if line.startswith('assumptions.discount_rate,'))
    assert discount.startswith('assumptions.discount_rate,0.04,0.08,')
    assert discount.endswith(',false')
    assert len(lines) == 3


def test_tornado_table_lists_undefined_endpoints(egs_baseline):
    entries = tornado(egs_baseline, {'plant.production_temperature': (60.0, 150.0)})
    text = render_report(entries, 'table')
    assert 'Undefined endpoints' in text
    assert 'yes' in text


def test_unknown_result_type():
    with pytest.raises(TypeError):
        render_report(object())


def test_monte_carlo_table_reports_defined_sample_counts(egs_baseline):
    text = render_report(run_monte_carlo(egs_baseline, small_spec()), ReportFormat.TABLE)
    header, _, lcoe_line = text.splitlines()[:3]
    assert header.split()[-1] == 'N'
    assert lcoe_line.split()[-1] == '200'
