import io
import json

import pandas as pd
import pytest

from cli import main
from project_io import dump_project, serialize_project
from scenarios import preset


def run_cli(tmp_path, *argv):
    out = io.StringIO()
    code = main(['--output-dir', str(tmp_path), *argv], out=out)
    return code, out.getvalue()


def test_compare_presets_csv(tmp_path):
    code, text = run_cli(tmp_path, 'compare', '--presets', 'all', '--levels', 'baseline,full', '--format', 'csv')
    assert code == 0
    frame = pd.read_csv(io.StringIO(text))
    assert list(frame['name']) == ['egs-baseline', 'egs-full', 'wells-baseline', 'wells-full', 'gshp-baseline',
                                   'gshp-full']


def test_compare_files_come_before_presets(tmp_path, samples_dir):
    code, text = run_cli(tmp_path, 'compare', '-f', str(samples_dir / 'wells_moderate.json'), '--presets', 'egs',
                         '--format', 'csv')
    assert code == 0
    assert list(pd.read_csv(io.StringIO(text))['name']) == ['wells-moderate', 'egs-baseline', 'egs-full']


def test_compare_unknown_preset(tmp_path):
    code, _ = run_cli(tmp_path, 'compare', '--presets', 'geyser')
    assert code == 2


def test_usage_error_exits_one(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        run_cli(tmp_path, 'assess')
    assert excinfo.value.code == 1


def test_unknown_format_is_usage_error(tmp_path, samples_dir):
    with pytest.raises(SystemExit) as excinfo:
        run_cli(tmp_path, 'assess', '-f', str(samples_dir / 'egs_baseline.json'), '--format', 'xml')
    assert excinfo.value.code == 1


def test_invalid_config_exits_two(tmp_path, egs_baseline):
    data = serialize_project(egs_baseline)
    data['plant']['capacity_factor'] = 1.4
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps(data), encoding='utf-8')
    code, text = run_cli(tmp_path, 'assess', '-f', str(path))
    assert code == 2
    assert text == ''


@pytest.mark.parametrize('lifetime', [25.5, float('nan')])
def test_non_whole_lifetime_exits_two(tmp_path, egs_baseline, lifetime):
    data = serialize_project(egs_baseline)
    data['assumptions']['lifetime'] = lifetime
    path = tmp_path / 'bad_lifetime.json'
    path.write_text(json.dumps(data), encoding='utf-8')
    assert run_cli(tmp_path, 'assess', '-f', str(path))[0] == 2


def test_empty_file_exits_two(tmp_path):
    path = tmp_path / 'empty.json'
    path.write_text('', encoding='utf-8')
    assert run_cli(tmp_path, 'assess', '-f', str(path))[0] == 2


def test_missing_file_exits_two(tmp_path):
    assert run_cli(tmp_path, 'emissions', '-f', str(tmp_path / 'nothing.json'))[0] == 2


def test_assess_table(tmp_path, samples_dir):
    code, text = run_cli(tmp_path, 'assess', '-f', str(samples_dir / 'egs_baseline.json'))
    assert code == 0
    assert 'LCOE (USD/MWh)' in text
    assert 'Full Automation' not in text


def test_assess_save_writes_artifacts(tmp_path, samples_dir):
    code, _ = run_cli(tmp_path, 'assess', '-f', str(samples_dir / 'egs_full.json'), '--save')
    assert code == 0
    metrics = json.loads((tmp_path / 'egs-full_metrics.json').read_text(encoding='utf-8'))
    assert metrics['name'] == 'egs-full'
    assert metrics['lcoe'] == pytest.approx(123.22, abs=0.05)
    cash_flows = pd.read_csv(tmp_path / 'egs-full_cashflows.csv')
    assert len(cash_flows) == 26


def test_montecarlo_is_independent_of_workers(tmp_path, samples_dir):
    project = str(samples_dir / 'egs_baseline.json')
    calibration = str(samples_dir / 'calibration_egs.json')
    outputs = [run_cli(tmp_path, 'montecarlo', '-f', project, '--calibration', calibration, '--samples', '300',
                       '--workers', str(workers), '--format', 'csv') for workers in (1, 2)]
    assert outputs[0][0] == outputs[1][0] == 0
    assert outputs[0][1] == outputs[1][1]


def test_montecarlo_defaults_and_seed(tmp_path, samples_dir):
    project = str(samples_dir / 'wells_baseline.json')
    code, text = run_cli(tmp_path, 'montecarlo', '-f', project, '--samples', '200', '--seed', '9',
                         '--format', 'structured')
    assert code == 0
    data = json.loads(text)
    assert data['samples'] == 200
    assert data['seed'] == 9


def test_montecarlo_paired(tmp_path, samples_dir):
    code, text = run_cli(tmp_path, 'montecarlo', '-f', str(samples_dir / 'egs_baseline.json'), '--samples', '200',
                         '--paired-level', 'full', '--format', 'csv')
    assert code == 0
    assert text.startswith('scenario,metric,')


def test_bad_seed_is_usage_error(tmp_path, samples_dir):
    with pytest.raises(SystemExit) as excinfo:
        run_cli(tmp_path, 'montecarlo', '-f', str(samples_dir / 'egs_baseline.json'), '--seed', '-4')
    assert excinfo.value.code == 1


def test_tornado_npv_without_tariff_exits_three(tmp_path, samples_dir):
    code, _ = run_cli(tmp_path, 'tornado', '-f', str(samples_dir / 'egs_5mw_emissions.json'), '--metric', 'npv')
    assert code == 3


def test_tornado_with_ranges_file(tmp_path, samples_dir):
    code, text = run_cli(tmp_path, 'tornado', '-f', str(samples_dir / 'egs_baseline.json'), '--metric', 'lcoe',
                         '--ranges', str(samples_dir / 'tornado_ranges_egs.json'), '--format', 'csv')
    assert code == 0
    assert len(text.splitlines()) == 4


def test_emissions(tmp_path, samples_dir):
    code, text = run_cli(tmp_path, 'emissions', '-f', str(samples_dir / 'egs_5mw_emissions.json'), '--format', 'csv')
    assert code == 0
    values = dict(line.split(',') for line in text.splitlines()[1:])
    assert float(values['avoided_co2_t_per_yr']) == pytest.approx(17_625.12, abs=0.01)


def test_presets_list(tmp_path):
    code, text = run_cli(tmp_path, 'presets', '--list')
    assert code == 0
    assert len(text.splitlines()) == 9
    assert text.splitlines()[0] == 'egs baseline'


def test_presets_dump(tmp_path):
    code, text = run_cli(tmp_path, 'presets', '--dump', 'egs', 'full')
    assert code == 0
    assert json.loads(text)['name'] == 'egs-full'
    assert text == dump_project(preset('egs', 'full'))
