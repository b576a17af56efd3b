"""Tests for the command line interface. Records are written to files and
read back, since the runner may mix standard error into standard output.
"""

import json
import math
import os
import sys
import numpy as np
import pytest
from click.testing import CliRunner
from lipscope.cli import cli, main, mean_path
from lipscope.config import read_config
from lipscope.empirics import TrainConfig, initial_network
from lipscope.experiment.output import read_csv, strip_metadata
from lipscope.network import Architecture, identity_network, save_network

def _run(*args, **kwargs):
    result = CliRunner().invoke(cli, [str(arg) for arg in args], **kwargs)
    assert result.exception is None or isinstance(result.exception, SystemExit), result.output
    return result

def _read(path):
    with open(path, encoding = 'UTF-8') as file:
        return file.read()

def _metadata(path):
    return json.loads(_read(path).split('\n', 1)[0][2:])

def _write_json(path, obj):
    with open(path, mode = 'w', encoding = 'UTF-8') as file:
        json.dump(obj, file)
    return str(path)

def test_bounds_of_a_sampled_network():
    result = _run('bounds', '--arch', '300x1', '--out', 'bounds.json')
    assert result.exit_code == 0
    record = json.loads(_read('bounds.json'))
    assert record['data']['rmt_upper'] == pytest.approx(350.99, abs = 0.01)
    assert record['data']['widths'] == [2, 300, 2]
    assert record['data']['exact_lower'] <= record['data']['exact_upper']
    assert record['metadata']['seed'] == 0

def test_bounds_of_a_network_file():
    save_network('identity.json', identity_network(3, 2))
    result = _run('bounds', '--net', 'identity.json', '--out', 'bounds.csv', '--format', 'csv')
    assert result.exit_code == 0
    row = read_csv('bounds.csv')[0]
    assert float(row['exact_upper']) == pytest.approx(1.0)
    assert float(row['exact_lower']) == pytest.approx(1.0)

def test_bounds_rejects_bad_input(tmp_path):
    broken = tmp_path / 'broken.json'
    broken.write_text('{"widths": [2, 2]}', encoding = 'UTF-8')
    assert _run('bounds', '--net', broken).exit_code == 1
    assert _run('bounds').exit_code == 1
    assert _run('bounds', '--net', 'missing.json').exit_code == 1
    assert _run('bounds', '--arch', '2,x,2').exit_code == 1

def test_reproducible_bounds_are_byte_identical():
    _run('bounds', '--arch', '2,40,40,2', '--seed', 3, '--reproducible', '--out', 'run.json')
    first = _read('run.json')
    _run('bounds', '--arch', '2,40,40,2', '--seed', 3, '--reproducible', '--out', 'run.json')
    assert _read('run.json') == first
    assert 'timestamp' not in json.loads(first)['metadata']

def test_seed_from_environment():
    _run('bounds', '--arch', '10x2', '--out', 'env.json', env = {'LIPSCOPE_SEED': '5'})
    assert json.loads(_read('env.json'))['metadata']['seed'] == 5

def test_sweep_single_cell():
    result = _run('sweep', '--widths', '10', '--depths', '2', '--trials', 1, '--out', 'sweep.csv')
    assert result.exit_code == 0
    rows = read_csv('sweep.csv')
    assert len(rows) == 1
    assert (rows[0]['width'], rows[0]['depth'], rows[0]['seed']) == ('10', '2', '0')
    assert os.path.exists(mean_path('sweep.csv'))
    assert mean_path('out/sweep.csv') == 'out/sweep_mean.csv'

def test_sweep_is_thread_independent():
    args = ['sweep', '--widths', '10:30:10', '--depths', '1..3', '--trials', 3, '--reproducible']
    _run(*args, '--threads', 1, '--out', 'serial.csv')
    _run(*args, '--threads', 3, '--out', 'parallel.csv')
    assert strip_metadata(_read('serial.csv')) == strip_metadata(_read('parallel.csv'))
    assert strip_metadata(_read('serial_mean.csv')) == strip_metadata(_read('parallel_mean.csv'))
    assert len(read_csv('serial.csv')) == 27

def test_sweep_log_upper_bound_is_linear_in_depth():
    _run('sweep', '--widths', '50', '--depths', '1:8', '--trials', 1, '--out', 'sweep.csv')
    means = read_csv('sweep_mean.csv')
    depths = [float(row['depth']) for row in means]
    logs = [math.log(float(row['rmt_upper'])) for row in means]
    assert np.corrcoef(depths, logs)[0, 1] ** 2 > 0.999

def test_sweep_reads_toml_defaults():
    with open('.lipscope.toml', mode = 'w', encoding = 'UTF-8') as file:
        file.write('[experiment]\ntrials = 3\n')
    _run('sweep', '--widths', '10', '--depths', '1', '--out', 'sweep.csv')
    assert len(read_csv('sweep.csv')) == 3
    assert float(read_csv('sweep_mean.csv')[0]['seeds']) == 3

def test_sweep_flags_override_experiment_file(tmp_path):
    path = _write_json(tmp_path / 'experiment.json', {'trials': 2, 'widths': [10, 20], 'depths': [1]})
    _run('sweep', '--config', path, '--out', 'file.csv')
    assert len(read_csv('file.csv')) == 4
    _run('sweep', '--config', path, '--trials', 4, '--out', 'flags.csv')
    assert len(read_csv('flags.csv')) == 8
    assert _metadata('flags.csv')['config']['trials'] == 4

def test_sweep_rejects_unknown_experiment_options(tmp_path):
    path = _write_json(tmp_path / 'experiment.json', {'trails': 2})
    assert _run('sweep', '--config', path).exit_code == 1

def test_stability_table():
    result = _run('stability', '--trials', 10, '--out', 'table.csv')
    assert result.exit_code == 0
    rows = read_csv('table.csv')
    assert [row['architecture'] for row in rows] == ['300x1', '100x3', '50x6', '20x15', '10x30']
    likelihoods = [float(row['likelihood_percent']) for row in rows]
    assert likelihoods[0] == 100.0
    assert all(later <= earlier for earlier, later in zip(likelihoods, likelihoods[1:]))
    assert float(rows[0]['threshold']) == pytest.approx(918.8, rel = 1e-3)
    assert _metadata('table.csv')['a'] == [[0.0, 2700.0], [-3600.0, -5400.0]]

def test_stability_single_trial():
    _run('stability', '--trials', 1, '--arch', '50x6', '--arch', '20x1', '--out', 'table.csv')
    assert all(float(row['likelihood_percent']) in (0.0, 100.0) for row in read_csv('table.csv'))

def test_stability_rmt_mode():
    _run('stability', '--mode', 'rmt', '--arch', '300x1', '--trials', 5, '--out', 'table.csv')
    assert float(read_csv('table.csv')[0]['likelihood_percent']) == 100.0

def test_stability_rejects_bad_matrices(tmp_path):
    unstable = _write_json(tmp_path / 'a.json', [[1.0, 0.0], [0.0, 1.0]])
    assert _run('stability', '--a-file', unstable, '--trials', 1).exit_code == 2

    broken = tmp_path / 'broken.json'
    broken.write_text('[[1.0, 0.0], [0.0', encoding = 'UTF-8')
    assert _run('stability', '--a-file', broken, '--trials', 1).exit_code == 1

    indefinite = _write_json(tmp_path / 'q.json', [[1.0, 2.0], [2.0, 1.0]])
    assert _run('stability', '--q-file', indefinite, '--trials', 1).exit_code == 2
    assert _run('stability', '--mode', 'simulate').exit_code == 1

def test_trajectory():
    result = _run('trajectory', '--widths', '30', '--depths', '3,4', '--points', 256,
        '--out', 'trajectory.csv')
    assert result.exit_code == 0
    rows = read_csv('trajectory.csv')
    assert [(row['width'], row['depth']) for row in rows] == [('30', '3'), ('30', '4')]
    assert all(float(row['stretch_ratio']) <= float(row['exact_upper']) + 1e-9 for row in rows)
    assert set(_metadata('trajectory.csv')['fit']) == {'slope', 'intercept', 'correlation'}

def _train_config(tmp_path, **options):
    settings = {'widths': [2, 8, 1], 'epochs': 2, 'dataset_size': 500}
    settings.update(options)
    return _write_json(tmp_path / 'train.json', settings)

def test_train_study_outputs(tmp_path):
    path = _train_config(tmp_path)
    result = _run('train-study', path, '--hidden', 8, '--hidden', 16, '--bins', 10,
        '--out-dir', 'study')
    assert result.exit_code == 0
    expected = {'network_8.json', 'network_16.json', 'norm_comparison.csv',
        'histogram_8_layer1.csv', 'histogram_8_layer2.csv',
        'histogram_16_layer1.csv', 'histogram_16_layer2.csv'}
    assert set(os.listdir('study')) == expected

    rows = read_csv(os.path.join('study', 'norm_comparison.csv'))
    assert [(row['network'], row['layer']) for row in rows] == \
        [('1', '1'), ('1', '2'), ('2', '1'), ('2', '2')]
    assert [(row['rows'], row['cols']) for row in rows] == \
        [('8', '2'), ('1', '8'), ('16', '2'), ('1', '16')]
    histogram = read_csv(os.path.join('study', 'histogram_8_layer1.csv'))
    assert len(histogram) == 10
    assert sum(int(row['count']) for row in histogram) == 16

def test_train_study_is_reproducible(tmp_path):
    path = _train_config(tmp_path)
    _run('train-study', path, '--out-dir', 'first', '--reproducible')
    _run('train-study', path, '--out-dir', 'second', '--reproducible')
    for name in ('network_8.json', 'norm_comparison.csv', 'histogram_8_layer2.csv'):
        first, second = _read(os.path.join('first', name)), _read(os.path.join('second', name))
        assert strip_metadata(first) == strip_metadata(second)

def test_train_study_without_epochs_reports_the_initialization(tmp_path):
    path = _train_config(tmp_path, seed = 6)
    _run('train-study', path, '--epochs', 0, '--out-dir', 'study')
    start = initial_network(TrainConfig(Architecture((2, 8, 1), 'tanh'), epochs = 0,
        dataset_size = 500, seed = 6))
    rows = read_csv(os.path.join('study', 'norm_comparison.csv'))
    for row, weight in zip(rows, start.weights):
        assert float(row['true_norm']) == pytest.approx(np.linalg.norm(weight, 2), rel = 1e-9)

@pytest.mark.slow
def test_train_study_defaults_predict_the_norms():
    result = _run('train-study', '--out-dir', 'study')
    assert result.exit_code == 0
    rows = read_csv(os.path.join('study', 'norm_comparison.csv'))
    assert [(row['rows'], row['cols']) for row in rows] == \
        [('64', '2'), ('1', '64'), ('256', '2'), ('1', '256')]
    assert all(float(row['relative_error']) <= 0.15 for row in rows)

def test_train_study_divergence(tmp_path):
    path = _train_config(tmp_path, epochs = 20)
    with np.errstate(all = 'ignore'):
        result = _run('train-study', path, '--learning-rate', 1e6, '--out-dir', 'study')
    assert result.exit_code == 2

def test_config_commands():
    assert _run('config', 'value', 'experiment.trials').exit_code == 1
    assert _run('config', 'create').exit_code == 0
    assert os.path.exists('.lipscope.toml')
    assert _run('config', 'value', 'experiment.trials', '12').exit_code == 0
    assert read_config('.lipscope.toml').experiment.trials == 12
    assert _run('config', 'value', 'experiment.trials').exit_code == 0
    assert _run('config', 'value', 'experiment.bogus').exit_code == 1
    assert _run('config', 'value', 'experiment.trials', 'many').exit_code == 1
    assert _run('config', 'list').exit_code == 0
    assert _run('config', 'loc').exit_code == 0

def test_config_create_skips_existing():
    _run('config', 'create', '--project')
    with open('.lipscope.toml', mode = 'a', encoding = 'UTF-8') as file:
        file.write('# kept\n')
    assert _run('config', 'create', '--project').exit_code == 0
    assert _read('.lipscope.toml').endswith('# kept\n')

@pytest.mark.parametrize('args,code', [
    (['bounds', '--arch', '10x1', '--out', 'main.json'], 0),
    (['bounds'], 1),
    (['sweep', '--trials', 'many'], 1),
    (['stability', '--a-file', 'unstable.json', '--trials', '1'], 2)
])
def test_main_exit_codes(monkeypatch, args, code):
    _write_json('unstable.json', [[1.0, 0.0], [0.0, 1.0]])
    monkeypatch.setattr(sys, 'argv', ['lipscope'] + args)
    with pytest.raises(SystemExit) as info:
        main()
    assert info.value.code == code
