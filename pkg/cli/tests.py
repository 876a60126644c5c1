import io
import json
import pickle
import numpy as np
import pandas as pd
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError
from pydantic import ValidationError
from forest.helpers import TreeConfig
from ingest.helpers import read_event_file, serialize_events
from rnn.helpers import RnnConfig
from synthgen.helpers import write_corpus
from utils.helpers import EmptyReportError, UnknownModelError, array_digest, write_json
from windows.helpers import label_windows, stratified_folds, window_count
from .helpers import *
from .helpers.experiment import _jobs_for


SMALL_TREE = TreeConfig(max_depth=None, n_trees=5)
SMALL_RNN = RnnConfig(hidden_units=4, epochs=2, batch_size=16, learning_rate=0.01)


def _small_config(**overrides):
    values = dict(
        scenario='low',
        users_per_game=3,
        shared_users=2,
        targets=('001', '002'),
        models=('dt', 'rf'),
        folds=3,
        seed=17,
        duration=12.0,
        tree=SMALL_TREE,
        rnn=SMALL_RNN,
        workers=1,
    )
    values.update(overrides)
    return ExperimentConfig(**values)


def _corpus(config):
    return load_traces(config)


@pytest.fixture(scope='module')
def small_report():
    config = _small_config()
    return config, run_experiment(config)


#-------------------------------------------------------------------------------

def test_config_defaults():
    config = ExperimentConfig()
    assert (config.users_per_game, config.shared_users) == (15, 11)
    assert config.models == ('gru', 'lstm', 'dt', 'rf')
    assert (config.window, config.stride, config.folds) == (40, 40, 5)
    assert len(config.targets) == 5


@pytest.mark.parametrize('overrides', [
    {'folds': 1},
    {'models': ('gru', 'svm')},
    {'targets': ()},
    {'targets': ('001', '001')},
    {'scenario': 'medium'},
    {'shared_users': 4},
    {'unknown_key': 1},
])
def test_invalid_configs_are_rejected(overrides):
    with pytest.raises(ValidationError):
        _small_config(**overrides)


def test_targets_must_play_the_scenario():
    # user 004 only plays the low-intensity game in a 3/2 layout
    _small_config(scenario='low', targets=('004',))
    with pytest.raises(ValidationError):
        _small_config(scenario='high', targets=('004',))
    with pytest.raises(ValidationError):
        _small_config(scenario='all', targets=('004',))


def test_config_file_and_overrides(tmp_path):
    path = write_json({'scenario': 'high', 'seed': 3, 'folds': 4, 'tree': {'n_trees': 7}}, tmp_path / 'experiment.json')
    config = load_experiment_config(path, seed=9, folds=None)
    assert config.scenario == 'high'
    assert config.seed == 9
    assert config.folds == 4
    assert config.tree.n_trees == 7


def test_config_echo_leaves_out_execution_fields():
    echo = _small_config(workers=3, output_dir='/tmp/elsewhere').echo()
    assert 'workers' not in echo and 'output_dir' not in echo and 'include_timing' not in echo
    assert echo['seed'] == 17
    assert echo == _small_config(workers=1).echo()


#-------------------------------------------------------------------------------

def test_report_shape(small_report):
    config, report = small_report
    assert len(report.sections) == 1
    section = report.sections[0]
    assert section.scenario == 'low'
    assert [(cell.user, cell.model) for cell in section.cells] == [('001', 'dt'), ('001', 'rf'), ('002', 'dt'), ('002', 'rf')]
    assert all(cell.folds == config.folds for cell in section.cells)
    assert section.class_counts['001'][0] > 0 and section.class_counts['001'][1] > 0


def test_averages_recompute_from_cells(small_report):
    _, report = small_report
    section = report.sections[0]
    for model, values in section.averages.items():
        cells = [cell for cell in section.cells if cell.model == model]
        for split in SPLITS:
            for metric in METRICS:
                expected = sum(getattr(cell, split)[metric] for cell in cells) / len(cells)
                assert abs(values[split][metric] - expected) <= 1e-12
    assert section.auc_gaps['dt'] == section.averages['dt']['train']['auc'] - section.averages['dt']['test']['auc']
    assert section.best_model in ('dt', 'rf')


def test_unbounded_trees_memorize_their_training_folds(small_report):
    _, report = small_report
    assert all(cell.train['auc'] == 1.0 for cell in report.sections[0].cells if cell.model == 'dt')


def test_experiment_is_deterministic_across_worker_counts(small_report):
    config, report = small_report
    assert run_experiment(config) == report
    assert run_experiment(config.model_copy(update={'workers': 2})) == report


def test_cell_jobs_carry_indices_not_window_tensors():
    config = _small_config()
    groups = scenario_dataset(_corpus(config), 'low', config.window, config.stride)
    datasets = {}
    jobs = list(_jobs_for(config, 'low', groups, {}, datasets))
    assert sorted(datasets) == ['001', '002']
    assert len(jobs) == 2 * 2 * 3
    for job in jobs:
        tensor, _ = datasets[job[0][0]]
        assert not any(isinstance(item, np.ndarray) and item.ndim == 3 for item in job)
        assert len(pickle.dumps(job)) < tensor.nbytes / 10


def test_all_scenarios_and_recurrent_models():
    config = _small_config(scenario='all', models=('gru', 'dt'), targets=('001',))
    report = run_experiment(config)
    assert [section.scenario for section in report.sections] == ['low', 'high', 'both']
    assert set(report.overall) == {'gru', 'dt'}
    both = report.sections[2].class_counts['001']
    low = report.sections[0].class_counts['001']
    assert both[0] > low[0]
    for cell in report.sections[0].cells:
        assert 0.0 <= cell.test['auc'] <= 1.0


def test_experiment_reads_a_corpus_directory(tmp_path):
    config = _small_config(models=('dt',))
    write_corpus(load_traces(config), tmp_path / 'corpus')
    loaded = run_experiment(config.model_copy(update={'corpus_dir': str(tmp_path / 'corpus')}))
    generated = run_experiment(config)
    assert loaded.sections == generated.sections


#-------------------------------------------------------------------------------

def test_json_report_round_trip(small_report, tmp_path):
    _, report = small_report
    path = emit_report(report, 'json', tmp_path / 'report.json')
    assert read_experiment_report(path) == report
    assert 'wall_clock' not in json.loads(path.read_text())
    timed = emit_report(report, 'json', tmp_path / 'timed.json', include_timing=True)
    assert 'wall_clock' in json.loads(timed.read_text())


def test_equal_seeds_give_byte_identical_json(small_report, tmp_path):
    config, report = small_report
    first = emit_report(report, 'json', tmp_path / 'first.json')
    second = emit_report(run_experiment(config), 'json', tmp_path / 'second.json')
    assert first.read_bytes() == second.read_bytes()


def test_csv_report_rows(small_report, tmp_path):
    config, report = small_report
    table = pd.read_csv(emit_report(report, 'csv', tmp_path / 'report.csv'), dtype={'user': str})
    assert list(table.columns) == list(REPORT_COLUMNS)
    users, models = len(config.targets), len(config.models)
    assert len(table) == users * models * 3 * 2 + models * 3 * 2
    assert (table['user'] == 'Average').sum() == models * 3 * 2


def test_empty_report_is_never_written(tmp_path):
    empty = ExperimentReport(sections=(), config={'scenario': 'low'})
    with pytest.raises(EmptyReportError):
        emit_report(empty, 'json', tmp_path / 'empty.json')
    with pytest.raises(EmptyReportError):
        emit_report(empty, 'csv', tmp_path / 'empty.csv')
    assert not (tmp_path / 'empty.json').exists()
    assert not (tmp_path / 'empty.csv').exists()


#-------------------------------------------------------------------------------

def test_cell_seeds_depend_on_every_coordinate():
    seeds = {cell_seed(1, scenario, user, model, fold) for scenario in ('low', 'high') for user in ('001', '002') for model in ('dt', 'rf') for fold in range(3)}
    assert len(seeds) == 24


@pytest.mark.parametrize('kind', ['gru', 'dt', 'rf'])
def test_test_rows_never_reach_the_fit(kind):
    config = _small_config()
    groups = scenario_dataset(_corpus(config), 'low', config.window, config.stride)
    labeled = label_windows(groups, '001')
    train, test = next(iter(stratified_folds(labeled, 3, seed=5)))
    tensor = labeled.tensor()
    labels = np.asarray(labeled.labels)

    model, stats, _, _ = fit_fold(kind, tensor, labels, train, test, 11, SMALL_RNN, SMALL_TREE)
    mutated = tensor.copy()
    mutated[test] = np.random.default_rng(0).normal(50.0, 10.0, mutated[test].shape)
    again, again_stats, _, _ = fit_fold(kind, mutated, labels, train, test, 11, SMALL_RNN, SMALL_TREE)

    assert model_digest(again) == model_digest(model)
    assert array_digest(again_stats.mean, again_stats.std) == array_digest(stats.mean, stats.std)


def test_model_files_dispatch_on_format(tmp_path):
    config = _small_config()
    groups = scenario_dataset(_corpus(config), 'low', config.window, config.stride)
    labeled = label_windows(groups, '002')
    tensor, labels = labeled.tensor(), np.asarray(labeled.labels)
    everything = np.arange(len(labeled))
    for kind in ('lstm', 'dt', 'rf'):
        model, _, _, _ = fit_fold(kind, tensor, labels, everything, everything[:5], 2, SMALL_RNN, SMALL_TREE)
        restored = load_model(save_model(model, tmp_path / f'{kind}.json'))
        assert type(restored) is type(model)
        assert model_digest(restored) == model_digest(model)

    write_json({'format': 'something.else', 'version': 1}, tmp_path / 'foreign.json')
    with pytest.raises(UnknownModelError):
        load_model(tmp_path / 'foreign.json')
    with pytest.raises(UnknownModelError):
        fit_model('svm', tensor, labels, None, 0, SMALL_RNN, SMALL_TREE)


#-------------------------------------------------------------------------------

@pytest.fixture(scope='module')
def corpus_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp('corpus')
    call_command('simulate', output=str(directory), seed=4, duration=15.0, users_per_game=3, shared_users=2, stdout=io.StringIO())
    return directory


def test_simulate_writes_the_layout(corpus_dir):
    names = sorted(path.name for path in corpus_dir.glob('*.csv'))
    assert names == ['001-pb-001.csv', '001-tf2-001.csv', '002-pb-001.csv', '002-tf2-001.csv', '003-tf2-001.csv', '004-pb-001.csv']


def test_extract_writes_frames_and_windows(corpus_dir, tmp_path):
    out = io.StringIO()
    call_command('extract', str(corpus_dir), output=str(tmp_path), target='001', stdout=out)
    frame = pd.read_csv(tmp_path / '001-pb-001.features.csv')
    assert len(frame) == 1500 - 4
    windows = pd.read_csv(tmp_path / 'windows_target_001.csv')
    assert windows.shape[1] == 40 * 9 + 1
    assert 'wrote 6 feature frames' in out.getvalue()


def test_train_eval_report_commands(corpus_dir, tmp_path):
    model_path = tmp_path / 'dt.json'
    call_command('train', str(corpus_dir), target='001', model='dt', output=str(model_path), max_depth=0, stdout=io.StringIO())
    assert load_model(model_path).kind == 'dt'

    report_path = tmp_path / 'eval.json'
    call_command('eval', str(corpus_dir), model=str(model_path), target='001', output=str(report_path), roc=str(tmp_path / 'roc.csv'), scenario='both', stdout=io.StringIO())
    payload = json.loads(report_path.read_text())
    assert payload['auc'] == 1.0
    assert payload['model_tag'] == 'dt'

    call_command('report', str(report_path), output=str(tmp_path / 'roc_again.csv'), stdout=io.StringIO())
    assert (tmp_path / 'roc_again.csv').read_text() == (tmp_path / 'roc.csv').read_text()


def test_auth_stream_emits_one_update_per_scored_window(corpus_dir, tmp_path):
    model_path = tmp_path / 'rf.json'
    call_command('train', str(corpus_dir), target='002', model='rf', trees=3, output=str(model_path), stdout=io.StringIO())

    events = read_event_file(corpus_dir / '002-pb-001.csv')
    lines = serialize_events(events)
    # an out-of-order row is rejected and the stream carries on
    lines.insert(200, serialize_events([events[10]], header=False)[0])
    out = io.StringIO()
    call_command('auth_stream', model=str(model_path), stdin=io.StringIO('\n'.join(lines) + '\n'), stdout=out)

    updates = [json.loads(line) for line in out.getvalue().splitlines()]
    assert len(updates) == window_count(len(events) - 4, 40, 10)
    assert [update['sequence'] for update in updates] == list(range(1, len(updates) + 1))
    assert {update['decision'] for update in updates} <= {'authentic', 'suspicious', 'intruder'}

    dashed = io.StringIO()
    call_command('auth-stream', model=str(model_path), stdin=io.StringIO('\n'.join(lines) + '\n'), stdout=dashed)
    assert dashed.getvalue() == out.getvalue()


def test_experiment_command_writes_both_formats(corpus_dir, tmp_path):
    config_path = write_json({'tree': {'n_trees': 4, 'max_depth': None}}, tmp_path / 'experiment.json')
    out = io.StringIO()
    call_command(
        'experiment', config=str(config_path), scenario='low', corpus_dir=str(corpus_dir), targets=['001', '002'],
        models=['dt', 'rf'], folds=3, output_dir=str(tmp_path / 'runs'), stdout=out,
    )
    report = read_experiment_report(tmp_path / 'runs' / 'experiment_low.json')
    assert report.config['tree']['n_trees'] == 4
    assert (tmp_path / 'runs' / 'experiment_low.csv').exists()
    assert 'best model' in out.getvalue()


def test_errors_map_to_exit_codes(corpus_dir, tmp_path):
    with pytest.raises(CommandError) as usage:
        call_command('train', str(corpus_dir), target='999', model='dt', output=str(tmp_path / 'm.json'), stdout=io.StringIO())
    assert usage.value.returncode == 2

    with pytest.raises(CommandError) as missing:
        call_command('extract', str(tmp_path / 'nowhere.csv'), output=str(tmp_path), stdout=io.StringIO())
    assert missing.value.returncode == 3

    with pytest.raises(CommandError) as invalid:
        call_command('experiment', scenario='low', folds=1, corpus_dir=str(corpus_dir), output_dir=str(tmp_path), stdout=io.StringIO())
    assert invalid.value.returncode == 2

    with pytest.raises(CommandError) as infeasible:
        call_command('experiment', scenario='low', targets=['001'], models=['dt'], folds=40, corpus_dir=str(corpus_dir), output_dir=str(tmp_path), stdout=io.StringIO())
    assert infeasible.value.returncode == 3


#-------------------------------------------------------------------------------

@pytest.mark.slow
def test_end_to_end_separability_and_determinism(tmp_path):
    config = ExperimentConfig(
        scenario='all',
        users_per_game=5,
        shared_users=5,
        targets=('001', '002', '003', '004', '005'),
        seed=2024,
        duration=60.0,
        rnn=RnnConfig(hidden_units=16, epochs=10, batch_size=32, learning_rate=0.01, class_weighting='balanced'),
        tree=TreeConfig(max_depth=None, n_trees=50),
        workers=2,
    )
    report = run_experiment(config)
    floors = {'gru': 0.90, 'rf': 0.90, 'lstm': 0.85, 'dt': 0.80}
    for section in report.sections:
        averages = section.averages
        for model, floor in floors.items():
            assert averages[model]['test']['auc'] >= floor, (section.scenario, model)
        assert averages['dt']['train']['auc'] >= 0.99
        assert averages['rf']['train']['auc'] >= 0.99
        by_user = {(cell.user, cell.model): cell.test['auc'] for cell in section.cells}
        assert sum(by_user[(user, 'dt')] < by_user[(user, 'rf')] for user in config.targets) >= 4

    serial = run_experiment(config.model_copy(update={'workers': 1}))
    first = emit_report(report, 'json', tmp_path / 'parallel.json')
    second = emit_report(serial, 'json', tmp_path / 'serial.json')
    assert first.read_bytes() == second.read_bytes()
