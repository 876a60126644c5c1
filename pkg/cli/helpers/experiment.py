from dataclasses import dataclass, field
import logging
from multiprocessing import Pool
import time
import numpy as np
from features.helpers import build_frame, fit_normalizer, normalize_rows
from metrics.helpers import evaluate_scores
from synthgen.helpers import build_corpus, load_corpus, scenario_traces
from utils.helpers import derive_seed
from windows.helpers import label_windows, make_user_windows, session_holdout_folds, stratified_folds
from .config import scenarios_for
from .models import fit_model

logger = logging.getLogger('mousetrust')

__all__ = ['CellResult', 'ExperimentReport', 'METRICS', 'SPLITS', 'ScenarioReport', 'cell_seed', 'fit_fold', 'load_traces', 'run_experiment', 'scenario_dataset']


METRICS = ('auc', 'bal_acc', 'f1')
SPLITS = ('train', 'test')
REPORT_FORMAT = 'mousetrust.experiment'
FORMAT_VERSION = 1


# Mean train/test metrics of one (target user, model) pair over its folds
@dataclass(frozen=True)
class CellResult:
    user: str
    model: str
    train: dict
    test: dict
    folds: int

    def to_dict(self):
        return {'user': self.user, 'model': self.model, 'train': dict(self.train), 'test': dict(self.test), 'folds': self.folds}

    @classmethod
    def from_dict(cls, payload):
        return cls(user=payload['user'], model=payload['model'], train=dict(payload['train']), test=dict(payload['test']), folds=int(payload['folds']))


def _mean_metrics(entries):
    return {metric: float(np.mean([entry[metric] for entry in entries])) for metric in METRICS}


# One scenario's table: a row per target user and model, the Average row, the train-minus-test AUC gap per model
# and the model with the best mean test AUC (earliest in the configured model order on ties)
@dataclass(frozen=True)
class ScenarioReport:
    scenario: str
    cells: tuple
    class_counts: dict

    @property
    def models(self):
        seen = []
        for cell in self.cells:
            if cell.model not in seen:
                seen.append(cell.model)
        return tuple(seen)

    @property
    def users(self):
        return tuple(sorted({cell.user for cell in self.cells}))

    @property
    def averages(self):
        averages = {}
        for model in self.models:
            cells = [cell for cell in self.cells if cell.model == model]
            averages[model] = {split: _mean_metrics([getattr(cell, split) for cell in cells]) for split in SPLITS}
        return averages

    @property
    def auc_gaps(self):
        return {model: values['train']['auc'] - values['test']['auc'] for model, values in self.averages.items()}

    @property
    def best_model(self):
        averages = self.averages
        return max(self.models, key=lambda model: averages[model]['test']['auc']) if averages else None

    def to_dict(self):
        return {
            'scenario': self.scenario,
            'cells': [cell.to_dict() for cell in self.cells],
            'averages': self.averages,
            'auc_gaps': self.auc_gaps,
            'best_model': self.best_model,
            'class_counts': {user: {str(label): count for label, count in counts.items()} for user, counts in self.class_counts.items()},
        }

    @classmethod
    def from_dict(cls, payload):
        return cls(
            scenario=payload['scenario'],
            cells=tuple(CellResult.from_dict(cell) for cell in payload['cells']),
            class_counts={user: {int(label): int(count) for label, count in counts.items()} for user, counts in payload['class_counts'].items()},
        )


@dataclass(frozen=True)
class ExperimentReport:
    sections: tuple
    config: dict
    wall_clock: float | None = field(default=None, compare=False)

    @property
    def scenario(self):
        return self.config['scenario']

    # Per-model averages across every cell of every scenario section
    @property
    def overall(self):
        overall = {}
        for model in self.sections[0].models if self.sections else ():
            cells = [cell for section in self.sections for cell in section.cells if cell.model == model]
            overall[model] = {split: _mean_metrics([getattr(cell, split) for cell in cells]) for split in SPLITS}
        return overall

    @property
    def best_model(self):
        overall = self.overall
        return max(overall, key=lambda model: overall[model]['test']['auc']) if overall else None

    def to_dict(self, include_timing=False):
        payload = {
            'format': REPORT_FORMAT,
            'version': FORMAT_VERSION,
            'scenario': self.scenario,
            'config': self.config,
            'sections': [section.to_dict() for section in self.sections],
            'overall': self.overall,
            'best_model': self.best_model,
        }
        if include_timing and self.wall_clock is not None:
            payload['wall_clock'] = self.wall_clock
        return payload

    @classmethod
    def from_dict(cls, payload):
        return cls(
            sections=tuple(ScenarioReport.from_dict(section) for section in payload['sections']),
            config=payload['config'],
            wall_clock=payload.get('wall_clock'),
        )


#-------------------------------------------------------------------------------

def cell_seed(master_seed, scenario, user, model, fold):
    return derive_seed(master_seed, 'cell', scenario, user, model, fold)


# {user_id: {mode: [Trace, ...]}} from the corpus directory, or generated from the master seed
def load_traces(config):
    if config.corpus_dir is not None:
        return load_corpus(config.corpus_dir)
    return build_corpus(
        seed=config.seed,
        duration=config.duration,
        interval=config.interval,
        users_per_game=config.users_per_game,
        shared_users=config.shared_users,
        sessions_per_game=config.sessions_per_game,
    )


# Windows of every user in the scenario, grouped per user (never spanning sessions)
def scenario_dataset(corpus, scenario, window, stride):
    traces = scenario_traces(corpus, scenario)
    frames = {user: [build_frame(trace) for trace in user_traces] for user, user_traces in traces.items()}
    return make_user_windows(frames, window, stride)


# Fits normalization and the model on the training rows only, then scores both splits.
# Nothing computed here reads tensor[test] before the model exists.
def fit_fold(kind, tensor, labels, train, test, seed, rnn_config, tree_config):
    norm_stats = fit_normalizer(tensor[train])
    model = fit_model(kind, normalize_rows(tensor[train], norm_stats), labels[train], norm_stats, seed, rnn_config, tree_config)
    train_scores = model.score_windows(normalize_rows(tensor[train], norm_stats))
    test_scores = model.score_windows(normalize_rows(tensor[test], norm_stats))
    return model, norm_stats, train_scores, test_scores


# Per-target (tensor, labels) of the scenario in flight. Workers receive it once through the
# Pool initializer, so jobs carry only fold indices and seeds.
_DATASETS = {}


def _share_datasets(datasets):
    _DATASETS.clear()
    _DATASETS.update(datasets)


def _run_job(job):
    key, kind, train, test, seed, rnn_config, tree_config = job
    tensor, labels = _DATASETS[key[0]]
    _, _, train_scores, test_scores = fit_fold(kind, tensor, labels, train, test, seed, rnn_config, tree_config)
    train_report = evaluate_scores(train_scores, labels[train])
    test_report = evaluate_scores(test_scores, labels[test])
    return key, {
        'train': {'auc': train_report.auc, 'bal_acc': train_report.bal_acc, 'f1': train_report.f1},
        'test': {'auc': test_report.auc, 'bal_acc': test_report.bal_acc, 'f1': test_report.f1},
    }


def _jobs_for(config, scenario, groups, class_counts, datasets):
    # Workers fan out over cells, so forest members are fit in-process
    tree_config = config.tree.model_copy(update={'n_jobs': 1})
    for target in config.targets:
        labeled = label_windows(groups, target)
        class_counts[target] = labeled.class_counts()
        fold_seed = derive_seed(config.seed, 'folds', scenario, target)
        if config.fold_mode == 'session':
            plan = session_holdout_folds(labeled, config.folds, fold_seed)
        else:
            plan = stratified_folds(labeled, config.folds, fold_seed)

        datasets[target] = (labeled.tensor(), np.asarray(labeled.labels))
        for kind in config.models:
            for fold, (train, test) in enumerate(plan):
                seed = cell_seed(config.seed, scenario, target, kind, fold)
                yield ((target, kind, fold), kind, train, test, seed, config.rnn, tree_config)


def _run_scenario(config, corpus, scenario):
    groups = scenario_dataset(corpus, scenario, config.window, config.stride)
    class_counts = {}
    datasets = {}
    jobs = list(_jobs_for(config, scenario, groups, class_counts, datasets))
    logger.info(f'running _run_scenario() ... scenario: { scenario } users: { len(groups) } jobs: { len(jobs) }')

    if config.workers > 1:
        pool = Pool(processes=config.workers, initializer=_share_datasets, initargs=(datasets,))
        try:
            results = dict(pool.map(_run_job, jobs))
        finally:
            pool.close()
            pool.join()
    else:
        _share_datasets(datasets)
        try:
            results = dict(map(_run_job, jobs))
        finally:
            _DATASETS.clear()

    cells = []
    for target in config.targets:
        for kind in config.models:
            folds = sorted(fold for user, model, fold in results if user == target and model == kind)
            entries = [results[(target, kind, fold)] for fold in folds]
            cells.append(CellResult(
                user=target,
                model=kind,
                train=_mean_metrics([entry['train'] for entry in entries]),
                test=_mean_metrics([entry['test'] for entry in entries]),
                folds=len(folds),
            ))
    return ScenarioReport(scenario=scenario, cells=tuple(cells), class_counts=class_counts)


# Full protocol: per scenario, per target user, per model, k folds. Every random draw is seeded from
# (master seed, scenario, user, model, fold), so the worker count never changes the report.
def run_experiment(config, corpus=None):
    started = time.perf_counter()
    corpus = load_traces(config) if corpus is None else corpus
    sections = tuple(_run_scenario(config, corpus, scenario) for scenario in scenarios_for(config.scenario))

    report = ExperimentReport(sections=sections, config=config.echo(), wall_clock=time.perf_counter() - started)
    logger.info(f'running run_experiment() ... scenario: { config.scenario } best model: { report.best_model } wall clock: { report.wall_clock:.1f}s')
    return report
