import logging
from typing import Literal
from django.conf import settings
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from forest.helpers import TreeConfig
from rnn.helpers import RnnConfig
from synthgen.helpers import corpus_layout
from utils.helpers import read_json
from windows.helpers import DEFAULT_WINDOW

logger = logging.getLogger('mousetrust')

__all__ = ['ECHO_EXCLUDE', 'ExperimentConfig', 'MODEL_KINDS', 'SCENARIO_CHOICES', 'load_experiment_config', 'scenarios_for']


MODEL_KINDS = ('gru', 'lstm', 'dt', 'rf')
SCENARIO_CHOICES = ('low', 'high', 'both', 'all')

# Execution-only fields, left out of the config echo so equal seeds give equal reports
ECHO_EXCLUDE = {'workers', 'output_dir', 'include_timing'}


def scenarios_for(scenario):
    return ('low', 'high', 'both') if scenario == 'all' else (scenario,)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid', validate_default=True)

    scenario: Literal['low', 'high', 'both', 'all'] = 'both'
    users_per_game: int = Field(default=15, ge=2)
    shared_users: int = Field(default=11, ge=0)
    sessions_per_game: int = Field(default=1, ge=1)
    targets: tuple[str, ...] = ('001', '002', '003', '004', '005')
    models: tuple[Literal['gru', 'lstm', 'dt', 'rf'], ...] = MODEL_KINDS
    window: int = Field(default=DEFAULT_WINDOW, ge=1)
    stride: int = Field(default=DEFAULT_WINDOW, ge=1)
    folds: int = Field(default=5, ge=2)
    fold_mode: Literal['stratified', 'session'] = 'stratified'
    seed: int = Field(default_factory=lambda: settings.MOUSETRUST['SEED'], ge=0, lt=2**64)
    duration: float = Field(default=900.0, gt=0)
    interval: float = Field(default=0.01, gt=0)
    corpus_dir: str | None = None
    rnn: RnnConfig = RnnConfig()
    tree: TreeConfig = TreeConfig()
    workers: int = Field(default_factory=lambda: settings.MOUSETRUST['WORKERS'], ge=1)
    output_dir: str = Field(default_factory=lambda: settings.MOUSETRUST['OUTPUT_DIR'])
    include_timing: bool = False

    @field_validator('models', 'targets')
    @classmethod
    def check_not_empty(cls, value):
        if not value:
            raise ValueError('at least one entry is required')
        if len(set(value)) != len(value):
            raise ValueError(f'duplicate entries in {list(value)}')
        return value

    # Generated corpora have a known layout, so targets can be checked up front.
    # Loaded corpora are checked when their windows are labeled.
    @model_validator(mode='after')
    def check_targets(self):
        if self.shared_users > self.users_per_game:
            raise ValueError(f'shared_users {self.shared_users} exceeds users_per_game {self.users_per_game}')
        if self.corpus_dir is not None:
            return self
        layout = corpus_layout(self.users_per_game, self.shared_users)
        for scenario in scenarios_for(self.scenario):
            modes = ('low', 'high') if scenario == 'both' else (scenario,)
            players = {user for user, played in layout.items() if any(mode in played for mode in modes)}
            missing = [target for target in self.targets if target not in players]
            if missing:
                raise ValueError(f'targets {missing} are not among the {scenario} scenario users {sorted(players)}')
        return self

    def echo(self):
        return self.model_dump(mode='json', exclude=ECHO_EXCLUDE)


# File values first, then explicit overrides (flags that were actually given)
def load_experiment_config(path=None, **overrides):
    values = read_json(path) if path else {}
    values.update({key: value for key, value in overrides.items() if value is not None})
    config = ExperimentConfig(**values)
    logger.debug(f'running load_experiment_config() ... scenario: { config.scenario } targets: { config.targets } models: { config.models }')
    return config
