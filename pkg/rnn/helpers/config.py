from enum import Enum
from pydantic import BaseModel, ConfigDict, Field

__all__ = ['CellKind', 'ClassWeighting', 'RnnConfig']


class CellKind(str, Enum):
    GRU = 'gru'
    LSTM = 'lstm'


class ClassWeighting(str, Enum):
    NONE = 'none'
    BALANCED = 'balanced'


# Hyperparameters for one recurrent classifier. One recurrent layer, sigmoid read-out on the final hidden state.
class RnnConfig(BaseModel):
    model_config = ConfigDict(frozen=True, use_enum_values=True, validate_default=True)

    cell: CellKind = CellKind.GRU
    input_width: int = Field(default=9, ge=1)
    hidden_units: int = Field(default=32, ge=1)
    layers: int = Field(default=1, ge=1, le=1)
    epochs: int = Field(default=30, ge=0)
    batch_size: int = Field(default=32, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    epsilon: float = Field(default=1e-8, gt=0)
    clip_norm: float = Field(default=5.0, gt=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    class_weighting: ClassWeighting = ClassWeighting.NONE
