from typing import Literal
from pydantic import BaseModel, ConfigDict, Field

__all__ = ['TreeConfig']


# CART and bagging hyperparameters. max_depth None grows until purity or min_samples_split stops it.
# max_features 'auto' means every feature for a single tree and floor(sqrt(d)) for forest members.
class TreeConfig(BaseModel):
    model_config = ConfigDict(frozen=True, validate_default=True)

    max_depth: int | None = Field(default=12, ge=1)
    min_samples_split: int = Field(default=2, ge=2)
    criterion: Literal['gini'] = 'gini'
    max_features: Literal['auto', 'all', 'sqrt'] = 'auto'
    class_weighting: Literal['none', 'balanced'] = 'none'
    n_trees: int = Field(default=100, ge=1)
    bootstrap: bool = True
    n_jobs: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
