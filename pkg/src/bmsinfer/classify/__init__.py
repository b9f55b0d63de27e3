"""Supervised learners and the model-selection protocol."""

from .base import (
    ALGORITHMS,
    DEFAULT_GRIDS,
    DEFAULT_PARAMS,
    Dataset,
    ModelSpec,
    Standardizer,
    TrainedModel,
    load_model,
    model_from_dict,
    model_to_dict,
    predict,
    save_model,
    train,
)
from .selection import (
    CVResult,
    GridSearchResult,
    balance_downsample,
    cross_validate,
    expand_grid,
    grid_search,
    split,
    split_indices,
    stratified_folds,
)

__all__ = [
    "ALGORITHMS", "DEFAULT_GRIDS", "DEFAULT_PARAMS", "Dataset", "ModelSpec", "Standardizer", "TrainedModel",
    "load_model", "model_from_dict", "model_to_dict", "predict", "save_model", "train",
    "CVResult", "GridSearchResult", "balance_downsample", "cross_validate", "expand_grid", "grid_search",
    "split", "split_indices", "stratified_folds",
]
