"""Study orchestration and the synthetic corpus."""

from .config import FAMILIES, RunConfig, load_config, parse_config
from .significance import significance_mark, welch_t_test
from .study import (
    FeatureBank,
    build_feature_bank,
    cluster_features,
    family_dataset,
    prepare_corpus,
    run_cell,
    run_cluster_study,
    run_feature_study,
    run_study,
)
from .synth import GENERATORS, generate_synthetic_corpus

__all__ = [
    "FAMILIES", "RunConfig", "load_config", "parse_config", "significance_mark", "welch_t_test",
    "FeatureBank", "build_feature_bank", "cluster_features", "family_dataset", "prepare_corpus", "run_cell",
    "run_cluster_study", "run_feature_study", "run_study", "GENERATORS", "generate_synthetic_corpus",
]
