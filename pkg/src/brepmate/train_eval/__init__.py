from .baselines import (
    example_geometry,
    fit_origin_type_table,
    label_distribution_baseline,
    label_distribution_ranking,
    noisy_oracle_curve,
    origin_type_baseline,
    random_baseline,
    snap_to_selection_baseline,
    write_noise_curve_csv,
)
from .metrics import RankingResult, cohen_kappa, hit_at_k, mean_hit_over_range, ndcg_star, rank_candidates
from .train import (
    PreparedExample,
    TrainResult,
    TrainRunConfig,
    evaluate,
    location_loss,
    location_rankings,
    prepare_examples,
    train,
    type_loss,
    type_probabilities,
    type_rankings,
    validation_metric,
)

__all__ = [
    "example_geometry", "fit_origin_type_table", "label_distribution_baseline",
    "label_distribution_ranking", "noisy_oracle_curve", "origin_type_baseline",
    "random_baseline", "snap_to_selection_baseline", "write_noise_curve_csv",
    "RankingResult", "cohen_kappa", "hit_at_k", "mean_hit_over_range", "ndcg_star",
    "rank_candidates",
    "PreparedExample", "TrainResult", "TrainRunConfig", "evaluate", "location_loss",
    "location_rankings", "prepare_examples", "train", "type_loss", "type_probabilities",
    "type_rankings", "validation_metric",
]
