"""Dual Euclidean/hyperbolic graph anomaly detection."""

from ._janus import (
    AggregateMetrics,
    DivergenceError,
    Graph,
    InjectionSpec,
    SeedMetrics,
    TrainConfig,
    TrainedModel,
    average_precision,
    bounded,
    build_views,
    cumulative_gain,
    exp_origin,
    geodesic_dist,
    inject_anomalies,
    log_origin,
    minkowski_inner,
    product_distance,
    roc_auc,
    run_seeds,
    score,
    synth500,
    train,
)

__all__ = [
    "AggregateMetrics",
    "DivergenceError",
    "Graph",
    "InjectionSpec",
    "SeedMetrics",
    "TrainConfig",
    "TrainedModel",
    "average_precision",
    "bounded",
    "build_views",
    "cumulative_gain",
    "exp_origin",
    "geodesic_dist",
    "inject_anomalies",
    "log_origin",
    "minkowski_inner",
    "product_distance",
    "roc_auc",
    "run_seeds",
    "score",
    "synth500",
    "train",
]
