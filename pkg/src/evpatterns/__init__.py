"""Temporal charging-pattern mining for EV charging stations.

The pipeline: ingest transaction logs, pool co-located stations, build
per-pool 24x24 arrival-hour x duration charging matrices, then identify
patterns two ways — rule-based band thresholding and complete-linkage
hierarchical clustering under a parameterized matrix dissimilarity.
"""

__version__ = "0.1.0"

from .dissim import DissimParams, DistanceMatrix, dissimilarity, distance_matrix, sensitivity_curve
from .errors import ConfigError, DataError, SchemaError
from .hac import (
    ClusterAssignment,
    Dendrogram,
    agglomerate,
    balance_metrics,
    cluster_representative_mean,
    cut,
    medoid,
    sweep,
)
from .ingest import PeriodFilter, Transaction, filter_period, parse_transactions
from .matrix import ChargingMatrix, aggregate_mean, build_matrix, value_frequency_report
from .preprocess import (
    StationPool,
    StationSite,
    discard_long_sessions,
    filter_min_transactions,
    haversine_distance,
    pool_stations,
    prepare_pools,
)
from .rules import (
    DEFAULT_BAND_SCHEME,
    BandScheme,
    PatternSignature,
    RuleConfig,
    band_mass,
    group_by_signature,
    signature,
    top_k_groups,
)
from .synth import Archetype, adjusted_rand_index, generate_fleet, generate_station

__all__ = [
    "__version__",
    "ConfigError",
    "DataError",
    "SchemaError",
    "Transaction",
    "PeriodFilter",
    "parse_transactions",
    "filter_period",
    "StationSite",
    "StationPool",
    "haversine_distance",
    "pool_stations",
    "filter_min_transactions",
    "discard_long_sessions",
    "prepare_pools",
    "ChargingMatrix",
    "build_matrix",
    "aggregate_mean",
    "value_frequency_report",
    "DissimParams",
    "DistanceMatrix",
    "dissimilarity",
    "distance_matrix",
    "sensitivity_curve",
    "BandScheme",
    "DEFAULT_BAND_SCHEME",
    "RuleConfig",
    "PatternSignature",
    "band_mass",
    "signature",
    "group_by_signature",
    "top_k_groups",
    "Dendrogram",
    "ClusterAssignment",
    "agglomerate",
    "cut",
    "medoid",
    "cluster_representative_mean",
    "sweep",
    "balance_metrics",
    "Archetype",
    "generate_station",
    "generate_fleet",
    "adjusted_rand_index",
]
