"""Daily orbit statistics for UTXO-style transaction streams.

The pipeline in one breath: parse a transaction stream, cut it into
daily windows, enumerate the two-step spending motifs inside each
window, grade every motif by its clamped cardinalities, assign each
touched address one of 48 structural positions (orbits), and emit one
count vector per address per day.  Downstream helpers tabulate
occupancy patterns, cluster addresses by co-spending, and export
labelled datasets for classifiers.
"""

from .chainlets import ChainletOccurrence, clamp3, enumerate_2chainlets, enumerate_all, enumerate_dormant
from .clustering import ClusterResult, cluster, expand_labels
from .errors import ChainletError, DataError, UsageError
from .features import (
    FeatureRow,
    compute_income,
    make_feature_rows,
    read_dataset_csv,
    read_labels_csv,
    undersample,
    write_dataset_csv,
    write_labels_csv,
)
from .graph import (
    DEFAULT_WINDOW_OFFSET_MIN,
    DailySnapshot,
    TransactionRecord,
    build_snapshot,
    day_of_timestamp,
    partition_days,
    window_bounds,
)
from .ingest import filter_min_total, parse_lines, read_records, write_records
from .orbits import (
    MIXING_ORBITS,
    ORBIT_COUNT,
    OrbitVector,
    accumulate,
    assign_orbits,
    counts_to_vectors,
    extract_day,
    read_vectors_csv,
    role_partition,
    write_vectors_csv,
)
from .patterns import parse_query, pattern_table, run_query
from .synth import GenConfig, generate

__version__ = "0.1.0"

__all__ = [
    "ChainletError",
    "ChainletOccurrence",
    "ClusterResult",
    "DEFAULT_WINDOW_OFFSET_MIN",
    "DailySnapshot",
    "DataError",
    "FeatureRow",
    "GenConfig",
    "MIXING_ORBITS",
    "ORBIT_COUNT",
    "OrbitVector",
    "TransactionRecord",
    "UsageError",
    "accumulate",
    "assign_orbits",
    "build_snapshot",
    "clamp3",
    "cluster",
    "compute_income",
    "counts_to_vectors",
    "day_of_timestamp",
    "enumerate_2chainlets",
    "enumerate_all",
    "enumerate_dormant",
    "expand_labels",
    "extract_day",
    "filter_min_total",
    "generate",
    "make_feature_rows",
    "parse_lines",
    "parse_query",
    "partition_days",
    "pattern_table",
    "read_dataset_csv",
    "read_labels_csv",
    "read_records",
    "read_vectors_csv",
    "role_partition",
    "run_query",
    "undersample",
    "window_bounds",
    "write_dataset_csv",
    "write_labels_csv",
    "write_records",
    "write_vectors_csv",
]
