"""Time-series imputation with MICE over random forests, and a benchmark harness."""

from .core import Dataset, ReshapeSpec, SeriesMatrix, TimeSeries, reshape_to_matrix, reshape_to_series
from .forest import Forest, ForestParams, fit_forest, fit_tree
from .imputers import METHODS, ImputationConfig, ImputationResult, impute_series, mice_impute
from .missingness import MaskedSeries, MissingSpec, simulate_mcar

__version__ = "0.1.0"
