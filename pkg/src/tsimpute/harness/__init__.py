from .experiment import ExperimentConfig, ExperimentRecord, run_experiment
from .io import load_dataset, read_series, write_dataset, write_series
from .report import emit_plot_data, emit_results, mae_curve, read_results, summary_markdown
from .synthetic import noisy_sine, seasonal_dataset

__all__ = [
    "ExperimentConfig",
    "ExperimentRecord",
    "run_experiment",
    "load_dataset",
    "mae_curve",
    "read_series",
    "write_dataset",
    "write_series",
    "emit_plot_data",
    "emit_results",
    "read_results",
    "summary_markdown",
    "noisy_sine",
    "seasonal_dataset",
]
