"""MICE with random forests, plus classical baselines.

Every imputer takes a series with holes and returns a complete one; observed
entries are copied through untouched. The MICE-RF path for a univariate
series folds it by ``t_period`` first (see :mod:`tsimpute.core`), so each
column regression predicts one phase of the cycle from all the others.
Multivariate series are imputed on their raw ``T x d`` grid.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .core import (
    MISSING,
    PadPolicy,
    ReshapeSpec,
    SeriesMatrix,
    TimeSeries,
    reshape_to_matrix,
    reshape_to_series,
)
from .errors import AllMissing, DataError, MissingPeriod, SingleColumn, UnexpectedPeriod
from .forest import PROFILES, ForestParams, fit_forest
from .seeding import derive_seed

METHODS = ("mice_rf", "mean", "locf", "linear", "knn")


@dataclass(frozen=True)
class ImputationConfig:
    method: str = "mice_rf"
    t_period: int | None = None
    max_iter: int = 5
    forest: ForestParams = PROFILES["full"]
    knn_k: int = 5
    # the reference configuration fixes both max_iter and the random state at 5
    seed: int = 5
    pad_policy: PadPolicy = PadPolicy.STRICT
    # >1 averages independent chains; 1 is a single deterministic chain
    n_chains: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; valid methods: {', '.join(METHODS)}")
        if self.max_iter < 1 or self.knn_k < 1 or self.n_chains < 1:
            raise ValueError("max_iter, knn_k and n_chains must be positive")
        if self.t_period is not None and self.t_period < 1:
            raise ValueError("t_period must be positive")


@dataclass(frozen=True, eq=False)
class ImputationResult:
    imputed: TimeSeries
    # one dict per MICE round: column -> mean absolute update of its holes
    method_trace: list[dict[int, float]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# MICE on a matrix
# ---------------------------------------------------------------------------


def initial_fill(matrix: SeriesMatrix) -> SeriesMatrix:
    """Fill holes with their column's observed mean (global mean as fallback)."""
    obs = matrix.observed
    if not obs.any():
        raise AllMissing("no observed cell to initialise from")
    cells = matrix.cells.copy()
    global_mean = matrix.cells[obs].mean()
    miss = matrix.missing
    for c in range(cells.shape[1]):
        col_obs = obs[:, c]
        fill = matrix.cells[col_obs, c].mean() if col_obs.any() else global_mean
        cells[miss[:, c], c] = fill
    return matrix.with_cells(cells)


def _visit_order(miss: np.ndarray) -> list[int]:
    counts = miss.sum(axis=0)
    cols = [c for c in range(miss.shape[1]) if counts[c] > 0]
    return sorted(cols, key=lambda c: (counts[c], c))


def _mice_chain(matrix: SeriesMatrix, max_iter: int, forest: ForestParams, seed: int):
    cells = initial_fill(matrix).cells
    n_cols = cells.shape[1]
    # rows touching padding take no part in the regressions
    usable = ~matrix.padding.any(axis=1)
    obs = matrix.observed & usable[:, None]
    miss = matrix.missing & usable[:, None]
    trace = []
    for it in range(max_iter):
        changes = {}
        for c in _visit_order(miss):
            train = obs[:, c]
            if not train.any():
                continue
            others = [j for j in range(n_cols) if j != c]
            params = dataclasses.replace(forest, seed=derive_seed(seed, it, c))
            model = fit_forest(cells[train][:, others], cells[train, c], params)
            pred = model.predict(cells[miss[:, c]][:, others])
            changes[c] = float(np.mean(np.abs(pred - cells[miss[:, c], c])))
            cells[miss[:, c], c] = pred
        trace.append(changes)
    return cells, trace


def _mice(matrix: SeriesMatrix, config: ImputationConfig):
    if matrix.cells.shape[1] < 2:
        raise SingleColumn("chained equations need at least two columns")
    if not matrix.observed.any():
        raise AllMissing("no observed cell in the matrix")
    runs = []
    for chain in range(config.n_chains):
        seed = config.seed if chain == 0 else derive_seed(config.seed, "chain", chain)
        runs.append(_mice_chain(matrix, config.max_iter, config.forest, seed))
    if len(runs) == 1:
        cells, trace = runs[0]
    else:
        cells = np.mean([r[0] for r in runs], axis=0)
        trace = runs[0][1]
    cells = np.where(matrix.observed, matrix.cells, cells)
    return matrix.with_cells(cells), trace


def mice_impute(matrix: SeriesMatrix, config: ImputationConfig) -> SeriesMatrix:
    """Run ``config.max_iter`` rounds of chained random-forest regressions.

    Each round visits the columns with holes in ascending order of hole count
    (ties by column index). A visit fits a forest on the rows where the column
    is observed, using every other column at its current value as features,
    and overwrites the column's holes with the forest's predictions. The forest
    for round ``i`` and column ``c`` is seeded from ``(config.seed, i, c)``.
    """
    return _mice(matrix, config)[0]


# ---------------------------------------------------------------------------
# KNN on a matrix
# ---------------------------------------------------------------------------


def knn_fill(matrix: SeriesMatrix, k: int) -> SeriesMatrix:
    """Fill each hole with the mean of its ``k`` nearest rows in that column.

    Distances are Euclidean over co-observed coordinates, scaled up by
    ``n_columns / n_co_observed``. Rows sharing no observed coordinate are
    never neighbours; distance ties go to the lower row index. A hole with no
    usable neighbour takes its column's observed mean.
    """
    obs = matrix.observed
    if not obs.any():
        raise AllMissing("no observed cell in the matrix")
    vals = np.where(obs, matrix.cells, 0.0)
    cells = matrix.cells.copy()
    n_rows, n_cols = cells.shape
    global_mean = matrix.cells[obs].mean()
    col_mean = np.array([
        matrix.cells[obs[:, c], c].mean() if obs[:, c].any() else global_mean
        for c in range(n_cols)
    ])
    for i in np.flatnonzero(matrix.missing.any(axis=1)):
        co = obs & obs[i]
        n_co = co.sum(axis=1)
        sq = (((vals - vals[i]) ** 2) * co).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            dist = np.sqrt(sq * n_cols / n_co)
        dist[n_co == 0] = np.inf
        dist[i] = np.inf
        order = np.argsort(dist, kind="stable")
        for c in np.flatnonzero(matrix.missing[i]):
            donors = [j for j in order if np.isfinite(dist[j]) and obs[j, c]][:k]
            cells[i, c] = matrix.cells[donors, c].mean() if donors else col_mean[c]
    return matrix.with_cells(cells)


# ---------------------------------------------------------------------------
# per-channel baselines
# ---------------------------------------------------------------------------


def _channels(series: TimeSeries, fill_channel) -> ImputationResult:
    out = series.values.copy()
    for j in range(series.n_channels):
        obs = series.observed[:, j]
        if not obs.any():
            raise AllMissing(f"series {series.id!r}: channel {j} has no observed value")
        if not obs.all():
            out[:, j] = fill_channel(series.values[:, j], obs)
    return ImputationResult(series.replace(out, np.ones_like(out, dtype=bool)))


def _mean_channel(v, obs):
    return np.where(obs, v, v[obs].mean())


def _locf_channel(v, obs):
    idx = np.where(obs, np.arange(v.size), -1)
    np.maximum.accumulate(idx, out=idx)
    idx[idx < 0] = np.flatnonzero(obs)[0]
    return v[idx]


def _linear_channel(v, obs):
    t = np.arange(v.size)
    return np.where(obs, v, np.interp(t, t[obs], v[obs]))


def impute_mean(series: TimeSeries) -> ImputationResult:
    return _channels(series, _mean_channel)


def impute_locf(series: TimeSeries) -> ImputationResult:
    """Carry the last observation forward; leading holes are back-filled."""
    return _channels(series, _locf_channel)


def impute_linear(series: TimeSeries) -> ImputationResult:
    """Linear interpolation by epoch index, constant beyond the end points."""
    return _channels(series, _linear_channel)


# ---------------------------------------------------------------------------
# series-level dispatch
# ---------------------------------------------------------------------------


def _matrix_for(series: TimeSeries, config: ImputationConfig) -> SeriesMatrix:
    if series.n_channels == 1:
        if config.t_period is None:
            raise MissingPeriod(
                f"series {series.id!r} is univariate; {config.method} needs t_period"
            )
        spec = ReshapeSpec(config.t_period, config.pad_policy)
        return reshape_to_matrix(series.values[:, 0], series.observed[:, 0], spec)
    if config.method == "mice_rf" and config.t_period is not None:
        raise UnexpectedPeriod(
            f"series {series.id!r} has {series.n_channels} channels; multivariate series "
            "are imputed on their raw grid without reshaping, so t_period must be unset"
        )
    return SeriesMatrix.from_grid(series.values, series.observed)


def _unfold(series: TimeSeries, matrix: SeriesMatrix, fix_pad_row: bool = False) -> np.ndarray:
    if series.n_channels > 1:
        return matrix.cells.copy()
    values, _ = reshape_to_series(matrix)
    pad_rows = matrix.padding.any(axis=1)
    if fix_pad_row and pad_rows.any():
        # holes in the padded row never went through the regressions
        stale = np.zeros(matrix.cells.shape, dtype=bool)
        stale[pad_rows] = matrix.cell_mask[pad_rows] == MISSING
        stale = stale.reshape(-1)[: matrix.original_len]
        if stale.any():
            values = _linear_channel(values, ~stale)
    return values[:, None]


def impute_knn(series: TimeSeries, config: ImputationConfig) -> ImputationResult:
    matrix = _matrix_for(series, config)
    filled = knn_fill(matrix, config.knn_k)
    return _finish(series, _unfold(series, filled), [])


def _finish(series: TimeSeries, values, trace) -> ImputationResult:
    values = np.where(series.observed, series.values, values)
    if not np.all(np.isfinite(values)):
        raise DataError(f"series {series.id!r}: imputation left non-finite values")
    return ImputationResult(series.replace(values, np.ones_like(values, dtype=bool)), trace)


def impute_series(series: TimeSeries, config: ImputationConfig) -> ImputationResult:
    """Impute one series with the method named in ``config``."""
    if config.method in ("mean", "locf", "linear"):
        return {"mean": impute_mean, "locf": impute_locf, "linear": impute_linear}[
            config.method
        ](series)
    if config.method == "knn":
        return impute_knn(series, config)
    matrix = _matrix_for(series, config)
    if series.is_complete:
        return ImputationResult(series)
    filled, trace = _mice(matrix, config)
    return _finish(series, _unfold(series, filled, fix_pad_row=True), trace)
