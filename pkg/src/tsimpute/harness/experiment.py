"""Seeded sweeps over (seed, missing rate, method)."""
from __future__ import annotations

import dataclasses
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..classifiers import CLASSIFIERS, cross_validate, feature_matrix
from ..core import Dataset
from ..errors import DataError, MulticlassUnsupported, PreexistingMissing, UnexpectedPeriod
from ..forest import PROFILES
from ..imputers import METHODS, ImputationConfig, impute_series
from ..missingness import MAX_RATE, MissingSpec, simulate_mcar
from ..seeding import derive_seed
from .io import load_dataset

log = logging.getLogger(__name__)

DEFAULT_RATES = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)


@dataclass
class ExperimentConfig:
    manifest: Optional[str] = None
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    missing_rates: list[float] = field(default_factory=lambda: list(DEFAULT_RATES))
    t_period: Optional[int] = None
    classifier: str = "logreg"
    folds: int = 5
    seeds: list[int] = field(default_factory=lambda: [0])
    profile: str = "desk"
    trees: Optional[int] = None
    max_iter: int = 5
    knn_k: int = 5
    out: str = "results"
    # "pooled": one MAE over all masked slots; "per_series": mean of series MAEs
    mae_pooling: str = "pooled"
    # "masked": artificially hidden slots only; "series": every slot of the series
    mae_scope: str = "masked"
    # "stratified": seeded k-fold; "loo": leave one series (subject) out
    cv_scheme: str = "stratified"
    # wall times make results.csv run-dependent; switch off for byte-identical output
    record_timing: bool = True
    workers: int = 1

    def __post_init__(self):
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ValueError(f"unknown method(s) {bad}; valid methods: {', '.join(METHODS)}")
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"unknown classifier {self.classifier!r}; valid: {', '.join(CLASSIFIERS)}")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}; valid: {', '.join(PROFILES)}")
        rates = [float(r) for r in self.missing_rates]
        if not rates or any(not 0 < r <= MAX_RATE for r in rates):
            raise ValueError(f"missing rates must lie in (0, {MAX_RATE}]")
        if any(b <= a for a, b in zip(rates, rates[1:])):
            raise ValueError("missing rates must be strictly increasing")
        self.missing_rates = rates
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.mae_pooling not in ("pooled", "per_series"):
            raise ValueError("mae_pooling must be 'pooled' or 'per_series'")
        if self.mae_scope not in ("masked", "series"):
            raise ValueError("mae_scope must be 'masked' or 'series'")
        if self.cv_scheme not in ("stratified", "loo"):
            raise ValueError("cv_scheme must be 'stratified' or 'loo'")
        if self.folds < 2:
            raise ValueError("folds must be at least 2")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def forest_params(self):
        params = PROFILES[self.profile]
        if self.trees is not None:
            params = dataclasses.replace(params, n_trees=self.trees)
        return params


@dataclass
class ExperimentRecord:
    dataset: str
    method: str
    classifier: str
    missing_rate: float
    seed: int
    t_period: Optional[int]
    mae: Optional[float]
    f1: float
    auc: float
    mcc: float
    wall_time_seconds: Optional[float] = None


def _check(config: ExperimentConfig, dataset: Dataset) -> None:
    for s in dataset.series:
        if not s.is_complete:
            raise PreexistingMissing(
                f"series {s.id!r} already has missing values; simulation runs need complete series"
            )
    multichannel = dataset.series[0].n_channels > 1
    if multichannel and "mice_rf" in config.methods and config.t_period is not None:
        raise UnexpectedPeriod(
            "dataset is multivariate: MICE-RF imputes its raw grid without reshaping, "
            "so --t-period must not be given"
        )
    if config.classifier == "adaboost" and np.unique(dataset.labels).size > 2:
        raise MulticlassUnsupported("adaboost is binary-only; use knn for multiclass datasets")


def _classify(config: ExperimentConfig, series, seed: int):
    X, y = feature_matrix(series)
    return cross_validate(X, y, config.classifier, folds=config.folds,
                          seed=derive_seed(seed, "folds"), scheme=config.cv_scheme)


def _sweep_item(config: ExperimentConfig, dataset: Dataset, seed: int, rate: float, method: str):
    t0 = time.perf_counter()
    forest = config.forest_params()
    abs_err = 0.0
    n_hidden = 0
    per_series = []
    imputed = []
    for s in dataset.series:
        try:
            masked = simulate_mcar(s, MissingSpec(rate, derive_seed(seed, s.id, rate)))
            cfg = ImputationConfig(
                method=method,
                t_period=config.t_period if s.n_channels == 1 else None,
                max_iter=config.max_iter,
                forest=forest,
                knn_k=config.knn_k,
                seed=derive_seed(seed, s.id, rate, method),
            )
            out = impute_series(masked.corrupted, cfg).imputed
        except DataError as e:
            raise DataError(f"series {s.id!r}, rate {rate}, method {method}: {e}") from e
        diff = np.abs(out.values - s.values)
        err = diff[masked.sim_mask] if config.mae_scope == "masked" else diff.ravel()
        abs_err += float(err.sum())
        n_hidden += err.size
        if err.size:
            per_series.append(float(err.mean()))
        imputed.append(out)
    if config.mae_pooling == "pooled":
        mae = abs_err / n_hidden if n_hidden else None
    else:
        mae = float(np.mean(per_series)) if per_series else None
    try:
        bundle = _classify(config, imputed, seed)
    except DataError as e:
        raise DataError(f"classification at rate {rate}, method {method}: {e}") from e
    wall = time.perf_counter() - t0 if config.record_timing else None
    return ExperimentRecord(dataset.name, method, config.classifier, rate, seed,
                            config.t_period, mae, bundle.f1, bundle.auc, bundle.mcc, wall)


def _sweep_star(args):
    return _sweep_item(*args)


def run_experiment(config: ExperimentConfig, dataset: Dataset | None = None) -> list[ExperimentRecord]:
    """Baseline record on the untouched data, then one record per (seed, rate, method)."""
    if dataset is None:
        if config.manifest is None:
            raise ValueError("no dataset: give a manifest path")
        dataset = load_dataset(config.manifest)
    _check(config, dataset)

    t0 = time.perf_counter()
    base = _classify(config, dataset.series, config.seeds[0])
    records = [ExperimentRecord(
        dataset.name, "none", config.classifier, 0.0, config.seeds[0], config.t_period,
        None, base.f1, base.auc, base.mcc,
        time.perf_counter() - t0 if config.record_timing else None,
    )]

    items = [(config, dataset, seed, rate, method)
             for seed in config.seeds for rate in config.missing_rates for method in config.methods]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            sweep = list(pool.map(_sweep_star, items))
    else:
        sweep = []
        for it in items:
            log.info("seed=%s rate=%s method=%s", it[2], it[3], it[4])
            sweep.append(_sweep_item(*it))
    # pool.map already preserves order; the sort documents the contract
    order = {m: i for i, m in enumerate(config.methods)}
    sweep.sort(key=lambda r: (config.seeds.index(r.seed), r.missing_rate, order[r.method]))
    return records + sweep
