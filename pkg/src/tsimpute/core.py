"""Series containers and the period reshape.

A univariate series ``x_1 .. x_T`` is folded row-major into a ``k x P`` grid
so that row ``r``, column ``c`` holds ``x[r * P + c]`` (0-based). Each column
then collects one phase of the period across all cycles, which is what lets a
column-wise regressor use the neighbouring phases (past and future epochs) as
predictors.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DataError, NonDivisorPeriod, PeriodExceedsLength

# cell_mask codes
MISSING = 0
OBSERVED = 1
PADDING = 2


def _as_2d(a, dtype) -> np.ndarray:
    a = np.asarray(a, dtype=dtype)
    if a.ndim == 1:
        a = a[:, None]
    return a


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """One labelled series.

    ``values`` has shape ``(T, d)``; ``observed`` is a boolean array of the same
    shape. Missing slots hold NaN in ``values`` so a corrupted series never
    carries the hidden ground truth. 1-D inputs are promoted to ``(T, 1)``.
    """

    id: str
    values: np.ndarray
    observed: np.ndarray | None = None
    label: int = 0

    def __post_init__(self):
        values = _as_2d(self.values, float).copy()
        if self.observed is None:
            observed = np.isfinite(values)
        else:
            observed = _as_2d(self.observed, bool).copy()
        if values.shape != observed.shape:
            raise DataError(
                f"series {self.id!r}: values {values.shape} and mask {observed.shape} differ"
            )
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise DataError(f"series {self.id!r}: empty series")
        if not np.all(np.isfinite(values[observed])):
            raise DataError(f"series {self.id!r}: observed value is not finite")
        values[~observed] = np.nan
        values.setflags(write=False)
        observed.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "observed", observed)
        object.__setattr__(self, "label", int(self.label))

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    @property
    def is_complete(self) -> bool:
        return bool(self.observed.all())

    def replace(self, values, observed=None) -> "TimeSeries":
        return TimeSeries(self.id, values, observed, self.label)


@dataclass
class Dataset:
    series: list[TimeSeries]
    name: str = "dataset"
    epoch_seconds: int = 60

    def __len__(self):
        return len(self.series)

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.series], dtype=int)


class PadPolicy(str, enum.Enum):
    STRICT = "strict"
    PAD = "pad"


@dataclass(frozen=True)
class ReshapeSpec:
    t_period: int
    pad_policy: PadPolicy = PadPolicy.STRICT

    def __post_init__(self):
        if int(self.t_period) < 1:
            raise DataError(f"t_period must be positive, got {self.t_period}")
        object.__setattr__(self, "pad_policy", PadPolicy(self.pad_policy))


@dataclass(frozen=True, eq=False)
class SeriesMatrix:
    cells: np.ndarray
    cell_mask: np.ndarray
    original_len: int

    @property
    def shape(self):
        return self.cells.shape

    @property
    def observed(self) -> np.ndarray:
        return self.cell_mask == OBSERVED

    @property
    def missing(self) -> np.ndarray:
        return self.cell_mask == MISSING

    @property
    def padding(self) -> np.ndarray:
        return self.cell_mask == PADDING

    @classmethod
    def from_grid(cls, values, observed) -> "SeriesMatrix":
        """Wrap a ``T x d`` grid (multivariate path) without reshaping."""
        values = np.asarray(values, float)
        observed = np.asarray(observed, bool)
        mask = np.where(observed, OBSERVED, MISSING).astype(np.int8)
        return cls(np.where(observed, values, np.nan), mask, values.shape[0] * values.shape[1])

    def with_cells(self, cells) -> "SeriesMatrix":
        return SeriesMatrix(np.asarray(cells, float), self.cell_mask, self.original_len)


class PeriodCheck(str, enum.Enum):
    VALID = "valid"
    PAD_NEEDED = "pad_needed"
    INVALID = "invalid"


def validate_period(t_i: int, t_period: int) -> PeriodCheck:
    if t_i < 1 or t_period < 1:
        raise DataError("lengths and periods must be positive")
    if t_period > t_i:
        return PeriodCheck.INVALID
    if t_i % t_period == 0:
        return PeriodCheck.VALID
    return PeriodCheck.PAD_NEEDED


def reshape_to_matrix(values, observed, spec: ReshapeSpec) -> SeriesMatrix:
    """Fold one channel into a ``k x t_period`` matrix, row-major."""
    values = np.asarray(values, float).ravel()
    observed = np.asarray(observed, bool).ravel()
    t_i = values.shape[0]
    p = int(spec.t_period)
    check = validate_period(t_i, p)
    if check is PeriodCheck.INVALID:
        raise PeriodExceedsLength(f"t_period={p} exceeds series length {t_i}")
    if check is PeriodCheck.PAD_NEEDED and spec.pad_policy is PadPolicy.STRICT:
        raise NonDivisorPeriod(
            f"t_period={p} does not divide series length {t_i}; use pad mode or pick a divisor"
        )
    k = -(-t_i // p)
    cells = np.full(k * p, np.nan)
    mask = np.full(k * p, PADDING, dtype=np.int8)
    cells[:t_i] = values
    mask[:t_i] = np.where(observed, OBSERVED, MISSING)
    return SeriesMatrix(cells.reshape(k, p), mask.reshape(k, p), t_i)


def reshape_to_series(matrix: SeriesMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`reshape_to_matrix`: returns ``(values, observed)``."""
    n = matrix.original_len
    values = matrix.cells.reshape(-1)[:n].copy()
    observed = matrix.cell_mask.reshape(-1)[:n] == OBSERVED
    return values, observed
