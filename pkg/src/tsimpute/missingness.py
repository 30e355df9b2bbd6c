"""MCAR missingness simulation."""
from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .core import TimeSeries
from .errors import PreexistingMissing, RateOutOfRange

MAX_RATE = 0.95


@dataclass(frozen=True)
class MissingSpec:
    rate: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.rate <= MAX_RATE:
            raise RateOutOfRange(f"missing rate must lie in [0, {MAX_RATE}], got {self.rate}")


@dataclass(frozen=True, eq=False)
class MaskedSeries:
    corrupted: TimeSeries
    ground_truth: TimeSeries
    sim_mask: np.ndarray  # bool, same shape as values; True = hidden


@dataclass(frozen=True)
class MaskStats:
    hidden_count: int
    achieved_rate: float
    longest_gap: int


def hidden_count(rate: float, n_slots: int) -> int:
    """``round(rate * n_slots)`` with halves rounded up, computed in decimal."""
    exact = Decimal(repr(float(rate))) * n_slots
    return int(exact.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def simulate_mcar(series: TimeSeries, spec: MissingSpec) -> MaskedSeries:
    if not series.is_complete:
        raise PreexistingMissing(
            f"series {series.id!r} already has {int((~series.observed).sum())} missing values"
        )
    n = series.values.size
    count = hidden_count(spec.rate, n)
    rng = np.random.default_rng(spec.seed)
    flat = np.zeros(n, dtype=bool)
    flat[rng.choice(n, size=count, replace=False)] = True
    sim_mask = flat.reshape(series.values.shape)
    corrupted = series.replace(series.values, ~sim_mask)
    return MaskedSeries(corrupted, series, sim_mask)


def _longest_run(flags: np.ndarray) -> int:
    best = run = 0
    for f in flags:
        run = run + 1 if f else 0
        best = max(best, run)
    return best


def mask_stats(masked: MaskedSeries) -> MaskStats:
    m = masked.sim_mask
    count = int(m.sum())
    gap = max((_longest_run(m[:, j]) for j in range(m.shape[1])), default=0)
    return MaskStats(count, count / m.size, gap)
