"""Synthetic seasonal data used by the acceptance suite and the desk benchmark."""
from __future__ import annotations

import numpy as np

from ..core import Dataset, TimeSeries
from ..seeding import rng_for


def sine_signal(length: int = 960, period: int = 24, amplitude: float = 1.0, phase: float = 0.0):
    t = np.arange(length)
    return amplitude * np.sin(2 * np.pi * t / period + phase)


def noisy_sine(seed: int, sigma: float, length: int = 960, period: int = 24, amplitude: float = 1.0):
    """``(clean, noisy)`` pair; the noise is drawn from ``seed``."""
    clean = sine_signal(length, period, amplitude)
    noise = rng_for("noisy_sine", seed, sigma).normal(0.0, sigma, length)
    return clean, clean + noise


def seasonal_dataset(n_series: int = 50, length: int = 960, period: int = 24,
                     sigma: float = 0.1, seed: int = 0, name: str = "synthetic") -> Dataset:
    """Two balanced classes of noisy daily-cycle series.

    Every series is a unit-amplitude sine with a random phase. Class 1 sits
    on a higher baseline level (shift ~ N(0.4, 0.15) against N(0, 0.15)), so
    the per-series mean separates the classes well but not perfectly.
    """
    rng = rng_for("seasonal_dataset", seed)
    series = []
    for i in range(n_series):
        label = i % 2
        phase = rng.uniform(0, 2 * np.pi)
        level = rng.normal(0.4 * label, 0.15)
        values = sine_signal(length, period, 1.0, phase) + level + rng.normal(0, sigma, length)
        series.append(TimeSeries(f"s{i:03d}", values, label=label))
    return Dataset(series, name)
