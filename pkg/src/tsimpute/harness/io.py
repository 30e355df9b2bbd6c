"""Manifest and series CSV reading/writing.

A manifest is a CSV with header ``series_id,path,label``; relative paths are
resolved against the manifest's directory. Each series file has header
``timestamp,value`` (univariate) or ``timestamp,value_1,...,value_d``. An
empty value field means the epoch is missing.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from ..core import Dataset, TimeSeries
from ..errors import InconsistentChannelCount, MalformedCsv, MissingFile, NonFiniteValue

MANIFEST_HEADER = ["series_id", "path", "label"]


def _read_rows(path: Path) -> list[list[str]]:
    if not path.is_file():
        raise MissingFile(f"{path}: no such file")
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            return list(csv.reader(fh))
    except UnicodeDecodeError as e:
        raise MalformedCsv(f"{path}: not valid UTF-8 ({e})") from e


def _value_header(header: list[str], path: Path) -> int:
    if len(header) < 2 or header[0] != "timestamp":
        raise MalformedCsv(f"{path}: header must start with 'timestamp', got {header}")
    if header[1:] == ["value"]:
        return 1
    expected = [f"value_{j}" for j in range(1, len(header))]
    if header[1:] != expected:
        raise MalformedCsv(f"{path}: expected value columns {expected} or ['value'], got {header[1:]}")
    return len(expected)


def read_series(path, series_id: str, label: int) -> TimeSeries:
    path = Path(path)
    rows = _read_rows(path)
    if not rows:
        raise MalformedCsv(f"{path}: empty file")
    d = _value_header(rows[0], path)
    body = rows[1:]
    if not body:
        raise MalformedCsv(f"{path}: no data rows")
    values = np.full((len(body), d), np.nan)
    observed = np.zeros((len(body), d), dtype=bool)
    for i, row in enumerate(body):
        line = i + 2
        if len(row) != d + 1:
            raise MalformedCsv(f"{path}, line {line}: expected {d + 1} fields, got {len(row)}")
        for j, field in enumerate(row[1:]):
            field = field.strip()
            if field == "":
                continue
            try:
                v = float(field)
            except ValueError:
                raise MalformedCsv(
                    f"{path}, line {line}, column {j + 2}: cannot parse {field!r} as a number"
                ) from None
            if not math.isfinite(v):
                raise NonFiniteValue(f"{path}, line {line}, column {j + 2}: non-finite value {field!r}")
            values[i, j] = v
            observed[i, j] = True
    return TimeSeries(series_id, values, observed, label)


def load_dataset(manifest_path, name: str | None = None) -> Dataset:
    """Load every series listed in the manifest, in manifest order."""
    manifest_path = Path(manifest_path)
    rows = _read_rows(manifest_path)
    if not rows or rows[0] != MANIFEST_HEADER:
        raise MalformedCsv(f"{manifest_path}: header must be {','.join(MANIFEST_HEADER)}")
    base = manifest_path.parent
    series = []
    channels = None
    for i, row in enumerate(rows[1:]):
        line = i + 2
        if not row:
            continue
        if len(row) != 3:
            raise MalformedCsv(f"{manifest_path}, line {line}: expected 3 fields, got {len(row)}")
        sid, rel, label = row
        try:
            label = int(label)
        except ValueError:
            raise MalformedCsv(f"{manifest_path}, line {line}: label {label!r} is not an integer") from None
        s = read_series(base / rel, sid, label)
        if channels is None:
            channels = s.n_channels
        elif s.n_channels != channels:
            raise InconsistentChannelCount(
                f"{base / rel}: {s.n_channels} value columns, earlier series have {channels}"
            )
        series.append(s)
    if not series:
        raise MalformedCsv(f"{manifest_path}: lists no series")
    return Dataset(series, name or manifest_path.parent.name or "dataset")


def _fmt(v: float) -> str:
    return repr(float(v))


def write_series(path, series: TimeSeries, epoch_seconds: int = 60) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    d = series.n_channels
    header = ["timestamp", "value"] if d == 1 else ["timestamp"] + [f"value_{j}" for j in range(1, d + 1)]
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(series.length):
            w.writerow([i * epoch_seconds] + [
                _fmt(series.values[i, j]) if series.observed[i, j] else "" for j in range(d)
            ])


def write_dataset(out_dir, dataset: Dataset, subdir: str = "series") -> Path:
    """Write series files plus ``manifest.csv``; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = out_dir / "manifest.csv"
    with manifest.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_HEADER)
        for s in dataset.series:
            rel = f"{subdir}/{s.id}.csv"
            write_series(out_dir / rel, s, dataset.epoch_seconds)
            w.writerow([s.id, rel, s.label])
    return manifest
