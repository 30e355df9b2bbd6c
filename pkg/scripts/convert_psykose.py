"""Convert a Psykose-style activity folder to the manifest format.

Expected layout (as distributed)::

    psykose/
        control/control_1.csv ...   columns: timestamp,date,activity
        patient/patient_1.csv ...

Controls get label 0 and patients label 1. Each file becomes one univariate
series of per-minute activity counts. Blank activity fields stay missing.

    python scripts/convert_psykose.py /data/psykose out/psykose
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from tsimpute.core import Dataset, TimeSeries
from tsimpute.harness.io import write_dataset

GROUPS = {"control": 0, "patient": 1}


def read_activity(path: Path) -> np.ndarray:
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "activity" not in rows[0]:
        raise SystemExit(f"{path}: no 'activity' column")
    return np.array([float(r["activity"]) if r["activity"].strip() else np.nan for r in rows])


def convert(src: Path, out: Path, max_len: int | None = None) -> Path:
    series = []
    for group, label in GROUPS.items():
        files = sorted((src / group).glob("*.csv"), key=lambda p: (len(p.stem), p.stem))
        for f in files:
            v = read_activity(f)
            if max_len:
                v = v[:max_len]
            series.append(TimeSeries(f.stem, v, label=label))
    if not series:
        raise SystemExit(f"{src}: found no control/*.csv or patient/*.csv files")
    return write_dataset(out, Dataset(series, "psykose"))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src", type=Path)
    ap.add_argument("out", type=Path)
    ap.add_argument("--max-len", type=int,
                    help="truncate every series to this many epochs (e.g. 1440 * 13 for 13 days)")
    args = ap.parse_args()
    print(convert(args.src, args.out, args.max_len))


if __name__ == "__main__":
    main()
