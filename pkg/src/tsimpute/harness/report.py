"""results.csv, mae_curve.csv and summary.md."""
from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import numpy as np

from .experiment import ExperimentRecord

RESULTS_HEADER = ["dataset", "method", "classifier", "missing_rate", "seed", "t_period",
                  "mae", "f1", "auc", "mcc", "wall_time_seconds"]
CURVE_HEADER = ["method", "missing_rate", "mae_mean", "mae_std"]
# metric -> True when larger is better
METRICS = {"mae": False, "f1": True, "auc": True, "mcc": True}


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.6g}"


def _write(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def emit_results(records: list[ExperimentRecord], out_dir) -> list[Path]:
    if not records:
        raise ValueError("no records to write")
    out_dir = Path(out_dir)
    rows = [[fmt(getattr(r, h)) for h in RESULTS_HEADER] for r in records]
    csv_path = _write(out_dir / "results.csv", RESULTS_HEADER, rows)
    md_path = out_dir / "summary.md"
    md_path.write_text(summary_markdown(records), encoding="utf-8")
    return [csv_path, md_path]


def mae_curve(records: list[ExperimentRecord]):
    """``(method, rate, mean, std)`` over seeds; population std, so one seed gives 0."""
    groups = defaultdict(list)
    methods = []
    for r in records:
        if r.method == "none" or r.mae is None:
            continue
        if r.method not in methods:
            methods.append(r.method)
        groups[(r.method, r.missing_rate)].append(r.mae)
    rows = []
    for m in methods:
        for rate in sorted(k[1] for k in groups if k[0] == m):
            v = np.array(groups[(m, rate)])
            rows.append((m, rate, float(v.mean()), float(v.std())))
    return rows


def emit_plot_data(records: list[ExperimentRecord], out_dir) -> Path:
    rows = mae_curve(records)
    if not rows:
        raise ValueError("no sweep records with MAE")
    return _write(Path(out_dir) / "mae_curve.csv", CURVE_HEADER,
                  [[m, fmt(rate), fmt(mean), fmt(std)] for m, rate, mean, std in rows])


def _means(records, metric):
    """``{rate: {method: mean over seeds}}`` for sweep records."""
    acc = defaultdict(lambda: defaultdict(list))
    for r in records:
        v = getattr(r, metric)
        if r.method != "none" and v is not None:
            acc[r.missing_rate][r.method].append(v)
    return {rate: {m: float(np.mean(v)) for m, v in by.items()} for rate, by in acc.items()}


def best_methods(table: dict[str, float], higher_is_better: bool) -> set[str]:
    if not table:
        return set()
    target = max(table.values()) if higher_is_better else min(table.values())
    return {m for m, v in table.items() if v == target}


def summary_markdown(records: list[ExperimentRecord]) -> str:
    methods = []
    for r in records:
        if r.method != "none" and r.method not in methods:
            methods.append(r.method)
    baseline = next((r for r in records if r.method == "none"), None)
    head = records[0]
    lines = [f"# {head.dataset} ({head.classifier})", ""]
    for metric, higher in METRICS.items():
        means = _means(records, metric)
        title = metric.upper()
        if baseline is not None and getattr(baseline, metric) is not None:
            title += f" (baseline: {getattr(baseline, metric):.3f})"
        title += " - higher is better" if higher else " - lower is better"
        lines += [f"## {title}", "", "| rate | " + " | ".join(methods) + " |",
                  "|---" * (len(methods) + 1) + "|"]
        for rate in sorted(means):
            best = best_methods(means[rate], higher)
            cells = []
            for m in methods:
                if m not in means[rate]:
                    cells.append("")
                    continue
                s = f"{means[rate][m]:.3f}"
                cells.append(f"**{s}**" if m in best else s)
            lines.append(f"| {rate:g} | " + " | ".join(cells) + " |")
        lines.append("")
    return "\n".join(lines)


def _opt(cast, s):
    return cast(s) if s != "" else None


def read_results(path) -> list[ExperimentRecord]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RESULTS_HEADER:
            raise ValueError(f"{path}: header must be {','.join(RESULTS_HEADER)}")
        out = []
        for row in reader:
            d = dict(zip(header, row))
            out.append(ExperimentRecord(
                d["dataset"], d["method"], d["classifier"], float(d["missing_rate"]),
                int(d["seed"]), _opt(int, d["t_period"]), _opt(float, d["mae"]),
                float(d["f1"]), float(d["auc"]), float(d["mcc"]),
                _opt(float, d["wall_time_seconds"]),
            ))
    return out
