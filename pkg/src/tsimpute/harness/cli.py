"""Command line entry point: ``tsimpute {simulate,impute,bench,report}``.

Exit status: 0 on success, 1 on usage errors, 2 on data errors.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from ..core import Dataset
from ..errors import DataError
from ..forest import PROFILES
from ..imputers import METHODS, ImputationConfig, impute_series
from ..missingness import MissingSpec, simulate_mcar
from ..seeding import derive_seed
from .experiment import ExperimentConfig, run_experiment
from .io import load_dataset, write_dataset
from .report import emit_plot_data, emit_results, read_results, summary_markdown

log = logging.getLogger("tsimpute")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _floats(s: str) -> list[float]:
    try:
        return [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None


def _ints(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _methods(s: str) -> list[str]:
    names = [x.strip() for x in s.split(",") if x.strip()]
    bad = [m for m in names if m not in METHODS]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown method(s) {', '.join(bad) or '(none)'}; valid methods: {', '.join(METHODS)}"
        )
    return names


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tsimpute", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def imputation_flags(sp):
        sp.add_argument("--t-period", type=int)
        sp.add_argument("--trees", type=int)
        sp.add_argument("--max-iter", type=int)
        sp.add_argument("--knn-k", type=int)
        sp.add_argument("--profile", choices=sorted(PROFILES))

    s = sub.add_parser("simulate", help="hide values completely at random")
    s.add_argument("--manifest", required=True)
    s.add_argument("--rates", "--rate", dest="rates", type=_floats, required=True,
                   help="a single missing rate")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)

    s = sub.add_parser("impute", help="impute a dataset and report MAE if ground truth is present")
    s.add_argument("--manifest", required=True)
    s.add_argument("--method", type=_methods, default=["mice_rf"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    imputation_flags(s)

    s = sub.add_parser("bench", help="run a full sweep")
    s.add_argument("config", nargs="?", help="JSON file with ExperimentConfig fields")
    s.add_argument("--manifest")
    s.add_argument("--method", type=_methods)
    s.add_argument("--rates", type=_floats)
    s.add_argument("--seed", type=int)
    s.add_argument("--seeds", type=_ints)
    s.add_argument("--folds", type=int)
    s.add_argument("--classifier", choices=["logreg", "adaboost", "knn"])
    s.add_argument("--workers", type=int)
    s.add_argument("--cv-scheme", choices=["stratified", "loo"])
    s.add_argument("--mae-scope", choices=["masked", "series"])
    s.add_argument("--no-timing", action="store_true",
                   help="leave wall_time_seconds empty so results.csv is reproducible byte for byte")
    s.add_argument("--out")
    imputation_flags(s)

    s = sub.add_parser("report", help="rebuild summary.md from results.csv")
    s.add_argument("results")
    s.add_argument("--out", help="output directory (default: next to results.csv)")
    return p


def _simulate(args) -> int:
    if len(args.rates) != 1:
        raise UsageError("simulate takes exactly one missing rate")
    rate = args.rates[0]
    ds = load_dataset(args.manifest)
    out = Path(args.out)
    masked = [simulate_mcar(s, MissingSpec(rate, derive_seed(args.seed, s.id, rate))) for s in ds.series]
    write_dataset(out, Dataset([m.corrupted for m in masked], ds.name, ds.epoch_seconds))
    write_dataset(out / "truth", ds)
    with (out / "sim_mask.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["series_id", "index", "channel"])
        for m in masked:
            for i, j in zip(*np.nonzero(m.sim_mask)):
                w.writerow([m.corrupted.id, int(i), int(j)])
    hidden = sum(int(m.sim_mask.sum()) for m in masked)
    print(f"hid {hidden} values across {len(masked)} series -> {out / 'manifest.csv'}")
    return 0


def _read_sim_mask(path: Path, ds: Dataset) -> dict[str, np.ndarray]:
    masks = {s.id: np.zeros(s.values.shape, dtype=bool) for s in ds.series}
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            masks[row["series_id"]][int(row["index"]), int(row["channel"])] = True
    return masks


def _imputation_config(args, method: str, seed: int) -> ImputationConfig:
    forest = PROFILES[args.profile or "desk"]
    if args.trees is not None:
        forest = dataclasses.replace(forest, n_trees=args.trees)
    kwargs = {}
    if args.max_iter is not None:
        kwargs["max_iter"] = args.max_iter
    if args.knn_k is not None:
        kwargs["knn_k"] = args.knn_k
    return ImputationConfig(method=method, t_period=args.t_period, forest=forest, seed=seed, **kwargs)


def _impute(args) -> int:
    if len(args.method) != 1:
        raise UsageError("impute takes exactly one method")
    method = args.method[0]
    manifest = Path(args.manifest)
    ds = load_dataset(manifest)
    if ds.series[0].n_channels > 1 and method == "mice_rf" and args.t_period is not None:
        raise DataError(
            "dataset is multivariate: MICE-RF imputes its raw grid without reshaping, "
            "so --t-period must not be given"
        )
    imputed = []
    for s in ds.series:
        cfg = _imputation_config(args, method, derive_seed(args.seed, s.id, method))
        try:
            imputed.append(impute_series(s, cfg).imputed)
        except DataError as e:
            raise DataError(f"series {s.id!r}, method {method}: {e}") from e
    out = Path(args.out)
    write_dataset(out, Dataset(imputed, ds.name, ds.epoch_seconds))

    mask_path = manifest.parent / "sim_mask.csv"
    truth_path = manifest.parent / "truth" / "manifest.csv"
    if mask_path.is_file() and truth_path.is_file():
        truth = {s.id: s for s in load_dataset(truth_path).series}
        masks = _read_sim_mask(mask_path, ds)
        total_err, total_n = 0.0, 0
        with (out / "mae_report.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["series_id", "hidden_count", "mae"])
            for s in imputed:
                m = masks[s.id]
                err = np.abs(s.values - truth[s.id].values)[m]
                total_err += float(err.sum())
                total_n += err.size
                w.writerow([s.id, err.size, f"{err.mean():.6g}" if err.size else ""])
            pooled = total_err / total_n if total_n else None
            w.writerow(["ALL", total_n, f"{pooled:.6g}" if pooled is not None else ""])
        if pooled is not None:
            print(f"{method}: pooled MAE {pooled:.6g} over {total_n} hidden values")
    print(f"wrote {out / 'manifest.csv'}")
    return 0


def bench_config(args) -> ExperimentConfig:
    """Defaults, overlaid by the JSON config file, overlaid by explicit flags."""
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise UsageError(f"config file {args.config} not found") from None
        except json.JSONDecodeError as e:
            raise UsageError(f"config file {args.config} is not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    flags = {
        "manifest": args.manifest,
        "methods": args.method,
        "missing_rates": args.rates,
        "t_period": args.t_period,
        "classifier": args.classifier,
        "folds": args.folds,
        "profile": args.profile,
        "trees": args.trees,
        "max_iter": args.max_iter,
        "knn_k": args.knn_k,
        "workers": args.workers,
        "cv_scheme": args.cv_scheme,
        "mae_scope": args.mae_scope,
        "out": args.out,
        "seeds": args.seeds if args.seeds is not None else (
            [args.seed] if args.seed is not None else None),
    }
    if args.no_timing:
        flags["record_timing"] = False
    data.update({k: v for k, v in flags.items() if v is not None})
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(data) - names
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    try:
        config = ExperimentConfig(**data)
    except (ValueError, TypeError) as e:
        raise UsageError(str(e)) from None
    if config.manifest is None:
        raise UsageError("bench needs --manifest (or 'manifest' in the config file)")
    return config


def _bench(args) -> int:
    config = bench_config(args)
    records = run_experiment(config)
    out = Path(config.out)
    paths = emit_results(records, out)
    paths.append(emit_plot_data(records, out))
    for p in paths:
        print(f"wrote {p}")
    return 0


def _report(args) -> int:
    path = Path(args.results)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    try:
        records = read_results(path)
    except ValueError as e:
        raise DataError(str(e)) from e
    if not records:
        raise DataError(f"{path}: no records")
    out = Path(args.out) if args.out else path.parent
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.md").write_text(summary_markdown(records), encoding="utf-8")
    print(f"wrote {out / 'summary.md'}")
    return 0


COMMANDS = {"simulate": _simulate, "impute": _impute, "bench": _bench, "report": _report}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except (DataError, OSError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
