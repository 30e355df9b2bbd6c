"""Write the synthetic seasonal dataset as a manifest + series CSVs.

    python scripts/make_synthetic.py out/synthetic --series 50 --length 960
"""
import argparse

from tsimpute.harness.io import write_dataset
from tsimpute.harness.synthetic import seasonal_dataset


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--series", type=int, default=50)
    ap.add_argument("--length", type=int, default=960)
    ap.add_argument("--period", type=int, default=24)
    ap.add_argument("--sigma", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    ds = seasonal_dataset(args.series, args.length, args.period, args.sigma, args.seed)
    print(write_dataset(args.out, ds))


if __name__ == "__main__":
    main()
