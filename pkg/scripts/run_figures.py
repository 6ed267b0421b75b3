"""Run every Monte-Carlo sweep and write one CSV per experiment.

    python scripts/run_figures.py --out-dir results --realizations 200 --workers 4
"""

import argparse
import time
from pathlib import Path

from hetsnet.experiments import EXPERIMENTS, default_config, run_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--realizations", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--only", nargs="*", choices=EXPERIMENTS, help="subset of experiments")
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for exp in args.only or EXPERIMENTS:
        start = time.perf_counter()
        cfg = default_config(exp, realizations=args.realizations, master_seed=args.seed, workers=args.workers)
        result = run_experiment(cfg)
        result.to_csv(out / f"{exp}.csv")
        print(f"{exp:16s} {len(result.rows):5d} rows  {time.perf_counter() - start:7.1f}s")


if __name__ == "__main__":
    main()
