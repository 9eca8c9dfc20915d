"""Run the full pipeline on the bundled three-event example and print the report."""

import argparse
from pathlib import Path

from ocelcluster import running_example_path
from ocelcluster.pipeline import RunConfig, run_pipeline


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/running_example")
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for approach in ("existence", "all"):
        out = Path(args.out) / approach
        cfg = RunConfig(str(running_example_path()), "batch", k=args.k, seed=args.seed, approach=approach, out=str(out))
        run_pipeline(cfg)
        print(f"== batch, k={args.k}, {approach} ==")
        print((out / "report.txt").read_text(encoding="utf-8"))


if __name__ == "__main__":
    main()
