"""Command-line entry point: ``ocelcluster {profile,cluster,split,discover,run}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .distance import DistanceWeights
from .pipeline import RunConfig, StageError, run_cluster, run_discover, run_pipeline, run_profile, run_split

LOG_ENV = "OCELCLUSTER_LOG_LEVEL"


def _k_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.replace("-", ",").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}") from None
    return lo, hi


def _weights(text: str) -> DistanceWeights:
    try:
        return DistanceWeights.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_cluster_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algorithm", choices=("kmeans", "agglomerative", "kmedoids"), default="kmeans")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--k", type=int, help="number of clusters")
    group.add_argument("--k-range", type=_k_range, metavar="LO,HI", help="pick k in [LO, HI] by Calinski-Harabasz")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--linkage", choices=("average", "single", "complete"), default="average")
    p.add_argument("--weights", type=_weights, default=DistanceWeights(), metavar="TRACE,NUM,CAT",
                   help="component weights of the mixed distance (default 1,1,1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ocelcluster", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="build object profiles from a JSON-OCEL log")
    p.add_argument("--input", required=True, help="JSON-OCEL log")
    p.add_argument("--object-type", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("cluster", help="cluster profiles.json")
    p.add_argument("--input", required=True, help="profiles.json from the profile stage")
    _add_cluster_flags(p)
    p.add_argument("--dump-distances", action="store_true", help="also write distances.csv")
    p.add_argument("--out", required=True)

    p = sub.add_parser("split", help="cut per-cluster sub-logs")
    p.add_argument("--input", required=True, help="JSON-OCEL log")
    p.add_argument("--clustering", required=True, help="clustering.json from the cluster stage")
    p.add_argument("--approach", choices=("existence", "all"), default="all")
    p.add_argument("--out", required=True)

    p = sub.add_parser("discover", help="discover OC-DFGs and write the complexity report")
    p.add_argument("--input", required=True, help="JSON-OCEL log (the main log)")
    p.add_argument("--bundle", help="bundle.json from the split stage")
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="run the whole pipeline")
    p.add_argument("--input", required=True, help="JSON-OCEL log")
    p.add_argument("--object-type", required=True)
    _add_cluster_flags(p)
    p.add_argument("--approach", choices=("existence", "all"), default="all")
    p.add_argument("--out", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get(LOG_ENV, "WARNING").upper(), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "profile":
            path = run_profile(args.input, args.object_type, args.out)
        elif args.command == "cluster":
            path = run_cluster(args.input, args.out, args.algorithm, args.k, args.k_range, args.seed, args.linkage,
                               args.weights, dump_distances=args.dump_distances)
        elif args.command == "split":
            path = run_split(args.input, args.clustering, args.approach, args.out)
        elif args.command == "discover":
            path = run_discover(args.input, args.out, args.bundle)
        else:
            try:
                cfg = RunConfig(args.input, args.object_type, args.algorithm, args.k, args.k_range, args.seed,
                                args.linkage, args.approach, args.weights, args.out)
            except ValueError as exc:
                raise StageError("config", exc) from exc
            path = run_pipeline(cfg)
    except StageError as exc:
        print(f"ocelcluster: error in stage '{exc.stage}': {exc.cause}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
