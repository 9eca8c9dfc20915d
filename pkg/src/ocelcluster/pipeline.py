"""Staged pipeline: profile -> cluster -> split -> discover -> report.

Every stage reads the previous stage's artifact from disk and writes its own,
so stages can be run (and tested) one at a time. Artifacts carry a digest of
the configuration that produced them.
"""

from __future__ import annotations

import functools
import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .clustering import Clustering, ClusteringError, agglomerative, kmeans, kmedoids, sweep_k
from .distance import DistanceWeights, distance_matrix
from .ocdfg import complexity_report, discover_ocdfg, export_dot, model_row
from .ocel import OCEL, dump_ocel, flatten, load_ocel
from .profiles import build_profiles, encode, profiles_csv, profiles_from_records, profiles_to_records
from .sublog import build_bundle

__all__ = ["StageError", "RunConfig", "run_profile", "run_cluster", "run_split", "run_discover", "run_pipeline"]

log = logging.getLogger(__name__)

DIGEST_KEY = "config_digest"
OCEL_DIGEST_KEY = "ocelcluster:config-digest"
ALGORITHMS = ("kmeans", "agglomerative", "kmedoids")
LINKAGES = ("average", "single", "complete")
APPROACHES = ("existence", "all")


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass(frozen=True)
class RunConfig:
    input: str
    otype: str
    algorithm: str = "kmeans"
    k: int | None = None
    k_range: tuple[int, int] | None = None
    seed: int = 0
    linkage: str = "average"
    approach: str = "all"
    weights: DistanceWeights = field(default_factory=DistanceWeights)
    out: str = "out"

    def __post_init__(self):
        if not self.otype:
            raise ValueError("object type must be non-empty")
        if (self.k is None) == (self.k_range is None):
            raise ValueError("give exactly one of k and k_range")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.k_range is not None:
            lo, hi = self.k_range
            if not 1 <= lo <= hi:
                raise ValueError(f"invalid k range {self.k_range}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.linkage not in LINKAGES:
            raise ValueError(f"unknown linkage {self.linkage!r}; choose from {LINKAGES}")
        if self.approach not in APPROACHES:
            raise ValueError(f"unknown approach {self.approach!r}; choose from {APPROACHES}")

    def digest(self) -> str:
        """Hash of every setting except the output location, plus the input bytes."""
        params = asdict(self)
        params.pop("out")
        params["input"] = _file_sha256(self.input)
        return config_digest("run", params)


def _file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def config_digest(stage: str, params: dict[str, Any]) -> str:
    blob = json.dumps({"stage": stage, **params}, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _num(x: float) -> float | str:
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _write_json(path: Path, doc: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _stage(name: str):
    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except StageError:
                raise
            except (ValueError, KeyError, OSError, ClusteringError) as exc:
                raise StageError(name, exc) from exc

        return inner

    return wrap


@_stage("profile")
def run_profile(input_path: str | Path, otype: str, out: str | Path, digest: str | None = None) -> Path:
    """Write ``profiles.json`` and ``profiles.csv`` for ``otype`` objects."""
    digest = digest or config_digest("profile", {"input": _file_sha256(input_path), "otype": otype})
    ocel = load_ocel(input_path)
    profiles = build_profiles(ocel, otype)
    out = Path(out)
    _write_json(out / "profiles.json", {DIGEST_KEY: digest, "otype": otype, "profiles": profiles_to_records(profiles)})
    (out / "profiles.csv").write_text(profiles_csv(profiles, comment=f"{DIGEST_KEY}={digest}"), encoding="utf-8")
    log.info("profiled %d %s objects", len(profiles), otype)
    return out / "profiles.json"


@_stage("clustering")
def run_cluster(
    profiles_path: str | Path,
    out: str | Path,
    algorithm: str = "kmeans",
    k: int | None = None,
    k_range: tuple[int, int] | None = None,
    seed: int = 0,
    linkage: str = "average",
    weights: DistanceWeights = DistanceWeights(),
    digest: str | None = None,
    dump_distances: bool = False,
) -> Path:
    """Cluster profiles with a fixed k, or pick k from a range by Calinski-Harabasz."""
    if (k is None) == (k_range is None):
        raise ValueError("give exactly one of k and k_range")
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    doc = json.loads(Path(profiles_path).read_text(encoding="utf-8"))
    otype = doc["otype"]
    profiles = profiles_from_records(doc["profiles"])
    if not profiles:
        raise ClusteringError(f"no {otype!r} objects to cluster")
    params = dict(profiles=doc.get(DIGEST_KEY), algorithm=algorithm, k=k, k_range=k_range, seed=seed,
                  linkage=linkage, weights=asdict(weights))
    digest = digest or config_digest("cluster", params)
    table = encode(profiles)
    if k is not None and k > len(table):
        raise ClusteringError(f"k={k} exceeds the number of {otype!r} objects ({len(table)})")

    needs_matrix = algorithm != "kmeans" or dump_distances
    matrix = distance_matrix(table, weights) if needs_matrix and len(table) >= 2 else None
    sweep = None
    if k_range is not None:
        entries = sweep_k(table, range(k_range[0], k_range[1] + 1), algorithm, seed, linkage, weights, otype, matrix)
        clustering = next(e.clustering for e in entries if e.best)
        sweep = [{"k": e.k, "score": _num(e.score), "best": e.best} for e in entries]
    elif algorithm == "kmeans":
        clustering = kmeans(table, k, seed, otype=otype)
    elif matrix is None:
        raise ClusteringError(f"{algorithm} needs at least 2 objects")
    elif algorithm == "agglomerative":
        clustering = agglomerative(matrix, k, linkage, otype=otype)
    else:
        clustering = kmedoids(matrix, k, seed, otype=otype)

    result = {DIGEST_KEY: digest, **clustering.to_json()}
    if sweep is not None:
        result["sweep"] = sweep
    out = Path(out)
    _write_json(out / "clustering.json", result)
    if dump_distances and matrix is not None:
        (out / "distances.csv").write_text(matrix.to_csv(), encoding="utf-8")
    log.info("clustered %d objects into %d clusters (%s)", len(table), clustering.k, algorithm)
    return out / "clustering.json"


@_stage("split")
def run_split(
    input_path: str | Path, clustering_path: str | Path, approach: str, out: str | Path, digest: str | None = None
) -> Path:
    """Write one sub-OCEL per cluster, ``orphans.json`` and a ``bundle.json`` manifest."""
    if approach not in APPROACHES:
        raise ValueError(f"unknown approach {approach!r}; choose from {APPROACHES}")
    cdoc = json.loads(Path(clustering_path).read_text(encoding="utf-8"))
    digest = digest or config_digest(
        "split", {"input": _file_sha256(input_path), "clustering": cdoc.get(DIGEST_KEY), "approach": approach}
    )
    ocel = load_ocel(input_path)
    bundle = build_bundle(ocel, Clustering.from_json(cdoc), approach)
    out = Path(out)
    files = []
    for i, sub in enumerate(bundle.sublogs):
        name = f"sublogs/cluster_{i}.jsonocel"
        doc = dump_ocel(sub)
        doc["ocel:global-log"][OCEL_DIGEST_KEY] = digest
        _write_json(out / name, doc)
        files.append(name)
    _write_json(out / "orphans.json", list(bundle.orphan_events))
    manifest = {
        DIGEST_KEY: digest,
        "otype": bundle.otype,
        "approach": bundle.approach,
        "clusters": [
            {"index": i, "objects": list(c), "sublog": f, "n_events": len(s.events)}
            for i, (c, s, f) in enumerate(zip(bundle.clusters, bundle.sublogs, files))
        ],
        "orphans": "orphans.json",
        "n_orphans": len(bundle.orphan_events),
    }
    _write_json(out / "bundle.json", manifest)
    return out / "bundle.json"


@_stage("discover")
def run_discover(
    input_path: str | Path, out: str | Path, bundle_path: str | Path | None = None, digest: str | None = None
) -> Path:
    """Discover the main model (and per-cluster models when a bundle is given) and report."""
    params = {"input": _file_sha256(input_path)}
    manifest = None
    if bundle_path is not None:
        manifest = json.loads(Path(bundle_path).read_text(encoding="utf-8"))
        params["bundle"] = manifest.get(DIGEST_KEY)
    digest = digest or config_digest("discover", params)
    out = Path(out)
    main_log = load_ocel(input_path)
    if manifest is not None:
        main_log = main_log.restrict(ev.id for ev in flatten(main_log, manifest["otype"]).events)
    main_model = discover_ocdfg(main_log)
    (out / "models").mkdir(parents=True, exist_ok=True)
    (out / "models" / "main.dot").write_text(
        export_dot(main_model, "main", comment=f"{DIGEST_KEY}={digest}"), encoding="utf-8"
    )
    if manifest is None:
        row = model_row("main", main_model, main_log, len(main_log.objects))
        _write_json(out / "report.json", {DIGEST_KEY: digest, "main": asdict(row)})
        return out / "report.json"

    base = Path(bundle_path).parent
    sublogs: list[OCEL] = [load_ocel(base / c["sublog"]) for c in manifest["clusters"]]
    sizes = [len(c["objects"]) for c in manifest["clusters"]]
    models = [discover_ocdfg(s) for s in sublogs]
    for i, m in enumerate(models):
        (out / "models" / f"cluster_{i}.dot").write_text(
            export_dot(m, f"cluster_{i}", comment=f"{DIGEST_KEY}={digest}"), encoding="utf-8"
        )
    report = complexity_report(
        main_log,
        sublogs,
        sizes,
        approach=manifest["approach"],
        otype=manifest["otype"],
        orphan_events=manifest.get("n_orphans", 0),
        main_model=main_model,
        models=models,
    )
    _write_json(out / "report.json", {DIGEST_KEY: digest, **report.to_json()})
    (out / "report.txt").write_text(f"# {DIGEST_KEY}={digest}\n" + report.to_text(), encoding="utf-8")
    return out / "report.json"


def run_pipeline(cfg: RunConfig) -> Path:
    """Run every stage into ``cfg.out``; all artifacts share one config digest."""
    try:
        digest = cfg.digest()
    except OSError as exc:
        raise StageError("input", exc) from exc
    out = Path(cfg.out)
    profiles = run_profile(cfg.input, cfg.otype, out, digest=digest)
    clustering = run_cluster(
        profiles, out, cfg.algorithm, cfg.k, cfg.k_range, cfg.seed, cfg.linkage, cfg.weights, digest=digest
    )
    bundle = run_split(cfg.input, clustering, cfg.approach, out, digest=digest)
    return run_discover(cfg.input, out, bundle, digest=digest)
