import json
import subprocess
import sys
from pathlib import Path

import pytest

from ocelcluster.cli import main
from ocelcluster.pipeline import RunConfig, StageError, run_cluster

ARTIFACTS = [
    "profiles.json",
    "profiles.csv",
    "clustering.json",
    "bundle.json",
    "orphans.json",
    "sublogs/cluster_0.jsonocel",
    "sublogs/cluster_1.jsonocel",
    "models/main.dot",
    "models/cluster_0.dot",
    "models/cluster_1.dot",
    "report.json",
    "report.txt",
]


def _run(example_path, out, *extra):
    return main(["run", "--input", example_path, "--object-type", "batch", "--out", str(out), *extra])


def test_run_writes_every_artifact(example_path, tmp_path, capsys):
    assert _run(example_path, tmp_path, "--k", "2", "--approach", "all") == 0
    assert capsys.readouterr().out.strip() == str(tmp_path / "report.json")
    for name in ARTIFACTS:
        assert (tmp_path / name).is_file(), name
    digest = json.loads((tmp_path / "report.json").read_text())["config_digest"]
    for name in ("profiles.json", "clustering.json", "bundle.json"):
        assert json.loads((tmp_path / name).read_text())["config_digest"] == digest
    sub = json.loads((tmp_path / "sublogs/cluster_0.jsonocel").read_text())
    assert sub["ocel:global-log"]["ocelcluster:config-digest"] == digest
    assert (tmp_path / "report.txt").read_text().startswith(f"# config_digest={digest}\n")
    assert (tmp_path / "profiles.csv").read_text().startswith(f"# config_digest={digest}\n")
    assert f"// config_digest={digest}" in (tmp_path / "models/main.dot").read_text()


def test_runs_are_byte_identical(example_path, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert _run(example_path, out, "--k-range", "2,2", "--approach", "existence", "--algorithm", "agglomerative") == 0
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    assert files_a == sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    for rel in files_a:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel


def test_digest_ignores_out_dir(example_path):
    c1 = RunConfig(example_path, "batch", k=2, out="x")
    c2 = RunConfig(example_path, "batch", k=2, out="y")
    assert c1.digest() == c2.digest() != RunConfig(example_path, "batch", k=2, seed=1).digest()


def test_stages_run_independently(example_path, tmp_path):
    p, c, s, d = (tmp_path / n for n in ("p", "c", "s", "d"))
    assert main(["profile", "--input", example_path, "--object-type", "batch", "--out", str(p)]) == 0
    assert main(["cluster", "--input", str(p / "profiles.json"), "--k", "2", "--algorithm", "kmedoids",
                 "--dump-distances", "--out", str(c)]) == 0
    assert (c / "distances.csv").read_text().splitlines()[0] == ",b1,b2,b3"
    assert main(["split", "--input", example_path, "--clustering", str(c / "clustering.json"),
                 "--approach", "existence", "--out", str(s)]) == 0
    assert main(["discover", "--input", example_path, "--bundle", str(s / "bundle.json"), "--out", str(d)]) == 0
    report = json.loads((d / "report.json").read_text())
    assert report["approach"] == "existence" and len(report["clusters"]) == 2
    assert main(["discover", "--input", example_path, "--out", str(tmp_path / "solo")]) == 0
    solo = json.loads((tmp_path / "solo" / "report.json").read_text())
    assert solo["main"]["n_nodes"] == 3 and solo["main"]["n_edges"] == 13


def test_k_above_object_count_fails_in_clustering(example_path, tmp_path, capsys):
    assert _run(example_path, tmp_path, "--k", "5") == 1
    err = capsys.readouterr().err
    assert "error in stage 'clustering'" in err and "k=5" in err


def test_sweep_reaching_object_count_fails(example_path, tmp_path, capsys):
    # the score is undefined at k = n, and sweep errors are not swallowed
    assert _run(example_path, tmp_path, "--k-range", "2,3") == 1
    assert "error in stage 'clustering'" in capsys.readouterr().err


def test_missing_input_fails_cleanly(tmp_path, capsys):
    assert _run(str(tmp_path / "nope.jsonocel"), tmp_path, "--k", "1") == 1
    assert "error in stage" in capsys.readouterr().err


def test_unknown_type_fails_in_profile(example_path, tmp_path, capsys):
    assert main(["profile", "--input", example_path, "--object-type", "pallet", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "stage 'profile'" in err and "batch" in err


def test_bad_flags_exit_with_usage(example_path, tmp_path):
    with pytest.raises(SystemExit):
        _run(example_path, tmp_path)
    with pytest.raises(SystemExit):
        _run(example_path, tmp_path, "--k", "2", "--weights", "1,2")


def test_run_config_validation(example_path):
    with pytest.raises(ValueError):
        RunConfig(example_path, "batch")
    with pytest.raises(ValueError):
        RunConfig(example_path, "batch", k=2, approach="any")
    with pytest.raises(StageError) as info:
        run_cluster(example_path, "unused", k=2)
    assert info.value.stage == "clustering"


def test_identity_clustering_reports_unit_improvements(example_path, tmp_path):
    for approach in ("existence", "all"):
        out = tmp_path / approach
        assert _run(example_path, out, "--k", "1", "--approach", approach) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["csi"] == pytest.approx(1.0, abs=1e-9)
        assert report["cdi"] == pytest.approx(1.0, abs=1e-9)
        row = (out / "report.txt").read_text().splitlines()[4]
        assert row.split("|")[-2:] == [" 1.00 ", " 1.00"]


def test_report_arithmetic(example_path, tmp_path):
    assert _run(example_path, tmp_path, "--k", "2", "--approach", "existence") == 0
    report = json.loads((tmp_path / "report.json").read_text())
    bundle = json.loads((tmp_path / "bundle.json").read_text())
    rows = [report["main"], *report["clusters"]]
    for r in rows:
        assert r["size"] == r["n_nodes"] * r["n_edges"]
        if r["density"] is not None:
            assert r["density"] == pytest.approx(r["n_edges"] / r["n_nodes"])
    counts = [len(c["objects"]) for c in bundle["clusters"]]
    mean_size = sum(c * r["size"] for c, r in zip(counts, report["clusters"])) / sum(counts)
    mean_density = sum(c * r["density"] for c, r in zip(counts, report["clusters"])) / sum(counts)
    assert report["csi"] == pytest.approx(report["main"]["size"] / mean_size)
    assert report["cdi"] == pytest.approx(report["main"]["density"] / mean_density)
    assert [c["n_events"] for c in bundle["clusters"]] == [r["n_events"] for r in report["clusters"]]


def test_module_entry_point(example_path, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ocelcluster.cli", "run", "--input", example_path, "--object-type", "batch",
         "--k", "2", "--out", str(tmp_path)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert Path(proc.stdout.strip()).is_file()
