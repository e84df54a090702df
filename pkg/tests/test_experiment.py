import json
from pathlib import Path

import pytest

from medtextcat.cli import main
from medtextcat.evaluation import BinaryTaskResult, ConfusionCounts, SweepResult
from medtextcat.experiment import (
    RESULTS_HEADER,
    ExperimentConfig,
    compare_best,
    emit_results,
    format_results,
    format_task_results,
    read_results,
    run_sweep,
    write_run,
)

DATA = Path(__file__).parent / "data"


def _config(mini_paths, **kw):
    train, test = mini_paths
    kw.setdefault("feature_counts", (2, 4))
    return ExperimentConfig(train_path=train, test_path=test, **kw)


def _cell(name, k, f1):
    counts = ConfusionCounts(tp=1, fp=0, fn=0, tn=1)
    r = SweepResult.from_tasks(name, k, [BinaryTaskResult.from_counts("A", counts)])
    return SweepResult(name, k, r.tasks, f1, f1, f1, f1)


def test_golden_sweep(mini_paths):
    results, manifest, timings = run_sweep(_config(mini_paths))
    assert format_results(results) == (DATA / "golden_results.csv").read_text(encoding="utf-8")
    assert format_task_results(results) == (DATA / "golden_per_task.csv").read_text(encoding="utf-8")
    assert set(timings) == {f"{f}@{k}" for f in ("NB", "KNN", "SMO", "Tree", "Forest") for k in (2, 4)}
    assert manifest["corpus"]["categories"] == ["Neoplasms", "Nervous system diseases", "Virus diseases"]
    assert manifest["corpus"]["train"]["documents"] == 8
    assert manifest["corpus"]["test"]["documents"] == 4


def test_cell_independence(mini_paths):
    full, _, _ = run_sweep(_config(mini_paths))
    subset, _, _ = run_sweep(_config(mini_paths, classifiers=("KNN", "Tree")))
    by_cell = {(r.classifier, r.feature_count): r for r in full}
    for r in subset:
        assert r == by_cell[(r.classifier, r.feature_count)]


def test_parallel_matches_serial(mini_paths):
    serial, m1, _ = run_sweep(_config(mini_paths, classifiers=("NB", "SMO")))
    parallel, m2, _ = run_sweep(_config(mini_paths, classifiers=("NB", "SMO"), jobs=2))
    assert format_task_results(serial) == format_task_results(parallel)
    m1["config"].pop("jobs"), m2["config"].pop("jobs")
    assert m1 == m2


def test_category_only_in_test_is_degenerate(tmp_path, mini_paths):
    train, test = mini_paths
    extra = tmp_path / "test.tsv"
    extra.write_text(Path(test).read_text(encoding="utf-8") + "e05\tMystery\tan unseen condition of the tumor\n", encoding="utf-8")
    results, manifest, _ = run_sweep(ExperimentConfig(train, str(extra), classifiers=("NB",), feature_counts=(2,)))
    assert results[0].degenerate_categories == ["Mystery"]
    assert manifest["cells"][0]["degenerate_tasks"] == ["Mystery"]
    assert "Mystery,0,0,1,4,0.000000,0.000000,0.000000,degenerate task" in format_task_results(results)


def test_emit_results_cardinality_and_order(tmp_path):
    cells = [_cell(n, k, 0.5) for n in ("SMO", "KNN") for k in (300, 100, 200)]
    out = tmp_path / "r.csv"
    emit_results(cells, out)
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(RESULTS_HEADER)
    assert len(lines) == 7
    assert [tuple(l.split(",")[:2]) for l in lines[1:]] == [
        ("KNN", "100"), ("KNN", "200"), ("KNN", "300"), ("SMO", "100"), ("SMO", "200"), ("SMO", "300"),
    ]
    assert format_results(list(reversed(cells))) == format_results(cells)


def test_emit_results_empty(tmp_path):
    emit_results([], tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text(encoding="utf-8") == ",".join(RESULTS_HEADER) + "\n"


def test_emit_results_unwritable(tmp_path):
    with pytest.raises(OSError):
        emit_results([], tmp_path / "missing" / "r.csv")


def test_compare_best():
    assert compare_best([_cell("A", 100, 0.7), _cell("B", 100, 0.6)]) == [(100, "A", 0.7)]
    assert compare_best([_cell("SMO", 100, 0.5), _cell("KNN", 100, 0.5)]) == [(100, "KNN", 0.5)]
    assert [w for _, w, _ in compare_best([_cell("NB", k, 0.1) for k in (1, 2)])] == ["NB", "NB"]


def test_read_results_roundtrip(tmp_path):
    cells = [_cell("KNN", 100, 0.7275), _cell("SMO", 800, 0.7228)]
    emit_results(cells, tmp_path / "r.csv")
    rows = read_results(tmp_path / "r.csv")
    assert compare_best(rows) == compare_best(cells)


@pytest.mark.parametrize(
    "kw, message",
    [
        ({"classifiers": ()}, "at least one classifier"),
        ({"classifiers": ("SVM",)}, "unknown classifiers"),
        ({"feature_counts": ()}, "at least one feature count"),
        ({"feature_counts": (200, 100)}, "strictly ascending"),
        ({"feature_counts": (0, 1)}, "positive"),
    ],
)
def test_config_validation(kw, message):
    with pytest.raises(ValueError, match=message):
        ExperimentConfig("a", "b", **kw)


def test_config_unknown_key():
    with pytest.raises(ValueError, match="unknown config keys"):
        ExperimentConfig.from_mapping({"train_path": "a", "test_path": "b", "learning_rate": 1})


def test_cli_sweep_and_report(tmp_path, mini_paths, capsys):
    train, test = mini_paths
    out = tmp_path / "run"
    code = main(["sweep", "--train", train, "--test", test, "--features", "2,4", "--out-dir", str(out), "--dump-debug"])
    assert code == 0
    assert (out / "results.csv").read_bytes() == (DATA / "golden_results.csv").read_bytes()
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["config"]["knn_k"] == 1
    assert (out / "debug" / "vocabulary.tsv").exists()
    assert len(list((out / "debug" / "models").glob("*.json"))) == 5 * 2 * 3
    assert "winner" in capsys.readouterr().out
    assert main(["report", str(out / "results.csv")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split("\t") == ["feature_count", "winner", "micro_f1"]
    assert lines[1].startswith("2\tKNN")


def test_cli_config_file_with_override(tmp_path, mini_paths):
    train, test = mini_paths
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(f"train_path: {train}\ntest_path: {test}\nclassifiers: [Tree]\nfeature_counts: [2, 4]\n", encoding="utf-8")
    assert main(["sweep", "--config", str(cfg), "--classifiers", "NB", "--out-dir", str(tmp_path / "o")]) == 0
    rows = read_results(tmp_path / "o" / "results.csv")
    assert [r["classifier"] for r in rows] == ["NB", "NB"]


def test_cli_errors(tmp_path, capsys):
    assert main(["sweep", "--train", str(tmp_path / "nope.tsv"), "--test", "x", "--out-dir", str(tmp_path)]) == 1
    assert "error" in capsys.readouterr().err
    assert main(["sweep", "--features", "2", "--out-dir", str(tmp_path)]) == 1
    assert "missing train_path" in capsys.readouterr().err
    assert main(["report", str(tmp_path / "none.csv")]) == 1


def test_cli_convert(tmp_path, capsys):
    raw = tmp_path / "raw.txt"
    raw.write_text(
        ".I 1\n.U\n87000001\n.M\nNeoplasms/DI; Humans\n.T\nA tumor title.\n.W\nAn abstract.\n"
        ".I 2\n.U\n87000002\n.M\nHumans\n.T\nNo category.\n.W\nText.\n",
        encoding="utf-8",
    )
    cmap = tmp_path / "map.tsv"
    cmap.write_text("Neoplasms\tNeoplasms\n", encoding="utf-8")
    out = tmp_path / "out.tsv"
    assert main(["convert", str(raw), "--category-map", str(cmap), "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8").startswith("87000001\tNeoplasms\tA tumor title.")
    assert "written" in capsys.readouterr().out
