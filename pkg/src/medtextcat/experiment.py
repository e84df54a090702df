"""Feature-budget sweep: select, weight, fit, predict and score every category."""

import csv
import hashlib
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from . import __version__
from .classifiers import FAMILIES, NEGATIVE, POSITIVE, make_classifier, model_summary
from .corpus import Corpus, category_counts, load_canonical
from .evaluation import BinaryTaskResult, SweepResult, confusion, confusion_table
from .selection import FeatureRanking, rank_features, select_top_k
from .text import load_stopwords, pipeline
from .vectors import Vocabulary, build_vocabulary, count_matrix, weight_counts

logger = logging.getLogger(__name__)

DEFAULT_FEATURE_COUNTS = (100, 200, 300, 400, 500, 600, 700, 800)
RESULTS_HEADER = ("classifier", "feature_count", "micro_precision", "micro_recall", "micro_f1", "macro_f1")
TASKS_HEADER = (
    "classifier", "feature_count", "category", "tp", "fp", "fn", "tn", "precision", "recall", "f1", "status",
)

# Provenance of every default the experiment decides on its own.
DEFAULT_NOTES = {
    "stopwords": "bundled SMART English list, removed before stemming",
    "idf": "natural log of N_train / df over the whole training split",
    "tf": "raw in-document count",
    "selection": "chi-square on document presence, top-k per one-vs-rest task, ties by term",
    "NB": "multinomial on raw counts of the selected terms, Laplace alpha",
    "KNN": "cosine similarity on TF-IDF, lower training index wins similarity ties, vote ties -> -1",
    "SMO": "linear kernel, no feature normalization unless smo_normalize",
    "Tree": "gain ratio, no pruning, min_leaf rows per side",
    "Forest": "bootstrap per tree, m_try = floor(log2 k) + 1 unless set, majority vote ties -> -1",
    "metrics": "0/0 -> 0; micro pools TP/FP/FN over categories; macro is the mean per-category F",
}


@dataclass
class ExperimentConfig:
    train_path: str
    test_path: str
    classifiers: Tuple[str, ...] = tuple(FAMILIES)
    feature_counts: Tuple[int, ...] = DEFAULT_FEATURE_COUNTS
    stopword_path: Optional[str] = None
    seed: int = 0
    knn_k: int = 1
    knn_metric: str = "cosine"
    nb_alpha: float = 1.0
    smo_c: float = 1.0
    smo_tol: float = 1e-3
    smo_normalize: bool = False
    tree_min_leaf: int = 2
    forest_trees: int = 100
    forest_m_try: Optional[int] = None
    forest_bootstrap: bool = True
    jobs: int = 1

    def __post_init__(self):
        self.classifiers = tuple(self.classifiers)
        self.feature_counts = tuple(int(k) for k in self.feature_counts)
        if not self.classifiers:
            raise ValueError("at least one classifier is required")
        unknown = [c for c in self.classifiers if c not in FAMILIES]
        if unknown:
            raise ValueError(f"unknown classifiers {unknown}; expected a subset of {list(FAMILIES)}")
        if not self.feature_counts:
            raise ValueError("at least one feature count is required")
        if any(k < 1 for k in self.feature_counts):
            raise ValueError("feature counts must be positive")
        if any(b <= a for a, b in zip(self.feature_counts, self.feature_counts[1:])):
            raise ValueError("feature counts must be strictly ascending")

    @classmethod
    def from_mapping(cls, values):
        known = {f.name for f in fields(cls)}
        extra = set(values) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**values)

    def classifier_params(self, family):
        if family == "NB":
            return {"alpha": self.nb_alpha}
        if family == "KNN":
            return {"n_neighbors": self.knn_k, "metric": self.knn_metric}
        if family == "SMO":
            return {"C": self.smo_c, "tol": self.smo_tol, "normalize": self.smo_normalize}
        if family == "Tree":
            return {"min_leaf": self.tree_min_leaf}
        return {
            "n_estimators": self.forest_trees,
            "max_features": self.forest_m_try,
            "min_leaf": self.tree_min_leaf,
            "bootstrap": self.forest_bootstrap,
            "random_state": self.seed,
        }


@dataclass
class PreparedData:
    """Everything a work unit needs, computed once from the two splits."""

    categories: Tuple[str, ...]
    vocabulary: Vocabulary
    idf: np.ndarray
    train_counts: sp.csr_matrix
    test_counts: sp.csr_matrix
    train_labels: Dict[str, np.ndarray]
    test_labels: Dict[str, np.ndarray]
    rankings: Dict[str, FeatureRanking]


def _sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _sha256_lines(items):
    return hashlib.sha256("\n".join(items).encode("utf-8")).hexdigest()


def prepare(train: Corpus, test: Corpus, stops) -> PreparedData:
    train_tokens = [pipeline(d.text, stops) for d in train.documents]
    test_tokens = [pipeline(d.text, stops) for d in test.documents]
    vocab = build_vocabulary(train_tokens)
    train_counts = count_matrix(train_tokens, vocab)
    test_counts = count_matrix(test_tokens, vocab)
    # categories seen only in test become degenerate tasks, not silent omissions
    categories = tuple(sorted(set(train.categories) | set(test.categories)))
    train_labels = {c: np.array([POSITIVE if c in d.labels else NEGATIVE for d in train.documents]) for c in categories}
    test_labels = {c: np.array([POSITIVE if c in d.labels else NEGATIVE for d in test.documents]) for c in categories}
    rankings = {c: rank_features(c, vocab, train_counts, train.label_sets) for c in categories}
    return PreparedData(
        categories, vocab, vocab.idf_table(), train_counts, test_counts, train_labels, test_labels, rankings
    )


def project(data: PreparedData, category: str, k: int):
    """Train/test count and TF-IDF matrices restricted to the task's top-k terms."""
    selected = select_top_k(data.rankings[category], k, data.vocabulary)
    cols = selected.vocab_indices
    idf = data.idf[cols]
    tr_counts = data.train_counts[:, cols]
    te_counts = data.test_counts[:, cols]
    return selected, tr_counts, te_counts, weight_counts(tr_counts, idf), weight_counts(te_counts, idf)


def run_unit(data: PreparedData, config: ExperimentConfig, family: str, k: int, category: str, keep_model=False):
    """Fit and score one (classifier, k, category) cell."""
    _, tr_counts, te_counts, tr_w, te_w = project(data, category, k)
    y_train = data.train_labels[category]
    y_test = data.test_labels[category]
    X_train, X_test = (tr_counts, te_counts) if family == "NB" else (tr_w, te_w)
    model = None
    degenerate = len(np.unique(y_train)) < 2
    if degenerate:
        pred = np.full(len(y_test), y_train[0] if len(y_train) else NEGATIVE)
    else:
        model = make_classifier(family, **config.classifier_params(family)).fit(X_train, y_train)
        pred = model.predict(X_test)
    result = BinaryTaskResult.from_counts(category, confusion(pred, y_test), degenerate=degenerate)
    return result, (model if keep_model else None)


_WORKER_STATE = {}


def _init_worker(data, config):
    _WORKER_STATE["data"] = data
    _WORKER_STATE["config"] = config


def _worker(unit):
    start = time.perf_counter()
    result, _ = run_unit(_WORKER_STATE["data"], _WORKER_STATE["config"], *unit)
    return unit, result, time.perf_counter() - start


def run_sweep(config: ExperimentConfig, dump_dir: Optional[Path] = None):
    """Run every (classifier, k) cell over all categories.

    Returns ``(results, manifest, timings)``. ``results`` is sorted by
    (classifier, feature_count); ``manifest`` is deterministic for fixed
    inputs; ``timings`` holds wall-clock seconds per cell.
    """
    train = load_canonical(config.train_path, split="train")
    test = load_canonical(config.test_path, split="test")
    stops = load_stopwords(config.stopword_path)
    data = prepare(train, test, stops)
    logger.info("vocabulary %d terms, %d categories, %d train / %d test documents",
                len(data.vocabulary), len(data.categories), len(train), len(test))

    units = [(f, k, c) for f in config.classifiers for k in config.feature_counts for c in data.categories]
    per_unit = {}
    seconds = {}
    if config.jobs > 1:
        with ProcessPoolExecutor(config.jobs, initializer=_init_worker, initargs=(data, config)) as pool:
            for unit, result, elapsed in pool.map(_worker, units):
                per_unit[unit] = result
                seconds[unit] = elapsed
    else:
        _init_worker(data, config)
        for unit in units:
            _, per_unit[unit], seconds[unit] = _worker(unit)

    results = []
    timings = {}
    for family in sorted(config.classifiers):
        for k in config.feature_counts:
            tasks = [per_unit[(family, k, c)] for c in data.categories]
            results.append(SweepResult.from_tasks(family, k, tasks))
            timings[f"{family}@{k}"] = round(sum(seconds[(family, k, c)] for c in data.categories), 6)

    manifest = build_manifest(config, train, test, stops, data, results)
    if dump_dir is not None:
        write_debug_dumps(Path(dump_dir), config, data, results)
    return results, manifest, timings


def build_manifest(config, train, test, stops, data: PreparedData, results):
    max_k = max(config.feature_counts)
    selected = {}
    for c in data.categories:
        terms = data.rankings[c].terms
        selected[c] = {
            "top_terms": terms[:max_k],
            "sha256_by_k": {str(k): _sha256_lines(terms[:k]) for k in config.feature_counts},
        }
    return {
        "package_version": __version__,
        "config": asdict(config),
        "corpus": {
            "train": {"sha256": _sha256_file(config.train_path), "documents": len(train), "category_counts": category_counts(train)},
            "test": {"sha256": _sha256_file(config.test_path), "documents": len(test), "category_counts": category_counts(test)},
            "categories": list(data.categories),
        },
        "stopwords": {"count": len(stops), "sha256": _sha256_lines(sorted(stops))},
        "vocabulary_size": len(data.vocabulary),
        "selected_features": selected,
        "cells": [
            {
                "classifier": r.classifier,
                "feature_count": r.feature_count,
                "micro_precision": r.micro_precision,
                "micro_recall": r.micro_recall,
                "micro_f1": r.micro_f1,
                "macro_f1": r.macro_f1,
                "degenerate_tasks": r.degenerate_categories,
            }
            for r in results
        ],
        "defaults": DEFAULT_NOTES,
    }


def write_debug_dumps(out: Path, config, data: PreparedData, results):
    """Vocabulary, per-task rankings, 2x2 confusion grids and model digests."""
    out.mkdir(parents=True, exist_ok=True)
    data.vocabulary.dump(out / "vocabulary.tsv")
    (out / "rankings").mkdir(exist_ok=True)
    for c in data.categories:
        data.rankings[c].dump(out / "rankings" / f"{_slug(c)}.tsv")
    (out / "confusion").mkdir(exist_ok=True)
    for r in results:
        with open(out / "confusion" / f"{r.classifier}_k{r.feature_count}.tsv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(confusion_table(t) for t in r.tasks))
    (out / "models").mkdir(exist_ok=True)
    for family in config.classifiers:
        for k in config.feature_counts:
            for c in data.categories:
                _, model = run_unit(data, config, family, k, c, keep_model=True)
                digest = model_summary(model) if model is not None else {"family": family, "degenerate": True}
                path = out / "models" / f"{family}_k{k}_{_slug(c)}.json"
                path.write_text(json.dumps(digest, indent=2, sort_keys=True, default=_jsonable) + "\n", encoding="utf-8")


def _slug(name):
    return "".join(ch if ch.isalnum() else "_" for ch in name).strip("_").lower()


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def _fmt(x):
    return f"{x:.6f}"


def format_results(results: Sequence[SweepResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULTS_HEADER)
    for r in sorted(results, key=lambda r: (r.classifier, r.feature_count)):
        w.writerow([r.classifier, r.feature_count, _fmt(r.micro_precision), _fmt(r.micro_recall), _fmt(r.micro_f1), _fmt(r.macro_f1)])
    return buf.getvalue()


def format_task_results(results: Sequence[SweepResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TASKS_HEADER)
    for r in sorted(results, key=lambda r: (r.classifier, r.feature_count)):
        for t in sorted(r.tasks, key=lambda t: t.category):
            c = t.counts
            w.writerow([
                r.classifier, r.feature_count, t.category, c.tp, c.fp, c.fn, c.tn,
                _fmt(t.precision), _fmt(t.recall), _fmt(t.f1), "degenerate task" if t.degenerate else "ok",
            ])
    return buf.getvalue()


def emit_results(results: Sequence[SweepResult], path, tasks_path=None) -> None:
    """Write the per-cell CSV and, optionally, the per-category companion."""
    path = Path(path)
    try:
        path.write_text(format_results(results), encoding="utf-8", newline="\n")
        if tasks_path is not None:
            Path(tasks_path).write_text(format_task_results(results), encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_results(path) -> List[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["feature_count"] = int(row["feature_count"])
        for key in RESULTS_HEADER[2:]:
            row[key] = float(row[key])
    return rows


def compare_best(rows) -> List[Tuple[int, str, float]]:
    """Per feature count, the classifier with the highest micro-F.

    Accepts SweepResult objects or dict rows from :func:`read_results`. Ties
    go to the lexicographically smallest family name.
    """
    best: Dict[int, Tuple[str, float]] = {}
    for row in rows:
        if isinstance(row, SweepResult):
            name, k, f1 = row.classifier, row.feature_count, row.micro_f1
        else:
            name, k, f1 = row["classifier"], row["feature_count"], row["micro_f1"]
        cur = best.get(k)
        if cur is None or f1 > cur[1] or (f1 == cur[1] and name < cur[0]):
            best[k] = (name, f1)
    return [(k, name, f1) for k, (name, f1) in sorted(best.items())]


def format_winners(table) -> str:
    lines = ["feature_count\twinner\tmicro_f1"]
    lines += [f"{k}\t{name}\t{f1:.4f}" for k, name, f1 in table]
    return "\n".join(lines) + "\n"


def write_run(out_dir, results, manifest, timings) -> Dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "results": out_dir / "results.csv",
        "tasks": out_dir / "per_task.csv",
        "manifest": out_dir / "manifest.json",
        "timings": out_dir / "timings.json",
    }
    emit_results(results, paths["results"], paths["tasks"])
    paths["manifest"].write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    paths["timings"].write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    return paths
