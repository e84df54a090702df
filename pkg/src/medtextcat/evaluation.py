"""One-vs-rest task construction and precision / recall / F scoring."""

from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .classifiers import NEGATIVE, POSITIVE


class ConfusionCounts(NamedTuple):
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other):
        return ConfusionCounts(*(a + b for a, b in zip(self, other)))


def make_binary_task(label_sets, category, categories=None) -> np.ndarray:
    """+1 for documents carrying ``category``, -1 for all others."""
    if categories is not None and category not in categories:
        raise KeyError(f"unknown category {category!r}")
    if categories is None and not any(category in labels for labels in label_sets):
        raise KeyError(f"unknown category {category!r}")
    return np.array([POSITIVE if category in labels else NEGATIVE for labels in label_sets], dtype=np.int64)


def confusion(pred, gold) -> ConfusionCounts:
    pred = np.asarray(pred)
    gold = np.asarray(gold)
    if pred.shape != gold.shape:
        raise ValueError(f"length mismatch: {len(pred)} predictions for {len(gold)} labels")
    p, g = pred == POSITIVE, gold == POSITIVE
    return ConfusionCounts(int((p & g).sum()), int((p & ~g).sum()), int((~p & g).sum()), int((~p & ~g).sum()))


def _ratio(num, den):
    return num / den if den else 0.0


def precision_recall_f(counts: ConfusionCounts) -> Tuple[float, float, float]:
    """Precision, recall and their harmonic mean; any 0/0 is taken as 0."""
    precision = _ratio(counts.tp, counts.tp + counts.fp)
    recall = _ratio(counts.tp, counts.tp + counts.fn)
    return precision, recall, _ratio(2 * precision * recall, precision + recall)


def micro_f(tasks: Sequence[ConfusionCounts]) -> Tuple[float, float, float]:
    """Pool counts over tasks, then apply precision/recall/F."""
    if not tasks:
        raise ValueError("no tasks to pool")
    pooled = ConfusionCounts()
    for t in tasks:
        pooled = pooled + ConfusionCounts(*t)
    return precision_recall_f(pooled)


@dataclass(frozen=True)
class BinaryTaskResult:
    category: str
    counts: ConfusionCounts
    precision: float
    recall: float
    f1: float
    degenerate: bool = False

    @classmethod
    def from_counts(cls, category, counts, degenerate=False):
        return cls(category, counts, *precision_recall_f(counts), degenerate=degenerate)


def macro_f(tasks: Sequence[BinaryTaskResult]) -> float:
    if not tasks:
        raise ValueError("no tasks to average")
    return float(np.mean([t.f1 for t in tasks]))


@dataclass(frozen=True)
class SweepResult:
    classifier: str
    feature_count: int
    tasks: Tuple[BinaryTaskResult, ...]
    micro_precision: float
    micro_recall: float
    micro_f1: float
    macro_f1: float

    @classmethod
    def from_tasks(cls, classifier, feature_count, tasks: List[BinaryTaskResult]):
        tasks = tuple(sorted(tasks, key=lambda t: t.category))
        p, r, f = micro_f([t.counts for t in tasks])
        return cls(classifier, feature_count, tasks, p, r, f, macro_f(tasks))

    @property
    def degenerate_categories(self):
        return [t.category for t in self.tasks if t.degenerate]


def confusion_table(result: BinaryTaskResult) -> str:
    """Confusion grid as TSV, laid out [[TP, FP], [FN, TN]]."""
    c = result.counts
    return (
        f"{result.category}\tC1\tC2\n"
        f"C1\t{c.tp}\t{c.fp}\n"
        f"C2\t{c.fn}\t{c.tn}\n"
    )
