"""Binary one-vs-rest classifiers sharing the sklearn fit/predict interface."""

from ._base import NEGATIVE, POSITIVE, BinaryClassifier, DegenerateTaskError
from .forest import RandomForest
from .knn import KNearestNeighbors
from .naive_bayes import MultinomialNaiveBayes
from .smo import ConvergenceError, SMOClassifier
from .tree import GainRatioTree

FAMILIES = {
    "NB": MultinomialNaiveBayes,
    "KNN": KNearestNeighbors,
    "SMO": SMOClassifier,
    "Tree": GainRatioTree,
    "Forest": RandomForest,
}


def family_of(model):
    for name, cls in FAMILIES.items():
        if type(model) is cls:
            return name
    raise TypeError(f"not a known classifier family: {type(model).__name__}")


def make_classifier(family, **params):
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown classifier family {family!r}; expected one of {sorted(FAMILIES)}") from None
    return cls(**params)


def predict(model, X):
    """Uniform prediction entry point; raises ValueError on dimension mismatch."""
    return model.predict(X)


def model_summary(model):
    """Family, hyperparameters and a fitted-state digest for debug dumps."""
    return {"family": family_of(model), "params": model.get_params(), "fitted": model.summary()}


__all__ = [
    "FAMILIES",
    "NEGATIVE",
    "POSITIVE",
    "BinaryClassifier",
    "ConvergenceError",
    "DegenerateTaskError",
    "GainRatioTree",
    "KNearestNeighbors",
    "MultinomialNaiveBayes",
    "RandomForest",
    "SMOClassifier",
    "family_of",
    "make_classifier",
    "model_summary",
    "predict",
]
