import math

import numpy as np

from ._base import NEGATIVE, POSITIVE, BinaryClassifier, to_dense
from .tree import apply_tree, grow_tree


def default_max_features(n_features):
    return int(math.floor(math.log2(n_features))) + 1 if n_features > 0 else 1


class RandomForest(BinaryClassifier):
    """Bagged gain-ratio trees with a random feature subset at every split.

    Parameters
    ----------
    n_estimators : int
    max_features : int or None
        Features tried per split; ``None`` means ``floor(log2(k)) + 1``.
    min_leaf : int
    bootstrap : bool
        Draw each tree's rows with replacement. Turning it off, together with
        ``n_estimators=1`` and ``max_features=k``, reduces to a single tree.
    random_state : int
    """

    def __init__(self, n_estimators=100, max_features=None, min_leaf=2, bootstrap=True, random_state=0):
        self.n_estimators = n_estimators
        self.max_features = max_features
        self.min_leaf = min_leaf
        self.bootstrap = bootstrap
        self.random_state = random_state

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        k = X.shape[1]
        m_try = default_max_features(k) if self.max_features is None else self.max_features
        if not 1 <= m_try <= k:
            raise ValueError(f"max_features must be in [1, {k}]")
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        dense = to_dense(X)
        n = dense.shape[0]
        seeds = np.random.default_rng(self.random_state).integers(0, 2**32, size=self.n_estimators, dtype=np.uint64)
        trees = []
        for seed in seeds:
            rng = np.random.default_rng(int(seed))
            rows = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            trees.append(grow_tree(dense[rows], y[rows], self.min_leaf, m_try, rng))
        self.max_features_ = m_try
        self.tree_seeds_ = [int(s) for s in seeds]
        self.trees_ = trees
        return self

    def predict(self, X):
        X = to_dense(self._validate_predict(X, "trees_"))
        votes = np.zeros(X.shape[0], dtype=np.int64)
        for nodes in self.trees_:
            votes += apply_tree(nodes, X)
        return np.where(votes > 0, POSITIVE, NEGATIVE)

    def summary(self):
        return {
            "n_estimators": self.n_estimators,
            "max_features": self.max_features_,
            "min_leaf": self.min_leaf,
            "bootstrap": self.bootstrap,
            "random_state": self.random_state,
            "tree_seeds": self.tree_seeds_,
        }
