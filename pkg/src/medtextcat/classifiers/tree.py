"""Binary decision tree split by gain ratio (C4.5 criterion, no pruning)."""

import numpy as np

from ._base import NEGATIVE, POSITIVE, BinaryClassifier, to_dense

LEAF = -1


def entropy2(p):
    """Binary entropy in bits, elementwise; 0 log 0 = 0."""
    p = np.asarray(p, dtype=np.float64)
    q = 1.0 - p
    out = np.zeros_like(p)
    mask = (p > 0) & (q > 0)
    out[mask] = -(p[mask] * np.log2(p[mask]) + q[mask] * np.log2(q[mask]))
    return out


def best_split(X, pos, features, min_leaf):
    """Best (feature, threshold, gain, gain_ratio) over ``features``.

    ``X`` holds the node's rows, ``pos`` is a boolean positive-class mask.
    Candidate thresholds are midpoints between consecutive distinct sorted
    values; both sides must keep at least ``min_leaf`` rows. Ties on gain
    ratio go to the lowest feature index, then the lowest threshold. Returns
    None when no admissible split exists.
    """
    n = X.shape[0]
    if n < 2 * min_leaf or not len(features):
        return None
    features = np.sort(np.asarray(features))
    cols = X[:, features]
    varying = np.flatnonzero(cols.min(axis=0) < cols.max(axis=0))
    if not len(varying):
        return None
    features, cols = features[varying], cols[:, varying]
    order = np.argsort(cols, axis=0, kind="stable")
    values = np.take_along_axis(cols, order, axis=0)
    # candidate (row, column) boundaries between distinct values, min_leaf rows each side
    lo, hi = min_leaf - 1, n - min_leaf
    if hi <= lo:
        return None
    rows, cands = np.nonzero(values[lo + 1:hi + 1] > values[lo:hi])
    if not len(rows):
        return None
    rows += lo
    cum_pos = np.cumsum(pos[order], axis=0)
    left_pos = cum_pos[rows, cands]
    n_left = (rows + 1).astype(np.float64)
    n_right = n - n_left
    total_pos = pos.sum()
    parent = entropy2(total_pos / n)
    h_left = entropy2(left_pos / n_left)
    h_right = entropy2((total_pos - left_pos) / n_right)
    gain = parent - (n_left / n) * h_left - (n_right / n) * h_right
    split_info = entropy2(n_left / n)
    ratio = gain / np.where(split_info > 0, split_info, 1.0)
    # ties resolve to lowest feature, then lowest threshold
    best = np.lexsort((rows, cands, -ratio))[0]
    i, j = rows[best], cands[best]
    threshold = 0.5 * (values[i, j] + values[i + 1, j])
    return int(features[j]), float(threshold), float(gain[best]), float(ratio[best])


def grow_tree(X, y, min_leaf, max_features=None, rng=None):
    """Grow node arrays (feature, threshold, left, right, label) depth first.

    A node becomes a leaf when it is pure, has fewer than ``2 * min_leaf``
    rows, or admits no split. Zero-gain splits are still taken when they are
    the best available, so conflict-free data can always be fit exactly.
    """
    n_features = X.shape[1]
    feature, threshold, left, right, label = [], [], [], [], []

    def new_node():
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        label.append(NEGATIVE)
        return len(feature) - 1

    root = new_node()
    stack = [(root, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        pos = y[idx] == POSITIVE
        n_pos = int(pos.sum())
        label[node] = POSITIVE if n_pos > len(idx) - n_pos else NEGATIVE
        if n_pos == 0 or n_pos == len(idx):
            continue
        if max_features is None or max_features >= n_features:
            candidates = np.arange(n_features)
        else:
            candidates = rng.choice(n_features, size=max_features, replace=False)
        candidates = np.sort(candidates)
        split = best_split(X[np.ix_(idx, candidates)], pos, np.arange(len(candidates)), min_leaf)
        if split is None:
            continue
        f, thr, _, _ = split
        f = int(candidates[f])
        go_left = X[idx, f] <= thr
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node()
        right[node] = new_node()
        # right pushed first so the left subtree is numbered first
        stack.append((right[node], idx[~go_left]))
        stack.append((left[node], idx[go_left]))
    return (
        np.array(feature, dtype=np.int64),
        np.array(threshold),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(label, dtype=np.int64),
    )


def apply_tree(nodes, X):
    feature, threshold, left, right, label = nodes
    node = np.zeros(X.shape[0], dtype=np.int64)
    active = np.flatnonzero(feature[node] != LEAF)
    while len(active):
        nd = node[active]
        go_left = X[active, feature[nd]] <= threshold[nd]
        node[active] = np.where(go_left, left[nd], right[nd])
        active = active[feature[node[active]] != LEAF]
    return label[node]


def tree_depth(nodes):
    feature, _, left, right, _ = nodes
    depth = 0
    stack = [(0, 0)]
    while stack:
        node, d = stack.pop()
        depth = max(depth, d)
        if feature[node] != LEAF:
            stack.extend(((left[node], d + 1), (right[node], d + 1)))
    return depth


class GainRatioTree(BinaryClassifier):
    """Unpruned binary decision tree with gain-ratio splits.

    Parameters
    ----------
    min_leaf : int
        Minimum rows on each side of a split.
    max_features : int or None
        Features drawn at random for each split; ``None`` uses all.
    random_state : int or None
    """

    def __init__(self, min_leaf=2, max_features=None, random_state=None):
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.random_state = random_state

    def fit(self, X, y):
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        X, y = self._validate_fit(X, y)
        rng = np.random.default_rng(self.random_state)
        self.nodes_ = grow_tree(to_dense(X), y, self.min_leaf, self.max_features, rng)
        return self

    @property
    def node_count_(self):
        return len(self.nodes_[0])

    def predict(self, X):
        X = self._validate_predict(X, "nodes_")
        return apply_tree(self.nodes_, to_dense(X))

    def summary(self):
        return {"min_leaf": self.min_leaf, "nodes": self.node_count_, "depth": tree_depth(self.nodes_)}
