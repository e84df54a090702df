import numpy as np
import scipy.sparse as sp
from sklearn.preprocessing import normalize

from ._base import NEGATIVE, POSITIVE, BinaryClassifier

_CHUNK = 1024


class KNearestNeighbors(BinaryClassifier):
    """Majority vote among the ``n_neighbors`` most similar training vectors.

    Similarity ties go to the lower training index and vote ties to -1. With
    the cosine metric a query whose best similarity is 0 (for instance an
    all-zero vector) has no informative neighbour and is labelled -1.

    Parameters
    ----------
    n_neighbors : int
    metric : {"cosine", "euclidean"}
    """

    def __init__(self, n_neighbors=1, metric="cosine"):
        self.n_neighbors = n_neighbors
        self.metric = metric

    def fit(self, X, y):
        if self.metric not in ("cosine", "euclidean"):
            raise ValueError(f"unknown metric {self.metric!r}")
        X, y = self._validate_fit(X, y)
        if X.shape[0] == 0:
            raise ValueError("empty training set")
        if not 1 <= self.n_neighbors <= X.shape[0]:
            raise ValueError("n_neighbors must be between 1 and the training size")
        self.X_ = sp.csr_matrix(X)
        self.y_ = y
        if self.metric == "cosine":
            self._unit = normalize(self.X_, norm="l2")
        else:
            self._sq_norms = np.asarray(self.X_.multiply(self.X_).sum(axis=1)).ravel()
        return self

    def _scores(self, Q):
        """Higher is closer."""
        if self.metric == "cosine":
            return np.asarray((normalize(Q, norm="l2") @ self._unit.T).todense())
        q_sq = np.asarray(Q.multiply(Q).sum(axis=1)).ravel()
        cross = np.asarray((Q @ self.X_.T).todense())
        return -(q_sq[:, None] - 2 * cross + self._sq_norms[None, :])

    def kneighbors(self, X):
        """Indices of the nearest training rows, closest first."""
        Q = sp.csr_matrix(self._validate_predict(X, "X_"))
        out = []
        best = []
        for start in range(0, Q.shape[0], _CHUNK):
            scores = self._scores(Q[start:start + _CHUNK])
            if self.n_neighbors == 1:
                idx = np.argmax(scores, axis=1)[:, None]
            else:
                idx = np.argsort(-scores, axis=1, kind="stable")[:, : self.n_neighbors]
            out.append(idx)
            best.append(np.take_along_axis(scores, idx[:, :1], axis=1).ravel())
        return np.vstack(out), np.concatenate(best)

    def predict(self, X):
        idx, best = self.kneighbors(X)
        votes = self.y_[idx].sum(axis=1)
        pred = np.where(votes > 0, POSITIVE, NEGATIVE)
        if self.metric == "cosine":
            pred[best <= 0] = NEGATIVE
        return pred

    def summary(self):
        return {"n_neighbors": self.n_neighbors, "metric": self.metric, "n_train": int(self.X_.shape[0])}
