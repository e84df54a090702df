import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

POSITIVE = 1
NEGATIVE = -1


class DegenerateTaskError(ValueError):
    """Training labels contain a single class."""


class BinaryClassifier(ClassifierMixin, BaseEstimator):
    """Shared validation for the +1/-1 one-vs-rest classifiers."""

    _accept_sparse = True

    def _validate_fit(self, X, y, require_both=False):
        X, y = check_X_y(X, y, accept_sparse="csr" if self._accept_sparse else False, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if not np.isin(y, (POSITIVE, NEGATIVE)).all():
            raise ValueError("labels must be +1 or -1")
        if require_both and (not (y == POSITIVE).any() or not (y == NEGATIVE).any()):
            raise DegenerateTaskError("degenerate task: training labels contain a single class")
        self.classes_ = np.array([NEGATIVE, POSITIVE])
        self.n_features_in_ = X.shape[1]
        return X, y

    def _validate_predict(self, X, fitted_attr):
        check_is_fitted(self, fitted_attr)
        X = check_array(X, accept_sparse="csr" if self._accept_sparse else False, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"dimension mismatch: model has {self.n_features_in_} features, input has {X.shape[1]}")
        return X


def to_dense(X):
    return X.toarray() if sp.issparse(X) else np.asarray(X, dtype=np.float64)
