"""Linear support vector machine trained by sequential minimal optimization."""

import numpy as np
import scipy.sparse as sp

from ._base import NEGATIVE, POSITIVE, BinaryClassifier

# Above this many training rows the Gram matrix is not cached.
GRAM_CACHE_LIMIT = 6000

_EPS = 1e-12
_BOUND_EPS = 1e-8


class ConvergenceError(RuntimeError):
    pass


def dual_objective(alpha, y, K):
    """``sum(alpha) - 1/2 (alpha*y)^T K (alpha*y)``."""
    ay = np.asarray(alpha) * np.asarray(y)
    return float(np.sum(alpha) - 0.5 * ay @ K @ ay)


class _Solver:
    """SMO with Keerthi et al.'s two-threshold modification over Platt's loop.

    Works on ``F_i = w.x_i - y_i`` (no bias). Optimality holds when
    ``b_low <= b_up + 2 tol``; the bias is then the midpoint of the two
    thresholds, which puts every example within ``tol`` of its KKT condition.
    A full error cache is kept so the thresholds are exact after every step.
    """

    def __init__(self, X, y, C, tol, max_passes):
        self.X = X
        self.y = y.astype(np.float64)
        self.C = C
        self.tol = tol
        self.max_passes = max_passes
        n = X.shape[0]
        self.n = n
        self.alpha = np.zeros(n)
        if n <= GRAM_CACHE_LIMIT:
            gram = X @ X.T
            self.gram = gram.toarray() if sp.issparse(gram) else np.asarray(gram)
        else:
            self.gram = None
        self.diag = np.asarray(X.multiply(X).sum(axis=1)).ravel() if sp.issparse(X) else np.einsum("ij,ij->i", X, X)
        self.F = -self.y.copy()
        self.steps = 0
        self.passes = 0
        self._update_thresholds()

    def kernel_column(self, i):
        if self.gram is not None:
            return self.gram[:, i]
        col = self.X @ self.X[i].T
        return np.asarray(col.todense()).ravel() if sp.issparse(col) else np.ravel(col)

    def _sets(self):
        a, y, C = self.alpha, self.y, self.C
        free = (a > 0) & (a < C)
        # I_up may raise y_i*alpha_i; I_low may lower it.
        up = free | ((y > 0) & (a == 0)) | ((y < 0) & (a == C))
        low = free | ((y > 0) & (a == C)) | ((y < 0) & (a == 0))
        return free, up, low

    def _update_thresholds(self):
        _, up, low = self._sets()
        F_up = np.where(up, self.F, np.inf)
        F_low = np.where(low, self.F, -np.inf)
        self.i_up = int(np.argmin(F_up))
        self.i_low = int(np.argmax(F_low))
        self.b_up = float(F_up[self.i_up])
        self.b_low = float(F_low[self.i_low])

    def optimal(self):
        return self.b_low <= self.b_up + 2 * self.tol

    def take_step(self, i1, i2):
        if i1 == i2:
            return False
        C = self.C
        a1_old, a2_old = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        F1, F2 = self.F[i1], self.F[i2]
        s = y1 * y2
        if y1 != y2:
            L, H = max(0.0, a2_old - a1_old), min(C, C + a2_old - a1_old)
        else:
            L, H = max(0.0, a2_old + a1_old - C), min(C, a2_old + a1_old)
        if L >= H:
            return False
        k1 = self.kernel_column(i1)
        k2 = self.kernel_column(i2)
        eta = self.diag[i1] + self.diag[i2] - 2.0 * k1[i2]
        slope = y2 * (F1 - F2)
        if eta > _EPS:
            a2 = min(max(a2_old + slope / eta, L), H)
        else:
            # Dual gain along the segment is slope*t - eta*t^2/2; compare the ends.
            def gain(t):
                return slope * t - 0.5 * eta * t * t
            gL, gH = gain(L - a2_old), gain(H - a2_old)
            if gL > gH + _EPS:
                a2 = L
            elif gH > gL + _EPS:
                a2 = H
            else:
                a2 = a2_old
        if a2 < _BOUND_EPS:
            a2 = 0.0
        elif a2 > C - _BOUND_EPS:
            a2 = C
        if abs(a2 - a2_old) < _EPS * (a2 + a2_old + _EPS):
            return False
        a1 = a1_old + s * (a2_old - a2)
        if a1 < _BOUND_EPS:
            a2 += s * a1
            a1 = 0.0
        elif a1 > C - _BOUND_EPS:
            a2 += s * (a1 - C)
            a1 = C
        a2 = min(max(a2, 0.0), C)
        self.F += y1 * (a1 - a1_old) * k1 + y2 * (a2 - a2_old) * k2
        self.alpha[i1] = a1
        self.alpha[i2] = a2
        self.steps += 1
        self._update_thresholds()
        return True

    def examine(self, i2):
        free, up, low = self._sets()
        F2 = self.F[i2]
        i1 = None
        if up[i2] and self.b_low - F2 > 2 * self.tol:
            i1 = self.i_low
        if low[i2] and F2 - self.b_up > 2 * self.tol:
            if i1 is None or F2 - self.b_up > self.b_low - F2:
                i1 = self.i_up
        if i1 is None:
            return False
        return self.take_step(i1, i2)

    def _check_budget(self):
        if self.passes >= self.max_passes:
            raise ConvergenceError(
                f"SMO did not converge within {self.max_passes} passes "
                f"({self.steps} steps, b_low - b_up = {self.b_low - self.b_up:.3g})"
            )
        self.passes += 1

    def run(self):
        examine_all = True
        changed = 0
        while changed > 0 or examine_all:
            self._check_budget()
            changed = 0
            if examine_all:
                for i in range(self.n):
                    changed += self.examine(i)
                examine_all = False
                if changed == 0:
                    break
            else:
                while not self.optimal():
                    if not self.take_step(self.i_up, self.i_low):
                        break
                    changed += 1
                    if self.steps % max(self.n, 1000) == 0:
                        self._check_budget()
                if changed == 0 or not self.optimal():
                    examine_all = True
                    changed = 1
                else:
                    changed = 0
                    examine_all = True
        if not self.optimal():
            raise ConvergenceError(
                f"SMO stalled after {self.steps} steps with b_low - b_up = {self.b_low - self.b_up:.3g}"
            )

    def kernel_columns(self, idx):
        if self.gram is not None:
            return self.gram[:, idx]
        cols = self.X @ self.X[idx].T
        return cols.toarray() if sp.issparse(cols) else np.asarray(cols)

    def dual_value(self, alpha=None, F=None):
        alpha = self.alpha if alpha is None else alpha
        F = self.F if F is None else F
        return float(alpha.sum() - 0.5 * np.sum(alpha * self.y * (F + self.y)))

    def polish(self):
        """Solve the KKT system exactly on the current free set.

        The result replaces the SMO iterate only when it stays strictly
        inside the box, keeps every example within ``tol`` of its KKT
        condition and does not lower the dual objective.
        """
        y, C = self.y, self.C
        free_mask = (self.alpha > 0) & (self.alpha < C)
        free = np.flatnonzero(free_mask)
        if len(free) == 0:
            return False
        bound = np.flatnonzero(~free_mask)
        K_nf = self.kernel_columns(free)
        y_f, y_b = y[free], y[bound]
        a_b = self.alpha[bound]
        m = len(free)
        A = np.zeros((m + 1, m + 1))
        A[:m, :m] = (y_f[:, None] * y_f[None, :]) * K_nf[free]
        A[:m, m] = y_f
        A[m, :m] = y_f
        r = np.empty(m + 1)
        r[:m] = 1.0 - y_f * (K_nf[bound].T @ (a_b * y_b))
        r[m] = -(y_b @ a_b)
        sol = np.linalg.lstsq(A, r, rcond=None)[0]
        if np.linalg.norm(A @ sol - r) > 1e-9 * (1.0 + np.linalg.norm(r)):
            return False
        a_f, b = sol[:m], float(sol[m])
        if not ((a_f > 0) & (a_f < C)).all():
            return False
        alpha = self.alpha.copy()
        alpha[free] = a_f
        F = self.F + K_nf @ ((a_f - self.alpha[free]) * y_f)
        if kkt_violations(alpha, y, F + y + b, C).max() > self.tol:
            return False
        old = self.dual_value()
        if self.dual_value(alpha, F) < old - 1e-12 * (1.0 + abs(old)):
            return False
        self.alpha, self.F, self._bias = alpha, F, b
        self._update_thresholds()
        return True

    @property
    def bias(self):
        """Intercept ``b`` of ``f(x) = w.x + b``."""
        if getattr(self, "_bias", None) is not None:
            return self._bias
        return -0.5 * (self.b_low + self.b_up)

    def max_kkt_violation(self):
        return float(np.max(kkt_violations(self.alpha, self.y, self.F + self.y + self.bias, self.C), initial=0.0))


def kkt_violations(alpha, y, f, C):
    """Per-example violation of the soft-margin KKT conditions given ``f(x_i)``."""
    margin = np.asarray(y) * np.asarray(f)
    alpha = np.asarray(alpha)
    v = np.zeros_like(margin)
    at_zero = alpha <= 0
    at_c = alpha >= C
    free = ~at_zero & ~at_c
    v[at_zero] = np.maximum(0.0, 1.0 - margin[at_zero])
    v[at_c] = np.maximum(0.0, margin[at_c] - 1.0)
    v[free] = np.abs(margin[free] - 1.0)
    return v


class SMOClassifier(BinaryClassifier):
    """Linear soft-margin SVM fit by sequential minimal optimization.

    Parameters
    ----------
    C : float
        Box constraint on the dual multipliers.
    tol : float
        KKT tolerance.
    normalize : bool
        Rescale each feature to [0, 1] with training min/max before fitting.
    max_passes : int
        Budget of sweeps over the working set before ``ConvergenceError``.
    polish : bool
        After SMO stops, try an exact solve of the KKT system on the free
        multipliers (kept only if it is feasible and no worse).
    """

    def __init__(self, C=1.0, tol=1e-3, normalize=False, max_passes=10000, polish=True):
        self.C = C
        self.tol = tol
        self.normalize = normalize
        self.max_passes = max_passes
        self.polish = polish

    def _scale(self, X):
        if not self.normalize:
            return X
        X = X.toarray() if sp.issparse(X) else X
        return (X - self.feature_min_) * self.feature_scale_

    def fit(self, X, y):
        if self.C <= 0 or self.tol <= 0:
            raise ValueError("C and tol must be > 0")
        X, y = self._validate_fit(X, y, require_both=True)
        if self.normalize:
            dense = X.toarray() if sp.issparse(X) else X
            lo, hi = dense.min(axis=0), dense.max(axis=0)
            span = hi - lo
            self.feature_min_ = lo
            self.feature_scale_ = np.divide(1.0, span, out=np.zeros_like(span), where=span > 0)
        Xs = self._scale(X)
        solver = _Solver(Xs, y, float(self.C), float(self.tol), self.max_passes)
        solver.run()
        self.polished_ = bool(self.polish and solver.polish())
        self.alpha_ = solver.alpha
        self.intercept_ = float(solver.bias)
        ay = self.alpha_ * y
        self.coef_ = np.asarray(Xs.T @ ay).ravel()
        sv = np.flatnonzero(self.alpha_ > 0)
        self.support_ = sv
        self.support_vectors_ = Xs[sv]
        self.dual_coef_ = ay[sv]
        self.n_iter_ = solver.steps
        self.n_passes_ = solver.passes
        self.kkt_violation_ = solver.max_kkt_violation()
        return self

    def decision_function(self, X):
        X = self._validate_predict(X, "coef_")
        return np.asarray(self._scale(X) @ self.coef_).ravel() + self.intercept_

    def decision_function_dual(self, X):
        """Same decision values through the support-vector expansion."""
        X = self._validate_predict(X, "coef_")
        K = self._scale(X) @ self.support_vectors_.T
        K = K.toarray() if sp.issparse(K) else np.asarray(K)
        return K @ self.dual_coef_ + self.intercept_

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0, POSITIVE, NEGATIVE)

    def summary(self):
        return {
            "C": self.C,
            "tol": self.tol,
            "normalize": self.normalize,
            "support_vectors": int(len(self.support_)),
            "polished": self.polished_,
            "steps": int(self.n_iter_),
        }
