"""Least-squares and switched-regression identification.

The bounds in :mod:`quantbounds.bounds` hold uniformly over the model class,
so the identification routines here only need to return *some* model; the
alternating scheme of :func:`fit_switched` is a local heuristic.

Targets sitting on the clipping boundary (``|y| >= r``) are censored
observations of the unclipped output. ``drop_saturated=True`` leaves them out
of the least-squares solves; :func:`fit_switched` does so by default because
the alternating scheme otherwise settles in poor local minima. Saturated
targets always count in the reported risks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import InputError, UnderdeterminedError
from .model_class import ClipSpec, LinearModel, SwitchedModel, clip
from .resampling import LabeledSeries, switching_loss  # noqa: F401  (re-exported)
from .simulate import make_rng
from .validation import check_positive_int, check_regressors

COND_LIMIT = 1e12
RIDGE_SCALE = 1e-10


@dataclass(frozen=True)
class FitReport:
    model: LinearModel | SwitchedModel
    objective: float
    iterations: int
    restarts_used: int
    converged: bool
    history: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "history": list(self.history),
        }


def solve_normal_equations(G: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Solve ``(G'G + eps I) w = G'y``, with ``eps > 0`` only if ``G'G`` is ill-conditioned."""
    gram = G.T @ G
    rhs = G.T @ y
    d = gram.shape[0]
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(gram)
    if not cond < COND_LIMIT:
        eps = RIDGE_SCALE * np.trace(gram) / d
        if eps == 0:
            return np.zeros(d)
        gram = gram + eps * np.eye(d)
    return np.linalg.solve(gram, rhs)


def _mean(values: np.ndarray) -> float:
    return math.fsum(values.tolist()) / values.shape[0]


def _fit_rows(X, y, rows, unsaturated):
    keep = rows & unsaturated
    if not keep.any():
        keep = rows
    return solve_normal_equations(X[keep], y[keep])


def _unsaturated(series: LabeledSeries, drop_saturated: bool) -> np.ndarray:
    if not drop_saturated:
        return np.ones(len(series), dtype=bool)
    return np.abs(series.y) < series.clip.radius


def fit_ols(series: LabeledSeries, drop_saturated: bool = False) -> FitReport:
    """Ordinary least squares on the regressors of ``series``."""
    n, d = series.X.shape
    if n <= d:
        raise UnderdeterminedError(f"need more than {d} samples, got {n}")
    X, y = series.X, series.y
    w = _fit_rows(X, y, np.ones(n, dtype=bool), _unsaturated(series, drop_saturated))
    model = LinearModel(w)
    obj = _mean((y - model.predict(X, series.clip)) ** 2)
    return FitReport(model, obj, iterations=1, restarts_used=1, converged=True, history=(obj,))


def _switching_losses(X, y, W, spec):
    pred = clip(X @ W.T, spec)
    return (y[:, None] - pred) ** 2


def _alternate(X, y, W, spec, unsat, max_iter):
    n, d = X.shape
    C = W.shape[0]
    history = []
    prev = None
    converged = False
    it = 0
    R = _switching_losses(X, y, W, spec)
    while it < max_iter:
        it += 1
        assign = np.argmin(R, axis=1)
        best = R[np.arange(n), assign]
        obj = _mean(best)
        history.append(obj)
        if prev is not None and np.array_equal(assign, prev):
            converged = True
            break
        prev = assign
        W_new = W.copy()
        for j in range(C):
            rows = assign == j
            if rows.any():
                W_new[j] = _fit_rows(X, y, rows, unsat)
            else:
                # reseed an empty mode on the worst-fitted sample
                t = int(np.argmax(best))
                nrm = float(X[t] @ X[t])
                W_new[j] = X[t] * (y[t] / nrm) if nrm > 0 else 0.0
        R_new = _switching_losses(X, y, W_new, spec)
        if _mean(R_new.min(axis=1)) > obj:
            break
        W, R = W_new, R_new
    return W, history, it, converged


def fit_switched(
    series: LabeledSeries,
    C: int,
    restarts: int = 10,
    max_iter: int = 100,
    seed: int = 0,
    drop_saturated: bool = True,
    orders: tuple[int, int] | None = None,
) -> FitReport:
    """Minimize the empirical switching loss by alternating assignment and refit.

    Each restart draws its initial submodels from ``make_rng(seed, k)``, so
    the result does not depend on how restarts are scheduled. A refit that
    would increase the objective is rejected and ends the restart, which
    keeps the recorded objective history nonincreasing. The restart with the
    smallest final objective wins (ties go to the earliest restart).
    """
    C = check_positive_int(C, "C")
    restarts = check_positive_int(restarts, "restarts")
    max_iter = check_positive_int(max_iter, "max_iter")
    n, d = series.X.shape
    if n <= C * d:
        raise UnderdeterminedError(f"need more than C*d = {C * d} samples, got {n}")
    X, y, spec = series.X, series.y, series.clip
    unsat = _unsaturated(series, drop_saturated)
    best = None
    for k in range(restarts):
        rng = make_rng(seed, k)
        W0 = rng.standard_normal((C, d)) / math.sqrt(d)
        W, history, iters, converged = _alternate(X, y, W0, spec, unsat, max_iter)
        obj = _mean(_switching_losses(X, y, W, spec).min(axis=1))
        if best is None or obj < best[0]:
            best = (obj, W, history, iters, converged)
    obj, W, history, iters, converged = best
    if orders is None:
        orders = tuple(series.meta.get("orders", (0, 0)))
        if sum(orders) != d:
            orders = (0, 0)
    model = SwitchedModel(tuple(W), orders)
    return FitReport(model, obj, iters, restarts, converged, tuple(history))


class ClippedLinearRegression(RegressorMixin, BaseEstimator):
    """Least-squares linear regressor whose outputs are clipped to ``[-r, r]``.

    Parameters
    ----------
    radius : float
        Clipping radius ``r`` applied to targets and predictions.
    drop_saturated : bool
        Leave targets with ``|y| >= r`` out of the least-squares solve.
    """

    def __init__(self, radius=3.0, drop_saturated=False):
        self.radius = radius
        self.drop_saturated = drop_saturated

    def fit(self, X, y):
        X, y = check_regressors(X, y)
        series = LabeledSeries(X, y, ClipSpec(self.radius))
        report = fit_ols(series, self.drop_saturated)
        self.model_ = report.model
        self.coef_ = np.array(report.model.weights)
        self.fit_report_ = report
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.model_.predict(check_regressors(X), ClipSpec(self.radius))


class SwitchedLinearRegression(BaseEstimator):
    """``n_modes`` linear submodels fitted under the switching loss.

    ``predict`` returns the clipped output of every submodel, shape
    ``(n_samples, n_modes)``: without the mode sequence there is no single
    prediction. ``score`` is the negated empirical switching risk.
    """

    def __init__(self, n_modes=2, radius=3.0, restarts=10, max_iter=100, random_state=0, drop_saturated=True):
        self.n_modes = n_modes
        self.radius = radius
        self.restarts = restarts
        self.max_iter = max_iter
        self.random_state = random_state
        self.drop_saturated = drop_saturated

    def fit(self, X, y):
        X, y = check_regressors(X, y)
        series = LabeledSeries(X, y, ClipSpec(self.radius))
        report = fit_switched(
            series, self.n_modes, self.restarts, self.max_iter, int(self.random_state or 0), self.drop_saturated
        )
        self.model_ = report.model
        self.coef_ = report.model.weight_matrix
        self.fit_report_ = report
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.model_.predict(check_regressors(X), ClipSpec(self.radius))

    def assign_modes(self, X, y):
        """0-based index of the best-fitting submodel for every sample."""
        X, y = check_regressors(X, y)
        r = self.radius
        y = np.clip(y, -r, r)
        return np.argmin((y[:, None] - self.predict(X)) ** 2, axis=1)

    def score(self, X, y):
        X, y = check_regressors(X, y)
        if X.shape[0] == 0:
            raise InputError("cannot score an empty sample")
        r = self.radius
        y = np.clip(y, -r, r)
        return -_mean(np.min((y[:, None] - self.predict(X)) ** 2, axis=1))
