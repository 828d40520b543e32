"""Labeled series, block and spaced-point subsamples, and empirical risks.

Indices are 0-based throughout: the first sample of the series is index 0,
so the spaced subsample with spacing ``a`` is ``0, a, 2a, ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .exceptions import InputError
from .model_class import ClipSpec, LinearModel, SwitchedModel, clip
from .validation import check_positive_int, check_regressors

LOSSES = ("squared", "switching")

Predictor = Union[LinearModel, SwitchedModel, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True, eq=False)
class LabeledSeries:
    """Sequence of ``(x_t, y_t)`` pairs with targets clipped to ``[-r, r]``.

    ``meta`` carries generator diagnostics (raw outputs, noise level, ...)
    and plays no role in any risk computation.
    """

    X: np.ndarray
    y: np.ndarray
    clip: ClipSpec
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        X, y = check_regressors(self.X, self.y)
        y = clip(y, self.clip)
        X = np.array(X, dtype=float)
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.y.shape[0]

    @property
    def n(self) -> int:
        return len(self)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def loss_bound(self) -> float:
        return self.clip.loss_bound

    def head(self, n: int) -> "LabeledSeries":
        """The first ``n`` pairs."""
        n = check_positive_int(n, "n")
        if n > len(self):
            raise InputError(f"series has only {len(self)} pairs, asked for {n}")
        return LabeledSeries(self.X[:n], self.y[:n], self.clip)


@dataclass(frozen=True)
class BlockPlan:
    """Two interleaved sequences of ``mu`` blocks of length ``a``.

    Block ``j`` (0-based) covers indices ``a*j .. a*j + a - 1``. Even-numbered
    blocks form the first sequence, odd-numbered ones the second, so with
    1-based block labels the first sequence holds ``B_1, B_3, ...``.
    """

    n: int
    a: int
    mu: int

    @property
    def used(self) -> int:
        return 2 * self.a * self.mu

    @property
    def n_blocks(self) -> int:
        return 2 * self.mu

    def block(self, j: int) -> np.ndarray:
        return np.arange(self.a * j, self.a * (j + 1))

    @property
    def odd_indices(self) -> np.ndarray:
        """Indices of the first sequence ``B_1, B_3, ..., B_{2mu-1}``."""
        return self._parity(0)

    @property
    def even_indices(self) -> np.ndarray:
        """Indices of the second sequence ``B_2, B_4, ..., B_{2mu}``."""
        return self._parity(1)

    def _parity(self, offset: int) -> np.ndarray:
        starts = self.a * (2 * np.arange(self.mu) + offset)
        return (starts[:, None] + np.arange(self.a)[None, :]).ravel()


@dataclass(frozen=True)
class SpacedPlan:
    """Every ``a``-th sample starting from the first, ``mu_prime = n // a`` of them."""

    n: int
    a: int
    mu_prime: int

    @property
    def indices(self) -> np.ndarray:
        return self.a * np.arange(self.mu_prime)


def make_block_plan(n: int, a: int) -> BlockPlan:
    n = check_positive_int(n, "n")
    a = check_positive_int(a, "a")
    if 2 * a > n:
        raise InputError(f"need 2a <= n, got a={a}, n={n}")
    return BlockPlan(n=n, a=a, mu=n // (2 * a))


def make_spaced_plan(n: int, a: int) -> SpacedPlan:
    n = check_positive_int(n, "n")
    a = check_positive_int(a, "a")
    if a > n:
        raise InputError(f"need a <= n, got a={a}, n={n}")
    return SpacedPlan(n=n, a=a, mu_prime=n // a)


def switching_loss(y: float, predictions) -> float:
    """``min_j (y - p_j)**2`` over already-clipped submodel outputs."""
    p = np.asarray(predictions, dtype=float).ravel()
    if p.size == 0:
        raise InputError("switching loss needs at least one prediction")
    return float(np.min((float(y) - p) ** 2))


def pointwise_losses(series: LabeledSeries, predict: Predictor, loss: str = "squared", idx=None) -> np.ndarray:
    """Loss of ``predict`` at each pair of ``series`` (or at ``idx`` only).

    ``predict`` is a model object or a callable mapping a regressor matrix to
    clipped predictions: shape ``(n,)`` for the squared loss, ``(n, C)`` for
    the switching loss (a 1-D output counts as ``C = 1``).
    """
    if loss not in LOSSES:
        raise InputError(f"unknown loss {loss!r}; expected one of {LOSSES}")
    X, y = series.X, series.y
    if idx is not None:
        X, y = X[idx], y[idx]
    if isinstance(predict, (LinearModel, SwitchedModel)):
        pred = predict.predict(X, series.clip)
    else:
        pred = clip(np.asarray(predict(X), dtype=float), series.clip)
    if loss == "squared":
        if pred.ndim != 1:
            raise InputError("squared loss needs one prediction per sample")
        return (y - pred) ** 2
    if pred.ndim == 1:
        pred = pred[:, None]
    return np.min((y[:, None] - pred) ** 2, axis=1)


def _mean(values: np.ndarray) -> float:
    # fsum is exactly rounded, so the result does not depend on summation order
    return math.fsum(values.tolist()) / values.shape[0]


def empirical_risk(series: LabeledSeries, predict: Predictor, loss: str = "squared") -> float:
    if len(series) == 0:
        raise InputError("empirical risk of an empty series is undefined")
    return _mean(pointwise_losses(series, predict, loss))


def spaced_empirical_risk(series: LabeledSeries, plan: SpacedPlan, predict: Predictor, loss: str = "squared") -> float:
    idx = plan.indices
    if plan.mu_prime == 0 or idx[-1] >= len(series):
        raise RuntimeError(f"spaced plan for n={plan.n} does not fit a series of length {len(series)}")
    return _mean(pointwise_losses(series, predict, loss, idx))


def block_average_losses(series: LabeledSeries, plan: BlockPlan, predict: Predictor, loss: str = "squared"):
    """Per-block mean losses ``h_f(B_j)``, split into (first, second) sequences."""
    if plan.used > len(series):
        raise RuntimeError(f"block plan uses {plan.used} samples, series has {len(series)}")
    losses = pointwise_losses(series, predict, loss, np.arange(plan.used))
    blocks = losses.reshape(2 * plan.mu, plan.a)
    avgs = [math.fsum(row) / plan.a for row in blocks.tolist()]
    return avgs[0::2], avgs[1::2]
