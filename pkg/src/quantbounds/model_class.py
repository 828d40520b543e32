"""Quantized, clipped parametric model classes and their predictors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import InputError
from .validation import check_positive, check_positive_int, check_regressors

NATIVE = "native"


@dataclass(frozen=True)
class UniformGrid:
    """Uniform fixed-point grid of ``2**bits`` levels on ``[lower, upper]``."""

    lower: float
    upper: float
    bits: int

    def __post_init__(self):
        check_positive_int(self.bits, "bits")
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)) or self.upper <= self.lower:
            raise InputError(f"grid needs finite lower < upper, got [{self.lower}, {self.upper}]")

    @property
    def n_levels(self) -> int:
        return 2 ** self.bits

    @property
    def step(self) -> float:
        return (self.upper - self.lower) / (self.n_levels - 1)

    def levels(self) -> np.ndarray:
        if self.bits > 20:
            raise InputError("refusing to enumerate more than 2**20 levels")
        return self.lower + self.step * np.arange(self.n_levels)

    def snap(self, value: float) -> tuple[float, bool]:
        """Nearest level to ``value``; ties go to the level of larger magnitude.

        Returns the level and whether ``value`` had to be clamped.
        """
        if value <= self.lower:
            return float(self.lower), value < self.lower
        if value >= self.upper:
            return float(self.upper), value > self.upper
        top = self.n_levels - 1
        t = (value - self.lower) / self.step
        k = min(int(math.floor(t)), top)
        frac = t - k
        if frac > 0.5:
            k += 1
        elif frac == 0.5:
            lo, hi = self._level(k), self._level(k + 1)
            if abs(hi) >= abs(lo):
                k += 1
        k = min(k, top)
        return self._level(k), False

    def _level(self, k: int) -> float:
        if k == self.n_levels - 1:
            return float(self.upper)
        return float(self.lower + k * self.step)

    def to_json(self):
        return [self.lower, self.upper]


@dataclass(frozen=True)
class QuantizedModelClass:
    """Finite model class with ``param_count`` parameters of ``bits_per_param`` bits.

    ``grids`` is either the string ``"native"`` (parameters are stored in
    ordinary machine words and quantization is the identity) or a sequence of
    ``(lower, upper)`` boxes, one per parameter, each carrying ``2**B`` levels.
    """

    bits_per_param: int
    param_count: int
    grids: str | tuple[UniformGrid, ...] = NATIVE

    def __post_init__(self):
        check_positive_int(self.bits_per_param, "bits_per_param")
        check_positive_int(self.param_count, "param_count")
        grids = self.grids
        if isinstance(grids, str):
            if grids != NATIVE:
                raise InputError(f"unknown grid spec {grids!r}")
            return
        built = []
        for g in grids:
            if not isinstance(g, UniformGrid):
                lower, upper = g
                g = UniformGrid(float(lower), float(upper), self.bits_per_param)
            elif g.bits != self.bits_per_param:
                raise InputError("every grid must carry 2**bits_per_param levels")
            built.append(g)
        if len(built) != self.param_count:
            raise InputError(f"expected {self.param_count} grids, got {len(built)}")
        object.__setattr__(self, "grids", tuple(built))

    @classmethod
    def box(cls, bits: int, lower: float, upper: float, param_count: int) -> "QuantizedModelClass":
        """Same box ``[lower, upper]`` for every parameter."""
        return cls(bits, param_count, tuple((lower, upper) for _ in range(param_count)))

    @property
    def is_native(self) -> bool:
        return isinstance(self.grids, str)

    @property
    def total_bits(self) -> int:
        return self.bits_per_param * self.param_count

    def log2_cardinality(self) -> float:
        return float(self.total_bits)

    def to_json(self):
        return NATIVE if self.is_native else [g.to_json() for g in self.grids]


def quantize(w, model_class: QuantizedModelClass, return_clamped: bool = False):
    """Map every coordinate of ``w`` to the nearest level of its grid.

    Coordinates outside their box are clamped to the nearest endpoint. With
    ``return_clamped=True`` a boolean mask of clamped coordinates is also
    returned.
    """
    w = np.asarray(w, dtype=float).ravel()
    if not np.all(np.isfinite(w)):
        raise InputError("cannot quantize non-finite parameters")
    if w.shape[0] != model_class.param_count:
        raise InputError(f"expected {model_class.param_count} parameters, got {w.shape[0]}")
    if model_class.is_native:
        out, clamped = w.copy(), np.zeros(w.shape, dtype=bool)
    else:
        pairs = [g.snap(float(v)) for g, v in zip(model_class.grids, w)]
        out = np.array([p[0] for p in pairs])
        clamped = np.array([p[1] for p in pairs], dtype=bool)
    if return_clamped:
        return out, clamped
    return out


def class_complexity_nats(model_class: QuantizedModelClass) -> float:
    """Log-cardinality bound ``B p ln 2`` of the class, in nats."""
    return model_class.total_bits * math.log(2.0)


@dataclass(frozen=True)
class ClipSpec:
    """Clipping radius ``r`` and the induced squared-loss bound ``M = 4 r**2``."""

    radius: float

    def __post_init__(self):
        check_positive(self.radius, "radius")

    @property
    def loss_bound(self) -> float:
        return 4.0 * self.radius ** 2


def clip(v, spec: ClipSpec):
    r = spec.radius
    if np.ndim(v) == 0:
        return min(max(float(v), -r), r)
    return np.clip(np.asarray(v, dtype=float), -r, r)


def _as_weights(w) -> np.ndarray:
    arr = np.array(w, dtype=float).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise InputError("weights must be a nonempty finite vector")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _as_weights(self.weights))

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    @property
    def param_count(self) -> int:
        return self.dim

    def predict(self, X, spec: ClipSpec) -> np.ndarray:
        """Clipped predictions for every row of ``X``."""
        X = check_regressors(X)
        if X.shape[1] != self.dim:
            raise InputError(f"regressors have dimension {X.shape[1]}, model expects {self.dim}")
        return clip(X @ self.weights, spec)

    def __eq__(self, other):
        return isinstance(other, LinearModel) and np.array_equal(self.weights, other.weights)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SwitchedModel:
    """``C`` linear submodels over ARX regressors of orders ``(na, nb)``."""

    submodels: tuple
    orders: tuple[int, int] = field(default=(0, 0))

    def __post_init__(self):
        subs = tuple(_as_weights(w) for w in self.submodels)
        if not subs:
            raise InputError("a switched model needs at least one submodel")
        d = subs[0].shape[0]
        if any(w.shape[0] != d for w in subs):
            raise InputError("all submodels must share the same dimension")
        na, nb = (int(o) for o in self.orders)
        if (na, nb) != (0, 0) and na + nb != d:
            raise InputError(f"orders ({na}, {nb}) do not match dimension {d}")
        object.__setattr__(self, "submodels", subs)
        object.__setattr__(self, "orders", (na, nb))

    @property
    def n_modes(self) -> int:
        return len(self.submodels)

    @property
    def dim(self) -> int:
        return self.submodels[0].shape[0]

    @property
    def param_count(self) -> int:
        return self.n_modes * self.dim

    @property
    def weight_matrix(self) -> np.ndarray:
        """``(C, d)`` array, one submodel per row."""
        return np.vstack(self.submodels)

    def predict(self, X, spec: ClipSpec) -> np.ndarray:
        """Clipped outputs of every submodel, shape ``(n_samples, C)``."""
        X = check_regressors(X)
        if X.shape[1] != self.dim:
            raise InputError(f"regressors have dimension {X.shape[1]}, model expects {self.dim}")
        return clip(X @ self.weight_matrix.T, spec)

    def __eq__(self, other):
        return (
            isinstance(other, SwitchedModel)
            and self.orders == other.orders
            and self.n_modes == other.n_modes
            and all(np.array_equal(a, b) for a, b in zip(self.submodels, other.submodels))
        )

    __hash__ = None


def predict_linear(model: LinearModel, x: Sequence[float], spec: ClipSpec) -> float:
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != model.dim:
        raise InputError(f"regressor has dimension {x.shape[0]}, model expects {model.dim}")
    return clip(float(model.weights @ x), spec)


def predict_switched(model: SwitchedModel, x: Sequence[float], mode: int, spec: ClipSpec) -> float:
    """Clipped output of submodel ``mode`` (1-based, as in ``s_t``)."""
    if isinstance(mode, bool) or not 1 <= int(mode) <= model.n_modes:
        raise InputError(f"mode must be in 1..{model.n_modes}, got {mode!r}")
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != model.dim:
        raise InputError(f"regressor has dimension {x.shape[0]}, model expects {model.dim}")
    return clip(float(model.submodels[int(mode) - 1] @ x), spec)


def switched_complexity_lambda(model: SwitchedModel) -> float:
    """Frobenius norm ``sqrt(sum_j ||w_j||^2)`` of the stacked submodels."""
    return math.sqrt(math.fsum(float(v) ** 2 for w in model.submodels for v in w))
