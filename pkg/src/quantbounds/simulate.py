"""Seeded generators for the AR(1) and switched ARX benchmark systems.

Randomness comes from NumPy's ``PCG64`` bit generator seeded through
``SeedSequence(seed)``. Draws are made in fixed blocks (all inputs, then all
modes, then all noise) so that the sequence of draws does not depend on the
control flow of the recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DivergenceError, InputError
from .model_class import ClipSpec, SwitchedModel, clip
from .resampling import LabeledSeries
from .validation import check_positive, check_positive_int

DIVERGENCE_LIMIT = 1e6


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for ``seed`` and an optional sub-stream key."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, stream)])))


@dataclass(frozen=True)
class Ar1Config:
    theta: float = 0.5
    noise_std: float = 1.0
    n: int = 200_000
    seed: int = 0
    burn_in: int = 1000
    clip: ClipSpec = field(default_factory=lambda: ClipSpec(3.0))
    clip_regressors: bool = False

    def __post_init__(self):
        if not abs(self.theta) < 1:
            raise InputError(f"|theta| must be < 1 for stationarity, got {self.theta}")
        check_positive(self.noise_std, "noise_std", allow_zero=True)
        check_positive_int(self.n, "n")
        check_positive_int(self.burn_in, "burn_in", minimum=0)


@dataclass(frozen=True)
class SwitchedConfig:
    model: SwitchedModel
    snr_db: float = 30.0
    n: int = 80_000
    seed: int = 0
    burn_in: int = 1000
    clip: ClipSpec = field(default_factory=lambda: ClipSpec(3.0))
    clip_regressors: bool = False
    noise_std: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.snr_db):
            raise InputError("snr_db must be finite")
        if self.noise_std is not None:
            check_positive(self.noise_std, "noise_std", allow_zero=True)
        na, nb = self.model.orders
        if na + nb != self.model.dim:
            raise InputError("the model must declare orders (na, nb) with na + nb = d")
        check_positive_int(self.n, "n")
        check_positive_int(self.burn_in, "burn_in", minimum=0)


def calibrate_noise_from_snr(signal_power: float, snr_db: float) -> float:
    """Noise standard deviation giving ``snr_db`` against ``signal_power``."""
    if not signal_power > 0:
        raise InputError(f"signal power must be > 0, got {signal_power!r}")
    return math.sqrt(signal_power / 10.0 ** (snr_db / 10.0))


def simulate_ar1(cfg: Ar1Config) -> LabeledSeries:
    """Simulate ``y_t = theta y_{t-1} + e_t`` from ``y_0 = 0``.

    ``cfg.n`` outputs are observed after ``burn_in`` steps; the first has no
    observed predecessor, so the series holds the ``n - 1`` pairs
    ``(y_{t-1}, y_t)``. The raw (unclipped) observed outputs are kept in
    ``series.meta["raw_y"]``.
    """
    if cfg.n < 2:
        raise InputError("need at least two observations to form a pair")
    rng = make_rng(cfg.seed)
    total = cfg.burn_in + cfg.n
    noise = cfg.noise_std * rng.standard_normal(total)
    y = np.empty(total)
    prev, theta = 0.0, float(cfg.theta)
    for t in range(total):
        prev = theta * prev + float(noise[t])
        y[t] = prev
    raw = y[cfg.burn_in :]
    x = clip(raw[:-1], cfg.clip) if cfg.clip_regressors else raw[:-1]
    meta = {"raw_y": raw, "theta": cfg.theta, "noise_std": cfg.noise_std, "orders": (1, 0)}
    return LabeledSeries(x[:, None], raw[1:], cfg.clip, meta)


def _run_switched(W, na, nb, u, modes, noise):
    """Unclipped recursion ``y_t = w_{s_t} . x_t + e_t`` from a zero state."""
    total = u.shape[0]
    start = max(na, nb)
    y = np.zeros(total)
    rows = W.tolist()
    uu = u.tolist()
    for t in range(start, total):
        w = rows[modes[t]]
        acc = float(noise[t])
        for k in range(na):
            acc += w[k] * y[t - 1 - k]
        for k in range(nb):
            acc += w[na + k] * uu[t - 1 - k]
        if not abs(acc) <= DIVERGENCE_LIMIT:
            raise DivergenceError(f"trajectory diverged at t={t} (|y| = {abs(acc):.3g})")
        y[t] = acc
    return y


def simulate_switched(cfg: SwitchedConfig) -> tuple[LabeledSeries, np.ndarray]:
    """Simulate the switched ARX system with i.i.d. uniform modes.

    A first noiseless pass over the same inputs and modes measures the
    signal power (mean square output over the emitted horizon); the second
    pass adds white Gaussian noise calibrated to ``snr_db``. Setting
    ``cfg.noise_std`` skips the calibration, which is needed when the
    noiseless output is identically zero. Of the ``n``
    observed outputs, the first ``max(na, nb)`` only serve as lags, so the
    series holds ``n - max(na, nb)`` pairs. Returns the series and the true
    1-based mode sequence, which is for diagnostics only.
    """
    model = cfg.model
    na, nb = model.orders
    W = model.weight_matrix
    start = max(na, nb)
    if cfg.n <= start:
        raise InputError(f"need more than {start} observations to form a pair")
    total = cfg.burn_in + cfg.n
    rng = make_rng(cfg.seed)
    u = rng.standard_normal(total)
    modes = rng.integers(0, model.n_modes, size=total).tolist()
    unit_noise = rng.standard_normal(total)

    observed = slice(cfg.burn_in, total)
    clean = _run_switched(W, na, nb, u, modes, np.zeros(total))
    power = float(np.mean(clean[observed] ** 2))
    sigma = calibrate_noise_from_snr(power, cfg.snr_db) if cfg.noise_std is None else float(cfg.noise_std)
    noise = sigma * unit_noise
    raw = _run_switched(W, na, nb, u, modes, noise)

    ylags = clip(raw, cfg.clip) if cfg.clip_regressors else raw
    t = np.arange(cfg.burn_in + start, total)
    cols = [ylags[t - 1 - k] for k in range(na)] + [u[t - 1 - k] for k in range(nb)]
    X = np.column_stack(cols)
    noise_power = float(np.mean(noise[observed] ** 2))
    if noise_power == 0:
        snr = math.inf
    elif power == 0:
        snr = -math.inf
    else:
        snr = 10.0 * math.log10(power / noise_power)
    meta = {
        "raw_y": raw[observed],
        "signal_power": power,
        "noise_std": sigma,
        "orders": (na, nb),
        "measured_snr_db": snr,
    }
    series = LabeledSeries(X, raw[t], cfg.clip, meta)
    return series, np.asarray(modes, dtype=np.int64)[t] + 1
