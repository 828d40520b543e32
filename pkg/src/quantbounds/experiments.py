"""Configuration-driven experiment pipelines.

Every experiment is ``simulate -> fit -> bound``. The stage functions
(:func:`simulate_from_config`, :func:`fit_from_config`, :func:`table1_rows`,
:func:`table2_result`, ...) are the same ones the CLI subcommands call, so a
staged run through files reproduces the monolithic run exactly.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .bounds import bound_fast, bound_iid, bound_rademacher, bound_slow
from .exceptions import InputError
from .identify import FitReport, fit_ols, fit_switched
from .mixing import MixingEnvelope, adjusted_confidences, min_feasible_spacing
from .model_class import ClipSpec, QuantizedModelClass, SwitchedModel, switched_complexity_lambda
from .resampling import (
    LabeledSeries,
    empirical_risk,
    make_block_plan,
    make_spaced_plan,
    spaced_empirical_risk,
)
from .simulate import Ar1Config, SwitchedConfig, simulate_ar1, simulate_switched
from .validation import check_delta

EXPERIMENTS = ("table1", "fig3", "table2", "custom")

SWITCHED_PARAMS = [
    [-0.4, 0.25, -0.15, 0.08],
    [1.55, -0.58, -2.10, 0.96],
    [1.00, -0.24, -0.65, 0.30],
]

AR1_SYSTEM = {"kind": "ar1", "theta": 0.5, "noise_std": 1.0, "n": 200_000, "burn_in": 1000, "r": 3.0,
              "clip_regressors": False}
SWITCHED_SYSTEM = {"kind": "switched", "submodels": SWITCHED_PARAMS, "na": 2, "nb": 2, "snr_db": 30.0,
                   "n": 80_000, "burn_in": 1000, "r": 3.0, "clip_regressors": False}

DEFAULTS: dict[str, dict[str, Any]] = {
    "table1": {
        "system": AR1_SYSTEM,
        "bits": 32,
        "delta": 0.05,
        "mixing": {"kind": "exponential", "C": 0.4, "rho": 0.5},
        "a": [17, 21, 25, 30, 40],
        "out": "table1.csv",
    },
    "fig3": {
        "system": AR1_SYSTEM,
        "bits": 32,
        "delta": 0.05,
        "mixing": {"kind": "exponential", "C": 0.4, "rho": 0.5},
        "a": "auto",
        "n_grid": [int(round(v)) for v in np.geomspace(1e4, 2e5, 10)],
        "out": "fig3.csv",
    },
    "table2": {
        "system": SWITCHED_SYSTEM,
        "bits": 32,
        "delta": 0.05,
        "mixing": {"kind": "zero"},
        "fixed_confidence": 0.01,
        "a": 21,
        "identify": {"restarts": 10, "max_iter": 100, "drop_saturated": True},
        "lambda_source": "fitted",
        "out": "table2.csv",
    },
}
DEFAULTS["custom"] = DEFAULTS["table1"]

SWEEP_COLUMNS = [
    "a", "mu", "mu_prime", "emp", "emp_spaced", "ci_slow", "total_slow", "ci_fast", "total_fast",
    "feasible_slow", "feasible_fast",
    "free_slow", "addon_slow", "free_fast", "addon_fast", "delta_prime", "delta_dprime",
]
FIG3_COLUMNS = ["n", "total_slow", "total_fast", "a", "mu", "mu_prime", "emp", "emp_spaced", "ci_slow",
                "ci_fast", "feasible_slow", "feasible_fast"]
TABLE2_COLUMNS = ["bound", "mixing_free", "full_ci", "emp", "total", "effective_samples",
                  "adjusted_confidence", "feasible"]


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass
class ExperimentConfig:
    """Declarative experiment description; see :data:`DEFAULTS` for the keys."""

    experiment: str = "table1"
    seed: int = 0
    system: dict = field(default_factory=lambda: dict(AR1_SYSTEM))
    bits: int = 32
    delta: float = 0.05
    mixing: dict = field(default_factory=lambda: {"kind": "zero"})
    fixed_confidence: float | None = None
    a: Any = 17
    n_grid: list = field(default_factory=list)
    identify: dict = field(default_factory=dict)
    lambda_source: str = "fitted"
    out: str = "out.csv"

    @classmethod
    def from_dict(cls, d: dict | None = None, **overrides) -> "ExperimentConfig":
        d = dict(d or {})
        experiment = overrides.get("experiment") or d.get("experiment", "table1")
        if experiment not in EXPERIMENTS:
            raise InputError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
        merged = _merge(DEFAULTS[experiment], d)
        merged["experiment"] = experiment
        for k, v in overrides.items():
            if v is None:
                continue
            if k == "n":
                merged["system"]["n"] = int(v)
            else:
                merged[k] = v
        unknown = set(merged) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**merged)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        check_delta(self.delta)
        if self.fixed_confidence is not None:
            check_delta(self.fixed_confidence, "fixed_confidence")
        a_values = self.a if isinstance(self.a, list) else [self.a]
        for a in a_values:
            if a != "auto" and not (isinstance(a, int) and a >= 1):
                raise InputError(f"block lengths must be integers >= 1 or 'auto', got {a!r}")
        if self.lambda_source not in ("fitted", "true"):
            raise InputError(f"lambda_source must be 'fitted' or 'true', got {self.lambda_source!r}")
        self.envelope  # noqa: B018  (validates the mixing fragment)

    def to_dict(self) -> dict:
        return {k: copy.deepcopy(getattr(self, k)) for k in self.__dataclass_fields__}

    @property
    def envelope(self) -> MixingEnvelope:
        return MixingEnvelope.from_dict(self.mixing)

    @property
    def clip(self) -> ClipSpec:
        return ClipSpec(float(self.system.get("r", 3.0)))

    @property
    def is_switched(self) -> bool:
        return self.system.get("kind", "ar1") == "switched"

    @property
    def true_model(self) -> SwitchedModel:
        s = self.system
        return SwitchedModel(tuple(s["submodels"]), (int(s["na"]), int(s["nb"])))

    def model_class(self, param_count: int) -> QuantizedModelClass:
        return QuantizedModelClass(int(self.bits), param_count)


# -- stages -------------------------------------------------------------------

def simulate_from_config(cfg: ExperimentConfig, n: int | None = None):
    """Simulate the configured system; returns ``(series, modes or None)``."""
    s = cfg.system
    n = int(n or s["n"])
    if cfg.is_switched:
        sc = SwitchedConfig(cfg.true_model, float(s.get("snr_db", 30.0)), n, int(cfg.seed),
                            int(s.get("burn_in", 1000)), cfg.clip, bool(s.get("clip_regressors", False)),
                            s.get("noise_std"))
        return simulate_switched(sc)
    ac = Ar1Config(float(s.get("theta", 0.5)), float(s.get("noise_std", 1.0)), n, int(cfg.seed),
                   int(s.get("burn_in", 1000)), cfg.clip, bool(s.get("clip_regressors", False)))
    return simulate_ar1(ac), None


def fit_from_config(cfg: ExperimentConfig, series: LabeledSeries) -> FitReport:
    if cfg.is_switched:
        ident = {"restarts": 10, "max_iter": 100, "drop_saturated": True, **cfg.identify}
        C = len(cfg.system["submodels"])
        orders = (int(cfg.system["na"]), int(cfg.system["nb"]))
        return fit_switched(series, C, int(ident["restarts"]), int(ident["max_iter"]), int(cfg.seed),
                            bool(ident["drop_saturated"]), orders=orders)
    return fit_ols(series, bool(cfg.identify.get("drop_saturated", False)))


def _loss(model) -> str:
    return "switching" if isinstance(model, SwitchedModel) else "squared"


def sweep_row(series: LabeledSeries, model, cfg: ExperimentConfig, a: int, emp: float | None = None) -> dict:
    """Slow and fast bounds for one block length ``a``."""
    loss = _loss(model)
    n = len(series)
    if emp is None:
        emp = empirical_risk(series, model, loss)
    emp_spaced = spaced_empirical_risk(series, make_spaced_plan(n, a), model, loss)
    bits = cfg.model_class(model.param_count).total_bits
    M = series.loss_bound
    env = cfg.envelope
    fixed = cfg.fixed_confidence
    slow = bound_slow(emp, n, a, bits, M, cfg.delta, env, fixed_confidence=fixed)
    fast = bound_fast(emp_spaced, n, a, bits, M, cfg.delta, env, fixed_confidence=fixed)
    return {
        "a": a,
        "mu": slow.effective_samples,
        "mu_prime": fast.effective_samples,
        "emp": emp,
        "emp_spaced": emp_spaced,
        "ci_slow": slow.confidence_interval,
        "total_slow": slow.total,
        "ci_fast": fast.confidence_interval,
        "total_fast": fast.total,
        "feasible_slow": slow.feasible,
        "feasible_fast": fast.feasible,
        "free_slow": slow.mixing_free,
        "addon_slow": slow.mixing_addon,
        "free_fast": fast.mixing_free,
        "addon_fast": fast.mixing_addon,
        "delta_prime": slow.adjusted_confidence,
        "delta_dprime": fast.adjusted_confidence,
    }


def auto_spacing(cfg: ExperimentConfig, n: int) -> int:
    """Smallest ``a`` satisfying both the slow and the fast constraint."""
    env = cfg.envelope
    return max(min_feasible_spacing(cfg.delta, n, env, "slow"), min_feasible_spacing(cfg.delta, n, env, "fast"))


def table1_rows(series: LabeledSeries, model, cfg: ExperimentConfig) -> list[dict]:
    a_values = cfg.a if isinstance(cfg.a, list) else [cfg.a]
    a_values = [auto_spacing(cfg, len(series)) if a == "auto" else a for a in a_values]
    emp = empirical_risk(series, model, _loss(model))
    return [sweep_row(series, model, cfg, int(a), emp) for a in a_values]


def fig3_rows(series: LabeledSeries, cfg: ExperimentConfig) -> list[dict]:
    """Bounds on growing prefixes; ``series`` must cover the largest grid point.

    A grid value ``n`` counts observed outputs, so its prefix holds ``n - 1``
    pairs (matching :func:`simulate_ar1`).
    """
    grid = sorted(int(v) for v in cfg.n_grid)
    if not grid or grid[-1] - 1 > len(series):
        raise InputError("the simulated series is shorter than the largest grid point")
    rows = []
    for n_obs in grid:
        part = series.head(n_obs - 1)
        fit = fit_from_config(cfg, part)
        a = auto_spacing(cfg, len(part)) if cfg.a == "auto" else int(cfg.a)
        row = sweep_row(part, fit.model, cfg, a, fit.objective)
        row["n"] = n_obs
        rows.append(row)
    return rows


def rademacher_norms(series: LabeledSeries, a: int) -> np.ndarray:
    """``||x||^2`` at the first sample of each odd block (0-based ``2a*i``)."""
    plan = make_block_plan(len(series), a)
    idx = 2 * a * np.arange(plan.mu)
    return np.einsum("ij,ij->i", series.X[idx], series.X[idx])


def table2_result(series: LabeledSeries, fit: FitReport, cfg: ExperimentConfig):
    """Rows of the switched-system comparison and the full JSON payload."""
    model = fit.model
    if not isinstance(model, SwitchedModel):
        raise InputError("the switched comparison needs a switched model")
    a = int(cfg.a[0] if isinstance(cfg.a, list) else cfg.a)
    n = len(series)
    M = series.loss_bound
    bits = cfg.model_class(model.param_count).total_bits
    env, fixed = cfg.envelope, cfg.fixed_confidence
    emp = empirical_risk(series, model, "switching")
    emp_spaced = spaced_empirical_risk(series, make_spaced_plan(n, a), model, "switching")
    lam_model = cfg.true_model if cfg.lambda_source == "true" else model
    lam = switched_complexity_lambda(lam_model)
    norms = rademacher_norms(series, a)
    mu = norms.shape[0]
    reports = {
        "rademacher": bound_rademacher(emp, norms, series.clip.radius, lam, model.n_modes, mu, cfg.delta, env, a,
                                       fixed_confidence=fixed),
        "slow": bound_slow(emp, n, a, bits, M, cfg.delta, env, fixed_confidence=fixed),
        "fast": bound_fast(emp_spaced, n, a, bits, M, cfg.delta, env, fixed_confidence=fixed),
    }
    rows = [
        {
            "bound": name,
            "mixing_free": rep.mixing_free,
            "full_ci": rep.confidence_interval,
            "emp": rep.empirical_risk,
            "total": rep.total,
            "effective_samples": rep.effective_samples,
            "adjusted_confidence": rep.adjusted_confidence,
            "feasible": rep.feasible,
        }
        for name, rep in reports.items()
    ]
    payload = {
        "config": {k: v for k, v in cfg.to_dict().items() if k != "out"},
        "n_pairs": n,
        "a": a,
        "lambda": lam,
        "empirical_risk": emp,
        "empirical_risk_spaced": emp_spaced,
        "fit": {**fit.to_dict(), "submodels": [w.tolist() for w in model.submodels]},
        "feasibility": vars(adjusted_confidences(cfg.delta, n, a, env)),
        "reports": {k: r.to_dict() for k, r in reports.items()},
    }
    return rows, payload


# -- monolithic runs ------------------------------------------------------------

def run_table1(cfg: ExperimentConfig) -> list[dict]:
    series, _ = simulate_from_config(cfg)
    fit = fit_from_config(cfg, series)
    return table1_rows(series, fit.model, cfg)


def run_fig3(cfg: ExperimentConfig) -> list[dict]:
    series, _ = simulate_from_config(cfg, n=max(int(v) for v in cfg.n_grid))
    return fig3_rows(series, cfg)


def run_table2(cfg: ExperimentConfig):
    series, _ = simulate_from_config(cfg)
    fit = fit_from_config(cfg, series)
    return table2_result(series, fit, cfg)


def bounds_from_risk(d: dict) -> list:
    """Evaluate bounds from a hand-written risk file (no data needed).

    Keys: ``method`` (``slow``, ``fast``, ``iid``, ``rademacher`` or a list),
    ``emp``, ``emp_spaced``, ``n``, ``a``, ``total_bits``, ``M``, ``delta``,
    optional ``mixing`` and ``fixed_confidence``; the Rademacher bound also
    needs ``sq_norms``, ``r``, ``lambda`` and ``C``.
    """
    methods = d.get("method", ["slow", "fast"])
    methods = [methods] if isinstance(methods, str) else list(methods)
    env = MixingEnvelope.from_dict(d.get("mixing", {"kind": "zero"}))
    fixed = d.get("fixed_confidence")
    try:
        out = []
        for m in methods:
            if m == "slow":
                out.append(bound_slow(d["emp"], d["n"], d["a"], d["total_bits"], d["M"], d["delta"], env,
                                      fixed_confidence=fixed))
            elif m == "fast":
                out.append(bound_fast(d.get("emp_spaced", d.get("emp")), d["n"], d["a"], d["total_bits"], d["M"],
                                      d["delta"], env, fixed_confidence=fixed))
            elif m == "iid":
                out.append(bound_iid(d["emp"], d["n"], d["total_bits"] * math.log(2.0), d["M"], d["delta"]))
            elif m == "rademacher":
                norms = d["sq_norms"]
                out.append(bound_rademacher(d["emp"], norms, d["r"], d["lambda"], d["C"], len(norms), d["delta"],
                                            env, d.get("a", 1), fixed_confidence=fixed))
            else:
                raise InputError(f"unknown bound method {m!r}")
    except KeyError as exc:
        raise InputError(f"risk file is missing field {exc}") from None
    return out


def all_infeasible(rows: list[dict]) -> bool:
    flags = [v for row in rows for k, v in row.items() if k.startswith("feasible")]
    return bool(flags) and not any(flags)
