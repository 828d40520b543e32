"""Beta-mixing envelopes and the adjusted confidence levels they induce."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .exceptions import InfeasibleError, InputError, MissingDataError
from .validation import check_delta, check_positive_int

KINDS = ("exponential", "tabulated", "zero")
CONSTRAINTS = ("slow", "fast", "rademacher")


@dataclass(frozen=True)
class MixingEnvelope:
    """Upper envelope ``k -> beta(k)`` on the mixing coefficients of a process.

    Use the :meth:`exponential`, :meth:`tabulated` and :meth:`zero`
    constructors rather than filling the fields by hand.
    """

    kind: str = "zero"
    C: float = 0.0
    rho: float = 0.0
    table: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown envelope kind {self.kind!r}")
        if self.kind == "exponential":
            if not (self.C >= 0 and math.isfinite(self.C)):
                raise InputError(f"C must be finite and >= 0, got {self.C!r}")
            if not 0 <= self.rho < 1:
                raise InputError(f"rho must lie in [0, 1), got {self.rho!r}")
        if self.kind == "tabulated":
            table = {int(k): min(1.0, max(0.0, float(v))) for k, v in dict(self.table).items()}
            if any(k < 1 for k in table):
                raise InputError("tabulated lags must be >= 1")
            ks = sorted(table)
            for k0, k1 in zip(ks, ks[1:]):
                if table[k1] > table[k0]:
                    raise InputError(f"tabulated beta must be nonincreasing: beta({k1}) > beta({k0})")
            object.__setattr__(self, "table", dict(sorted(table.items())))

    @classmethod
    def exponential(cls, C: float, rho: float) -> "MixingEnvelope":
        return cls("exponential", float(C), float(rho))

    @classmethod
    def tabulated(cls, table: Mapping) -> "MixingEnvelope":
        return cls("tabulated", table=table)

    @classmethod
    def zero(cls) -> "MixingEnvelope":
        return cls("zero")

    @classmethod
    def from_dict(cls, cfg: Mapping) -> "MixingEnvelope":
        kind = cfg.get("kind", "zero")
        if kind == "exponential":
            return cls.exponential(cfg["C"], cfg["rho"])
        if kind == "tabulated":
            return cls.tabulated(cfg["table"])
        if kind == "zero":
            return cls.zero()
        raise InputError(f"unknown envelope kind {kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "exponential":
            return {"kind": "exponential", "C": self.C, "rho": self.rho}
        if self.kind == "tabulated":
            return {"kind": "tabulated", "table": {str(k): v for k, v in self.table.items()}}
        return {"kind": "zero"}

    def __call__(self, k: int) -> float:
        return beta(self, k)


def beta(env: MixingEnvelope, k: int) -> float:
    k = check_positive_int(k, "k")
    if env.kind == "zero":
        return 0.0
    if env.kind == "exponential":
        return min(1.0, env.C * env.rho ** k)
    try:
        return env.table[k]
    except KeyError:
        raise MissingDataError(f"beta({k}) is not tabulated") from None


@dataclass(frozen=True)
class Feasibility:
    """Effective sample sizes and adjusted confidences for one ``(n, a)`` pair."""

    delta: float
    a: int
    mu: int
    mu_prime: int
    beta_a: float
    delta_prime: float
    delta_dprime: float
    delta_tprime: float

    @property
    def slow(self) -> bool:
        return self.delta_prime > 0

    @property
    def fast(self) -> bool:
        return self.delta_dprime > 0

    @property
    def rademacher(self) -> bool:
        return self.delta_tprime > 0

    def feasible(self, which: str) -> bool:
        if which not in CONSTRAINTS:
            raise InputError(f"unknown constraint {which!r}; expected one of {CONSTRAINTS}")
        return getattr(self, which)


def adjusted_confidences(delta: float, n: int, a: int, env: MixingEnvelope) -> Feasibility:
    """Block counts and the three mixing-adjusted confidence levels.

    Negative adjusted confidences are returned unchanged; check the
    ``slow``/``fast``/``rademacher`` flags before using them.
    """
    delta = check_delta(delta)
    n = check_positive_int(n, "n")
    a = check_positive_int(a, "a")
    mu = n // (2 * a)
    if mu < 1:
        raise InputError(f"block length a={a} leaves no block pair in n={n} samples")
    mu_prime = n // a
    b = beta(env, a)
    return Feasibility(
        delta=delta,
        a=a,
        mu=mu,
        mu_prime=mu_prime,
        beta_a=b,
        delta_prime=delta - 2 * (mu - 1) * b,
        delta_dprime=delta - (mu_prime - 1) * b,
        delta_tprime=delta - 4 * (mu - 1) * b,
    )


def min_feasible_spacing(delta: float, n: int, env: MixingEnvelope, which: str = "slow") -> int:
    """Smallest block length ``a`` whose adjusted confidence is positive."""
    if which not in CONSTRAINTS:
        raise InputError(f"unknown constraint {which!r}; expected one of {CONSTRAINTS}")
    n = check_positive_int(n, "n", minimum=2)
    for a in range(1, n // 2 + 1):
        if adjusted_confidences(delta, n, a, env).feasible(which):
            return a
    raise InfeasibleError(
        f"no block length a <= {n // 2} makes the {which} adjusted confidence positive "
        f"(delta={delta}, n={n})"
    )
