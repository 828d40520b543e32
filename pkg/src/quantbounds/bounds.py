"""Uniform generalization bounds for finite (quantized) model classes.

Four bounds are provided:

* :func:`bound_iid` -- Hoeffding plus a union bound over ``2**(Bp)`` models.
* :func:`bound_slow` -- the same argument on the two interleaved block
  sequences of a beta-mixing series, rate ``1/sqrt(mu)``.
* :func:`bound_fast` -- Bernstein on ``mu' = n // a`` spaced points, rate
  close to ``1/mu'`` when the spaced empirical risk is small.
* :func:`bound_rademacher` -- the mixing-based Rademacher bound for switched
  linear models used as a baseline.

Every report also carries a split of the confidence interval into a part
that does not depend on the mixing coefficients and a mixing add-on. The
split comes from ``sqrt(x + y) <= sqrt(x) + sqrt(y)`` and is an upper
decomposition: the two parts sum to at least the interval.

All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .exceptions import InputError
from .mixing import MixingEnvelope, beta
from .validation import check_delta, check_positive, check_positive_int

LN2 = math.log(2.0)
METHODS = ("iid", "slow", "fast", "rademacher")


@dataclass(frozen=True)
class BoundReport:
    method: str
    empirical_risk: float
    confidence_interval: float
    total: float
    mixing_free: float
    mixing_addon: float
    effective_samples: int
    adjusted_confidence: float
    feasible: bool
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _infeasible(method, emp, samples, adjusted, inputs) -> BoundReport:
    inf = math.inf
    return BoundReport(method, emp, inf, inf, inf, inf, samples, adjusted, False, inputs)


def bound_iid(emp: float, n: int, complexity_nats: float, M: float, delta: float) -> BoundReport:
    """Bound for i.i.d. data over a class of at most ``exp(complexity_nats)`` models."""
    n = check_positive_int(n, "n")
    M = check_positive(M, "M", allow_zero=True)
    complexity_nats = check_positive(complexity_nats, "complexity_nats", allow_zero=True)
    delta = check_delta(delta)
    log_conf = math.log(1.0 / delta)
    ci = M * math.sqrt((complexity_nats + log_conf) / n)
    return BoundReport(
        method="iid",
        empirical_risk=emp,
        confidence_interval=ci,
        total=emp + ci,
        mixing_free=M * math.sqrt(complexity_nats / n),
        mixing_addon=M * math.sqrt(log_conf / n),
        effective_samples=n,
        adjusted_confidence=delta,
        feasible=True,
        inputs={"n": n, "complexity_nats": complexity_nats, "M": M, "delta": delta},
    )


def bound_slow(
    emp: float,
    n: int,
    a: int,
    total_bits: int,
    M: float,
    delta: float,
    env: MixingEnvelope | None = None,
    *,
    fixed_confidence: float | None = None,
) -> BoundReport:
    """Block-decomposition bound with ``mu = n // (2a)`` block pairs.

    ``delta' = delta - 2 (mu - 1) beta(a)`` unless ``fixed_confidence`` is
    given, in which case that value is used for ``delta'`` directly and the
    envelope is ignored.
    """
    total_bits = check_positive_int(total_bits, "total_bits", minimum=0)
    M = check_positive(M, "M", allow_zero=True)
    delta = check_delta(delta)
    n = check_positive_int(n, "n")
    a = check_positive_int(a, "a")
    mu = n // (2 * a)
    if mu < 1:
        raise InputError(f"block length a={a} leaves no block pair in n={n} samples")
    if fixed_confidence is not None:
        dp = check_delta(fixed_confidence, "fixed_confidence")
    elif env is None or env.kind == "zero":
        dp = delta
    else:
        dp = delta - 2 * (mu - 1) * beta(env, a)
    inputs = {
        "n": n, "a": a, "total_bits": total_bits, "M": M, "delta": delta,
        "mixing": (env or MixingEnvelope.zero()).to_dict(), "fixed_confidence": fixed_confidence,
    }
    if dp <= 0:
        return _infeasible("slow", emp, mu, dp, inputs)
    complexity = (total_bits + 1) * LN2
    log_conf = math.log(1.0 / dp)
    ci = M * math.sqrt(2.0 * (complexity + log_conf) / mu)
    return BoundReport(
        method="slow",
        empirical_risk=emp,
        confidence_interval=ci,
        total=emp + ci,
        mixing_free=M * math.sqrt(2.0 * complexity / mu),
        mixing_addon=M * math.sqrt(2.0 * log_conf / mu),
        effective_samples=mu,
        adjusted_confidence=dp,
        feasible=True,
        inputs=inputs,
    )


def _fast_terms(emp_spaced, mu_prime, M, nats):
    return math.sqrt(2.0 * M * emp_spaced * nats / mu_prime), 4.0 * M * nats / mu_prime


def bound_fast(
    emp_spaced: float,
    n: int,
    a: int,
    total_bits: int,
    M: float,
    delta: float,
    env: MixingEnvelope | None = None,
    *,
    fixed_confidence: float | None = None,
) -> BoundReport:
    """Bernstein bound on the spaced subsample of ``mu' = n // a`` points.

    With ``A = Bp ln 2 + ln(1/delta'')`` the interval is
    ``sqrt(2 M A L / mu') + 4 M A / mu'`` where ``L`` is the spaced
    empirical risk.
    """
    if not (emp_spaced >= 0 and math.isfinite(emp_spaced)):
        raise InputError(f"emp_spaced must be finite and >= 0, got {emp_spaced!r}")
    total_bits = check_positive_int(total_bits, "total_bits", minimum=0)
    M = check_positive(M, "M", allow_zero=True)
    delta = check_delta(delta)
    n = check_positive_int(n, "n")
    a = check_positive_int(a, "a")
    mu_prime = n // a
    if mu_prime < 1:
        raise InputError(f"spacing a={a} exceeds n={n}")
    if fixed_confidence is not None:
        ddp = check_delta(fixed_confidence, "fixed_confidence")
    elif env is None or env.kind == "zero":
        ddp = delta
    else:
        ddp = delta - (mu_prime - 1) * beta(env, a)
    inputs = {
        "n": n, "a": a, "total_bits": total_bits, "M": M, "delta": delta,
        "mixing": (env or MixingEnvelope.zero()).to_dict(), "fixed_confidence": fixed_confidence,
    }
    if ddp <= 0:
        return _infeasible("fast", emp_spaced, mu_prime, ddp, inputs)
    free_nats = total_bits * LN2
    log_conf = math.log(1.0 / ddp)
    var_core, lin_core = _fast_terms(emp_spaced, mu_prime, M, free_nats)
    var_mix, lin_mix = _fast_terms(emp_spaced, mu_prime, M, log_conf)
    var_all, lin_all = _fast_terms(emp_spaced, mu_prime, M, free_nats + log_conf)
    ci = var_all + lin_all
    return BoundReport(
        method="fast",
        empirical_risk=emp_spaced,
        confidence_interval=ci,
        total=emp_spaced + ci,
        mixing_free=var_core + lin_core,
        mixing_addon=var_mix + lin_mix,
        effective_samples=mu_prime,
        adjusted_confidence=ddp,
        feasible=True,
        inputs=inputs,
    )


def bound_rademacher(
    emp: float,
    regressor_sq_norms,
    r: float,
    lam: float,
    C: int,
    mu: int,
    delta: float,
    env: MixingEnvelope | None = None,
    a: int = 1,
    *,
    fixed_confidence: float | None = None,
) -> BoundReport:
    """Rademacher-complexity bound for ``C``-mode switched linear models.

    ``regressor_sq_norms`` holds ``||x||^2`` at the first sample of each
    odd block, i.e. at 0-based indices ``2a*i`` for ``i < mu``.
    """
    norms = [float(v) for v in regressor_sq_norms]
    mu = check_positive_int(mu, "mu")
    if len(norms) != mu:
        raise InputError(f"expected {mu} regressor norms, got {len(norms)}")
    if any(v < 0 or not math.isfinite(v) for v in norms):
        raise InputError("squared norms must be finite and nonnegative")
    r = check_positive(r, "r")
    lam = check_positive(lam, "lambda", allow_zero=True)
    C = check_positive_int(C, "C")
    delta = check_delta(delta)
    a = check_positive_int(a, "a")
    if fixed_confidence is not None:
        dtp = check_delta(fixed_confidence, "fixed_confidence")
    elif env is None or env.kind == "zero":
        dtp = delta
    else:
        dtp = delta - 4 * (mu - 1) * beta(env, a)
    inputs = {
        "mu": mu, "a": a, "r": r, "lambda": lam, "C": C, "delta": delta,
        "mixing": (env or MixingEnvelope.zero()).to_dict(), "fixed_confidence": fixed_confidence,
        "sum_sq_norms": math.fsum(norms),
    }
    if dtp <= 0:
        return _infeasible("rademacher", emp, mu, dtp, inputs)
    complexity = 16.0 * r * lam * math.sqrt(C * math.fsum(norms)) / mu
    mixing = 12.0 * r * r * math.sqrt(math.log(4.0 / dtp) / (2.0 * mu))
    ci = complexity + mixing
    return BoundReport(
        method="rademacher",
        empirical_risk=emp,
        confidence_interval=ci,
        total=emp + ci,
        mixing_free=complexity,
        mixing_addon=mixing,
        effective_samples=mu,
        adjusted_confidence=dtp,
        feasible=True,
        inputs=inputs,
    )


def decompose(report: BoundReport) -> tuple[float, float]:
    """``(mixing_free, mixing_addon)`` of a feasible report."""
    if not report.feasible:
        raise InputError(f"{report.method} report is infeasible and has no decomposition")
    return report.mixing_free, report.mixing_addon
