"""Acceptance criteria, one test per criterion.

Every test prints a ``[PASS]`` or ``[FAIL]`` line, which is also repeated in
the terminal summary. Run alone with ``pytest tests/test_acceptance.py``.
"""

import math
import time
import timeit

import numpy as np
import pytest

from quantbounds import (
    ClipSpec,
    LabeledSeries,
    MixingEnvelope,
    QuantizedModelClass,
    bound_fast,
    bound_iid,
    bound_rademacher,
    bound_slow,
    block_average_losses,
    empirical_risk,
    fit_ols,
    fit_switched,
    make_block_plan,
    make_spaced_plan,
    min_feasible_spacing,
    SwitchedConfig,
    quantize,
    simulate_switched,
    switched_complexity_lambda,
)
from quantbounds.cli import main as cli_main
from quantbounds.experiments import ExperimentConfig, rademacher_norms, run_fig3, run_table1, run_table2
from quantbounds.simulate import make_rng

pytestmark = pytest.mark.acceptance

RESULTS: list[str] = []

TABLE1_SLOW = {17: 3.312, 21: 3.701, 25: 4.036, 30: 4.421, 40: 5.105}
TABLE1_FAST = {17: 0.630, 21: 0.729, 25: 0.834, 30: 0.954, 40: 1.183}


def record(cid: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _within(x, target, tol):
    return abs(x - target) <= tol


# -- 1 --------------------------------------------------------------------

def test_criterion_1_slow_formula_rows():
    def run():
        return bound_slow(0.0, 80_000, 21, 384, 36.0, 0.05, fixed_confidence=0.01)

    rep = run()
    secs = min(timeit.repeat(run, number=20, repeat=5)) / 20
    ok = (
        rep.effective_samples == 1904
        and _within(rep.mixing_free, 19.06, 0.02)
        and _within(rep.confidence_interval, 19.23, 0.02)
        and secs < 1e-3
    )
    record("1", ok, f"mu={rep.effective_samples} free={rep.mixing_free:.4f} full={rep.confidence_interval:.4f} "
                    f"time={secs * 1e6:.1f}us")


# -- 2 --------------------------------------------------------------------

def test_criterion_2_fast_rate_row():
    core = bound_fast(0.0, 80_000, 21, 384, 36.0, 0.05, fixed_confidence=0.01)
    t0 = time.perf_counter()
    rows, payload = run_table2(ExperimentConfig.from_dict({"experiment": "table2"}))
    secs = time.perf_counter() - t0
    fast = next(r for r in rows if r["bound"] == "fast")
    ok = (
        core.effective_samples == 3809
        and _within(core.confidence_interval, 10.236, 0.005)
        and 10.05 <= fast["mixing_free"] <= 10.45
        and 10.1 <= fast["full_ci"] <= 10.8
        and secs <= 300
    )
    record("2", ok, f"core={core.confidence_interval:.4f} emp_spaced={payload['empirical_risk_spaced']:.5f} "
                    f"free={fast['mixing_free']:.4f} full={fast['full_ci']:.4f} time={secs:.1f}s")


# -- 3 --------------------------------------------------------------------

def test_criterion_3_rademacher_row():
    cfg = ExperimentConfig.from_dict({"experiment": "table2"})
    model = cfg.true_model
    lam = switched_complexity_lambda(model)
    fulls = []
    addon = None
    for seed in range(10):
        series, _ = simulate_switched(SwitchedConfig(model, 30.0, 80_000, seed))
        norms = rademacher_norms(series, 21)
        rep = bound_rademacher(0.0, norms, 3.0, lam, 3, norms.shape[0], 0.05, fixed_confidence=0.01)
        addon = rep.mixing_addon
        fulls.append(rep.confidence_interval)
    ok = _within(addon, 4.284, 0.005) and all(25.0 <= f <= 30.5 for f in fulls)
    record("3", ok, f"mixing part={addon:.4f} full range=[{min(fulls):.3f}, {max(fulls):.3f}] over 10 seeds")


# -- 4 --------------------------------------------------------------------

def test_criterion_4_table1_reconstruction():
    cfg = ExperimentConfig.from_dict({"experiment": "table1", "mixing": {"kind": "zero"}})
    t0 = time.perf_counter()
    rows = run_table1(cfg)
    secs = time.perf_counter() - t0
    ok = secs <= 120
    worst_slow = worst_fast = 0.0
    for r in rows:
        a = r["a"]
        rs = abs(r["ci_slow"] / TABLE1_SLOW[a] - 1)
        rf = abs(r["free_fast"] / TABLE1_FAST[a] - 1)
        worst_slow, worst_fast = max(worst_slow, rs), max(worst_fast, rf)
        ok &= rs <= 0.05 and rf <= 0.03
        ok &= 0.93 <= r["emp"] <= 1.03 and 0.93 <= r["emp_spaced"] <= 1.03
        ok &= r["delta_prime"] == 0.05 and r["delta_dprime"] == 0.05
    a17 = rows[0]
    record("4", bool(ok), f"a=17 slow={a17['ci_slow']:.3f} fast_free={a17['free_fast']:.3f}; "
                          f"worst rel dev slow={worst_slow:.3%} fast={worst_fast:.3%}; time={secs:.1f}s")


# -- 5 --------------------------------------------------------------------

def test_criterion_5_feasibility_threshold():
    env = MixingEnvelope.exponential(0.4, 0.5)
    slow = min_feasible_spacing(0.05, 200_000, env, "slow")
    fast = min_feasible_spacing(0.05, 200_000, env, "fast")
    record("5", slow == 17 and fast == 17, f"slow={slow} fast={fast}")


# -- 6 --------------------------------------------------------------------

def test_criterion_6_fig3_shape():
    rows = run_fig3(ExperimentConfig.from_dict({"experiment": "fig3"}))
    ns = [r["n"] for r in rows]
    slow = [r["total_slow"] for r in rows]
    fast = [r["total_fast"] for r in rows]
    mono = all(b - a <= 0.05 for seq in (slow, fast) for a, b in zip(seq, seq[1:]))
    below = all(f < s for f, s in zip(fast, slow))
    ok = ns[0] == 10_000 and ns[-1] == 200_000 and mono and below
    record("6", ok, f"{len(rows)} grid points; slow {slow[0]:.3f}->{slow[-1]:.3f}, "
                    f"fast {fast[0]:.3f}->{fast[-1]:.3f}; monotone={mono} fast<slow={below}")


# -- 7 --------------------------------------------------------------------

def _quantize_property(rng):
    failures = 0
    for _ in range(10_000):
        bits = int(rng.integers(1, 17))
        lower = float(rng.uniform(-100, 100))
        upper = lower + float(rng.uniform(1e-3, 100))
        cls = QuantizedModelClass.box(bits, lower, upper, 1)
        v = float(rng.uniform(lower, upper))
        q = quantize([v], cls)
        step = cls.grids[0].step
        if not np.array_equal(quantize(q, cls), q):
            failures += 1
        elif abs(q[0] - v) > step / 2 * (1 + 1e-9) + 1e-12 * max(1.0, abs(v)):
            failures += 1
    return failures


def _partition_property(rng):
    failures = 0
    for _ in range(200):
        n = int(rng.integers(2, 5000))
        a = int(rng.integers(1, n // 2 + 1))
        bp = make_block_plan(n, a)
        idx = np.concatenate([bp.odd_indices, bp.even_indices])
        ok = (
            bp.mu == n // (2 * a)
            and len(idx) == 2 * a * bp.mu
            and np.array_equal(np.sort(idx), np.arange(bp.used))
        )
        sp = make_spaced_plan(n, a)
        ok &= sp.mu_prime == n // a and np.array_equal(sp.indices, a * np.arange(n // a))
        ok &= bool(np.all(sp.indices < n))
        failures += not ok
    return failures


def _block_average_property(rng):
    failures = 0
    for _ in range(200):
        n = int(rng.integers(4, 3000))
        a = int(rng.integers(1, n // 2 + 1))
        plan = make_block_plan(n, a)
        s = LabeledSeries(rng.standard_normal((n, 1)), 2 * rng.standard_normal(n), ClipSpec(3))
        w = float(rng.standard_normal())

        def pred(X, w=w):
            return w * X[:, 0]

        first, second = block_average_losses(s, plan, pred)
        lhs = 0.5 * (math.fsum(first) / plan.mu + math.fsum(second) / plan.mu)
        rhs = empirical_risk(s.head(plan.used), pred)
        failures += not abs(lhs - rhs) <= 1e-12 * abs(rhs)
    return failures


def _monotone_property():
    failures = 0
    for k in range(100):
        rng = make_rng(2024, k)
        d, C = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        n = int(rng.integers(C * d + 1, 200))
        X = rng.standard_normal((n, d))
        y = 2 * rng.standard_normal(n)
        h = np.array(fit_switched(LabeledSeries(X, y, ClipSpec(3)), C, 2, 50, k).history)
        failures += not np.all(np.diff(h) <= 0)
    return failures


def _ols_property(rng):
    failures = 0
    for _ in range(100):
        d = int(rng.integers(1, 8))
        w = 3 * rng.standard_normal(d)
        X = rng.standard_normal((int(rng.integers(d + 1, 400)), d))
        got = fit_ols(LabeledSeries(X, X @ w, ClipSpec(1e9))).model.weights
        failures += not np.linalg.norm(got - w) <= 1e-8 * np.linalg.norm(w)
    return failures


def _iid_validity(rng, trials=2000, n=200, delta=0.05):
    """Uniform deviation over 8 constant predictors of Bernoulli targets."""
    levels = np.arange(8) / 7.0
    violations = 0
    for _ in range(trials):
        p = float(rng.uniform())
        y = (rng.uniform(size=n) < p).astype(float)
        m1 = y.mean()
        emp = m1 - 2 * levels * m1 + levels**2  # mean of (y - c)^2 for 0/1 targets
        risk = p - 2 * levels * p + levels**2
        ci = bound_iid(0.0, n, math.log(8), 1.0, delta).confidence_interval
        violations += bool(np.any(risk > emp + ci))
    return violations / trials, delta + 3 * math.sqrt(delta / trials)


def test_criterion_7_property_suite():
    rng = make_rng(7)
    counts = {
        "quantize": _quantize_property(rng),
        "partition": _partition_property(rng),
        "block_average": _block_average_property(rng),
        "alternating_monotone": _monotone_property(),
        "ols_recovery": _ols_property(rng),
    }
    frac, limit = _iid_validity(rng)
    ok = not any(counts.values()) and frac <= limit
    detail = " ".join(f"{k}={v}" for k, v in counts.items())
    record("7", ok, f"failures: {detail}; iid violation rate={frac:.4f} (limit {limit:.4f})")


# -- 8 --------------------------------------------------------------------

def test_criterion_8_determinism(tmp_path):
    same = {}
    for cmd in ("table1", "fig3", "table2"):
        outs = []
        for k in range(2):
            out = tmp_path / f"{cmd}_{k}.csv"
            assert cli_main([cmd, "--out", str(out)]) == 0
            outs.append(out)
        same[cmd] = outs[0].read_bytes() == outs[1].read_bytes()
        if cmd == "table2":
            same["table2.json"] = (
                outs[0].with_suffix(".json").read_bytes() == outs[1].with_suffix(".json").read_bytes()
            )
    record("8", all(same.values()), " ".join(f"{k}={'identical' if v else 'DIFFERENT'}" for k, v in same.items()))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
