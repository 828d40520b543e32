"""Command-line entry point: ``quantbounds <subcommand> [options]``.

Exit status is 0 on success, 2 when every emitted bound is infeasible, and
1 on errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .exceptions import QuantBoundsError
from .identify import FitReport
from .io import (
    model_from_dict,
    model_to_dict,
    read_json,
    read_series,
    write_json,
    write_rows,
    write_series,
)

log = logging.getLogger("quantbounds")

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2


def _parse_a(text: str):
    if text == "auto":
        return "auto"
    values = [int(v) for v in text.split(",") if v.strip()]
    return values if len(values) > 1 or "," in text else values[0]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON experiment config")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int, help="number of observed outputs")
    p.add_argument("--delta", type=float)
    p.add_argument("--bits", type=int, help="bits per parameter")
    p.add_argument("--a", type=_parse_a, help="block length(s): 17 | 17,21,25 | auto")
    p.add_argument("--out", type=Path, help="output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quantbounds", description="Generalization bounds for quantized models learned from beta-mixing time series.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in [
        ("table1", "AR(1) slow/fast bound sweep over block lengths"),
        ("fig3", "slow/fast bound totals as functions of n"),
        ("table2", "switched-system bound comparison"),
    ]:
        _add_common(sub.add_parser(name, help=help_))

    p = sub.add_parser("simulate", help="simulate the configured system to a series CSV")
    _add_common(p)
    p.add_argument("--modes-out", type=Path, help="also write the true mode sequence (switched only)")

    p = sub.add_parser("fit", help="identify a model from a series CSV")
    _add_common(p)
    p.add_argument("--series", type=Path, required=True)

    p = sub.add_parser("bound", help="evaluate bounds from a series and model, or from a risk file")
    _add_common(p)
    p.add_argument("--series", type=Path)
    p.add_argument("--model", type=Path)
    p.add_argument("--risk", type=Path, help="hand-written risk JSON (no data needed)")
    return parser


def _config(args, experiment: str | None = None) -> ex.ExperimentConfig:
    raw = read_json(args.config) if args.config else {}
    return ex.ExperimentConfig.from_dict(
        raw,
        experiment=experiment,
        seed=args.seed,
        n=args.n,
        delta=args.delta,
        bits=args.bits,
        a=args.a,
        out=str(args.out) if args.out else None,
    )


def _write_table2(cfg, rows, payload) -> None:
    out = Path(cfg.out)
    write_rows(out, rows, ex.TABLE2_COLUMNS)
    write_json(out.with_suffix(".json"), payload)


def _status(rows) -> int:
    return EXIT_INFEASIBLE if ex.all_infeasible(rows) else EXIT_OK


def cmd_table1(args) -> int:
    cfg = _config(args, "table1")
    rows = ex.run_table1(cfg)
    write_rows(cfg.out, rows, ex.SWEEP_COLUMNS)
    return _status(rows)


def cmd_fig3(args) -> int:
    cfg = _config(args, "fig3")
    rows = ex.run_fig3(cfg)
    write_rows(cfg.out, rows, ex.FIG3_COLUMNS)
    return _status(rows)


def cmd_table2(args) -> int:
    cfg = _config(args, "table2")
    rows, payload = ex.run_table2(cfg)
    _write_table2(cfg, rows, payload)
    return _status(rows)


def cmd_simulate(args) -> int:
    cfg = _config(args)
    series, modes = ex.simulate_from_config(cfg)
    out = args.out or Path("series.csv")
    write_series(out, series)
    if args.modes_out and modes is not None:
        args.modes_out.parent.mkdir(parents=True, exist_ok=True)
        args.modes_out.write_text("".join(f"{m}\n" for m in modes.tolist()))
    log.info("wrote %d pairs to %s", len(series), out)
    return EXIT_OK


def cmd_fit(args) -> int:
    cfg = _config(args)
    series = read_series(args.series, cfg.clip)
    fit = ex.fit_from_config(cfg, series)
    payload = model_to_dict(fit.model, cfg.model_class(fit.model.param_count))
    payload["fit"] = fit.to_dict()
    write_json(args.out or Path("model.json"), payload)
    return EXIT_OK


def cmd_bound(args) -> int:
    cfg = _config(args)
    if args.risk:
        reports = ex.bounds_from_risk(read_json(args.risk))
        write_json(args.out or Path("bounds.json"), [r.to_dict() for r in reports])
        return EXIT_OK if any(r.feasible for r in reports) else EXIT_INFEASIBLE
    if not (args.series and args.model):
        raise QuantBoundsError("bound needs either --risk or both --series and --model")
    series = read_series(args.series, cfg.clip)
    model, _ = model_from_dict(read_json(args.model))
    if cfg.experiment == "table2":
        fit_info = read_json(args.model).get("fit", {})
        fit = FitReport(model, fit_info.get("objective", float("nan")), fit_info.get("iterations", 0),
                        fit_info.get("restarts_used", 0), fit_info.get("converged", False),
                        tuple(fit_info.get("history", ())))
        rows, payload = ex.table2_result(series, fit, cfg)
        _write_table2(cfg, rows, payload)
        return _status(rows)
    rows = ex.table1_rows(series, model, cfg)
    write_rows(cfg.out, rows, ex.SWEEP_COLUMNS)
    return _status(rows)


COMMANDS = {
    "table1": cmd_table1,
    "fig3": cmd_fig3,
    "table2": cmd_table2,
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "bound": cmd_bound,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (QuantBoundsError, OSError, ValueError, KeyError) as exc:
        print(f"quantbounds: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
