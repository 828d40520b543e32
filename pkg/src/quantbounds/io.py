"""File formats: series CSV, model JSON, result CSV/JSON."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .exceptions import InputError
from .model_class import NATIVE, ClipSpec, LinearModel, QuantizedModelClass, SwitchedModel
from .resampling import LabeledSeries


def _open_for_read(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    return path


def format_value(v) -> str:
    """Result-table cell: 6 significant digits, lowercase booleans."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return format(v, ".6g")
    return str(v)


def write_rows(path, rows: list[dict], columns: list[str] | None = None) -> None:
    columns = columns or list(rows[0])
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_value(row[c]) for c in columns])


def read_rows(path) -> list[dict]:
    with open(_open_for_read(path), newline="") as fh:
        return list(csv.DictReader(fh))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_json(path, payload) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(_open_for_read(path)) as fh:
        return json.load(fh)


# -- series ---------------------------------------------------------------

def write_series(path, series: LabeledSeries) -> None:
    """CSV with header ``t,x_1,...,x_d,y``; floats at full (round-trip) precision."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    d = series.dim
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *(f"x_{i + 1}" for i in range(d)), "y"])
        for t, (x, y) in enumerate(zip(series.X.tolist(), series.y.tolist()), start=1):
            w.writerow([t, *map(repr, x), repr(y)])


def read_series(path, clip: ClipSpec) -> LabeledSeries:
    with open(_open_for_read(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) < 3 or header[0] != "t" or header[-1] != "y":
            raise InputError(f"{path}: expected header t,x_1,...,x_d,y, got {header}")
        data = np.array([[float(v) for v in row[1:]] for row in reader], dtype=float)
    if data.size == 0:
        raise InputError(f"{path}: series is empty")
    return LabeledSeries(data[:, :-1], data[:, -1], clip)


# -- models ---------------------------------------------------------------

def model_to_dict(model, model_class: QuantizedModelClass | None = None) -> dict:
    bits = model_class.bits_per_param if model_class else 32
    grids = model_class.to_json() if model_class else NATIVE
    if isinstance(model, SwitchedModel):
        na, nb = model.orders
        return {
            "bits": bits,
            "grids": grids,
            "weights": model.weight_matrix.ravel().tolist(),
            "submodels": [w.tolist() for w in model.submodels],
            "na": na,
            "nb": nb,
        }
    return {"bits": bits, "grids": grids, "weights": model.weights.tolist()}


def model_from_dict(d: dict):
    """Model and its quantized class from the model JSON layout."""
    try:
        if "submodels" in d:
            model = SwitchedModel(tuple(d["submodels"]), (d.get("na", 0), d.get("nb", 0)))
        else:
            model = LinearModel(d["weights"])
        grids = d.get("grids", NATIVE)
        if not isinstance(grids, str):
            grids = tuple(tuple(g) for g in grids)
        qclass = QuantizedModelClass(int(d.get("bits", 32)), model.param_count, grids)
    except KeyError as exc:
        raise InputError(f"model file is missing field {exc}") from None
    return model, qclass
