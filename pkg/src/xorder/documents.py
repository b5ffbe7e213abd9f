"""JSON documents and CSV curve files: schemas, parsing, deterministic output."""

from __future__ import annotations

import csv
import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from referencing import Registry, Resource

from .distcore import (
    BuiltinTail,
    Exponential,
    GammaInt,
    GenExponential,
    Lifetime,
    PowerOf,
    TailPowerOf,
    UQuadratic,
    Weibull,
)
from .errors import ValidationError

SCHEMA_NAMES = ("distribution", "system", "verdict", "classification")
CSV_HEADER = ("x", "value")


@lru_cache(maxsize=None)
def _schemas():
    loaded = {}
    for name in SCHEMA_NAMES:
        text = resources.files("xorder").joinpath("schemas").joinpath(f"{name}.json").read_text("utf-8")
        loaded[name] = json.loads(text)
    registry = Registry().with_resources(
        (schema["$id"], Resource.from_contents(schema)) for schema in loaded.values()
    )
    return loaded, registry


def schema(name: str) -> dict:
    return _schemas()[0][name]


def validate(doc, name: str) -> None:
    """Raise ValidationError naming the offending field if ``doc`` breaks schema ``name``."""
    loaded, registry = _schemas()
    validator = jsonschema.Draft202012Validator(loaded[name], registry=registry)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        # the deepest error of the best match names the real culprit
        err = jsonschema.exceptions.best_match(errors)
        while err.context:
            err = jsonschema.exceptions.best_match(err.context)
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ValidationError(f"{name} document invalid at {where}: {err.message}")


def dist_from_doc(doc: dict) -> Lifetime:
    validate(doc, "distribution")
    return _dist(doc)


def _dist(doc: dict) -> Lifetime:
    fam = doc["family"]
    if fam == "exponential":
        return Exponential(doc["rate"])
    if fam == "weibull":
        return Weibull(doc["shape"], doc.get("rate", 1.0))
    if fam == "gamma_int":
        return GammaInt(doc["shape"], doc.get("rate", 1.0))
    if fam == "gen_exponential":
        return GenExponential(doc["shape"], doc.get("rate", 1.0))
    if fam == "u_quadratic":
        return UQuadratic(doc["left"], doc["right"])
    if fam == "power_of":
        return PowerOf(_dist(doc["base"]), doc["exponent"])
    if fam == "tail_power_of":
        return TailPowerOf(_dist(doc["base"]), doc["exponent"])
    return BuiltinTail(doc["name"])


def read_json(path) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc


def dumps(doc) -> str:
    return json.dumps(_plain(doc), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(path, doc) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def _plain(obj):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if v != v:
            return None
        if v in (float("inf"), float("-inf")):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def write_curve_csv(path, xs, values) -> None:
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    if xs.shape != values.shape or xs.ndim != 1:
        raise ValidationError("curve needs matching one-dimensional x and value arrays")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for x, v in zip(xs, values):
            fh.write(f"{format_float(x)},{format_float(v)}\n")


def read_curve_csv(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValidationError(f"{path}: expected header {','.join(CSV_HEADER)}")
    try:
        data = np.array([[float(a), float(b)] for a, b in rows[1:]], dtype=float).reshape(-1, 2)
    except ValueError as exc:
        raise ValidationError(f"{path}: malformed row ({exc})") from exc
    return data[:, 0], data[:, 1]
