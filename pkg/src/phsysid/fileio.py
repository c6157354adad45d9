"""JSON/CSV readers and writers for systems, parameters and matrices."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .represent import CHParams, PHSystem


class FormatError(ValueError):
    """Input file is missing, unreadable or does not match the expected schema."""


def _load_json(path) -> dict:
    path = Path(path)
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: {exc}") from exc


def _check_keys(obj, required: set, path) -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"{path}: expected a JSON object")
    missing = required - set(obj)
    extra = set(obj) - required
    if missing or extra:
        raise FormatError(f"{path}: missing keys {sorted(missing)}, unknown keys {sorted(extra)}")
    if not isinstance(obj["n"], int) or isinstance(obj["n"], bool) or obj["n"] < 1:
        raise FormatError(f"{path}: n must be a positive integer")


def _array(x, ndim: int, path, name: str) -> np.ndarray:
    try:
        arr = np.asarray(x, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}: {name} is not numeric") from exc
    if arr.ndim != ndim:
        raise FormatError(f"{path}: {name} must be {ndim}-dimensional")
    return arr


def read_matrix(path) -> np.ndarray:
    """Square matrix from ``.csv`` or ``.json`` (a nested list or an object with key ``Q``)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        try:
            with open(path, newline="") as fh:
                rows = [r for r in csv.reader(fh) if r]
            M = np.array([[float(x) for x in r] for r in rows])
        except (OSError, ValueError) as exc:
            raise FormatError(f"{path}: {exc}") from exc
    elif path.suffix.lower() == ".json":
        obj = _load_json(path)
        M = _array(obj["Q"] if isinstance(obj, dict) and "Q" in obj else obj, 2, path, "matrix")
    else:
        raise FormatError(f"{path}: unsupported extension (use .csv or .json)")
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise FormatError(f"{path}: matrix must be square")
    return M


def read_system(path) -> PHSystem:
    obj = _load_json(path)
    _check_keys(obj, {"n", "Q", "B"}, path)
    Q = _array(obj["Q"], 2, path, "Q")
    B = _array(obj["B"], 1, path, "B")
    if Q.shape != (2 * obj["n"], 2 * obj["n"]):
        raise FormatError(f"{path}: Q shape {Q.shape} does not match n={obj['n']}")
    return PHSystem(Q, B)


def system_to_dict(sys: PHSystem) -> dict:
    return {"n": sys.n, "Q": sys.Q.tolist(), "B": sys.B.tolist()}


def write_system(path, sys: PHSystem) -> None:
    with open(path, "w") as fh:
        json.dump(system_to_dict(sys), fh, indent=2)


def read_params(path) -> CHParams:
    obj = _load_json(path)
    _check_keys(obj, {"n", "d", "v"}, path)
    d = _array(obj["d"], 1, path, "d")
    v = _array(obj["v"], 1, path, "v")
    if d.size != obj["n"]:
        raise FormatError(f"{path}: d has length {d.size}, expected n={obj['n']}")
    return CHParams(d, v)


def params_to_dict(p: CHParams) -> dict:
    return {"n": p.n, "d": p.d.tolist(), "v": p.v.tolist()}


def write_params(path, p: CHParams) -> None:
    with open(path, "w") as fh:
        json.dump(params_to_dict(p), fh, indent=2)
