"""JSON interchange and text rendering.

Matrices are lists of rows (optionally wrapped as ``{"rows": [...]}``) whose
entries are integers or the strings ``"-inf"`` / ``"+inf"``.  Semimodules are
``{"dim": n, "generators": [column, ...]}``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .linalg import as_matrix
from .semimodule import Semimodule
from .semiring import format_scalar


class InputError(ValueError):
    """Malformed input, reported with the file and field it came from."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def load_json(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(str(path), f"cannot read file ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(str(path), f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _entry(v: float):
    return int(v) if np.isfinite(v) else format_scalar(float(v))


def matrix_to_json(M: np.ndarray) -> list:
    return [[_entry(v) for v in row] for row in np.asarray(M)]


def vector_to_json(v: np.ndarray) -> list:
    return [_entry(x) for x in np.asarray(v)]


def matrix_from_json(obj, where: str, *, allow_pos_inf: bool = False) -> np.ndarray:
    if isinstance(obj, dict):
        if "rows" not in obj:
            raise InputError(where, "expected a list of rows or an object with 'rows'")
        obj = obj["rows"]
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise InputError(where, "expected a list of rows")
    if len({len(r) for r in obj}) > 1:
        raise InputError(where, "rows have different lengths")
    for row in obj:
        for v in row:
            if isinstance(v, bool) or not isinstance(v, (int, str)):
                raise InputError(where, f"entry {v!r} is not an integer or infinity token")
    try:
        M = as_matrix(obj, allow_pos_inf=allow_pos_inf)
    except (ValueError, OverflowError) as exc:
        raise InputError(where, str(exc)) from exc
    return M


def vector_from_json(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list):
        raise InputError(where, "expected a list")
    return matrix_from_json([[v] for v in obj], where)[:, 0]


def semimodule_to_json(X: Semimodule) -> dict:
    return {"dim": X.dim, "generators": matrix_to_json(X.gens.T)}


def semimodule_from_json(obj, where: str) -> Semimodule:
    if not isinstance(obj, dict) or "generators" not in obj or "dim" not in obj:
        raise InputError(where, "expected an object with 'dim' and 'generators'")
    dim = obj["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 0:
        raise InputError(f"{where}.dim", "must be a nonnegative integer")
    gens = obj["generators"]
    if not isinstance(gens, list):
        raise InputError(f"{where}.generators", "expected a list of generator columns")
    if not gens:
        return Semimodule.trivial(dim)
    cols = matrix_from_json(gens, f"{where}.generators")
    if cols.shape[1] != dim:
        raise InputError(f"{where}.generators", f"generators must have length {dim}")
    return Semimodule.from_generators(cols.T, dim)


def require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise InputError(where, "expected a JSON object")
    if key not in obj:
        raise InputError(where, f"missing field '{key}'")
    return obj[key]


def format_matrix(M: np.ndarray, indent: str = "  ") -> str:
    """Right-aligned columns, one row per line."""
    M = np.asarray(M)
    if M.size == 0:
        return f"{indent}(empty {M.shape[0]}x{M.shape[1] if M.ndim > 1 else 0})"
    cells = [[str(_entry(v)) for v in row] for row in M]
    width = max(len(c) for row in cells for c in row)
    return "\n".join(indent + " ".join(c.rjust(width) for c in row) for row in cells)
