"""JSON encoding of complex arrays and report values."""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .errors import ConfigError


def encode_array(x, basis: str = "CONFIG", digits: int = 15) -> dict:
    """Encode a complex array as ``{"basis", "shape", "data"}``.

    ``data`` is the flattened row-major array as ``[re, im]`` pairs. Values
    are rounded to ``digits`` decimals so reports are stable across runs.
    """
    a = np.asarray(x, dtype=complex)
    flat = a.reshape(-1)
    data = [[_clean(z.real, digits), _clean(z.imag, digits)] for z in flat]
    return {"basis": str(basis), "shape": list(a.shape), "data": data}


def decode_array(obj: dict) -> np.ndarray:
    """Inverse of :func:`encode_array`."""
    try:
        shape = tuple(int(s) for s in obj["shape"])
        pairs = np.asarray(obj["data"], dtype=float).reshape(-1, 2)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed array payload: {exc}") from exc
    return (pairs[:, 0] + 1j * pairs[:, 1]).reshape(shape)


def _clean(v: float, digits: int) -> float:
    v = round(float(v), digits)
    return 0.0 if v == 0 else v


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars, tuples and enums for ``json``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return encode_array(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(report: dict) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True)
