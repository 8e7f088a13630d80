"""Serialization of module reports with stable field order."""

import json
import math

from .errors import FormatError


def round12(x: float) -> float:
    """Floats are emitted with 12 significant digits."""
    if isinstance(x, float) and math.isfinite(x):
        return float(f"{x:.12g}")
    return x


def _clean(obj):
    if isinstance(obj, float):
        return round12(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return _clean(obj.item())
    return obj


def to_json(doc) -> str:
    return json.dumps(_clean(doc), indent=2, ensure_ascii=False) + "\n"


def emit_report(result, fmt: str = "json") -> bytes:
    if fmt == "json":
        doc = result if isinstance(result, dict) else result.to_dict()
        return to_json(doc).encode()
    if fmt == "csv":
        if not hasattr(result, "to_csv"):
            raise FormatError(f"{type(result).__name__} has no CSV form")
        return result.to_csv().encode()
    if fmt == "svg" and hasattr(result, "to_svg"):
        return result.to_svg().encode()
    raise FormatError(f"format {fmt!r} is not supported for {type(result).__name__}")
