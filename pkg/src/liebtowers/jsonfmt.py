"""Canonical JSON output with fixed float formatting.

Every report this package writes goes through ``dumps``: floats are printed
with 17 significant digits (exact double round-trip), dict keys keep their
insertion order, and the byte layout is deterministic, so identical inputs
produce identical files.
"""

from __future__ import annotations

import json
import math

import numpy as np

SCHEMA_VERSION = 1


def format_float(x: float) -> str:
    """Render a finite float with 17 significant digits."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value not representable in reports: {x!r}")
    text = format(x, ".17g")
    # Guarantee the token parses back as a JSON number (it always does for %g).
    return text


def _encode(obj, pieces: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            pieces.append("{}")
            return
        pieces.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"report keys must be strings, got {key!r}")
            pieces.append(pad_in + json.dumps(key) + ": ")
            _encode(value, pieces, indent, level + 1)
            pieces.append(",\n" if i < len(obj) - 1 else "\n")
        pieces.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            pieces.append("[]")
            return
        pieces.append("[\n")
        for i, value in enumerate(obj):
            pieces.append(pad_in)
            _encode(value, pieces, indent, level + 1)
            pieces.append(",\n" if i < len(obj) - 1 else "\n")
        pieces.append(pad + "]")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        pieces.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        pieces.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        pieces.append(format_float(obj))
    elif isinstance(obj, str):
        pieces.append(json.dumps(obj))
    elif obj is None:
        pieces.append("null")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def dumps(obj, indent: int = 2) -> str:
    """Serialize ``obj`` to canonical JSON text (trailing newline included)."""
    pieces: list[str] = []
    _encode(obj, pieces, indent, 0)
    pieces.append("\n")
    return "".join(pieces)
