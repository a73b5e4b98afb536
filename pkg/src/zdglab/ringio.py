"""Ring interchange JSON (``zdglab-ring-v1``) and input resolution."""

from __future__ import annotations

import json
import os

import numpy as np

from .algebra import FiniteAlgebra
from .errors import AlgebraError, PresentationError
from .presentation import compile_presentation

RING_FORMAT = "zdglab-ring-v1"


def ring_to_json(ring: FiniteAlgebra, presentation: str | None = None) -> dict:
    """Canonical field order: format, p, dim, labels, one, table[, presentation]."""
    out = {
        "format": RING_FORMAT,
        "p": ring.p,
        "dim": ring.dim,
        "labels": list(ring.labels),
        "one": [int(c) for c in ring.one],
        "table": ring.table.tolist(),
    }
    if presentation is not None:
        out["presentation"] = presentation
    return out


def dump_ring(ring: FiniteAlgebra, presentation: str | None = None) -> str:
    return json.dumps(ring_to_json(ring, presentation), separators=(",", ":")) + "\n"


def ring_from_json(obj: dict) -> FiniteAlgebra:
    if not isinstance(obj, dict) or obj.get("format") != RING_FORMAT:
        raise AlgebraError(f"expected a {RING_FORMAT} object")
    text = obj.get("presentation")
    if "table" not in obj:
        if text is None:
            raise AlgebraError("ring JSON needs a table or a presentation")
        return compile_presentation(text)
    try:
        p = int(obj["p"])
        dim = int(obj["dim"])
        table = np.asarray(obj["table"], dtype=np.int64)
        one = np.asarray(obj["one"], dtype=np.int64)
    except (KeyError, TypeError, ValueError) as exc:
        raise AlgebraError(f"malformed ring JSON: {exc}") from None
    if table.shape != (dim, dim, dim) or one.shape != (dim,):
        raise AlgebraError(f"table must be {dim}x{dim}x{dim} and one of length {dim}")
    bad = np.argwhere((table < 0) | (table >= p))
    if bad.size:
        i, j, k = bad[0]
        raise AlgebraError(f"table entry [{i}][{j}][{k}] = {table[i, j, k]} outside [0, {p})")
    if ((one < 0) | (one >= p)).any():
        raise AlgebraError(f"identity coordinates must lie in [0, {p})")
    ring = FiniteAlgebra(p, table, one, obj.get("labels"))
    if text is not None and not ring.same_structure(compile_presentation(text)):
        raise AlgebraError("table and embedded presentation describe different rings")
    return ring


def load_ring(text: str) -> FiniteAlgebra:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PresentationError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return ring_from_json(obj)


def load_input(arg: str) -> tuple[FiniteAlgebra, str]:
    """Resolve a CLI ring argument: a JSON file, a file holding presentation text, or the text itself.

    Returns the ring and a display name.
    """
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            content = fh.read()
        if content.lstrip().startswith("{"):
            obj = json.loads(content)
            return ring_from_json(obj), obj.get("presentation") or os.path.basename(arg)
        return compile_presentation(content.strip()), content.strip()
    return compile_presentation(arg), arg
