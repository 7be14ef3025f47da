"""Deterministic CSV/JSON output helpers."""
import hashlib
import json
import os
from pathlib import Path

import numpy as np

__all__ = ["canonical_json", "manifest_hash", "thread_count", "write_csv", "write_json"]


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_default)


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not serializable: {type(obj).__name__}")


def manifest_hash(obj):
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def write_csv(path, header, rows):
    """Plain CSV with one header line; floats written with repr precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = np.atleast_2d(np.asarray(rows))
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return path


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2, default=_default)
        fh.write("\n")
    return path


def thread_count():
    """Worker count, capped by SPINDECO_THREADS when set."""
    cap = os.environ.get("SPINDECO_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = max(1, min(n, int(cap)))
    return n
