"""Versioned text checkpoints for parameter matrices.

Plain text keeps the dumps byte-reproducible (binary zip containers embed
timestamps); desk scale makes the size irrelevant.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DatasetError, FormatError

CHECKPOINT_FORMAT = "motifcf.checkpoint"
CHECKPOINT_VERSION = 1


def save_arrays(named_arrays, path):
    """Write an ordered mapping of names to 1-d/2-d float arrays."""
    lines = [f"{CHECKPOINT_FORMAT} v{CHECKPOINT_VERSION}"]
    for name, arr in named_arrays.items():
        arr = np.atleast_2d(np.asarray(arr, dtype=np.float64))
        lines.append(f"{name} {arr.shape[0]} {arr.shape[1]}")
        for row in arr:
            lines.append(" ".join(f"{x:.17g}" for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_arrays(path):
    p = Path(path)
    if not p.exists():
        raise DatasetError(f"missing checkpoint file: {p}")
    lines = p.read_text().strip().splitlines()
    if not lines or not lines[0].startswith(CHECKPOINT_FORMAT):
        raise FormatError(f"not a {CHECKPOINT_FORMAT} file: {p}")
    out = {}
    i = 1
    while i < len(lines):
        name, rows, cols = lines[i].rsplit(" ", 2)
        rows, cols = int(rows), int(cols)
        block = [[float(x) for x in lines[i + 1 + r].split()] for r in range(rows)]
        arr = np.asarray(block)
        out[name] = arr[0] if rows == 1 and name.endswith("_b") else arr
        i += 1 + rows
    return out
