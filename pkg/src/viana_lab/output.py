"""Output files: one JSON header line, then CSV.

Floats are printed with 17 significant digits so they round-trip exactly.
Files are written next to their target and renamed into place, so a
failed run never leaves a partial file behind.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile

import numpy as np

from . import __version__

TOOL = "viana-lab"


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    return v


def header(command: str, config_hash: str, seed: int, constants: dict, **meta) -> dict:
    return {"tool": TOOL, "version": __version__, "command": command, "config_hash": config_hash,
            "seed": int(seed), "constants": constants, "meta": meta}


def render(head: dict, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(json.dumps(_jsonable(head), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    path = os.path.abspath(path)
    folder = os.path.dirname(path)
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=folder)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_table(path: str, head: dict, columns, rows) -> None:
    write_atomic(path, render(head, columns, rows))


def read_table(path: str):
    """(header, rows as dicts of strings)."""
    with open(path, encoding="utf-8") as fh:
        head = json.loads(fh.readline())
        rows = list(csv.DictReader(fh))
    return head, rows
