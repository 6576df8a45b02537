"""Deterministic file output: CSVs with full-precision floats and a
run-metadata comment line, JSON summaries, atomic writes (temp + rename).
Rerunning a pipeline with the same inputs must reproduce every byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile

import numpy as np

__all__ = [
    "format_value",
    "config_hash",
    "atomic_write_text",
    "write_csv",
    "write_json",
    "read_csv",
]


def format_value(x) -> str:
    """Canonical text form: 17 significant digits for floats, plain ints,
    strings unchanged."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def config_hash(config: dict) -> str:
    """Short stable digest of a JSON-serializable config mapping."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename over."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows, metadata: dict | None = None) -> None:
    """CSV with one leading '# key=value ...' metadata comment line and a
    header row; every value passes through :func:`format_value`."""
    buf = io.StringIO()
    if metadata:
        pairs = " ".join(f"{k}={format_value(v)}" for k, v in metadata.items())
        buf.write(f"# {pairs}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    atomic_write_text(path, buf.getvalue())


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_csv(path):
    """Read a CSV written by :func:`write_csv`: returns (header, rows) with
    rows as string lists; '#' comment lines are skipped."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    return rows[0], rows[1:]
