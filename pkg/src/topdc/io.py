"""Deterministic file writers and content hashing.

Every artifact the pipeline emits goes through these helpers so reruns of
the same configuration produce byte-identical files: floats at 17
significant digits (exact double round-trip), JSON with sorted keys, a
single trailing newline, and "\n" line endings throughout.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

__all__ = [
    "fnum",
    "write_csv",
    "write_json",
    "canonical_hash",
    "sha256_file",
]

FLOAT_FMT = "%.17g"


def fnum(x) -> str:
    """Format one number for CSV output."""
    return FLOAT_FMT % float(x)


def write_csv(path, header, rows) -> Path:
    """Write rows of numbers and strings under a fixed header.

    Numeric cells are formatted with :data:`FLOAT_FMT`; strings pass
    through (quoted by the writer only when they need it).
    """
    path = Path(path)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([c if isinstance(c, str) else fnum(c) for c in row])
    return path


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")
    return path


def canonical_hash(obj) -> str:
    """SHA-256 of the compact sorted-key JSON encoding of obj."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
