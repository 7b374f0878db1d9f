"""
Report Writing

Deterministic CSV and JSON output, written atomically: data goes to
temporary files in the target directory which are renamed over their
destinations only once every file of a command has been written, so a
failed command never leaves a partial or half-updated output set behind.

Floats are written with "%.17g" in CSV and with Python's shortest
round-trip repr in JSON; JSON keys are sorted.
"""

import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def to_jsonable(value):
    """Convert numpy scalars/arrays and nested containers to plain JSON types."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    return value


def dumps(payload):
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2) + "\n"


class OutputSet:
    """
    Files staged as temporaries next to their destinations and renamed into
    place together by commit(). Leaving the `with` block on an exception
    discards every staged file, so no destination is touched.
    """

    def __init__(self):
        self._staged = []

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.commit()
        else:
            self.discard()
        return False

    def add_bytes(self, path, data):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        self._staged.append((tmp, path))
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        logger.debug("staged %s (%d bytes)", path, len(data))
        return path

    def add_text(self, path, text):
        return self.add_bytes(path, text.encode("utf-8"))

    def add_json(self, path, payload):
        return self.add_text(path, dumps(payload))

    def add_csv(self, path, rows, columns):
        return self.add_text(path, csv_text(rows, columns))

    def commit(self):
        for tmp, path in self._staged:
            os.replace(tmp, path)
        self._staged = []

    def discard(self):
        for tmp, _ in self._staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        self._staged = []


def write_bytes_atomic(path, data):
    with OutputSet() as out:
        out.add_bytes(path, data)
    return Path(path)


def write_text_atomic(path, text):
    return write_bytes_atomic(path, text.encode("utf-8"))


def format_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(format_cell(v) for v in value)
    return str(value)


def csv_text(rows, columns):
    """Render dict rows as CSV with a fixed column order."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(c, "")) for c in columns])
    return buffer.getvalue()
