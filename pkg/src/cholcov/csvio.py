"""CSV ingestion and emission.

All floats are written with ``repr``, which round-trips float64 exactly
(shortest representation up to 17 significant digits). Result files are
byte-identical across reruns of the same seeded configuration; wall-clock
timings live in a sidecar file so they cannot break that guarantee.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ParseError, RaggedRows
from .linalg import DataSample

RESULT_COLUMNS = (
    "method",
    "scenario",
    "p",
    "n",
    "density",
    "replicate",
    "seed",
    "f1_T",
    "tpr_T",
    "tdr_T",
    "f1_Sigma",
    "norm_diff",
    "hyperparameter",
)

TIMING_COLUMNS = (
    "method",
    "scenario",
    "p",
    "n",
    "density",
    "replicate",
    "seed",
    "wall_time_s",
)

CLASSIFICATION_COLUMNS = (
    "method",
    "protocol",
    "class",
    "tnr",
    "f1",
    "accuracy",
    "hyperparameter",
)


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def ingest_csv(path, has_header: bool = False, label_column=None) -> DataSample:
    """Read a numeric CSV, optionally peeling one column off as labels.

    ``label_column`` is a 0-based index (negative counts from the end) or,
    when ``has_header`` is set, a column name. Column order is preserved:
    the file's variable order is the model's variable order.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows:
        raise ParseError(1, 1, "file contains no rows")
    header = None
    if has_header:
        header = [name.strip() for name in rows[0]]
        rows = rows[1:]
        if not rows:
            raise ParseError(2, 1, "file contains a header but no data rows")
    width = len(rows[0])
    label_idx = None
    if label_column is not None:
        if isinstance(label_column, str):
            if header is None:
                raise ParseError(1, 1, "named label column requires a header")
            try:
                label_idx = header.index(label_column)
            except ValueError:
                raise ParseError(1, 1, f"no column named {label_column!r}") from None
        else:
            label_idx = int(label_column)
            if label_idx < 0:
                label_idx += width
            if not 0 <= label_idx < width:
                raise ParseError(1, label_idx + 1, "label column out of range")
    values, labels = [], []
    offset = 2 if has_header else 1
    for r, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRows(r + offset, width, len(row))
        numeric = []
        for c, fieldval in enumerate(row):
            if c == label_idx:
                labels.append(fieldval.strip())
                continue
            try:
                numeric.append(float(fieldval))
            except ValueError:
                raise ParseError(
                    r + offset, c + 1, f"not a number: {fieldval.strip()!r}"
                ) from None
        values.append(numeric)
    return DataSample(
        np.asarray(values, dtype=float),
        np.asarray(labels, dtype=object) if label_idx is not None else None,
    )


def emit_matrix(matrix, path, *, kind="matrix", method="", class_label="") -> None:
    """Write a matrix as CSV with a one-line metadata header
    ``p,kind,method,class`` followed by one line per row, lossless."""
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("emit_matrix expects a square matrix")
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"{arr.shape[0]},{kind},{method},{class_label}\n")
        for row in arr:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_matrix(path) -> tuple[np.ndarray, dict]:
    """Inverse of emit_matrix: the matrix plus its metadata header."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    head = lines[0].split(",")
    if len(head) != 4:
        raise ParseError(1, 1, "matrix header must have 4 fields")
    try:
        p = int(head[0])
    except ValueError:
        raise ParseError(1, 1, f"bad dimension field {head[0]!r}") from None
    meta = {"p": p, "kind": head[1], "method": head[2], "class": head[3]}
    body = []
    for r, line in enumerate(lines[1:]):
        fields = line.split(",")
        if len(fields) != p:
            raise RaggedRows(r + 2, p, len(fields))
        body.append([float(v) for v in fields])
    if len(body) != p:
        raise ParseError(len(lines), 1, f"expected {p} matrix rows, got {len(body)}")
    return np.asarray(body), meta


def write_table(path, columns, rows) -> None:
    """Write dict rows under a fixed column order."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def write_json(path, rows) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(rows, fh, indent=1, default=str)
        fh.write("\n")
