"""Matrix files and result reports.

Two plain-text matrix formats are supported:

``csv``
    One row per line, comma separated, no header.
``dense_text``
    A ``rows cols`` header line followed by ``rows`` lines of
    whitespace-separated numbers.

Numbers are written with 17 significant digits, which round-trips any
IEEE double exactly.
"""

import csv
import io
import json
import math
import os

import numpy as np

from .errors import IoError, ParseError

FORMATS = ("csv", "dense_text")


def format_number(x):
    return format(float(x), ".17g")


def detect_format(path):
    """Guess the format from the extension, then from the content."""
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".csv":
        return "csv"
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return "csv" if "," in text else "dense_text"


def _parse_number(token, where):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{where}: not a number: {token!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"{where}: non-finite value {token!r}")
    return value


def parse_csv(text, source="<csv>"):
    rows = []
    for lineno, record in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not record or all(not cell.strip() for cell in record):
            continue
        rows.append([_parse_number(cell.strip(), f"{source}:{lineno}") for cell in record])
    if not rows:
        raise ParseError(f"{source}: no data rows")
    width = len(rows[0])
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ParseError(f"{source}: row {i} has {len(row)} columns, expected {width}")
    return np.array(rows, dtype=np.float64)


def parse_dense_text(text, source="<dense_text>"):
    lines = [(n, line.split()) for n, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if not lines:
        raise ParseError(f"{source}: empty file")
    lineno, header = lines[0]
    if len(header) != 2:
        raise ParseError(f"{source}:{lineno}: header must be 'rows cols'")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError(f"{source}:{lineno}: header must hold two integers") from None
    if rows < 1 or cols < 1:
        raise ParseError(f"{source}:{lineno}: dimensions must be positive, got {rows} x {cols}")
    body = lines[1:]
    if len(body) != rows:
        raise ParseError(f"{source}: header declares {rows} rows, found {len(body)}")
    out = np.empty((rows, cols))
    for i, (lineno, tokens) in enumerate(body):
        if len(tokens) != cols:
            raise ParseError(f"{source}:{lineno}: expected {cols} values, found {len(tokens)}")
        out[i] = [_parse_number(tok, f"{source}:{lineno}") for tok in tokens]
    return out


def dumps_matrix(M, fmt):
    M = np.asarray(M, dtype=np.float64)
    if fmt == "csv":
        return "".join(",".join(format_number(x) for x in row) + "\n" for row in M)
    if fmt == "dense_text":
        lines = [f"{M.shape[0]} {M.shape[1]}"]
        lines += [" ".join(format_number(x) for x in row) for row in M]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown matrix format {fmt!r}")


def read_matrix(path, fmt=None):
    """Read a matrix file; returns ``(matrix, format)``."""
    fmt = fmt or detect_format(path)
    if fmt not in FORMATS:
        raise ValueError(f"unknown matrix format {fmt!r}")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not a text file") from exc
    parser = parse_csv if fmt == "csv" else parse_dense_text
    return parser(text, str(path)), fmt


def write_matrix(path, M, fmt):
    text = dumps_matrix(M, fmt)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _jsonable(value):
    if isinstance(value, (np.floating, float)):
        return float(value) if math.isfinite(value) else str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "value") and hasattr(value, "name"):
        return value.value
    return value


def render_report(report, style="json"):
    """Serialise a report dict as JSON or as ``key: value`` text lines."""
    report = _jsonable(report)
    if style == "json":
        return json.dumps(report, indent=2, sort_keys=False) + "\n"
    lines = []
    for key, value in report.items():
        if key == "checks":
            for check in value:
                extra = "" if check.get("threshold") is None else f" (threshold {check['threshold']})"
                lines.append(f"check {check['name']}: {check['status'].upper()} value={check.get('value')}{extra}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"
