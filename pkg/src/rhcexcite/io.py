"""CSV artifacts. Floats are written with ``repr`` (shortest round-trip form,
locale independent) so files reproduce byte for byte."""

import csv
from pathlib import Path

import numpy as np

SIGNAL_HEADER = ["k", "u"]
REPORT_HEADER = ["variant", "J_true", "fill_distance", "region_fraction", "runtime_s", "seed"]
TRACE_HEADER = ["k", "J_before", "J_after", "accepted", "rejected", "a", "b", "refit"]


class CsvParseError(ValueError):
    pass


def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if v != v else repr(v)
    return "" if v is None else str(v)


def write_rows(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def points_header(p):
    return ["j"] + [f"x{i + 1}" for i in range(p)]


def write_signal(path, u):
    return write_rows(path, SIGNAL_HEADER, ((k, v) for k, v in enumerate(u, start=1)))


def write_points(path, X):
    X = np.asarray(X, dtype=float)
    return write_rows(path, points_header(X.shape[1]), ([j, *row] for j, row in enumerate(X)))


def write_psi(path, points, weights):
    P = np.asarray(points, dtype=float)
    header = points_header(P.shape[1]) + ["q"]
    return write_rows(path, header, ([j, *row, w] for j, (row, w) in enumerate(zip(P, weights))))


def write_regions(path, boosts, p=2):
    """Boost rectangles used for the region-fraction metric."""
    header = ["r"] + [f"lo{i + 1}" for i in range(p)] + [f"hi{i + 1}" for i in range(p)] + ["rho"]
    return write_rows(path, header, ([r, *b.lo, *b.hi, b.rho] for r, b in enumerate(boosts)))


def write_trace(path, trace):
    return write_rows(path, TRACE_HEADER, (
        (t.k, t.J_before, t.J_after, t.accepted, t.rejected, t.a, t.b, t.refit) for t in trace
    ))


def write_reports(path, reports, timing=False):
    """Coverage table; ``runtime_s`` is left empty unless ``timing`` is set."""
    return write_rows(path, REPORT_HEADER, (
        (r.variant, r.J_true, r.fill_distance, r.region_fraction,
         r.runtime_s if timing else None, r.seed) for r in reports
    ))


def _read(path, header):
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as e:
        raise CsvParseError(f"{path}: cannot open: {e.strerror}") from None
    with fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CsvParseError(f"{path}: empty file")
    if header is not None and rows[0] != header:
        raise CsvParseError(f"{path}: row 1: expected header {','.join(header)}, got {','.join(rows[0])}")
    return rows[0], rows[1:]


def _num(path, r, c, name, text, conv=float):
    try:
        return conv(text)
    except ValueError:
        raise CsvParseError(
            f"{path}: row {r}, column {c} ({name}): cannot parse {text!r}"
        ) from None


def read_signal(path):
    """Parse a ``k,u`` CSV; ``k`` must run 1, 2, ... without gaps."""
    _, body = _read(path, SIGNAL_HEADER)
    u = []
    for i, row in enumerate(body):
        r = i + 2
        if len(row) != 2:
            raise CsvParseError(f"{path}: row {r}: expected 2 columns, got {len(row)}")
        k = _num(path, r, 1, "k", row[0], int)
        if k != i + 1:
            raise CsvParseError(f"{path}: row {r}, column 1 (k): expected {i + 1}, got {k}")
        v = _num(path, r, 2, "u", row[1])
        if not np.isfinite(v):
            raise CsvParseError(f"{path}: row {r}, column 2 (u): value is not finite")
        u.append(v)
    return np.array(u)


def read_points(path):
    """Parse a ``j,x1,..,xp[,extra...]`` CSV into points and extra columns."""
    header, body = _read(path, None)
    cols = [h for h in header if h.startswith("x")]
    if header[: len(cols) + 1] != points_header(len(cols)) or not cols:
        raise CsvParseError(f"{path}: row 1: expected a j,x1,... header")
    out = np.empty((len(body), len(cols)))
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise CsvParseError(f"{path}: row {i + 2}: expected {len(header)} columns")
        for c in range(len(cols)):
            out[i, c] = _num(path, i + 2, c + 2, cols[c], row[c + 1])
    extra = {}
    for name in header[len(cols) + 1:]:
        c = header.index(name)
        extra[name] = np.array([_num(path, i + 2, c + 1, name, row[c]) for i, row in enumerate(body)])
    return out, extra


def read_table(path):
    header, body = _read(path, None)
    return [dict(zip(header, row)) for row in body]
