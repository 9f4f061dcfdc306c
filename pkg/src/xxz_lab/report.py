"""Deterministic CSV/JSON reports.

Floats are written rounded to 12 significant digits ('%.12g', '.' decimal
point, no locale); non-finite values become the strings nan, inf, -inf.  No
timestamps or host data go into a report, so equal inputs give equal bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .exceptions import XXZError

DIGITS = 12


class ReportError(XXZError, OSError):
    pass


def _round(x):
    return float(f"{x:.{DIGITS}g}")


def _cell(v):
    """Plain Python value with floats rounded; used for both formats."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return _round(v)
    if isinstance(v, complex):
        return _cell(v.real) if v.imag == 0 else f"{v.real:.{DIGITS}g}{v.imag:+.{DIGITS}g}j"
    return v


def _csv_text(v):
    v = _cell(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{DIGITS}g}"
    return "" if v is None else str(v)


def field_names(rows, fields=None):
    if fields is not None:
        return list(fields)
    names = []
    for r in rows:
        for k in r:
            if k not in names:
                names.append(k)
    return names


def render_csv(rows, fields=None):
    names = field_names(rows, fields)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(names)
    for r in rows:
        w.writerow([_csv_text(r.get(k)) for k in names])
    return buf.getvalue()


def render_json(rows, meta=None, fields=None):
    names = field_names(rows, fields)
    meta = dict(meta or {})
    doc = {"meta": {"version": meta.pop("version", __version__), "seed": meta.pop("seed", None),
                    "config": {k: _cell(v) for k, v in sorted(meta.pop("config", {}).items())}},
           "rows": [{k: _cell(r.get(k)) for k in names} for r in rows]}
    doc["meta"].update({k: _cell(v) for k, v in meta.items()})
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def emit_report(rows, fmt="csv", path=None, meta=None, fields=None):
    """Write rows as CSV or JSON to ``path`` ('-' or None for stdout)."""
    if fmt == "csv":
        text = render_csv(rows, fields)
    elif fmt == "json":
        text = render_json(rows, meta, fields)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path in (None, "-"):
        sys.stdout.write(text)
        return text
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return text


def _parse(text):
    if text in ("true", "false"):
        return text == "true"
    if text in ("nan", "inf", "-inf"):
        return float(text)
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def read_report(path):
    """Rows of a report written by emit_report (either format)."""
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return [{k: float(v) if v in ("nan", "inf", "-inf") else v for k, v in r.items()}
                for r in doc["rows"]]
    reader = csv.DictReader(io.StringIO(text))
    return [{k: _parse(v) for k, v in r.items()} for r in reader]
