"""Serialising audit reports as JSON, CSV or an aligned text table."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile

from .identities.audit import AuditReport

CSV_FIELDS = ("id", "eq", "family", "variant", "n_points", "max_rel_residual", "classification")
FORMATS = ("json", "csv", "text")


def _as_dict(report) -> dict:
    return report.to_dict() if isinstance(report, AuditReport) else report


def _fmt_residual(v) -> str:
    return "" if v is None else repr(float(v))


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def render_report(report, fmt: str = "json") -> bytes:
    data = _as_dict(report)
    if fmt == "json":
        return dumps_json(data).encode()
    rows = data["identities"]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for e in rows:
            w.writerow([e["id"], e["eq"], e["family"], e["variant"], e["n_points"], _fmt_residual(e["max_rel_residual"]), e["classification"]])
        return buf.getvalue().encode()
    if fmt == "text":
        table = [("id", "family", "variant", "n", "max_rel_residual", "classification")]
        for e in rows:
            res = e["max_rel_residual"]
            table.append(
                (e["id"], e["family"], e["variant"], str(e["n_points"]), "-" if res is None else f"{res:.3e}", e["classification"])
            )
        widths = [max(len(r[i]) for r in table) for i in range(len(table[0]))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in table]
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def write_atomic(path: str, payload: bytes) -> None:
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".qhorn-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
