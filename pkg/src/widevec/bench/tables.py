"""Deterministic CSV and markdown emission of benchmark records.

Column order: Resolution | parameter column | one time column per variant in
canonical order | Vectorization speedup | Optimization speedup.  The
parameter column is "Kernel size" (filter), "Filter size" (erode) or
"SVM step" (bow); bow tables carry no Resolution column.  Numbers are
printed with 6 significant digits, dot decimal; both formats carry identical
numeric content.
"""

from __future__ import annotations

import numpy as np

from .records import VARIANT_ORDER, BenchRecord, BenchVariant, speedups

__all__ = ["emit", "format_number"]

_PARAM_HEADER = {"filter": "Kernel size", "erode": "Filter size", "bow": "SVM step"}
_FAILED = "failed"
_NA = "n/a"


def format_number(x: float) -> str:
    return np.format_float_positional(
        np.float64(x), precision=6, unique=False, fractional=False, trim="-"
    )


def _csv_field(s: str) -> str:
    if any(c in s for c in ',"\r\n'):
        return '"' + s.replace('"', '""') + '"'
    return s


def _rows(records: list[BenchRecord]) -> tuple[list[str], list[list[str]]]:
    if not records:
        return ["Resolution", "Kernel size"], []
    suite = records[0].suite
    variants_present = [v for v in VARIANT_ORDER if any(r.variant == v.value for r in records)]
    with_resolution = suite != "bow"
    want_vect = (
        BenchVariant.SEQ_SCALAR in variants_present and BenchVariant.SEQ_VECTOR in variants_present
    )
    want_opt = (
        BenchVariant.SEQ_VECTOR in variants_present and BenchVariant.OPTIM in variants_present
    )

    header = (["Resolution"] if with_resolution else []) + [_PARAM_HEADER.get(suite, "Parameter")]
    header += [v.value for v in variants_present]
    if want_vect:
        header.append("Vectorization speedup")
    if want_opt:
        header.append("Optimization speedup")

    sp = speedups(records)
    cells: dict[tuple, BenchRecord] = {(r.workload, r.variant): r for r in records}
    workloads = []
    for r in records:  # preserve first-seen workload order
        if r.workload not in workloads:
            workloads.append(r.workload)

    rows = []
    for wl in workloads:
        _, resolution, param = wl
        row = ([resolution] if with_resolution else []) + [param]
        for v in variants_present:
            cell = cells.get((wl, v.value))
            if cell is None:
                row.append(_NA)
            elif not cell.ok or cell.min_time is None:
                row.append(_FAILED)
            else:
                row.append(format_number(cell.min_time))
        if want_vect:
            s = sp[wl].vectorization
            row.append(format_number(s) if s is not None else _NA)
        if want_opt:
            s = sp[wl].optimization
            row.append(format_number(s) if s is not None else _NA)
        rows.append(row)
    return header, rows


def emit(records: list[BenchRecord], fmt: str = "csv") -> bytes:
    """Render records as an RFC-4180-style CSV or a markdown pipe table."""
    header, rows = _rows(records)
    fmt = fmt.lower()
    if fmt == "csv":
        lines = [",".join(_csv_field(c) for c in header)]
        lines += [",".join(_csv_field(c) for c in row) for row in rows]
        return ("\n".join(lines) + "\n").encode("utf-8")
    if fmt in ("md", "markdown"):
        widths = [
            max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
            for i in range(len(header))
        ]
        def line(cells):
            return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"
        lines = [line(header), "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
        lines += [line(r) for r in rows]
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}; expected csv or markdown")
