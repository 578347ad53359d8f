"""Serialization of tables and solver reports.

JSON numerics are written as decimal strings with enough digits to
reconstruct the working-precision value exactly, so serialize/parse is
lossless and exact tags survive the round trip.
"""

from __future__ import annotations

import csv
import io as _io
import json
from fractions import Fraction

import mpmath

from .affine import AffineWeight
from .qdim import QDimValue, precision_bits
from .solver import DilogReport, RestrictedSolution
from .table import QTable


def _mpf_str(x: mpmath.mpf) -> str:
    digits = int(precision_bits() * 0.30103) + 10
    return mpmath.nstr(x, digits, strip_zeros=True)


def _mpf_parse(s: str) -> mpmath.mpf:
    with mpmath.workprec(precision_bits()):
        return mpmath.mpf(s)


def qtable_to_dict(table: QTable) -> dict:
    cells = []
    for a in range(1, table.rank + 1):
        for m in range(table.m_max + 1):
            cell = table.cells[(a, m)]
            cells.append({
                "a": a,
                "m": m,
                "exact": cell.exact,
                "numeric": _mpf_str(cell.numeric),
                "provenance": [list(w.coords) for w in table.provenance[(a, m)]],
            })
    return {
        "family": table.family,
        "rank": table.rank,
        "level": table.level,
        "h": table.coxeter,
        "cells": cells,
    }


def qtable_to_json(table: QTable) -> str:
    return json.dumps(qtable_to_dict(table), indent=1)


def qtable_from_dict(data: dict) -> QTable:
    level = int(data["level"])
    cells = {}
    provenance = {}
    m_max = 0
    for entry in data["cells"]:
        key = (int(entry["a"]), int(entry["m"]))
        m_max = max(m_max, key[1])
        exact = entry["exact"]
        cells[key] = QDimValue(
            exact=None if exact is None else int(exact),
            numeric=_mpf_parse(entry["numeric"]),
        )
        provenance[key] = tuple(
            AffineWeight(level, tuple(int(c) for c in coords))
            for coords in entry["provenance"]
        )
    return QTable(
        family=data["family"],
        rank=int(data["rank"]),
        level=level,
        coxeter=int(data["h"]),
        m_max=m_max,
        cells=cells,
        provenance=provenance,
        reduced={},
    )


def qtable_from_json(text: str) -> QTable:
    return qtable_from_dict(json.loads(text))


def _cell_text(cell: QDimValue, width: int = 0) -> str:
    if cell.exact is not None:
        s = str(cell.exact)
    else:
        s = mpmath.nstr(cell.numeric, 10)
    return s.rjust(width) if width else s


def qtable_to_csv(table: QTable) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["a", "m", "value", "exact_tag"])
    for a in range(1, table.rank + 1):
        for m in range(table.m_max + 1):
            cell = table.cells[(a, m)]
            tag = "generic" if cell.exact is None else str(cell.exact)
            writer.writerow([a, m, _mpf_str(cell.numeric), tag])
    return buf.getvalue()


def qtable_to_text(table: QTable) -> str:
    """Matrix layout: one row per m, one column per node."""
    header = [f"{table.family}{table.rank}, level {table.level}, "
              f"coxeter {table.coxeter}, rows 0..{table.m_max}"]
    col_cells = {
        a: [_cell_text(table.cells[(a, m)]) for m in range(table.m_max + 1)]
        for a in range(1, table.rank + 1)
    }
    widths = {a: max(len(s) for s in col) for a, col in col_cells.items()}
    widths = {a: max(w, len(f"a={a}")) for a, w in widths.items()}
    head = "    m | " + "  ".join(f"a={a}".rjust(widths[a]) for a in sorted(widths))
    lines = [head, "-" * len(head)]
    for m in range(table.m_max + 1):
        row = "  ".join(col_cells[a][m].rjust(widths[a]) for a in sorted(widths))
        lines.append(f"{m:5d} | {row}")
    return "\n".join(header + lines) + "\n"


def solution_to_dict(sol: RestrictedSolution,
                     dilog: DilogReport | None = None,
                     table_deviation: float | None = None) -> dict:
    values = [
        {"a": a, "m": m, "value": _mpf_str(sol.values[(a, m)])}
        for a in range(1, sol.rank + 1)
        for m in range(sol.level + 1)
    ]
    out = {
        "family": sol.family,
        "rank": sol.rank,
        "level": sol.level,
        "residual": sol.residual,
        "iterations": sol.iterations,
        "values": values,
    }
    if dilog is not None:
        out["dilog"] = {
            "lhs": _mpf_str(dilog.lhs),
            "rhs": str(Fraction(dilog.rhs)),
            "delta": dilog.delta,
        }
    if table_deviation is not None:
        out["table_deviation"] = table_deviation
    return out


def solution_to_text(sol: RestrictedSolution,
                     dilog: DilogReport | None = None,
                     table_deviation: float | None = None) -> str:
    lines = [
        f"{sol.family}{sol.rank}, level {sol.level}: "
        f"residual {sol.residual:.3e} after {sol.iterations} iterations"
    ]
    for a in range(1, sol.rank + 1):
        row = "  ".join(mpmath.nstr(sol.values[(a, m)], 10)
                        for m in range(sol.level + 1))
        lines.append(f"  a={a}: {row}")
    if table_deviation is not None:
        lines.append(f"  max deviation from table: {table_deviation:.3e}")
    if dilog is not None:
        lines.append(
            f"  dilog: lhs {mpmath.nstr(dilog.lhs, 15)} = rhs {dilog.rhs}"
            f" (delta {dilog.delta:.3e})"
        )
    return "\n".join(lines) + "\n"
