"""Tabular output: aligned text, RFC 4180 CSV and JSON.

Levels are printed to 4 decimals and efficiencies to 2; criterion values
keep 10 significant digits so re-runs can be diffed byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .information import Design

FORMATS = ("text", "csv", "json")


def fmt_level(x) -> str:
    return f"{float(x):.4f}"


def fmt_eff(x) -> str:
    if x is None:
        return ""
    return f"{float(x):.2f}"


def fmt_value(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if not math.isfinite(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.10g}"


def fmt_levels(design: Design) -> str:
    if design.n_factors == 1:
        return " ".join(fmt_level(v) for v in design.levels)
    return " ".join("(" + ",".join(fmt_level(v) for v in p) + ")" for p in design.points)


def fmt_reps(design: Design) -> str:
    return " ".join(str(int(r)) for r in design.reps)


@dataclass
class Table:
    """A titled grid of cells plus free-text notes printed underneath."""

    title: str
    columns: list
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, *cells):
        self.rows.append(["" if c is None else str(c) for c in cells])

    def to_text(self) -> str:
        widths = [len(c) for c in self.columns]
        for row in self.rows:
            widths = [max(w, len(c)) for w, c in zip(widths, row)]

        def line(cells):
            return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

        out = [self.title, line(self.columns), line(["-" * w for w in widths])]
        out += [line(r) for r in self.rows]
        out += self.notes
        return "\n".join(out) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(self.columns)
        writer.writerows(self.rows)
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"title": self.title, "columns": self.columns, "rows": self.rows,
               "notes": self.notes}
        if self.data:
            doc["data"] = self.data
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        return self.to_text()


@dataclass
class DesignRow:
    label: str
    design: Design
    value: float
    efficiency: float
    singular: bool = False
    reference: bool = False


DESIGN_COLUMNS = ["design", "levels", "reps", "criterion", "efficiency", "flag"]


def design_table(title: str, rows: list, sort: bool = True) -> Table:
    """Design comparison table; with ``sort`` the reference leads and the
    rest follow in order of descending efficiency (stable on ties)."""
    if sort:
        ref = [r for r in rows if r.reference]
        rest = sorted((r for r in rows if not r.reference), key=lambda r: -r.efficiency)
        rows = ref + rest
    table = Table(title, list(DESIGN_COLUMNS))
    for r in rows:
        flag = "singular" if r.singular else ("reference" if r.reference else "")
        table.add(r.label, fmt_levels(r.design), fmt_reps(r.design), fmt_value(r.value),
                  fmt_eff(r.efficiency), flag)
    return table
