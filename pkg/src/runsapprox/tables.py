"""Reproduction of the published bound tables against embedded golden values."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from importlib import resources

from .bounds import bound_cor41, bound_cor42, bound_poisson, bound_thm21, bound_thm22
from .matching import match_one_fix_alpha, match_two_iid, preset_alpha
from .model import RunsSpec

ABS_TOL = 5e-7
REL_TOL = 5e-2

ROW_ORDER = ("poisson", "one_iid", "one_noniid", "two_iid", "two_noniid")
ROW_LABELS = {
    "poisson": "Poisson",
    "one_iid": "PB (One iid)",
    "one_noniid": "PB (One non-iid)",
    "two_iid": "PB (Two iid)",
    "two_noniid": "PB (Two non-iid)",
}


@dataclass(frozen=True)
class TableSpec:
    table_id: int
    rows: tuple
    grid: tuple  # ((k1, k2, n), ...)
    qs: tuple
    alpha_preset: str


TABLES = {
    1: TableSpec(1, ROW_ORDER, ((3, 2, 31), (3, 2, 61), (3, 2, 91)),
                 (0.25, 0.26, 0.27, 0.28, 0.29, 0.30), "n/k"),
    2: TableSpec(2, ("one_iid", "one_noniid"), ((3, 2, 31), (3, 2, 61), (3, 2, 91)),
                 (0.01, 0.02, 0.03, 0.04, 0.05, 0.06), "n/3k"),
    3: TableSpec(3, ROW_ORDER, ((3, 4, 365), (5, 2, 730), (5, 5, 1095)),
                 (0.15, 0.35, 0.55, 0.75, 0.95), "n/3k"),
}


@dataclass
class Cell:
    row: str
    k1: int
    k2: int
    n: int
    q: float
    value: float
    printed: str | None = None

    @property
    def scientific(self) -> bool:
        return self.printed is not None and "e" in self.printed.lower()

    @property
    def deviation(self) -> float | None:
        """Absolute deviation, or relative deviation for 2-s.f. scientific prints."""
        if self.printed is None:
            return None
        ref = float(self.printed)
        if self.scientific:
            return abs(self.value - ref) / abs(ref)
        return abs(self.value - ref)

    @property
    def ok(self) -> bool | None:
        dev = self.deviation
        if dev is None:
            return None
        return dev <= (REL_TOL if self.scientific else ABS_TOL)


def cell_value(row: str, k1: int, k2: int, n: int, q: float, alpha_preset: str) -> float:
    spec = RunsSpec(k1, k2, n, 1 - q)
    if row == "poisson":
        return bound_poisson(spec, "table").value
    if row in ("one_iid", "one_noniid"):
        match = match_one_fix_alpha(spec, preset_alpha(spec, alpha_preset))
        fn = bound_thm21 if row == "one_iid" else bound_cor41
        return fn(spec, match).value
    if row == "two_iid":
        return bound_thm22(spec).value
    if row == "two_noniid":
        return bound_cor42(spec, match_two_iid(spec)).value
    raise KeyError(row)


def load_golden(table_id: int) -> dict:
    text = resources.files("runsapprox").joinpath(f"data/table{table_id}.csv").read_text()
    body = "\n".join(l for l in text.splitlines() if not l.startswith("#"))
    out = {}
    for r in csv.DictReader(io.StringIO(body)):
        key = (r["row"], int(r["k1"]), int(r["k2"]), int(r["n"]), round(float(r["q"]), 4))
        out[key] = r["printed"]
    return out


def compute_table(table_id: int) -> list:
    if table_id not in TABLES:
        raise KeyError(f"unknown table id {table_id}")
    ts = TABLES[table_id]
    golden = load_golden(table_id)
    cells = []
    for k1, k2, n in ts.grid:
        for row in ts.rows:
            for q in ts.qs:
                value = cell_value(row, k1, k2, n, q, ts.alpha_preset)
                printed = golden.get((row, k1, k2, n, round(q, 4)))
                cells.append(Cell(row, k1, k2, n, q, value, printed))
    return cells


def summarize(cells: list) -> dict:
    abs_dev = [c.deviation for c in cells if c.printed is not None and not c.scientific]
    rel_dev = [c.deviation for c in cells if c.scientific]
    return {
        "cells": len(cells),
        "compared": sum(c.printed is not None for c in cells),
        "failures": sum(c.ok is False for c in cells),
        "max_abs_deviation": max(abs_dev, default=0.0),
        "max_rel_deviation_scientific": max(rel_dev, default=0.0),
    }


def summary_line(table_id: int, summary: dict) -> str:
    return (f"table {table_id}: {summary['compared']} cells compared, "
            f"max abs deviation {summary['max_abs_deviation']:.3e}, "
            f"max rel deviation (2 s.f. prints) {summary['max_rel_deviation_scientific']:.3e}, "
            f"failures {summary['failures']}")


def render(table_id: int, cells: list, fmt: str = "csv", precision: int = 7) -> str:
    ts = TABLES[table_id]
    if fmt == "json":
        return json.dumps({"table": table_id, "alpha_preset": ts.alpha_preset,
                           "cells": [asdict(c) for c in cells], "summary": summarize(cells)},
                          indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "k1", "k2", "n", "q", "value", "printed", "deviation"])
        for c in cells:
            dev = "" if c.deviation is None else f"{c.deviation:.3e}"
            w.writerow([c.row, c.k1, c.k2, c.n, f"{c.q:g}", f"{c.value:.{precision}f}",
                        c.printed or "", dev])
        return buf.getvalue()
    if fmt == "markdown":
        lines = ["| Approximation | (k1,k2) | n | " + " | ".join(f"q={q:g}" for q in ts.qs) + " |",
                 "|---|---|---|" + "---|" * len(ts.qs)]
        by_key = {(c.row, c.k1, c.k2, c.n, c.q): c for c in cells}
        for k1, k2, n in ts.grid:
            for row in ts.rows:
                vals = [_fmt_value(by_key[(row, k1, k2, n, q)].value, precision) for q in ts.qs]
                lines.append(f"| {ROW_LABELS[row]} | ({k1},{k2}) | {n} | " + " | ".join(vals) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _fmt_value(v: float, precision: int) -> str:
    # the published tables switch to 2 s.f. scientific notation below 1e-5
    if v != 0 and abs(v) < 1e-5:
        return f"{v:.1e}"
    return f"{v:.{precision}f}"
