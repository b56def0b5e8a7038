import json

import pytest

from runsapprox.tables import (TABLES, Cell, compute_table, load_golden, render, summarize)


@pytest.mark.parametrize("tid,count", [(1, 90), (2, 36), (3, 75)])
def test_golden_files_cover_every_cell(tid, count):
    golden = load_golden(tid)
    assert len(golden) == count
    cells = compute_table(tid)
    assert len(cells) == count and all(c.printed is not None for c in cells)


def test_scientific_cells_use_relative_tolerance():
    c = Cell("one_iid", 3, 2, 31, 0.01, 8.3e-6, "8.0e-6")
    assert c.scientific and c.deviation == pytest.approx(0.0375)
    assert c.ok
    assert not Cell("x", 3, 2, 31, 0.01, 0.1261170, "0.1261160").ok


def test_table3_spot_cell():
    cells = compute_table(3)
    cell = next(c for c in cells if (c.row, c.k1, c.k2, c.q) == ("poisson", 5, 2, 0.55))
    assert cell.n == 730
    assert cell.value == pytest.approx(0.1318160, abs=5e-7)


def test_renderers():
    cells = compute_table(2)
    csv_text = render(2, cells, "csv")
    assert csv_text.splitlines()[0] == "row,k1,k2,n,q,value,printed,deviation"
    assert "0.0000223" in csv_text
    md = render(2, cells, "markdown")
    assert "8.0e-06" in md and md.count("\n") == 2 + 6
    payload = json.loads(render(2, cells, "json"))
    assert payload["summary"]["failures"] == 0 and payload["alpha_preset"] == "n/3k"
    with pytest.raises(ValueError):
        render(2, cells, "html")


def test_presets():
    assert TABLES[1].alpha_preset == "n/k" and TABLES[3].grid[2] == (5, 5, 1095)
    with pytest.raises(KeyError):
        compute_table(4)
