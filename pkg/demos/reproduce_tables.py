"""Rebuild the three bound tables and compare every cell with its printed value.

Run:  python demos/reproduce_tables.py
"""

from runsapprox.tables import compute_table, render, summarize, summary_line

for tid in (1, 2, 3):
    cells = compute_table(tid)
    print(render(tid, cells, "markdown"))
    print(summary_line(tid, summarize(cells)))
    print()

# The largest deviations all sit at the 7th decimal, i.e. rounding of the print.
cells = compute_table(1)
worst = max(cells, key=lambda c: c.deviation)
print(f"worst table 1 cell: {worst.row} n={worst.n} q={worst.q}: "
      f"{worst.value:.9f} vs printed {worst.printed}")
