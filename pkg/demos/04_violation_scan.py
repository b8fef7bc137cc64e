"""A small multiplicativity/additivity scan.

For each (p, d) a Haar channel with the critical input dimension is sampled.
The product bound is exact; the single-channel maximum is a multistart
estimate, so a positive gap is evidence, not a proof.

Run: python3 demos/04_violation_scan.py   (about 10 seconds)
"""
from renyi_dvoretzky import AscentConfig, ScanGrid, run_scan

grid = ScanGrid(p_values=(2, 3), d_values=(4, 8), trials=2)
reports, summary = run_scan(grid, AscentConfig(restarts=8), master_seed=2024)
for r in reports:
    print(r.summary_line())
print()
for row in summary:
    print(row)
