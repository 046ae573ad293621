"""
How the two variants scale
==========================

Gate counts are the portable cost measure here: they are exact, the same
for every backend, and independent of hardware. This demo measures a small
grid and prints the shape of the results; the full benchmark grid lives in
the test suite and the `ocwc bench` subcommand.
"""

import tempfile
from pathlib import Path

from ocwc.bench import run_grid

out = Path(tempfile.mkdtemp(prefix="ocwc-bench-")) / "report.jsonl"
records = run_grid([2, 4, 8], [8, 16], out_path=out, seed=0)
cells = [r for r in records if r["kind"] == "cell"]
diag = records[-1]

print(f"{'algorithm':<14} {'k':>3} {'n':>3} {'gates':>10}")
for row in cells:
    print(f"{row['algorithm']:<14} {row['k']:>3} {row['n']:>3} {row['total_gates']:>10,}")

print()
print("doubling k multiplies the improved cost by:")
for entry in diag["k_doubling"]:
    print(f"  n={entry['n']:>2}, k {entry['k_from']:>2} -> {entry['k_to']:>2}:"
          f" x{entry['ratio']:.2f}")

print()
print("improved variant vs the per-feature tree baseline (higher = better):")
for entry in diag["baseline_ratio"]:
    print(f"  k={entry['k']:>2} n={entry['n']:>2}: {entry['ratio']:.2f}")

print()
print("report written to", out)
print("summary table   ", out.with_suffix(".csv"))
