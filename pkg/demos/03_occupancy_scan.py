"""Float orbits across the coupling range.

Prints, for each eps, the share of random orbits whose tails stay inside S,
and the share that stay in A or one of its images. Pass a path to keep the
per-orbit CSV.
"""
import sys

import numpy as np

from cml4.explore import SimulationConfig, scan_eps

cfg = SimulationConfig(eps=0.3, steps=4_000, burn_in=1_000, orbit_count=40, rng_seed=7)
grid = [float(e) for e in np.round(np.linspace(0.24, 0.46, 12), 3)]
rows, csv_text = scan_eps(grid, cfg)
print(" eps   tail in S  tail in A-family")
for r in rows:
    print(f"{r.eps:.3f}   {r.tail_in_S:8.2f}   {r.tail_in_A_family:8.2f}")
if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as fh:
        fh.write(csv_text)
