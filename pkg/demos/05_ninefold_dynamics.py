"""Dynamics of the nine-fold: fixed points, spectra and fixation times.

The degree-9 fold of the triangle has two attracting vertices; orbits
started near the opposite corner wander chaotically, fall onto the
boundary, and fixate at one of the two attracting vertices.  The fixation
times follow a log-normal distribution remarkably well.
"""

import collections

import numpy as np

from simplexfold import catalog, find_fixed_points, fixation_experiment

f9 = catalog("tri:f9")

print("-- fixed points and their spectra --------------------------------------")
report = find_fixed_points(f9)
by_kind = collections.Counter(p.classification for p in report.points)
print(f"  {len(report)} fixed points: {dict(by_kind)}")
for p in report.points:
    mods = ", ".join(f"{abs(z):.3f}" for z in p.eigenvalues)
    print(f"  ({p.point[0]:+.6f}, {p.point[1]:+.6f})  {p.classification:<10} |eig| = {mods}")
print("  note: the three saddles on the edge x+y=1 have one eigenvalue exactly 0")
print("  (the third component vanishes quadratically there).")

print("\n-- fixation from the corner square (0, 1/100)^2 -------------------------")
res = fixation_experiment(f9.to_float(), region=0.01, count=10_000, master_seed=0)
hits = collections.Counter(r.vertex for r in res.records)
print(f"  absorbed {res.absorbed}/10000 (unabsorbed {res.unabsorbed})")
for v, c in sorted(hits.items()):
    print(f"  vertex {v}: {c}")
print(f"  log-normal MLE: mu = {res.mu:.3f}, sigma = {res.sigma:.3f}")

times = np.array([r.time for r in res.records])
print("\n  fixation-time histogram (iterations):")
for lo in range(0, 50, 5):
    n = int(((times >= lo) & (times < lo + 5)).sum())
    print(f"  {lo:3d}-{lo + 4:3d} | {'#' * (n // 80)}{n:5d}")
print(f"  >= 50 | {int((times >= 50).sum()):5d}")
