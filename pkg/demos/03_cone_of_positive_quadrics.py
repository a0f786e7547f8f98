"""The finitely generated cone approximating positive quadrics on the triangle.

Requiring every Polya-expansion coefficient at level N to be non-negative
carves a polyhedral cone out of coefficient space.  At (n, k, N) = (2, 2, 8)
that cone has 66 inequality rows and exactly 900 extreme rays, enumerated
here in exact integer arithmetic by the double description method.  The
cones are nested in N and converge to the full positive cone.
"""

import time

import numpy as np

from simplexfold import build_inequalities, enumerate_rays, scale_generators
from simplexfold.simplex import max_on_simplex, sample_uniform

print("-- nesting in N for quadrics on the triangle --------------------------")
for N in range(4):
    rep = enumerate_rays(build_inequalities(2, 2, N))
    nxt = build_inequalities(2, 2, N + 1)
    nested = all(all(sum(a * b for a, b in zip(row, ray)) >= 0
                     for row in nxt.ineq) for ray in rep.rays)
    print(f"  N={N}: {len(rep.ineq):3d} rows, {len(rep.rays):3d} rays; "
          f"rays lie in the N={N + 1} cone: {nested}")

print("\n-- the working cone: N = 8 --------------------------------------------")
t0 = time.time()
rep = build_inequalities(2, 2, 8)
enumerate_rays(rep)
print(f"  {len(rep.ineq)} inequalities in R^{rep.dim}, "
      f"{len(rep.rays)} extreme rays  ({time.time() - t0:.1f}s, exact)")

t0 = time.time()
scale_generators(rep)
print(f"  generators scaled to unit simplex maximum ({time.time() - t0:.0f}s)")
vals = [max_on_simplex(p)[0] for p in rep.scaled_rays[:20]]
print(f"  re-checked maxima of the first 20: "
      f"[{min(vals):.9f}, {max(vals):.9f}]")

print("\n-- random positive combinations stay non-negative ---------------------")
rng = np.random.default_rng(0)
pts = sample_uniform(2, 50_000, rng)
worst = 0.0
for _ in range(100):
    w = rng.random(len(rep.rays))
    poly = rep.poly_from_vector(w @ np.array(rep.rays, dtype=float))
    worst = min(worst, float(poly.eval_many(pts).min()))
print(f"  min over 100 random combinations x 5*10^4 points: {worst:.2e}")
