"""Geometry of the unit simplex in projected coordinates.

A point of the n-simplex is a length-n vector x with x_i >= 0 and
sum(x) <= 1; the implicit coordinate is x_{n+1} = 1 - sum(x).  Faces are
identified by the set of active facet inequalities, with facet index n+1
standing for sum(x) = 1 (1-based indices, so a frozenset subset of
{1, ..., n+1}; the empty set is the interior).

Monomial integrals over the simplex are exact rationals, which makes the
L2 distance between polynomial maps exact up to the final square root.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np
from scipy.optimize import minimize

from .polynomial import EXACT, MultiPoly

DEFAULT_TOL = 1e-9


class OutsideSimplexError(ValueError):
    pass


def in_simplex(x, tol: float = DEFAULT_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all(x >= -tol) and x.sum() <= 1 + tol)


def check_in_simplex(x, tol: float = DEFAULT_TOL):
    if not in_simplex(x, tol):
        raise OutsideSimplexError(f"point {x} outside simplex beyond tol={tol}")


def vertices(n: int) -> np.ndarray:
    """The n+1 vertices in projected coordinates: origin and unit points."""
    return np.vstack([np.zeros(n), np.eye(n)])


def face_of(x, tol: float = DEFAULT_TOL) -> frozenset[int]:
    """Active facet set of a point: {i <= n : x_i <= tol}, plus n+1 if sum >= 1-tol."""
    x = np.asarray(x, dtype=float)
    check_in_simplex(x, tol)
    n = len(x)
    active = {i + 1 for i in range(n) if x[i] <= tol}
    if 1 - x.sum() <= tol:
        active.add(n + 1)
    return frozenset(active)


def monomial_integral(alpha, n: int) -> Fraction:
    """Integral of x^alpha over the n-simplex: prod(a_i!) / (|a| + n)!."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n or any(a < 0 for a in alpha):
        raise ValueError(f"bad exponent vector {alpha} for n={n}")
    num = 1
    for a in alpha:
        num *= factorial(a)
    return Fraction(num, factorial(sum(alpha) + n))


def integrate_poly(p: MultiPoly):
    """Integral of p over the simplex; exact in exact mode."""
    total = Fraction(0) if p.scalar_mode == EXACT else 0.0
    for exp, c in p.terms.items():
        I = monomial_integral(exp, p.num_vars)
        total += c * (I if p.scalar_mode == EXACT else float(I))
    return total


def l2_distance(f, g) -> float:
    """L2 distance between two maps: sqrt(sum_i int (P_i - Q_i)^2 dx).

    Accepts anything with fields .n and .P (the n defining polynomials).
    If the maps differ in scalar mode, both are taken to float.
    """
    if f.n != g.n:
        raise ValueError("maps live on different simplices")
    total = None
    for p, q in zip(f.P, g.P):
        if p.scalar_mode != q.scalar_mode:
            p, q = p.to_float(), q.to_float()
        d = p - q
        val = integrate_poly(d * d)
        total = val if total is None else total + val
    return float(total) ** 0.5


def sample_uniform(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. uniform points on the n-simplex, one per row.

    Exponential-spacings construction: n+1 unit exponentials normalized by
    their sum are uniform on the embedded simplex; drop the last coordinate.
    """
    if count == 0:
        return np.zeros((0, n))
    e = rng.exponential(size=(count, n + 1))
    return e[:, :n] / e.sum(axis=1, keepdims=True)


@lru_cache(maxsize=64)
def barycentric_lattice(n: int, depth: int) -> np.ndarray:
    """All lattice points i/depth with nonnegative i and sum(i) <= depth."""
    pts = []

    def rec(prefix, remaining, k):
        if k == 1:
            for i in range(remaining + 1):
                pts.append(prefix + (i,))
            return
        for i in range(remaining + 1):
            rec(prefix + (i,), remaining - i, k - 1)

    rec((), depth, n)
    return np.array(pts, dtype=float) / depth


def default_grid_depth(n: int, target: int = 10_000) -> int:
    """Smallest depth whose lattice has at least `target` points (10^3 for n=1)."""
    if n == 1:
        return 1000
    d = 1
    while comb(d + n, n) < target:
        d += 1
    return d


@lru_cache(maxsize=32)
def quasi_uniform_points(n: int, count: int) -> np.ndarray:
    """Deterministic low-discrepancy points on the simplex.

    An R_d Kronecker sequence in the unit cube, pushed to the simplex by the
    sorted-spacings map (order statistics of n draws cut [0,1] into n+1
    spacings; the first n are simplex coordinates).
    """
    # root of x^(n+1) = x + 1 via fixed point iteration
    phi = 2.0
    for _ in range(64):
        phi = (1 + phi) ** (1.0 / (n + 1))
    alphas = np.array([(1.0 / phi) ** (i + 1) for i in range(n)])
    j = np.arange(1, count + 1)[:, None]
    u = np.mod(0.5 + j * alphas[None, :], 1.0)
    z = np.sort(u, axis=1)
    z = np.hstack([np.zeros((count, 1)), z])
    return np.diff(np.hstack([z, np.ones((count, 1))]), axis=1)[:, :n]


def _project_unit_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, len(v) + 1)
    cond = u - (css - 1.0) / idx > 0
    rho = idx[cond][-1]
    theta = (css[cond][-1] - 1.0) / rho
    return np.maximum(v - theta, 0.0)


def project_to_simplex(v) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum(x) <= 1}."""
    v = np.asarray(v, dtype=float)
    y = np.maximum(v, 0.0)
    if y.sum() <= 1.0:
        return y
    return _project_unit_simplex(v)


def max_on_simplex(p: MultiPoly, grid_depth: int | None = None,
                   refine_iters: int = 200) -> tuple[float, np.ndarray]:
    """Global maximum of p over the simplex: dense lattice scan plus
    Nelder-Mead refinement from the best interior and per-facet grid points.

    Refinement evaluates p through a Euclidean projection onto the simplex,
    so iterates never leave the feasible set.
    """
    n = p.num_vars
    if grid_depth is None:
        grid_depth = default_grid_depth(n)
    grid = barycentric_lattice(n, grid_depth)
    vals = p.eval_many(grid)
    best_val = float(vals.max())
    best_pt = grid[int(vals.argmax())]

    seeds = [best_pt]
    sums = grid.sum(axis=1)
    for i in range(n):
        mask = grid[:, i] == 0.0
        if mask.any():
            sub = np.flatnonzero(mask)
            seeds.append(grid[sub[vals[sub].argmax()]])
    mask = np.isclose(sums, 1.0)
    if mask.any():
        sub = np.flatnonzero(mask)
        seeds.append(grid[sub[vals[sub].argmax()]])

    def neg(x):
        return -float(p.eval_many(project_to_simplex(x)))

    for seed in seeds:
        res = minimize(neg, seed, method="Nelder-Mead",
                       options={"maxiter": refine_iters, "xatol": 1e-12,
                                "fatol": 1e-14})
        cand = project_to_simplex(res.x)
        v = float(p.eval_many(cand))
        if v > best_val:
            best_val, best_pt = v, cand
    return best_val, np.asarray(best_pt, dtype=float)
