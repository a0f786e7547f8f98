"""Finitely generated inner approximations of the positive cone on the simplex.

For parameters (n, k, N) the cone lives in coefficient space: a polynomial
P of degree <= k in n variables belongs iff every coefficient of
(x_1+...+x_{n+1})^N * P_H is non-negative.  Expanding that product in the
degree-(N+k) monomial basis gives one integer inequality row per monomial;
the extreme rays of the resulting polyhedral cone are enumerated exactly by
the double description method over arbitrary-precision integers.

Rays are kept as primitive integer vectors (gcd 1, first nonzero positive),
which makes set comparison across runs exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, gcd

import numpy as np

from . import simplex
from .polynomial import EXACT, FLOAT, MultiPoly, monomials_exact, monomials_upto

Vec = tuple[int, ...]


class ConeNotPointedError(ValueError):
    """The inequality system admits a line; extreme rays are not defined."""


@dataclass
class ConeRep:
    n: int
    k: int
    N: int
    basis: list[Vec]            # graded-lex monomial exponents spanning Pi_k^n
    row_monomials: list[Vec]    # degree-(N+k) monomials in n+1 vars, one per row
    ineq: list[Vec]             # integer inequality rows, ineq @ c >= 0
    rays: list[Vec] | None = None
    scaled_rays: list[MultiPoly] | None = None
    scaled_vectors: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def ray_poly(self, i: int) -> MultiPoly:
        """Exact generator polynomial for ray i."""
        vec = self.rays[i]
        return MultiPoly(self.n, dict(zip(self.basis, vec)), EXACT)

    def poly_from_vector(self, vec, mode=FLOAT) -> MultiPoly:
        return MultiPoly(self.n, dict(zip(self.basis, vec)), mode)

    def to_json(self) -> dict:
        data = {
            "n": self.n, "k": self.k, "N": self.N,
            "basis": [list(b) for b in self.basis],
            "row_monomials": [list(b) for b in self.row_monomials],
            "ineq": [[f"{c}/1" for c in row] for row in self.ineq],
        }
        if self.rays is not None:
            data["rays"] = [[f"{c}/1" for c in r] for r in self.rays]
        if self.scaled_rays is not None:
            data["scaled_rays"] = [p.to_json() for p in self.scaled_rays]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "ConeRep":
        def ivec(row):
            out = []
            for c in row:
                f = Fraction(c)
                if f.denominator != 1:
                    raise ValueError("non-integer cone entry")
                out.append(int(f))
            return tuple(out)

        cone = cls(int(data["n"]), int(data["k"]), int(data["N"]),
                   [tuple(b) for b in data["basis"]],
                   [tuple(b) for b in data["row_monomials"]],
                   [ivec(r) for r in data["ineq"]])
        if "rays" in data:
            cone.rays = [ivec(r) for r in data["rays"]]
        if "scaled_rays" in data:
            cone.scaled_rays = [MultiPoly.from_json(p) for p in data["scaled_rays"]]
            cone.scaled_vectors = np.array(
                [[float(p.terms.get(b, 0.0)) for b in cone.basis]
                 for p in cone.scaled_rays])
        return cone


def build_inequalities(n: int, k: int, N: int) -> ConeRep:
    """Integer matrix of the Polya expansion coefficients.

    Column alpha holds the expansion of x^alpha * L^(N+k-|alpha|); row beta
    is the coefficient of the degree-(N+k) monomial beta, a multinomial
    count, so the whole matrix is integral.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    basis = monomials_upto(n, k)
    rows = monomials_exact(n + 1, N + k)
    row_pos = {b: i for i, b in enumerate(rows)}
    A = [[0] * len(basis) for _ in rows]
    for col, alpha in enumerate(basis):
        m = N + k - sum(alpha)
        for extra in monomials_exact(n + 1, m):
            beta = tuple(alpha[i] + extra[i] for i in range(n)) + (extra[n],)
            c = factorial(m)
            for e in extra:
                c //= factorial(e)
            A[row_pos[beta]][col] += c
    assert len(A) == comb(N + k + n, n)
    return ConeRep(n, k, N, basis, rows, [tuple(r) for r in A])


def primitive(v) -> Vec:
    """GCD-reduced integer vector with positive first nonzero entry."""
    g = 0
    for c in v:
        g = gcd(g, abs(c))
    if g == 0:
        return tuple(int(c) for c in v)
    v = [int(c) // g for c in v]
    for c in v:
        if c:
            if c < 0:
                v = [-u for u in v]
            break
    return tuple(v)


def _rank(rows, dim: int) -> int:
    m = [[Fraction(c) for c in r] for r in rows]
    r = 0
    for c in range(dim):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def _initial_simplicial(A: list[Vec], dim: int):
    """D independent rows and the integer rays of their simplicial cone."""
    idx, chosen = [], []
    for i, row in enumerate(A):
        if _rank(chosen + [row], dim) > len(chosen):
            chosen.append(row)
            idx.append(i)
        if len(chosen) == dim:
            break
    if len(chosen) < dim:
        raise ConeNotPointedError(
            f"inequality matrix has rank {len(chosen)} < {dim}; cone contains a line")
    # Gauss-Jordan inverse over Fractions, then clear denominators per column
    M = [[Fraction(c) for c in row] for row in chosen]
    inv = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    det = Fraction(1)
    for c in range(dim):
        piv = next(i for i in range(c, dim) if M[i][c] != 0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            inv[c], inv[piv] = inv[piv], inv[c]
            det = -det
        det *= M[c][c]
        f = M[c][c]
        M[c] = [a / f for a in M[c]]
        inv[c] = [a / f for a in inv[c]]
        for i in range(dim):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
                inv[i] = [a - f * b for a, b in zip(inv[i], inv[c])]
    sign = 1 if det > 0 else -1
    rays = []
    for j in range(dim):
        col = [sign * inv[i][j] for i in range(dim)]
        den = _lcm_den(col)
        rays.append(primitive([int(c * den) for c in col]))
    return idx, rays


def _lcm_den(col) -> int:
    lcm = 1
    for c in col:
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    return lcm


def _popcount(x: int) -> int:
    return x.bit_count()


def enumerate_rays(cone: ConeRep) -> ConeRep:
    """Fill cone.rays with the complete set of extreme rays.

    Double description with dynamic row insertion (next row = most zeros
    against the current rays).  Adjacency of a positive/negative ray pair
    uses the combinatorial test over the processed rows: their common active
    set must not be contained in any third ray's active set, with a
    popcount >= dim-2 prefilter.
    """
    A = cone.ineq
    D = cone.dim
    idx, rays = _initial_simplicial(A, D)
    processed = list(idx)
    dots = {r: [_dot(A[i], r) for i in processed] for r in rays}
    remaining = [i for i in range(len(A)) if i not in set(idx)]

    while remaining:
        best, best_zeros = None, -1
        cache = {}
        for i in remaining:
            d = [_dot(A[i], r) for r in rays]
            cache[i] = d
            z = sum(1 for v in d if v == 0)
            if z > best_zeros:
                best_zeros, best = z, i
        i = best
        remaining.remove(i)
        adot = dict(zip(rays, cache[i]))
        plus = [r for r in rays if adot[r] > 0]
        zero = [r for r in rays if adot[r] == 0]
        minus = [r for r in rays if adot[r] < 0]
        if not minus:
            processed.append(i)
            for r in rays:
                dots[r].append(adot[r])
            continue
        zmask = {r: _zero_mask(dots[r]) for r in rays}
        new_rays = []
        for rp in plus:
            zp = zmask[rp]
            for rm in minus:
                t = zp & zmask[rm]
                if _popcount(t) < D - 2:
                    continue
                if any(r3 is not rp and r3 is not rm and zmask[r3] & t == t
                       for r3 in rays):
                    continue
                w = [adot[rp] * b - adot[rm] * a for a, b in zip(rp, rm)]
                new_rays.append(primitive(w))
        processed.append(i)
        kept = plus + zero
        new_dots = {r: dots[r] + [adot[r]] for r in kept}
        uniq = []
        for r in new_rays:
            if r not in new_dots:
                new_dots[r] = [_dot(A[j], r) for j in processed]
                uniq.append(r)
        rays = kept + uniq
        dots = new_dots

    cone.rays = sorted(rays)
    return cone


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def _zero_mask(dotlist) -> int:
    m = 0
    for j, d in enumerate(dotlist):
        if d == 0:
            m |= 1 << j
    return m


def ray_is_extreme(cone: ConeRep, ray) -> bool:
    """Active inequality rows of the ray have rank dim-1 (and none negative)."""
    vals = [_dot(row, ray) for row in cone.ineq]
    if any(v < 0 for v in vals):
        return False
    active = [cone.ineq[j] for j, v in enumerate(vals) if v == 0]
    return _rank(active, cone.dim) == cone.dim - 1


def scale_generators(cone: ConeRep, grid_depth: int | None = None,
                     refine_iters: int = 200) -> ConeRep:
    """Scale every ray so its polynomial has maximum 1 on the simplex."""
    if cone.rays is None:
        raise ValueError("enumerate rays before scaling")
    scaled, vectors = [], []
    for i, ray in enumerate(cone.rays):
        p = cone.ray_poly(i).to_float()
        val, _ = simplex.max_on_simplex(p, grid_depth=grid_depth,
                                        refine_iters=refine_iters)
        if val <= 0:
            raise ValueError(
                f"ray {i} has non-positive simplex maximum {val}; "
                "numerical failure for a nonzero non-negative generator")
        scaled.append(p / val)
        vectors.append([float(c) / val for c in ray])
    cone.scaled_rays = scaled
    cone.scaled_vectors = np.array(vectors)
    return cone


def save_json(cone: ConeRep, path) -> None:
    with open(path, "w") as fh:
        json.dump(cone.to_json(), fh, sort_keys=True, separators=(",", ":"))


def load_json(path) -> ConeRep:
    with open(path) as fh:
        return ConeRep.from_json(json.load(fh))
