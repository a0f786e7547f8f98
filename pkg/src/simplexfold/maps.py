"""Polynomial self-maps of the simplex and their linear (Markov) special case.

A map is n defining polynomials in projected coordinates; the last
component 1 - sum(P_i) is always implicit.  Constructors that receive n+1
polynomials verify the sum identity and drop the last one, keeping the
representation canonical.

Long float orbits drift, so `apply` clamps images that are within `tol` of
the boundary back onto the simplex and treats anything worse as evidence
of a non-member map.
"""

from __future__ import annotations

import numpy as np

from . import positivity, simplex
from .polynomial import EXACT, FLOAT, MultiPoly

APPLY_TOL = 1e-9


class MapImageError(ValueError):
    """Image left the simplex beyond the clamping tolerance."""


class SimplexMap:
    __slots__ = ("n", "k", "P", "label")

    def __init__(self, n: int, k: int, P: list[MultiPoly], label: str = ""):
        P = list(P)
        if len(P) not in (n, n + 1):
            raise ValueError(f"need n or n+1 polynomials, got {len(P)}")
        modes = {p.scalar_mode for p in P}
        if len(modes) != 1:
            raise ValueError("components must share a scalar mode")
        for p in P:
            if p.num_vars != n:
                raise ValueError("component variable count != n")
            if p.degree() > k:
                raise ValueError(f"component degree {p.degree()} exceeds k={k}")
        if len(P) == n + 1:
            total = P[0]
            for p in P[1:]:
                total = total + p
            one = MultiPoly.constant(n, 1, P[0].scalar_mode)
            if P[0].scalar_mode == EXACT:
                if total != one:
                    raise ValueError("n+1 components do not sum to 1 exactly")
            elif (total - one).max_abs_coeff() > 1e-9:
                raise ValueError("n+1 components do not sum to 1 within 1e-9")
            P = P[:n]
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "P", tuple(P))
        object.__setattr__(self, "label", label)

    def __setattr__(self, *a):
        raise AttributeError("SimplexMap is immutable")

    @property
    def scalar_mode(self) -> str:
        return self.P[0].scalar_mode

    def last_component(self) -> MultiPoly:
        """The implicit polynomial 1 - sum(P_i)."""
        total = MultiPoly.constant(self.n, 1, self.scalar_mode)
        for p in self.P:
            total = total - p
        return total

    def components_full(self) -> list[MultiPoly]:
        return list(self.P) + [self.last_component()]

    def to_float(self) -> "SimplexMap":
        if self.scalar_mode == FLOAT:
            return self
        return SimplexMap(self.n, self.k, [p.to_float() for p in self.P], self.label)

    # -- dynamics-facing evaluation -----------------------------------------

    def apply_many(self, X: np.ndarray, tol: float = APPLY_TOL,
                   clamp_log: list | None = None) -> np.ndarray:
        """Apply to each row of X with boundary clamping.

        Components in (-tol, 0) are set to 0 and sums in (1, 1+tol] are
        renormalized; violations beyond tol raise MapImageError.  Clamped
        row indices are appended to clamp_log when given.
        """
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        out = np.empty_like(X)
        for i, p in enumerate(self.P):
            out[:, i] = p.eval_many(X)
        low = out.min(axis=1)
        sums = out.sum(axis=1)
        bad = (low < -tol) | (sums > 1 + tol)
        if bad.any():
            j = int(np.flatnonzero(bad)[0])
            raise MapImageError(
                f"image {out[j]} of {X[j]} outside simplex beyond tol={tol} "
                f"(map {self.label or 'unlabeled'})")
        clamped = (low < 0) | (sums > 1)
        if clamped.any():
            if clamp_log is not None:
                clamp_log.extend(np.flatnonzero(clamped).tolist())
            out = np.maximum(out, 0.0)
            sums = out.sum(axis=1)
            over = sums > 1
            if over.any():
                out[over] /= sums[over, None]
        return out[0] if single else out

    def apply(self, x, tol: float = APPLY_TOL, clamp_log: list | None = None) -> np.ndarray:
        simplex.check_in_simplex(x, tol)
        return self.apply_many(np.asarray(x, dtype=float), tol, clamp_log)

    # -- algebra -------------------------------------------------------------

    def membership_check(self, mode: str = "sampled", tol: float = 1e-9):
        return membership_check(self, mode, tol)

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k,
                "P": [p.to_json() for p in self.P], "label": self.label}

    @classmethod
    def from_json(cls, data: dict) -> "SimplexMap":
        return cls(int(data["n"]), int(data["k"]),
                   [MultiPoly.from_json(p) for p in data["P"]],
                   data.get("label", ""))

    def __eq__(self, other):
        return (isinstance(other, SimplexMap) and self.n == other.n
                and self.k == other.k and self.P == other.P)

    def __hash__(self):
        return hash((self.n, self.k, self.P))

    def __repr__(self):
        return f"SimplexMap(n={self.n}, k={self.k}, label={self.label!r})"


class MembershipReport:
    def __init__(self, ok: bool, components):
        self.ok = ok
        self.components = components  # one NonnegVerdict per P_1..P_n, 1-sum

    def witnesses(self):
        return [(i, v.witness) for i, v in enumerate(self.components) if not v.ok]

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return f"MembershipReport(ok={self.ok})"


def membership_check(f: SimplexMap, mode: str = "sampled",
                     tol: float = 1e-9) -> MembershipReport:
    """Non-negativity of every P_i and of 1 - sum(P_i) on the simplex."""
    verdicts = [positivity.nonneg_on_simplex(p, mode=mode, tol=tol)
                for p in f.components_full()]
    return MembershipReport(all(v.ok for v in verdicts), verdicts)


def convex_combine(f: SimplexMap, g: SimplexMap, t) -> SimplexMap:
    """t*f + (1-t)*g; exact when t and both maps are exact."""
    if (f.n, f.k) != (g.n, g.k):
        raise ValueError("maps must share (n, k)")
    if not 0 <= t <= 1:
        raise ValueError(f"t={t} outside [0, 1]")
    exact = (f.scalar_mode == EXACT and g.scalar_mode == EXACT
             and not isinstance(t, float))
    if not exact:
        f, g, t = f.to_float(), g.to_float(), float(t)
    P = [p * t + q * (1 - t) for p, q in zip(f.P, g.P)]
    return SimplexMap(f.n, f.k, P, label=f"combine(t={t}; {f.label}, {g.label})")


def compose_maps(f: SimplexMap, g: SimplexMap) -> SimplexMap:
    """The composite map x -> f(g(x)); degree bound multiplies."""
    if f.n != g.n:
        raise ValueError("maps must share n")
    if f.scalar_mode != g.scalar_mode:
        raise TypeError("compose requires matching scalar modes")
    P = [p.compose(list(g.P)) for p in f.P]
    return SimplexMap(f.n, f.k * g.k, P, label=f"({f.label})o({g.label})")


# -- Markov (k = 1) specialization -------------------------------------------


def check_markov(M: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("Markov matrix must be square")
    if (M < -tol).any() or np.abs(M.sum(axis=0) - 1).max() > tol:
        raise ValueError("matrix is not column-stochastic")
    return M


def markov_map(M: np.ndarray, label: str = "markov") -> SimplexMap:
    """Wrap a column-stochastic (n+1)x(n+1) matrix as a degree-1 map.

    Projected components: P_i(x) = sum_j M[i,j] x_j + M[i,n] (1 - sum x_j).
    """
    M = check_markov(M)
    n = M.shape[0] - 1
    P = []
    for i in range(n):
        terms = {(0,) * n: float(M[i, n])}
        for j in range(n):
            exp = tuple(1 if u == j else 0 for u in range(n))
            terms[exp] = float(M[i, j] - M[i, n])
        P.append(MultiPoly(n, terms, FLOAT))
    return SimplexMap(n, 1, P, label=label)


BIJECTIVE_PERMUTATION = "bijective_permutation"
BIJECTIVE_NONPERMUTATION = "bijective_nonpermutation"  # impossible per Lemma 1
NOT_ONTO = "not_onto"
SINGULAR = "singular"


def is_permutation_if_bijective(M: np.ndarray, tol: float = 1e-9) -> str:
    """Classify a stochastic matrix as a simplex self-map.

    Nonsingular matrices are onto the simplex exactly when every vertex
    appears among the columns (the image is the hull of the vertex images);
    such matrices are permutation matrices.  A nonsingular verdict of
    "bijective but not a permutation" would contradict the lemma and is
    flagged as its own value rather than folded into another class.
    """
    M = check_markov(M, tol=max(tol, 1e-12))
    m = M.shape[0]
    if abs(np.linalg.det(M)) <= tol:
        return SINGULAR
    eye = np.eye(m)
    col_vertex = [None] * m
    for j in range(m):
        hit = np.flatnonzero(np.abs(M[:, j][None, :] - eye).max(axis=1) <= tol)
        if hit.size:
            col_vertex[j] = int(hit[0])
    if any(v is None for v in col_vertex):
        return NOT_ONTO
    if len(set(col_vertex)) == m:
        return BIJECTIVE_PERMUTATION
    return BIJECTIVE_NONPERMUTATION
