"""Dynamics of simplex maps: fixed points, spectra, orbits, fixation times.

Fixed points come from batched multistart Newton with the exact symbolic
Jacobian; eigenvalues use closed-form characteristic polynomial roots for
n <= 3 and QR iteration above.  Orbit classification follows the figure
convention of the deformation experiments: an orbit is "red" when it
converges to a fixed point or revisits itself within the detection window,
and "green" otherwise.  Cycle detection is Brent-style (power-of-two
anchors, O(1) memory) with an l-infinity tolerance.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import _newton, folding, simplex
from .maps import SimplexMap
from .polynomial import EXACT, MultiPoly

CONVERGED_FIXED = "converged_fixed"
PERIODIC = "periodic"
NONPERIODIC = "nonperiodic_within_window"

_CLASS_BAND = 1e-9


# -- eigenvalues ---------------------------------------------------------------


def _cubic_roots(a: float, b: float, c: float) -> list[complex]:
    """Roots of x^3 + a x^2 + b x + c by Cardano with complex arithmetic."""
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    shift = -a / 3.0
    if abs(p) < 1e-300 and abs(q) < 1e-300:
        return [complex(shift)] * 3
    disc = cmath.sqrt((q / 2.0) ** 2 + (p / 3.0) ** 3)
    u = (-q / 2.0 + disc) ** (1.0 / 3.0)
    if abs(u) < 1e-150:
        u = (-q / 2.0 - disc) ** (1.0 / 3.0)
    v = -p / (3.0 * u)
    w = complex(-0.5, math.sqrt(3.0) / 2.0)
    return [u + v + shift,
            u * w + v * w.conjugate() + shift,
            u * w * w + v * (w * w).conjugate() + shift]


def small_matrix_eigenvalues(J: np.ndarray) -> list[complex]:
    """Eigenvalues via characteristic polynomial roots (n <= 3), QR beyond."""
    J = np.asarray(J, dtype=float)
    n = J.shape[0]
    if n == 1:
        return [complex(J[0, 0])]
    if n == 2:
        tr = J[0, 0] + J[1, 1]
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        s = cmath.sqrt(tr * tr - 4.0 * det)
        return [(tr + s) / 2.0, (tr - s) / 2.0]
    if n == 3:
        tr = np.trace(J)
        minors = (J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
                  + J[0, 0] * J[2, 2] - J[0, 2] * J[2, 0]
                  + J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1])
        det = float(np.linalg.det(J))
        return _cubic_roots(-float(tr), float(minors), -det)
    return [complex(z) for z in np.linalg.eigvals(J)]


def classify_spectrum(eigenvalues) -> str:
    mods = [abs(z) for z in eigenvalues]
    if any(abs(m - 1.0) <= _CLASS_BAND for m in mods):
        return "marginal"
    if all(m < 1.0 - _CLASS_BAND for m in mods):
        return "attracting"
    if all(m > 1.0 + _CLASS_BAND for m in mods):
        return "repelling"
    return "saddle"


# -- fixed points ----------------------------------------------------------------


@dataclass(frozen=True)
class FixedPoint:
    point: tuple[float, ...]
    residual: float
    eigenvalues: tuple[complex, ...]
    classification: str

    def min_abs_eig(self) -> float:
        return min(abs(z) for z in self.eigenvalues)


@dataclass
class FixedPointReport:
    points: list[FixedPoint]
    degenerate_identity: bool = False

    def __len__(self):
        return len(self.points)

    def attracting(self):
        return [p for p in self.points if p.classification == "attracting"]

    def repelling(self):
        return [p for p in self.points if p.classification == "repelling"]

    def min_abs_eig(self) -> float:
        return min((p.min_abs_eig() for p in self.points), default=float("nan"))


def _is_identity(f: SimplexMap) -> bool:
    for i, p in enumerate(f.P):
        xi = MultiPoly.variable(f.n, i, p.scalar_mode)
        if p.scalar_mode == EXACT:
            if p != xi:
                return False
        elif (p - xi).max_abs_coeff() > 1e-14:
            return False
    return True


def find_fixed_points(f: SimplexMap, *, lattice_target: int = 2000,
                      n_random: int = 1000, seed: int = 0,
                      dedup_tol: float = 1e-8, residual_tol: float = 1e-12,
                      inclusion_tol: float = 1e-10) -> FixedPointReport:
    """All fixed points of f in the simplex, with Jacobian spectra.

    Seeds: a ~2000-point barycentric lattice, 1000 uniform points and the
    vertices.  Every reported point satisfies ||f(x)-x||_inf < residual_tol
    on re-evaluation; the identity map is flagged degenerate instead of
    reporting a continuum.
    """
    if _is_identity(f):
        return FixedPointReport([], degenerate_identity=True)
    rng = np.random.Generator(np.random.Philox(key=seed))
    pts = _newton.solve_on_simplex(f, target=None, lattice_target=lattice_target,
                                   n_random=n_random, rng=rng,
                                   dedup_tol=dedup_tol, residual_tol=residual_tol,
                                   inclusion_tol=inclusion_tol)
    sys = _newton.MapSystem(f)
    out = []
    for x in pts:
        res = float(np.abs(sys.values(x[None, :])[0] - x).max())
        J = sys.jacobians(x[None, :])[0]
        eigs = tuple(small_matrix_eigenvalues(J))
        out.append(FixedPoint(tuple(x), res, eigs, classify_spectrum(eigs)))
    out.sort(key=lambda p: p.point)
    return FixedPointReport(out)


# -- orbit classification ---------------------------------------------------------


@dataclass(frozen=True)
class OrbitVerdict:
    kind: str
    iterations_used: int
    period: int | None = None
    witness: tuple[float, ...] | None = None


def _minimal_period(f: SimplexMap, x: np.ndarray, lam: int, tol: float):
    """Smallest shift p <= lam under which the orbit from x matches itself.

    The check extends well past the detected gap, so a slow passage near a
    repelling fixed point (where nearby states sit within tol of each other
    but the orbit is escaping) does not fake a cycle; such matches return
    None and the caller keeps iterating.
    """
    horizon = max(2 * lam, 64)
    orbit = [np.asarray(x, dtype=float)]
    for _ in range(horizon):
        orbit.append(f.apply_many(orbit[-1]))
    for p in range(1, lam + 1):
        if np.abs(orbit[0] - orbit[p]).max() >= tol:
            continue
        if all(np.abs(orbit[s] - orbit[s + p]).max() < tol
               for s in range(horizon - p + 1)):
            return p
    return None


def classify_orbits(f: SimplexMap, x0s, window: int = 10_000,
                    tol: float = 1e-10, burn_in: int = 1000) -> list[OrbitVerdict]:
    """Brent cycle detection for a batch of orbits advanced in lockstep."""
    X = np.atleast_2d(np.asarray(x0s, dtype=float)).copy()
    m = X.shape[0]
    for _ in range(burn_in):
        X = f.apply_many(X)
    anchors = X.copy()
    power = np.ones(m, dtype=np.int64)
    lam = np.zeros(m, dtype=np.int64)
    prev_step = np.full(m, np.inf)
    verdicts: list[OrbitVerdict | None] = [None] * m
    open_rows = np.arange(m)

    for t in range(1, window + 1):
        Xn = f.apply_many(X)
        step = np.abs(Xn - X).max(axis=1)
        lam += 1
        danchor = np.abs(Xn - anchors).max(axis=1)
        X = Xn
        finished = []
        # converged: two consecutive sub-tol steps that are not growing,
        # so a slow escape from a repelling point does not count
        conv = (step < tol) & (prev_step < tol) & (step <= prev_step)
        prev_step = step
        for r in np.flatnonzero(conv):
            verdicts[open_rows[r]] = OrbitVerdict(
                CONVERGED_FIXED, burn_in + t, witness=tuple(X[r]))
            finished.append(r)
        for r in np.flatnonzero(danchor < tol):
            if verdicts[open_rows[r]] is not None:
                continue
            p = _minimal_period(f, X[r], int(lam[r]), tol)
            if p is None:
                continue
            if p == 1:  # a persistent period-1 cycle is a fixed point
                verdicts[open_rows[r]] = OrbitVerdict(
                    CONVERGED_FIXED, burn_in + t, witness=tuple(X[r]))
            else:
                verdicts[open_rows[r]] = OrbitVerdict(
                    PERIODIC, burn_in + t, period=p, witness=tuple(X[r]))
            finished.append(r)
        if finished:
            keep = np.setdiff1d(np.arange(X.shape[0]), np.array(finished))
            X, anchors = X[keep], anchors[keep]
            power, lam = power[keep], lam[keep]
            prev_step = prev_step[keep]
            open_rows = open_rows[keep]
            if X.shape[0] == 0:
                break
        refresh = lam == power
        if refresh.any():
            anchors[refresh] = X[refresh]
            power[refresh] *= 2
            lam[refresh] = 0
    for r, row in enumerate(open_rows):
        if verdicts[row] is None:
            verdicts[row] = OrbitVerdict(NONPERIODIC, burn_in + window,
                                         witness=tuple(X[r]))
    return verdicts


def classify_orbit(f: SimplexMap, x0, window: int = 10_000,
                   tol: float = 1e-10, burn_in: int = 1000) -> OrbitVerdict:
    return classify_orbits(f, [x0], window=window, tol=tol, burn_in=burn_in)[0]


# -- deformation scan --------------------------------------------------------------


@dataclass
class ScanRow:
    index: int
    l2_distance: float
    min_abs_eig: float
    verdict: str              # "green" | "red" | "failed"
    n_fixed_points: int
    per_point_min_eig: tuple[float, ...] = ()
    error: str | None = None


def scan_one(f_star: SimplexMap, g: SimplexMap, index: int,
             trials_per_map: int = 20, *, window: int = 10_000,
             burn_in: int = 1000, tol: float = 1e-10, master_seed: int = 0,
             lattice_target: int = 200, n_random: int = 100) -> ScanRow:
    """One row of the deformation scan; failures are recorded, not raised."""
    try:
        dist = simplex.l2_distance(f_star, g)
        report = find_fixed_points(g, lattice_target=lattice_target,
                                   n_random=n_random, seed=master_seed ^ index)
        rng = np.random.Generator(np.random.Philox(key=[master_seed, index]))
        x0s = simplex.sample_uniform(g.n, trials_per_map, rng)
        kinds = classify_orbits(g, x0s, window=window, tol=tol, burn_in=burn_in)
        green = all(v.kind == NONPERIODIC for v in kinds)
        return ScanRow(index, dist, report.min_abs_eig(),
                       "green" if green else "red", len(report),
                       tuple(p.min_abs_eig() for p in report.points))
    except Exception as exc:  # row-level containment per the scan contract
        return ScanRow(index, float("nan"), float("nan"), "failed", 0,
                       error=f"{type(exc).__name__}: {exc}")


def deform_scan(f_star: SimplexMap, samples, trials_per_map: int = 20,
                **kwargs) -> list[ScanRow]:
    """Distance / spectrum / orbit-verdict table for a batch of deformations."""
    return [scan_one(f_star, g, i, trials_per_map, **kwargs)
            for i, g in enumerate(samples)]


# -- fixation ------------------------------------------------------------------------


@dataclass(frozen=True)
class FixationRecord:
    x0: tuple[float, ...]
    vertex: tuple[float, ...]
    time: int


@dataclass
class FixationResult:
    records: list[FixationRecord]
    unabsorbed: int
    mu: float | None = None
    sigma: float | None = None

    @property
    def absorbed(self) -> int:
        return len(self.records)


def fixation_time(f: SimplexMap, x0, absorb_tol: float = 1e-9,
                  max_iters: int = 100_000):
    """Deterministic absorption time of a single start; None if never absorbed."""
    V = simplex.vertices(f.n)
    x = np.asarray(x0, dtype=float)
    for t in range(max_iters + 1):
        d = np.sqrt(((V - x[None, :]) ** 2).sum(axis=1))
        j = int(d.argmin())
        if d[j] <= absorb_tol:
            return t, tuple(V[j])
        x = f.apply_many(x)
    return None, None


def fixation_experiment(f: SimplexMap, region: float = 0.01, count: int = 10_000,
                        absorb_tol: float = 1e-9, max_iters: int = 100_000,
                        master_seed: int = 0) -> FixationResult:
    """Absorption times of `count` uniform starts in the corner square (0, region)^n.

    Iterates the whole batch in lockstep, records first entry into an
    absorb_tol ball around any vertex, and fits a log-normal by maximum
    likelihood on the natural log of the positive times.
    """
    rng = np.random.Generator(np.random.Philox(key=master_seed))
    X0 = region * rng.random((count, f.n))
    V = simplex.vertices(f.n)

    X = X0.copy()
    alive = np.arange(count)
    times = np.full(count, -1, dtype=np.int64)
    hit = np.zeros((count, f.n))
    for t in range(max_iters + 1):
        if alive.size == 0:
            break
        d2 = ((X[:, None, :] - V[None, :, :]) ** 2).sum(axis=2)
        jmin = d2.argmin(axis=1)
        absorbed = np.sqrt(d2[np.arange(len(X)), jmin]) <= absorb_tol
        if absorbed.any():
            rows = np.flatnonzero(absorbed)
            times[alive[rows]] = t
            hit[alive[rows]] = V[jmin[rows]]
            keep = np.flatnonzero(~absorbed)
            X, alive = X[keep], alive[keep]
            if alive.size == 0:
                break
        if t < max_iters:
            X = f.apply_many(X)

    records = [FixationRecord(tuple(X0[i]), tuple(hit[i]), int(times[i]))
               for i in range(count) if times[i] >= 0]
    unabsorbed = count - len(records)
    logs = np.log([r.time for r in records if r.time > 0])
    if logs.size:
        return FixationResult(records, unabsorbed,
                              mu=float(logs.mean()), sigma=float(logs.std(ddof=0)))
    return FixationResult(records, unabsorbed)


# -- invariant measure -------------------------------------------------------------


def arcsine_cdf(x):
    """CDF of the measure dx / (pi sqrt(x(1-x))) on [0, 1]."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return (2.0 / math.pi) * np.arcsin(np.sqrt(x))


def invariant_measure_test(d: int, sample_count: int = 100_000,
                           master_seed: int = 0) -> float:
    """KS statistic between the pushforward of the arcsine measure under the
    degree-d interval fold and the arcsine measure itself."""
    if d < 1:
        raise ValueError("fold order must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=master_seed))
    u = rng.random(sample_count)
    x = (1.0 - np.cos(math.pi * u)) / 2.0
    fd = folding.catalog(f"cheb:{d}").to_float()
    pushed = fd.P[0].eval_many(x[:, None])
    return float(stats.kstest(pushed, arcsine_cdf).statistic)
