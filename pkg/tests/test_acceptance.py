"""Acceptance suite: one test per criterion, one PASS/FAIL line per criterion.

Each criterion is asserted at its stated tolerance.  Criterion 5 is
implemented exactly as stated; the exact symbolic census of the nine-fold
(see the repelling/saddle regression test in test_dynamics) contradicts the
stated counts, so that test documents its failure precisely rather than
loosening the assertion.
"""

import csv
import itertools
import json
import time
from fractions import Fraction
from math import comb

import numpy as np

from simplexfold import (cli, cone, dynamics, folding, maps, positivity,
                         simplex)
from simplexfold.polynomial import MultiPoly, homogenize, linear_form


def report(num: int, desc: str, ok: bool, detail: str = ""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {desc}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    assert ok, line


class TestCriterion1:
    def test_table1_reproduction(self):
        t0 = time.monotonic()
        mismatches = []
        for d in range(2, 7):
            sols = folding.solve_fold(folding.interval_fold_template(d))
            expect = folding.catalog(f"cheb:{d}")
            ok = (len(sols) == 1 and sols[0].exact
                  and tuple(sols[0].map.P) == tuple(expect.P))
            if not ok:
                mismatches.append(d)
        elapsed = time.monotonic() - t0
        report(1, "Table 1 reproduction, k=2..6, exact and unique",
               not mismatches and elapsed < 120,
               f"mismatches={mismatches}, {elapsed:.1f}s (< 120s)")


class TestCriterion2:
    def test_twofold_unique(self):
        t0 = time.monotonic()
        sols = folding.solve_fold(folding.two_simplex_twofold_template())
        elapsed = time.monotonic() - t0
        expected = tuple(Fraction(v) for v in (1, 1, 1, 1, 1, 4))
        ok = (len(sols) == 1 and sols[0].exact and sols[0].params == expected
              and elapsed < 30)
        report(2, "unique sign-feasible two-fold (A..F)=(1,1,1,1,1,4)",
               ok, f"{len(sols)} solution(s), {elapsed:.1f}s (< 30s)")


class TestCriterion3:
    def test_composition_identities(self):
        bad = []
        for d, e in itertools.product(range(1, 13), repeat=2):
            if d * e > 12:
                continue
            lhs = maps.compose_maps(folding.catalog(f"cheb:{d}"),
                                    folding.catalog(f"cheb:{e}"))
            if tuple(lhs.P) != tuple(folding.catalog(f"cheb:{d * e}").P):
                bad.append((d, e))
        f2 = folding.catalog("tri:f2")
        if tuple(maps.compose_maps(f2, f2).P) != tuple(folding.catalog("tri:f4").P):
            bad.append("f4")
        f8 = maps.compose_maps(f2, maps.compose_maps(f2, f2))
        if tuple(f8.P) != tuple(folding.catalog("tri:f8").P):
            bad.append("f8")
        report(3, "composition identities coefficient-exact (d*e <= 12, f4, f8)",
               not bad, f"failures={bad}")


class TestCriterion4:
    def test_cone_counts(self):
        t0 = time.monotonic()
        rep = cone.build_inequalities(2, 2, 8)
        n_rows = len(rep.ineq)
        cone.enumerate_rays(rep)
        n_rays = len(rep.rays)
        elapsed = time.monotonic() - t0
        report(4, "cone (2,2,8): 66 inequalities and 900 extreme rays, exact",
               n_rows == 66 and n_rays == 900 and elapsed < 600,
               f"rows={n_rows}, rays={n_rays}, {elapsed:.1f}s (< 600s)")


class TestCriterion5:
    def test_ninefold_dynamics_as_stated(self):
        """Stated: 13 fixed points, 2 attracting at the vertices, 11 with all
        eigenvalue moduli > 1, a repelling point within 1/100 of each vertex.

        The exact census of the Table-2 nine-fold is 14 fixed points
        (the stated count misses the three diagonal-edge points, which have
        one eigenvalue exactly 0); 9 are repelling and the nearest repelling
        point to each vertex is at distance ~0.01326 > 1/100.  See the
        decisions ledger; this test states the criterion faithfully.
        """
        t0 = time.monotonic()
        rep = dynamics.find_fixed_points(folding.catalog("tri:f9"),
                                         dedup_tol=1e-8)
        elapsed = time.monotonic() - t0

        att = rep.attracting()
        att_locs = sorted(tuple(round(v, 6) for v in p.point) for p in att)
        att_ok = (len(att) == 2 and att_locs == [(0.0, 1.0), (1.0, 0.0)]
                  and all(min(np.linalg.norm(np.subtract(p.point, v))
                              for v in ([1.0, 0.0], [0.0, 1.0])) <= 1e-10
                          for p in att))
        n_repelling = len(rep.repelling())
        near_ok = all(
            any(np.linalg.norm(np.subtract(a.point, r.point)) < 0.01
                for r in rep.repelling())
            for a in att)
        detail = (f"n_fixed={len(rep)} (stated 13), attracting_ok={att_ok}, "
                  f"all-moduli>1: {n_repelling} (stated 11), "
                  f"repelling within 1/100 of each vertex: {near_ok}, "
                  f"{elapsed:.1f}s (< 120s); exact census says 14/9/0.0133 - "
                  "see decisions ledger")
        ok = (len(rep) == 13 and att_ok and n_repelling == 11 and near_ok
              and elapsed < 120)
        report(5, "nine-fold fixed-point structure as stated", ok, detail)


class TestCriterion6:
    def test_fixation_statistics(self, tmp_path):
        t0 = time.monotonic()
        out = tmp_path / "f7"
        assert cli.main(["fig7", "--seed", "0", "--out-dir", str(out)]) == 0
        elapsed = time.monotonic() - t0
        fit = json.loads((out / "fit.json").read_text())
        with open(out / "fixation.csv") as fh:
            rows = list(csv.DictReader(fh))
        vertices = {r["vertex"] for r in rows}
        ok = (fit["absorbed"] == 10_000 and fit["unabsorbed"] == 0
              and vertices <= {"1", "2"}
              and 2.457 <= fit["mu"] <= 2.657
              and 0.432 <= fit["sigma"] <= 0.532
              and elapsed < 300)
        report(6, "fig7 defaults: full absorption at the two vertices, "
                  "log-normal fit in band",
               ok, f"mu={fit['mu']:.4f} in [2.457,2.657], "
                   f"sigma={fit['sigma']:.4f} in [0.432,0.532], "
                   f"absorbed={fit['absorbed']}, vertices={sorted(vertices)}, "
                   f"{elapsed:.0f}s (< 300s)")


class TestCriterion7:
    def test_fig6_pipeline(self, tmp_path):
        t0 = time.monotonic()
        out = tmp_path / "f6"
        assert cli.main(["fig6", "--count", "1000", "--eps", "0.05",
                         "--seed", "11", "--jobs", "8",
                         "--out-dir", str(out)]) == 0
        elapsed = time.monotonic() - t0
        with open(out / "fig6.csv") as fh:
            rows = list(csv.DictReader(fh))
        complete = len(rows) == 1001 and all(r["verdict"] in ("green", "red")
                                             for r in rows)
        fold_green = rows[0]["verdict"] == "green" and float(rows[0]["l2_distance"]) == 0
        dist_ok = all(float(r["l2_distance"]) <= 0.05 + 1e-9 for r in rows)
        verdicts = {r["verdict"] for r in rows}
        ok = (complete and fold_green and dist_ok
              and verdicts == {"green", "red"} and elapsed < 1800)
        n_green = sum(1 for r in rows if r["verdict"] == "green")
        report(7, "fig6: 1000 deformations, complete CSV, fold row green, "
                  "distances <= eps, both colors",
               ok, f"rows={len(rows)}, green={n_green}, red={len(rows) - n_green}, "
                   f"{elapsed:.0f}s (< 1800s at 8 jobs)")


class TestCriterion8:
    def test_invariant_measure(self):
        stats = {d: dynamics.invariant_measure_test(d, 100_000, master_seed=0)
                 for d in (2, 3, 4)}
        ok = all(v < 0.02 for v in stats.values())
        report(8, "KS statistic of arcsine pushforward < 0.02 for d=2,3,4",
               ok, ", ".join(f"d={d}: {v:.4f}" for d, v in stats.items()))


class TestCriterion9:
    def test_preimage_counts(self):
        rng = np.random.default_rng(24)
        failures = []
        for name in ("cheb:2", "cheb:3", "cheb:4", "cheb:5", "cheb:6",
                     "tri:f2", "tri:f4", "tri:f8", "tri:f9"):
            f = folding.catalog(name)
            d = folding.fold_order(name)
            for i in range(50):
                if f.n == 1:
                    y = [float(rng.uniform(0.02, 0.98))]
                else:
                    while True:
                        y = rng.uniform(0.02, 0.98, 2)
                        if y.sum() < 0.96:
                            break
                count, _ = folding.preimage_count(f, y, seed=i)
                if count != d:
                    failures.append((name, list(np.round(y, 4)), count))
        report(9, "each catalog d-fold is d-to-1 at 50 random interior targets",
               not failures, f"failures={failures[:5]}")


class TestCriterion10:
    def test_lemma_suites(self):
        bad_perm = []
        for m in (3, 4):
            for perm in itertools.permutations(range(m)):
                M = np.zeros((m, m))
                for j, i in enumerate(perm):
                    M[i, j] = 1.0
                if maps.is_permutation_if_bijective(M) != maps.BIJECTIVE_PERMUTATION:
                    bad_perm.append(perm)

        rng = np.random.default_rng(25)
        bad_stochastic = 0
        seen = 0
        while seen < 1000:
            M = rng.random((3, 3)) + 0.02
            M /= M.sum(axis=0, keepdims=True)
            if abs(np.linalg.det(M)) < 1e-9:
                continue
            if maps.is_permutation_if_bijective(M) != maps.NOT_ONTO:
                bad_stochastic += 1
            seen += 1

        boundary_bad = []
        for name in folding.CATALOG_NAMES:
            f = folding.catalog(name).to_float()
            pts = _boundary_points(f.n, 1000, rng)
            images = f.apply_many(pts, tol=1e-9)
            dist = np.minimum(images.min(axis=1), 1 - images.sum(axis=1))
            if dist.max() > 1e-10:
                boundary_bad.append((name, float(dist.max())))

        ok = not bad_perm and bad_stochastic == 0 and not boundary_bad
        report(10, "permutation lemma (3x3, 4x4), 10^3 non-permutations not onto, "
                   "folds map boundary to boundary",
               ok, f"bad_perms={len(bad_perm)}, misclassified={bad_stochastic}, "
                   f"boundary={boundary_bad}")


def _boundary_points(n, count, rng):
    pts = simplex.sample_uniform(n, count, rng)
    facet = rng.integers(0, n + 1, size=count)
    for i in range(count):
        if facet[i] < n:
            pts[i, facet[i]] = 0.0
        else:
            pts[i] /= pts[i].sum()
    return pts


class TestCriterion11:
    def test_polya_suite(self):
        x, y = MultiPoly.variables(2)
        x1 = MultiPoly.variable(1, 0)
        c1 = positivity.polya_certify(1 + x + y)
        c2 = positivity.polya_certify(1 - 3 * x1 + 3 * x1 ** 2, k=2)
        c3 = positivity.polya_certify((1 - 2 * x1) ** 2)
        examples_ok = (c1.certified and c1.N == 0
                       and c2.certified and c2.N == 3
                       and c3.verdict == positivity.INDETERMINATE)

        rng = np.random.default_rng(26)
        checked, monotone_bad = 0, []
        while checked < 50:
            c = rng.integers(-2, 6, size=6)
            p = (MultiPoly.constant(2, int(abs(c[0])) + 1) + int(c[1]) * x
                 + int(c[2]) * y + int(c[3]) * x * y
                 + int(c[4]) * x ** 2 + int(c[5]) * y ** 2)
            cert = positivity.polya_certify(p, k=2)
            if not cert.certified:
                continue
            expansion = homogenize(p, 2) * linear_form(3) ** (cert.N + 1)
            full = comb(cert.N + 1 + 2 + 2, 2)
            if len(expansion.terms) != full or min(expansion.terms.values()) <= 0:
                monotone_bad.append(dict(p.terms))
            checked += 1
        report(11, "Polya certificates: N=0, N=3, indeterminate examples; "
                   "monotonicity on 50 random certified polynomials",
               examples_ok and not monotone_bad,
               f"examples_ok={examples_ok}, monotone_failures={len(monotone_bad)}")
