"""Folding maps of the simplex: catalog, factorization templates and solver.

A degree-k polynomial d-fold factors component-wise as P_i = l_i * q_i^2 * m_i:
l_i carries the boundary facets mapped to facet i, the zero curve of q_i is
the interior crease, and m_i is a non-negative cofactor.  Fixing the facet
assignment and the degree partition {(deg q_i, deg m_i)} leaves finitely
many unknown coefficients, determined by matching every coefficient of

    1 - sum_i l_i * q_i^2 * m_i  =  0.

The solver runs damped Newton from quasi-random multistarts on that
coefficient system, rounds solutions to rationals and re-verifies the
identity exactly.

The catalog holds the interval folds (Chebyshev maps, any degree, generated
from the T_d recurrence) and the two-simplex folds f1, f2, f4 = f2 o f2,
f8 = f2 o f2 o f2 and the nine-fold.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _newton, maps, simplex
from .polynomial import (EXACT, FLOAT, MultiPoly, divide_by_linear,
                         gradedlex_key, linear_form, monomials_upto)


# -- Chebyshev polynomials ----------------------------------------------------


def chebyshev_T(d: int) -> MultiPoly:
    """T_d in one exact variable, via T_{d+1} = 2 z T_d - T_{d-1}."""
    z = MultiPoly.variable(1, 0)
    prev, cur = MultiPoly.constant(1, 1), z
    if d == 0:
        return prev
    for _ in range(d - 1):
        prev, cur = cur, z * cur * 2 - prev
    return cur


def chebyshev_U(d: int) -> MultiPoly:
    z = MultiPoly.variable(1, 0)
    prev, cur = MultiPoly.constant(1, 1), z * 2
    if d == 0:
        return prev
    for _ in range(d - 1):
        prev, cur = cur, z * cur * 2 - prev
    return cur


def chebyshev_fold(d: int) -> MultiPoly:
    """The interval d-fold (1 - T_d(1 - 2x)) / 2 with exact coefficients."""
    x = MultiPoly.variable(1, 0)
    td = chebyshev_T(d).compose([1 - 2 * x])
    return (1 - td) / 2


def _even_part_in(p: MultiPoly, inner: MultiPoly) -> MultiPoly:
    """For p(w) with only even powers of w, substitute w^2 = inner."""
    out = MultiPoly.zero(inner.num_vars)
    for (e,), c in p.terms.items():
        if e % 2:
            raise ValueError("polynomial has odd powers")
        out = out + (inner ** (e // 2)) * c
    return out


# -- catalog ------------------------------------------------------------------


@dataclass(frozen=True)
class FoldFactors:
    """Component factorizations l_i, q_i, m_i, one triple per i = 1..n+1."""
    l: tuple[MultiPoly, ...]
    q: tuple[MultiPoly, ...]
    m: tuple[MultiPoly, ...]


def _tri_f1():
    x, y = MultiPoly.variables(2)
    return maps.SimplexMap(2, 1, [x, y], label="table2:f1")


def _tri_f2():
    x, y = MultiPoly.variables(2)
    P1 = (x - y) ** 2
    P2 = (1 - x - y) * (1 + x + y)
    return maps.SimplexMap(2, 2, [P1, P2], label="table2:f2")


def catalog(name: str) -> maps.SimplexMap:
    """Exact catalog map by name: 'cheb:d' (d >= 1) or 'tri:f{1,2,4,8,9}'."""
    if name.startswith("cheb:"):
        d = int(name.split(":", 1)[1])
        if d < 1:
            raise KeyError(f"unknown catalog entry {name!r}")
        src = "table1" if d <= 6 else "recurrence"
        return maps.SimplexMap(1, d, [chebyshev_fold(d)], label=f"{src}:cheb{d}")
    if name == "tri:f1":
        return _tri_f1()
    if name == "tri:f2":
        return _tri_f2()
    if name == "tri:f4":
        f2 = _tri_f2()
        f4 = maps.compose_maps(f2, f2)
        return maps.SimplexMap(2, 4, f4.P, label="table2:f4")
    if name == "tri:f8":
        f2 = _tri_f2()
        f8 = maps.compose_maps(f2, maps.compose_maps(f2, f2))
        return maps.SimplexMap(2, 8, f8.P, label="table2:f8")
    if name == "tri:f9":
        x, y = MultiPoly.variables(2)
        cub = lambda u, v: 2 - 9 * u + 24 * u ** 2 - 16 * u ** 3 + 9 * v - 24 * v ** 2 + 16 * v ** 3
        P1 = x * (1 - y) * cub(x, y) * (3 - 4 * x) ** 2 * (1 - 4 * y) ** 2
        P2 = y * (1 - x) * cub(y, x) * (3 - 4 * y) ** 2 * (1 - 4 * x) ** 2
        return maps.SimplexMap(2, 9, [P1, P2], label="table2:f9")
    raise KeyError(f"unknown catalog entry {name!r}")


def fold_order(name: str) -> int:
    """Number of interior preimages of the named catalog fold."""
    if name.startswith("cheb:"):
        return int(name.split(":", 1)[1])
    return {"tri:f1": 1, "tri:f2": 2, "tri:f4": 4, "tri:f8": 8, "tri:f9": 9}[name]


def catalog_factors(name: str) -> FoldFactors:
    """Theorem-style factor triples for a catalog entry."""
    one1 = MultiPoly.constant(1, 1)
    if name.startswith("cheb:"):
        d = int(name.split(":", 1)[1])
        x = MultiPoly.variable(1, 0)
        if d == 1:
            return FoldFactors((x, 1 - x), (one1, one1), (one1, one1))
        if d % 2 == 0:
            q1 = chebyshev_U(d // 2 - 1).compose([1 - 2 * x])
            q2 = chebyshev_T(d // 2).compose([1 - 2 * x])
            return FoldFactors((x * (1 - x), one1), (q1, q2),
                               (MultiPoly.constant(1, 4), one1))
        # odd d: q1 from U_{d-1}(w) with w^2 = 1-x; P2(x) = P1(1-x)
        q1 = _even_part_in(chebyshev_U(d - 1), 1 - x)
        q2 = q1.compose([1 - x])
        return FoldFactors((x, 1 - x), (q1, q2), (one1, one1))

    x, y = MultiPoly.variables(2)
    one = MultiPoly.constant(2, 1)
    edge = 1 - x - y
    if name == "tri:f1":
        return FoldFactors((x, y, edge), (one, one, one), (one, one, one))
    if name == "tri:f2":
        return FoldFactors((one, edge, x * y), (x - y, one, one),
                           (one, 1 + x + y, MultiPoly.constant(2, 4)))
    if name == "tri:f4":
        return FoldFactors(
            (one, x * y, edge),
            (1 - 2 * x ** 2 - 2 * y ** 2, one, x - y),
            (one, (1 - 2 * x * y) * 8, (1 + x + y) * 4))
    if name == "tri:f8":
        quart = (1 - 2 * x ** 2 + 2 * x ** 4 + 4 * x * y
                 - 2 * y ** 2 - 4 * x ** 2 * y ** 2 + 2 * y ** 4)
        q1 = (1 - 4 * x ** 2 + 4 * x ** 4 - 8 * x * y - 4 * y ** 2
              + 24 * x ** 2 * y ** 2 + 4 * y ** 4)
        return FoldFactors(
            (one, edge, x * y),
            (q1, x - y, 1 - 2 * x ** 2 - 2 * y ** 2),
            (one, (1 + x + y) * quart * 8, (1 - 2 * x * y) * 32))
    if name == "tri:f9":
        cub = lambda u, v: 2 - 9 * u + 24 * u ** 2 - 16 * u ** 3 + 9 * v - 24 * v ** 2 + 16 * v ** 3
        return FoldFactors(
            (x, y, edge),
            ((3 - 4 * x) * (1 - 4 * y), (3 - 4 * y) * (1 - 4 * x),
             1 - 8 * x + 16 * x ** 2 - 8 * y - 16 * x * y + 16 * y ** 2),
            ((1 - y) * cub(x, y), (1 - x) * cub(y, x), edge))
    raise KeyError(f"unknown catalog entry {name!r}")


CATALOG_NAMES = ("cheb:1", "cheb:2", "cheb:3", "cheb:4", "cheb:5", "cheb:6",
                 "tri:f1", "tri:f2", "tri:f4", "tri:f8", "tri:f9")


# -- parametrized factor templates --------------------------------------------


@dataclass(frozen=True)
class ParamPoly:
    """Polynomial affine in solver parameters: fixed + sum_j theta_j * basis_j."""
    fixed: MultiPoly
    terms: tuple[tuple[int, MultiPoly], ...] = ()

    def instantiate(self, params, mode: str) -> MultiPoly:
        out = self.fixed if mode == EXACT else self.fixed.to_float()
        for j, poly in self.terms:
            c = params[j]
            out = out + (poly if mode == EXACT else poly.to_float()) * (
                c if mode == EXACT else float(c))
        return out

    def dparam(self, j: int, mode: str) -> MultiPoly:
        out = MultiPoly.zero(self.fixed.num_vars,
                             EXACT if mode == EXACT else FLOAT)
        for jj, poly in self.terms:
            if jj == j:
                out = out + (poly if mode == EXACT else poly.to_float())
        return out

    @classmethod
    def fixed_one(cls, num_vars: int) -> "ParamPoly":
        return cls(MultiPoly.constant(num_vars, 1))

    @classmethod
    def generic(cls, num_vars: int, degree: int, start: int,
                names: list[str], prefix: str) -> "ParamPoly":
        terms = []
        for j, exp in enumerate(monomials_upto(num_vars, degree)):
            terms.append((start + j, MultiPoly(num_vars, {exp: 1})))
            names.append(f"{prefix}[{exp}]")
        return cls(MultiPoly.zero(num_vars), tuple(terms))

    def to_json(self) -> dict:
        return {"fixed": self.fixed.to_json(),
                "terms": [{"param": j, "poly": p.to_json()} for j, p in self.terms]}

    @classmethod
    def from_json(cls, data: dict) -> "ParamPoly":
        return cls(MultiPoly.from_json(data["fixed"]),
                   tuple((int(t["param"]), MultiPoly.from_json(t["poly"]))
                         for t in data.get("terms", [])))


@dataclass(frozen=True)
class FoldTemplate:
    n: int
    k: int
    name: str
    facet_assignment: tuple[tuple[int, int], ...]  # (source facet, image facet)
    partition: tuple[tuple[int, int], ...]         # (deg q_i, deg m_i) per i
    l: tuple[MultiPoly, ...]
    q: tuple[ParamPoly, ...]
    m: tuple[ParamPoly, ...]
    n_params: int
    param_names: tuple[str, ...]
    sign_constraints: tuple[tuple, ...] = ()       # ("param_positive", j), ...
    q_param_blocks: tuple[tuple[int, int] | None, ...] = ()

    def validate(self):
        prod = MultiPoly.constant(self.n, 1)
        for li in self.l:
            prod = prod * li
        boundary = MultiPoly.constant(self.n, 1) - linear_form(self.n)
        for i in range(self.n):
            boundary = boundary * MultiPoly.variable(self.n, i)
        if prod != boundary:
            raise ValueError("facet factors do not multiply to the boundary monomial")
        for li, (a, b) in zip(self.l, self.partition):
            if li.degree() + 2 * a + b > self.k:
                raise ValueError("degree budget violated")
        return self

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "name": self.name,
                "facet_assignment": [list(t) for t in self.facet_assignment],
                "partition": [list(t) for t in self.partition],
                "l": [p.to_json() for p in self.l],
                "q": [p.to_json() for p in self.q],
                "m": [p.to_json() for p in self.m],
                "n_params": self.n_params,
                "param_names": list(self.param_names),
                "sign_constraints": [list(c) for c in self.sign_constraints],
                "q_param_blocks": [list(b) if b else None for b in self.q_param_blocks]}

    @classmethod
    def from_json(cls, data: dict) -> "FoldTemplate":
        return cls(
            int(data["n"]), int(data["k"]), data.get("name", "custom"),
            tuple(tuple(t) for t in data["facet_assignment"]),
            tuple(tuple(t) for t in data["partition"]),
            tuple(MultiPoly.from_json(p) for p in data["l"]),
            tuple(ParamPoly.from_json(p) for p in data["q"]),
            tuple(ParamPoly.from_json(p) for p in data["m"]),
            int(data["n_params"]), tuple(data["param_names"]),
            tuple(tuple(c) for c in data.get("sign_constraints", [])),
            tuple(tuple(b) if b else None for b in data.get("q_param_blocks", [])),
        ).validate()


def facet_monomial(n: int, facet: int) -> MultiPoly:
    """x_facet for facet <= n, else 1 - sum(x) for the diagonal facet n+1."""
    if 1 <= facet <= n:
        return MultiPoly.variable(n, facet - 1)
    if facet == n + 1:
        return MultiPoly.constant(n, 1) - linear_form(n)
    raise ValueError(f"facet index {facet} out of range")


def _l_from_assignment(n: int, assignment: dict[int, int]) -> list[MultiPoly]:
    if sorted(assignment) != list(range(1, n + 2)):
        raise ValueError("each facet must be assigned exactly once")
    ls = [MultiPoly.constant(n, 1) for _ in range(n + 1)]
    for src, img in assignment.items():
        ls[img - 1] = ls[img - 1] * facet_monomial(n, src)
    return ls


def interval_fold_template(d: int) -> FoldTemplate:
    """The 1-simplex degree-d fold template (endpoint at 0 held fixed).

    Even d sends both endpoints to 0 (l_1 = x(1-x)); odd d fixes both
    endpoints (l_1 = x, l_2 = 1-x).  Whenever deg q_i >= 1 the constant
    cofactor is gauge-fixed to m_i = 1; a_i = 0 components keep a positive
    constant unknown instead.
    """
    if d < 1:
        raise ValueError("fold order must be >= 1")
    names: list[str] = []
    if d == 1:
        assignment = {1: 1, 2: 2}
        a = (0, 0)
    elif d % 2 == 0:
        assignment = {1: 1, 2: 1}
        a = (d // 2 - 1, d // 2)
    else:
        assignment = {1: 1, 2: 2}
        a = ((d - 1) // 2, (d - 1) // 2)
    ls = _l_from_assignment(1, assignment)
    q, m, blocks = [], [], []
    sign = []
    cursor = 0
    for i in range(2):
        if a[i] == 0:
            q.append(ParamPoly.fixed_one(1))
            m.append(ParamPoly(MultiPoly.zero(1),
                               ((cursor, MultiPoly.constant(1, 1)),)))
            names.append(f"m{i + 1}")
            sign.append(("param_positive", cursor))
            blocks.append(None)
            cursor += 1
        else:
            pp = ParamPoly.generic(1, a[i], cursor, names, f"q{i + 1}")
            q.append(pp)
            m.append(ParamPoly.fixed_one(1))
            blocks.append((cursor, cursor + len(pp.terms)))
            cursor += len(pp.terms)
    partition = tuple((a[i], m[i].fixed.degree() if not m[i].terms else 0)
                      for i in range(2))
    return FoldTemplate(1, d, f"interval:{d}",
                        tuple(sorted(assignment.items())), partition,
                        tuple(ls), tuple(q), tuple(m), cursor, tuple(names),
                        tuple(sign), tuple(blocks)).validate()


def two_simplex_twofold_template() -> FoldTemplate:
    """Degree-2 two-fold of the triangle with unknowns (A, B, C, D, E, F):

        P_1 = A (y - B x)^2,  P_2 = (1-x-y)(C + D x + E y),  P_3 = F x y.
    """
    x, y = MultiPoly.variables(2)
    zero = MultiPoly.zero(2)
    one = MultiPoly.constant(2, 1)
    ls = [one, 1 - x - y, x * y]
    q = [ParamPoly(y, ((1, -x),)),            # y - B x
         ParamPoly.fixed_one(2),
         ParamPoly.fixed_one(2)]
    m = [ParamPoly(zero, ((0, one),)),        # A
         ParamPoly(zero, ((2, one), (3, x), (4, y))),  # C + D x + E y
         ParamPoly(zero, ((5, one),))]        # F
    sign = (("param_positive", 0), ("param_positive", 1), ("param_positive", 5),
            ("m_nonneg_on_simplex", 1))
    return FoldTemplate(2, 2, "twofold2d",
                        ((1, 3), (2, 3), (3, 2)), ((1, 0), (0, 1), (0, 0)),
                        tuple(ls), tuple(q), tuple(m), 6,
                        ("A", "B", "C", "D", "E", "F"), sign,
                        (None, None, None)).validate()


def two_simplex_ninefold_template() -> FoldTemplate:
    """Nine-fold template with the single degree partition {(2,4)} x 3."""
    names: list[str] = []
    ls = _l_from_assignment(2, {1: 1, 2: 2, 3: 3})
    q, m, blocks = [], [], []
    cursor = 0
    for i in range(3):
        qq = ParamPoly.generic(2, 2, cursor, names, f"q{i + 1}")
        blocks.append((cursor, cursor + len(qq.terms)))
        cursor += len(qq.terms)
        q.append(qq)
    for i in range(3):
        mm = ParamPoly.generic(2, 4, cursor, names, f"m{i + 1}")
        cursor += len(mm.terms)
        m.append(mm)
        # m_i must stay non-negative; strictness in the interior is checked
        # downstream through membership of the assembled map
    sign = tuple(("m_nonneg_on_simplex", i) for i in range(3))
    return FoldTemplate(2, 9, "ninefold2d",
                        ((1, 1), (2, 2), (3, 3)), ((2, 4), (2, 4), (2, 4)),
                        tuple(ls), tuple(q), tuple(m), cursor, tuple(names),
                        sign, tuple(blocks)).validate()


BUILTIN_TEMPLATES = {
    "twofold2d": two_simplex_twofold_template,
    "ninefold2d": two_simplex_ninefold_template,
    **{f"interval:{d}": (lambda d=d: interval_fold_template(d)) for d in range(1, 7)},
}


# -- residual and solver -------------------------------------------------------


def _params_mode(params) -> str:
    return FLOAT if any(isinstance(p, float) for p in params) else EXACT


def residual(template: FoldTemplate, params) -> MultiPoly:
    """1 - sum_i l_i q_i^2 m_i at the given parameter values."""
    if len(params) != template.n_params:
        raise ValueError(f"expected {template.n_params} parameters, got {len(params)}")
    mode = _params_mode(params)
    out = MultiPoly.constant(template.n, 1, mode)
    for li, qi, mi in zip(template.l, template.q, template.m):
        lv = li if mode == EXACT else li.to_float()
        qv = qi.instantiate(params, mode)
        mv = mi.instantiate(params, mode)
        out = out - lv * qv * qv * mv
    return out


@dataclass
class FoldSolution:
    template: FoldTemplate
    params: tuple
    exact: bool
    residual_norm: float
    map: maps.SimplexMap
    q: tuple[MultiPoly, ...]
    m: tuple[MultiPoly, ...]

    def named_params(self) -> dict:
        return dict(zip(self.template.param_names, self.params))


class FoldSolveError(RuntimeError):
    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


def _rd_box_seeds(dim: int, count: int, half_width: float) -> np.ndarray:
    """Deterministic R_d low-discrepancy seeds in [-w, w]^dim."""
    phi = 2.0
    for _ in range(64):
        phi = (1 + phi) ** (1.0 / (dim + 1))
    alphas = np.array([(1.0 / phi) ** (i + 1) for i in range(dim)])
    j = np.arange(1, count + 1)[:, None]
    u = np.mod(0.5 + j * alphas[None, :], 1.0)
    return (2 * u - 1) * half_width


def _coeff_vector(p: MultiPoly, basis) -> np.ndarray:
    return np.array([float(p.terms.get(b, 0.0)) for b in basis])


def assemble_map(template: FoldTemplate, params, label: str = "") -> maps.SimplexMap:
    mode = _params_mode(params)
    P = []
    for i in range(template.n):
        li = template.l[i] if mode == EXACT else template.l[i].to_float()
        qv = template.q[i].instantiate(params, mode)
        mv = template.m[i].instantiate(params, mode)
        P.append(li * qv * qv * mv)
    return maps.SimplexMap(template.n, template.k, P,
                           label=label or f"solved:{template.name}")


def _canonicalize_q_signs(template: FoldTemplate, params: np.ndarray) -> np.ndarray:
    """Flip fully-parametric crease factors so their leading coefficient is > 0.

    q and -q assemble to the same map; collapsing the sign gauge before
    dedup keeps each map a single solution.
    """
    params = params.copy()
    for i, block in enumerate(template.q_param_blocks):
        if block is None:
            continue
        qv = template.q[i].instantiate(list(params), FLOAT)
        for exp in sorted(qv.terms, key=gradedlex_key):
            c = qv.terms[exp]
            if abs(c) > 1e-9:
                if c < 0:
                    params[block[0]:block[1]] *= -1
                break
    return params


def _passes_sign_constraints(template: FoldTemplate, params) -> bool:
    for c in template.sign_constraints:
        kind, idx = c[0], int(c[1])
        if kind == "param_positive":
            if not float(params[idx]) > 1e-9:
                return False
        elif kind == "m_nonneg_on_simplex":
            mv = template.m[idx].instantiate(params, FLOAT)
            pts = simplex.quasi_uniform_points(template.n, 20_000)
            if mv.eval_many(pts).min() < -1e-9:
                return False
        else:
            raise ValueError(f"unknown sign constraint {kind!r}")
    return True


def _crease_structure_ok(template: FoldTemplate, params) -> bool:
    """deg q_i must not collapse, and on the interval each crease factor
    needs exactly deg q_i distinct roots strictly inside (0, 1)."""
    for i, (a, _b) in enumerate(template.partition):
        if a == 0:
            continue
        qv = template.q[i].instantiate(params, FLOAT)
        scale = qv.max_abs_coeff()
        lead = max((abs(c) for e, c in qv.terms.items() if sum(e) == a), default=0.0)
        if scale == 0 or lead < 1e-7 * scale:
            return False
        if template.n == 1:
            coeffs = [qv.terms.get((e,), 0.0) for e in range(a, -1, -1)]
            roots = np.roots(coeffs)
            good = [r.real for r in roots
                    if abs(r.imag) < 1e-7 and 1e-9 < r.real < 1 - 1e-9]
            good.sort()
            distinct = [r for j, r in enumerate(good)
                        if j == 0 or r - good[j - 1] > 1e-7]
            if len(distinct) != a:
                return False
    return True


class _CompiledTemplate:
    """Tensor form of the residual for the solver's inner loop.

    Each factor's coefficient vector is affine in theta (q = Q0 + QM theta),
    and the coefficient vector of l * q^2 * m is trilinear in those vectors,
    encoded once as a dense tensor T[out, a, b, c].  Residual and Jacobian
    evaluations then reduce to einsums, which is what makes the deflation
    sweeps affordable.
    """

    def __init__(self, template: FoldTemplate):
        self.template = template
        self.basis = monomials_upto(template.n, template.k)
        index = {e: i for i, e in enumerate(self.basis)}
        self.const_vec = np.zeros(len(self.basis))
        self.const_vec[index[(0,) * template.n]] = 1.0
        P = template.n_params
        self.parts = []
        for li, qi, mi in zip(template.l, template.q, template.m):
            qs = sorted({e for e in qi.fixed.terms}
                        | {e for _, p in qi.terms for e in p.terms},
                        key=gradedlex_key) or [(0,) * template.n]
            ms = sorted({e for e in mi.fixed.terms}
                        | {e for _, p in mi.terms for e in p.terms},
                        key=gradedlex_key) or [(0,) * template.n]
            Q0 = np.array([float(qi.fixed.terms.get(e, 0)) for e in qs])
            M0 = np.array([float(mi.fixed.terms.get(e, 0)) for e in ms])
            QM = np.zeros((len(qs), P))
            for j, p in qi.terms:
                for e, c in p.terms.items():
                    QM[qs.index(e), j] += float(c)
            MM = np.zeros((len(ms), P))
            for j, p in mi.terms:
                for e, c in p.terms.items():
                    MM[ms.index(e), j] += float(c)
            T = np.zeros((len(self.basis), len(qs), len(qs), len(ms)))
            for lexp, lc in li.terms.items():
                for a, ea in enumerate(qs):
                    for b, eb in enumerate(qs):
                        for c, ec in enumerate(ms):
                            out = tuple(w + x + y + z for w, x, y, z
                                        in zip(lexp, ea, eb, ec))
                            T[index[out], a, b, c] += float(lc)
            self.parts.append((T, Q0, QM, M0, MM))

    def residual_vec(self, theta) -> np.ndarray:
        return self.residual_batch(np.asarray(theta, dtype=float)[None, :])[0]

    def residual_batch(self, theta: np.ndarray) -> np.ndarray:
        v = np.broadcast_to(self.const_vec, (theta.shape[0], len(self.basis))).copy()
        for T, Q0, QM, M0, MM in self.parts:
            qv = Q0 + theta @ QM.T
            mv = M0 + theta @ MM.T
            v -= np.einsum("oabc,sa,sb,sc->so", T, qv, qv, mv)
        return v

    def jacobian_batch(self, theta: np.ndarray) -> np.ndarray:
        P = self.template.n_params
        J = np.zeros((theta.shape[0], len(self.basis), P))
        for T, Q0, QM, M0, MM in self.parts:
            qv = Q0 + theta @ QM.T
            mv = M0 + theta @ MM.T
            J -= 2.0 * np.einsum("oabc,aj,sb,sc->soj", T, QM, qv, mv)
            J -= np.einsum("oabc,sa,sb,cj->soj", T, qv, qv, MM)
        return J


def _deflation_batch(theta: np.ndarray, K: np.ndarray | None):
    """Per-row deflation factor prod_s(1/|theta-s|^2 + 1) and grad of its log."""
    S, P = theta.shape
    if K is None or len(K) == 0:
        return np.ones(S), np.zeros((S, P))
    diff = theta[:, None, :] - K[None, :, :]
    r2 = np.maximum((diff ** 2).sum(axis=2), 1e-300)
    fac = 1.0 / r2 + 1.0
    D = fac.prod(axis=1)
    grad_log = ((-2.0 * diff / (r2 * r2)[:, :, None]) / fac[:, :, None]).sum(axis=1)
    return D, grad_log


def _deflated_sweep(ft: _CompiledTemplate, seeds: np.ndarray, known: list[np.ndarray],
                    residual_tol: float, known_tol: float, max_iter: int):
    """Damped Newton on the deflated system from every seed in lockstep.

    Damping halves the step while the deflated residual grows, but falls
    back to the full step when thirty halvings fail, which lets iterates
    escape shallow least-squares valleys instead of dying in them.
    Returns (new roots found this sweep, best residual norm seen).
    """
    K = np.array(known) if known else None
    theta = seeds.copy()
    alive = np.ones(theta.shape[0], dtype=bool)
    best = np.inf
    roots: list[np.ndarray] = []

    def harvest():
        nonlocal best
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            return
        rn = np.abs(ft.residual_batch(theta[idx])).max(axis=1)
        best = min(best, float(rn.min()) if rn.size else np.inf)
        done = rn <= residual_tol
        for i in idx[done]:
            t = theta[i]
            if all(np.linalg.norm(t - s) > known_tol for s in (known or [])):
                roots.append(t.copy())
        alive[idx[done]] = False

    for _ in range(max_iter):
        harvest()
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        th = theta[idx]
        r = ft.residual_batch(th)
        D, grad_log = _deflation_batch(th, K)
        g = D[:, None] * r
        Jg = D[:, None, None] * ft.jacobian_batch(th) + g[:, :, None] * grad_log[:, None, :]
        bad = ~np.isfinite(g).all(axis=1) | (np.abs(g).max(axis=1) > 1e14) \
            | ~np.isfinite(Jg).reshape(len(th), -1).all(axis=1)
        alive[idx[bad]] = False
        good = ~bad
        idx, th, g, Jg = idx[good], th[good], g[good], Jg[good]
        if idx.size == 0:
            continue
        step = np.einsum("spo,so->sp", np.linalg.pinv(Jg), g)
        fin = np.isfinite(step).all(axis=1)
        alive[idx[~fin]] = False
        idx, th, g, step = idx[fin], th[fin], g[fin], step[fin]
        if idx.size == 0:
            continue
        gn = np.abs(g).max(axis=1)
        lam = np.ones(idx.size)
        pending = np.ones(idx.size, dtype=bool)
        newt = th - step
        for _h in range(31):
            p = np.flatnonzero(pending)
            if p.size == 0:
                break
            cand = th[p] - lam[p, None] * step[p]
            Dc, _ = _deflation_batch(cand, K)
            gn2 = np.abs(Dc[:, None] * ft.residual_batch(cand)).max(axis=1)
            acc = gn2 < gn[p]
            newt[p[acc]] = cand[acc]
            pending[p[acc]] = False
            lam[p[~acc]] /= 2
        # rows with no residual-reducing step take the full step anyway
        theta[idx] = newt
    harvest()
    return roots, best


def solve_fold(template: FoldTemplate, seeds=None, *, n_seeds: int = 200,
               seed_half_width: float = 5.0, residual_tol: float = 1e-10,
               dedup_tol: float = 1e-8, newton_iters: int = 150,
               max_sweeps: int = 4, max_denominator: int = 10 ** 6,
               membership_mode: str = "sampled") -> list[FoldSolution]:
    """Coefficient-matched fold solutions of the template.

    Damped Newton runs from quasi-random multistarts; once a sweep over all
    seeds stops producing new roots, known roots are deflated out of the
    system and the sweep repeats, so solutions whose basins barely touch the
    seed box (fold coefficients grow like 2^k) still surface.  Converged
    parameters are sign-gauge canonicalized, deduplicated, rounded to
    rationals and re-verified exactly, then filtered by sign constraints,
    crease structure and map membership.  Raises FoldSolveError when no seed
    converges at all; an empty list after filtering means the template has
    no feasible fold.
    """
    ft = _CompiledTemplate(template)
    P = template.n_params
    seed_list = [np.asarray(s, dtype=float) for s in (seeds or [])]
    seed_list += list(_rd_box_seeds(P, n_seeds, seed_half_width))
    seed_arr = np.array(seed_list)

    known: list[np.ndarray] = []
    best = np.inf
    for _sweep in range(max_sweeps):
        roots, rn = _deflated_sweep(ft, seed_arr, known, residual_tol,
                                    known_tol=1e-6, max_iter=newton_iters)
        best = min(best, rn)
        fresh = []
        for t in roots:
            if all(np.linalg.norm(t - s) > 1e-6 for s in known + fresh):
                fresh.append(t)
        if not fresh:
            break
        known.extend(fresh)
    if not known:
        raise FoldSolveError(
            f"no converged solutions for template {template.name!r} "
            f"(best residual {best:.3e})", best_residual=best)

    converged = [_canonicalize_q_signs(template, t) for t in known]
    converged = _newton.dedup_points(np.array(converged), dedup_tol)

    solutions = []
    for theta in converged:
        exact_params = [Fraction(v).limit_denominator(max_denominator) for v in theta]
        exact = residual(template, exact_params).is_zero()
        params = tuple(exact_params) if exact else tuple(float(v) for v in theta)
        rnorm = 0.0 if exact else float(np.abs(ft.residual_vec(theta)).max())
        if not _passes_sign_constraints(template, list(params)):
            continue
        if not _crease_structure_ok(template, list(params)):
            continue
        fmap = assemble_map(template, list(params))
        if not maps.membership_check(fmap.to_float(), mode=membership_mode).ok:
            continue
        mode = _params_mode(list(params))
        solutions.append(FoldSolution(
            template, params, exact, rnorm, fmap,
            tuple(q.instantiate(list(params), mode) for q in template.q),
            tuple(m.instantiate(list(params), mode) for m in template.m)))
    solutions.sort(key=lambda s: tuple(map(float, s.params)))
    return solutions


# -- factorization verification -------------------------------------------------


@dataclass
class FactorizationReport:
    checks: dict
    ok: bool

    def __bool__(self):
        return self.ok


def verify_factorization(f: maps.SimplexMap,
                         factors: FoldFactors | None = None) -> FactorizationReport:
    """Check a claimed P_i = l_i q_i^2 m_i factorization of a fold.

    With explicit factors: exact reassembly, the boundary product identity
    prod l_i = (1 - sum x) prod x_i, sampled non-negativity of each m_i and
    the degree budget.  Without factors the l_i are inferred from facet
    divisibility and only the divisibility and product checks run.
    """
    checks: dict[str, tuple[bool, str]] = {}
    comps = f.components_full()
    n = f.n
    boundary = MultiPoly.constant(n, 1) - linear_form(n)
    for i in range(n):
        boundary = boundary * MultiPoly.variable(n, i)

    if factors is None:
        inferred = []
        for i, p in enumerate(comps):
            li = MultiPoly.constant(n, 1)
            for facet in range(1, n + 2):
                mono = facet_monomial(n, facet)
                _, r = divide_by_linear(p, mono)
                if r.is_zero():
                    li = li * mono
            inferred.append(li)
        prod = MultiPoly.constant(n, 1)
        for li in inferred:
            prod = prod * li
        checks["l_product"] = (prod == boundary,
                               f"inferred l product {'matches' if prod == boundary else 'differs from'} boundary monomial")
        checks["reassembly"] = (True, "skipped: no explicit q/m factors supplied")
        ok = checks["l_product"][0]
        return FactorizationReport(checks, ok)

    reass = True
    detail = []
    for i, p in enumerate(comps):
        got = factors.l[i] * factors.q[i] * factors.q[i] * factors.m[i]
        if got != p:
            reass = False
            detail.append(f"component {i + 1} reassembly differs")
    checks["reassembly"] = (reass, "; ".join(detail) or "all components reassemble exactly")

    prod = MultiPoly.constant(n, 1)
    for li in factors.l:
        prod = prod * li
    checks["l_product"] = (prod == boundary, "product of facet factors vs boundary monomial")

    m_ok = True
    for i, mi in enumerate(factors.m):
        pts = simplex.quasi_uniform_points(n, 20_000)
        if mi.to_float().eval_many(pts).min() < -1e-9:
            m_ok = False
    checks["m_nonneg"] = (m_ok, "sampled non-negativity of cofactors")

    budget = all(factors.l[i].degree() + 2 * factors.q[i].degree()
                 + factors.m[i].degree() <= f.k for i in range(n + 1))
    checks["degree_budget"] = (budget, f"deg l + 2 deg q + deg m <= {f.k}")

    return FactorizationReport(checks, all(v[0] for v in checks.values()))


# -- preimage counting -----------------------------------------------------------


def preimage_count(f: maps.SimplexMap, y, *, n_seeds: int = 500,
                   lattice_share: float = 0.5, seed: int = 0,
                   dedup_tol: float = 1e-8, residual_tol: float = 1e-12,
                   inclusion_tol: float = 1e-10):
    """Number of simplex preimages of a strictly interior target point.

    Multistart Newton on f(x) = y; returns (count, points).  A count of
    zero for a map believed onto signals missed basins, not absence.
    """
    y = np.asarray(y, dtype=float)
    if y.min() <= 0 or y.sum() >= 1:
        raise ValueError("target must be strictly interior")
    rng = np.random.Generator(np.random.Philox(key=seed))
    n_lattice = int(n_seeds * lattice_share)
    seeds = _newton.default_seeds(f.n, n_lattice, n_seeds - n_lattice, rng)
    pts = _newton.solve_on_simplex(f, target=y, seeds=seeds,
                                   dedup_tol=dedup_tol, residual_tol=residual_tol,
                                   inclusion_tol=inclusion_tol)
    return len(pts), pts
