"""Exact rational linear programming over the (quotiented) entropy coordinates.

The primal problem is::

    minimize  lam*M + mu*R
    subject to  a_i . x + b_i >= 0   for every row i,  x free

where ``x`` ranges over orbit representatives plus M and R and ``b_i`` is
the coefficient of the unit file size F.  Its dual is the standard form::

    minimize  b . y   subject to  sum_i y_i a_i = c,  y >= 0

A dual optimum ``y`` is a proof: ``sum_i y_i (a_i . x + b_i) = c . x + b . y``
so ``c . x >= -b . y`` for every feasible ``x``.

Solving runs in exact rationals.  A floating-point HiGHS solve may propose a
basis; that basis is refactored exactly and accepted only if it passes the
exact optimality test.  Otherwise the exact revised simplex with Bland's
least-index rule takes over (warm-started when the proposed basis is at
least dual feasible, from scratch otherwise).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from . import grammar
from .caching_model import CachingModel
from .entropy_space import DEFAULT_CAP, Inequality, VarSet, iter_elemental
from .errors import NumericOverflow
from .symmetry import OrbitMap, identity_map, quotient_inequalities

log = logging.getLogger(__name__)

ZERO = Fraction(0)
DEFAULT_MAX_BITS = 4096

Column = Union[VarSet, str]


@dataclass
class LPProblem:
    model: CachingModel
    orbits: OrbitMap
    columns: list[Column]
    rows: list[Inequality]
    objective: tuple[Fraction, Fraction]
    col_index: dict = field(repr=False)

    @property
    def universe(self):
        return self.model.universe

    def sparse_row(self, i: int) -> dict[int, Fraction]:
        form = self.rows[i].form
        out = {self.col_index[s]: c for s, c in form.entropy.items()}
        if form.m:
            out[self.col_index[grammar.MEMORY]] = form.m
        if form.r:
            out[self.col_index[grammar.RATE]] = form.r
        return out

    def cost_vector(self) -> dict[int, Fraction]:
        lam, mu = self.objective
        out = {}
        if lam:
            out[self.col_index[grammar.MEMORY]] = lam
        if mu:
            out[self.col_index[grammar.RATE]] = mu
        return out


@dataclass
class LPSolution:
    status: str                      # "Optimal" | "Unbounded" | "Infeasible"
    value: Fraction | None = None
    primal: dict = field(default_factory=dict)   # column -> value
    dual: dict = field(default_factory=dict)     # row index -> positive multiplier
    method: str = ""
    iterations: int = 0


def assemble(m: CachingModel, om: OrbitMap | None, objective,
             cap: int = DEFAULT_CAP) -> LPProblem:
    """Elemental rows plus model constraints, rewritten over representatives."""
    lam, mu = (Fraction(v) for v in objective)
    if lam < 0 or mu < 0:
        raise ValueError("objective weights must be nonnegative")
    u = m.universe
    om = om if om is not None else identity_map(u, cap)
    rows = quotient_inequalities(list(iter_elemental(u, cap)) + list(m.constraints), om)
    columns: list[Column] = list(om.representatives()) + [grammar.MEMORY, grammar.RATE]
    col_index = {c: i for i, c in enumerate(columns)}
    return LPProblem(m, om, columns, rows, (lam, mu), col_index)


# -- exact sparse linear algebra ------------------------------------------------

def _sparse_solve(equations: Sequence[dict[int, Fraction]], rhs: Sequence[Fraction],
                  n: int) -> list[Fraction] | None:
    """Solve a square sparse system exactly; ``None`` if it is singular."""
    eqs = [dict(e) for e in equations]
    b = list(rhs)
    if len(eqs) != n:
        return None
    occ: dict[int, set[int]] = {}
    for r, e in enumerate(eqs):
        for v in e:
            occ.setdefault(v, set()).add(r)
    live = set(range(n))
    order: list[tuple[int, int]] = []
    while live:
        r = min(live, key=lambda i: (len(eqs[i]), i))
        e = eqs[r]
        if not e:
            return None
        v = min(e, key=lambda j: (len(occ[j]), j))
        live.discard(r)
        for j in e:
            occ[j].discard(r)
        piv = e[v]
        for r2 in list(occ[v]):
            e2 = eqs[r2]
            f = e2[v] / piv
            for j, c in e.items():
                nv = e2.get(j, ZERO) - f * c
                if nv:
                    if j not in e2:
                        occ[j].add(r2)
                    e2[j] = nv
                elif j in e2:
                    del e2[j]
                    occ[j].discard(r2)
            b[r2] -= f * b[r]
        order.append((r, v))
    x = [ZERO] * n
    for r, v in reversed(order):
        e = eqs[r]
        acc = b[r]
        for j, c in e.items():
            if j != v:
                acc -= c * x[j]
        x[v] = acc / e[v]
    return x


def _dot(row: dict[int, Fraction], x: Sequence[Fraction]) -> Fraction:
    return sum((c * x[j] for j, c in row.items()), ZERO)


# -- exact revised simplex (Bland) ---------------------------------------------

class _RevisedSimplex:
    """``min cost . y  s.t.  sum_j y_j col_j = rhs,  y >= 0`` in exact rationals.

    Artificial columns ``n_cols + r`` (one per equation) are added for phase I.
    The basis inverse is kept dense and updated by elementary row operations.
    """

    def __init__(self, cols: list[dict[int, Fraction]], rhs: list[Fraction],
                 cost: list[Fraction]):
        self.cols = cols
        self.m = len(rhs)
        self.n = len(cols)
        self.rhs = rhs
        self.cost = cost
        self.iterations = 0
        self.sign = [1 if v >= 0 else -1 for v in rhs]

    def column(self, j: int) -> dict[int, Fraction]:
        if j < self.n:
            return self.cols[j]
        r = j - self.n
        return {r: Fraction(self.sign[r])}

    def _start_artificial(self):
        m = self.m
        self.basis = [self.n + r for r in range(m)]
        self.binv = [[Fraction(self.sign[r]) if c == r else ZERO for c in range(m)]
                     for r in range(m)]
        self.xb = [self.rhs[r] * self.sign[r] for r in range(m)]

    def start_from(self, basis: list[int]) -> bool:
        """Load a basis of structural columns; False if singular or infeasible."""
        m = self.m
        dense = [[ZERO] * m for _ in range(m)]
        for pos, j in enumerate(basis):
            for r, c in self.column(j).items():
                dense[r][pos] = c
        inv = _dense_inverse(dense)
        if inv is None:
            return False
        xb = [sum((inv[p][r] * self.rhs[r] for r in range(m) if self.rhs[r]), ZERO)
              for p in range(m)]
        if any(v < 0 for v in xb):
            return False
        self.basis = list(basis)
        self.binv = inv
        self.xb = xb
        return True

    def _duals(self, cost) -> list[Fraction]:
        pi = [ZERO] * self.m
        for p, j in enumerate(self.basis):
            cj = cost(j)
            if cj:
                row = self.binv[p]
                for r in range(self.m):
                    if row[r]:
                        pi[r] += cj * row[r]
        return pi

    def _pivot(self, p: int, j: int, u: list[Fraction]):
        m = self.m
        up = u[p]
        rowp = [v / up for v in self.binv[p]]
        xp = self.xb[p] / up
        for q in range(m):
            if q == p or not u[q]:
                continue
            f = u[q]
            rq = self.binv[q]
            for r in range(m):
                if rowp[r]:
                    rq[r] -= f * rowp[r]
            self.xb[q] -= f * xp
        self.binv[p] = rowp
        self.xb[p] = xp
        self.basis[p] = j
        self.iterations += 1

    def _ftran(self, j: int) -> list[Fraction]:
        col = self.column(j)
        return [sum((row[r] * c for r, c in col.items()), ZERO) for row in self.binv]

    def _run(self, cost, allowed) -> str:
        while True:
            pi = self._duals(cost)
            in_basis = set(self.basis)
            entering = None
            for j in range(self.n + self.m):
                if j in in_basis or not allowed(j):
                    continue
                d = cost(j) - sum((pi[r] * c for r, c in self.column(j).items()), ZERO)
                if d < 0:
                    entering = j
                    break
            if entering is None:
                return "optimal"
            u = self._ftran(entering)
            best = None
            for p in range(self.m):
                if u[p] > 0:
                    ratio = self.xb[p] / u[p]
                    key = (ratio, self.basis[p])
                    if best is None or key < best[0]:
                        best = (key, p)
            if best is None:
                return "unbounded"
            self._pivot(best[1], entering, u)

    def solve(self, warm: list[int] | None = None) -> str:
        if warm is None or not self.start_from(warm):
            self._start_artificial()
            status = self._run(lambda j: ZERO if j < self.n else Fraction(1),
                               lambda j: True)
            if any(self.xb[p] for p, j in enumerate(self.basis) if j >= self.n):
                return "infeasible"
            for p, j in enumerate(self.basis):
                if j < self.n:
                    continue
                row = self.binv[p]
                for k in range(self.n):
                    if k in self.basis:
                        continue
                    if sum((row[r] * c for r, c in self.cols[k].items()), ZERO):
                        self._pivot(p, k, self._ftran(k))
                        break
        return self._run(lambda j: self.cost[j] if j < self.n else ZERO,
                         lambda j: j < self.n)

    def solution(self) -> list[Fraction]:
        y = [ZERO] * self.n
        for p, j in enumerate(self.basis):
            if j < self.n:
                y[j] = self.xb[p]
        return y

    def multipliers(self) -> list[Fraction]:
        return self._duals(lambda j: self.cost[j] if j < self.n else ZERO)


def _dense_inverse(a: list[list[Fraction]]) -> list[list[Fraction]] | None:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == r)) for i in range(n)] for r, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pr = aug[col]
        pv = pr[col]
        if pv != 1:
            aug[col] = pr = [v / pv for v in pr]
        nz = [i for i, v in enumerate(pr) if v]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                row = aug[r]
                for i in nz:
                    row[i] -= f * pr[i]
    return [row[n:] for row in aug]


# -- floating-point basis proposal ----------------------------------------------

def _float_basis(rows: list[dict[int, Fraction]], consts: list[Fraction],
                 cost: dict[int, Fraction], n: int) -> list[int] | None:
    from scipy.optimize import linprog
    from scipy.sparse import csr_matrix

    data, ri, ci = [], [], []
    for i, row in enumerate(rows):
        for j, c in row.items():
            ri.append(i)
            ci.append(j)
            data.append(-float(c))
    a_ub = csr_matrix((data, (ri, ci)), shape=(len(rows), n))
    b_ub = np.array([float(b) for b in consts])
    c = np.zeros(n)
    for j, v in cost.items():
        c[j] = float(v)
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * n, method="highs-ds")
    if res.status != 0:
        return None
    y = -np.asarray(res.ineqlin.marginals)
    slack = np.abs(b_ub - a_ub.dot(res.x))
    scale = max(1.0, float(np.max(np.abs(res.x))) if n else 1.0)
    positive = [i for i in np.argsort(-y, kind="stable") if y[i] > 1e-9]
    tight = [i for i in np.argsort(slack, kind="stable")
             if slack[i] <= 1e-7 * scale and y[i] <= 1e-9]
    chosen: list[int] = []
    q = np.zeros((0, n))
    for i in positive + tight:
        if len(chosen) == n:
            break
        v = np.zeros(n)
        for j, cval in rows[i].items():
            v[j] = float(cval)
        norm = np.linalg.norm(v)
        if norm == 0:
            continue
        v /= norm
        if len(chosen):
            v = v - q.T @ (q @ v)
            v = v - q.T @ (q @ v)
        rn = np.linalg.norm(v)
        if rn > 1e-8:
            chosen.append(int(i))
            q = np.vstack([q, v / rn])
    return chosen if len(chosen) == n else None


# -- driver ---------------------------------------------------------------------

def _check_bits(values, max_bits: int):
    for v in values:
        if max(v.numerator.bit_length(), v.denominator.bit_length()) > max_bits:
            raise NumericOverflow(f"rational {v} exceeds {max_bits} bits")


def minimize(p: LPProblem, use_float: bool = True,
             max_bits: int = DEFAULT_MAX_BITS) -> LPSolution:
    n = len(p.columns)
    rows = [p.sparse_row(i) for i in range(len(p.rows))]
    consts = [r.form.const for r in p.rows]
    cost = p.cost_vector()
    c_dense = [cost.get(j, ZERO) for j in range(n)]

    method, iterations = "exact-simplex", 0
    x = y = None
    warm = _float_basis(rows, consts, cost, n) if use_float else None
    if warm is not None:
        xs = _sparse_solve([rows[i] for i in warm], [-consts[i] for i in warm], n)
        # transpose: equation per column j, unknown per basic row
        teq: list[dict[int, Fraction]] = [dict() for _ in range(n)]
        for pos, i in enumerate(warm):
            for j, cval in rows[i].items():
                teq[j][pos] = cval
        ys = _sparse_solve(teq, c_dense, n) if xs is not None else None
        if ys is not None and all(v >= 0 for v in ys):
            if all(_dot(rows[i], xs) + consts[i] >= 0 for i in range(len(rows))):
                x = xs
                y = [ZERO] * len(rows)
                for pos, i in enumerate(warm):
                    y[i] = ys[pos]
                method = "float-basis"
        if x is None:
            log.info("proposed basis failed exact validation; running exact simplex")
    if x is None:
        simplex = _RevisedSimplex(rows, c_dense, consts)
        status = simplex.solve(warm)
        iterations = simplex.iterations
        if status == "infeasible":
            return LPSolution("Unbounded", method=method, iterations=iterations)
        if status == "unbounded":
            return LPSolution("Infeasible", method=method, iterations=iterations)
        y = simplex.solution()
        x = [-v for v in simplex.multipliers()]
        if warm is not None:
            method = "warm-exact-simplex"

    value = _dot(cost, x)
    _check_bits(list(x) + [v for v in y if v], max_bits)
    sol = LPSolution(
        "Optimal",
        value,
        {p.columns[j]: x[j] for j in range(n)},
        {i: v for i, v in enumerate(y) if v},
        method,
        iterations,
    )
    check_kkt(p, sol)
    return sol


class KKTViolation(AssertionError):
    pass


def check_kkt(p: LPProblem, sol: LPSolution) -> None:
    """Primal/dual feasibility, complementary slackness, equal objectives."""
    x = sol.primal
    combo: dict[Column, Fraction] = {}
    dual_obj = ZERO
    for i, ineq in enumerate(p.rows):
        form = ineq.form
        slack = form.evaluate(lambda s: x[s], x[grammar.MEMORY], x[grammar.RATE])
        if slack < 0:
            raise KKTViolation(f"primal row {i} violated by {slack}")
        yi = sol.dual.get(i, ZERO)
        if yi < 0:
            raise KKTViolation(f"negative multiplier on row {i}")
        if yi and slack:
            raise KKTViolation(f"complementary slackness fails on row {i}")
        if yi:
            for s, c in form.entropy.items():
                combo[s] = combo.get(s, ZERO) + yi * c
            combo[grammar.MEMORY] = combo.get(grammar.MEMORY, ZERO) + yi * form.m
            combo[grammar.RATE] = combo.get(grammar.RATE, ZERO) + yi * form.r
            dual_obj -= yi * form.const
    lam, mu = p.objective
    for key, v in combo.items():
        want = lam if key == grammar.MEMORY else mu if key == grammar.RATE else ZERO
        if v != want:
            raise KKTViolation(f"dual equation for {key} off by {v - want}")
    for key, want in ((grammar.MEMORY, lam), (grammar.RATE, mu)):
        if want and key not in combo:
            raise KKTViolation(f"dual equation for {key} unmet")
    if dual_obj != sol.value:
        raise KKTViolation(f"duality gap {sol.value - dual_obj}")


@dataclass
class Refutation:
    """An LP-feasible point violating the claimed bound."""

    target: tuple[Fraction, Fraction, Fraction]
    value: Fraction
    point: dict[str, Fraction]

    def describe(self) -> str:
        lam, mu, c = self.target
        m, r = self.point[grammar.MEMORY], self.point[grammar.RATE]
        return (f"not LP-provable: {grammar.format_halfplane(lam, mu, c)} fails at "
                f"M={grammar.format_rational(m)}, R={grammar.format_rational(r)} "
                f"(minimum {grammar.format_rational(self.value)})")


def prove_inequality(m: CachingModel, om: OrbitMap | None, lam, mu, c,
                     use_float: bool = True, cap: int = DEFAULT_CAP):
    """Certificate for ``lam*M + mu*R >= c`` or a Refutation."""
    from .certificates import extract

    lam, mu, c = Fraction(lam), Fraction(mu), Fraction(c)
    p = assemble(m, om, (lam, mu), cap)
    sol = minimize(p, use_float=use_float)
    if sol.status != "Optimal":
        raise RuntimeError(f"caching LP returned status {sol.status}")
    if sol.value >= c:
        return extract(sol, p, c)
    u = m.universe
    point = {}
    for col, v in sol.primal.items():
        point[col if isinstance(col, str) else u.term_name(col)] = v
    return Refutation((lam, mu, c), sol.value, point)
