"""Independent checker for certificate documents.

Deliberately shares nothing with the prover except ``grammar``: universes,
provenance regeneration, the symmetry closure and the small per-row LPs are
all re-derived here from the document alone.  Acceptance is decided in
exact rational arithmetic only.  Floating point is used solely to *propose*
dual multipliers for table rows, which are then re-solved exactly; when a
proposal cannot be confirmed an exact phase-I simplex settles the row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import grammar
from .errors import ParseError

ZERO = Fraction(0)
F, M, R = grammar.CONSTANT, grammar.MEMORY, grammar.RATE

EQUALITY_KINDS = frozenset({"independence", "cache_det", "delivery_det", "decode", "symmetry"})
_LABELS = {"symmetry": "s", "decode": "a", "independence": "b",
           "cache_det": "d", "delivery_det": "d", "rate_m": "r", "rate_r": "r"}


@dataclass
class Verdict:
    accepted: bool
    reason: str = ""
    row: int | None = None
    residual: dict | None = None

    def __bool__(self) -> bool:
        return self.accepted

    def describe(self) -> str:
        if self.accepted:
            return "Accept"
        out = "Reject: " + self.reason
        if self.row is not None:
            out += f" (row {self.row + 1})"
        if self.residual:
            out += "; residual " + ", ".join(f"{k}: {v}" for k, v in self.residual.items())
        return out


class _Reject(Exception):
    def __init__(self, reason, row=None, residual=None):
        super().__init__(reason)
        self.verdict = Verdict(False, reason, row,
                               {k: grammar.format_rational(v) for k, v in residual.items()}
                               if residual else None)


def universe_names(model: dict) -> list[str]:
    n_files, n_users = int(model["n_files"]), int(model["n_users"])
    demands = sorted(grammar.parse_demand(d) for d in model["demands"])
    return ([grammar.file_name(i) for i in range(n_files)]
            + [grammar.cache_name(k) for k in range(n_users)]
            + [grammar.delivery_name(d) for d in demands])


class _Universe:
    def __init__(self, model: dict):
        self.n_files = int(model["n_files"])
        self.n_users = int(model["n_users"])
        demands = [grammar.parse_demand(d) for d in model["demands"]]
        if self.n_files < 1 or self.n_users < 1 or self.n_files > grammar.MAX_FILES_FOR_NAMES:
            raise _Reject("model sizes out of range")
        if len(set(demands)) != len(demands):
            raise _Reject("duplicate demand in model")
        for d in demands:
            if len(d) != self.n_users or any(v >= self.n_files for v in d):
                raise _Reject(f"invalid demand {grammar.demand_string(d)}")
        self.demands = sorted(demands)
        self.names = universe_names(model)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.n = len(self.names)
        self.files_mask = (1 << self.n_files) - 1

    def z(self, k: int) -> int:
        return 1 << (self.n_files + k)

    def x(self, d) -> int:
        d = tuple(d)
        if d not in self.demands:
            raise _Reject(f"demand {grammar.demand_string(d)} not modeled")
        return 1 << (self.n_files + self.n_users + self.demands.index(d))

    def var(self, name: str) -> int:
        if name not in self.index:
            raise _Reject(f"unknown variable {name}")
        return self.index[name]

    def mask(self, names) -> int:
        m = 0
        for n in names:
            m |= 1 << self.var(n)
        return m

    def name(self, mask: int) -> str:
        return grammar.term_name(self.names[i] for i in range(self.n) if mask >> i & 1)

    def parse_key(self, key: str):
        try:
            parsed = grammar.parse_term(key)
        except ParseError as exc:
            raise _Reject(str(exc)) from None
        if isinstance(parsed, str):
            return parsed
        mask = self.mask(parsed)
        if self.name(mask) != key:
            raise _Reject(f"term {key} is not in canonical order")
        return mask

    def display(self, key) -> str:
        return key if isinstance(key, str) else self.name(key)


class _Symmetry:
    """Closure of sets under a user-permutation group, restricted to the universe."""

    def __init__(self, U: _Universe, descriptor):
        self.U = U
        self.maps: list[list[int | None]] = []
        self._rep: dict[int, int] = {}
        if descriptor == "none":
            return
        if not isinstance(descriptor, dict) or descriptor.get("action") != "user-permutation":
            raise _Reject("unsupported symmetry descriptor")
        mode = descriptor.get("mode")
        if mode not in ("orbit", "restricted"):
            raise _Reject(f"unknown symmetry mode {mode!r}")
        for text in descriptor.get("group", []):
            perm = tuple(int(c) for c in str(text))
            if sorted(perm) != list(range(U.n_users)):
                raise _Reject(f"{text} is not a permutation of the users")
            target: list[int | None] = list(range(U.n_files))
            target += [U.n_files + perm[k] for k in range(U.n_users)]
            for d in U.demands:
                e = [0] * U.n_users
                for i, v in enumerate(d):
                    e[perm[i]] = v
                e = tuple(e)
                if e in U.demands:
                    target.append(U.n_files + U.n_users + U.demands.index(e))
                elif mode == "orbit":
                    raise _Reject(f"permutation {text} does not stabilize the demand set")
                else:
                    target.append(None)
            self.maps.append(target)

    def image(self, target, mask: int) -> int | None:
        out, i = 0, 0
        while mask:
            if mask & 1:
                t = target[i]
                if t is None:
                    return None
                out |= 1 << t
            mask >>= 1
            i += 1
        return out

    def rep(self, mask: int, within: int | None = None) -> int:
        key = mask if within is None else (mask, within)
        if key in self._rep:
            return self._rep[key]
        seen = {mask}
        todo = [mask]
        while todo:
            cur = todo.pop()
            for t in self.maps:
                img = self.image(t, cur)
                if img is None or img in seen:
                    continue
                if within is not None and img & ~within:
                    continue
                seen.add(img)
                todo.append(img)
        r = min(seen)
        self._rep[key] = r
        return r

    def map_form(self, form: dict, within: int | None = None) -> dict:
        out: dict = {}
        for k, v in form.items():
            kk = k if isinstance(k, str) else self.rep(k, within)
            out[kk] = out.get(kk, ZERO) + v
            if not out[kk]:
                del out[kk]
        return out


# -- regeneration of elemental-level rows ---------------------------------------

def _form(pairs, **extra) -> dict:
    out: dict = {}
    for k, v in pairs:
        if k == 0:
            continue
        out[k] = out.get(k, ZERO) + Fraction(v)
    for k, v in extra.items():
        out[k] = out.get(k, ZERO) + Fraction(v)
    return {k: v for k, v in out.items() if v}


def _nonempty(p: dict, key: str):
    if key not in p:
        raise _Reject(f"provenance parameter {key!r} missing")
    return p[key]


def _regenerate(U: _Universe, prov: dict) -> dict:
    kind = prov.get("kind")
    p = prov.get("params", {})
    if not isinstance(p, dict):
        raise _Reject("provenance params must be an object")
    files = U.files_mask
    try:
        if kind == "monotone":
            i = 1 << U.var(_nonempty(p, "var"))
            rest = U.mask(_nonempty(p, "given"))
            if rest | i != (1 << U.n) - 1 or rest & i:
                raise _Reject("monotone row must condition on all other variables")
            form = _form([(rest | i, 1), (rest, -1)])
        elif kind == "elemental":
            i, j = 1 << U.var(_nonempty(p, "i")), 1 << U.var(_nonempty(p, "j"))
            s = U.mask(_nonempty(p, "given"))
            if i == j or s & (i | j):
                raise _Reject("elemental row needs distinct i, j outside the conditioning set")
            form = _form([(s | i, 1), (s | j, 1), (s | i | j, -1), (s, -1)])
        elif kind == "independence":
            names = _nonempty(p, "files")
            s = U.mask(names)
            if not s or s & ~files:
                raise _Reject("independence row must name files only")
            form = _form([(s, 1)], F=-len(names))
        elif kind == "cache_det":
            form = _form([(files | U.z(_user(U, p)), 1), (files, -1)])
        elif kind == "delivery_det":
            form = _form([(files | U.x(grammar.parse_demand(_nonempty(p, "demand"))), 1), (files, -1)])
        elif kind == "decode":
            k = _user(U, p)
            d = grammar.parse_demand(_nonempty(p, "demand"))
            zx = U.z(k) | U.x(d)
            form = _form([(zx | 1 << d[k], 1), (zx, -1)])
        elif kind == "rate_m":
            form = _form([(U.z(_user(U, p)), -1)], M=1)
        elif kind == "rate_r":
            form = _form([(U.x(grammar.parse_demand(_nonempty(p, "demand"))), -1)], R=1)
        elif kind == "nonneg":
            var = _nonempty(p, "var")
            if var not in (M, R):
                raise _Reject("nonneg row must name M or R")
            form = _form([], **{var: 1})
        elif kind == "symmetry":
            perm = tuple(int(c) for c in str(_nonempty(p, "perm")))
            if sorted(perm) != list(range(U.n_users)):
                raise _Reject("symmetry row needs a permutation of the users")
            base = U.mask(_nonempty(p, "base"))
            img = 0
            for i in range(U.n):
                if not base >> i & 1:
                    continue
                if i < U.n_files:
                    img |= 1 << i
                elif i < U.n_files + U.n_users:
                    img |= U.z(perm[i - U.n_files])
                else:
                    d = U.demands[i - U.n_files - U.n_users]
                    e = [0] * U.n_users
                    for a, v in enumerate(d):
                        e[perm[a]] = v
                    img |= U.x(e)
            form = _form([(base, 1), (img, -1)])
        else:
            raise _Reject(f"unknown provenance kind {kind!r}")
    except (ParseError, TypeError, ValueError, IndexError) as exc:
        raise _Reject(f"bad provenance parameters: {exc}") from None
    sense = p.get("sense", 1)
    if kind in EQUALITY_KINDS:
        if sense not in (1, -1):
            raise _Reject("equality rows need sense +1 or -1")
        if sense == -1:
            form = {k: -v for k, v in form.items()}
    elif sense != 1:
        raise _Reject(f"{kind} rows are inequalities; sense must be 1")
    return form


def _user(U: _Universe, p: dict) -> int:
    k = _nonempty(p, "user")
    if not isinstance(k, int) or not 0 <= k < U.n_users:
        raise _Reject(f"user {k!r} out of range")
    return k


# -- small exact LPs for table rows ---------------------------------------------

def _submasks(mask: int):
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def _sub_constraints(U: _Universe, sub: int, with_rates: bool) -> list[tuple[dict, str]]:
    """Every model row whose variables all lie in ``sub`` (equalities as pairs)."""
    out: list[tuple[dict, str]] = []
    idx = [i for i in range(U.n) if sub >> i & 1]

    def eq(form, kind):
        out.append((form, kind))
        out.append(({k: -v for k, v in form.items()}, kind))

    for i in idx:
        out.append((_form([(sub, 1), (sub & ~(1 << i), -1)]), "shannon"))
    for i, j in combinations(idx, 2):
        rest = sub & ~(1 << i) & ~(1 << j)
        for s in list(_submasks(rest)) + [0]:
            out.append((_form([(s | 1 << i, 1), (s | 1 << j, 1), (s | 1 << i | 1 << j, -1), (s, -1)]),
                        "shannon"))
    files = U.files_mask
    for s in _submasks(files):
        eq(_form([(s, 1)], F=-bin(s).count("1")), "independence")
    for k in range(U.n_users):
        z = U.z(k)
        if sub & z:
            eq(_form([(files | z, 1), (files, -1)]), "cache_det")
            if with_rates:
                out.append((_form([(z, -1)], M=1), "rate_m"))
    for d in U.demands:
        x = U.x(d)
        if not sub & x:
            continue
        eq(_form([(files | x, 1), (files, -1)]), "delivery_det")
        if with_rates:
            out.append((_form([(x, -1)], R=1), "rate_r"))
        for k in range(U.n_users):
            if sub & U.z(k):
                zx = U.z(k) | x
                eq(_form([(zx | 1 << d[k], 1), (zx, -1)]), "decode")
    if with_rates:
        out.append(({M: Fraction(1)}, "nonneg"))
        out.append(({R: Fraction(1)}, "nonneg"))
    return out


def _exact_combination(G: list[list[Fraction]], t: list[Fraction]) -> list[Fraction] | None:
    """Some solution of ``sum_i y_i G[i] = t`` (free unknowns set to 0)."""
    k = len(G)
    n = len(t)
    rows = [[G[i][r] for i in range(k)] + [t[r]] for r in range(n)]
    pivots = []
    r = 0
    for col in range(k):
        piv = next((i for i in range(r, n) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][col]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(n):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    if any(rows[i][k] for i in range(r, n)):
        return None
    y = [ZERO] * k
    for i, col in enumerate(pivots):
        y[col] = rows[i][k]
    return y


def _phase_one(G: list[list[Fraction]], t: list[Fraction]) -> list[Fraction] | None:
    """Exact feasibility of ``sum_i y_i G[i] = t, y >= 0`` by a Bland tableau."""
    k, n = len(G), len(t)
    tab = []
    for r in range(n):
        sgn = -1 if t[r] < 0 else 1
        tab.append([sgn * G[i][r] for i in range(k)]
                   + [Fraction(int(a == r)) for a in range(n)] + [sgn * t[r]])
    basis = [k + r for r in range(n)]
    width = k + n
    obj = [ZERO] * (width + 1)
    for r in range(n):
        for c in range(width + 1):
            obj[c] -= tab[r][c]
    for r in range(n):
        obj[k + r] += 1
    while True:
        enter = next((c for c in range(width) if obj[c] < 0), None)
        if enter is None:
            break
        best = None
        for r in range(n):
            if tab[r][enter] > 0:
                key = (tab[r][width] / tab[r][enter], basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            return None
        r = best[1]
        pv = tab[r][enter]
        tab[r] = [v / pv for v in tab[r]]
        for i in range(n):
            if i != r and tab[i][enter]:
                f = tab[i][enter]
                tab[i] = [a - f * b for a, b in zip(tab[i], tab[r])]
        if obj[enter]:
            f = obj[enter]
            obj = [a - f * b for a, b in zip(obj, tab[r])]
        basis[r] = enter
    if obj[width]:
        return None
    y = [ZERO] * k
    for r, b in enumerate(basis):
        if b < k:
            y[b] = tab[r][width]
    return y


def _row_check(U: _Universe, sym: _Symmetry, row: dict) -> tuple[bool, frozenset]:
    """Is ``row >= 0`` implied by the model restricted to the row's variables?"""
    from scipy.optimize import linprog

    sub = U.files_mask
    for k in row:
        if not isinstance(k, str):
            sub |= k
    with_rates = M in row or R in row
    cons = [(sym.map_form(g, sub), kind) for g, kind in _sub_constraints(U, sub, with_rates)]
    target = sym.map_form(row, sub)
    keys = sorted({k for g, _ in cons for k in g if k != F} | {k for k in target if k != F},
                  key=lambda k: (isinstance(k, str), str(k) if isinstance(k, str) else k))
    col = {k: i for i, k in enumerate(keys)}
    n = len(keys)
    if any(k not in col for k in target if k != F):
        return False, frozenset()
    a = np.zeros((len(cons), n))
    b = np.zeros(len(cons))
    for i, (g, _) in enumerate(cons):
        for k, v in g.items():
            if k == F:
                b[i] = float(v)
            else:
                a[i, col[k]] = float(v)
    c = np.zeros(n)
    for k, v in target.items():
        if k != F:
            c[col[k]] = float(v)
    res = linprog(c, A_ub=-a, b_ub=b, bounds=[(None, None)] * n, method="highs-ds")
    if res.status == 3:
        return False, frozenset()
    if res.status == 0 and res.fun + float(target.get(F, ZERO)) < -1e-9:
        return False, frozenset()

    def exact_vectors(idx):
        G = [[cons[i][0].get(k, ZERO) for k in keys] for i in idx]
        t = [target.get(k, ZERO) for k in keys]
        return G, t

    def slack_ok(idx, y):
        const = target.get(F, ZERO) - sum((y[j] * cons[i][0].get(F, ZERO) for j, i in enumerate(idx)), ZERO)
        return const >= 0

    if res.status == 0:
        y_float = -np.asarray(res.ineqlin.marginals)
        support = [i for i in range(len(cons)) if y_float[i] > 1e-10]
        G, t = exact_vectors(support)
        y = _exact_combination(G, t)
        if y is not None and all(v >= 0 for v in y) and slack_ok(support, y):
            return True, frozenset(cons[i][1] for j, i in enumerate(support) if y[j])
    # exact fallback; the constant becomes one more equation with a slack column
    idx = list(range(len(cons)))
    G, t = exact_vectors(idx)
    G = [g + [cons[i][0].get(F, ZERO)] for g, i in zip(G, idx)] + [[ZERO] * n + [Fraction(1)]]
    t = t + [target.get(F, ZERO)]
    y = _phase_one(G, t)
    if y is None:
        return False, frozenset()
    return True, frozenset(cons[i][1] for i in idx if y[i])


@lru_cache(maxsize=4096)
def _row_check_cached(model_key: str, sym_key: str, row_key: tuple) -> tuple[bool, frozenset]:
    model = json.loads(model_key)
    U = _Universe(model)
    sym = _Symmetry(U, json.loads(sym_key))
    row = {k: Fraction(v) for k, v in row_key}
    return _row_check(U, sym, row)


def _check_row(doc: dict, row: dict) -> tuple[bool, frozenset]:
    model_key = json.dumps(_model_part(doc), sort_keys=True)
    sym_key = json.dumps(doc["symmetry"], sort_keys=True)
    row_key = tuple(sorted(((k, str(v)) for k, v in row.items()),
                           key=lambda kv: (isinstance(kv[0], str), str(kv[0]))))
    return _row_check_cached(model_key, sym_key, row_key)


def _model_part(doc: dict) -> dict:
    m = doc["model"]
    return {"n_files": m["n_files"], "n_users": m["n_users"], "demands": list(m["demands"])}


# -- top level -------------------------------------------------------------------

def _parse_rows(U: _Universe, doc: dict) -> list[tuple[Fraction, dict, dict]]:
    rows = doc.get("rows")
    if not isinstance(rows, list):
        raise _Reject("rows must be a list")
    out = []
    for idx, r in enumerate(rows):
        try:
            mult = grammar.parse_rational(r["multiplier"])
            terms = {}
            for k, v in r["terms"].items():
                key = U.parse_key(k)
                if key in terms:
                    raise _Reject(f"term {k} repeated", idx)
                terms[key] = grammar.parse_rational(v)
        except (KeyError, TypeError, AttributeError, ParseError) as exc:
            raise _Reject(f"malformed row: {exc}", idx) from None
        if mult <= 0:
            raise _Reject("multipliers must be positive", idx)
        terms = {k: v for k, v in terms.items() if v}
        out.append((mult, terms, r.get("provenance") or {}))
    return out


def _target(doc: dict) -> tuple[Fraction, Fraction, Fraction]:
    try:
        t = doc["target"]
        lam, mu, c = (grammar.parse_rational(t[k]) for k in ("m", "r", "c"))
    except (KeyError, TypeError, ParseError) as exc:
        raise _Reject(f"malformed target: {exc}") from None
    if lam < 0 or mu < 0:
        raise _Reject("target weights must be nonnegative")
    return lam, mu, c


def _weighted_sum(rows) -> dict:
    total: dict = {}
    for mult, terms, _ in rows:
        for k, v in terms.items():
            total[k] = total.get(k, ZERO) + mult * v
    return {k: v for k, v in total.items() if v}


def _named(U: _Universe, form: dict) -> dict:
    return {U.display(k): v for k, v in sorted(
        form.items(), key=lambda kv: (isinstance(kv[0], str), str(kv[0]) if isinstance(kv[0], str) else kv[0]))}


def _check_elemental(U: _Universe, sym: _Symmetry, doc: dict) -> None:
    lam, mu, c = _target(doc)
    rows = _parse_rows(U, doc)
    for idx, (_, terms, prov) in enumerate(rows):
        if not isinstance(prov, dict):
            raise _Reject("provenance missing", idx)
        try:
            regen = sym.map_form(_regenerate(U, prov))
        except _Reject as rej:
            rej.verdict.row = idx
            raise
        if regen != terms:
            diff = dict(terms)
            for k, v in regen.items():
                diff[k] = diff.get(k, ZERO) - v
            raise _Reject("row does not match its provenance", idx,
                          _named(U, {k: v for k, v in diff.items() if v}))
    total = _weighted_sum(rows)
    residual = {k: v for k, v in total.items() if not isinstance(k, str)}
    if residual:
        raise _Reject("entropy terms do not cancel", None, _named(U, residual))
    if total.get(M, ZERO) != lam or total.get(R, ZERO) != mu:
        raise _Reject("rate coefficients differ from the target", None,
                      {M: total.get(M, ZERO) - lam, R: total.get(R, ZERO) - mu})
    if -total.get(F, ZERO) < c:
        raise _Reject("derived constant is below the target", None, {F: -total.get(F, ZERO) - c})


def _couple(U: _Universe, sym: _Symmetry, total: dict, target) -> None:
    """Substitute M >= H(Z_k), R >= H(X_d); the result must be a multiple of the target."""
    lam, mu, c = target
    z_reps = {sym.rep(U.z(k)) for k in range(U.n_users)}
    x_reps = {sym.rep(U.x(d)) for d in U.demands}
    a, b = total.get(M, ZERO), total.get(R, ZERO)
    leftover = {}
    for k, v in total.items():
        if isinstance(k, str):
            continue
        if v > 0 and k in z_reps:
            a += v
        elif v > 0 and k in x_reps:
            b += v
        else:
            leftover[k] = v
    if leftover:
        raise _Reject("column sums leave entropy terms that no rate coupling absorbs",
                      None, _named(U, leftover))
    const = -total.get(F, ZERO)
    if lam:
        alpha = a / lam
    elif mu:
        alpha = b / mu
    else:
        alpha = ZERO
    if alpha * lam != a or alpha * mu != b or alpha < 0:
        raise _Reject("column sums are not proportional to the target", None, {M: a, R: b})
    if alpha == 0 and c > 0:
        raise _Reject("column sums certify nothing", None, {F: const})
    if alpha * c > const:
        raise _Reject("derived constant is below the target", None, {F: const - alpha * c})


def _check_table(U: _Universe, sym: _Symmetry, doc: dict) -> None:
    target = _target(doc)
    rows = _parse_rows(U, doc)
    total = sym.map_form(_weighted_sum(rows))
    _couple(U, sym, total, target)
    for idx, (_, terms, _) in enumerate(rows):
        ok, _ = _check_row(doc, terms)
        if not ok:
            raise _Reject("row is not implied by the model over its variables", idx,
                          _named(U, terms))


def verify_document(doc: dict) -> Verdict:
    try:
        if not isinstance(doc, dict) or doc.get("version") != 1:
            raise _Reject("unsupported or missing version")
        try:
            U = _Universe(doc["model"])
            sym = _Symmetry(U, doc["symmetry"])
        except (KeyError, TypeError, ValueError, ParseError) as exc:
            raise _Reject(f"malformed model or symmetry: {exc}") from None
        level = doc.get("level")
        if level == "elemental":
            _check_elemental(U, sym, doc)
        elif level == "table":
            _check_table(U, sym, doc)
        else:
            raise _Reject(f"unknown level {level!r}")
    except _Reject as rej:
        return rej.verdict
    return Verdict(True)


def check_table_row(doc: dict, terms: dict[str, Fraction]) -> bool:
    """Validity of one named row against the document's model and symmetry."""
    try:
        U = _Universe(doc["model"])
        row = {U.parse_key(k): Fraction(v) for k, v in terms.items() if v}
        return _check_row(doc, row)[0]
    except _Reject:
        return False


def row_kinds(doc: dict) -> list[tuple[str, tuple[str, ...]]]:
    """Per row: relation (">=" or "=") and the step labels of its ingredients."""
    U = _Universe(doc["model"])
    rows = _parse_rows(U, doc)
    out = []
    for _, terms, prov in rows:
        if doc.get("level") == "elemental":
            kind = prov.get("kind", "")
            rel = "=" if kind in EQUALITY_KINDS else ">="
            labels = (_LABELS[kind],) if kind in _LABELS else ()
        else:
            ok, kinds = _check_row(doc, terms)
            neg_ok, _ = _check_row(doc, {k: -v for k, v in terms.items()})
            rel = "=" if ok and neg_ok else ">="
            labels = tuple(sorted({_LABELS[k] for k in kinds if k in _LABELS}))
            if doc.get("symmetry") != "none" and _uses_symmetry(U, doc, terms):
                labels = tuple(sorted(set(labels) | {"s"}))
        out.append((rel, labels))
    return out


def _uses_symmetry(U: _Universe, doc: dict, terms: dict) -> bool:
    """Whether the row stops being implied once symmetry is switched off."""
    plain = dict(doc, symmetry="none")
    return not _check_row(plain, terms)[0]
