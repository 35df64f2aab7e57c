"""Proof certificates: extraction from LP duals, plus documents and renderers.

A certificate is a list of rows ``(multiplier, linear form, provenance)``.
Every row is a valid inequality ``form >= 0``; the multiplier-weighted sum
yields the target ``lam*M + mu*R >= c``.  At the *elemental* level each row
is regenerated from its provenance and the sum is compared term by term.
At the *table* level rows are coarse (like a published proof table) and
each is checked by its own small LP.  Checking lives in ``verifier``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from pathlib import Path

from . import grammar, verifier
from .entropy_space import Provenance, VariableUniverse, VarSet
from .errors import DocumentError, LinearizationFailed, NotOptimal, ParseError

ZERO = Fraction(0)
CERT_VERSION = 1
DATA_DIR = Path(__file__).parent / "data"


@dataclass
class CertRow:
    multiplier: Fraction
    terms: dict[str, Fraction]
    provenance: dict = field(default_factory=lambda: {"kind": "composite", "params": {}})


@dataclass
class Certificate:
    model: dict
    symmetry: object
    target: tuple[Fraction, Fraction, Fraction]
    level: str
    rows: list[CertRow]
    columns: list[str] | None = None

    def to_document(self) -> dict:
        lam, mu, c = self.target
        model = {k: self.model[k] for k in ("n_files", "n_users", "demands")}
        doc = {
            "version": CERT_VERSION,
            "model": model,
            "symmetry": self.symmetry,
            "target": {"m": grammar.format_rational(lam), "r": grammar.format_rational(mu),
                       "c": grammar.format_rational(c)},
            "level": self.level,
        }
        if self.columns is not None:
            doc["columns"] = list(self.columns)
        doc["rows"] = [
            {
                "multiplier": grammar.format_rational(r.multiplier),
                "terms": {k: grammar.format_rational(v) for k, v in r.terms.items()},
                "provenance": r.provenance,
            }
            for r in self.rows
        ]
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_document(), indent=2) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    def universe_names(self) -> list[str]:
        return verifier.universe_names(self.model)

    def verify(self) -> "verifier.Verdict":
        return verifier.verify_document(self.to_document())


def from_document(doc: dict) -> Certificate:
    try:
        if doc.get("version") != CERT_VERSION:
            raise DocumentError(f"unsupported certificate version {doc.get('version')!r}")
        model = doc["model"]
        model = {"n_files": int(model["n_files"]), "n_users": int(model["n_users"]),
                 "demands": [str(d) for d in model["demands"]]}
        t = doc["target"]
        target = (grammar.parse_rational(t["m"]), grammar.parse_rational(t["r"]),
                  grammar.parse_rational(t["c"]))
        level = doc["level"]
        if level not in ("table", "elemental"):
            raise DocumentError(f"unknown level {level!r}")
        rows = []
        for r in doc["rows"]:
            terms = {str(k): grammar.parse_rational(v) for k, v in r["terms"].items()}
            prov = r.get("provenance", {"kind": "composite", "params": {}})
            if not isinstance(prov, dict) or "kind" not in prov:
                raise DocumentError("row provenance must be an object with a kind")
            rows.append(CertRow(grammar.parse_rational(r["multiplier"]), terms, prov))
        columns = doc.get("columns")
        return Certificate(model, doc["symmetry"], target, level, rows,
                           list(columns) if columns is not None else None)
    except (KeyError, TypeError, AttributeError, ParseError, ValueError) as exc:
        raise DocumentError(f"malformed certificate document: {exc}") from exc


def loads(text: str) -> Certificate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("certificate document must be a JSON object")
    return from_document(doc)


def load(path) -> Certificate:
    return loads(Path(path).read_text())


def table2_certificate() -> Certificate:
    """The published five-row proof of M+R >= 2, shipped as data."""
    return load(DATA_DIR / "table2.cert")


# -- provenance serialization ----------------------------------------------------

def _names(u: VariableUniverse, s: VarSet) -> list[str]:
    return [u.names[i] for i in s.members()]


def serialize_provenance(p: Provenance, u: VariableUniverse) -> dict:
    params: dict = {}
    for key, value in p.params:
        if isinstance(value, VarSet):
            params[key] = _names(u, value)
        elif key in ("var", "i", "j") and isinstance(value, int):
            params[key] = u.names[value]
        elif key == "demand":
            params[key] = grammar.demand_string(value)
        elif key == "perm":
            params[key] = str(value)
        else:
            params[key] = value
    if p.kind in verifier.EQUALITY_KINDS:
        params["sense"] = p.sense
    return {"kind": p.kind, "params": params}


# -- extraction ------------------------------------------------------------------

def extract(sol, p, c=None) -> Certificate:
    """Elemental certificate from the positive dual multipliers of a solve."""
    if sol.status != "Optimal":
        raise NotOptimal(f"cannot extract a certificate from a {sol.status} solve")
    c = sol.value if c is None else Fraction(c)
    if sol.value < c:
        raise NotOptimal(f"optimum {sol.value} is below the target constant {c}")
    u = p.universe
    rows = []
    for i in sorted(sol.dual):
        ineq = p.rows[i]
        rows.append(CertRow(sol.dual[i], ineq.form.named(u),
                            serialize_provenance(ineq.provenance, u)))
    lam, mu = p.objective
    return Certificate(u.describe(), p.orbits.descriptor(), (lam, mu, c), "elemental", rows)


# -- proof tables ----------------------------------------------------------------

@dataclass
class ProofTable:
    target: tuple[Fraction, Fraction, Fraction]
    columns: list[str]
    rows: list[list[int]]
    footer: list[int]
    model: dict = field(default_factory=dict)
    symmetry: object = "none"

    def labels(self) -> list[str]:
        return [f"T{i + 1}" for i in range(len(self.columns))]

    def to_text(self) -> str:
        lam, mu, c = self.target
        lines = [f"target: {grammar.format_halfplane(lam, mu, c)}",
                 "model: " + json.dumps({k: self.model[k] for k in ("n_files", "n_users", "demands")}
                                        if self.model else {}),
                 "symmetry: " + json.dumps(self.symmetry),
                 "terms:"]
        for label, name in zip(self.labels(), self.columns):
            lines.append(f"  {label} = {name}")
        width = max([3] + [len(str(v)) for row in self.rows + [self.footer] for v in row])
        head = "      " + " ".join(f"{lab:>{width}}" for lab in self.labels())
        lines.append("rows:")
        lines.append(head)
        for k, row in enumerate(self.rows):
            cells = " ".join(f"{(str(v) if v else '.'):>{width}}" for v in row)
            lines.append(f"  r{k + 1:<3}" + cells)
        lines.append("  sum " + " ".join(f"{str(v):>{width}}" for v in self.footer))
        return "\n".join(lines) + "\n"

    def to_latex(self) -> str:
        cols = len(self.columns)
        out = ["\\begin{tabular}{|c|c|}", "\\hline"]
        for label, name in zip(self.labels(), self.columns):
            out.append(f"${label[0]}_{{{label[1:]}}}$ & {_latex_term(name)} \\\\")
        out += ["\\hline", "\\end{tabular}", "",
                "\\begin{tabular}{|" + "c" * cols + "|}", "\\hline"]
        out.append(" & ".join(f"$T_{{{i + 1}}}$" for i in range(cols)) + " \\\\\\hline")
        for row in self.rows:
            out.append(" & ".join(f"${v}$" if v else "" for v in row) + " \\\\")
        out += ["\\hline", "\\hline"]
        out.append(" & ".join(f"${v}$" if v else "" for v in self.footer) + " \\\\\\hline")
        out.append("\\end{tabular}")
        lam, mu, c = self.target
        out.append(f"% target: {grammar.format_halfplane(lam, mu, c)}")
        if self.model:
            out.append("% model: " + json.dumps({k: self.model[k] for k in ("n_files", "n_users", "demands")}))
        out.append("% symmetry: " + json.dumps(self.symmetry))
        return "\n".join(out) + "\n"

    def to_certificate(self) -> Certificate:
        rows = []
        for row in self.rows:
            terms = {name: Fraction(v) for name, v in zip(self.columns, row) if v}
            rows.append(CertRow(Fraction(1), terms))
        return Certificate(dict(self.model), self.symmetry, self.target, "table", rows,
                           list(self.columns))


def _latex_term(name: str) -> str:
    if name in (grammar.CONSTANT, grammar.MEMORY, grammar.RATE):
        return f"${name}$"
    inner = []
    for v in grammar.parse_term(name):
        role, idx = grammar.parse_var(v)
        sub = ",".join(str(i) for i in idx) if role == "X" else str(idx)
        inner.append(f"{role}_{{{sub}}}")
    return "$H(" + ",".join(inner) + ")$"


_LATEX_TERM_RE = re.compile(r"([WZX])_\{([\d,]+)\}")


def _unlatex_term(text: str) -> str:
    text = text.strip().strip("$")
    if text in (grammar.CONSTANT, grammar.MEMORY, grammar.RATE):
        return text
    names = []
    for role, sub in _LATEX_TERM_RE.findall(text):
        names.append(role + sub.replace(",", ""))
    if not names:
        raise ParseError(f"cannot read LaTeX term {text!r}")
    return grammar.term_name(names)


def _column_order(cert: Certificate) -> list[str]:
    present = set()
    for r in cert.rows:
        present.update(k for k, v in r.terms.items() if v)
    if cert.columns is not None:
        missing = present - set(cert.columns)
        if missing:
            raise DocumentError(f"terms missing from the column list: {sorted(missing)}")
        return list(cert.columns)
    names = verifier.universe_names(cert.model)
    index = {n: i for i, n in enumerate(names)}

    def key(name: str):
        if name == grammar.CONSTANT:
            return (0, 0)
        if name == grammar.MEMORY:
            return (2, 0)
        if name == grammar.RATE:
            return (2, 1)
        mask = 0
        for v in grammar.parse_term(name):
            mask |= 1 << index[v]
        return (1, mask)

    return sorted(present, key=key)


def render_table(cert: Certificate) -> ProofTable:
    """Integer proof table: columns F first, then canonical term order."""
    columns = _column_order(cert)
    scaled = [[r.multiplier * r.terms.get(col, ZERO) for col in columns] for r in cert.rows]
    den = 1
    for row in scaled:
        for v in row:
            den = lcm(den, v.denominator)
    ints = [[int(v * den) for v in row] for row in scaled]
    g = 0
    for row in ints:
        for v in row:
            g = gcd(g, v)
    if g > 1:
        ints = [[v // g for v in row] for row in ints]
    footer = [sum(col) for col in zip(*ints)] if ints else [0] * len(columns)
    return ProofTable(cert.target, columns, ints, footer, dict(cert.model), cert.symmetry)


def parse_table_text(text: str) -> ProofTable:
    lines = text.splitlines()
    try:
        target = grammar.parse_inequality(lines[0].split(":", 1)[1].strip())
        model = json.loads(lines[1].split(":", 1)[1])
        symmetry = json.loads(lines[2].split(":", 1)[1])
        columns, rows, footer = [], [], []
        i = 4
        while lines[i].startswith("  T"):
            columns.append(lines[i].split("=", 1)[1].strip())
            i += 1
        i += 2  # "rows:" and the header
        while i < len(lines) and lines[i].strip():
            cells = lines[i].split()
            vals = [0 if v == "." else int(v) for v in cells[1:]]
            if cells[0] == "sum":
                footer = vals
            else:
                rows.append(vals)
            i += 1
    except (IndexError, ValueError) as exc:
        raise ParseError(f"malformed proof table: {exc}") from exc
    return ProofTable(target, columns, rows, footer, model, symmetry)


def parse_table_latex(text: str) -> ProofTable:
    columns, rows, footer = [], [], []
    target, model, symmetry = None, {}, "none"
    blocks = text.split("\\end{tabular}")
    try:
        for line in blocks[0].splitlines():
            if "&" in line:
                _, term = line.split("&", 1)
                columns.append(_unlatex_term(term.replace("\\\\", "")))
        body = blocks[1].split("\\hline\n\\hline")
        for part, dest in ((body[0], rows), (body[1], None)):
            for line in part.splitlines():
                if "&" not in line or "T_{" in line:
                    continue
                cells = line.replace("\\\\", "").replace("\\hline", "").split("&")
                vals = [int(c.strip().strip("$")) if c.strip() else 0 for c in cells]
                if dest is None:
                    footer = vals
                else:
                    dest.append(vals)
        for line in text.splitlines():
            if line.startswith("% target:"):
                target = grammar.parse_inequality(line.split(":", 1)[1].strip())
            elif line.startswith("% model:"):
                model = json.loads(line.split(":", 1)[1])
            elif line.startswith("% symmetry:"):
                symmetry = json.loads(line.split(":", 1)[1])
    except (IndexError, ValueError) as exc:
        raise ParseError(f"malformed LaTeX proof table: {exc}") from exc
    if target is None:
        raise ParseError("LaTeX proof table lacks a target comment")
    return ProofTable(target, columns, rows, footer, model, symmetry)


# -- chains of inequalities ------------------------------------------------------

STEP_LABELS = {
    "symmetry": "s",
    "decode": "a",
    "independence": "b",
    "cache_det": "d",
    "delivery_det": "d",
}


@dataclass
class ChainStep:
    relation: str              # ">=" or "="
    before: dict[str, Fraction]
    after: dict[str, Fraction]
    row: int
    labels: tuple[str, ...]


def _sub(a: dict, b: dict, k=Fraction(1)) -> dict:
    out = dict(a)
    for key, v in b.items():
        out[key] = out.get(key, ZERO) - k * v
        if not out[key]:
            del out[key]
    return out


def _format_expr(expr: dict[str, Fraction], order: list[str]) -> str:
    parts = []
    for name in order:
        v = expr.get(name, ZERO)
        if not v:
            continue
        label = "" if name == grammar.CONSTANT else name
        if label and abs(v) == 1:
            coef = "-" if v < 0 else "+"
        else:
            coef = ("" if v < 0 else "+") + grammar.format_rational(v)
        parts.append(coef + label)
    text = "".join(parts) or "0"
    return text[1:] if text.startswith("+") else text


def chain_steps(cert: Certificate) -> tuple[dict, list[ChainStep]]:
    """Linearize the rows into ``E0 >= E1 >= ... >= En`` with ``En`` constant.

    ``E0`` is the nonconstant part of the weighted row sum, so every step
    subtracts one valid row.  Rows are taken greedily, preferring the row
    whose positive terms are already present in the running expression.
    """
    scaled = [{k: r.multiplier * v for k, v in r.terms.items() if v} for r in cert.rows]
    total: dict[str, Fraction] = {}
    for row in scaled:
        total = _sub(total, row, Fraction(-1))
    start = {k: v for k, v in total.items() if k != grammar.CONSTANT}
    current = dict(start)
    remaining = list(range(len(scaled)))
    steps = []
    kinds = verifier.row_kinds(cert.to_document()) if cert.rows else []
    while remaining:
        def cover(i):
            pos = {k: v for k, v in scaled[i].items() if v > 0 and k != grammar.CONSTANT}
            if not pos:
                return (0, 0)
            hit = sum(1 for k, v in pos.items() if current.get(k, ZERO) >= v)
            return (hit == len(pos), hit)

        best = max(remaining, key=lambda i: (cover(i), -i))
        remaining.remove(best)
        after = _sub(current, scaled[best])
        relation, labels = kinds[best] if kinds else (">=", ())
        steps.append(ChainStep(relation, current, after, best, labels))
        current = after
    if any(k != grammar.CONSTANT for k in current):
        if not (set(current) <= {grammar.CONSTANT, grammar.MEMORY, grammar.RATE}):
            raise LinearizationFailed("rows do not telescope to a constant")
    return start, steps


def _expr_order(cert: Certificate, exprs) -> list[str]:
    """Entropy terms in canonical subset order, then M, R, then the constant."""
    index = {n: i for i, n in enumerate(cert.universe_names())}
    names = {k for e in exprs for k in e}

    def key(name):
        if name in (grammar.MEMORY, grammar.RATE, grammar.CONSTANT):
            return (1, [grammar.MEMORY, grammar.RATE, grammar.CONSTANT].index(name))
        return (0, sum(1 << index[v] for v in grammar.parse_term(name)))

    return sorted(names, key=key)


def render_chain(cert: Certificate) -> str:
    """Chain-of-inequalities text; rate couplings turn the first line into M, R."""
    if not cert.rows:
        return ""
    start, steps = chain_steps(cert)
    first = _display_start(cert, start)
    exprs = [start] + [st.after for st in steps] + (list(first[:2]) if first else [])
    order = _expr_order(cert, exprs)
    lines = []
    if first is not None:
        head, couple, rewritten = first
        lines.append(_format_expr(head, order))
        lines.append("  >= " + _format_expr(couple, order) + "   [M >= H(Z_k), R >= H(X_d)]")
        if rewritten:
            lines.append("  =  " + _format_expr(start, order) + "   (s)")
    else:
        lines.append(_format_expr(start, order))
    for st in steps:
        tag = "".join(f"({lab})" for lab in st.labels)
        lines.append(f"  {st.relation:<2} " + _format_expr(st.after, order)
                     + (f"   {tag}" if tag else ""))
    return "\n".join(lines) + "\n"


def _single(name: str):
    """Role of a one-variable term ("Z" or "X"), else None."""
    if name in (grammar.MEMORY, grammar.RATE, grammar.CONSTANT):
        return None
    members = grammar.parse_term(name)
    return grammar.parse_var(members[0])[0] if len(members) == 1 else None


def _display_start(cert: Certificate, start: dict):
    """Rate-coupled form of the first line, or None when there is nothing to couple.

    Caches are shown as H(Z0) when symmetry makes all single caches
    equivalent; if the rows use another cache an explicit (s) step follows.
    """
    if not start or any(k in (grammar.MEMORY, grammar.RATE) for k in start):
        return None
    head: dict[str, Fraction] = {}
    couple: dict[str, Fraction] = {}
    rewritten = False
    for name, v in start.items():
        role = _single(name) if v > 0 else None
        if role == "Z":
            head[grammar.MEMORY] = head.get(grammar.MEMORY, ZERO) + v
            key = grammar.term_name(["Z0"]) if cert.symmetry != "none" else name
            rewritten |= key != name
            couple[key] = couple.get(key, ZERO) + v
        elif role == "X":
            head[grammar.RATE] = head.get(grammar.RATE, ZERO) + v
            couple[name] = couple.get(name, ZERO) + v
        else:
            head[name] = v
            couple[name] = v
    if grammar.MEMORY not in head and grammar.RATE not in head:
        return None
    return head, couple, rewritten
