"""Shared helpers for the test suites (imported by test modules directly)."""

from __future__ import annotations

import copy
import json
import random
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product

from cachebound import certificates, grammar
from cachebound.caching_model import build_model
from cachebound.lp_exact import assemble, minimize
from cachebound.symmetry import make_orbit_map
from cachebound.verifier import verify_document

ALL_2X2 = tuple(product(range(2), repeat=2))

# every solve made through ``solve`` lands here with its verdict
SOLVE_LOG: list[tuple[str, bool]] = []


@lru_cache(maxsize=None)
def model(n_files=None, n_users=None, demands=None, preset=None):
    return build_model(n_files, n_users, demands, preset=preset)


def solve(m, mode: str, weights, label: str = ""):
    """Exact LP optimum; the certificate of every solve is extracted and verified."""
    om = make_orbit_map(m.universe, mode)
    p = assemble(m, om, weights)
    sol = minimize(p)
    if sol.status == "Optimal":
        cert = certificates.extract(sol, p)
        ok = bool(verify_document(cert.to_document()))
        SOLVE_LOG.append((label or f"{m.universe.describe()} {mode} {weights}", ok))
        assert ok, f"extracted certificate rejected for {label}"
    return sol


@lru_cache(maxsize=None)
def optimum_2x2(demands: tuple, mode: str, weights: tuple) -> Fraction:
    m = model(2, 2, demands)
    return solve(m, mode, weights, f"2x2 {demands} {mode} {weights}").value


def demand_subsets_2x2():
    return [tuple(c) for r in range(1, 5) for c in combinations(ALL_2X2, r)]


# -- an achievable entropy vector: the centralized coded scheme -------------------

def _rank_gf2(vectors) -> int:
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def man_entropy(u, t: int):
    """Entropy (in file units) of every subset under the coded scheme with parameter t.

    Each file is split into C(K,t) subfiles indexed by t-subsets of users;
    user k caches the subfiles whose index contains k; for demand d the
    server sends, for each (t+1)-subset S, the XOR over k in S of subfile
    (d_k, S - k).  Entropy of a set of variables is the GF(2) rank of the
    symbols they carry divided by C(K,t).
    """
    N, K = u.n_files, u.n_users
    subsets = [frozenset(s) for s in combinations(range(K), t)]
    coord = {(n, s): i for i, (n, s) in enumerate(product(range(N), subsets))}
    symbols = []
    for n in range(N):
        symbols.append([1 << coord[(n, s)] for s in subsets])
    for k in range(K):
        symbols.append([1 << coord[(n, s)] for n in range(N) for s in subsets if k in s])
    for d in u.demands:
        msgs = []
        for big in combinations(range(K), t + 1):
            v = 0
            for k in big:
                v ^= 1 << coord[(d[k], frozenset(big) - {k})]
            msgs.append(v)
        symbols.append(msgs)
    scale = len(subsets)
    n = u.total_vars
    h = [Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        vecs = [v for i in range(n) if mask >> i & 1 for v in symbols[i]]
        h[mask] = Fraction(_rank_gf2(vecs), scale)
    mem = Fraction(N * sum(1 for s in subsets if 0 in s), scale)
    rate = Fraction(len(list(combinations(range(K), t + 1))), scale)
    return h, mem, rate


# -- mutations -------------------------------------------------------------------

def _fmt(v: Fraction) -> str:
    return grammar.format_rational(v)


DELTAS = [Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2), Fraction(2), Fraction(-3)]


def mutate(doc: dict, rng: random.Random) -> tuple[str, dict]:
    """One single-site change that cannot leave a valid certificate.

    Documents must certify their own optimum (target c equal to the derived
    constant) so that raising c, and every perturbation of the tight rows,
    breaks the proof.
    """
    out = copy.deepcopy(doc)
    rows = out["rows"]
    names = certificates.verifier.universe_names(out["model"])
    kinds = ["coef", "mult", "drop_row", "target_c", "target_m", "new_term"]
    if out["level"] == "elemental":
        kinds += ["drop_term", "sense"]
    kind = rng.choice(kinds)
    if kind == "coef":
        row = rng.choice(rows)
        key = rng.choice(sorted(row["terms"]))
        v = grammar.parse_rational(row["terms"][key]) + rng.choice(DELTAS)
        if v:
            row["terms"][key] = _fmt(v)
        else:
            del row["terms"][key]
    elif kind == "mult":
        row = rng.choice(rows)
        mult = grammar.parse_rational(row["multiplier"])
        row["multiplier"] = _fmt(mult * rng.choice([Fraction(1, 2), Fraction(3, 2), Fraction(2), Fraction(1, 3)]))
    elif kind == "drop_row":
        rows.pop(rng.randrange(len(rows)))
    elif kind == "target_c":
        c = grammar.parse_rational(out["target"]["c"])
        out["target"]["c"] = _fmt(c + rng.choice([Fraction(1), Fraction(1, 7), Fraction(1, 1000)]))
    elif kind == "target_m":
        key = rng.choice(["m", "r"])
        v = grammar.parse_rational(out["target"][key])
        out["target"][key] = _fmt(v + rng.choice([Fraction(1), Fraction(1, 3)]))
    elif kind == "new_term":
        row = rng.choice(rows)
        while True:
            mask = rng.randrange(1, 1 << len(names))
            key = grammar.term_name(names[i] for i in range(len(names)) if mask >> i & 1)
            if key not in row["terms"]:
                break
        row["terms"][key] = _fmt(rng.choice(DELTAS))
    elif kind == "drop_term":
        row = rng.choice(rows)
        del row["terms"][rng.choice(sorted(row["terms"]))]
    elif kind == "sense":
        eq = [r for r in rows if "sense" in r["provenance"]["params"]]
        if not eq:
            return mutate(doc, rng)
        row = rng.choice(eq)
        row["provenance"]["params"]["sense"] *= -1
    return kind, out


@lru_cache(maxsize=None)
def tight_documents() -> tuple[str, ...]:
    """JSON of accepted certificates whose target constant is their own optimum."""
    docs = [certificates.table2_certificate().to_document()]
    for preset, weights in (("man-table2", (1, 1)), ("full-2x2", (1, 1)), ("full-2x2", (2, 1)),
                            ("n3-single", (3, 1))):
        m = model(preset=preset)
        om = make_orbit_map(m.universe, "full")
        p = assemble(m, om, weights)
        sol = minimize(p)
        docs.append(certificates.extract(sol, p).to_document())
    return tuple(json.dumps(d, sort_keys=True) for d in docs)


@lru_cache(maxsize=None)
def mutation_outcomes(count: int = 1200, seed: int = 20240601) -> tuple[tuple[str, str, bool], ...]:
    rng = random.Random(seed)
    docs = [json.loads(d) for d in tight_documents()]
    out = []
    for _ in range(count):
        doc = rng.choice(docs)
        kind, mutated = mutate(doc, rng)
        out.append((doc["level"], kind, bool(verify_document(mutated))))
    return tuple(out)
