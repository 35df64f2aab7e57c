"""Linear constraints of the coded caching problem over entropy coordinates."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from . import grammar
from .entropy_space import (
    Inequality,
    LinearForm,
    Provenance,
    VariableUniverse,
    VarSet,
    build_universe,
    check_cap,
    equality_pair,
    register_kind,
    DEFAULT_CAP,
)
from .errors import DocumentError, InvalidDemand
from .presets import PRESETS, get_preset


@register_kind("independence")
def _independence_form(p: Provenance, u: VariableUniverse) -> LinearForm:
    files = p.get("files")
    return LinearForm.from_terms([(files, 1)], const=-len(files))


@register_kind("cache_det")
def _cache_det_form(p: Provenance, u: VariableUniverse) -> LinearForm:
    z = VarSet(1 << u.cache_index(p.get("user")))
    return LinearForm.from_terms([(u.files | z, 1), (u.files, -1)])


@register_kind("delivery_det")
def _delivery_det_form(p: Provenance, u: VariableUniverse) -> LinearForm:
    x = VarSet(1 << u.delivery_index(p.get("demand")))
    return LinearForm.from_terms([(u.files | x, 1), (u.files, -1)])


@register_kind("decode")
def _decode_form(p: Provenance, u: VariableUniverse) -> LinearForm:
    k, d = p.get("user"), p.get("demand")
    zx = VarSet(1 << u.cache_index(k) | 1 << u.delivery_index(d))
    w = VarSet(1 << u.file_index(d[k]))
    return LinearForm.from_terms([(w | zx, 1), (zx, -1)])


@register_kind("rate_m")
def _rate_m_form(p: Provenance, u: VariableUniverse) -> LinearForm:
    return LinearForm.from_terms([(VarSet(1 << u.cache_index(p.get("user"))), -1)], m=1)


@register_kind("rate_r")
def _rate_r_form(p: Provenance, u: VariableUniverse) -> LinearForm:
    return LinearForm.from_terms([(VarSet(1 << u.delivery_index(p.get("demand"))), -1)], r=1)


@register_kind("nonneg")
def _nonneg_form(p: Provenance, u: VariableUniverse) -> LinearForm:
    return LinearForm(m=1) if p.get("var") == grammar.MEMORY else LinearForm(r=1)


def independence_constraints(u: VariableUniverse) -> list[Inequality]:
    """H(W_S) = |S| for every nonempty set S of files."""
    out = []
    for mask in range(1, 1 << u.n_files):
        p = (("files", VarSet(mask)),)
        out += equality_pair(_independence_form(Provenance("independence", p), u),
                             "independence", p)
    return out


def determinism_constraints(u: VariableUniverse) -> list[Inequality]:
    """Caches and messages are functions of the full file set."""
    out = []
    for k in range(u.n_users):
        p = (("user", k),)
        out += equality_pair(_cache_det_form(Provenance("cache_det", p), u), "cache_det", p)
    for d in u.demands:
        p = (("demand", d),)
        out += equality_pair(_delivery_det_form(Provenance("delivery_det", p), u),
                             "delivery_det", p)
    return out


def decoding_constraints(u: VariableUniverse) -> list[Inequality]:
    """User k recovers W_{d_k} from (Z_k, X_d) for every modeled demand d."""
    out = []
    for d in u.demands:
        for k in range(u.n_users):
            p = (("user", k), ("demand", d))
            out += equality_pair(_decode_form(Provenance("decode", p), u), "decode", p)
    return out


def rate_constraints(u: VariableUniverse) -> list[Inequality]:
    out = []
    for k in range(u.n_users):
        p = Provenance("rate_m", (("user", k),))
        out.append(Inequality(_rate_m_form(p, u), p))
    for d in u.demands:
        p = Provenance("rate_r", (("demand", d),))
        out.append(Inequality(_rate_r_form(p, u), p))
    for var in (grammar.MEMORY, grammar.RATE):
        p = Provenance("nonneg", (("var", var),))
        out.append(Inequality(_nonneg_form(p, u), p))
    return out


@dataclass(frozen=True)
class CachingModel:
    universe: VariableUniverse
    constraints: tuple[Inequality, ...]
    notes: str = ""
    preset: str | None = None

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.constraints:
            out[c.provenance.kind] = out.get(c.provenance.kind, 0) + 1
        return out

    def describe(self) -> dict:
        doc = self.universe.describe()
        doc["preset"] = self.preset
        return doc


def build_model(n_files: int | None = None, n_users: int | None = None,
                demands: Sequence | None = None, preset: str | None = None,
                cap: int = DEFAULT_CAP) -> CachingModel:
    if preset is not None:
        entry = get_preset(preset)
        n_files, n_users, demands = entry.n_files, entry.n_users, entry.demands
        notes = entry.notes
    else:
        if n_files is None or n_users is None or demands is None:
            raise InvalidDemand("give the sizes with a demand list, or a preset")
        notes = ""
    u = build_universe(n_files, n_users, demands)
    check_cap(u, cap)
    constraints = (independence_constraints(u) + determinism_constraints(u)
                   + decoding_constraints(u) + rate_constraints(u))
    if not notes:
        notes = "demands modeled: " + ", ".join(grammar.demand_string(d) for d in u.demands)
    return CachingModel(u, tuple(constraints), notes, preset)


def model_document(m: CachingModel) -> str:
    return json.dumps(m.describe(), indent=2) + "\n"


def model_from_document(text: str, cap: int = DEFAULT_CAP) -> CachingModel:
    try:
        doc = json.loads(text)
        n_files, n_users = doc["n_files"], doc["n_users"]
        demands = [grammar.parse_demand(s) for s in doc["demands"]]
        preset = doc.get("preset")
    except (ValueError, KeyError, TypeError) as exc:
        raise DocumentError(f"malformed model document: {exc}") from exc
    if preset is not None and preset in PRESETS:
        entry = PRESETS[preset]
        if (entry.n_files, entry.n_users, tuple(sorted(entry.demands))) != (
                n_files, n_users, tuple(sorted(demands))):
            raise DocumentError(f"document contents disagree with preset {preset!r}")
        return build_model(preset=preset, cap=cap)
    return build_model(n_files, n_users, demands, cap=cap)
