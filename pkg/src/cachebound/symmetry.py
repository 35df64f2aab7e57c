"""User-permutation symmetry on caches and delivery messages.

A permutation ``pi`` of the users fixes every file, sends ``Z_k`` to
``Z_pi(k)`` and sends ``X_d`` to ``X_e`` where ``e[pi(i)] = d[i]``.  With
``pi = 120`` (0->1, 1->2, 2->0) this maps {X012, X210} to {X201, X021}.
The action preserves decodability: user ``pi(k)`` of demand ``e`` wants
file ``e[pi(k)] = d[k]``, exactly what user ``k`` of ``d`` wanted.

Two reductions are offered:

* ``orbit_map(u, group)`` for a group that maps the modeled demand set onto
  itself.  Orbits are honest group orbits and the quotient LP has the same
  optimum as the raw LP.
* ``orbit_map(u, group, restricted=True)`` identifies ``H(A)`` with
  ``H(pi(A))`` whenever the image lies inside the modeled universe, for any
  permutation.  For a symmetric code over the full demand set these are all
  true equalities, so the quotient is a valid outer bound for symmetric codes
  even when the modeled demand subset is not closed under ``pi``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

from .caching_model import CachingModel
from .entropy_space import (
    DEFAULT_CAP,
    Inequality,
    LinearForm,
    Provenance,
    VariableUniverse,
    VarSet,
    check_cap,
    equality_pair,
    register_kind,
)
from .errors import ImageOutsideUniverse, ParseError

log = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class UserPermutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation: {self.images}")

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __len__(self) -> int:
        return len(self.images)

    def compose(self, other: "UserPermutation") -> "UserPermutation":
        """``self . other``: apply ``other`` first."""
        return UserPermutation(tuple(self.images[j] for j in other.images))

    __matmul__ = compose

    def inverse(self) -> "UserPermutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return UserPermutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def act_on_demand(self, d: Sequence[int]) -> tuple[int, ...]:
        e = [0] * len(d)
        for i, v in enumerate(d):
            e[self.images[i]] = v
        return tuple(e)

    def __str__(self) -> str:
        return "".join(str(i) for i in self.images)

    @classmethod
    def parse(cls, text: str) -> "UserPermutation":
        if not text.isdigit():
            raise ParseError(f"permutation must be a digit string: {text!r}")
        try:
            return cls(tuple(int(c) for c in text))
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    @classmethod
    def identity(cls, k: int) -> "UserPermutation":
        return cls(tuple(range(k)))


def symmetric_group(k: int) -> list[UserPermutation]:
    return [UserPermutation(p) for p in permutations(range(k))]


class _MaskAction:
    """Bitmask image of one permutation, via per-byte lookup tables.

    Variables whose image is missing from the universe map to ``None``;
    any mask touching one of them has no image.
    """

    def __init__(self, u: VariableUniverse, pi: UserPermutation):
        n = u.total_vars
        target: list[int | None] = []
        for i in range(n):
            role = u.role(i)
            if role == "W":
                target.append(i)
            elif role == "Z":
                target.append(u.cache_index(pi(i - u.n_files)))
            else:
                e = pi.act_on_demand(u.demands[i - u.n_files - u.n_users])
                target.append(u.delivery_index(e) if u.has_demand(e) else None)
        self.target = target
        self.tables = []
        for start in range(0, n, 8):
            table = []
            for byte in range(256):
                img, ok = 0, True
                for b in range(8):
                    if byte >> b & 1:
                        if start + b >= n or target[start + b] is None:
                            ok = False
                            break
                        img |= 1 << target[start + b]
                table.append(img if ok else -1)
            self.tables.append(table)

    def __call__(self, mask: int) -> int:
        img = 0
        for table in self.tables:
            t = table[mask & 0xFF]
            if t < 0:
                return -1
            img |= t
            mask >>= 8
        return img


def apply_permutation(pi: UserPermutation, s: VarSet, u: VariableUniverse) -> VarSet:
    if len(pi) != u.n_users:
        raise ValueError(f"permutation of {len(pi)} users applied to {u.n_users}-user universe")
    img = _MaskAction(u, pi)(s.mask)
    if img < 0:
        raise ImageOutsideUniverse(f"permutation {pi} maps {u.term_name(s)} outside the universe")
    return VarSet(img)


def stabilizes(pi: UserPermutation, u: VariableUniverse) -> bool:
    return all(u.has_demand(pi.act_on_demand(d)) for d in u.demands)


def stabilizer_subgroup(u: VariableUniverse) -> list[UserPermutation]:
    """Largest subgroup of S_K mapping the modeled demand set onto itself."""
    return [pi for pi in symmetric_group(u.n_users) if stabilizes(pi, u)]


@dataclass
class OrbitMap:
    universe: VariableUniverse
    group: tuple[UserPermutation, ...]
    restricted: bool
    rep_of: list[int] = field(repr=False)

    def __call__(self, s: VarSet) -> VarSet:
        return VarSet(self.rep_of[s.mask])

    rep = __call__

    @property
    def orbit_count(self) -> int:
        return sum(1 for m in range(1, len(self.rep_of)) if self.rep_of[m] == m)

    def representatives(self) -> list[VarSet]:
        return [VarSet(m) for m in range(1, len(self.rep_of)) if self.rep_of[m] == m]

    def is_trivial(self) -> bool:
        return all(self.rep_of[m] == m for m in range(len(self.rep_of)))

    def descriptor(self):
        """Certificate-document form; ``"none"`` when nothing is identified."""
        if all(pi.is_identity() for pi in self.group):
            return "none"
        return {
            "action": "user-permutation",
            "mode": "restricted" if self.restricted else "orbit",
            "group": [str(pi) for pi in self.group],
        }


def orbit_map(u: VariableUniverse, group: Sequence[UserPermutation] | None = None,
              restricted: bool = False, cap: int = DEFAULT_CAP) -> OrbitMap:
    """Map each subset to the least (in mask order) member of its class."""
    check_cap(u, cap)
    group = tuple(group) if group is not None else (UserPermutation.identity(u.n_users),)
    if not restricted:
        for pi in group:
            if not stabilizes(pi, u):
                raise ImageOutsideUniverse(
                    f"permutation {pi} does not map the demand set onto itself; "
                    "use restricted=True")
    size = 1 << u.total_vars
    parent = list(range(size))

    def find(a: int) -> int:
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    for pi in group:
        if pi.is_identity():
            continue
        act = _MaskAction(u, pi)
        for m in range(1, size):
            img = act(m)
            if img > 0 and img != m:
                a, b = find(m), find(img)
                if a != b:
                    if a < b:
                        parent[b] = a
                    else:
                        parent[a] = b
    rep_of = [find(m) for m in range(size)]
    return OrbitMap(u, group, restricted, rep_of)


def identity_map(u: VariableUniverse, cap: int = DEFAULT_CAP) -> OrbitMap:
    return orbit_map(u, None, cap=cap)


def stabilizer_map(u: VariableUniverse, cap: int = DEFAULT_CAP) -> OrbitMap:
    group = stabilizer_subgroup(u)
    if len(group) == 1:
        log.warning("demand set has no nontrivial stabilizing permutation; "
                    "symmetry reduction falls back to the identity")
    return orbit_map(u, group, cap=cap)


def symmetric_code_map(u: VariableUniverse, cap: int = DEFAULT_CAP) -> OrbitMap:
    """Restricted identification under all of S_K."""
    return orbit_map(u, symmetric_group(u.n_users), restricted=True, cap=cap)


def make_orbit_map(u: VariableUniverse, mode: str, cap: int = DEFAULT_CAP) -> OrbitMap:
    if mode == "full":
        return symmetric_code_map(u, cap)
    if mode == "stabilizer":
        return stabilizer_map(u, cap)
    if mode == "none":
        return identity_map(u, cap)
    raise ValueError(f"unknown symmetry mode {mode!r}")


def quotient_inequalities(rows, om: OrbitMap) -> list[Inequality]:
    """Rewrite rows over representatives; drop zero and duplicate rows."""
    out, seen = [], set()
    for ineq in rows:
        form = ineq.form.map_terms(om)
        if not form.entropy and not form.m and not form.r and form.const >= 0:
            continue
        if form in seen:
            continue
        seen.add(form)
        out.append(Inequality(form, ineq.provenance))
    return out


def quotient_model(m: CachingModel, om: OrbitMap) -> CachingModel:
    return CachingModel(m.universe, tuple(quotient_inequalities(m.constraints, om)),
                        m.notes, m.preset)


@register_kind("symmetry")
def _symmetry_form(p: Provenance, u: VariableUniverse) -> LinearForm:
    base = p.get("base")
    return LinearForm.from_terms([(base, 1), (apply_permutation(p.get("perm"), base, u), -1)])


def symmetry_equalities(om: OrbitMap) -> list[Inequality]:
    """Explicit H(A) = H(pi(A)) rows equivalent to the identification in ``om``."""
    u = om.universe
    out, seen = [], set()
    for pi in om.group:
        if pi.is_identity():
            continue
        act = _MaskAction(u, pi)
        for m in range(1, 1 << u.total_vars):
            img = act(m)
            if img <= 0 or img == m:
                continue
            key = (min(m, img), max(m, img))
            if key in seen:
                continue
            seen.add(key)
            params = (("perm", pi), ("base", VarSet(m)))
            form = LinearForm.from_terms([(VarSet(m), 1), (VarSet(img), -1)])
            out += equality_pair(form, "symmetry", params)
    return out
