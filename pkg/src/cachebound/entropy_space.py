"""Joint-entropy coordinates over a caching variable universe.

Variables are indexed in canonical order (all W_i, then all Z_k, then all
X_d with demand tuples sorted lexicographically) and a subset of variables
is a bitmask over those indices.  The canonical order on subsets is the
order of their bitmasks; it is the order used for term indices, for file
formats and for choosing orbit representatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Iterator, Mapping

from . import grammar
from .errors import DuplicateDemand, InvalidDemand, UniverseTooLarge

DEFAULT_CAP = 16

ZERO = Fraction(0)


@dataclass(frozen=True, order=True)
class VarSet:
    """A subset of the universe's variables, encoded as a bitmask."""

    mask: int

    def __or__(self, other: "VarSet") -> "VarSet":
        return VarSet(self.mask | other.mask)

    def __and__(self, other: "VarSet") -> "VarSet":
        return VarSet(self.mask & other.mask)

    def __sub__(self, other: "VarSet") -> "VarSet":
        return VarSet(self.mask & ~other.mask)

    def __bool__(self) -> bool:
        return self.mask != 0

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __contains__(self, index: int) -> bool:
        return bool(self.mask >> index & 1)

    def issubset(self, other: "VarSet") -> bool:
        return self.mask & ~other.mask == 0

    def members(self) -> list[int]:
        out, m, i = [], self.mask, 0
        while m:
            if m & 1:
                out.append(i)
            m >>= 1
            i += 1
        return out

    @classmethod
    def of(cls, indices: Iterable[int]) -> "VarSet":
        m = 0
        for i in indices:
            m |= 1 << i
        return cls(m)


EMPTY = VarSet(0)


@dataclass(frozen=True)
class VariableUniverse:
    n_files: int
    n_users: int
    demands: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        names = [grammar.file_name(i) for i in range(self.n_files)]
        names += [grammar.cache_name(k) for k in range(self.n_users)]
        names += [grammar.delivery_name(d) for d in self.demands]
        object.__setattr__(self, "names", tuple(names))
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @property
    def total_vars(self) -> int:
        return self.n_files + self.n_users + len(self.demands)

    @property
    def n_terms(self) -> int:
        return (1 << self.total_vars) - 1

    def file_index(self, i: int) -> int:
        return i

    def cache_index(self, k: int) -> int:
        return self.n_files + k

    def delivery_index(self, demand) -> int:
        return self.n_files + self.n_users + self.demands.index(tuple(demand))

    def has_demand(self, demand) -> bool:
        return tuple(demand) in self.demands

    @property
    def files(self) -> VarSet:
        return VarSet((1 << self.n_files) - 1)

    @property
    def full(self) -> VarSet:
        return VarSet((1 << self.total_vars) - 1)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"{name} is not a variable of this universe") from None

    def varset(self, *names: str) -> VarSet:
        return VarSet.of(self.index(n) for n in names)

    def parse_term(self, text: str) -> VarSet:
        names = grammar.parse_term(text)
        if isinstance(names, str):
            raise ValueError(f"{text} is not an entropy term")
        return self.varset(*names)

    def term_name(self, s: VarSet) -> str:
        return grammar.term_name(self.names[i] for i in s.members())

    def role(self, index: int) -> str:
        if index < self.n_files:
            return "W"
        if index < self.n_files + self.n_users:
            return "Z"
        return "X"

    def describe(self) -> dict:
        return {
            "n_files": self.n_files,
            "n_users": self.n_users,
            "demands": [grammar.demand_string(d) for d in self.demands],
        }


def build_universe(n_files: int, n_users: int, demands) -> VariableUniverse:
    if n_files < 1 or n_users < 1:
        raise InvalidDemand("need at least one file and one user")
    if n_files > grammar.MAX_FILES_FOR_NAMES:
        raise InvalidDemand(f"term names support at most {grammar.MAX_FILES_FOR_NAMES} files")
    seen = set()
    for d in demands:
        d = tuple(d)
        if len(d) != n_users:
            raise InvalidDemand(f"demand {d} has length {len(d)}, expected {n_users}")
        if any(not isinstance(v, int) or v < 0 or v >= n_files for v in d):
            raise InvalidDemand(f"demand {d} names a file outside [0, {n_files})")
        if d in seen:
            raise DuplicateDemand(f"demand {d} listed twice")
        seen.add(d)
    return VariableUniverse(n_files, n_users, tuple(sorted(seen)))


def check_cap(u: VariableUniverse, cap: int = DEFAULT_CAP) -> None:
    if u.total_vars > cap:
        raise UniverseTooLarge(
            f"{u.total_vars} variables exceed the cap of {cap}; "
            "model a subset of the demands instead (see the presets)"
        )


def enumerate_terms(u: VariableUniverse, cap: int = DEFAULT_CAP) -> list[VarSet]:
    """All nonempty subsets; the term at index i has mask i + 1."""
    check_cap(u, cap)
    return [VarSet(m) for m in range(1, 1 << u.total_vars)]


def term_index(s: VarSet) -> int:
    if not s:
        raise ValueError("the empty set is not an entropy coordinate")
    return s.mask - 1


class LinearForm:
    """Sparse rational combination of joint entropies plus M, R and the constant F."""

    __slots__ = ("entropy", "m", "r", "const", "_hash")

    def __init__(self, entropy: Mapping[VarSet, Fraction] | None = None,
                 m=ZERO, r=ZERO, const=ZERO):
        clean = {}
        if entropy:
            for s, c in entropy.items():
                if not s:
                    raise ValueError("H() of the empty set is not a coordinate")
                c = Fraction(c)
                if c:
                    clean[s] = c
        self.entropy = clean
        self.m = Fraction(m)
        self.r = Fraction(r)
        self.const = Fraction(const)
        self._hash = None

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple[VarSet, object]], m=ZERO, r=ZERO, const=ZERO):
        acc: dict[VarSet, Fraction] = {}
        for s, c in pairs:
            if s:
                acc[s] = acc.get(s, ZERO) + Fraction(c)
        return cls(acc, m, r, const)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        acc = dict(self.entropy)
        for s, c in other.entropy.items():
            acc[s] = acc.get(s, ZERO) + c
        return LinearForm(acc, self.m + other.m, self.r + other.r, self.const + other.const)

    def __neg__(self) -> "LinearForm":
        return self.scale(-1)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def scale(self, k) -> "LinearForm":
        k = Fraction(k)
        return LinearForm({s: c * k for s, c in self.entropy.items()},
                          self.m * k, self.r * k, self.const * k)

    __mul__ = scale
    __rmul__ = scale

    def is_zero(self) -> bool:
        return not self.entropy and not self.m and not self.r and not self.const

    def map_terms(self, f: Callable[[VarSet], VarSet]) -> "LinearForm":
        """Rename every entropy term through ``f``, summing merged coefficients."""
        return LinearForm.from_terms(((f(s), c) for s, c in self.entropy.items()),
                                     self.m, self.r, self.const)

    def evaluate(self, h: Callable[[VarSet], Fraction], m=ZERO, r=ZERO):
        total = self.m * m + self.r * r + self.const
        for s, c in self.entropy.items():
            total += c * h(s)
        return total

    def key(self) -> tuple:
        return (tuple(sorted(self.entropy.items())), self.m, self.r, self.const)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearForm):
            return NotImplemented
        return (self.entropy == other.entropy and self.m == other.m
                and self.r == other.r and self.const == other.const)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def named(self, u: VariableUniverse) -> dict[str, Fraction]:
        """Coefficients keyed by grammar names, F first and M, R last."""
        out = {}
        if self.const:
            out[grammar.CONSTANT] = self.const
        for s in sorted(self.entropy):
            out[u.term_name(s)] = self.entropy[s]
        if self.m:
            out[grammar.MEMORY] = self.m
        if self.r:
            out[grammar.RATE] = self.r
        return out

    def pretty(self, u: VariableUniverse) -> str:
        parts = []
        for name, c in self.named(u).items():
            label = "" if name == grammar.CONSTANT else name
            if label and abs(c) == 1:
                coef = "-" if c < 0 else "+"
            else:
                coef = ("" if c < 0 else "+") + grammar.format_rational(c)
            parts.append(coef + label)
        text = "".join(parts) or "0"
        return text[1:] if text.startswith("+") else text

    def __repr__(self) -> str:
        return f"LinearForm({self.key()!r})"


@dataclass(frozen=True)
class Provenance:
    """Where an inequality came from; enough to regenerate it exactly.

    ``params`` is a tuple of ``(name, value)`` pairs whose values are ints,
    tuples of ints or VarSets.  ``sense`` is +1 or -1 for the two halves of
    an equality and +1 otherwise.
    """

    kind: str
    params: tuple = ()
    sense: int = 1

    def get(self, name: str):
        for k, v in self.params:
            if k == name:
                return v
        raise KeyError(name)


@dataclass(frozen=True)
class Inequality:
    """``form >= 0`` together with its origin."""

    form: LinearForm
    provenance: Provenance

    def regenerate(self, u: VariableUniverse) -> LinearForm:
        return regenerate(self.provenance, u)


_REGENERATORS: dict[str, Callable[[Provenance, VariableUniverse], LinearForm]] = {}


def register_kind(kind: str):
    def deco(fn):
        _REGENERATORS[kind] = fn
        return fn
    return deco


def regenerate(p: Provenance, u: VariableUniverse) -> LinearForm:
    try:
        fn = _REGENERATORS[p.kind]
    except KeyError:
        raise ValueError(f"unknown provenance kind {p.kind!r}") from None
    form = fn(p, u)
    return form if p.sense == 1 else -form


def equality_pair(form: LinearForm, kind: str, params: tuple) -> list[Inequality]:
    return [Inequality(form, Provenance(kind, params, 1)),
            Inequality(-form, Provenance(kind, params, -1))]


@register_kind("monotone")
def _monotone_form(p: Provenance, u: VariableUniverse) -> LinearForm:
    i = p.get("var")
    rest = p.get("given")
    return LinearForm.from_terms([(rest | VarSet(1 << i), 1), (rest, -1)])


@register_kind("elemental")
def _elemental_form(p: Provenance, u: VariableUniverse) -> LinearForm:
    i, j, s = p.get("i"), p.get("j"), p.get("given")
    bi, bj = VarSet(1 << i), VarSet(1 << j)
    return LinearForm.from_terms([(s | bi, 1), (s | bj, 1), (s | bi | bj, -1), (s, -1)])


def iter_elemental(u: VariableUniverse, cap: int = DEFAULT_CAP) -> Iterator[Inequality]:
    """Monotone rows first, then I(i;j|S) >= 0 for pairs i<j and S in mask order."""
    check_cap(u, cap)
    n = u.total_vars
    full = u.full
    for i in range(n):
        p = Provenance("monotone", (("var", i), ("given", full - VarSet(1 << i))))
        yield Inequality(_monotone_form(p, u), p)
    for i, j in combinations(range(n), 2):
        rest = full.mask & ~(1 << i) & ~(1 << j)
        sub = 0
        while True:
            p = Provenance("elemental", (("i", i), ("j", j), ("given", VarSet(sub))))
            yield Inequality(_elemental_form(p, u), p)
            if sub == rest:
                break
            sub = (sub - rest) & rest


def elemental_inequalities(u: VariableUniverse, cap: int = DEFAULT_CAP) -> list[Inequality]:
    return list(iter_elemental(u, cap))


def elemental_count(n: int) -> int:
    if n < 1:
        return 0
    if n == 1:
        return 1
    return n + n * (n - 1) // 2 * 2 ** (n - 2)
