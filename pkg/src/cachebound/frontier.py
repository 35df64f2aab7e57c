"""The two-dimensional (M, R) outer-bound region.

Halfplanes come either from LP sweeps (each with a verified certificate) or
from a built-in list.  The region is tiny, so vertices are found by
intersecting every pair of boundary lines and keeping the feasible points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import grammar
from .caching_model import CachingModel
from .errors import CacheboundError, EmptyRegion, ParseError
from .symmetry import OrbitMap

ZERO = Fraction(0)
Point = tuple[Fraction, Fraction]

SIXTH_INEQUALITY_NOTE = (
    "printed with a stray beta between 6R and the inequality sign; read as 3M+6R>=8, "
    "the user-swap mirror of 6M+3R>=8, which matches the plotted polygon")


@dataclass(frozen=True)
class Halfplane:
    """``lam*M + mu*R >= c`` stored as coprime integers (positive scaling only)."""

    lam: Fraction
    mu: Fraction
    c: Fraction
    source: str = field(default="", compare=False)
    certificate: object = field(default=None, compare=False, repr=False)
    note: str = field(default="", compare=False)

    def __post_init__(self):
        if self.lam == 0 and self.mu == 0:
            raise ValueError("halfplane needs a nonzero normal")
        a, b, c = grammar.integer_halfplane(self.lam, self.mu, self.c)
        object.__setattr__(self, "lam", Fraction(a))
        object.__setattr__(self, "mu", Fraction(b))
        object.__setattr__(self, "c", Fraction(c))

    @property
    def key(self) -> tuple[Fraction, Fraction, Fraction]:
        return self.lam, self.mu, self.c

    def value(self, p: Point) -> Fraction:
        return self.lam * p[0] + self.mu * p[1]

    def contains(self, p: Point) -> bool:
        return self.value(p) >= self.c

    def tight(self, p: Point) -> bool:
        return self.value(p) == self.c

    def is_axis(self) -> bool:
        return self.c == 0 and (self.lam == 0 or self.mu == 0)

    def __str__(self) -> str:
        return grammar.format_halfplane(self.lam, self.mu, self.c)

    @classmethod
    def parse(cls, text: str, source: str = "") -> "Halfplane":
        return cls(*grammar.parse_inequality(text), source=source)


AXES = (Halfplane(1, 0, 0, "axis"), Halfplane(0, 1, 0, "axis"))


@dataclass
class Frontier:
    halfplanes: list[Halfplane]
    vertices: list[Point]
    redundant: list[bool]

    @property
    def facets(self) -> list[Halfplane]:
        """Non-redundant halfplanes other than the two axes."""
        return [h for h, r in zip(self.halfplanes, self.redundant) if not r and not h.is_axis()]

    def active(self, p: Point) -> list[Halfplane]:
        return [h for h in self.halfplanes if h.tight(p)]

    def to_csv(self) -> str:
        return points_csv(self.vertices)

    def halfplane_lines(self) -> str:
        return "".join(f"{h}\n" for h in self.halfplanes)


def builtin_theorem_3x3() -> list[Halfplane]:
    """The eight published N=K=3 outer-bound halfplanes, in printed order."""
    src = "builtin:theorem3x3"
    rows = [(1, 0, 0), (3, 1, 3), (6, 3, 8), (1, 1, 2), (12, 18, 29), (3, 6, 8), (1, 3, 3), (0, 1, 0)]
    out = [Halfplane(*r, source=src) for r in rows]
    out[5] = Halfplane(3, 6, 8, source=src, note=SIXTH_INEQUALITY_NOTE)
    return out


def inner_bound_3x3() -> list[Point]:
    """Corner points of the centralized scheme for N=K=3, M = t, R = (3-t)/(t+1)."""
    return [(Fraction(t), Fraction(3 - t, t + 1)) for t in range(4)]


def farey_weights(n: int) -> list[tuple[int, int]]:
    """Weights ``(p, q)`` and ``(q, p)`` for every Farey fraction p/q of order n."""
    if n < 1:
        raise ValueError("Farey order must be at least 1")
    fracs = {Fraction(p, q) for q in range(1, n + 1) for p in range(0, q + 1)}
    weights = set()
    for f in fracs:
        weights.add((f.numerator, f.denominator))
        weights.add((f.denominator, f.numerator))
    # sweep the normal direction from the R axis to the M axis
    return sorted(weights, key=lambda w: Fraction(w[0], w[0] + w[1]))


def parse_sweep(text: str) -> list[tuple[Fraction, Fraction]]:
    """``farey:N``, ``none``, or a semicolon list of ``a,b`` weight pairs."""
    text = text.strip()
    if text in ("", "none"):
        return []
    if text.startswith("farey:"):
        try:
            n = int(text.split(":", 1)[1])
        except ValueError:
            raise ParseError(f"bad Farey order in {text!r}") from None
        return [(Fraction(a), Fraction(b)) for a, b in farey_weights(n)]
    out = []
    for part in text.split(";"):
        pieces = part.split(",")
        if len(pieces) != 2:
            raise ParseError(f"weight pair must be 'a,b': {part!r}")
        out.append((grammar.parse_rational(pieces[0].strip()), grammar.parse_rational(pieces[1].strip())))
    return out


def sweep(m: CachingModel, om: OrbitMap | None, weights: Iterable[Sequence],
          use_float: bool = True) -> list[Halfplane]:
    """Supporting halfplane for each weight, each backed by a verified certificate."""
    from .certificates import extract
    from .lp_exact import assemble, minimize

    out: list[Halfplane] = []
    seen = set()
    for lam, mu in weights:
        lam, mu = Fraction(lam), Fraction(mu)
        if lam < 0 or mu < 0 or (lam == 0 and mu == 0):
            raise ValueError(f"sweep weights must be nonnegative and not both zero: {(lam, mu)}")
        p = assemble(m, om, (lam, mu))
        sol = minimize(p, use_float=use_float)
        if sol.status != "Optimal":
            raise CacheboundError(f"weight {(lam, mu)}: LP status {sol.status}")
        cert = extract(sol, p)
        verdict = cert.verify()
        if not verdict:
            raise CacheboundError(f"weight {(lam, mu)}: extracted certificate rejected: {verdict.describe()}")
        h = Halfplane(lam, mu, sol.value, source="proved", certificate=cert)
        if h.key not in seen:
            seen.add(h.key)
            out.append(h)
    return out


def _intersect(h: Halfplane, g: Halfplane) -> Point | None:
    det = h.lam * g.mu - h.mu * g.lam
    if det == 0:
        return None
    return ((h.c * g.mu - h.mu * g.c) / det, (h.lam * g.c - h.c * g.lam) / det)


def _all_vertices(hs: Sequence[Halfplane]) -> list[Point]:
    pts = set()
    for i in range(len(hs)):
        for j in range(i + 1, len(hs)):
            p = _intersect(hs[i], hs[j])
            if p is not None and all(h.contains(p) for h in hs):
                pts.add(p)
    return sorted(pts)


def _recession_rays(hs: Sequence[Halfplane]) -> list[Point]:
    """Generators of the recession cone {d : lam*d1 + mu*d2 >= 0 for all}."""
    cands = {(Fraction(1), ZERO), (ZERO, Fraction(1))}
    for h in hs:
        cands.add((-h.mu, h.lam))
        cands.add((h.mu, -h.lam))
        cands.add((h.lam, h.mu))
    return [d for d in cands if all(h.lam * d[0] + h.mu * d[1] >= 0 for h in hs)]


def _implied(h: Halfplane, others: Sequence[Halfplane]) -> bool:
    if not others:
        return False
    verts = _all_vertices(others)
    if not verts:
        return False
    rays = _recession_rays(others)
    return all(h.contains(v) for v in verts) and all(h.lam * d[0] + h.mu * d[1] >= 0 for d in rays)


def vertex_enum(hs: Sequence[Halfplane]) -> Frontier:
    """Vertex chain of the lower-left boundary, with redundant halfplanes flagged."""
    hs = list(hs)
    keys = {h.key for h in hs}
    if not all(a.key in keys for a in AXES):
        raise ValueError("vertex enumeration needs M>=0 and R>=0 among the halfplanes")
    verts = _all_vertices(hs)
    if not verts:
        raise EmptyRegion("the halfplanes have no common point")
    # keep Pareto-minimal vertices: the part of the boundary facing the origin
    chain = [v for v in verts
             if not any(u != v and u[0] <= v[0] and u[1] <= v[1] for u in verts)]
    chain.sort()
    first: dict = {}
    redundant = []
    for i, h in enumerate(hs):
        if h.key in first:
            redundant.append(True)
            continue
        first[h.key] = i
        others = [g for g in hs if g.key != h.key]
        redundant.append(_implied(h, others))
    return Frontier(hs, chain, redundant)


def region(m: CachingModel | None = None, om: OrbitMap | None = None,
           weights: Iterable[Sequence] = (), builtin: str | None = None,
           use_float: bool = True) -> Frontier:
    """Axes plus swept (or built-in) halfplanes, enumerated."""
    if builtin is not None:
        if builtin != "theorem3x3":
            raise ValueError(f"unknown built-in region {builtin!r}")
        return vertex_enum(builtin_theorem_3x3())
    hs = list(AXES)
    for h in sweep(m, om, weights, use_float=use_float):
        if h.key not in {g.key for g in hs}:
            hs.append(h)
    return vertex_enum(hs)


def points_csv(points: Iterable[Point]) -> str:
    lines = ["M,R"] + [f"{grammar.format_rational(a)},{grammar.format_rational(b)}" for a, b in points]
    return "\n".join(lines) + "\n"

