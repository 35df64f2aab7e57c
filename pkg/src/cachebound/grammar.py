"""Textual grammar for variable and term names plus rational halfplane syntax.

This is the only code shared between the prover and the independent
certificate verifier, so it is kept free of any dependency on the rest of
the package.

Variable names::

    W<i>        file i
    Z<k>        cache content of user k
    X<d0d1..>   delivery message for demand tuple (d0, d1, ...)

A term is ``H(`` + comma-joined names in canonical order + ``)``; the unit
file size constant is ``F`` and the two rate variables are ``M`` and ``R``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd

from .errors import ParseError

CONSTANT = "F"
MEMORY = "M"
RATE = "R"

MAX_FILES_FOR_NAMES = 10

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")
_VAR_RE = re.compile(r"^(W|Z)(\d+)$|^X(\d+)$")
_TERM_RE = re.compile(r"^H\(([^()]*)\)$")


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    if not isinstance(text, str):
        raise ParseError(f"rational must be a string, got {type(text).__name__}")
    m = _RATIONAL_RE.match(text.strip())
    if not m:
        raise ParseError(f"not a rational in p/q form: {text!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator: {text!r}")
    return Fraction(int(m.group(1)), den)


def file_name(i: int) -> str:
    return f"W{i}"


def cache_name(k: int) -> str:
    return f"Z{k}"


def delivery_name(demand) -> str:
    return "X" + "".join(str(v) for v in demand)


def demand_string(demand) -> str:
    return "".join(str(v) for v in demand)


def parse_demand(text: str) -> tuple[int, ...]:
    if not text or not text.isdigit():
        raise ParseError(f"demand must be a non-empty digit string: {text!r}")
    return tuple(int(c) for c in text)


def parse_var(name: str) -> tuple[str, object]:
    """Return ``(role, index)`` with role in {"W", "Z", "X"}.

    The index is an int for W and Z and a demand tuple for X.
    """
    m = _VAR_RE.match(name)
    if not m:
        raise ParseError(f"not a variable name: {name!r}")
    if m.group(1):
        return m.group(1), int(m.group(2))
    return "X", tuple(int(c) for c in m.group(3))


def term_name(names) -> str:
    return "H(" + ",".join(names) + ")"


def parse_term(text: str) -> list[str] | str:
    """Parse ``H(a,b,..)`` into its variable names; pass F, M, R through."""
    if text in (CONSTANT, MEMORY, RATE):
        return text
    m = _TERM_RE.match(text)
    if not m or not m.group(1):
        raise ParseError(f"not an entropy term: {text!r}")
    names = m.group(1).split(",")
    for n in names:
        parse_var(n)
    if len(set(names)) != len(names):
        raise ParseError(f"repeated variable in term: {text!r}")
    return names


_INEQ_TERM_RE = re.compile(r"([+-]?)\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?([MR])")


def parse_inequality(text: str) -> tuple[Fraction, Fraction, Fraction]:
    """Parse ``a*M+b*R>=c`` (either term optional) into ``(a, b, c)``."""
    if text.count(">=") != 1:
        raise ParseError(f"inequality must contain exactly one '>=': {text!r}")
    lhs, rhs = (s.strip() for s in text.split(">="))
    if not lhs:
        raise ParseError(f"empty left-hand side: {text!r}")
    coeffs = {MEMORY: Fraction(0), RATE: Fraction(0)}
    seen = set()
    pos = 0
    compact = lhs.replace(" ", "")
    while pos < len(compact):
        m = _INEQ_TERM_RE.match(compact, pos)
        if not m or m.start() != pos:
            raise ParseError(f"cannot parse left-hand side at {compact[pos:]!r}")
        if pos > 0 and not m.group(1):
            raise ParseError(f"missing operator before {compact[pos:]!r}")
        var = m.group(3)
        if var in seen:
            raise ParseError(f"variable {var} repeated in {text!r}")
        seen.add(var)
        value = parse_rational(m.group(2)) if m.group(2) else Fraction(1)
        coeffs[var] = -value if m.group(1) == "-" else value
        pos = m.end()
    return coeffs[MEMORY], coeffs[RATE], parse_rational(rhs)


def integer_halfplane(a, b, c) -> tuple[int, int, int]:
    """Scale ``a*M + b*R >= c`` to coprime integers (positive scale only)."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    den = 1
    for q in (a, b, c):
        den = den * q.denominator // gcd(den, q.denominator)
    ints = [int(q * den) for q in (a, b, c)]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return ints[0], ints[1], ints[2]


def format_halfplane(a, b, c) -> str:
    ia, ib, ic = integer_halfplane(a, b, c)
    return f"{ia}*M+{ib}*R>={ic}".replace("+-", "-")
