"""Named, versioned model configurations.

Each preset fixes a file count, a user count and the subset of demand
tuples whose delivery messages are modeled.  Bump REGISTRY_VERSION whenever
an existing entry changes meaning.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import InvalidDemand

REGISTRY_VERSION = 1


@dataclass(frozen=True)
class Preset:
    name: str
    n_files: int
    n_users: int
    demands: tuple[tuple[int, ...], ...]
    notes: str


def _all_demands(n_files: int, n_users: int) -> tuple[tuple[int, ...], ...]:
    return tuple(product(range(n_files), repeat=n_users))


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in [
        Preset("man-table2", 3, 3, ((2, 0, 1), (2, 1, 0)),
               "N=K=3 with the two demands used by the published M+R>=2 table"),
        Preset("full-2x2", 2, 2, _all_demands(2, 2),
               "N=K=2 with every demand tuple; the exactly known two-file two-user case"),
        Preset("n3-perm3", 3, 3, ((0, 1, 2), (2, 0, 1), (2, 1, 0)),
               "N=K=3, man-table2 plus the identity demand 012"),
        Preset("n3-repeat", 3, 3, ((0, 0, 1), (2, 0, 1), (2, 1, 0)),
               "N=K=3, man-table2 plus the repeated-file demand 001"),
        Preset("n3-single", 3, 3, ((2, 1, 0),),
               "N=K=3 with a single all-distinct demand"),
        Preset("n2k3-distinct", 2, 3, ((0, 0, 1), (0, 1, 0), (1, 0, 0)),
               "N=2, K=3 with three demands each requesting file 1 once"),
    ]
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise InvalidDemand(f"unknown preset {name!r}; known presets: {known}") from None
