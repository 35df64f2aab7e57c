"""Exact LP outer bounds for coded caching, with checkable certificates."""

from . import caching_model, certificates, entropy_space, lp_exact, symmetry  # noqa: F401
from .caching_model import CachingModel, build_model
from .certificates import Certificate
from .entropy_space import VariableUniverse, VarSet, build_universe
from .lp_exact import Refutation, prove_inequality
from .symmetry import UserPermutation, make_orbit_map, symmetric_code_map
from .verifier import Verdict, verify_document

__version__ = "0.1.0"

__all__ = [
    "CachingModel", "Certificate", "Refutation", "UserPermutation", "VarSet",
    "Verdict", "VariableUniverse", "build_model", "build_universe",
    "make_orbit_map", "prove_inequality", "symmetric_code_map", "verify_document",
]
