"""Lattice block chains: folding, key-lock copying, and kinematics."""

__version__ = "0.1.0"

from .mdl import Chain, Token, parse_mdl, write_canonical  # noqa: F401
from .folding import FoldedStructure, fold  # noqa: F401
