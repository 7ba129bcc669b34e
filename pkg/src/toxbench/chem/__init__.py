"""SMILES parsing and molecular-graph primitives."""

from .elements import ATOMIC_MASSES, DEFAULT_VALENCES, HALOGENS, ORGANIC_SUBSET, atomic_mass
from .invariants import graph_key, initial_atom_invariants, refine_invariants, ring_membership
from .molecule import (
    AROMATIC,
    DOUBLE,
    ORDER_CODE,
    PARSE_ERROR_KINDS,
    SINGLE,
    TRIPLE,
    Atom,
    Bond,
    Molecule,
    ParseError,
)
from .parser import parse_smiles
from .writer import rewritings, write_smiles

__all__ = [
    "ATOMIC_MASSES",
    "AROMATIC",
    "Atom",
    "Bond",
    "DEFAULT_VALENCES",
    "DOUBLE",
    "HALOGENS",
    "Molecule",
    "ORDER_CODE",
    "ORGANIC_SUBSET",
    "PARSE_ERROR_KINDS",
    "ParseError",
    "SINGLE",
    "TRIPLE",
    "atomic_mass",
    "graph_key",
    "initial_atom_invariants",
    "parse_smiles",
    "refine_invariants",
    "rewritings",
    "ring_membership",
    "write_smiles",
]
