"""Folded circular count fingerprints over molecular graphs.

Identifiers come from iterative neighborhood refinement seeded with the
per-atom invariants; every (atom, radius) environment whose neighborhood
ball is still growing contributes one count to its folded bucket. Once an
atom's ball stops expanding, larger radii describe the same environment
and are not counted again (methane has exactly one environment at any
radius; every benzene atom has four).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..chem import Molecule
from ..chem.invariants import initial_atom_invariants
from ..chem.molecule import ORDER_CODE
from ..hashing import hash_tuple

DEFAULT_RADIUS = 3
DEFAULT_WIDTH = 8192


@dataclass(frozen=True)
class FingerprintConfig:
    radius: int = DEFAULT_RADIUS
    width: int = DEFAULT_WIDTH
    counted: bool = True

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("width must be >= 1")
        if not 0 <= self.radius <= 10:
            raise ValueError("radius must be in [0, 10]")


def environment_identifiers(mol: Molecule, radius: int) -> list[tuple[int, int, int]]:
    """Deduplicated (atom, radius, identifier) environments of a molecule."""
    ids = initial_atom_invariants(mol)
    n = len(mol.atoms)
    balls: list[set[int]] = [{i} for i in range(n)]
    growing = [True] * n

    out = [(a, 0, ids[a]) for a in range(n)]
    for r in range(1, radius + 1):
        if not any(growing):
            break
        nxt = []
        for a in range(n):
            env = sorted(
                (ORDER_CODE[mol.bonds[bi].order], ids[nbr])
                for nbr, bi in mol.neighbors(a)
            )
            nxt.append(hash_tuple(r, ids[a], env))
            if not growing[a]:
                continue
            expanded = set(balls[a])
            for atom in balls[a]:
                for nbr, _ in mol.neighbors(atom):
                    expanded.add(nbr)
            if expanded == balls[a]:
                growing[a] = False  # environment saturated: stop counting
            else:
                balls[a] = expanded
                out.append((a, r, nxt[a]))
        ids = nxt
    return out


def ecfp_counts(mol: Molecule, cfg: FingerprintConfig = FingerprintConfig()) -> np.ndarray:
    """Fold environment identifiers modulo cfg.width into a count vector."""
    counts = np.zeros(cfg.width, dtype=np.float64)
    for _, _, ident in environment_identifiers(mol, cfg.radius):
        counts[ident % cfg.width] += 1.0
    if not cfg.counted:
        counts = (counts > 0).astype(np.float64)
    return counts
