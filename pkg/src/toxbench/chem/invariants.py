"""Atom invariants and a writing-order-independent graph key."""

from __future__ import annotations

from ..hashing import hash_tuple
from .molecule import ORDER_CODE, Molecule


def initial_atom_invariants(mol: Molecule) -> list[int]:
    """Stable 64-bit seed invariant per atom.

    Hashes (element, heavy degree, total H, formal charge, in_ring,
    aromatic) — properties of the graph, never of the writing order.
    """
    return [
        hash_tuple(a.element, a.degree, a.total_h, a.formal_charge, a.in_ring, a.aromatic)
        for a in mol.atoms
    ]


def refine_invariants(mol: Molecule, ids: list[int], rounds: int) -> list[int]:
    """Morgan-style neighborhood refinement of per-atom identifiers."""
    current = list(ids)
    for r in range(1, rounds + 1):
        nxt = []
        for idx in range(len(mol.atoms)):
            env = sorted(
                (ORDER_CODE[mol.bonds[bi].order], current[nbr])
                for nbr, bi in mol.neighbors(idx)
            )
            nxt.append(hash_tuple(r, current[idx], env))
        current = nxt
    return current


def graph_key(mol: Molecule) -> int:
    """Hash equal for identical labeled graphs regardless of atom order.

    Seeds each atom with its invariant plus isotope, refines until the
    color partition stabilizes, and hashes the sorted multiset. Standard
    iterative-refinement equivalence: collisions between genuinely
    different molecules are possible in principle but not observed on
    chemical graphs of this scale.
    """
    if not mol.atoms:
        return hash_tuple(0)
    ids = [
        hash_tuple(inv, -1 if a.isotope is None else a.isotope)
        for inv, a in zip(initial_atom_invariants(mol), mol.atoms)
    ]
    seen_partitions = {tuple(sorted(ids))}
    for _ in range(len(mol.atoms)):
        ids = refine_invariants(mol, ids, 1)
        partition = tuple(sorted(ids))
        if partition in seen_partitions:
            break
        seen_partitions.add(partition)
    return hash_tuple(sorted(ids), len(mol.atoms), len(mol.bonds))


def ring_membership(mol: Molecule) -> tuple[list[bool], list[bool]]:
    """Per-atom and per-bond flags: on at least one simple cycle."""
    return [a.in_ring for a in mol.atoms], [b.in_ring for b in mol.bonds]
