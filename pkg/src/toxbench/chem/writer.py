"""Non-canonical SMILES writer used to re-root and shuffle traversals.

The writer exists so tests and fixtures can generate many different
writings of one graph; parse(write(mol)) is always isomorphic to mol.
Stereo annotations are dropped (they are ignored downstream anyway).
"""

from __future__ import annotations

import random

from .molecule import DOUBLE, SINGLE, TRIPLE, Molecule

_BOND_SYMBOL = {DOUBLE: "=", TRIPLE: "#"}


def write_smiles(mol: Molecule, rng: random.Random | None = None) -> str:
    """Render a molecule; rng (when given) shuffles roots and branch order."""
    n = len(mol.atoms)
    if n == 0:
        raise ValueError("cannot write an empty molecule")

    order_of = list(range(n))
    if rng is not None:
        rng.shuffle(order_of)

    visited = [False] * n
    fragments = []
    for root in order_of:
        if visited[root]:
            continue
        fragments.append(_write_component(mol, root, visited, rng))
    return ".".join(fragments)


def _write_component(mol: Molecule, root: int, visited: list[bool],
                     rng: random.Random | None) -> str:
    # pass 1: DFS classifying tree vs ring-closure edges; edges are decided
    # at visit time (one neighbor per step) so the classification is never stale
    children: dict[int, list[tuple[int, int]]] = {}
    closures_at: dict[int, list[int]] = {}  # atom -> bond indices closing here
    opens_at: dict[int, list[int]] = {}     # atom -> bond indices opening here
    handled_bond: set[int] = set()

    def ordered_neighbors(idx: int) -> list[tuple[int, int]]:
        nbrs = list(mol.neighbors(idx))
        if rng is not None:
            rng.shuffle(nbrs)
        return nbrs

    visited[root] = True
    children[root] = []
    frames: list[tuple[int, list[tuple[int, int]], list[int]]] = [
        (root, ordered_neighbors(root), [0])
    ]
    while frames:
        atom, nbrs, pos = frames[-1]
        if pos[0] >= len(nbrs):
            frames.pop()
            continue
        nbr, bi = nbrs[pos[0]]
        pos[0] += 1
        if bi in handled_bond:
            continue
        handled_bond.add(bi)
        if visited[nbr]:
            # ring closure: nbr was visited earlier, digit opens there
            opens_at.setdefault(nbr, []).append(bi)
            closures_at.setdefault(atom, []).append(bi)
        else:
            visited[nbr] = True
            children[atom].append((nbr, bi))
            children[nbr] = []
            frames.append((nbr, ordered_neighbors(nbr), [0]))

    # pass 2: emit tokens; ring-closure digits allocated on demand
    digit_for: dict[int, int] = {}
    free_digits = list(range(1, 100))
    out: list[str] = []

    def digit_token(d: int) -> str:
        return str(d) if d < 10 else f"%{d:02d}"

    def bond_token(bi: int, explicit_single: bool) -> str:
        order = mol.bonds[bi].order
        if order in _BOND_SYMBOL:
            return _BOND_SYMBOL[order]
        if order == SINGLE and explicit_single:
            return "-"
        return ""

    def emit_atom(idx: int) -> None:
        out.append(_atom_token(mol, idx))
        for bi in opens_at.get(idx, ()):
            d = free_digits.pop(0)
            digit_for[bi] = d
            other = mol.bonds[bi].other(idx)
            both_aromatic = mol.atoms[idx].aromatic and mol.atoms[other].aromatic
            out.append(bond_token(bi, explicit_single=both_aromatic))
            out.append(digit_token(d))
        for bi in closures_at.get(idx, ()):
            d = digit_for.pop(bi)
            free_digits.insert(0, d)
            free_digits.sort()
            other = mol.bonds[bi].other(idx)
            both_aromatic = mol.atoms[idx].aromatic and mol.atoms[other].aromatic
            out.append(bond_token(bi, explicit_single=both_aromatic))
            out.append(digit_token(d))

    def emit_subtree(idx: int) -> None:
        work: list[tuple[str, int, int]] = [("atom", idx, -1)]
        while work:
            kind, a, bi = work.pop()
            if kind == "open":
                out.append("(")
                continue
            if kind == "close":
                out.append(")")
                continue
            if bi >= 0:
                parent = mol.bonds[bi].other(a)
                both_aromatic = mol.atoms[a].aromatic and mol.atoms[parent].aromatic
                out.append(bond_token(bi, explicit_single=both_aromatic))
            emit_atom(a)
            kids = children.get(a, [])
            if not kids:
                continue
            tail = []
            for nbr, kbi in kids[:-1]:
                tail.append(("open", -1, -1))
                tail.append(("atom", nbr, kbi))
                tail.append(("close", -1, -1))
            tail.append(("atom",) + kids[-1])
            for item in reversed(tail):
                work.append(item)

    emit_subtree(root)
    return "".join(out)


def _atom_token(mol: Molecule, idx: int) -> str:
    atom = mol.atoms[idx]
    symbol = atom.element.lower() if atom.aromatic else atom.element
    if not atom.bracket:
        return symbol
    parts = ["["]
    if atom.isotope is not None:
        parts.append(str(atom.isotope))
    parts.append(symbol)
    if atom.explicit_h == 1:
        parts.append("H")
    elif atom.explicit_h > 1:
        parts.append(f"H{atom.explicit_h}")
    q = atom.formal_charge
    if q == 1:
        parts.append("+")
    elif q == -1:
        parts.append("-")
    elif q > 1:
        parts.append(f"+{q}")
    elif q < -1:
        parts.append(f"-{-q}")
    parts.append("]")
    return "".join(parts)


def rewritings(mol: Molecule, count: int, seed: int = 0) -> list[str]:
    """Distinct-traversal renderings of one molecule (not necessarily unique)."""
    return [write_smiles(mol, random.Random(seed + k)) for k in range(count)]
