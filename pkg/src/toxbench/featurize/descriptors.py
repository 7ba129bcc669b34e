"""Fixed 200-slot block of graph-computable molecular descriptors.

The ordered descriptor list is the contract: names ship in
data/descriptors.tsv and unassigned slots are structurally zero. All
values are finite, deterministic functions of the molecular graph.
"""

from __future__ import annotations

import math

import numpy as np

from ..chem import Molecule, atomic_mass
from ..chem.elements import HALOGENS
from ..chem.molecule import AROMATIC, DOUBLE, SINGLE, TRIPLE
from ..chem.rings import bond_smallest_cycles, cycle_rank

DESCRIPTOR_COUNT = 200


def _shortest_path_matrix(mol: Molecule) -> list[list[int]]:
    """All-pairs BFS distances; -1 between components."""
    n = len(mol.atoms)
    dist = [[-1] * n for _ in range(n)]
    for src in range(n):
        row = dist[src]
        row[src] = 0
        queue = [src]
        qi = 0
        while qi < len(queue):
            cur = queue[qi]
            qi += 1
            for nbr, _ in mol.neighbors(cur):
                if row[nbr] < 0:
                    row[nbr] = row[cur] + 1
                    queue.append(nbr)
    return dist


class _Ctx:
    """Shared intermediate values so the registry functions stay cheap."""

    def __init__(self, mol: Molecule):
        self.mol = mol
        self.n = len(mol.atoms)
        self.dist = _shortest_path_matrix(mol)
        self.ring_sizes = [s for s in bond_smallest_cycles(self.n, [b.pair for b in mol.bonds])
                           if s > 0]
        ecc = []
        for row in self.dist:
            reachable = [d for d in row if d >= 0]
            ecc.append(max(reachable) if reachable else 0)
        self.eccentricity = ecc


def _element_count(symbol: str):
    def fn(ctx: _Ctx) -> float:
        return float(sum(1 for a in ctx.mol.atoms if a.element == symbol))
    return fn


def _order_count(order: str):
    def fn(ctx: _Ctx) -> float:
        return float(sum(1 for b in ctx.mol.bonds if b.order == order))
    return fn


def _ring_size_count(size: int, and_above: bool = False):
    """Count ring bonds whose smallest containing cycle has this size."""
    def fn(ctx: _Ctx) -> float:
        if and_above:
            return float(sum(1 for s in ctx.ring_sizes if s >= size))
        return float(sum(1 for s in ctx.ring_sizes if s == size))
    return fn


def _degree_count(degree: int, and_above: bool = False):
    def fn(ctx: _Ctx) -> float:
        if and_above:
            return float(sum(1 for a in ctx.mol.atoms if a.degree >= degree))
        return float(sum(1 for a in ctx.mol.atoms if a.degree == degree))
    return fn


def _molecular_weight(ctx: _Ctx) -> float:
    # fsum: exactly rounded, so the value never depends on atom order
    return math.fsum(
        atomic_mass(a.element) + a.total_h * atomic_mass("H") for a in ctx.mol.atoms)


def _wiener_index(ctx: _Ctx) -> float:
    total = 0
    for i in range(ctx.n):
        for j in range(i + 1, ctx.n):
            d = ctx.dist[i][j]
            if d > 0:
                total += d
    return float(total)


def _randic_index(ctx: _Ctx) -> float:
    terms = []
    for b in ctx.mol.bonds:
        du = ctx.mol.atoms[b.a].degree
        dv = ctx.mol.atoms[b.b].degree
        if du > 0 and dv > 0:
            terms.append(1.0 / math.sqrt(du * dv))
    return math.fsum(terms)


def _is_sp3_carbon(mol: Molecule, idx: int) -> bool:
    atom = mol.atoms[idx]
    if atom.element != "C" or atom.aromatic:
        return False
    return all(mol.bonds[bi].order == SINGLE for _, bi in mol.neighbors(idx))


def _rotatable_bonds(ctx: _Ctx) -> float:
    count = 0
    for b in ctx.mol.bonds:
        if b.order != SINGLE or b.in_ring:
            continue
        if ctx.mol.atoms[b.a].degree >= 2 and ctx.mol.atoms[b.b].degree >= 2:
            count += 1
    return float(count)


def _safe_mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values) if values else 0.0


def _build_registry() -> list[tuple[str, object]]:
    reg: list[tuple[str, object]] = [
        ("heavy_atom_count", lambda c: float(sum(1 for a in c.mol.atoms if a.element != "H"))),
        ("bond_count", lambda c: float(len(c.mol.bonds))),
        ("molecular_weight", _molecular_weight),
        ("total_hydrogens", lambda c: float(sum(a.total_h for a in c.mol.atoms))),
        ("mean_atomic_mass", lambda c: _safe_mean(atomic_mass(a.element) for a in c.mol.atoms)),
    ]
    for symbol in ("C", "N", "O", "S", "P", "F", "Cl", "Br", "I", "B"):
        reg.append((f"count_{symbol}", _element_count(symbol)))
    reg += [
        ("halogen_count", lambda c: float(sum(1 for a in c.mol.atoms if a.element in HALOGENS))),
        ("heteroatom_count", lambda c: float(sum(1 for a in c.mol.atoms if a.element not in ("C", "H")))),
        ("heteroatom_fraction", lambda c: _safe_mean(1.0 if a.element not in ("C", "H") else 0.0 for a in c.mol.atoms)),
        ("single_bond_count", _order_count(SINGLE)),
        ("double_bond_count", _order_count(DOUBLE)),
        ("triple_bond_count", _order_count(TRIPLE)),
        ("aromatic_bond_count", _order_count(AROMATIC)),
        ("rotatable_bond_count", _rotatable_bonds),
        ("ring_atom_count", lambda c: float(sum(1 for a in c.mol.atoms if a.in_ring))),
        ("ring_bond_count", lambda c: float(sum(1 for b in c.mol.bonds if b.in_ring))),
        ("aromatic_atom_count", lambda c: float(sum(1 for a in c.mol.atoms if a.aromatic))),
        ("aromatic_atom_fraction", lambda c: _safe_mean(1.0 if a.aromatic else 0.0 for a in c.mol.atoms)),
        ("ring_count", lambda c: float(cycle_rank(c.n, len(c.mol.bonds), c.mol.n_components))),
    ]
    for size in (3, 4, 5, 6, 7):
        reg.append((f"bonds_in_{size}_ring", _ring_size_count(size)))
    reg += [
        ("bonds_in_8plus_ring", _ring_size_count(8, and_above=True)),
        ("component_count", lambda c: float(c.mol.n_components)),
        ("formal_charge_sum", lambda c: float(sum(a.formal_charge for a in c.mol.atoms))),
        ("abs_charge_sum", lambda c: float(sum(abs(a.formal_charge) for a in c.mol.atoms))),
        ("positive_atom_count", lambda c: float(sum(1 for a in c.mol.atoms if a.formal_charge > 0))),
        ("negative_atom_count", lambda c: float(sum(1 for a in c.mol.atoms if a.formal_charge < 0))),
        ("hbond_donor_count", lambda c: float(sum(1 for a in c.mol.atoms if a.element in ("N", "O") and a.total_h >= 1))),
        ("hbond_acceptor_count", lambda c: float(sum(1 for a in c.mol.atoms if a.element in ("N", "O")))),
        ("degree_1_count", _degree_count(1)),
        ("degree_2_count", _degree_count(2)),
        ("degree_3_count", _degree_count(3)),
        ("degree_4plus_count", _degree_count(4, and_above=True)),
        ("mean_degree", lambda c: _safe_mean(a.degree for a in c.mol.atoms)),
        ("max_degree", lambda c: float(max((a.degree for a in c.mol.atoms), default=0))),
        ("zagreb_index", lambda c: float(sum(a.degree ** 2 for a in c.mol.atoms))),
        ("randic_index", _randic_index),
        ("wiener_index", _wiener_index),
        ("graph_diameter", lambda c: float(max(c.eccentricity, default=0))),
        ("graph_radius", lambda c: float(min(c.eccentricity, default=0))),
        ("mean_eccentricity", lambda c: _safe_mean(c.eccentricity)),
        ("sp3_carbon_count", lambda c: float(sum(1 for i in range(c.n) if _is_sp3_carbon(c.mol, i)))),
        ("sp3_carbon_fraction", lambda c: _safe_mean(1.0 if _is_sp3_carbon(c.mol, i) else 0.0
                                                     for i in range(c.n) if c.mol.atoms[i].element == "C")),
        ("isotope_atom_count", lambda c: float(sum(1 for a in c.mol.atoms if a.isotope is not None))),
        ("hetero_ring_atom_count", lambda c: float(sum(1 for a in c.mol.atoms if a.in_ring and a.element != "C"))),
        ("bracket_atom_count", lambda c: float(sum(1 for a in c.mol.atoms if a.bracket))),
        ("explicit_h_total", lambda c: float(sum(a.explicit_h for a in c.mol.atoms))),
        ("implicit_h_total", lambda c: float(sum(a.implicit_h for a in c.mol.atoms))),
        ("terminal_atom_count", _degree_count(1)),
        ("branching_atom_count", _degree_count(3, and_above=True)),
    ]
    while len(reg) < DESCRIPTOR_COUNT:
        reg.append((f"reserved_{len(reg)}", lambda c: 0.0))
    assert len(reg) == DESCRIPTOR_COUNT
    return reg


_REGISTRY = _build_registry()

DESCRIPTOR_NAMES = tuple(name for name, _ in _REGISTRY)


def descriptors(mol: Molecule) -> np.ndarray:
    """Evaluate the full 200-descriptor block for one molecule."""
    ctx = _Ctx(mol)
    out = np.empty(DESCRIPTOR_COUNT, dtype=np.float64)
    for i, (_, fn) in enumerate(_REGISTRY):
        out[i] = fn(ctx)
    return out


def descriptor_index(name: str) -> int:
    return DESCRIPTOR_NAMES.index(name)
