"""Synthetic molecule and dataset fixtures.

Real challenge data is never redistributed; these generators produce
structurally valid molecules with pattern-driven labels so every layer of
the platform can be exercised end to end. All generation is seeded and
deterministic.
"""

from __future__ import annotations

import random

from .chem import Atom, Bond, Molecule, parse_smiles, write_smiles
from .chem.molecule import AROMATIC, DOUBLE, SINGLE
from .dataset import ENDPOINTS, LabelMatrix
from .featurize.patterns import compile_pattern, count_matches

_SPARE_VALENCE = {"C": 4, "N": 3, "O": 2, "S": 2, "F": 1, "Cl": 1, "Br": 1}
_ELEMENT_POOL = ["C"] * 10 + ["N"] * 3 + ["O"] * 3 + ["S", "F", "Cl", "Br"]

# aromatic ring templates: (elements, hetero substitution allowed at index 0)
_AROMATIC_RINGS = (
    ("C", "C", "C", "C", "C", "C"),    # benzene
    ("N", "C", "C", "C", "C", "C"),    # pyridine-type
    ("O", "C", "C", "C", "C"),         # furan-type
    ("S", "C", "C", "C", "C"),         # thiophene-type
)


class _Builder:
    def __init__(self):
        self.elements: list[str] = []
        self.aromatic: list[bool] = []
        self.spare: list[int] = []
        self.bonds: list[tuple[int, int, str]] = []
        self.bonded: set[tuple[int, int]] = set()

    def add_atom(self, element: str, aromatic: bool = False, spare: int | None = None) -> int:
        self.elements.append(element)
        self.aromatic.append(aromatic)
        self.spare.append(_SPARE_VALENCE[element] if spare is None else spare)
        return len(self.elements) - 1

    def add_bond(self, a: int, b: int, order: str) -> None:
        cost = {SINGLE: 1, DOUBLE: 2, AROMATIC: 1}[order]
        key = (a, b) if a < b else (b, a)
        assert key not in self.bonded
        self.bonded.add(key)
        self.bonds.append((a, b, order))
        self.spare[a] -= cost
        self.spare[b] -= cost

    def to_molecule(self) -> Molecule:
        atoms = tuple(
            Atom(element=e, aromatic=ar) for e, ar in zip(self.elements, self.aromatic)
        )
        bonds = tuple(Bond(a=a, b=b, order=o) for a, b, o in self.bonds)
        return Molecule(atoms=atoms, bonds=bonds, source="")


def random_molecule(rng: random.Random, min_atoms: int = 4, max_atoms: int = 14) -> Molecule:
    """A random valid molecule, returned freshly parsed from its SMILES."""
    builder = _Builder()
    target = rng.randint(min_atoms, max_atoms)

    if rng.random() < 0.45:
        _attach_aromatic_ring(builder, rng, anchor=None)
    else:
        builder.add_atom(rng.choice(_ELEMENT_POOL))

    guard = 0
    while len(builder.elements) < target and guard < 200:
        guard += 1
        open_atoms = [i for i, s in enumerate(builder.spare) if s >= 1]
        if not open_atoms:
            break
        anchor = rng.choice(open_atoms)
        roll = rng.random()
        if roll < 0.08 and builder.spare[anchor] >= 1 \
                and len(builder.elements) + 6 <= max_atoms + 2:
            _attach_aromatic_ring(builder, rng, anchor=anchor)
        elif roll < 0.16:
            _close_ring(builder, rng)
        else:
            element = rng.choice(_ELEMENT_POOL)
            order = SINGLE
            if (rng.random() < 0.18 and builder.spare[anchor] >= 2
                    and _SPARE_VALENCE[element] >= 2 and not builder.aromatic[anchor]):
                order = DOUBLE
            new = builder.add_atom(element)
            builder.add_bond(anchor, new, order)

    smiles = write_smiles(builder.to_molecule())
    return parse_smiles(smiles)


def _attach_aromatic_ring(builder: _Builder, rng: random.Random, anchor: int | None) -> None:
    template = rng.choice(_AROMATIC_RINGS)
    ring = []
    for element in template:
        # the two ring bonds cost 2; carbons keep one substituent slot after that
        spare = 3 if element == "C" else 2
        ring.append(builder.add_atom(element, aromatic=True, spare=spare))
    for i in range(len(ring)):
        builder.add_bond(ring[i], ring[(i + 1) % len(ring)], AROMATIC)
    if anchor is not None and builder.spare[anchor] >= 1:
        carbons = [i for i in ring if builder.elements[i] == "C" and builder.spare[i] >= 1]
        if carbons:
            builder.add_bond(anchor, rng.choice(carbons), SINGLE)


def _close_ring(builder: _Builder, rng: random.Random) -> None:
    candidates = [i for i, s in enumerate(builder.spare) if s >= 1 and not builder.aromatic[i]]
    rng.shuffle(candidates)
    for a in candidates:
        for b in candidates:
            key = (a, b) if a < b else (b, a)
            if a != b and key not in builder.bonded and abs(a - b) >= 2:
                builder.add_bond(a, b, SINGLE)
                return


DRIVER_PATTERNS = {
    "NR-AR": "N",
    "NR-AR-LBD": "O",
    "NR-AhR": "a",
    "NR-Aromatase": "[R]",
    "NR-ER": "Nc",
    "NR-ER-LBD": "[F,Cl,Br,I]",
    "NR-PPAR-gamma": "S",
    "SR-ARE": "C=C",
    "SR-ATAD5": "[OH]",
    "SR-HSE": "[NH2]",
    "SR-MMP": "n",
    "SR-p53": "[CH3]",
}


def molecule_pool(count: int, seed: int, min_atoms: int = 4, max_atoms: int = 14) -> list[Molecule]:
    """Distinct-by-SMILES random molecules."""
    rng = random.Random(seed)
    seen = set()
    out = []
    while len(out) < count:
        mol = random_molecule(rng, min_atoms, max_atoms)
        if mol.source not in seen:
            seen.add(mol.source)
            out.append(mol)
    return out


def pattern_labels(mol: Molecule) -> list[int]:
    """Ground-truth activity per endpoint: its driver pattern matches."""
    return [
        1 if count_matches(mol, _driver(endpoint)) > 0 else 0
        for endpoint in ENDPOINTS
    ]


_DRIVER_CACHE: dict = {}


def _driver(endpoint: str):
    if endpoint not in _DRIVER_CACHE:
        _DRIVER_CACHE[endpoint] = compile_pattern(DRIVER_PATTERNS[endpoint])
    return _DRIVER_CACHE[endpoint]


def synthetic_matrix(mols: list[Molecule], seed: int, flip_rate: float = 0.0,
                     mask_rate: float = 0.0, id_prefix: str = "syn") -> LabelMatrix:
    """Pattern-driven labels with optional symmetric flip noise and masking.

    Guarantees both classes per endpoint among present cells (raises when
    a seed/pattern combination degenerates; pick a different seed).
    """
    rng = random.Random(seed)
    ids = [f"{id_prefix}-{i:05d}" for i in range(len(mols))]
    smiles = [m.source for m in mols]
    cells = []
    for mol in mols:
        row: list[int | None] = []
        for value in pattern_labels(mol):
            if flip_rate and rng.random() < flip_rate:
                value = 1 - value
            if mask_rate and rng.random() < mask_rate:
                row.append(None)
            else:
                row.append(value)
        cells.append(row)

    for j, endpoint in enumerate(ENDPOINTS):
        present = [row[j] for row in cells if row[j] is not None]
        if not present or len(set(present)) < 2:
            raise ValueError(
                f"endpoint {endpoint} degenerate under seed {seed}: "
                f"{len(present)} present, classes {sorted(set(present))}")
    return LabelMatrix.build(ids, smiles, cells)
