"""Element tables: default valences, atomic masses, aromatic-capable symbols."""

from __future__ import annotations

# Bare (non-bracket) atoms are restricted to the organic subset.
ORGANIC_SUBSET = ("B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I")

# Lowercase symbols legal outside brackets.
AROMATIC_BARE = ("b", "c", "n", "o", "p", "s")

# Lowercase symbols legal inside brackets.
AROMATIC_BRACKET = ("b", "c", "n", "o", "p", "s", "se", "as", "te", "si")

# Default valence sets used to assign implicit hydrogens and to check
# accepted molecules. Elements absent from this table skip the check.
DEFAULT_VALENCES: dict[str, tuple[int, ...]] = {
    "H": (1,),
    "B": (3,),
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}

# Standard atomic weights, abridged. Elements not listed contribute 0.0
# to mass-based descriptors (documented fallback, not an error).
ATOMIC_MASSES: dict[str, float] = {
    "H": 1.008,
    "B": 10.811,
    "C": 12.011,
    "N": 14.007,
    "O": 15.999,
    "F": 18.998,
    "Na": 22.990,
    "Mg": 24.305,
    "Al": 26.982,
    "Si": 28.085,
    "P": 30.974,
    "S": 32.06,
    "Cl": 35.45,
    "K": 39.098,
    "Ca": 40.078,
    "Fe": 55.845,
    "Cu": 63.546,
    "Zn": 65.38,
    "As": 74.922,
    "Se": 78.971,
    "Br": 79.904,
    "Ag": 107.868,
    "Sn": 118.71,
    "Te": 127.60,
    "I": 126.904,
    "Pt": 195.084,
    "Au": 196.967,
    "Hg": 200.592,
    "Pb": 207.2,
}

HALOGENS = ("F", "Cl", "Br", "I")


def atomic_mass(element: str) -> float:
    return ATOMIC_MASSES.get(element, 0.0)
