"""Molecular graph types produced by the SMILES parser."""

from __future__ import annotations

from dataclasses import dataclass, field

SINGLE = "single"
DOUBLE = "double"
TRIPLE = "triple"
AROMATIC = "aromatic"

# Integer codes used when hashing bond environments.
ORDER_CODE = {SINGLE: 1, DOUBLE: 2, TRIPLE: 3, AROMATIC: 4}

# Contribution of each order to the valence sum; aromatic bonds count 1
# with the pair bonus handled separately (see parser._assign_hydrogens).
ORDER_VALENCE = {SINGLE: 1, DOUBLE: 2, TRIPLE: 3, AROMATIC: 1}

PARSE_ERROR_KINDS = (
    "unbalanced_parenthesis",
    "unclosed_ring_bond",
    "unknown_element",
    "bad_charge",
    "valence_violation",
    "empty_input",
    "bad_token",
)


class ParseError(ValueError):
    """Raised for any rejected SMILES input.

    Attributes:
        kind: one of PARSE_ERROR_KINDS.
        position: byte offset into the original input text.
        message: human-readable description.
    """

    def __init__(self, kind: str, position: int, message: str):
        assert kind in PARSE_ERROR_KINDS, kind
        super().__init__(f"{kind} at {position}: {message}")
        self.kind = kind
        self.position = position
        self.message = message


@dataclass(frozen=True)
class Atom:
    element: str
    aromatic: bool = False
    formal_charge: int = 0
    explicit_h: int = 0
    implicit_h: int = 0
    in_ring: bool = False
    degree: int = 0
    isotope: int | None = None
    bracket: bool = False
    stereo: str | None = None  # '@' / '@@', recorded but unused downstream

    @property
    def total_h(self) -> int:
        return self.explicit_h + self.implicit_h


@dataclass(frozen=True)
class Bond:
    a: int
    b: int
    order: str
    in_ring: bool = False
    stereo: str | None = None  # '/' or '\\', recorded but unused downstream

    def other(self, idx: int) -> int:
        return self.b if idx == self.a else self.a

    @property
    def pair(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


@dataclass(frozen=True)
class Molecule:
    """Immutable molecular graph. Atom order is the SMILES writing order."""

    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    source: str
    _adjacency: tuple[tuple[tuple[int, int], ...], ...] = field(repr=False, default=())

    def __post_init__(self):
        if not self._adjacency:
            adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
            for bi, bond in enumerate(self.bonds):
                adj[bond.a].append((bond.b, bi))
                adj[bond.b].append((bond.a, bi))
            object.__setattr__(self, "_adjacency", tuple(tuple(x) for x in adj))

    def __len__(self) -> int:
        return len(self.atoms)

    def neighbors(self, idx: int) -> tuple[tuple[int, int], ...]:
        """(neighbor atom index, bond index) pairs for one atom."""
        return self._adjacency[idx]

    def bond_between(self, a: int, b: int) -> Bond | None:
        for nbr, bi in self._adjacency[a]:
            if nbr == b:
                return self.bonds[bi]
        return None

    def component_labels(self) -> list[int]:
        """Connected-component id per atom, in first-seen order."""
        labels = [-1] * len(self.atoms)
        comp = 0
        for start in range(len(self.atoms)):
            if labels[start] >= 0:
                continue
            stack = [start]
            labels[start] = comp
            while stack:
                cur = stack.pop()
                for nbr, _ in self._adjacency[cur]:
                    if labels[nbr] < 0:
                        labels[nbr] = comp
                        stack.append(nbr)
            comp += 1
        return labels

    @property
    def n_components(self) -> int:
        labels = self.component_labels()
        return max(labels) + 1 if labels else 0
