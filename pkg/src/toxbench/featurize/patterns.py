"""Subgraph pattern grammar and matcher for structural keys.

The pattern language is a small SMARTS-like notation:

  atoms   C N O ... (element, non-aromatic)   c n o s p b (element, aromatic)
          *                                    any atom
          [...]  bracket expression: primitives AND-ed by juxtaposition or
                 ';', OR-ed by ','; '!' negates one primitive.
                 primitives: element symbol, 'a' aromatic, 'A' aliphatic,
                 'R' ring member, 'Hn' total hydrogen count, 'Dn' heavy
                 degree, '+n'/'-n' formal charge, '*' any.
  bonds   -  =  #  :  ~ (any)  @ (ring bond); default matches single or
          aromatic.
  shape   branches with parentheses, ring closures with digits and %nn.

A match is an injective mapping of pattern atoms onto molecule atoms under
which every pattern bond lands on a molecule bond satisfying its
predicate; matches are counted once per distinct set of molecule atoms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..chem import Molecule
from ..chem.molecule import AROMATIC, DOUBLE, SINGLE, TRIPLE, Atom


class PatternCompileError(ValueError):
    """Malformed pattern expression (a configuration defect, not a data error)."""

    def __init__(self, expression: str, position: int, message: str):
        super().__init__(f"{message} at {position} in pattern {expression!r}")
        self.expression = expression
        self.position = position


def _eval_primitive(atom: Atom, negated: bool, kind: str, value) -> bool:
    if kind == "any":
        got = True
    elif kind == "element":
        element, aromatic = value
        got = atom.element == element and (aromatic is None or atom.aromatic == aromatic)
    elif kind == "aromatic":
        got = atom.aromatic
    elif kind == "aliphatic":
        got = not atom.aromatic
    elif kind == "ring":
        got = atom.in_ring
    elif kind == "charge":
        got = atom.formal_charge == value
    elif kind == "hcount":
        got = atom.total_h == value
    elif kind == "degree":
        got = atom.degree == value
    elif kind == "conj":
        got = all(_eval_primitive(atom, n, k, v) for n, k, v in value)
    else:  # pragma: no cover - compiler emits only the kinds above
        raise AssertionError(kind)
    return got != negated


@dataclass(frozen=True)
class AtomPredicate:
    """AND of OR-groups of primitives (SMARTS-like precedence)."""

    groups: tuple[tuple[tuple[bool, str, object], ...], ...]

    def matches(self, atom: Atom) -> bool:
        return all(
            any(_eval_primitive(atom, neg, kind, value) for neg, kind, value in group)
            for group in self.groups
        )


@dataclass(frozen=True)
class BondPredicate:
    kind: str  # 'default' | 'order' | 'any' | 'ring'
    order: str | None = None

    def matches(self, bond_order: str, bond_in_ring: bool) -> bool:
        if self.kind == "any":
            return True
        if self.kind == "ring":
            return bond_in_ring
        if self.kind == "order":
            return bond_order == self.order
        return bond_order in (SINGLE, AROMATIC)  # default


@dataclass(frozen=True)
class PatternGraph:
    expression: str
    atoms: tuple[AtomPredicate, ...]
    bonds: tuple[tuple[int, int, BondPredicate], ...]

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)


_BOND_TOKENS = {
    "-": BondPredicate("order", SINGLE),
    "=": BondPredicate("order", DOUBLE),
    "#": BondPredicate("order", TRIPLE),
    ":": BondPredicate("order", AROMATIC),
    "~": BondPredicate("any"),
    "@": BondPredicate("ring"),
}

_BARE_AROMATIC = "bcnops"
_BARE_TWO_LETTER = ("Cl", "Br")
_BARE_ONE_LETTER = "BCNOPSFI"


def compile_pattern(expression: str) -> PatternGraph:
    """Compile a pattern expression into a matchable graph."""
    text = expression.strip()
    if not text:
        raise PatternCompileError(expression, 0, "empty pattern")

    atoms: list[AtomPredicate] = []
    bonds: list[tuple[int, int, BondPredicate]] = []
    prev: int | None = None
    pending: BondPredicate | None = None
    branch_stack: list[int] = []
    ring_open: dict[int, tuple[int, BondPredicate | None]] = {}

    def attach(pred: AtomPredicate) -> None:
        nonlocal prev, pending
        atoms.append(pred)
        idx = len(atoms) - 1
        if prev is not None:
            bonds.append((prev, idx, pending or BondPredicate("default")))
        prev = idx
        pending = None

    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "(":
            if prev is None:
                raise PatternCompileError(expression, i, "branch before any atom")
            branch_stack.append(prev)
            i += 1
        elif c == ")":
            if not branch_stack:
                raise PatternCompileError(expression, i, "unmatched ')'")
            prev = branch_stack.pop()
            i += 1
        elif c in _BOND_TOKENS:
            if pending is not None or prev is None:
                raise PatternCompileError(expression, i, "misplaced bond token")
            pending = _BOND_TOKENS[c]
            i += 1
        elif c.isdigit() or c == "%":
            if prev is None:
                raise PatternCompileError(expression, i, "ring closure before any atom")
            if c == "%":
                if i + 2 >= n or not text[i + 1:i + 3].isdigit():
                    raise PatternCompileError(expression, i, "'%' needs two digits")
                num = int(text[i + 1:i + 3])
                i += 3
            else:
                num = int(c)
                i += 1
            if num in ring_open:
                other, open_bond = ring_open.pop(num)
                if other == prev:
                    raise PatternCompileError(expression, i, "ring closure to same atom")
                bond = pending or open_bond or BondPredicate("default")
                bonds.append((other, prev, bond))
            else:
                ring_open[num] = (prev, pending)
            pending = None
        elif c == "[":
            end = text.find("]", i + 1)
            if end < 0:
                raise PatternCompileError(expression, i, "unclosed '['")
            attach(_compile_bracket(expression, text[i + 1:end], i + 1))
            i = end + 1
        elif c == "*":
            attach(AtomPredicate((((False, "any", None),),)))
            i += 1
        elif c == "a":
            attach(AtomPredicate((((False, "aromatic", None),),)))
            i += 1
        elif c == "A":
            attach(AtomPredicate((((False, "aliphatic", None),),)))
            i += 1
        elif text[i:i + 2] in _BARE_TWO_LETTER:
            attach(AtomPredicate((((False, "element", (text[i:i + 2], False)),),)))
            i += 2
        elif c in _BARE_ONE_LETTER:
            attach(AtomPredicate((((False, "element", (c, False)),),)))
            i += 1
        elif c in _BARE_AROMATIC:
            attach(AtomPredicate((((False, "element", (c.upper(), True)),),)))
            i += 1
        else:
            raise PatternCompileError(expression, i, f"unexpected character {c!r}")

    if branch_stack:
        raise PatternCompileError(expression, n, "unclosed '('")
    if ring_open:
        raise PatternCompileError(expression, n, "unclosed ring bond")
    if pending is not None:
        raise PatternCompileError(expression, n, "dangling bond token")
    if not atoms:
        raise PatternCompileError(expression, 0, "pattern has no atoms")
    return PatternGraph(expression, tuple(atoms), tuple(bonds))


def _compile_bracket(expression: str, content: str, start: int) -> AtomPredicate:
    if not content:
        raise PatternCompileError(expression, start, "empty bracket")
    groups = []
    for part in content.split(";"):
        group = []
        for alt in part.split(","):
            group.extend(_compile_primitives(expression, alt, start))
        if not group:
            raise PatternCompileError(expression, start, "empty primitive group")
        groups.append(tuple(group))
    return AtomPredicate(tuple(groups))


def _compile_primitives(expression: str, text: str, start: int):
    """One ','-alternative: juxtaposed primitives AND-ed together.

    SMARTS treats juxtaposition as high-precedence AND; to keep the
    matcher simple each alternative compiles to primitives that must all
    hold, implemented by returning a single conjunction primitive when
    needed.
    """
    prims = []
    i = 0
    n = len(text)
    while i < n:
        negated = False
        if text[i] == "!":
            negated = True
            i += 1
            if i >= n:
                raise PatternCompileError(expression, start + i, "dangling '!'")
        c = text[i]
        if c == "*":
            prims.append((negated, "any", None))
            i += 1
        elif c == "a":
            prims.append((negated, "aromatic", None))
            i += 1
        elif c == "A":
            prims.append((negated, "aliphatic", None))
            i += 1
        elif c == "R":
            i += 1
            if i < n and text[i] == "0":  # R0 = not in ring
                prims.append((not negated, "ring", None))
                i += 1
            else:
                prims.append((negated, "ring", None))
        elif c == "H":
            i += 1
            count, i = _read_int(text, i, default=1)
            prims.append((negated, "hcount", count))
        elif c == "D":
            i += 1
            count, i = _read_int(text, i, default=1)
            prims.append((negated, "degree", count))
        elif c in "+-":
            sign = 1 if c == "+" else -1
            i += 1
            count, i = _read_int(text, i, default=1)
            prims.append((negated, "charge", sign * count))
        elif c.isupper():
            if text[i:i + 2] in _BARE_TWO_LETTER:
                prims.append((negated, "element", (text[i:i + 2], None)))
                i += 2
            else:
                prims.append((negated, "element", (c, None)))
                i += 1
        elif c.islower():
            two = text[i:i + 2]
            if two in ("se", "as", "te", "si"):
                prims.append((negated, "element", (two.capitalize(), True)))
                i += 2
            else:
                prims.append((negated, "element", (c.upper(), True)))
                i += 1
        else:
            raise PatternCompileError(expression, start + i, f"unknown primitive {c!r}")
    if len(prims) == 1:
        return prims
    # juxtaposed primitives form one conjunction alternative
    return [(False, "conj", tuple(prims))]


def _read_int(text: str, i: int, default: int) -> tuple[int, int]:
    j = i
    while j < len(text) and text[j].isdigit():
        j += 1
    return (int(text[i:j]) if j > i else default), j


def count_matches(mol: Molecule, pattern: PatternGraph) -> int:
    """Distinct match count (unique molecule-atom sets) for one pattern."""
    return len(find_matches(mol, pattern))


def find_matches(mol: Molecule, pattern: PatternGraph) -> set[frozenset[int]]:
    """All distinct matched atom sets, via adjacency-guided backtracking."""
    k = pattern.n_atoms
    if k > len(mol.atoms):
        return set()

    # neighbor lists of the pattern graph
    p_adj: list[list[tuple[int, BondPredicate]]] = [[] for _ in range(k)]
    for a, b, pred in pattern.bonds:
        p_adj[a].append((b, pred))
        p_adj[b].append((a, pred))

    # search order: each atom after the first connects to a placed one when possible
    order: list[int] = []
    placed = [False] * k
    for start in range(k):
        if placed[start]:
            continue
        queue = [start]
        placed[start] = True
        while queue:
            cur = queue.pop(0)
            order.append(cur)
            for nbr, _ in p_adj[cur]:
                if not placed[nbr]:
                    placed[nbr] = True
                    queue.append(nbr)

    found: set[frozenset[int]] = set()
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def candidates(p_atom: int):
        anchors = [(nbr, pred) for nbr, pred in p_adj[p_atom] if nbr in mapping]
        if not anchors:
            return range(len(mol.atoms))
        anchor, _ = anchors[0]
        return [nbr for nbr, _ in mol.neighbors(mapping[anchor])]

    def consistent(p_atom: int, m_atom: int) -> bool:
        if m_atom in used or not pattern.atoms[p_atom].matches(mol.atoms[m_atom]):
            return False
        for nbr, pred in p_adj[p_atom]:
            if nbr not in mapping:
                continue
            bond = mol.bond_between(m_atom, mapping[nbr])
            if bond is None or not pred.matches(bond.order, bond.in_ring):
                return False
        return True

    def extend(pos: int) -> None:
        if pos == k:
            found.add(frozenset(mapping.values()))
            return
        p_atom = order[pos]
        for m_atom in candidates(p_atom):
            if consistent(p_atom, m_atom):
                mapping[p_atom] = m_atom
                used.add(m_atom)
                extend(pos + 1)
                used.discard(m_atom)
                del mapping[p_atom]

    extend(0)
    return found


@dataclass(frozen=True)
class PatternSet:
    """Ordered, fixed-arity collection of compiled patterns.

    Output positions without a defined pattern are structurally zero.
    """

    name: str
    arity: int
    binary: bool
    entries: tuple[tuple[int, PatternGraph, str], ...]  # (position, pattern, label)
    content_hash: str = ""

    def __post_init__(self):
        if len(self.entries) > self.arity:
            raise ValueError("more patterns than output positions")
        for pos, _, _ in self.entries:
            if not 0 <= pos < self.arity:
                raise ValueError(f"pattern position {pos} outside arity {self.arity}")


def match_patterns(mol: Molecule, pattern_set: PatternSet) -> np.ndarray:
    """Match every pattern of a set; counts (or 0/1 for binary sets)."""
    out = np.zeros(pattern_set.arity, dtype=np.float64)
    for pos, graph, _ in pattern_set.entries:
        hits = count_matches(mol, graph)
        out[pos] = min(hits, 1) if pattern_set.binary else hits
    return out
