"""SMILES parser producing validated molecular graphs.

Supported notation: the organic subset, bracket atoms (isotope, charge,
explicit H, chirality, atom class), branches, ring closures including
two-digit %nn, dot disconnection, and lowercase aromatic symbols.
Stereo markers (/ \\ @ @@) are recorded on the graph and ignored by all
downstream featurization. Aromaticity is trusted as written; there is no
kekulization and no aromaticity perception.

Parsing is total: any byte string yields either a Molecule or a
ParseError, never an unhandled exception.
"""

from __future__ import annotations

from .elements import AROMATIC_BARE, AROMATIC_BRACKET, DEFAULT_VALENCES
from .molecule import (
    AROMATIC,
    DOUBLE,
    ORDER_VALENCE,
    SINGLE,
    TRIPLE,
    Atom,
    Bond,
    Molecule,
    ParseError,
)
from .rings import ring_flags

_BOND_CHARS = {"-": SINGLE, "=": DOUBLE, "#": TRIPLE, ":": AROMATIC, "/": SINGLE, "\\": SINGLE}

_TWO_LETTER_BARE = ("Cl", "Br")
_ONE_LETTER_BARE = ("B", "C", "N", "O", "P", "S", "F", "I")

_MAX_CHARGE = 15


class _AtomDraft:
    """Mutable atom record while the graph is under construction."""

    __slots__ = ("element", "aromatic", "charge", "explicit_h", "isotope",
                 "bracket", "stereo", "position", "bond_orders")

    def __init__(self, element, aromatic, position, charge=0, explicit_h=0,
                 isotope=None, bracket=False, stereo=None):
        self.element = element
        self.aromatic = aromatic
        self.charge = charge
        self.explicit_h = explicit_h
        self.isotope = isotope
        self.bracket = bracket
        self.stereo = stereo
        self.position = position
        self.bond_orders: list[str] = []


def parse_smiles(text: str) -> Molecule:
    """Parse one SMILES string into a Molecule.

    Raises ParseError (with kind, position, message) on any malformed,
    unknown, or valence-violating input.
    """
    if not isinstance(text, str):
        raise ParseError("bad_token", 0, "input must be a string")
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty_input", 0, "empty SMILES")
    offset = text.index(stripped[0])

    atoms: list[_AtomDraft] = []
    bond_list: list[tuple[int, int, str, str | None]] = []
    bonded_pairs: set[tuple[int, int]] = set()

    prev: int | None = None
    pending: tuple[str, str | None, int] | None = None  # (order, stereo, position)
    branch_stack: list[tuple[int, int, int]] = []  # (prev atom, '(' position, atom count)
    ring_open: dict[int, tuple[int, tuple[str, str | None, int] | None, int]] = {}
    dangling_dot_pos: int | None = None

    def add_bond(a: int, b: int, order: str, stereo: str | None, pos: int) -> None:
        if a == b:
            raise ParseError("bad_token", pos, "ring closure bonds an atom to itself")
        key = (a, b) if a < b else (b, a)
        if key in bonded_pairs:
            raise ParseError("bad_token", pos, f"duplicate bond between atoms {a} and {b}")
        if order == AROMATIC and not (atoms[a].aromatic and atoms[b].aromatic):
            raise ParseError("bad_token", pos, "aromatic bond between non-aromatic atoms")
        bonded_pairs.add(key)
        bond_list.append((a, b, order, stereo))
        atoms[a].bond_orders.append(order)
        atoms[b].bond_orders.append(order)

    def attach(draft: _AtomDraft, pos: int) -> None:
        nonlocal prev, pending, dangling_dot_pos
        atoms.append(draft)
        idx = len(atoms) - 1
        if prev is not None:
            if pending is not None:
                order, stereo, _ = pending
            else:
                order = AROMATIC if (atoms[prev].aromatic and draft.aromatic) else SINGLE
                stereo = None
            add_bond(prev, idx, order, stereo, pos)
        prev = idx
        pending = None
        dangling_dot_pos = None

    i = 0
    n = len(stripped)
    while i < n:
        c = stripped[i]
        here = offset + i

        if c == "(":
            if prev is None:
                raise ParseError("bad_token", here, "branch opened before any atom")
            if pending is not None:
                raise ParseError("bad_token", pending[2], "bond symbol before '('")
            branch_stack.append((prev, here, len(atoms)))
            i += 1

        elif c == ")":
            if not branch_stack:
                raise ParseError("unbalanced_parenthesis", here, "unmatched ')'")
            if pending is not None:
                raise ParseError("bad_token", pending[2], "dangling bond symbol before ')'")
            opened_prev, opened_pos, count_at_open = branch_stack.pop()
            if len(atoms) == count_at_open:
                raise ParseError("bad_token", here, "empty branch")
            prev = opened_prev
            i += 1

        elif c == ".":
            if branch_stack:
                raise ParseError("bad_token", here, "dot disconnection inside a branch")
            if pending is not None:
                raise ParseError("bad_token", pending[2], "bond symbol before '.'")
            if prev is None:
                raise ParseError("bad_token", here, "dot without a preceding component")
            prev = None
            dangling_dot_pos = here
            i += 1

        elif c in _BOND_CHARS:
            if pending is not None:
                raise ParseError("bad_token", here, "two bond symbols in a row")
            if prev is None:
                raise ParseError("bad_token", here, "bond symbol before any atom")
            stereo = c if c in ("/", "\\") else None
            pending = (_BOND_CHARS[c], stereo, here)
            i += 1

        elif c.isdigit() or c == "%":
            if prev is None:
                raise ParseError("bad_token", here, "ring closure before any atom")
            if c == "%":
                if i + 2 >= n or not (stripped[i + 1].isdigit() and stripped[i + 2].isdigit()):
                    raise ParseError("bad_token", here, "'%' must be followed by two digits")
                num = int(stripped[i + 1:i + 3])
                i += 3
            else:
                num = int(c)
                i += 1
            if num in ring_open:
                open_atom, open_pending, open_pos = ring_open.pop(num)
                order, stereo = _resolve_ring_bond(
                    atoms, open_atom, prev, open_pending, pending, here)
                add_bond(open_atom, prev, order, stereo, here)
            else:
                ring_open[num] = (prev, pending, here)
            pending = None

        elif c == "[":
            end = stripped.find("]", i + 1)
            if end < 0:
                raise ParseError("bad_token", here, "unclosed bracket atom")
            draft = _parse_bracket(stripped[i + 1:end], here + 1)
            attach(draft, here)
            i = end + 1

        elif c.isupper():
            two = stripped[i:i + 2]
            if two in _TWO_LETTER_BARE:
                attach(_AtomDraft(two, False, here), here)
                i += 2
            elif c in _ONE_LETTER_BARE:
                attach(_AtomDraft(c, False, here), here)
                i += 1
            else:
                raise ParseError("bad_token", here,
                                 f"unknown element {two!r} outside brackets"
                                 if two[1:].islower() and len(two) == 2
                                 else f"unknown element {c!r} outside brackets")

        elif c.islower():
            if c in AROMATIC_BARE:
                attach(_AtomDraft(c.upper(), True, here), here)
                i += 1
            else:
                raise ParseError("bad_token", here, f"unknown aromatic symbol {c!r}")

        else:
            raise ParseError("bad_token", here, f"unexpected character {c!r}")

    if branch_stack:
        raise ParseError("unbalanced_parenthesis", branch_stack[-1][1], "unclosed '('")
    if pending is not None:
        raise ParseError("bad_token", pending[2], "dangling bond symbol at end of input")
    if ring_open:
        num, (_, _, pos) = min(ring_open.items(), key=lambda kv: kv[1][2])
        raise ParseError("unclosed_ring_bond", pos, f"ring bond {num} never closed")
    if dangling_dot_pos is not None:
        raise ParseError("bad_token", dangling_dot_pos, "trailing dot")

    return _finalize(atoms, bond_list, text)


def _resolve_ring_bond(atoms, a, b, open_pending, close_pending, pos):
    """Merge bond annotations given at ring opening and closing."""
    open_order = open_pending[0] if open_pending else None
    close_order = close_pending[0] if close_pending else None
    if open_order and close_order and open_order != close_order:
        raise ParseError("bad_token", pos, "conflicting ring closure bond orders")
    order = open_order or close_order
    if order is None:
        order = AROMATIC if (atoms[a].aromatic and atoms[b].aromatic) else SINGLE
    stereo = None
    for p in (open_pending, close_pending):
        if p and p[1]:
            stereo = p[1]
    return order, stereo


def _parse_bracket(content: str, start: int) -> _AtomDraft:
    """Parse the inside of a bracket atom: isotope? symbol chiral? H? charge? class?"""
    if not content:
        raise ParseError("unknown_element", start, "empty bracket atom")
    i = 0
    n = len(content)

    isotope = None
    if i < n and content[i].isdigit():
        j = i
        while j < n and content[j].isdigit():
            j += 1
        isotope = int(content[i:j])
        i = j

    aromatic = False
    element = None
    if i < n and content[i] == "*":
        element = "*"
        i += 1
    elif i < n and content[i].islower():
        two = content[i:i + 2]
        if two in AROMATIC_BRACKET:
            element, aromatic, i = two.capitalize(), True, i + 2
        elif content[i] in AROMATIC_BRACKET:
            element, aromatic, i = content[i].upper(), True, i + 1
        else:
            raise ParseError("unknown_element", start + i,
                             f"unknown aromatic symbol {content[i]!r} in bracket")
    elif i < n and content[i].isupper():
        if i + 1 < n and content[i + 1].islower():
            element = content[i:i + 2]
            i += 2
        else:
            element = content[i]
            i += 1
    else:
        raise ParseError("unknown_element", start + i, "bracket atom missing element symbol")

    stereo = None
    if i < n and content[i] == "@":
        if i + 1 < n and content[i + 1] == "@":
            stereo = "@@"
            i += 2
        else:
            stereo = "@"
            i += 1

    explicit_h = 0
    if i < n and content[i] == "H":
        i += 1
        j = i
        while j < n and content[j].isdigit():
            j += 1
        explicit_h = int(content[i:j]) if j > i else 1
        i = j

    charge = 0
    if i < n and content[i] in "+-":
        sign = 1 if content[i] == "+" else -1
        symbol = content[i]
        i += 1
        if i < n and content[i].isdigit():
            j = i
            while j < n and content[j].isdigit():
                j += 1
            charge = sign * int(content[i:j])
            i = j
        else:
            count = 1
            while i < n and content[i] == symbol:
                count += 1
                i += 1
            charge = sign * count
        if i < n and content[i] in "+-":
            raise ParseError("bad_charge", start + i, "mixed charge symbols")
        if abs(charge) > _MAX_CHARGE:
            raise ParseError("bad_charge", start + i - 1, f"charge magnitude {abs(charge)} too large")

    if i < n and content[i] == ":":
        j = i + 1
        if j >= n or not content[j].isdigit():
            raise ParseError("bad_token", start + i, "atom class ':' needs digits")
        while j < n and content[j].isdigit():
            j += 1
        i = j  # atom class parsed and discarded

    if i != n:
        raise ParseError("bad_token", start + i, f"unexpected {content[i]!r} in bracket atom")

    return _AtomDraft(element, aromatic, start, charge=charge, explicit_h=explicit_h,
                      isotope=isotope, bracket=True, stereo=stereo)


def _assign_hydrogens(draft: _AtomDraft) -> int:
    """Implicit hydrogen count for one atom; raises on valence violations.

    Bare atoms fill up to the smallest allowed valence; aromatic atoms
    reserve one extra unit per aromatic bond pair (floored at zero so
    lone-pair aromatics like furan oxygen stay legal). Bracket atoms get
    no implicit hydrogens and are checked against the maximum allowed
    valence shifted by formal charge; unknown elements skip the check.
    """
    orders = draft.bond_orders
    base = sum(ORDER_VALENCE[o] for o in orders)
    arom_pairs = sum(1 for o in orders if o == AROMATIC) // 2

    if draft.bracket:
        valences = DEFAULT_VALENCES.get(draft.element)
        if valences is not None:
            allowed_max = max(v + draft.charge for v in valences)
            if allowed_max < 0:
                allowed_max = 0
            if base + draft.explicit_h > allowed_max:
                raise ParseError(
                    "valence_violation", draft.position,
                    f"{draft.element} with charge {draft.charge:+d} holds "
                    f"{base + draft.explicit_h} bonds+H, allowed at most {allowed_max}")
        return 0

    valences = DEFAULT_VALENCES[draft.element]
    fill = next((v for v in valences if v >= base), None)
    if fill is None:
        raise ParseError(
            "valence_violation", draft.position,
            f"{draft.element} has bond order sum {base}, allowed {max(valences)}")
    if draft.aromatic:
        return max(0, fill - base - arom_pairs)
    return fill - base


def _finalize(drafts: list[_AtomDraft], bond_list, source: str) -> Molecule:
    pairs = [(a, b) for a, b, _, _ in bond_list]
    atom_cyclic, bond_cyclic = ring_flags(len(drafts), pairs)

    # degree counts heavy-atom neighbors only (explicit [H] nodes excluded)
    degree = [0] * len(drafts)
    for a, b, _, _ in bond_list:
        if drafts[b].element != "H":
            degree[a] += 1
        if drafts[a].element != "H":
            degree[b] += 1

    atoms = []
    for idx, draft in enumerate(drafts):
        atoms.append(Atom(
            element=draft.element,
            aromatic=draft.aromatic,
            formal_charge=draft.charge,
            explicit_h=draft.explicit_h,
            implicit_h=_assign_hydrogens(draft),
            in_ring=atom_cyclic[idx],
            degree=degree[idx],
            isotope=draft.isotope,
            bracket=draft.bracket,
            stereo=draft.stereo,
        ))
    bonds = tuple(
        Bond(a=a, b=b, order=order, in_ring=bond_cyclic[bi], stereo=stereo)
        for bi, (a, b, order, stereo) in enumerate(bond_list)
    )
    return Molecule(atoms=tuple(atoms), bonds=bonds, source=source)
