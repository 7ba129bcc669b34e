"""Ring perception: an atom/bond is cyclic iff it lies on some simple cycle.

Equivalent to: a bond is cyclic iff it is not a bridge, and an atom is
cyclic iff it has an incident non-bridge bond. Bridges are found with an
iterative lowlink walk so pathological inputs cannot blow the stack.
"""

from __future__ import annotations


def ring_flags(n_atoms: int, bond_pairs: list[tuple[int, int]]) -> tuple[list[bool], list[bool]]:
    """Per-atom and per-bond cyclic flags for an undirected multigraph-free graph."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_atoms)]
    for bi, (a, b) in enumerate(bond_pairs):
        adj[a].append((b, bi))
        adj[b].append((a, bi))

    disc = [-1] * n_atoms
    low = [0] * n_atoms
    bond_cyclic = [False] * len(bond_pairs)
    timer = 0

    for root in range(n_atoms):
        if disc[root] != -1:
            continue
        # stack frames: (atom, incoming bond index, iterator position)
        stack: list[list[int]] = [[root, -1, 0]]
        disc[root] = low[root] = timer
        timer += 1
        while stack:
            frame = stack[-1]
            atom, in_bond, pos = frame
            if pos < len(adj[atom]):
                frame[2] += 1
                nbr, bi = adj[atom][pos]
                if bi == in_bond:
                    continue
                if disc[nbr] == -1:
                    disc[nbr] = low[nbr] = timer
                    timer += 1
                    stack.append([nbr, bi, 0])
                else:
                    # back edge: closes a cycle
                    low[atom] = min(low[atom], disc[nbr])
                    bond_cyclic[bi] = True
            else:
                stack.pop()
                if stack:
                    parent = stack[-1]
                    low[parent[0]] = min(low[parent[0]], low[atom])
                    if low[atom] > disc[parent[0]]:
                        pass  # bridge: stays non-cyclic
                    else:
                        bond_cyclic[in_bond] = True

    atom_cyclic = [False] * n_atoms
    for bi, (a, b) in enumerate(bond_pairs):
        if bond_cyclic[bi]:
            atom_cyclic[a] = True
            atom_cyclic[b] = True
    return atom_cyclic, bond_cyclic


def cycle_rank(n_atoms: int, n_bonds: int, n_components: int) -> int:
    """Number of independent cycles (circuit rank)."""
    return n_bonds - n_atoms + n_components


def bond_smallest_cycles(n_atoms: int, bond_pairs: list[tuple[int, int]]) -> list[int]:
    """Per bond: length of the smallest cycle through it, 0 when acyclic.

    A graph invariant (unlike a fundamental cycle basis, whose sizes
    depend on the spanning tree): shortest path between the endpoints
    with the bond itself removed, plus one.
    """
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_atoms)]
    for bi, (a, b) in enumerate(bond_pairs):
        adj[a].append((b, bi))
        adj[b].append((a, bi))

    out = []
    for bi, (a, b) in enumerate(bond_pairs):
        dist = {a: 0}
        queue = [a]
        qi = 0
        found = 0
        while qi < len(queue):
            cur = queue[qi]
            qi += 1
            if cur == b:
                found = dist[cur] + 1
                break
            for nbr, edge in adj[cur]:
                if edge != bi and nbr not in dist:
                    dist[nbr] = dist[cur] + 1
                    queue.append(nbr)
        out.append(found)
    return out
