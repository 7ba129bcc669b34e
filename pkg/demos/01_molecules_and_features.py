"""Parse molecules, inspect their graphs, and build feature vectors.

Run: python demos/01_molecules_and_features.py
"""

import random

import numpy as np

from toxbench.chem import parse_smiles, write_smiles, initial_atom_invariants
from toxbench.featurize import assemble, ecfp_counts, descriptors, descriptor_index

# -- parsing ---------------------------------------------------------------

aspirin = parse_smiles("CC(=O)Oc1ccccc1C(=O)O")
print(f"aspirin: {len(aspirin.atoms)} heavy atoms, {len(aspirin.bonds)} bonds")
for atom in aspirin.atoms[:5]:
    print(f"  {atom.element:>2}  aromatic={atom.aromatic!s:<5} ring={atom.in_ring!s:<5} "
          f"H={atom.total_h}")

# the parser rejects malformed input with a typed error and byte offset
from toxbench.chem import ParseError
try:
    parse_smiles("C(C)(C)(C)(C)C")
except ParseError as exc:
    print(f"rejected: kind={exc.kind} at offset {exc.position}")

# -- writing-order invariance ----------------------------------------------

# the same molecule written three different ways
rewritings = [write_smiles(aspirin, random.Random(k)) for k in range(3)]
print("\nrewritings:", rewritings)
vectors = [assemble(parse_smiles(w)) for w in rewritings]
print("feature vectors identical:",
      all(np.array_equal(vectors[0], v) for v in vectors[1:]))

# -- feature anatomy ---------------------------------------------------------

vector = assemble(aspirin)
print(f"\nfull vector width: {vector.shape[0]}")
print(f"fingerprint mass (environments): {ecfp_counts(aspirin).sum():.0f}")
print(f"molecular weight: "
      f"{descriptors(aspirin)[descriptor_index('molecular_weight')]:.3f}")
print(f"benzene atoms share one invariant: "
      f"{len(set(initial_atom_invariants(parse_smiles('c1ccccc1')))) == 1}")
