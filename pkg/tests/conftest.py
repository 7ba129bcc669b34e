import random

import pytest

from toxbench.chem import parse_smiles
from toxbench.synthetic import molecule_pool

# real-world structures spanning the notation: rings, fusion, charges,
# isotopes, stereo marks, disconnection, heteroaromatics
CURATED_SMILES = [
    "C",
    "CC",
    "CCO",
    "OCC",
    "C=C",
    "C#N",
    "CC(=O)O",
    "CC(C)O",
    "C1CC1",
    "C1CCCCC1",
    "C1CC1C",
    "c1ccccc1",
    "Cc1ccccc1",
    "c1ccncc1",
    "c1cc[nH]c1",
    "c1ccoc1",
    "c1ccsc1",
    "c1ccc2ccccc2c1",
    "CC(=O)Oc1ccccc1C(=O)O",
    "Cn1cnc2c1c(=O)n(C)c(=O)n2C",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "O=[N+]([O-])c1ccccc1",
    "[Na+].[Cl-]",
    "C[N+](C)(C)C",
    "[13CH4]",
    "[2H]O[2H]",
    "F[C@@H](Cl)Br",
    "C/C=C/C",
    "OC(=O)c1ccccc1O",
    "NC(=O)c1ccccc1",
    "CSC",
    "CS(=O)(=O)O",
    "OO",
    "N#Cc1ccccc1",
    "ClC(Cl)(Cl)Cl",
    "C1CC12CC2",
    "C1CC1C1CC1",
    "O=C1CCCCC1",
    "N1CCOCC1",
    "CCN(CC)CC",
    "c1ccc(-c2ccccc2)cc1",
    "Brc1ccc(I)cc1F",
    "CC(C)(C)c1ccccc1O",
    "[O-]S(=O)(=O)[O-].[Na+].[Na+]",
    "O=C(O)CCCCC(=O)O",
    "C%10CCCCC%10",
    "[nH]1cccc1",
    "CN1CCC[C@H]1c1cccnc1",
    "OCC(O)CO",
    "CC(N)C(=O)O",
]


@pytest.fixture(scope="session")
def curated_molecules():
    return [parse_smiles(s) for s in CURATED_SMILES]


@pytest.fixture(scope="session")
def molecule_corpus(curated_molecules):
    """200 molecules mixing curated structures with generated ones."""
    generated = molecule_pool(200 - len(curated_molecules), seed=77)
    return curated_molecules + generated


@pytest.fixture()
def rng():
    return random.Random(12345)
