"""Task structure: 12 endpoints, sparse binary labels, file I/O, audits.

Unmeasured cells are masked, never imputed. The value array stores -1 at
masked positions so any unmasked read path fails loudly; the access
contract (``label``, ``labels_and_mask``) is the only supported way in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chem import ParseError, graph_key, parse_smiles

ENDPOINTS = (
    "NR-AR",
    "NR-AR-LBD",
    "NR-AhR",
    "NR-Aromatase",
    "NR-ER",
    "NR-ER-LBD",
    "NR-PPAR-gamma",
    "SR-ARE",
    "SR-ATAD5",
    "SR-HSE",
    "SR-MMP",
    "SR-p53",
)

ENDPOINT_DESCRIPTIONS = {
    "NR-AR": "Androgen Receptor - involved in male hormone signaling",
    "NR-AR-LBD": "Androgen Receptor Ligand Binding Domain - direct binding to androgen receptor",
    "NR-AhR": "Aryl Hydrocarbon Receptor - responds to environmental chemicals",
    "NR-Aromatase": "Aromatase enzyme - converts androgens to estrogens",
    "NR-ER": "Estrogen Receptor - involved in female hormone signaling",
    "NR-ER-LBD": "Estrogen Receptor Ligand Binding Domain - direct binding to estrogen receptor",
    "NR-PPAR-gamma": "Peroxisome Proliferator-Activated Receptor Gamma - regulates metabolism",
    "SR-ARE": "Antioxidant Response Element - responds to oxidative stress",
    "SR-ATAD5": "ATAD5 - involved in DNA replication and genome stability",
    "SR-HSE": "Heat Shock Response Element - responds to cellular stress",
    "SR-MMP": "Mitochondrial Membrane Potential - indicates mitochondrial function",
    "SR-p53": "p53 tumor suppressor - activated by DNA damage and stress",
}

N_ENDPOINTS = len(ENDPOINTS)

HEADER = ("id", "smiles") + ENDPOINTS


class DatasetError(ValueError):
    pass


class MaskedLabelError(LookupError):
    """Raised on any attempt to read a label at a masked position."""


def endpoint_index(endpoint: str) -> int:
    try:
        return ENDPOINTS.index(endpoint)
    except ValueError:
        raise DatasetError(f"unknown endpoint {endpoint!r}") from None


@dataclass(frozen=True)
class LabelMatrix:
    """Sparse binary activity matrix over molecules x 12 endpoints."""

    molecule_ids: tuple[str, ...]
    smiles: tuple[str, ...]
    _values: np.ndarray = field(repr=False)   # int8, -1 where masked
    _present: np.ndarray = field(repr=False)  # bool

    def __post_init__(self):
        n = len(self.molecule_ids)
        if len(self.smiles) != n:
            raise DatasetError("molecule_ids and smiles lengths differ")
        if self._values.shape != (n, N_ENDPOINTS) or self._present.shape != (n, N_ENDPOINTS):
            raise DatasetError("label arrays must be rows x 12")
        if not np.all((self._values == -1) == ~self._present):
            raise DatasetError("values must be -1 exactly at masked positions")
        if not np.all(np.isin(self._values[self._present], (0, 1))):
            raise DatasetError("present labels must be 0 or 1")
        self._values.setflags(write=False)
        self._present.setflags(write=False)

    def __len__(self) -> int:
        return len(self.molecule_ids)

    @classmethod
    def build(cls, molecule_ids, smiles, cells) -> "LabelMatrix":
        """cells: per-row sequences of 0/1/None (None = unmeasured)."""
        n = len(molecule_ids)
        values = np.full((n, N_ENDPOINTS), -1, dtype=np.int8)
        present = np.zeros((n, N_ENDPOINTS), dtype=bool)
        for i, row in enumerate(cells):
            for j, cell in enumerate(row):
                if cell is None:
                    continue
                values[i, j] = cell
                present[i, j] = True
        return cls(tuple(molecule_ids), tuple(smiles), values, present)

    def is_present(self, row: int, endpoint: str) -> bool:
        return bool(self._present[row, endpoint_index(endpoint)])

    def label(self, row: int, endpoint: str) -> int:
        j = endpoint_index(endpoint)
        if not self._present[row, j]:
            raise MaskedLabelError(
                f"label for row {row} ({self.molecule_ids[row]}) endpoint {endpoint} is masked")
        return int(self._values[row, j])

    @property
    def present_mask(self) -> np.ndarray:
        """Read-only boolean presence mask (rows x 12)."""
        return self._present

    def labels_and_mask(self) -> tuple[np.ndarray, np.ndarray]:
        """(labels, mask) for masked arithmetic: labels hold NaN where masked.

        The NaN poisons any consumer that forgets the mask; masked-aware
        code multiplies contributions by the mask and never reads the
        NaN positions as values.
        """
        labels = np.where(self._present, self._values.astype(np.float64), np.nan)
        return labels, self._present.copy()

    def endpoint_column(self, endpoint: str) -> tuple[np.ndarray, np.ndarray]:
        """(labels, mask) for one endpoint; labels NaN where masked."""
        j = endpoint_index(endpoint)
        mask = self._present[:, j].copy()
        labels = np.where(mask, self._values[:, j].astype(np.float64), np.nan)
        return labels, mask

    def rows(self):
        """Cells as 0/1/None per row, for writing and round-trips."""
        for i in range(len(self)):
            yield [
                int(self._values[i, j]) if self._present[i, j] else None
                for j in range(N_ENDPOINTS)
            ]


@dataclass(frozen=True)
class LoadReport:
    rows_read: int
    rows_kept: int
    excluded: tuple[tuple[int, str, str], ...]  # (line number, id, reason)

    @property
    def rows_excluded(self) -> int:
        return len(self.excluded)


def load_dataset(path) -> tuple[LabelMatrix, LoadReport]:
    """Read the CSV dataset format; see write_dataset for the canonical form.

    Rows whose SMILES fail to parse are excluded and reported, not fatal.
    Malformed headers, non-{0,1,empty} cells, and duplicate ids are errors.
    """
    with open(path, "r", encoding="utf-8", newline="") as f:
        text = f.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DatasetError(f"{path}: empty file")
    header = tuple(lines[0].split(","))
    if header != HEADER:
        raise DatasetError(f"{path}: malformed header {lines[0]!r}")

    ids: list[str] = []
    smiles: list[str] = []
    cells: list[list[int | None]] = []
    excluded: list[tuple[int, str, str]] = []
    seen_ids: set[str] = set()
    rows_read = 0

    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(HEADER):
            raise DatasetError(f"{path}:{lineno}: expected {len(HEADER)} fields, got {len(parts)}")
        rows_read += 1
        mol_id, smi = parts[0], parts[1]
        if mol_id in seen_ids:
            raise DatasetError(f"{path}:{lineno}: duplicate molecule id {mol_id!r}")
        seen_ids.add(mol_id)
        row: list[int | None] = []
        for j, cell in enumerate(parts[2:]):
            if cell == "":
                row.append(None)
            elif cell in ("0", "1"):
                row.append(int(cell))
            else:
                raise DatasetError(
                    f"{path}:{lineno}: bad label {cell!r} in column {ENDPOINTS[j]}")
        try:
            parse_smiles(smi)
        except ParseError as exc:
            excluded.append((lineno, mol_id, f"{exc.kind}: {exc.message}"))
            continue
        ids.append(mol_id)
        smiles.append(smi)
        cells.append(row)

    matrix = LabelMatrix.build(ids, smiles, cells)
    return matrix, LoadReport(rows_read, len(ids), tuple(excluded))


def write_dataset(matrix: LabelMatrix, path) -> None:
    """Write the canonical CSV form: fixed header, '' for masked, trailing newline."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(HEADER) + "\n")
        for i, row in enumerate(matrix.rows()):
            cells = ["" if v is None else str(v) for v in row]
            f.write(",".join([matrix.molecule_ids[i], matrix.smiles[i]] + cells) + "\n")


def _pct(numerator: int, denominator: int) -> float:
    return round(100.0 * numerator / denominator, 1) if denominator else 0.0


@dataclass(frozen=True)
class EndpointAudit:
    endpoint: str
    labeled_pct: float
    missing_pct: float
    active_pct: float
    n_present: int
    n_active: int


@dataclass(frozen=True)
class SplitAudit:
    total_rows: int
    unique_molecules: int
    labeled_pct: float
    missing_pct: float
    active_pct: float
    per_endpoint: tuple[EndpointAudit, ...]

    def to_dict(self) -> dict:
        return {
            "total": self.total_rows,
            "unique": self.unique_molecules,
            "labeled_pct": self.labeled_pct,
            "missing_pct": self.missing_pct,
            "active_pct": self.active_pct,
            "endpoints": {
                e.endpoint: {
                    "labeled_pct": e.labeled_pct,
                    "missing_pct": e.missing_pct,
                    "active_pct": e.active_pct,
                }
                for e in self.per_endpoint
            },
        }

    def render_table(self) -> str:
        width = max(len(e) for e in ENDPOINTS)
        lines = [
            f"rows: {self.total_rows}   unique molecules: {self.unique_molecules}",
            f"{'overall':<{width}}  labeled {self.labeled_pct:5.1f}%  "
            f"missing {self.missing_pct:5.1f}%  active {self.active_pct:5.1f}%",
        ]
        for e in self.per_endpoint:
            lines.append(
                f"{e.endpoint:<{width}}  labeled {e.labeled_pct:5.1f}%  "
                f"missing {e.missing_pct:5.1f}%  active {e.active_pct:5.1f}%")
        return "\n".join(lines)


def audit(matrix: LabelMatrix) -> SplitAudit:
    """Label-availability and class-balance statistics for one dataset."""
    n = len(matrix)
    if n == 0:
        raise DatasetError("cannot audit an empty matrix")
    present = matrix.present_mask
    values = np.where(present, np.asarray(matrix._values), 0)

    total_cells = n * N_ENDPOINTS
    n_present = int(present.sum())
    n_active = int(values[present].sum())
    labeled = 100.0 * n_present / total_cells

    per_endpoint = []
    for j, name in enumerate(ENDPOINTS):
        col_present = int(present[:, j].sum())
        col_active = int(values[present[:, j], j].sum()) if col_present else 0
        col_labeled = 100.0 * col_present / n
        per_endpoint.append(EndpointAudit(
            endpoint=name,
            labeled_pct=round(col_labeled, 1),
            missing_pct=round(100.0 - col_labeled, 1),
            active_pct=_pct(col_active, col_present),
            n_present=col_present,
            n_active=col_active,
        ))

    return SplitAudit(
        total_rows=n,
        unique_molecules=_unique_molecules(matrix.smiles),
        labeled_pct=round(labeled, 1),
        missing_pct=round(100.0 - labeled, 1),
        active_pct=_pct(n_active, n_present),
        per_endpoint=tuple(per_endpoint),
    )


def _unique_molecules(smiles) -> int:
    keys = set()
    for smi in smiles:
        try:
            keys.add(("graph", graph_key(parse_smiles(smi))))
        except ParseError:
            keys.add(("text", smi))
    return len(keys)


def endpoint_class_counts(matrix: LabelMatrix, endpoint: str) -> tuple[int, int, int]:
    """(n_pos, n_neg, n_missing) over one endpoint column."""
    j = endpoint_index(endpoint)
    present = matrix.present_mask[:, j]
    values = np.asarray(matrix._values)[:, j]
    n_pos = int(np.sum(values[present] == 1))
    n_neg = int(np.sum(values[present] == 0))
    return n_pos, n_neg, int((~present).sum())


def present_cell_count(matrix: LabelMatrix) -> int:
    return int(matrix.present_mask.sum())
