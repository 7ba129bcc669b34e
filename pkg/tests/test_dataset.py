import numpy as np
import pytest

from toxbench.dataset import (
    ENDPOINT_DESCRIPTIONS,
    ENDPOINTS,
    DatasetError,
    LabelMatrix,
    MaskedLabelError,
    audit,
    endpoint_class_counts,
    load_dataset,
    present_cell_count,
    write_dataset,
)


def small_matrix():
    return LabelMatrix.build(
        ["m1", "m2", "m3"],
        ["CCO", "c1ccccc1", "CC(=O)O"],
        [
            [1, 0, None, 1, 0, 1, 0, 1, 0, 1, 0, 1],
            [0] * 12,
            [1] * 12,
        ],
    )


class TestEndpoints:
    def test_twelve_fixed_names(self):
        assert len(ENDPOINTS) == 12
        assert ENDPOINTS[0] == "NR-AR"
        assert ENDPOINTS[-1] == "SR-p53"
        assert set(ENDPOINT_DESCRIPTIONS) == set(ENDPOINTS)

    def test_descriptions_nonempty(self):
        for endpoint in ENDPOINTS:
            assert ENDPOINT_DESCRIPTIONS[endpoint]


class TestLabelMatrix:
    def test_present_count(self):
        assert present_cell_count(small_matrix()) == 35

    def test_masked_read_raises(self):
        matrix = small_matrix()
        with pytest.raises(MaskedLabelError):
            matrix.label(0, "NR-AhR")
        assert matrix.label(0, "NR-AR") == 1

    def test_masked_cells_are_nan_in_export(self):
        labels, mask = small_matrix().labels_and_mask()
        assert np.isnan(labels[0, 2])
        assert not mask[0, 2]
        assert labels[0, 0] == 1.0

    def test_no_imputed_values(self):
        # the raw storage uses an invalid sentinel, never a plausible zero
        matrix = small_matrix()
        assert matrix._values[0, 2] == -1

    def test_arrays_read_only(self):
        matrix = small_matrix()
        with pytest.raises(ValueError):
            matrix.present_mask[0, 0] = False

    def test_bad_values_rejected(self):
        with pytest.raises(DatasetError):
            LabelMatrix.build(["a"], ["C"], [[2] + [None] * 11])


class TestLoadWrite:
    def test_round_trip_byte_identical(self, tmp_path):
        path = tmp_path / "d.csv"
        write_dataset(small_matrix(), path)
        loaded, report = load_dataset(path)
        assert report.rows_read == 3 and report.rows_kept == 3
        path2 = tmp_path / "d2.csv"
        write_dataset(loaded, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_missing_cell_count(self, tmp_path):
        path = tmp_path / "d.csv"
        write_dataset(small_matrix(), path)
        loaded, _ = load_dataset(path)
        assert present_cell_count(loaded) == 35

    def test_bad_label_cell(self, tmp_path):
        path = tmp_path / "d.csv"
        header = "id,smiles," + ",".join(ENDPOINTS)
        path.write_text(header + "\nm1,CCO,2" + ",1" * 11 + "\n")
        with pytest.raises(DatasetError) as err:
            load_dataset(path)
        assert "NR-AR" in str(err.value)
        assert ":2:" in str(err.value)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,smiles,bogus\n")
        with pytest.raises(DatasetError):
            load_dataset(path)

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "d.csv"
        header = "id,smiles," + ",".join(ENDPOINTS)
        row = "m1,CCO" + ",1" * 12
        path.write_text(header + "\n" + row + "\n" + row + "\n")
        with pytest.raises(DatasetError) as err:
            load_dataset(path)
        assert "duplicate" in str(err.value)

    def test_unparseable_smiles_excluded_not_fatal(self, tmp_path):
        path = tmp_path / "d.csv"
        header = "id,smiles," + ",".join(ENDPOINTS)
        lines = [header,
                 "m1,CCO" + ",1" * 12,
                 "m2,C(" + ",0" * 12,
                 "m3,c1ccccc1" + ",0" * 12]
        path.write_text("\n".join(lines) + "\n")
        loaded, report = load_dataset(path)
        assert report.rows_read == 3
        assert report.rows_kept == 2
        assert report.rows_excluded == 1
        assert report.excluded[0][1] == "m2"
        assert "unbalanced_parenthesis" in report.excluded[0][2]


class TestAudit:
    def test_two_by_two_example(self):
        matrix = LabelMatrix.build(
            ["a", "b"], ["C", "CC"],
            [[1, None] + [None] * 10, [0, 0] + [None] * 10])
        result = audit(matrix)
        # over the full 2x12 grid: 3 present of 24
        assert result.labeled_pct == 12.5
        assert result.active_pct == 33.3
        nr_ar = result.per_endpoint[0]
        assert nr_ar.labeled_pct == 100.0
        nr_ar_lbd = result.per_endpoint[1]
        assert nr_ar_lbd.labeled_pct == 50.0

    def test_all_present_all_inactive(self):
        matrix = LabelMatrix.build(["a", "b"], ["C", "CC"], [[0] * 12, [0] * 12])
        result = audit(matrix)
        assert result.labeled_pct == 100.0
        assert result.missing_pct == 0.0
        assert result.active_pct == 0.0

    def test_unique_molecules_by_graph(self):
        matrix = LabelMatrix.build(
            ["a", "b", "c"], ["CCO", "OCC", "CCN"],
            [[1] * 12, [0] * 12, [0] * 12])
        assert audit(matrix).unique_molecules == 2

    def test_labeled_plus_missing(self):
        result = audit(small_matrix())
        assert result.labeled_pct + result.missing_pct == pytest.approx(100.0, abs=0.1)

    def test_per_endpoint_sum_consistency(self):
        matrix = small_matrix()
        result = audit(matrix)
        total = sum(e.n_present for e in result.per_endpoint)
        assert total == present_cell_count(matrix)

    def test_table_and_json(self):
        result = audit(small_matrix())
        table = result.render_table()
        assert "NR-AR" in table and "SR-p53" in table
        doc = result.to_dict()
        assert doc["total"] == 3
        assert set(doc["endpoints"]) == set(ENDPOINTS)


class TestChallengeShapedFixture:
    def test_647_rows_with_two_duplicates(self, tmp_path):
        """A fixture shaped like the original held-out split: 647 scoring
        rows of which two repeat another molecule, so 645 unique."""
        from toxbench.chem import graph_key
        from toxbench.synthetic import molecule_pool, synthetic_matrix

        pool = []
        seen = set()
        for mol in molecule_pool(900, seed=1234):
            key = graph_key(mol)
            if key not in seen:
                seen.add(key)
                pool.append(mol)
            if len(pool) == 645:
                break
        assert len(pool) == 645
        mols = pool + pool[:2]  # two duplicate molecules under distinct ids
        matrix = synthetic_matrix(mols, seed=9, mask_rate=0.1, id_prefix="fix")
        path = tmp_path / "challenge-shaped.csv"
        write_dataset(matrix, path)

        loaded, report = load_dataset(path)
        assert report.rows_kept == 647
        result = audit(loaded)
        assert result.total_rows == 647
        assert result.unique_molecules == 645


class TestClassCounts:
    def test_column_example(self):
        matrix = LabelMatrix.build(
            ["a", "b", "c", "d"], ["C", "CC", "CCC", "CCCC"],
            [[1] + [None] * 11, [None] * 12, [0] + [None] * 11, [0] + [None] * 11])
        assert endpoint_class_counts(matrix, "NR-AR") == (1, 2, 1)

    def test_all_active(self):
        matrix = LabelMatrix.build(["a", "b"], ["C", "CC"], [[1] * 12, [1] * 12])
        assert endpoint_class_counts(matrix, "SR-p53") == (2, 0, 0)
