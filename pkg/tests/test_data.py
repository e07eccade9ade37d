import numpy as np
import pytest

from tarpreg import (Dataset, DimensionError, IngestionError, SplitPlan,
                     apply_standardization, make_split, read_csv, standardize,
                     write_matrix_csv)


def test_standardize_two_point_column_uses_sample_sd():
    ds = Dataset.from_arrays(np.array([[1.0], [-1.0]]), np.zeros(2))
    out = standardize(ds)
    # sample sd of (1, -1) is sqrt(2), so the scaled column is +-1/sqrt(2)
    assert out.X[:, 0] == pytest.approx([1 / np.sqrt(2), -1 / np.sqrt(2)])
    assert out.col_scales[0] == pytest.approx(np.sqrt(2.0))
    assert out.col_means[0] == 0.0


def test_standardize_sets_unit_sample_sd_and_zero_mean():
    rng = np.random.default_rng(1)
    ds = Dataset.from_arrays(rng.normal(5.0, 3.0, size=(40, 6)), rng.normal(size=40))
    out = standardize(ds)
    assert np.abs(out.X.mean(axis=0)).max() < 1e-10
    assert np.abs(out.X.std(axis=0, ddof=1) - 1).max() < 1e-8


def test_standardize_idempotent():
    rng = np.random.default_rng(2)
    ds = Dataset.from_arrays(rng.normal(2.0, 7.0, size=(25, 4)), rng.normal(size=25))
    once = standardize(ds)
    twice = standardize(once)
    assert np.abs(twice.X - once.X).max() < 1e-10


def test_standardize_constant_column_flagged_and_zeroed():
    X = np.column_stack([np.full(5, 5.0), np.arange(5.0)])
    out = standardize(Dataset.from_arrays(X, np.zeros(5)))
    assert out.X[:, 0] == pytest.approx(np.zeros(5))
    assert out.col_scales[0] == 0.0
    assert out.constant_columns.tolist() == [True, False]


def test_standardize_rejects_tiny_n():
    ds = Dataset(np.ones((1, 1)), np.zeros(1), "continuous",
                 np.zeros(1), np.ones(1), standardized=False)
    with pytest.raises(DimensionError):
        standardize(ds)


def test_dataset_rejects_non_finite():
    with pytest.raises(IngestionError):
        Dataset.from_arrays(np.array([[1.0, np.nan]]), np.zeros(1))
    with pytest.raises(IngestionError):
        Dataset.from_arrays(np.ones((2, 2)), np.array([1.0, np.inf]))


def test_dataset_binary_kind_enforced():
    with pytest.raises(IngestionError):
        Dataset.from_arrays(np.ones((3, 1)), np.array([0.0, 1.0, 2.0]),
                            response_kind="binary")


def test_apply_standardization_examples():
    train = standardize(Dataset.from_arrays(
        np.array([[1.0], [3.0]]), np.zeros(2)))  # mean 2, sample sd sqrt(2)
    # row of training means maps to zero
    assert apply_standardization(train, np.array([[2.0]]))[0, 0] == 0.0

    ds = Dataset(np.zeros((2, 1)), np.zeros(2), "continuous",
                 np.array([2.0]), np.array([2.0]), standardized=True)
    assert apply_standardization(ds, np.array([[6.0]]))[0, 0] == pytest.approx(2.0)

    ident = Dataset(np.zeros((2, 1)), np.zeros(2), "continuous",
                    np.array([0.0]), np.array([1.0]), standardized=True)
    x = np.array([[1.25], [-3.5]])
    assert np.array_equal(apply_standardization(ident, x), x)


def test_apply_standardization_reproduces_training_matrix_exactly():
    rng = np.random.default_rng(3)
    raw = Dataset.from_arrays(rng.normal(1.0, 4.0, size=(30, 5)), rng.normal(size=30))
    std = standardize(raw)
    again = apply_standardization(std, raw.X)
    assert np.array_equal(again, std.X)


def test_apply_standardization_rejects_column_mismatch():
    std = standardize(Dataset.from_arrays(np.random.default_rng(0).normal(size=(10, 3)),
                                          np.zeros(10)))
    with pytest.raises(DimensionError):
        apply_standardization(std, np.ones((2, 4)))


def test_read_csv_with_header(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,b,y\n1,2,3\n4,5,6\n7,8,9\n")
    ds = read_csv(path)
    assert ds.X.shape == (3, 2)
    assert ds.y.tolist() == [3.0, 6.0, 9.0]
    assert ds.col_names == ("a", "b")
    assert ds.response_kind == "continuous"


def test_read_csv_binary_response_inferred(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1,0.5,0\n2,0.25,1\n3,0.125,1\n")
    ds = read_csv(path)
    assert ds.response_kind == "binary"


def test_read_csv_response_by_name(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("y,a\n1,10\n2,20\n")
    ds = read_csv(path, response="y")
    assert ds.y.tolist() == [1.0, 2.0]
    assert ds.col_names == ("a",)


def test_read_csv_na_cell_names_row_and_column(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,b\n1,2\n3,NA\n")
    with pytest.raises(IngestionError, match="row 1, column 1"):
        read_csv(path)


def test_read_csv_ragged_rows_rejected(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1,2\n3\n")
    with pytest.raises(IngestionError, match="ragged"):
        read_csv(path)


def test_read_csv_missing_response_column(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(IngestionError):
        read_csv(path, response="nope")


def test_csv_roundtrip_lossless_to_15_digits(tmp_path):
    rng = np.random.default_rng(4)
    X = rng.normal(size=(12, 3)) * 10.0 ** rng.integers(-8, 8, size=(12, 3))
    y = rng.normal(size=12)
    path = tmp_path / "r.csv"
    write_matrix_csv(path, X, y)
    back = read_csv(path)
    assert np.array_equal(back.X, X)  # %.17g is exact for float64
    assert np.array_equal(back.y, y)


def test_split_plan_invariants():
    plan = make_split(10, 3, np.random.default_rng(0))
    assert plan.train_idx.size == 7 and plan.test_idx.size == 3
    assert np.intersect1d(plan.train_idx, plan.test_idx).size == 0
    with pytest.raises(DimensionError):
        SplitPlan(np.array([0, 1]), np.array([1, 2]))
    with pytest.raises(DimensionError):
        SplitPlan(np.array([], dtype=int), np.array([1]))
    with pytest.raises(DimensionError):
        make_split(5, 5, np.random.default_rng(0))
