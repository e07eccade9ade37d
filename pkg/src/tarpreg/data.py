"""Dataset container, column standardization, train/test splitting and CSV I/O.

Predictor columns are standardized to sample mean 0 and sample standard
deviation 1 (divisor n-1).  Constant columns cannot be scaled; they are
forced to 0, flagged by a recorded scale of 0, and carry zero screening
utility downstream.  The response is never standardized: binary responses
must stay in {0, 1} and continuous responses are centered (and un-centered)
by the ensemble layer instead.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, IngestionError

RESPONSE_CONTINUOUS = "continuous"
RESPONSE_BINARY = "binary"


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def infer_response_kind(y: np.ndarray) -> str:
    return RESPONSE_BINARY if np.isin(y, (0.0, 1.0)).all() else RESPONSE_CONTINUOUS


@dataclass(frozen=True)
class Dataset:
    """Immutable design matrix + response with its standardization statistics.

    ``col_means``/``col_scales`` always hold the transform parameters of the
    originating raw data, so test rows can be mapped with training statistics
    whether or not ``X`` itself has been standardized yet.
    """

    X: np.ndarray
    y: np.ndarray
    response_kind: str
    col_means: np.ndarray
    col_scales: np.ndarray
    standardized: bool
    col_names: tuple = ()

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        if X.ndim != 2:
            raise DimensionError(f"X must be 2-d, got ndim={X.ndim}")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise DimensionError(f"y length {y.shape} does not match X rows {X.shape[0]}")
        if not np.isfinite(X).all():
            raise IngestionError("X contains non-finite entries")
        if not np.isfinite(y).all():
            raise IngestionError("y contains non-finite entries")
        if self.response_kind not in (RESPONSE_CONTINUOUS, RESPONSE_BINARY):
            raise IngestionError(f"unknown response kind {self.response_kind!r}")
        if self.response_kind == RESPONSE_BINARY and not np.isin(y, (0.0, 1.0)).all():
            raise IngestionError("binary response must take values in {0, 1}")
        if self.col_means.shape != (X.shape[1],) or self.col_scales.shape != (X.shape[1],):
            raise DimensionError("standardization statistics must have length p")
        if (self.col_scales < 0).any():
            raise IngestionError("column scales must be >= 0")
        names = tuple(self.col_names) if self.col_names else tuple(f"x{j}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DimensionError("col_names length does not match p")
        object.__setattr__(self, "X", _freeze(X))
        object.__setattr__(self, "y", _freeze(y))
        object.__setattr__(self, "col_means", _freeze(np.asarray(self.col_means, dtype=np.float64)))
        object.__setattr__(self, "col_scales", _freeze(np.asarray(self.col_scales, dtype=np.float64)))
        object.__setattr__(self, "col_names", names)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def constant_columns(self) -> np.ndarray:
        """Boolean mask of columns flagged constant (scale 0)."""
        return self.col_scales == 0.0

    @classmethod
    def from_arrays(cls, X, y, response_kind=None, col_names=()) -> "Dataset":
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.float64)
        if X.ndim != 2:
            raise DimensionError("X must be 2-d")
        if not np.isfinite(X).all():
            raise IngestionError("X contains non-finite entries")
        kind = response_kind or infer_response_kind(y)
        means, scales = column_statistics(X)
        return cls(X, y, kind, means, scales, standardized=False, col_names=col_names)


def column_statistics(X: np.ndarray):
    """Per-column sample mean and sample standard deviation (divisor n-1).

    Constant columns get scale 0 exactly.
    """
    if X.shape[0] < 2:
        raise DimensionError("standardization statistics need at least 2 rows")
    means = X.mean(axis=0)
    scales = X.std(axis=0, ddof=1)
    scales[np.ptp(X, axis=0) == 0.0] = 0.0
    return means, scales


def standardize(raw: Dataset) -> Dataset:
    """Center and scale every non-constant column by its own mean and sample sd.

    Statistics are recorded on the returned Dataset so test rows can be
    transformed with training statistics.  Constant columns map to 0.
    """
    if raw.n < 2:
        raise DimensionError("standardize needs n >= 2")
    means, scales = column_statistics(raw.X)
    Xs = transform_columns(raw.X, means, scales)
    return Dataset(Xs, raw.y, raw.response_kind, means, scales,
                   standardized=True, col_names=raw.col_names)


def transform_columns(X: np.ndarray, means: np.ndarray, scales: np.ndarray) -> np.ndarray:
    safe = np.where(scales == 0.0, 1.0, scales)
    out = (X - means) / safe
    if (scales == 0.0).any():
        out[:, scales == 0.0] = 0.0
    return out


def apply_standardization(train: Dataset, new_X) -> np.ndarray:
    """Map new rows through the training statistics: (x - mean) / scale.

    Constant training columns map to 0 regardless of the new values.
    """
    new_X = np.ascontiguousarray(new_X, dtype=np.float64)
    if new_X.ndim != 2 or new_X.shape[1] != train.p:
        raise DimensionError(
            f"new matrix has {new_X.shape[1] if new_X.ndim == 2 else '?'} columns, expected {train.p}")
    return transform_columns(new_X, train.col_means, train.col_scales)


@dataclass(frozen=True)
class SplitPlan:
    train_idx: np.ndarray
    test_idx: np.ndarray

    def __post_init__(self):
        tr = np.asarray(self.train_idx, dtype=np.int64)
        te = np.asarray(self.test_idx, dtype=np.int64)
        if tr.size == 0 or te.size == 0:
            raise DimensionError("both split parts must be non-empty")
        if np.intersect1d(tr, te).size:
            raise DimensionError("train and test indices overlap")
        if tr.min() < 0 or te.min() < 0:
            raise DimensionError("negative index in split")
        object.__setattr__(self, "train_idx", _freeze(np.sort(tr)))
        object.__setattr__(self, "test_idx", _freeze(np.sort(te)))


def make_split(n: int, n_test: int, rng: np.random.Generator) -> SplitPlan:
    if not 0 < n_test < n:
        raise DimensionError(f"n_test must be in (0, n); got {n_test} of {n}")
    perm = rng.permutation(n)
    return SplitPlan(perm[n_test:], perm[:n_test])


def read_csv(path, header="auto", response=-1):
    """Read a rectangular numeric CSV into a Dataset.

    header: True, False, or "auto" (first row is a header iff any cell in it
    fails to parse as a number).  response: column name or zero-based index;
    default -1 selects the last column.  Response kind is binary iff every
    response value is 0 or 1.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if row:
                rows.append(row)
    if not rows:
        raise IngestionError(f"{path}: empty file")

    names = None
    if header == "auto":
        header = not _all_numeric(rows[0])
    if header:
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise IngestionError(f"{path}: header but no data rows")

    width = len(rows[0])
    data = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise IngestionError(f"{path}: ragged row {i} has {len(row)} cells, expected {width}")
        for j, cell in enumerate(row):
            try:
                data[i, j] = float(cell)
            except ValueError:
                raise IngestionError(
                    f"{path}: non-numeric cell {cell!r} at row {i}, column {j}") from None
    if not np.isfinite(data).all():
        i, j = np.argwhere(~np.isfinite(data))[0]
        raise IngestionError(f"{path}: non-finite value at row {i}, column {j}")

    if isinstance(response, str):
        if names is None or response not in names:
            raise IngestionError(f"{path}: response column {response!r} not found")
        rcol = names.index(response)
    else:
        rcol = int(response) % width if -width <= int(response) < width else None
        if rcol is None:
            raise IngestionError(f"{path}: response column index {response} out of range")
    y = data[:, rcol]
    X = np.delete(data, rcol, axis=1)
    col_names = ()
    if names is not None:
        col_names = tuple(nm for j, nm in enumerate(names) if j != rcol)
    return Dataset.from_arrays(X, y, col_names=col_names)


def write_csv(path, columns, names):
    """Write named numeric columns as CSV, lossless to full double precision."""
    columns = [np.asarray(c, dtype=np.float64) for c in columns]
    if len(columns) != len(names):
        raise DimensionError("one name per column required")
    n = columns[0].shape[0]
    if any(c.shape != (n,) for c in columns):
        raise DimensionError("all columns must share the same length")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for i in range(n):
            writer.writerow([_fmt(c[i]) for c in columns])


def write_matrix_csv(path, X, y=None, col_names=None, response_name="y"):
    X = np.asarray(X, dtype=np.float64)
    names = list(col_names) if col_names else [f"x{j}" for j in range(X.shape[1])]
    cols = [X[:, j] for j in range(X.shape[1])]
    if y is not None:
        names.append(response_name)
        cols.append(np.asarray(y, dtype=np.float64))
    write_csv(path, cols, names)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _all_numeric(row) -> bool:
    for cell in row:
        try:
            float(cell)
        except ValueError:
            return False
    return True
