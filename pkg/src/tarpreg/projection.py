"""Projection matrices for compressing the screened design matrix.

Three back-ends produce the m x p_gamma matrix applied to the selected
columns:

* ``rp``         three-point random projection: entries +-1/sqrt(2 psi) with
                 probability psi each, 0 with probability 1 - 2 psi
                 (psi in (0, 0.5]; psi = 0.5 is the dense +-1 boundary)
* ``sparse-rp``  sparse variant: entries +-n^(kappa/2)/sqrt(m) with
                 probability 1/(2 n^kappa) each, kappa in (0, 1)
* ``pcr``        rows are the leading right singular vectors of X_gamma
                 (principal-component projection), orthonormal by construction

Columns outside the screen are never touched: ``compress`` slices the
selected columns and multiplies, so the implicit full R has zero blocks.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError, ParameterError

KIND_RP = "rp"
KIND_SPARSE_RP = "sparse-rp"
KIND_PCR = "pcr"
_KIND_CODES = {KIND_RP: 0, KIND_SPARSE_RP: 1, KIND_PCR: 2}
_CODE_KINDS = {v: k for k, v in _KIND_CODES.items()}
_MAGIC = b"TPRJ"


@dataclass(frozen=True)
class ProjectionMatrix:
    kind: str
    entries: np.ndarray            # m x p_gamma, row-major float64
    column_map: np.ndarray         # indices into the original p columns
    m: int                         # effective row count
    m_requested: int
    psi: Optional[float] = None
    kappa: Optional[float] = None
    rank_truncated: bool = False

    def __post_init__(self):
        entries = np.ascontiguousarray(self.entries, dtype=np.float64)
        cmap = np.ascontiguousarray(self.column_map, dtype=np.int64)
        if entries.ndim != 2:
            raise DimensionError("entries must be 2-d")
        if entries.shape != (self.m, cmap.shape[0]):
            raise DimensionError("entries shape does not match (m, p_gamma)")
        entries.setflags(write=False)
        cmap.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "column_map", cmap)

    @property
    def p_gamma(self) -> int:
        return self.column_map.shape[0]

    @property
    def density(self) -> float:
        return float(np.count_nonzero(self.entries)) / max(1, self.entries.size)

    def to_coo(self):
        """Coordinate-list view (rows, cols, values) for sparse realizations."""
        rows, cols = np.nonzero(self.entries)
        return rows, cols, self.entries[rows, cols]


def gen_rp_matrix(p_gamma: int, m: int, psi: float, rng: np.random.Generator,
                  column_map=None) -> ProjectionMatrix:
    """i.i.d. three-point entries: +-1/sqrt(2 psi) w.p. psi each, else 0."""
    if not 0.0 < psi <= 0.5:
        raise ParameterError(f"psi must lie in (0, 0.5], got {psi}")
    if m < 1 or p_gamma < 1:
        raise DimensionError("m and p_gamma must be >= 1")
    value = 1.0 / np.sqrt(2.0 * psi)
    u = rng.random((m, p_gamma))
    entries = np.where(u < psi, value, np.where(u < 2.0 * psi, -value, 0.0))
    return ProjectionMatrix(KIND_RP, entries, _cmap(column_map, p_gamma),
                            m=m, m_requested=m, psi=float(psi))


def gen_sparse_rp_matrix(p_gamma: int, m: int, kappa: float, n: int,
                         rng: np.random.Generator, column_map=None) -> ProjectionMatrix:
    """Sparse variant: +-n^(kappa/2)/sqrt(m) w.p. 1/(2 n^kappa) each, else 0."""
    if not 0.0 < kappa < 1.0:
        raise ParameterError(f"kappa must lie strictly in (0, 1), got {kappa}")
    if n < 2:
        raise DimensionError("n must be >= 2 for the sparse variant")
    if m < 1 or p_gamma < 1:
        raise DimensionError("m and p_gamma must be >= 1")
    value = n ** (kappa / 2.0) / np.sqrt(m)
    prob = 1.0 / (2.0 * n ** kappa)
    u = rng.random((m, p_gamma))
    entries = np.where(u < prob, value, np.where(u < 2.0 * prob, -value, 0.0))
    return ProjectionMatrix(KIND_SPARSE_RP, entries, _cmap(column_map, p_gamma),
                            m=m, m_requested=m, kappa=float(kappa))


def gen_pcr_matrix(X_gamma: np.ndarray, m: int, column_map=None) -> ProjectionMatrix:
    """Rows are the top-min(m, rank) right singular vectors of X_gamma.

    Thin SVD of X_gamma directly (X'X is never formed).  Row signs are
    normalized so each row's largest-magnitude entry is positive.  If m
    exceeds the numerical rank the effective m is truncated and flagged.
    """
    X_gamma = np.asarray(X_gamma, dtype=np.float64)
    if X_gamma.ndim != 2 or X_gamma.shape[1] < 1:
        raise DimensionError("X_gamma must be a non-empty 2-d matrix")
    if m < 1:
        raise DimensionError("m must be >= 1")
    _, s, vt = np.linalg.svd(X_gamma, full_matrices=False)
    if s.size and s[0] > 0:
        rank = int((s > s[0] * max(X_gamma.shape) * np.finfo(np.float64).eps).sum())
    else:
        rank = 0
    m_eff = max(1, min(m, rank if rank else 1))
    rows = vt[:m_eff].copy()
    for row in rows:
        lead = int(np.argmax(np.abs(row)))
        if row[lead] < 0:
            row *= -1.0
    return ProjectionMatrix(KIND_PCR, rows, _cmap(column_map, X_gamma.shape[1]),
                            m=m_eff, m_requested=m, rank_truncated=m_eff < m)


def compress(X: np.ndarray, proj: ProjectionMatrix) -> np.ndarray:
    """Z = X[:, column_map] @ entries'; columns outside the screen never enter."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError("X must be 2-d")
    cmap = proj.column_map
    if cmap.size and (cmap.min() < 0 or cmap.max() >= X.shape[1]):
        raise DimensionError("column_map index outside X columns")
    return X[:, cmap] @ proj.entries.T


def save_projection(proj: ProjectionMatrix, path) -> None:
    """Debug dump: small self-describing header + row-major float64 entries."""
    header = struct.pack(
        "<4sBBIIIdd",
        _MAGIC, 1, _KIND_CODES[proj.kind],
        proj.m, proj.p_gamma, proj.m_requested,
        float("nan") if proj.psi is None else proj.psi,
        float("nan") if proj.kappa is None else proj.kappa,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(struct.pack("<B", int(proj.rank_truncated)))
        fh.write(proj.column_map.astype("<i8").tobytes())
        fh.write(proj.entries.astype("<f8").tobytes())


def load_projection(path) -> ProjectionMatrix:
    with open(path, "rb") as fh:
        blob = fh.read()
    head_size = struct.calcsize("<4sBBIIIdd")
    magic, version, code, m, p_gamma, m_req, psi, kappa = struct.unpack(
        "<4sBBIIIdd", blob[:head_size])
    if magic != _MAGIC or version != 1:
        raise ParameterError("not a projection dump")
    off = head_size
    truncated = bool(blob[off]); off += 1
    cmap = np.frombuffer(blob, dtype="<i8", count=p_gamma, offset=off).astype(np.int64)
    off += 8 * p_gamma
    entries = np.frombuffer(blob, dtype="<f8", count=m * p_gamma, offset=off)
    entries = entries.reshape(m, p_gamma).copy()
    return ProjectionMatrix(_CODE_KINDS[code], entries, cmap, m=m, m_requested=m_req,
                            psi=None if np.isnan(psi) else float(psi),
                            kappa=None if np.isnan(kappa) else float(kappa),
                            rank_truncated=truncated)


def _cmap(column_map, p_gamma: int) -> np.ndarray:
    if column_map is None:
        return np.arange(p_gamma, dtype=np.int64)
    cmap = np.asarray(column_map, dtype=np.int64)
    if cmap.shape != (p_gamma,):
        raise DimensionError("column_map length must equal p_gamma")
    return cmap
