"""Marginal-utility screening: utilities, inclusion probabilities, indicator draws.

Each predictor j gets the Pearson correlation r_j with the response as its
marginal utility (also for binary responses, where it is equivalent to the
two-group t statistic), converted to inclusion probability
q_j = |r_j|^delta / max_k |r_k|^delta, and the screening indicator gamma is a
vector of independent Bernoulli(q_j) draws.  delta = 0 disables screening
(all q_j = 1); the argmax-utility column always has q = 1.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DimensionError, ParameterError

_GAMMA_RETRIES = 16


@dataclass(frozen=True)
class InclusionProbs:
    q: np.ndarray
    delta: float
    degenerate: bool = False  # all utilities zero; caller decides fallback

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64)
        if q.ndim != 1:
            raise DimensionError("q must be a vector")
        if ((q < 0) | (q > 1)).any():
            raise ParameterError("inclusion probabilities must lie in [0, 1]")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class GammaMask:
    gamma: np.ndarray
    selected: np.ndarray
    p_gamma: int

    @classmethod
    def from_indicator(cls, gamma: np.ndarray) -> "GammaMask":
        gamma = np.asarray(gamma, dtype=bool)
        selected = np.flatnonzero(gamma).astype(np.int64)
        gamma.setflags(write=False)
        selected.setflags(write=False)
        return cls(gamma, selected, int(selected.size))

    def digest(self) -> str:
        return hashlib.sha1(self.selected.tobytes()).hexdigest()[:12]


def marginal_utility(data: Dataset) -> np.ndarray:
    """Pearson correlation of each predictor column with the response.

    Requires standardized predictors and n >= 3.  Constant columns (and every
    column when the response is constant) get utility exactly 0.
    """
    if not data.standardized:
        raise ParameterError("marginal_utility expects standardized predictors")
    if data.n < 3:
        raise DimensionError("marginal_utility needs n >= 3")
    yc = data.y - data.y.mean()
    ynorm = np.linalg.norm(yc)
    if ynorm == 0.0:
        return np.zeros(data.p)
    xnorm = np.linalg.norm(data.X, axis=0)  # columns are already centered
    denom = np.where(xnorm == 0.0, 1.0, xnorm) * ynorm
    r = (data.X.T @ yc) / denom
    r[xnorm == 0.0] = 0.0
    return np.clip(r, -1.0, 1.0)


def default_delta(n: int, p: int) -> float:
    """Default screening exponent max{0, (1 + ln(p/n)) / 2}."""
    if n < 1 or p < 1:
        raise ParameterError("n and p must be >= 1")
    return max(0.0, (1.0 + np.log(p / n)) / 2.0)


def inclusion_probabilities(r: np.ndarray, delta: float) -> InclusionProbs:
    """q_j = |r_j|^delta normalized by the maximum, so the top column has q = 1.

    delta = 0 gives q = 1 everywhere (screening disabled, the plain
    compressed-regression / PCR limit).  If every utility is zero the result
    is flagged degenerate with q = 0 and the caller chooses a fallback.
    """
    if delta < 0:
        raise ParameterError(f"delta must be >= 0, got {delta}")
    a = np.abs(np.asarray(r, dtype=np.float64))
    if delta == 0.0:
        return InclusionProbs(np.ones_like(a), 0.0)
    amax = a.max() if a.size else 0.0
    if amax == 0.0:
        return InclusionProbs(np.zeros_like(a), float(delta), degenerate=True)
    return InclusionProbs((a / amax) ** delta, float(delta))


def sample_gamma(q: InclusionProbs, rng: np.random.Generator) -> GammaMask:
    """Independent Bernoulli(q_j) draws of the screening indicator.

    An empty draw is retried a bounded number of times, then the
    argmax-utility column is force-included so the result is never empty.
    """
    probs = q.q
    for _ in range(_GAMMA_RETRIES):
        gamma = rng.random(probs.shape[0]) < probs
        if gamma.any():
            return GammaMask.from_indicator(gamma)
    gamma = np.zeros(probs.shape[0], dtype=bool)
    gamma[int(np.argmax(probs))] = True
    return GammaMask.from_indicator(gamma)


def expected_selection_count(q: InclusionProbs) -> float:
    """Mean of the Poisson-binomial selection count: sum of q_j."""
    return float(q.q.sum())


def export_screened(data: Dataset, mask: GammaMask):
    """Column submatrix X_gamma in selected order with its column identifiers."""
    if mask.gamma.shape[0] != data.p:
        raise DimensionError("mask length does not match p")
    if mask.p_gamma == 0:
        raise ParameterError("cannot export an empty screen")
    names = tuple(data.col_names[j] for j in mask.selected)
    return data.X[:, mask.selected], names
