"""Seeded generators for the four benchmark simulation designs.

* ``ar1``     rows from a stationary AR(1) predictor process,
              corr(x_i, x_j) = rho^|i-j|
* ``block``   (p - 200)/block_size equicorrelated blocks (half at rho_low,
              half at rho_high) plus 200 independent predictors; all but one
              active column sit in high-correlation blocks
* ``pcr``     rank-3 covariance P diag(15^2, 10^2, 7^2) P' with the response
              driven by the leading principal direction; a few training rows
              perturbed to isotropic wide-variance outliers
* ``bridge``  each row is one Brownian-bridge path on (0, t_max), pinned to 0
              at both ends, read at p equispaced interior points and scaled so
              the midpoint standard deviation equals t_max / 4

Unless a scheme defines its own coefficients, ``n_active`` random columns get
coefficient ``coef_value`` and y = X beta + noise_sd * N(0, I).  Generators
emit raw (unstandardized) data; standardization is the caller's step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .data import Dataset
from .errors import DimensionError, ParameterError

SCHEME_AR1 = "ar1"
SCHEME_BLOCK = "block"
SCHEME_PCR = "pcr"
SCHEME_BRIDGE = "bridge"
SCHEMES = (SCHEME_AR1, SCHEME_BLOCK, SCHEME_PCR, SCHEME_BRIDGE)


@dataclass(frozen=True)
class SchemeSpec:
    scheme: str
    n: int = 200
    p: int = 2000
    n_test: int = 100
    n_active: int = 50
    coef_value: float = 1.0
    noise_sd: float = 1.0
    rho: float = 0.3                  # ar1
    block_size: int = 100             # block
    rho_low: float = 0.3
    rho_high: float = 0.9
    n_outliers: int = 5               # pcr
    outlier_sd: float = 10.0
    residual_sd: float = 0.0          # optional isotropic term for the rank-3 design
    t_max: float = 10.0               # bridge
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ParameterError(f"scheme must be one of {SCHEMES}")
        if self.n < 2 or self.p < 1 or self.n_test < 1:
            raise DimensionError("need n >= 2, p >= 1, n_test >= 1")
        if self.scheme != SCHEME_PCR and self.n_active > self.p:
            raise ParameterError("n_active cannot exceed p")
        if abs(self.rho) >= 1:
            raise ParameterError("|rho| must be < 1")
        if self.scheme == SCHEME_BLOCK:
            if self.p < 400:
                raise ParameterError("block scheme needs p >= 400")
            if (self.p - 200) % self.block_size:
                raise ParameterError("block_size must divide p - 200")
        if self.scheme == SCHEME_PCR:
            if self.p < 3:
                raise ParameterError("rank-3 scheme needs p >= 3")
            if self.n_outliers >= self.n:
                raise ParameterError("n_outliers must be < n")
        if self.noise_sd < 0 or self.outlier_sd <= 0 or self.t_max <= 0:
            raise ParameterError("scale parameters must be positive")


@dataclass(frozen=True)
class SimulatedData:
    train: Dataset
    test_X: np.ndarray
    test_y: np.ndarray
    true_beta: np.ndarray
    active_idx: np.ndarray
    spec: SchemeSpec


def generate(spec: SchemeSpec) -> SimulatedData:
    gen = {SCHEME_AR1: gen_scheme1, SCHEME_BLOCK: gen_scheme2,
           SCHEME_PCR: gen_scheme3, SCHEME_BRIDGE: gen_scheme4}[spec.scheme]
    return gen(spec)


def make_response(X: np.ndarray, beta: np.ndarray, noise_sd: float,
                  rng: np.random.Generator) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if X.shape[1] != beta.shape[0]:
        raise DimensionError("beta length must match X columns")
    return X @ beta + noise_sd * rng.standard_normal(X.shape[0])


def gen_scheme1(spec: SchemeSpec) -> SimulatedData:
    """Stationary AR(1) predictors: x_1 = e_1, x_j = rho x_{j-1} + sqrt(1-rho^2) e_j."""
    rng = np.random.default_rng(spec.seed)
    rows = spec.n + spec.n_test
    eps = rng.standard_normal((rows, spec.p))
    eps[:, 1:] *= np.sqrt(1.0 - spec.rho ** 2)
    X = signal.lfilter([1.0], [1.0, -spec.rho], eps, axis=1)
    active = np.sort(rng.choice(spec.p, spec.n_active, replace=False))
    beta = np.zeros(spec.p)
    beta[active] = spec.coef_value
    y = make_response(X, beta, spec.noise_sd, rng)
    return _package(spec, X, y, beta, active)


def gen_scheme2(spec: SchemeSpec) -> SimulatedData:
    """Equicorrelated blocks via the one-factor construction
    x = sqrt(rho) g_block + sqrt(1-rho) e, plus an independent tail of 200."""
    rng = np.random.default_rng(spec.seed)
    rows = spec.n + spec.n_test
    n_blocks = (spec.p - 200) // spec.block_size
    n_low = n_blocks // 2
    X = np.empty((rows, spec.p))
    col = 0
    high_cols = []
    for b in range(n_blocks):
        rho = spec.rho_low if b < n_low else spec.rho_high
        g = rng.standard_normal((rows, 1))
        e = rng.standard_normal((rows, spec.block_size))
        X[:, col:col + spec.block_size] = np.sqrt(rho) * g + np.sqrt(1.0 - rho) * e
        if b >= n_low:
            high_cols.extend(range(col, col + spec.block_size))
        col += spec.block_size
    X[:, col:] = rng.standard_normal((rows, 200))

    if spec.n_active - 1 > len(high_cols):
        raise ParameterError("not enough high-correlation columns for the active set")
    if spec.n_active == 0:
        active = np.empty(0, dtype=np.int64)
    else:
        active_high = rng.choice(np.asarray(high_cols), spec.n_active - 1, replace=False)
        active_tail = rng.integers(col, spec.p)
        active = np.sort(np.append(active_high, active_tail)).astype(np.int64)
    beta = np.zeros(spec.p)
    beta[active] = spec.coef_value
    y = make_response(X, beta, spec.noise_sd, rng)
    return _package(spec, X, y, beta, active)


def gen_scheme3(spec: SchemeSpec) -> SimulatedData:
    """Rank-3 covariance P diag(15^2,10^2,7^2) P'; beta is the first column of P.

    The first n rows are training rows; n_outliers of them are replaced by
    isotropic N(0, outlier_sd^2) regressors, with their responses regenerated
    through the same model.
    """
    rng = np.random.default_rng(spec.seed)
    rows = spec.n + spec.n_test
    P, _ = np.linalg.qr(rng.standard_normal((spec.p, 3)))
    d_half = np.array([15.0, 10.0, 7.0])
    X = rng.standard_normal((rows, 3)) * d_half @ P.T
    if spec.residual_sd > 0:
        X += spec.residual_sd * rng.standard_normal((rows, spec.p))
    beta = P[:, 0].copy()
    y = make_response(X, beta, spec.noise_sd, rng)
    if spec.n_outliers:
        out_rows = rng.choice(spec.n, spec.n_outliers, replace=False)
        X[out_rows] = spec.outlier_sd * rng.standard_normal((spec.n_outliers, spec.p))
        y[out_rows] = X[out_rows] @ beta + spec.noise_sd * rng.standard_normal(spec.n_outliers)
    return _package(spec, X, y, beta, np.empty(0, dtype=np.int64))


def gen_scheme4(spec: SchemeSpec) -> SimulatedData:
    """Brownian-bridge rows on (0, t_max) by the sequential conditional
    construction, pinned to 0 at both ends and scaled so sd at the midpoint
    is t_max / 4."""
    if spec.p < 2:
        raise DimensionError("bridge scheme needs p >= 2")
    rng = np.random.default_rng(spec.seed)
    rows = spec.n + spec.n_test
    T = spec.t_max
    t = T * np.arange(1, spec.p + 1) / (spec.p + 1)
    X = np.empty((rows, spec.p))
    prev = np.zeros(rows)
    t_prev = 0.0
    for j in range(spec.p):
        gap_left = t[j] - t_prev
        gap_right = T - t[j]
        mean = prev * gap_right / (T - t_prev)
        var = gap_left * gap_right / (T - t_prev)
        prev = mean + np.sqrt(var) * rng.standard_normal(rows)
        X[:, j] = prev
        t_prev = t[j]
    X *= np.sqrt(T / 4.0)  # midpoint sd of the raw bridge is sqrt(T)/2
    active = np.sort(rng.choice(spec.p, spec.n_active, replace=False))
    beta = np.zeros(spec.p)
    beta[active] = spec.coef_value
    y = make_response(X, beta, spec.noise_sd, rng)
    return _package(spec, X, y, beta, active)


def bridge_covariance(s: float, t: float, t_max: float) -> float:
    """Scaled bridge covariance: (t_max/4) * s (1 - t/t_max) for s <= t."""
    s, t = min(s, t), max(s, t)
    return (t_max / 4.0) * s * (1.0 - t / t_max)


def _package(spec: SchemeSpec, X, y, beta, active) -> SimulatedData:
    train = Dataset.from_arrays(X[:spec.n], y[:spec.n])
    beta = np.asarray(beta, dtype=np.float64)
    beta.setflags(write=False)
    active = np.asarray(active, dtype=np.int64)
    active.setflags(write=False)
    return SimulatedData(train, X[spec.n:].copy(), y[spec.n:].copy(), beta, active, spec)
