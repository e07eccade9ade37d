"""Ensemble orchestration: replicate draws, fits, and aggregation.

One run draws ``n_replicates`` independent configurations (m, psi, gamma, R),
fits the conjugate posterior on each compressed design, predicts the test
rows, and combines the replicates by simple averaging (default),
evidence-weighted model averaging, or K-fold cross-validation selection of a
single candidate.  Marginal utilities are computed once per run, never per
replicate.

Replicate ``l`` draws from a deterministic substream derived from
(seed, REPLICATE, l), so results are bit-reproducible regardless of
execution order or worker count, and any replicate can be re-run alone.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data import Dataset, RESPONSE_BINARY, RESPONSE_CONTINUOUS
from .errors import DimensionError, ParameterError, ReplicateError, TarpError
from .posterior import (PriorHyper, fit_compressed, log_marginal_likelihood,
                        predict, predict_probit, probit_gibbs)
from .projection import compress, gen_pcr_matrix, gen_rp_matrix, gen_sparse_rp_matrix
from .screening import (InclusionProbs, inclusion_probabilities, default_delta,
                        marginal_utility, sample_gamma)
from .studentt import t_cdf

BACKEND_RP = "ris-rp"
BACKEND_PCR = "ris-pcr"
BACKEND_SPARSE_RP = "sparse-ris-rp"
BACKENDS = (BACKEND_RP, BACKEND_PCR, BACKEND_SPARSE_RP)

AGG_AVERAGE = "average"
AGG_MODEL_AVERAGE = "model-average"
AGG_CV = "cv"
AGGREGATIONS = (AGG_AVERAGE, AGG_MODEL_AVERAGE, AGG_CV)

_UINT64 = (1 << 64) - 1
_DOMAIN_REPLICATE = 1
_DOMAIN_FOLDS = 2
_DOMAIN_DATASET = 3


def substream(seed: int, *key: int) -> np.random.Generator:
    """Deterministic child generator for (seed, key...)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed) & _UINT64,
                                                        spawn_key=tuple(key)))


def replicate_stream(seed: int, index: int) -> np.random.Generator:
    return substream(seed, _DOMAIN_REPLICATE, index)


def dataset_seed(seed: int, index: int) -> int:
    """Published per-dataset seed so any benchmark dataset is re-runnable alone.

    Kept within 48 bits so the value survives a float64 CSV column exactly.
    """
    ss = np.random.SeedSequence(entropy=int(seed) & _UINT64,
                                spawn_key=(_DOMAIN_DATASET, index))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 16)


@dataclass(frozen=True)
class TarpConfig:
    backend: str = BACKEND_RP
    delta: object = "auto"            # float >= 0, or "auto" for the default rule
    n_replicates: int = 100
    m_range: Optional[tuple] = None   # default [ceil(2 ln p), floor(3n/4)] clipped to [1, p]
    psi_range: tuple = (0.1, 0.4)
    kappa: float = 0.5
    prior: PriorHyper = field(default_factory=PriorHyper)
    aggregation: str = AGG_AVERAGE
    k_folds: int = 5
    level: float = 0.5
    seed: int = 0
    center_y: bool = True
    pi_method: str = "endpoints"      # or "mixture": pooled predictive quantiles
    probit_iterations: int = 2000
    probit_burnin: int = 500
    probit_average: bool = False
    keep_replicates: bool = True

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ParameterError(f"backend must be one of {BACKENDS}")
        if self.aggregation not in AGGREGATIONS:
            raise ParameterError(f"aggregation must be one of {AGGREGATIONS}")
        if self.delta != "auto" and float(self.delta) < 0:
            raise ParameterError("delta must be >= 0 or 'auto'")
        if self.n_replicates < 1:
            raise ParameterError("n_replicates must be >= 1")
        lo, hi = self.psi_range
        if not (0.0 < lo <= hi <= 0.5):
            raise ParameterError("psi_range must lie within (0, 0.5]")
        if self.m_range is not None:
            mlo, mhi = self.m_range
            if mlo < 1 or mhi < mlo:
                raise ParameterError("m_range must satisfy 1 <= lo <= hi")
        if not 0.0 < self.level < 1.0:
            raise ParameterError("level must lie in (0, 1)")
        if self.k_folds < 2:
            raise ParameterError("k_folds must be >= 2")
        if self.pi_method not in ("endpoints", "mixture"):
            raise ParameterError("pi_method must be 'endpoints' or 'mixture'")

    def resolved_delta(self, n: int, p: int) -> float:
        return default_delta(n, p) if self.delta == "auto" else float(self.delta)

    def resolved_m_range(self, n: int, p: int) -> tuple:
        if self.m_range is not None:
            lo, hi = int(self.m_range[0]), int(self.m_range[1])
        else:
            lo = int(np.ceil(2.0 * np.log(p)))
            hi = int(np.floor(3.0 * n / 4.0))
        lo = min(max(lo, 1), p)
        hi = min(max(hi, 1), p)
        if hi < lo:
            raise ParameterError(f"empty m range [{lo}, {hi}] after clipping")
        return lo, hi


@dataclass(frozen=True)
class ReplicateRecord:
    m: int
    m_effective: int
    psi: Optional[float]
    p_gamma: int
    mask_digest: str
    yhat: np.ndarray                     # probabilities on the binary path
    lower: Optional[np.ndarray] = None   # intervals omitted for binary runs
    upper: Optional[np.ndarray] = None
    scale: Optional[np.ndarray] = None   # per-point predictive t scale
    df: Optional[float] = None
    log_evidence: Optional[float] = None
    cv_mse: Optional[float] = None


@dataclass(frozen=True)
class TarpResult:
    yhat: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    per_replicate: Optional[tuple]
    config: TarpConfig
    wall_time: float
    phase_times: dict
    weights: Optional[np.ndarray] = None     # model averaging
    cv_mse: Optional[np.ndarray] = None      # cv selection
    selected_replicate: Optional[int] = None

    def __post_init__(self):
        if (self.lower > self.upper).any():
            raise TarpError("aggregated interval has lower > upper")
        if ((self.yhat < self.lower) | (self.yhat > self.upper)).any():
            raise TarpError("aggregated point prediction escaped its interval")


@dataclass(frozen=True)
class TarpBinaryResult:
    prob: np.ndarray
    per_replicate: Optional[tuple]
    config: TarpConfig
    wall_time: float
    phase_times: dict


def screening_probs(train: Dataset, cfg: TarpConfig) -> InclusionProbs:
    """Inclusion probabilities from the training data; pure in (train, cfg)."""
    r = marginal_utility(train)
    return inclusion_probabilities(r, cfg.resolved_delta(train.n, train.p))


def run_replicate(train: Dataset, X_new: np.ndarray, cfg: TarpConfig, index: int,
                  probs: Optional[InclusionProbs] = None,
                  y_offset: Optional[float] = None,
                  want_evidence: bool = False,
                  fold_plan: Optional[np.ndarray] = None,
                  phase: Optional[dict] = None) -> ReplicateRecord:
    """One (m, psi, gamma, R) draw, fit on all training rows, test prediction.

    The generator is derived from (cfg.seed, index) only, so a single
    replicate reproduces exactly what a full run computes at that index.
    """
    if probs is None:
        probs = screening_probs(train, cfg)
    if y_offset is None:
        y_offset = _offset(train, cfg)
    rng = replicate_stream(cfg.seed, index)
    m_lo, m_hi = cfg.resolved_m_range(train.n, train.p)
    m = int(rng.integers(m_lo, m_hi + 1))
    psi = float(rng.uniform(*cfg.psi_range)) if cfg.backend == BACKEND_RP else None

    t0 = time.perf_counter()
    mask = sample_gamma(probs, rng)
    t1 = time.perf_counter()
    if cfg.backend == BACKEND_RP:
        proj = gen_rp_matrix(mask.p_gamma, m, psi, rng, column_map=mask.selected)
    elif cfg.backend == BACKEND_SPARSE_RP:
        proj = gen_sparse_rp_matrix(mask.p_gamma, m, cfg.kappa, train.n, rng,
                                    column_map=mask.selected)
    else:
        proj = gen_pcr_matrix(train.X[:, mask.selected], m, column_map=mask.selected)
    Z = compress(train.X, proj)
    t2 = time.perf_counter()
    y_fit = train.y - y_offset
    post = fit_compressed(Z, y_fit, cfg.prior)
    log_ev = log_marginal_likelihood(Z, y_fit, cfg.prior) if want_evidence else None
    cv = None
    if fold_plan is not None:
        cv = kfold_mse(Z, y_fit, cfg.prior, cfg.k_folds, fold_plan=fold_plan, center=False)
    t3 = time.perf_counter()
    Z_new = compress(X_new, proj)
    summary = predict(post, Z_new, cfg.level)
    t4 = time.perf_counter()
    if phase is not None:
        phase["screen"] += t1 - t0
        phase["project"] += t2 - t1
        phase["fit"] += t3 - t2
        phase["predict"] += t4 - t3
    return ReplicateRecord(
        m=m, m_effective=proj.m, psi=psi, p_gamma=mask.p_gamma,
        mask_digest=mask.digest(),
        yhat=summary.mean + y_offset,
        lower=summary.lower + y_offset,
        upper=summary.upper + y_offset,
        scale=summary.marginal_scale, df=summary.df,
        log_evidence=log_ev, cv_mse=cv)


def run_tarp(train: Dataset, X_new: np.ndarray, cfg: TarpConfig) -> TarpResult:
    """Full ensemble run on a standardized training set and pre-transformed test rows."""
    _check_inputs(train, X_new)
    if train.response_kind != RESPONSE_CONTINUOUS:
        raise ParameterError("run_tarp is the Gaussian path; use run_tarp_binary")
    started = time.perf_counter()
    phase = {"screen": 0.0, "project": 0.0, "fit": 0.0, "predict": 0.0}
    t0 = time.perf_counter()
    probs = screening_probs(train, cfg)
    phase["screen"] += time.perf_counter() - t0
    y_offset = _offset(train, cfg)
    want_ev = cfg.aggregation == AGG_MODEL_AVERAGE
    fold_plan = None
    if cfg.aggregation == AGG_CV:
        if cfg.k_folds > train.n:
            raise ParameterError("k_folds cannot exceed n")
        fold_plan = substream(cfg.seed, _DOMAIN_FOLDS).permutation(train.n)

    records = []
    for l in range(cfg.n_replicates):
        try:
            records.append(run_replicate(train, X_new, cfg, l, probs=probs,
                                         y_offset=y_offset, want_evidence=want_ev,
                                         fold_plan=fold_plan, phase=phase))
        except Exception as exc:  # no silent skipping
            raise ReplicateError(l, cfg.seed, exc) from exc

    yhats = np.stack([r.yhat for r in records])
    lowers = np.stack([r.lower for r in records])
    uppers = np.stack([r.upper for r in records])
    weights = None
    cv_mse = None
    selected = None
    if cfg.aggregation == AGG_AVERAGE:
        yhat = yhats.mean(axis=0)
        if cfg.pi_method == "mixture":
            lower, upper = _mixture_interval(records, cfg.level)
        else:
            lower, upper = lowers.mean(axis=0), uppers.mean(axis=0)
    elif cfg.aggregation == AGG_MODEL_AVERAGE:
        log_ev = np.array([r.log_evidence for r in records])
        w = np.exp(log_ev - log_ev.max())
        weights = w / w.sum()
        yhat = weights @ yhats
        lower, upper = weights @ lowers, weights @ uppers
    else:
        cv_mse = np.array([r.cv_mse for r in records])
        selected = int(np.argmin(cv_mse))
        yhat, lower, upper = yhats[selected], lowers[selected], uppers[selected]

    return TarpResult(
        yhat=yhat, lower=lower, upper=upper,
        per_replicate=tuple(records) if cfg.keep_replicates else None,
        config=cfg, wall_time=time.perf_counter() - started, phase_times=phase,
        weights=weights, cv_mse=cv_mse, selected_replicate=selected)


def run_tarp_binary(train: Dataset, X_new: np.ndarray, cfg: TarpConfig) -> TarpBinaryResult:
    """Binary path: probit Gibbs per replicate, simple average of probabilities."""
    _check_inputs(train, X_new)
    if train.response_kind != RESPONSE_BINARY:
        raise ParameterError("run_tarp_binary requires a binary response")
    started = time.perf_counter()
    phase = {"screen": 0.0, "project": 0.0, "fit": 0.0, "predict": 0.0}
    t0 = time.perf_counter()
    probs = screening_probs(train, cfg)
    phase["screen"] += time.perf_counter() - t0
    m_lo, m_hi = cfg.resolved_m_range(train.n, train.p)

    records = []
    prob_stack = np.empty((cfg.n_replicates, X_new.shape[0]))
    for l in range(cfg.n_replicates):
        try:
            rng = replicate_stream(cfg.seed, l)
            m = int(rng.integers(m_lo, m_hi + 1))
            psi = float(rng.uniform(*cfg.psi_range)) if cfg.backend == BACKEND_RP else None
            t1 = time.perf_counter()
            mask = sample_gamma(probs, rng)
            t2 = time.perf_counter()
            if cfg.backend == BACKEND_RP:
                proj = gen_rp_matrix(mask.p_gamma, m, psi, rng, column_map=mask.selected)
            elif cfg.backend == BACKEND_SPARSE_RP:
                proj = gen_sparse_rp_matrix(mask.p_gamma, m, cfg.kappa, train.n, rng,
                                            column_map=mask.selected)
            else:
                proj = gen_pcr_matrix(train.X[:, mask.selected], m, column_map=mask.selected)
            Z = compress(train.X, proj)
            t3 = time.perf_counter()
            fit = probit_gibbs(Z, train.y, cfg.probit_iterations, cfg.probit_burnin,
                               rng, keep_draws=cfg.probit_average)
            t4 = time.perf_counter()
            p_l = predict_probit(fit, compress(X_new, proj), average=cfg.probit_average)
            t5 = time.perf_counter()
            phase["screen"] += t2 - t1
            phase["project"] += t3 - t2
            phase["fit"] += t4 - t3
            phase["predict"] += t5 - t4
            prob_stack[l] = p_l
            records.append(ReplicateRecord(
                m=m, m_effective=proj.m, psi=psi, p_gamma=mask.p_gamma,
                mask_digest=mask.digest(), yhat=p_l))
        except Exception as exc:
            raise ReplicateError(l, cfg.seed, exc) from exc

    return TarpBinaryResult(
        prob=prob_stack.mean(axis=0),
        per_replicate=tuple(records) if cfg.keep_replicates else None,
        config=cfg, wall_time=time.perf_counter() - started, phase_times=phase)


def kfold_mse(Z: np.ndarray, y: np.ndarray, prior: PriorHyper, k: int,
              rng: Optional[np.random.Generator] = None,
              fold_plan: Optional[np.ndarray] = None,
              center: bool = True) -> float:
    """Mean over K folds of the mean squared validation error of the conjugate fit.

    Folds are contiguous blocks of a seeded shuffle (pass ``fold_plan`` to
    share one shuffle across candidates).  k = n gives leave-one-out.
    """
    Z = np.asarray(Z, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if k < 2:
        raise ParameterError("k must be >= 2")
    if k > n:
        raise ParameterError("k cannot exceed n")
    if fold_plan is None:
        fold_plan = (rng or np.random.default_rng(0)).permutation(n)
    folds = np.array_split(np.asarray(fold_plan), k)
    errors = np.empty(k)
    for i, val in enumerate(folds):
        tr = np.setdiff1d(fold_plan, val, assume_unique=True)
        offset = y[tr].mean() if center else 0.0
        post = fit_compressed(Z[tr], y[tr] - offset, prior)
        pred = Z[val] @ post.mu_t + offset
        errors[i] = np.mean((pred - y[val]) ** 2)
    return float(errors.mean())


def _offset(train: Dataset, cfg: TarpConfig) -> float:
    if cfg.center_y and train.response_kind == RESPONSE_CONTINUOUS:
        return float(train.y.mean())
    return 0.0


def _check_inputs(train: Dataset, X_new: np.ndarray) -> None:
    if not train.standardized:
        raise ParameterError("training data must be standardized first")
    X_new = np.asarray(X_new)
    if X_new.ndim != 2 or X_new.shape[1] != train.p:
        raise DimensionError("X_new must be 2-d with p columns (training statistics applied)")


def _mixture_interval(records, level: float):
    """Central ``level`` interval of the equal-weight pool of the per-replicate
    predictive t marginals, solved per test point by bisection on the mixture CDF."""
    means = np.stack([r.yhat for r in records])                  # N x n_test
    scales = np.stack([r.scale for r in records])
    df = records[0].df
    lower = _mixture_quantile(means, scales, df, (1.0 - level) / 2.0)
    upper = _mixture_quantile(means, scales, df, (1.0 + level) / 2.0)
    return lower, upper


def _mixture_quantile(means, scales, df, prob, iters=80):
    cdf = lambda x: t_cdf((x[None, :] - means) / scales, df).mean(axis=0)
    lo = (means - 40.0 * scales).min(axis=0)
    hi = (means + 40.0 * scales).max(axis=0)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = cdf(mid) < prob
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)
