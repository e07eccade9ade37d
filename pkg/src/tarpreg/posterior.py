"""Exact conjugate inference on compressed features.

Model: y = Z theta + e with e ~ N(0, sigma^2 I), prior theta | sigma^2 ~
N(0, sigma^2 sigma_theta^2 I) and sigma^2 ~ Inv-Gamma(a, b).  With
sigma_theta = 1 the posterior of theta is a scaled multivariate t with
df = n + 2a, location mu = W Z'y and W = (I + Z'Z)^{-1}; sigma^2 is
Inv-Gamma(a + n/2, (y'y - mu' W^{-1} mu)/2 + b); and the predictive at a
compressed row z is a scaled t with the same df, mean z'mu and squared scale
(y'y - mu' W^{-1} mu + 2b)(1 + z' W z) / df.

Everything goes through one Cholesky factorization of W^{-1} = I + Z'Z
(never re-inverting W); the log determinant from the same factor feeds the
marginal likelihood used as the model-averaging weight.

For binary responses a probit data-augmentation Gibbs sampler replaces the
closed form: latent y*_i ~ N(z_i'theta, 1) with y*_i > 0 iff y_i = 1, and
theta | y* ~ N((Z'Z + I)^{-1} Z'y*, (Z'Z + I)^{-1}).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg, special

from .errors import DimensionError, IngestionError, ParameterError, TarpError
from .studentt import t_interval_halfwidth


@dataclass(frozen=True)
class PriorHyper:
    a_sigma: float = 0.02
    b_sigma: float = 0.02
    theta_scale: float = 1.0

    def __post_init__(self):
        if self.a_sigma <= 0 or self.b_sigma <= 0 or self.theta_scale <= 0:
            raise ParameterError("prior hyperparameters must be strictly positive")


@dataclass(frozen=True)
class CompressedPosterior:
    mu_t: np.ndarray         # posterior location, length m
    W: np.ndarray            # m x m, (I/sigma_theta^2 + Z'Z)^{-1}
    df: float                # n + 2 a_sigma
    scale_factor: float      # y'y - mu' W^{-1} mu + 2 b_sigma
    n: int
    prior: PriorHyper
    log_det_W: float

    @property
    def m(self) -> int:
        return self.mu_t.shape[0]


@dataclass(frozen=True)
class PredictiveSummary:
    mean: np.ndarray
    marginal_scale: np.ndarray
    df: float
    lower: np.ndarray
    upper: np.ndarray
    level: float


@dataclass(frozen=True)
class ProbitFit:
    theta_mean: np.ndarray
    draws: int
    burnin: int
    theta_draws: Optional[np.ndarray] = None  # post-burnin draws, draws x m


def fit_compressed(Z: np.ndarray, y: np.ndarray, prior: PriorHyper) -> CompressedPosterior:
    Z = np.asarray(Z, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[0] < 1 or Z.shape[1] < 1:
        raise DimensionError("Z must be n x m with n, m >= 1")
    if y.shape != (Z.shape[0],):
        raise DimensionError("y length must match Z rows")
    if not (np.isfinite(Z).all() and np.isfinite(y).all()):
        raise IngestionError("fit_compressed requires finite inputs")
    n, m = Z.shape
    A = Z.T @ Z + np.eye(m) / prior.theta_scale ** 2
    cho = linalg.cho_factor(A, lower=False, check_finite=False)
    Zty = Z.T @ y
    mu = linalg.cho_solve(cho, Zty, check_finite=False)
    W = linalg.cho_solve(cho, np.eye(m), check_finite=False)
    W = (W + W.T) / 2.0
    log_det_W = -2.0 * float(np.sum(np.log(np.diag(cho[0]))))
    scale_factor = float(y @ y - mu @ Zty + 2.0 * prior.b_sigma)
    if scale_factor <= 0:
        raise TarpError("scale factor must be positive; numerical failure in fit")
    return CompressedPosterior(mu, W, float(n + 2.0 * prior.a_sigma),
                               scale_factor, n, prior, log_det_W)


def sigma2_posterior(post: CompressedPosterior):
    """Inverse-gamma (shape, rate) of sigma^2; rate equals scale_factor / 2."""
    shape = post.prior.a_sigma + post.n / 2.0
    rate = (post.scale_factor - 2.0 * post.prior.b_sigma) / 2.0 + post.prior.b_sigma
    direct = post.scale_factor / 2.0
    if abs(rate - direct) > 1e-12 * max(1.0, direct):
        raise TarpError("sigma^2 rate identity violated")
    return shape, rate


def predict(post: CompressedPosterior, Z_new: np.ndarray, level: float) -> PredictiveSummary:
    """Per-point predictive mean, t scale, and central ``level`` interval.

    Only the marginal scales (diagonal of the predictive scale matrix) are
    formed, never the full n_new x n_new matrix.
    """
    Z_new = np.atleast_2d(np.asarray(Z_new, dtype=np.float64))
    if Z_new.shape[1] != post.m:
        raise DimensionError(f"Z_new has {Z_new.shape[1]} columns, expected {post.m}")
    if not 0.0 < level < 1.0:
        raise ParameterError("level must lie in (0, 1)")
    mean = Z_new @ post.mu_t
    quad = np.einsum("ij,jk,ik->i", Z_new, post.W, Z_new)
    scale = np.sqrt(post.scale_factor * (1.0 + quad) / post.df)
    half = t_interval_halfwidth(level, post.df) * scale
    return PredictiveSummary(mean, scale, post.df, mean - half, mean + half, level)


def log_marginal_likelihood(Z: np.ndarray, y: np.ndarray, prior: PriorHyper) -> float:
    """Log evidence of the conjugate model, the model-averaging weight.

    Uses the same factorization as the fit; constant terms are kept so the
    value is comparable across models on the same data.
    """
    post = fit_compressed(Z, y, prior)
    n, m = post.n, post.m
    return (-(n / 2.0) * np.log(2.0 * np.pi)
            + 0.5 * post.log_det_W - m * np.log(prior.theta_scale)
            + prior.a_sigma * np.log(prior.b_sigma) - special.gammaln(prior.a_sigma)
            + special.gammaln(post.df / 2.0)
            - (post.df / 2.0) * np.log(post.scale_factor / 2.0))


def probit_gibbs(Z: np.ndarray, y: np.ndarray, iterations: int, burnin: int,
                 rng: np.random.Generator, keep_draws: bool = True) -> ProbitFit:
    """Data-augmentation Gibbs sampler for probit regression on compressed rows.

    Alternates theta | y* ~ N((Z'Z + I)^{-1} Z'y*, (Z'Z + I)^{-1}) with
    truncated-normal updates of the latent y* (positive iff y = 1).  Returns
    the post-burnin mean of theta (and the draws for optional averaging).
    """
    Z = np.asarray(Z, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not np.isin(y, (0.0, 1.0)).all():
        raise ParameterError("probit_gibbs requires a binary response in {0, 1}")
    if not iterations > burnin >= 0:
        raise ParameterError("need iterations > burnin >= 0")
    n, m = Z.shape
    upper = linalg.cho_factor(Z.T @ Z + np.eye(m), lower=False, check_finite=False)
    pos = y == 1.0
    theta = np.zeros(m)
    kept = np.empty((iterations - burnin, m))
    for it in range(iterations):
        eta = Z @ theta
        ystar = _truncated_latent(eta, pos, rng)
        mean = linalg.cho_solve(upper, Z.T @ ystar, check_finite=False)
        noise = linalg.solve_triangular(upper[0], rng.standard_normal(m),
                                        lower=False, check_finite=False)
        theta = mean + noise
        if it >= burnin:
            kept[it - burnin] = theta
    return ProbitFit(kept.mean(axis=0), iterations - burnin, burnin,
                     kept if keep_draws else None)


def predict_probit(fit: ProbitFit, Z_new: np.ndarray, average: bool = False) -> np.ndarray:
    """P(y = 1) = Phi(z' theta); plug-in at the posterior mean by default,
    averaged over retained draws when ``average`` is set."""
    Z_new = np.atleast_2d(np.asarray(Z_new, dtype=np.float64))
    if Z_new.shape[1] != fit.theta_mean.shape[0]:
        raise DimensionError("Z_new column count does not match fit")
    if average:
        if fit.theta_draws is None:
            raise ParameterError("fit retained no draws; rerun with keep_draws=True")
        return special.ndtr(Z_new @ fit.theta_draws.T).mean(axis=1)
    return special.ndtr(Z_new @ fit.theta_mean)


def _truncated_latent(eta: np.ndarray, pos: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sample y*_i ~ N(eta_i, 1) truncated to (0, inf) if pos_i else (-inf, 0].

    Inverse-CDF in the complementary tail (stable down to ~1e-300 tail mass);
    in the extreme far tail the conditional law is approximated by the
    boundary exponential with rate |eta|.
    """
    u = rng.random(eta.shape[0])
    sign = np.where(pos, 1.0, -1.0)
    e = sign * eta                   # reflected problem: sample w >= -e, add back
    q = special.ndtr(e)              # tail mass beyond the truncation point
    deep = q < 1e-300
    z = -special.ndtri(np.clip(u * q, 1e-308, 1.0))
    ystar = sign * (e + z)
    if deep.any():
        rate = np.maximum(-e[deep], 1.0)
        ystar[deep] = sign[deep] * (-np.log(u[deep]) / rate)
    return ystar
