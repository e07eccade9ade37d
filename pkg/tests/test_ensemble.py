import numpy as np
import pytest

from tarpreg import (Dataset, ParameterError, PriorHyper, ReplicateError,
                     TarpConfig, apply_standardization, fit_compressed, kfold_mse,
                     run_replicate, run_tarp, run_tarp_binary, screening_probs,
                     standardize)
from tarpreg.simulate import SchemeSpec, generate


def _toy(seed=0, n=60, p=40, n_active=5, noise=1.0):
    data = generate(SchemeSpec("ar1", n=n, p=p, n_test=25, n_active=n_active,
                               noise_sd=noise, seed=seed))
    std = standardize(data.train)
    return std, apply_standardization(std, data.test_X), data


def test_single_replicate_run_equals_that_replicate():
    std, Xn, _ = _toy()
    cfg = TarpConfig(n_replicates=1, seed=11)
    res = run_tarp(std, Xn, cfg)
    rec = run_replicate(std, Xn, cfg, 0)
    assert np.array_equal(res.yhat, rec.yhat)
    assert np.array_equal(res.lower, rec.lower)
    assert np.array_equal(res.upper, rec.upper)


def test_zero_response_predicts_zero_with_symmetric_intervals():
    rng = np.random.default_rng(1)
    train = standardize(Dataset.from_arrays(rng.normal(size=(30, 10)), np.zeros(30),
                                            response_kind="continuous"))
    Xn = apply_standardization(train, rng.normal(size=(8, 10)))
    res = run_tarp(train, Xn, TarpConfig(n_replicates=4, seed=2))
    assert res.yhat == pytest.approx(np.zeros(8))
    assert res.upper == pytest.approx(-res.lower)


def test_bit_reproducible_across_runs():
    std, Xn, _ = _toy(seed=3)
    cfg = TarpConfig(n_replicates=6, seed=9)
    a = run_tarp(std, Xn, cfg)
    b = run_tarp(std, Xn, cfg)
    assert np.array_equal(a.yhat, b.yhat)
    assert np.array_equal(a.lower, b.lower)
    assert np.array_equal(a.upper, b.upper)


def test_delta_zero_selects_everything():
    std, Xn, _ = _toy(seed=4)
    for backend in ("ris-rp", "ris-pcr"):
        cfg = TarpConfig(backend=backend, delta=0.0, n_replicates=3, seed=5)
        probs = screening_probs(std, cfg)
        assert probs.q.tolist() == [1.0] * std.p
        res = run_tarp(std, Xn, cfg)
        assert all(rec.p_gamma == std.p for rec in res.per_replicate)


def test_averaging_linearity():
    std, Xn, _ = _toy(seed=6)
    cfg = TarpConfig(n_replicates=5, seed=13)
    full = run_tarp(std, Xn, cfg)
    singles = [run_replicate(std, Xn, cfg, l) for l in range(5)]
    assert full.yhat == pytest.approx(np.mean([s.yhat for s in singles], axis=0), rel=1e-15)
    assert full.lower == pytest.approx(np.mean([s.lower for s in singles], axis=0), rel=1e-15)


def test_model_average_weights():
    std, Xn, _ = _toy(seed=7)
    cfg = TarpConfig(n_replicates=6, seed=3, aggregation="model-average")
    res = run_tarp(std, Xn, cfg)
    assert res.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert (res.weights >= 0).all()
    # invariance to a constant shift of every log evidence
    log_ev = np.array([r.log_evidence for r in res.per_replicate])
    w = np.exp(log_ev + 123.0 - (log_ev + 123.0).max())
    assert res.weights == pytest.approx(w / w.sum(), rel=1e-10)


def test_cv_aggregation_picks_minimum():
    std, Xn, _ = _toy(seed=8)
    cfg = TarpConfig(n_replicates=5, seed=4, aggregation="cv", k_folds=4)
    res = run_tarp(std, Xn, cfg)
    assert res.selected_replicate == int(np.argmin(res.cv_mse))
    chosen = res.per_replicate[res.selected_replicate]
    assert np.array_equal(res.yhat, chosen.yhat)


def test_interval_width_monotone_in_level():
    std, Xn, _ = _toy(seed=9)
    lo = run_tarp(std, Xn, TarpConfig(n_replicates=4, seed=6, level=0.5))
    hi = run_tarp(std, Xn, TarpConfig(n_replicates=4, seed=6, level=0.8))
    assert ((hi.upper - hi.lower) > (lo.upper - lo.lower)).all()


def test_mixture_interval_contains_more_than_endpoint_average():
    std, Xn, _ = _toy(seed=10)
    base = TarpConfig(n_replicates=8, seed=7)
    ends = run_tarp(std, Xn, base)
    from dataclasses import replace
    mix = run_tarp(std, Xn, replace(base, pi_method="mixture"))
    assert np.array_equal(ends.yhat, mix.yhat)
    # pooled quantiles widen (or match) averaged endpoints when replicates disagree
    assert ((mix.upper - mix.lower) >= (ends.upper - ends.lower) - 1e-9).all()


def test_sparse_backend_runs():
    std, Xn, _ = _toy(seed=11)
    res = run_tarp(std, Xn, TarpConfig(backend="sparse-ris-rp", kappa=0.5,
                                       n_replicates=3, seed=8))
    assert np.isfinite(res.yhat).all()


def test_requires_standardized_train():
    data = generate(SchemeSpec("ar1", n=30, p=20, n_test=5, n_active=3, seed=0))
    with pytest.raises(ParameterError):
        run_tarp(data.train, data.test_X, TarpConfig(n_replicates=1))


def test_empty_m_range_rejected():
    with pytest.raises(ParameterError):
        TarpConfig(m_range=(5, 2))
    # clipping to [1, p] can empty a user range only if lo > p already
    cfg = TarpConfig(m_range=(30, 60))
    assert cfg.resolved_m_range(100, 40) == (30, 40)


def test_replicate_failure_reports_index_and_seed(monkeypatch):
    std, Xn, _ = _toy(seed=12)
    import tarpreg.ensemble as ens
    real = ens.fit_compressed
    calls = {"n": 0}

    def flaky(*args, **kwargs):
        calls["n"] += 1
        if calls["n"] == 2:
            raise RuntimeError("synthetic failure")
        return real(*args, **kwargs)

    monkeypatch.setattr(ens, "fit_compressed", flaky)
    with pytest.raises(ReplicateError) as err:
        run_tarp(std, Xn, TarpConfig(n_replicates=4, seed=99))
    assert err.value.index == 1
    assert err.value.seed == 99


def test_binary_balanced_symmetric_probabilities():
    rng = np.random.default_rng(13)
    n, p = 60, 12
    X = rng.normal(size=(n, p))
    y = (np.arange(n) % 2).astype(float)  # labels independent of X
    train = standardize(Dataset.from_arrays(X, y))
    Xn = apply_standardization(train, rng.normal(size=(30, p)))
    cfg = TarpConfig(n_replicates=6, seed=3, probit_iterations=300, probit_burnin=100)
    res = run_tarp_binary(train, Xn, cfg)
    assert np.abs(res.prob - 0.5).mean() < 0.2


def test_binary_requires_binary_response():
    std, Xn, _ = _toy(seed=14)
    with pytest.raises(ParameterError):
        run_tarp_binary(std, Xn, TarpConfig(n_replicates=1))


def test_continuous_path_rejects_binary():
    rng = np.random.default_rng(15)
    train = standardize(Dataset.from_arrays(rng.normal(size=(20, 5)),
                                            (rng.random(20) < 0.5).astype(float)))
    with pytest.raises(ParameterError):
        run_tarp(train, np.zeros((2, 5)), TarpConfig(n_replicates=1))


def test_kfold_perfect_fit_is_zero():
    rng = np.random.default_rng(16)
    Z = rng.normal(size=(40, 3)) * 300.0
    beta = np.array([1.0, -2.0, 0.5]) / 300.0
    y = Z @ beta  # order-1 responses, exactly linear, no noise
    got = kfold_mse(Z, y, PriorHyper(), 5, rng=np.random.default_rng(0), center=False)
    assert got < 1e-10


def test_kfold_null_candidate_matches_variance():
    rng = np.random.default_rng(17)
    y = rng.normal(size=400)
    got = kfold_mse(np.zeros((400, 1)), y, PriorHyper(), 5,
                    rng=np.random.default_rng(1), center=True)
    assert got == pytest.approx(np.var(y), rel=0.10)


def test_kfold_loo_matches_bruteforce():
    rng = np.random.default_rng(18)
    Z = rng.normal(size=(12, 2))
    y = rng.normal(size=12)
    plan = np.random.default_rng(2).permutation(12)
    got = kfold_mse(Z, y, PriorHyper(), 12, fold_plan=plan, center=False)
    errs = []
    for i in plan:
        keep = np.array([j for j in plan if j != i])
        post = fit_compressed(Z[keep], y[keep], PriorHyper())
        errs.append((Z[i] @ post.mu_t - y[i]) ** 2)
    assert got == pytest.approx(np.mean(errs), rel=1e-12)


def test_kfold_validates_k():
    with pytest.raises(ParameterError):
        kfold_mse(np.zeros((5, 1)), np.zeros(5), PriorHyper(), 6)
    with pytest.raises(ParameterError):
        kfold_mse(np.zeros((5, 1)), np.zeros(5), PriorHyper(), 1)
