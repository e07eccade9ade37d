"""Desk-scale tour of the four simulation designs.

For each scheme, generates a reduced-size dataset and reports both back-ends'
out-of-sample error against the trivial mean predictor, so the effect of the
predictor correlation structure is visible at a glance.
"""
import numpy as np

from tarpreg import (SchemeSpec, TarpConfig, apply_standardization, ecp_width,
                     generate, mspe, run_tarp, standardize)

SPECS = {
    "ar1    (weak serial correlation)": SchemeSpec("ar1", n=150, p=1000, n_test=150,
                                                   n_active=10, seed=1),
    "block  (strong within-block corr)": SchemeSpec("block", n=150, p=1000, n_test=150,
                                                    n_active=10, seed=2),
    "pcr    (three dominant factors)": SchemeSpec("pcr", n=150, p=1000, n_test=150,
                                                  seed=3),
    "bridge (smooth functional rows)": SchemeSpec("bridge", n=150, p=1000, n_test=150,
                                                  n_active=10, seed=4),
}

print(f"{'scheme':34s} {'var(y)':>7s} {'null':>6s} {'ris-rp':>7s} {'ris-pcr':>8s} "
      f"{'rp ECP%':>8s} {'pcr ECP%':>9s}")
for label, spec in SPECS.items():
    data = generate(spec)
    train = standardize(data.train)
    X_test = apply_standardization(train, data.test_X)
    null = mspe(np.full_like(data.test_y, train.y.mean()), data.test_y)
    row = [np.var(data.test_y), null]
    ecps = []
    for backend in ("ris-rp", "ris-pcr"):
        cfg = TarpConfig(backend=backend, delta="auto", n_replicates=40, seed=5)
        res = run_tarp(train, X_test, cfg)
        row.append(mspe(res.yhat, data.test_y))
        ecp, _ = ecp_width(res.lower, res.upper, data.test_y)
        ecps.append(100 * ecp)
    print(f"{label:34s} {row[0]:7.1f} {row[1]:6.1f} {row[2]:7.1f} {row[3]:8.1f} "
          f"{ecps[0]:8.1f} {ecps[1]:9.1f}")

print("\nreading: the strongly structured designs (block, pcr, bridge) compress "
      "well,\nso both back-ends recover most of the signal; the weakly correlated "
      "ar1 design\nwith equal-strength signals is intrinsically hard for marginal "
      "screening.")
