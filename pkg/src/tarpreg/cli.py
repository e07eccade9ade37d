"""Batch command-line front end.

Subcommands::

    simulate   write train/test CSVs plus a JSON sidecar for one scheme
    fit        fit on a training CSV, predict a test CSV, write predictions
    benchmark  run many simulated datasets and report metric means/sds
    screen     screening diagnostics and screened-column export for a CSV

Config files are flat ``key=value`` lines (``#`` comments allowed); any
command-line flag overrides the file value, and the effective configuration
is echoed into the run summary.  All failures print a machine-readable JSON
object on stderr and exit nonzero.  Benchmark outputs are bit-identical for
any ``--workers`` value; wall-clock timings go to a separate ``.timing.json``
so the data files stay deterministic.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace

import numpy as np

from . import __version__
from .data import (RESPONSE_BINARY, apply_standardization, read_csv,
                   standardize, write_csv, write_matrix_csv)
from .ensemble import (AGGREGATIONS, BACKENDS, BACKEND_RP, TarpConfig,
                       dataset_seed, run_tarp, run_tarp_binary, substream)
from .errors import ParameterError, TarpError
from .metrics import ecp_width, mspe
from .posterior import PriorHyper
from .screening import (GammaMask, default_delta, expected_selection_count,
                        export_screened, inclusion_probabilities,
                        marginal_utility, sample_gamma)
from .simulate import SCHEMES, SchemeSpec, generate

_CONFIG_SCHEMA = {
    "backend": str, "delta": str, "replicates": int, "level": float,
    "seed": int, "a_sigma": float, "b_sigma": float, "theta_scale": float,
    "aggregation": str, "kappa": float, "psi_lo": float, "psi_hi": float,
    "m_lo": int, "m_hi": int, "center_y": bool, "k_folds": int,
    "pi_method": str, "probit_iterations": int, "probit_burnin": int,
    "probit_average": bool, "response": str,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TarpError as exc:
        _emit_error(exc)
        return 1
    except OSError as exc:
        _emit_error(exc)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tarpreg",
        description="Screened random-projection regression with conjugate Bayesian prediction")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write train/test CSVs for one simulation scheme")
    _scheme_flags(sim)
    sim.add_argument("--out", required=True, help="output directory")
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser("fit", help="fit a training CSV and predict a test CSV")
    fit.add_argument("train", help="training CSV")
    fit.add_argument("test", help="test CSV with the same columns")
    fit.add_argument("--config", help="key=value config file")
    fit.add_argument("--response", help="response column name or index (default: last)")
    _model_flags(fit)
    fit.add_argument("--out", required=True, help="output prefix")
    fit.set_defaults(func=cmd_fit)

    bench = sub.add_parser("benchmark", help="repeated-dataset benchmark of one scheme")
    _scheme_flags(bench)
    bench.add_argument("--config", help="key=value config file")
    _model_flags(bench)
    bench.add_argument("--datasets", type=int, default=100)
    bench.add_argument("--workers", type=int, default=0, help="0 = one per CPU")
    bench.add_argument("--no-aggregate", action="store_true",
                       help="single replicate per dataset at fixed --m/--psi")
    bench.add_argument("--m", type=int, help="fixed compression dimension")
    bench.add_argument("--psi", type=float, help="fixed projection sparsity")
    bench.add_argument("--out", required=True, help="output prefix")
    bench.set_defaults(func=cmd_benchmark)

    scr = sub.add_parser("screen", help="screening diagnostics for a CSV dataset")
    scr.add_argument("data", help="data CSV")
    scr.add_argument("--response", help="response column name or index (default: last)")
    scr.add_argument("--delta", default="auto")
    scr.add_argument("--replicates", type=int, default=100)
    scr.add_argument("--seed", type=int, default=0)
    scr.add_argument("--export", help="also write the union screened submatrix CSV here")
    scr.add_argument("--out", required=True, help="output prefix")
    scr.set_defaults(func=cmd_screen)
    return parser


def _scheme_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", required=True, choices=SCHEMES)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--p", type=int, default=2000)
    p.add_argument("--n-test", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-active", type=int, default=50)
    p.add_argument("--coef", type=float, default=1.0)
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=0.3)
    p.add_argument("--block-size", type=int, default=100)
    p.add_argument("--rho-low", type=float, default=0.3)
    p.add_argument("--rho-high", type=float, default=0.9)
    p.add_argument("--n-outliers", type=int, default=5)
    p.add_argument("--outlier-sd", type=float, default=10.0)
    p.add_argument("--t-max", type=float, default=10.0)


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=BACKENDS)
    p.add_argument("--delta", help="screening exponent (number or 'auto')")
    p.add_argument("--replicates", type=int)
    p.add_argument("--level", type=float)
    p.add_argument("--aggregation", choices=AGGREGATIONS)
    p.add_argument("--kappa", type=float)
    p.add_argument("--a-sigma", type=float)
    p.add_argument("--b-sigma", type=float)
    if not any(a.dest == "seed" for a in p._actions):
        p.add_argument("--seed", type=int)


def cmd_simulate(args) -> int:
    spec = _spec_from_args(args)
    data = generate(spec)
    os.makedirs(args.out, exist_ok=True)
    train_path = os.path.join(args.out, "train.csv")
    test_path = os.path.join(args.out, "test.csv")
    write_matrix_csv(train_path, data.train.X, data.train.y, data.train.col_names)
    write_matrix_csv(test_path, data.test_X, data.test_y, data.train.col_names)
    nz = np.flatnonzero(data.true_beta)
    sidecar = {
        "seed": spec.seed,
        "spec": asdict(spec),
        "active_idx": data.active_idx.tolist(),
        "true_beta_nonzero": [[int(j), float(data.true_beta[j])] for j in nz],
    }
    _write_json(os.path.join(args.out, "sim.json"), sidecar)
    return 0


def cmd_fit(args) -> int:
    cfg, raw_cfg = _config_from_args(args)
    response = raw_cfg.get("response", -1)
    train = read_csv(args.train, response=_response_arg(response))
    test = read_csv(args.test, response=_response_arg(response))
    if test.p != train.p:
        raise ParameterError(f"test has {test.p} predictor columns, train has {train.p}")
    std_train = standardize(train)
    X_new = apply_standardization(std_train, test.X)

    started = time.perf_counter()
    if train.response_kind == RESPONSE_BINARY:
        result = run_tarp_binary(std_train, X_new, cfg)
        write_csv(args.out + ".predictions.csv",
                  [np.arange(test.n), result.prob],
                  ["index", "probability"])
    else:
        result = run_tarp(std_train, X_new, cfg)
        write_csv(args.out + ".predictions.csv",
                  [np.arange(test.n), result.yhat, result.lower, result.upper],
                  ["index", "yhat", "lower", "upper"])
    pg = [r.p_gamma for r in result.per_replicate]
    summary = {
        "command": "fit",
        "version": __version__,
        "config": _echo(cfg),
        "config_file_values": raw_cfg,
        "train": {"path": args.train, "n": train.n, "p": train.p,
                  "response_kind": train.response_kind},
        "test_rows": test.n,
        "p_gamma": {"mean": float(np.mean(pg)), "min": int(np.min(pg)),
                    "max": int(np.max(pg))},
        "phase_times": result.phase_times,
        "wall_time": time.perf_counter() - started,
    }
    _write_json(args.out + ".summary.json", summary)
    return 0


def cmd_benchmark(args) -> int:
    spec = _spec_from_args(args)
    cfg, raw_cfg = _config_from_args(args)
    if args.no_aggregate:
        if args.m is None:
            raise ParameterError("--no-aggregate requires --m")
        cfg = replace(cfg, n_replicates=1, m_range=(args.m, args.m))
        if args.psi is not None:
            cfg = replace(cfg, psi_range=(args.psi, args.psi))
    if args.datasets < 1:
        raise ParameterError("--datasets must be >= 1")

    seeds = [dataset_seed(cfg.seed, i) for i in range(args.datasets)]
    jobs = [(replace(spec, seed=s), cfg) for s in seeds]
    workers = args.workers if args.workers > 0 else (os.cpu_count() or 1)
    if workers == 1 or args.datasets == 1:
        _limit_blas_threads()
        rows = [_benchmark_one(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers,
                                 initializer=_limit_blas_threads) as pool:
            rows = list(pool.map(_benchmark_one, jobs, chunksize=1))

    metric_names = ["mspe", "ecp", "width"]
    table = {name: np.array([row[name] for row in rows]) for name in metric_names}
    write_csv(args.out + ".csv",
              [np.arange(args.datasets, dtype=np.float64),
               np.array(seeds, dtype=np.float64)] + [table[k] for k in metric_names],
              ["dataset", "seed"] + metric_names)
    report = {
        "command": "benchmark",
        "version": __version__,
        "method": cfg.backend,
        "scheme": asdict(spec),
        "config": _echo(cfg),
        "config_file_values": raw_cfg,
        "datasets": args.datasets,
        "dataset_seeds": seeds,
        "no_aggregate": bool(args.no_aggregate),
        "report": {name: {"mean": float(table[name].mean()),
                          "sd": float(table[name].std())}
                   for name in metric_names},
    }
    _write_json(args.out + ".json", report)
    _write_json(args.out + ".timing.json", {
        "wall_time": sum(row["wall_time"] for row in rows),
        "workers": workers,
        "per_dataset_wall_time": [row["wall_time"] for row in rows],
        "phase_times": _sum_phases(rows),
    })
    return 0


def _limit_blas_threads() -> None:
    # one dataset per worker process: BLAS fan-out on the small per-replicate
    # matrices costs far more than it saves
    os.environ.setdefault("OMP_NUM_THREADS", "1")
    try:
        from threadpoolctl import threadpool_limits
        threadpool_limits(1)
    except ImportError:
        pass


def _benchmark_one(job) -> dict:
    spec, cfg = job
    data = generate(spec)
    std_train = standardize(data.train)
    X_new = apply_standardization(std_train, data.test_X)
    run_cfg = replace(cfg, seed=spec.seed, keep_replicates=False)
    result = run_tarp(std_train, X_new, run_cfg)
    ecp, width = ecp_width(result.lower, result.upper, data.test_y)
    return {"mspe": mspe(result.yhat, data.test_y), "ecp": ecp, "width": width,
            "wall_time": result.wall_time, "phase_times": result.phase_times}


def cmd_screen(args) -> int:
    data = read_csv(args.data, response=_response_arg(args.response or -1))
    std = standardize(data)
    r = marginal_utility(std)
    if args.delta == "auto":
        delta = default_delta(std.n, std.p)
    else:
        delta = float(args.delta)
    probs = inclusion_probabilities(r, delta)
    counts = np.zeros(std.p)
    selections = []
    for l in range(args.replicates):
        mask = sample_gamma(probs, substream(args.seed, 1, l))
        counts[mask.selected] += 1
        selections.append(mask.selected.tolist())
    freq = counts / args.replicates
    write_csv(args.out + ".frequency.csv",
              [np.arange(std.p, dtype=np.float64), r, probs.q, freq],
              ["column", "utility", "q", "frequency"])
    union = np.flatnonzero(counts > 0)
    summary = {
        "command": "screen",
        "version": __version__,
        "delta": float(delta),
        "replicates": args.replicates,
        "seed": args.seed,
        "expected_selected": expected_selection_count(probs),
        "degenerate": probs.degenerate,
        "union_size": int(union.size),
        "column_names": list(std.col_names),
        "selected_per_replicate": selections,
    }
    _write_json(args.out + ".json", summary)
    if args.export:
        mask = GammaMask.from_indicator(counts > 0)
        sub, names = export_screened(std, mask)
        write_matrix_csv(args.export, sub, None, names)
    return 0


def _spec_from_args(args) -> SchemeSpec:
    return SchemeSpec(
        scheme=args.scheme, n=args.n, p=args.p, n_test=args.n_test,
        n_active=args.n_active, coef_value=args.coef, noise_sd=args.noise_sd,
        rho=args.rho, block_size=args.block_size, rho_low=args.rho_low,
        rho_high=args.rho_high, n_outliers=args.n_outliers,
        outlier_sd=args.outlier_sd, t_max=args.t_max, seed=args.seed or 0)


def _config_from_args(args):
    """Merge config-file values and CLI flags (flags win) into a TarpConfig."""
    raw = {}
    if getattr(args, "config", None):
        raw = _read_config(args.config)
    if getattr(args, "response", None):
        raw["response"] = args.response

    def pick(flag, key, default):
        v = getattr(args, flag, None)
        if v is not None:
            return v
        return raw.get(key, default)

    delta = pick("delta", "delta", "auto")
    if delta != "auto":
        delta = float(delta)
    m_range = None
    if "m_lo" in raw or "m_hi" in raw:
        if not ("m_lo" in raw and "m_hi" in raw):
            raise ParameterError("config must set both m_lo and m_hi")
        m_range = (raw["m_lo"], raw["m_hi"])
    cfg = TarpConfig(
        backend=pick("backend", "backend", BACKEND_RP),
        delta=delta,
        n_replicates=int(pick("replicates", "replicates", 100)),
        m_range=m_range,
        psi_range=(raw.get("psi_lo", 0.1), raw.get("psi_hi", 0.4)),
        kappa=float(pick("kappa", "kappa", 0.5)),
        prior=PriorHyper(a_sigma=float(pick("a_sigma", "a_sigma", 0.02)),
                         b_sigma=float(pick("b_sigma", "b_sigma", 0.02)),
                         theta_scale=float(raw.get("theta_scale", 1.0))),
        aggregation=pick("aggregation", "aggregation", "average"),
        k_folds=int(raw.get("k_folds", 5)),
        level=float(pick("level", "level", 0.5)),
        seed=int(pick("seed", "seed", 0)),
        center_y=bool(raw.get("center_y", True)),
        pi_method=raw.get("pi_method", "endpoints"),
        probit_iterations=int(raw.get("probit_iterations", 2000)),
        probit_burnin=int(raw.get("probit_burnin", 500)),
        probit_average=bool(raw.get("probit_average", False)),
    )
    return cfg, raw


def _read_config(path) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_SCHEMA:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            kind = _CONFIG_SCHEMA[key]
            if kind is bool:
                values[key] = value.lower() in ("1", "true", "yes", "on")
            elif key == "delta":
                values[key] = value  # number or "auto", resolved later
            else:
                values[key] = kind(value)
    return values


def _response_arg(value):
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            return value
    return value


def _echo(cfg: TarpConfig) -> dict:
    return asdict(cfg)  # recurses into the prior dataclass


def _sum_phases(rows) -> dict:
    total = {}
    for row in rows:
        for k, v in row["phase_times"].items():
            total[k] = total.get(k, 0.0) + v
    return total


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit_error(exc: BaseException) -> None:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)},
                     sort_keys=True), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
