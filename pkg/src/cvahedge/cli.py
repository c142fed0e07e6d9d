"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 invalid configuration, 4 file I/O failure,
5 numerical/runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .config import ConfigError, parse_config
from .engine import ExperimentConfig, batched_abs_epsilon, run_experiment
from .market import MertonParams
from .oracle import oracle_series
from .presets import SWEEP_PATHS, SWEEP_STEPS, preset, preset_names
from .pricing.black_scholes import BlackScholesModel
from .pricing.merton import MertonModel, merton_jump_sensitivities, merton_price
from .pricing.options import EuropeanOption
from .pricing.merton import QUANTITIES
from .pricing.truncation import SMILE_BASE, smile_study, truncation_study
from .reporting import (write_desk_csv, write_event_log, write_histogram_csv, write_manifest,
                        write_metrics_csv, write_summary, write_table)

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_IO, EXIT_RUNTIME = 0, 2, 3, 4, 5
OUTPUT_ENV = "CVAHEDGE_OUTPUT_DIR"

log = logging.getLogger("cvahedge")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get(OUTPUT_ENV) or "cvahedge-output")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _experiment_config(args) -> ExperimentConfig:
    if args.config:
        cfg = parse_config(args.config)
    else:
        cfg = preset(args.preset)
    overrides = {}
    for attr, field_name in (("seed", "seed"), ("paths", "n_paths"), ("steps", "steps_per_year"),
                             ("workers", "workers"), ("event_log", "event_log_paths")):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[field_name] = value
    if getattr(args, "two_desk", False):
        overrides["two_desk"] = True
    try:
        return replace(cfg, **overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_run(args) -> int:
    cfg = _experiment_config(args)
    out = _out_dir(args)
    started = _now()
    series = run_experiment(cfg)
    files = [write_metrics_csv(series, out / "metrics.csv"),
             write_histogram_csv(series, out / "histogram.csv"),
             write_summary(series, out / "summary.json")]
    if series.desk is not None:
        files.append(write_desk_csv(series, out / "desk.csv"))
    if series.event_log is not None:
        files.append(write_event_log(series, out / "events.csv", 1.0))
    write_manifest(out / "manifest.json", config=cfg, seed=cfg.seed, command="run",
                   started=started, finished=_now(), outputs=files,
                   extra={"preset": args.preset if not args.config else None})
    print(f"v0={series.v0:.6f} cva0={series.cva0:.6f} epsilon={series.epsilon:.6f} "
          f"terminal mean(sw) p1={series.terminal['p1'].mean():.6f} "
          f"p2={series.terminal['p2'].mean():.6f} -> {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _experiment_config(args)
    out = _out_dir(args)
    started = _now()
    rows = []
    for spy in args.steps_list:
        res = run_experiment(replace(cfg, steps_per_year=int(spy)))
        rows.append(("steps", int(spy), cfg.n_paths, float(res.mean["p1"]["pnl"][0]),
                     float(res.vol["p1"]["pnl"][0]), abs(res.epsilon), res.epsilon_se))
    big = run_experiment(replace(cfg, n_paths=int(max(args.paths_list))))
    for n in args.paths_list:
        rows.append(("paths", cfg.steps_per_year, int(n), float("nan"), float("nan"),
                     batched_abs_epsilon(big.eps_terms, int(n)), float("nan")))
    path = write_table(out / "sweep.csv", ["sweep", "steps_per_year", "paths", "mean_pnl_t0",
                                           "vol_pnl_t0", "abs_epsilon", "epsilon_se"], rows)
    write_manifest(out / "manifest.json", config=cfg, seed=cfg.seed, command="sweep",
                   started=started, finished=_now(), outputs=[path])
    print(f"wrote {path}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = _experiment_config(args)
    if cfg.model != "bs" or cfg.hedge_mode != "bs_delta":
        raise ConfigError("the analytic PnL moments exist for the Black-Scholes delta hedge only")
    out = _out_dir(args)
    started = _now()
    res = run_experiment(cfg)
    mean_a, vol_a = oracle_series(res.dates, cfg.s0, cfg.strike, cfg.r, cfg.sigma, cfg.maturity)
    sh = cfg.shares
    rows = []
    for k in range(len(mean_a)):
        rows.append((float(res.dates[k]), mean_a[k] * sh, vol_a[k] * sh,
                     float(res.mean["p1"]["pnl"][k]), float(res.vol["p1"]["pnl"][k]),
                     float(res.se("p1", "pnl")[k])))
    path = write_table(out / "oracle.csv", ["date", "mean_analytic", "vol_analytic", "mean_mc",
                                            "vol_mc", "se_mc"], rows)
    write_manifest(out / "manifest.json", config=cfg, seed=cfg.seed, command="oracle",
                   started=started, finished=_now(), outputs=[path])
    print(f"wrote {path}")
    return EXIT_OK


def _merton_params(args) -> MertonParams:
    return MertonParams(args.r, args.sigma, args.mu_j, args.sigma_j, args.xi)


def cmd_price(args) -> int:
    opt = EuropeanOption(args.kind, args.strike, args.maturity)
    S = np.asarray(args.spot, dtype=float)
    rows = []
    if args.model == "bs":
        g = BlackScholesModel(args.r, args.sigma).greeks(opt, S, args.t)
        for s, p, d, gm in zip(S, g.price, g.delta, g.gamma):
            rows.append((s, p, d, gm, 0.0, 0.0, 0.0, 1))
    else:
        params = _merton_params(args)
        g = MertonModel(params, args.tol).greeks(opt, S, args.t)
        d_mu, d_sig, d_xi = merton_jump_sensitivities(opt, S, params, args.t, args.tol)
        terms = merton_price(opt, S, params, args.t, args.tol)[1].terms_used
        for i, s in enumerate(S):
            rows.append((s, g.price[i], g.delta[i], g.gamma[i], d_mu[i], d_sig[i], d_xi[i], terms))
    header = ["spot", "price", "delta", "gamma", "d_mu_j", "d_sigma_j", "d_xi", "terms"]
    print(",".join(header))
    for row in rows:
        print(",".join(repr(float(x)) if i < 7 else str(x) for i, x in enumerate(row)))
    if args.out or os.environ.get(OUTPUT_ENV):
        write_table(_out_dir(args) / "price.csv", header, rows)
    return EXIT_OK


def cmd_smile(args) -> int:
    if args.model != "merton":
        raise ConfigError("the smile study needs --model merton")
    out = _out_dir(args)
    started = _now()
    strikes = np.asarray(args.strikes if args.strikes else np.linspace(70, 130, 25))
    grid = smile_study(args.param, args.values, strikes)
    header = ["strike"] + [f"{args.param}={v!r}" for v in grid]
    rows = [[float(K)] + [float(vols[i]) for vols in grid.values()] for i, K in enumerate(strikes)]
    path = write_table(out / f"smile_{args.param}.csv", header, rows)
    write_manifest(out / "manifest.json", command="smile", started=started, finished=_now(),
                   outputs=[path], extra={"base": SMILE_BASE.__dict__, "param": args.param})
    print(f"wrote {path}")
    return EXIT_OK


def cmd_truncation(args) -> int:
    out = _out_dir(args)
    started = _now()
    params = _merton_params(args)
    opt = EuropeanOption(args.kind, args.strike, args.maturity)
    rows = truncation_study(params, opt, args.spot, args.tol)
    table = [(r.sweep, r.value) + tuple(r.terms[q] for q in QUANTITIES) for r in rows]
    path = write_table(out / "truncation.csv", ["sweep", "value", *QUANTITIES], table)
    write_manifest(out / "manifest.json", command="truncation", started=started,
                   finished=_now(), outputs=[path], extra={"tolerance": args.tol})
    print(f"wrote {path}")
    return EXIT_OK


def _market_args(p, with_option=True):
    p.add_argument("--r", type=float, default=0.1)
    p.add_argument("--sigma", type=float, default=0.2)
    p.add_argument("--mu-j", type=float, default=-0.125)
    p.add_argument("--sigma-j", type=float, default=0.1)
    p.add_argument("--xi", type=float, default=0.1)
    if with_option:
        p.add_argument("--kind", choices=("call", "put"), default="call")
        p.add_argument("--strike", type=float, default=95.0)
        p.add_argument("--maturity", type=float, default=1.0)


def _experiment_args(p, default_preset="fig1"):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", default=default_preset, choices=preset_names())
    src.add_argument("--config", type=Path)
    p.add_argument("--seed", type=int)
    p.add_argument("--paths", type=int)
    p.add_argument("--steps", type=int, help="steps per year")
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvahedge", description=__doc__.splitlines()[0])
    parser.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./cvahedge-output)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment and write metrics")
    _experiment_args(p)
    p.add_argument("--two-desk", action="store_true", help="split wealth into trading and xVA desks")
    p.add_argument("--event-log", type=int, metavar="N", help="log cash events of the first N paths")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="first-step PnL over steps/year and |epsilon| over paths")
    _experiment_args(p, "fig5")
    p.add_argument("--steps-list", type=_floats, default=list(SWEEP_STEPS))
    p.add_argument("--paths-list", type=_floats, default=list(SWEEP_PATHS))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="analytic PnL mean/vol next to the simulation")
    _experiment_args(p, "fig6")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("price", help="option price and sensitivities")
    p.add_argument("--model", choices=("bs", "merton"), default="bs")
    _market_args(p)
    p.add_argument("--spot", type=_floats, default=[100.0])
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("smile", help="implied vols of Merton prices while varying one jump parameter")
    p.add_argument("--model", choices=("bs", "merton"), default="merton")
    p.add_argument("--param", choices=("mu_j", "sigma_j", "xi"), required=True)
    p.add_argument("--values", type=_floats, required=True)
    p.add_argument("--strikes", type=_floats)
    p.set_defaults(func=cmd_smile)

    p = sub.add_parser("truncation", help="series terms needed per quantity and sweep")
    _market_args(p)
    p.add_argument("--spot", type=float, default=100.0)
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_truncation)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"cvahedge: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cvahedge: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError, KeyError) as exc:
        print(f"cvahedge: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
