import math
from dataclasses import replace

import numpy as np
import pytest

from cvahedge.credit import CreditCurve
from cvahedge.engine import (ExperimentConfig, batched_abs_epsilon, convergence_sweep,
                             error_measure_epsilon, expected_default_mass, run_experiment)
from cvahedge.market import (GBMParams, PathSet, TimeGrid, _blocks, default_block, gbm_block,
                             simulate_default_times, simulate_gbm)
from cvahedge.pricing import BlackScholesModel, EuropeanOption

SMALL = ExperimentConfig(n_paths=2_000, steps_per_year=50, seed=3)


def test_deterministic_ledger_is_flat():
    res = run_experiment(ExperimentConfig(sigma=0.0, hazard=0.0, n_paths=1))
    for p in ("p1", "p2"):
        assert np.all(np.abs(res.mean[p]["sw"]) < 1e-8)
        assert np.all(res.vol[p]["pnl"][:-1] == 0.0)


def test_series_shapes_and_histogram():
    res = run_experiment(SMALL)
    assert len(res.dates) == 51
    for p in ("p1", "p2"):
        for m in ("sw", "pnl", "unexpl"):
            assert res.mean[p][m].shape == (51,)
            assert np.all(res.vol[p][m][~np.isnan(res.vol[p][m])] >= 0)
    assert res.histogram_counts.sum() == SMALL.n_paths
    assert res.terminal["p2"].shape == (SMALL.n_paths,)
    # no revaluation PnL from the last date
    assert np.isnan(res.mean["p1"]["pnl"][-1])


def test_no_credit_risk_portfolios_coincide():
    res = run_experiment(replace(SMALL, hazard=0.0, cva_mode="priced_and_hedged"))
    assert np.array_equal(res.terminal["p1"], res.terminal["p2"])
    assert res.cva0 == 0.0 and res.epsilon == 0.0 and res.n_defaults == 0


def test_inception_values():
    res = run_experiment(replace(SMALL, n_paths=10))
    assert res.v0 == pytest.approx(1643.8643820765, rel=1e-12)
    assert res.cva0 == pytest.approx(0.5 * (1 - math.exp(-0.2)) * res.v0, rel=1e-12)


def test_bit_identical_across_workers_and_runs():
    cfg = replace(SMALL, n_paths=5_000, cva_mode="priced_and_hedged")
    a, b, c = run_experiment(cfg), run_experiment(cfg), run_experiment(replace(cfg, workers=3))
    for other in (b, c):
        assert np.array_equal(a.terminal["p2"], other.terminal["p2"])
        for p in ("p1", "p2"):
            for m in ("sw", "pnl"):
                assert np.array_equal(a.mean[p][m], other.mean[p][m], equal_nan=True)
                assert np.array_equal(a.vol[p][m], other.vol[p][m], equal_nan=True)


def test_paths_are_common_across_cva_modes():
    a = run_experiment(replace(SMALL, cva_mode="none"))
    b = run_experiment(replace(SMALL, cva_mode="cash_at_inception"))
    assert np.array_equal(a.terminal["p1"], b.terminal["p1"])
    # the charge compounds to maturity on every path
    assert np.allclose(b.terminal["p2"] - a.terminal["p2"], a.cva0 * math.exp(0.1), rtol=1e-9)


def test_epsilon_trivial_cases():
    opt = EuropeanOption("call", 95.0, 1.0)
    grid = TimeGrid(0.0, 1.0, 50)
    paths = simulate_gbm(GBMParams(0.1, 0.1, 0.2), 100.0, grid, 1000, 1)
    tau = simulate_default_times(0.2, 1000, 1)
    pricer = BlackScholesModel(0.1, 0.2)
    assert error_measure_epsilon(paths, tau, pricer, CreditCurve(0.2, 1.0), opt, 0.1)[0] == 0.0
    no_default = np.full(1000, np.inf)
    assert error_measure_epsilon(paths, no_default, pricer, CreditCurve(0.0, 0.5), opt, 0.1)[0] == 0.0


def test_epsilon_matches_engine():
    res = run_experiment(SMALL)
    paths = np.vstack([gbm_block(SMALL.gbm_params, 100.0, SMALL.grid, SMALL.seed, b, n)
                       for b, _, n in _blocks(SMALL.n_paths)])
    tau = np.concatenate([default_block(0.2, SMALL.seed, b, n) for b, _, n in _blocks(SMALL.n_paths)])
    eps, _ = error_measure_epsilon(PathSet(paths, SMALL.seed, SMALL.grid), tau, SMALL.pricer(),
                                   SMALL.curve, EuropeanOption("call", 95.0, 1.0), 0.1)
    assert eps * SMALL.shares == pytest.approx(res.epsilon, rel=1e-9, abs=1e-9)


def test_batched_abs_epsilon():
    terms = np.array([1.0, -1.0, 2.0, 2.0])
    assert batched_abs_epsilon(terms, 2) == pytest.approx(1.0)
    assert batched_abs_epsilon(terms, 4) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        batched_abs_epsilon(terms, 5)


def test_sweep_without_hazard_has_no_epsilon():
    rows = convergence_sweep(replace(SMALL, hazard=0.0), steps=[20, 40], paths=[100, 1000])
    assert len(rows) == 4 and all(r["abs_epsilon"] == 0.0 for r in rows)


def test_expected_default_mass():
    assert expected_default_mass(SMALL) == pytest.approx(1 - math.exp(-0.2))


def test_two_desk_and_event_log():
    cfg = replace(SMALL, n_paths=300, cva_mode="priced_and_hedged", two_desk=True, event_log_paths=4)
    res = run_experiment(cfg)
    assert res.desk_max_gap < 1e-9 * cfg.shares * cfg.s0
    w = res.logged_wealth["w"]
    for path in range(4):
        replay = res.event_log.replay(path, res.dates, cfg.r) * cfg.shares
        assert np.allclose(replay, w[path], rtol=0, atol=1e-9 * cfg.shares * cfg.s0)
    assert np.allclose(res.logged_wealth["w_trading"] + res.logged_wealth["w_xva"], w, atol=1e-6)


@pytest.mark.parametrize("mode", ["bs_delta_on_merton_market", "merton_delta", "merton_jump_option"])
def test_merton_modes_run(mode):
    cfg = ExperimentConfig(model="merton", hedge_mode=mode, cva_mode="priced_and_hedged",
                           n_paths=200, steps_per_year=20, seed=1)
    res = run_experiment(cfg)
    assert np.all(np.isfinite(res.terminal["p2"]))


@pytest.mark.parametrize("bad", [
    dict(model="bs", hedge_mode="merton_delta"),
    dict(model="merton", hedge_mode="bs_delta"),
    dict(n_paths=0), dict(steps_per_year=0), dict(workers=0), dict(cva_mode="sometimes"),
    dict(model="merton", hedge_mode="merton_jump_option", hedge_option_kind="call",
         hedge_option_strike=95.0),
])
def test_invalid_configs(bad):
    with pytest.raises(ValueError):
        ExperimentConfig(**bad)
