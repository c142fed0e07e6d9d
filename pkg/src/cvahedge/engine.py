"""Monte Carlo hedging experiment: one bought option, hedged without and with CCR.

Two portfolios share every random number.  ``p1`` trades with a riskless
counterparty; ``p2`` trades with a defaultable one and, on default, is closed out
risk-free and re-entered with a riskless counterparty.  Paths run in blocks; each
block walks the date grid once and keeps only the current and previous date.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .credit import CreditCurve, cva_european, default_probability, risky_factor
from .hedging import BASE_MODES, implied_bs_greeks, jump_hedge_ratios
from .ledger import TRADING, XVA, Book, EventLog
from .market import (BLOCK_SIZE, GBMParams, MertonParams, PathSet, TimeGrid, _blocks,
                     default_block, gbm_block, merton_block)
from .pricing.black_scholes import BlackScholesModel
from .pricing.merton import MertonModel
from .pricing.options import EuropeanOption

log = logging.getLogger(__name__)

CVA_MODES = ("none", "cash_at_inception", "priced_not_hedged", "priced_and_hedged")
MODELS = ("bs", "merton")
METRICS = ("sw", "sigma", "w", "pnl", "unexpl")


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "bs"
    hedge_mode: str = "bs_delta"
    cva_mode: str = "none"
    # market
    s0: float = 100.0
    r: float = 0.1
    sigma: float = 0.2
    mu: float | None = None  # real-world drift of the Euler scheme, defaults to r
    t0: float = 0.0
    # traded option
    option_kind: str = "call"
    strike: float = 95.0
    maturity: float = 1.0
    shares: float = 100.0
    # credit
    hazard: float = 0.2
    recovery: float = 0.5
    # jumps
    mu_j: float = -0.125
    sigma_j: float = 0.1
    xi: float = 0.1
    # hedge option for the jump hedge
    hedge_option_kind: str = "put"
    hedge_option_strike: float = 90.0
    hedge_option_maturity: float = 1.0
    # simulation
    n_paths: int = 100_000
    steps_per_year: int = 200
    seed: int = 20240101
    workers: int = 1
    merton_tolerance: float = 1e-12
    # reporting
    two_desk: bool = False
    event_log_paths: int = 0
    histogram_bins: int = 60

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.cva_mode not in CVA_MODES:
            raise ValueError(f"cva mode must be one of {CVA_MODES}")
        if self.hedge_mode not in BASE_MODES:
            raise ValueError(f"hedge mode must be one of {BASE_MODES}")
        if self.model == "bs" and self.hedge_mode != "bs_delta":
            raise ValueError(f"hedge mode {self.hedge_mode!r} needs the merton model")
        if self.model == "merton" and self.hedge_mode == "bs_delta":
            raise ValueError("on a merton market use bs_delta_on_merton_market for BS hedging")
        if self.n_paths < 1:
            raise ValueError("need at least one path")
        if self.steps_per_year < 1:
            raise ValueError("steps_per_year must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if not self.maturity > self.t0:
            raise ValueError("maturity must be after t0")
        if self.sigma < 0 or (self.model == "merton" and self.sigma == 0):
            raise ValueError("sigma must be positive")
        # builds and validates the domain objects
        _ = (self.option, self.curve)
        if self.model == "merton":
            _ = self.merton_params
        if self.uses_hedge_option:
            if not self.hedge_option.maturity >= self.maturity:
                raise ValueError("hedge option must not expire before the traded option")
            if self.hedge_option == self.option:
                raise ValueError("hedge option must differ from the traded option")

    @property
    def option(self) -> EuropeanOption:
        return EuropeanOption(self.option_kind, self.strike, self.maturity, self.shares)

    @property
    def hedge_option(self) -> EuropeanOption:
        return EuropeanOption(self.hedge_option_kind, self.hedge_option_strike,
                              self.hedge_option_maturity, self.shares)

    @property
    def uses_hedge_option(self) -> bool:
        return self.hedge_mode == "merton_jump_option"

    @property
    def curve(self) -> CreditCurve:
        return CreditCurve(self.hazard, self.recovery)

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(self.t0, self.maturity, self.steps_per_year)

    @property
    def merton_params(self) -> MertonParams:
        return MertonParams(self.r, self.sigma, self.mu_j, self.sigma_j, self.xi)

    @property
    def gbm_params(self) -> GBMParams:
        return GBMParams(self.r if self.mu is None else self.mu, self.r, self.sigma)

    def pricer(self):
        if self.model == "merton":
            return MertonModel(self.merton_params, self.merton_tolerance)
        return BlackScholesModel(self.r, self.sigma)


@dataclass
class _Stats:
    """Per-date count, mean and sum of squared deviations; merged with Chan's rule."""

    n: np.ndarray
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def empty(cls, size: int) -> "_Stats":
        return cls(np.zeros(size), np.zeros(size), np.zeros(size))

    def put(self, k: int, x: np.ndarray):
        x = x[np.isfinite(x)]
        if len(x) == 0:
            return
        m = x.mean()
        self._merge_at(k, len(x), m, float(np.square(x - m).sum()))

    def _merge_at(self, k, nb, mb, m2b):
        na = self.n[k]
        n = na + nb
        delta = mb - self.mean[k]
        self.mean[k] += delta * nb / n
        self.m2[k] += m2b + delta * delta * na * nb / n
        self.n[k] = n

    def merge(self, other: "_Stats"):
        for k in range(len(self.n)):
            if other.n[k] > 0:
                self._merge_at(k, other.n[k], other.mean[k], other.m2[k])

    @property
    def vol(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.n > 0, np.sqrt(self.m2 / np.maximum(self.n, 1)), np.nan)

    def mean_or_nan(self) -> np.ndarray:
        return np.where(self.n > 0, self.mean, np.nan)


@dataclass
class _BlockResult:
    stats: dict[str, dict[str, _Stats]]
    terminal: dict[str, np.ndarray]
    eps_terms: np.ndarray
    n_defaults: int
    degenerate: int
    desk_gap: float
    desk_stats: dict[str, _Stats] | None
    event_log: EventLog | None
    logged_wealth: dict[str, np.ndarray]


@dataclass
class MetricSeries:
    config: ExperimentConfig
    dates: np.ndarray
    mean: dict[str, dict[str, np.ndarray]]
    vol: dict[str, dict[str, np.ndarray]]
    terminal: dict[str, np.ndarray]
    histogram_edges: np.ndarray
    histogram_counts: np.ndarray
    epsilon: float
    epsilon_se: float
    eps_terms: np.ndarray
    v0: float
    cva0: float
    n_defaults: int
    degenerate_hedges: int
    desk: dict[str, np.ndarray] | None = None
    desk_max_gap: float = 0.0
    event_log: EventLog | None = None
    logged_wealth: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n_paths(self) -> int:
        return self.config.n_paths

    def se(self, portfolio: str, metric: str) -> np.ndarray:
        return self.vol[portfolio][metric] / math.sqrt(self.n_paths)


@dataclass(frozen=True)
class _Quote:
    """Market values and hedge-model Greeks of the traded and hedge options."""

    v: np.ndarray
    v_delta: np.ndarray
    v_gamma: np.ndarray
    v_dxi: np.ndarray | None = None
    h: np.ndarray | None = None
    h_delta: np.ndarray | None = None
    h_gamma: np.ndarray | None = None
    h_dxi: np.ndarray | None = None


class _Market:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.pricer = cfg.pricer()
        self.option = cfg.option
        self.hedge_option = cfg.hedge_option if cfg.uses_hedge_option else None

    def quote(self, S, t) -> _Quote:
        cfg, opt = self.cfg, self.option
        jump = cfg.uses_hedge_option
        g = self.pricer.greeks(opt, S, t, jump=jump)
        v_delta, v_gamma = g.delta, g.gamma
        if cfg.hedge_mode == "bs_delta_on_merton_market":
            ig = implied_bs_greeks(opt, g.price, S, cfg.r, t)
            v_delta, v_gamma = ig.delta, ig.gamma
        if not jump:
            return _Quote(g.price, v_delta, v_gamma)
        h = self.pricer.greeks(self.hedge_option, S, t, jump=True)
        return _Quote(g.price, v_delta, v_gamma, g.d_xi, h.price, h.delta, h.gamma, h.d_xi)

    def values(self, S, t):
        v = self.pricer.price(self.option, S, t)
        h = self.pricer.price(self.hedge_option, S, t) if self.hedge_option is not None else None
        return v, h

    def unit_hedge(self, q: _Quote, S):
        """Stock and hedge-option units per unit of risk-free option."""
        if q.h is None:
            return -q.v_delta, None, 0
        phi1, phi2, bad = jump_hedge_ratios(q.v_delta, q.v_dxi, q.h_delta, q.h_dxi, S)
        return phi1, phi2, int(bad.sum())


def _simulate_block(cfg: ExperimentConfig, block: int, size: int):
    grid = cfg.grid
    if cfg.model == "merton":
        S = merton_block(cfg.merton_params, cfg.s0, grid, cfg.seed, block, size)
    else:
        S = gbm_block(cfg.gbm_params, cfg.s0, grid, cfg.seed, block, size)
    return S, default_block(cfg.hazard, cfg.seed, block, size)


class _Portfolio:
    """Strategy state for one portfolio within a block."""

    def __init__(self, name, cfg, size, ccr, log_idx=None, offset=0):
        self.name = name
        self.ccr = ccr
        self.priced = ccr and cfg.cva_mode in ("priced_not_hedged", "priced_and_hedged")
        self.hedged = ccr and cfg.cva_mode == "priced_and_hedged"
        self.two_desk = ccr and cfg.two_desk
        self.book = Book(size, self.two_desk, log_idx, offset)
        self.uses_option = cfg.uses_hedge_option

    def factors(self, c_t: float):
        alive = ~self.book.defaulted
        a = np.where(alive, c_t, 1.0) if self.priced else np.ones(self.book.n)
        s = np.where(alive, c_t, 1.0) if self.hedged else np.ones(self.book.n)
        return a, s

    def sigma(self, a, v, S, h):
        out = a * v + self.book.phi1 * S
        if self.uses_option:
            out = out + self.book.phi2 * h
        return out

    def net_greeks(self, a, q: _Quote):
        delta = a * q.v_delta + self.book.phi1
        gamma = a * q.v_gamma
        if self.uses_option:
            delta = delta + self.book.phi2 * q.h_delta
            gamma = gamma + self.book.phi2 * q.h_gamma
        return delta, gamma

    def rebalance(self, t, S, u1, u2, s, h):
        phi2 = None if u2 is None else s * u2
        self.book.rebalance(t, S, s * u1, phi2, h, phi1_trading=u1, phi2_trading=u2)


def _run_block(cfg: ExperimentConfig, block: int, start: int, size: int) -> _BlockResult:
    grid = cfg.grid
    dates = grid.dates
    K = grid.n_steps
    dt = grid.dt
    growth = math.exp(cfg.r * dt)
    curve = cfg.curve
    R = cfg.recovery
    T = cfg.maturity
    market = _Market(cfg)
    S, tau = _simulate_block(cfg, block, size)

    log_idx = None
    if cfg.event_log_paths > start:
        log_idx = np.arange(min(size, cfg.event_log_paths - start))
    ports = [_Portfolio("p1", cfg, size, ccr=False),
             _Portfolio("p2", cfg, size, ccr=True, log_idx=log_idx, offset=start)]
    stats = {p.name: {m: _Stats.empty(K + 1) for m in METRICS} for p in ports}
    desk_stats = {d: _Stats.empty(K + 1) for d in (TRADING, XVA)} if cfg.two_desk else None
    logged = {}
    if log_idx is not None:
        logged = {"w": np.empty((len(log_idx), K + 1))}
        if cfg.two_desk:
            logged.update(w_trading=np.empty((len(log_idx), K + 1)),
                          w_xva=np.empty((len(log_idx), K + 1)))
    desk_gap = 0.0
    degenerate = 0

    c = np.array([risky_factor(curve, t, T) for t in dates[:-1]] + [1.0])
    # t0
    t = dates[0]
    S0 = S[:, 0]
    q = market.quote(S0, t)
    v0 = float(q.v[0])
    cva0 = float(cva_european(v0, curve, t, T))
    u1, u2, bad = market.unit_hedge(q, S0)
    degenerate += bad
    prev = {}
    for p in ports:
        a, s = p.factors(c[0])
        # the risk-free value goes to the trading desk; any CVA charge or discount to xVA
        p.book.trade_option_position(t, "option_purchase", 1.0, q.v, TRADING)
        if p.ccr and cfg.cva_mode != "none":
            p.book.cash(t, "cva_charge", cva0, XVA if p.two_desk else TRADING)
        p.rebalance(t, S0, u1, u2, s, q.h)
        prev[p.name] = (a, p.net_greeks(a, q))
    prev_q = q

    def record(k, p, a, v, Sk, h):
        sig = p.sigma(a, v, Sk, h) if k < K else np.zeros(size)
        st = stats[p.name]
        st["sigma"].put(k, sig)
        st["w"].put(k, p.book.wealth)
        st["sw"].put(k, sig + p.book.wealth)
        return sig

    for p in ports:
        a = prev[p.name][0]
        record(0, p, a, q.v, S0, q.h)

    eps = np.full(size, cva0)
    n_defaults = 0

    def desk_record(k, p2):
        nonlocal desk_gap
        if not cfg.two_desk:
            return
        wt, wx = p2.book.w_desk[TRADING], p2.book.w_desk[XVA]
        desk_stats[TRADING].put(k, wt)
        desk_stats[XVA].put(k, wx)
        desk_gap = max(desk_gap, float(np.max(np.abs(wt + wx - p2.book.wealth))))

    def log_record(k, p2):
        if log_idx is None:
            return
        logged["w"][:, k] = p2.book.wealth[log_idx]
        if cfg.two_desk:
            logged["w_trading"][:, k] = p2.book.w_desk[TRADING][log_idx]
            logged["w_xva"][:, k] = p2.book.w_desk[XVA][log_idx]

    desk_record(0, ports[1])
    log_record(0, ports[1])

    for k in range(1, K + 1):
        t_prev, t = dates[k - 1], dates[k]
        Sp, Sk = S[:, k - 1], S[:, k]
        dS = Sk - Sp
        # frozen-date revaluation with the new stock value
        v_f, h_f = market.values(Sk, t_prev)
        for p in ports:
            a_prev, (g_delta, g_gamma) = prev[p.name]
            pnl = a_prev * (v_f - prev_q.v) + p.book.phi1 * dS
            if p.uses_option:
                pnl = pnl + p.book.phi2 * (h_f - prev_q.h)
            explained = g_delta * dS + 0.5 * g_gamma * dS * dS
            stats[p.name]["pnl"].put(k - 1, pnl)
            stats[p.name]["unexpl"].put(k - 1, pnl - explained)
            p.book.accrue(growth)

        p2 = ports[1]
        newly = (~p2.book.defaulted) & (tau <= t)
        if k == K:
            payoff = market.option.payoff(Sk)
            h_pay = market.hedge_option.payoff(Sk) if market.hedge_option is not None else None
            for p in ports:
                p.book.settle_maturity(t, payoff, Sk, h_pay)
            v_now = payoff
        else:
            q = market.quote(Sk, t)
            v_now = q.v
        if np.any(newly):
            p2.book.apply_default_closeout(t, newly, v_now, R)
            disc = math.exp(-cfg.r * (t - dates[0]))
            eps = np.where(newly, disc * (R - 1.0) * v_now + cva0, eps)
            n_defaults += int(newly.sum())

        if k < K:
            u1, u2, bad = market.unit_hedge(q, Sk)
            degenerate += bad
            for p in ports:
                a, s = p.factors(c[k])
                p.rebalance(t, Sk, u1, u2, s, q.h)
                prev[p.name] = (a, p.net_greeks(a, q))
                record(k, p, a, q.v, Sk, q.h)
            prev_q = q
        else:
            for p in ports:
                record(k, p, 1.0, None, Sk, None)
        desk_record(k, p2)
        log_record(k, p2)

    terminal = {p.name: p.book.wealth.copy() for p in ports}
    return _BlockResult(stats, terminal, eps, n_defaults, degenerate, desk_gap, desk_stats,
                        ports[1].book.log, logged)


def _v0_cva0(cfg: ExperimentConfig):
    v0 = float(cfg.pricer().price(cfg.option, cfg.s0, cfg.t0))
    return v0, float(cva_european(v0, cfg.curve, cfg.t0, cfg.maturity))


def run_experiment(cfg: ExperimentConfig) -> MetricSeries:
    """Simulate, hedge and account for both portfolios; returns per-date statistics."""
    blocks = list(_blocks(cfg.n_paths, BLOCK_SIZE))
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda b: _run_block(cfg, *b), blocks))
    else:
        results = [_run_block(cfg, *b) for b in blocks]

    K = cfg.grid.n_steps
    merged = {p: {m: _Stats.empty(K + 1) for m in METRICS} for p in ("p1", "p2")}
    desk = {d: _Stats.empty(K + 1) for d in (TRADING, XVA)} if cfg.two_desk else None
    event_log = EventLog() if cfg.event_log_paths > 0 else None
    logged: dict[str, list[np.ndarray]] = {}
    for res in results:
        for p in merged:
            for m in METRICS:
                merged[p][m].merge(res.stats[p][m])
        if desk is not None:
            for d in desk:
                desk[d].merge(res.desk_stats[d])
        if event_log is not None and res.event_log is not None:
            event_log.extend(res.event_log)
        for key, arr in res.logged_wealth.items():
            logged.setdefault(key, []).append(arr)

    shares = cfg.shares
    mean = {p: {m: merged[p][m].mean_or_nan() * shares for m in METRICS} for p in merged}
    vol = {p: {m: merged[p][m].vol * shares for m in METRICS} for p in merged}
    terminal = {p: np.concatenate([r.terminal[p] for r in results]) * shares for p in merged}
    counts, edges = np.histogram(terminal["p2"], bins=cfg.histogram_bins)
    eps_terms = np.concatenate([r.eps_terms for r in results]) * shares
    v0, cva0 = _v0_cva0(cfg)
    degenerate = sum(r.degenerate for r in results)
    if degenerate:
        log.warning("jump-vega degenerate on %d path-dates; stock-only hedge used there", degenerate)
    return MetricSeries(
        config=cfg,
        dates=cfg.grid.dates,
        mean=mean,
        vol=vol,
        terminal=terminal,
        histogram_edges=edges,
        histogram_counts=counts,
        epsilon=float(eps_terms.mean()),
        epsilon_se=float(eps_terms.std() / math.sqrt(len(eps_terms))),
        eps_terms=eps_terms,
        v0=v0 * shares,
        cva0=cva0 * shares,
        n_defaults=sum(r.n_defaults for r in results),
        degenerate_hedges=degenerate,
        desk=None if desk is None else {
            "w_trading": desk[TRADING].mean_or_nan() * shares,
            "w_xva": desk[XVA].mean_or_nan() * shares,
        },
        desk_max_gap=max(r.desk_gap for r in results) * shares,
        event_log=event_log,
        logged_wealth={k: np.concatenate(v) * shares for k, v in logged.items()},
    )


def error_measure_epsilon(paths: PathSet, default_times, pricer, curve: CreditCurve,
                          option: EuropeanOption, r: float):
    """Average discounted default loss offset by the CVA charge, per share.

    Defaults inside ``(t_{k-1}, t_k]`` are settled at ``t_k`` with grid-date values.
    Returns ``(epsilon, standard error)``.
    """
    dates = paths.grid.dates
    t0 = dates[0]
    tau = np.asarray(default_times, dtype=float)
    v0 = float(pricer.price(option, paths.values[0, 0], t0))
    cva0 = float(cva_european(v0, curve, t0, option.maturity))
    terms = np.full(paths.n_paths, cva0)
    hit = tau <= dates[-1]
    k_idx = np.searchsorted(dates, tau, side="left")
    for k in np.unique(k_idx[hit]):
        rows = hit & (k_idx == k)
        Sk = paths.values[rows, k]
        t = dates[k]
        v = option.payoff(Sk) if k == len(dates) - 1 else pricer.price(option, Sk, t)
        terms[rows] = math.exp(-r * (t - t0)) * (curve.recovery - 1.0) * v + cva0
    return float(terms.mean()), float(terms.std() / math.sqrt(len(terms)))


def expected_default_mass(cfg: ExperimentConfig) -> float:
    return default_probability(cfg.curve, cfg.t0, cfg.maturity)


def convergence_sweep(cfg: ExperimentConfig, steps=None, paths=None):
    """Mean/vol of the first-step PnL of p1 and |epsilon| over a grid of settings."""
    rows = []
    for spy in steps or [cfg.steps_per_year]:
        for n in paths or [cfg.n_paths]:
            res = run_experiment(replace(cfg, steps_per_year=int(spy), n_paths=int(n)))
            rows.append({
                "steps_per_year": int(spy),
                "paths": int(n),
                "mean_pnl_t0": float(res.mean["p1"]["pnl"][0]),
                "vol_pnl_t0": float(res.vol["p1"]["pnl"][0]),
                "abs_epsilon": abs(res.epsilon),
                "epsilon_se": res.epsilon_se,
            })
    return rows


def batched_abs_epsilon(eps_terms: np.ndarray, batch: int) -> float:
    """Mean of |epsilon| over disjoint batches of ``batch`` paths taken from one run."""
    n = len(eps_terms) // batch
    if n == 0:
        raise ValueError(f"batch of {batch} paths exceeds the {len(eps_terms)} available")
    means = np.asarray(eps_terms[: n * batch]).reshape(n, batch).mean(axis=1)
    return float(np.abs(means).mean())
