"""Per-path wealth accounts: accrual, trades, default closeout and maturity settlement.

A :class:`Book` holds one block of paths.  All amounts are per share of the traded
option.  With ``two_desk`` the same flows are also booked on a trading desk, which
holds the risk-free option and its risk-free hedge, and on an xVA desk, which holds
the rest (the CVA position and its hedge) and absorbs default losses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TRADING, XVA = "trading", "xva"


def init_wealth(strategy_value, cashflows_t0=0.0):
    """W(t0) = -Sigma(t0) + cash-flows at t0."""
    return -np.asarray(strategy_value, dtype=float) + cashflows_t0


def step_wealth(wealth, growth, values=(), d_positions=(), cashflows=()):
    """W(t_k) = W(t_{k-1}) B(t_k)/B(t_{k-1}) - sum V_i dphi_i + sum dC_i."""
    out = np.asarray(wealth, dtype=float) * growth
    for v, dphi in zip(values, d_positions):
        out = out - np.asarray(v) * dphi
    for c in cashflows:
        out = out + c
    return out


@dataclass
class EventLog:
    """Cash events for a fixed set of paths; interest accrual is implicit."""

    rows: list[tuple[int, float, str, float, str]] = field(default_factory=list)

    def add(self, paths, date: float, event: str, amounts, desk: str):
        for p, a in zip(paths, amounts):
            if a != 0.0:
                self.rows.append((int(p), float(date), event, float(a), desk))

    def extend(self, other: "EventLog"):
        self.rows.extend(other.rows)

    def replay(self, path: int, dates, r: float) -> np.ndarray:
        """Wealth per date rebuilt by compounding the logged cash events."""
        dates = np.asarray(dates, dtype=float)
        flows = np.zeros(len(dates))
        index = {float(d): i for i, d in enumerate(dates)}
        for p, d, _, a, _ in self.rows:
            if p == path:
                flows[index[d]] += a
        out = np.empty(len(dates))
        out[0] = flows[0]
        for k in range(1, len(dates)):
            out[k] = out[k - 1] * math.exp(r * (dates[k] - dates[k - 1])) + flows[k]
        return out


class DefaultError(RuntimeError):
    pass


class Book:
    def __init__(self, n: int, two_desk: bool = False, log_paths=None, path_offset: int = 0):
        self.n = n
        self.two_desk = two_desk
        self.wealth = np.zeros(n)
        self.phi1 = np.zeros(n)
        self.phi2 = np.zeros(n)
        self.defaulted = np.zeros(n, dtype=bool)
        self.default_date = np.full(n, np.nan)
        if two_desk:
            self.w_desk = {TRADING: np.zeros(n), XVA: np.zeros(n)}
            self.phi1_trading = np.zeros(n)
            self.phi2_trading = np.zeros(n)
        self.log = EventLog() if log_paths is not None else None
        self._log_idx = np.asarray([] if log_paths is None else log_paths, dtype=int)
        self._offset = path_offset

    def _record(self, date, event, amounts, desk):
        if self.log is None or len(self._log_idx) == 0:
            return
        amounts = np.broadcast_to(np.asarray(amounts, dtype=float), (self.n,))
        self.log.add(self._log_idx + self._offset, date, event, amounts[self._log_idx], desk)

    def cash(self, date: float, event: str, amount, desk: str = TRADING):
        amount = np.broadcast_to(np.asarray(amount, dtype=float), (self.n,))
        self.wealth = self.wealth + amount
        if self.two_desk:
            self.w_desk[desk] = self.w_desk[desk] + amount
        self._record(date, event, amount, desk)

    def accrue(self, growth: float):
        self.wealth = self.wealth * growth
        if self.two_desk:
            for desk in self.w_desk:
                self.w_desk[desk] = self.w_desk[desk] * growth

    def trade_option_position(self, date: float, event: str, units, price, desk: str = TRADING):
        """Buy ``units`` of an instrument that is not a hedge (the traded option)."""
        self.cash(date, event, -np.asarray(units) * price, desk)

    def rebalance(self, date: float, S, phi1, phi2=None, H=None, phi1_trading=None,
                  phi2_trading=None):
        d1 = phi1 - self.phi1
        d2 = None if phi2 is None else phi2 - self.phi2
        cost = -d1 * S
        if d2 is not None:
            cost = cost - d2 * H
        self.wealth = self.wealth + cost
        if self.two_desk:
            t1 = phi1 if phi1_trading is None else phi1_trading
            t2 = phi2 if phi2_trading is None else phi2_trading
            dt1 = t1 - self.phi1_trading
            cost_t = -dt1 * S
            cost_x1 = -(d1 - dt1) * S
            cost_x = cost_x1
            if d2 is not None:
                dt2 = t2 - self.phi2_trading
                cost_t = cost_t - dt2 * H
                cost_x2 = -(d2 - dt2) * H
                cost_x = cost_x + cost_x2
            self.w_desk[TRADING] = self.w_desk[TRADING] + cost_t
            self.w_desk[XVA] = self.w_desk[XVA] + cost_x
            self._record(date, "stock_trade", -dt1 * S, TRADING)
            self._record(date, "stock_trade", cost_x1, XVA)
            if d2 is not None:
                self._record(date, "hedge_option_trade", -dt2 * H, TRADING)
                self._record(date, "hedge_option_trade", cost_x2, XVA)
            self.phi1_trading = np.array(t1, dtype=float)
            if t2 is not None:
                self.phi2_trading = np.array(t2, dtype=float)
        else:
            self._record(date, "stock_trade", -d1 * S, TRADING)
            if d2 is not None:
                self._record(date, "hedge_option_trade", -d2 * H, TRADING)
        self.phi1 = np.array(phi1, dtype=float)
        if phi2 is not None:
            self.phi2 = np.array(phi2, dtype=float)

    def apply_default_closeout(self, date: float, mask, value, recovery: float):
        """Risk-free closeout at R V and re-entry at V with a riskless counterparty.

        Net cash (R - 1) V per defaulted path; the loss lands on the xVA desk.
        """
        mask = np.asarray(mask, dtype=bool)
        if np.any(mask & self.defaulted):
            raise DefaultError("path already defaulted")
        value = np.broadcast_to(np.asarray(value, dtype=float), (self.n,))
        desk = XVA if self.two_desk else TRADING
        self.cash(date, "closeout_recovery", np.where(mask, recovery * value, 0.0), desk)
        self.cash(date, "reentry_purchase", np.where(mask, -value, 0.0), desk)
        self.defaulted = self.defaulted | mask
        self.default_date = np.where(mask, date, self.default_date)

    def settle_maturity(self, date: float, payoff, S, h_payoff=None):
        """Receive the option payoff, hedge-option payoff and unwind all stock."""
        self.cash(date, "payoff", payoff, TRADING)
        if self.two_desk:
            x1 = self.phi1 - self.phi1_trading
            self.cash(date, "stock_unwind", self.phi1_trading * S, TRADING)
            self.cash(date, "stock_unwind", x1 * S, XVA)
            if h_payoff is not None:
                x2 = self.phi2 - self.phi2_trading
                self.cash(date, "hedge_option_payoff", self.phi2_trading * h_payoff, TRADING)
                self.cash(date, "hedge_option_payoff", x2 * h_payoff, XVA)
            self.phi1_trading = np.zeros(self.n)
            self.phi2_trading = np.zeros(self.n)
        else:
            self.cash(date, "stock_unwind", self.phi1 * S, TRADING)
            if h_payoff is not None:
                self.cash(date, "hedge_option_payoff", self.phi2 * h_payoff, TRADING)
        self.phi1 = np.zeros(self.n)
        self.phi2 = np.zeros(self.n)


def desk_split_report(wealth_history, trading_history, xva_history):
    """Per-desk series and the largest conservation gap |W_T + W_X - W|."""
    gap = np.max(np.abs(np.asarray(trading_history) + np.asarray(xva_history)
                        - np.asarray(wealth_history)))
    return {"w_trading": np.asarray(trading_history), "w_xva": np.asarray(xva_history),
            "max_gap": float(gap)}
