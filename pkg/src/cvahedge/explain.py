"""One-period PnL of a book and its explained/unexplained split.

Positions and valuation date are frozen at ``t_{k-1}``; only the market data moves
from ``S(t_{k-1})`` to ``S(t_k)``.  Cash-flows never enter PnL.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PnLRecord:
    date: float
    pnl_trade: np.ndarray
    pnl_hedge: np.ndarray
    pnl_portfolio: np.ndarray
    pnl_explained: np.ndarray
    pnl_unexplained: np.ndarray


def pnl_quantities(trade_units, v_old, v_new, phi1, s_old, s_new, phi2=None, h_old=None, h_new=None):
    """(trade, hedge, portfolio) PnL of frozen positions between two market states."""
    trade = trade_units * (np.asarray(v_new) - np.asarray(v_old))
    hedge = phi1 * (np.asarray(s_new) - np.asarray(s_old))
    if phi2 is not None:
        hedge = hedge + phi2 * (np.asarray(h_new) - np.asarray(h_old))
    return trade, hedge, trade + hedge


def orthogonal_explain(pnl_portfolio, delta, gamma, dS):
    """Net first and second order stock terms; the rest is unexplained.

    ``delta`` and ``gamma`` are the sensitivities of the whole book (option plus
    hedges), so a first-order term that the hedge neutralised contributes nothing
    and is not counted twice.
    """
    dS = np.asarray(dS, dtype=float)
    explained = delta * dS + 0.5 * gamma * dS * dS
    return explained, pnl_portfolio - explained


def risk_based_explain(pnl_portfolio, delta, gamma, dS, theta, dt):
    """Orthogonal terms plus the time decay ``theta * dt``."""
    explained, _ = orthogonal_explain(pnl_portfolio, delta, gamma, dS)
    explained = explained + theta * dt
    return explained, pnl_portfolio - explained


def finite_difference_theta(price_fn, t: float, half_width: float):
    """Symmetric time bump of a pricer, ``price_fn(t)`` returning book values."""
    return (price_fn(t + half_width) - price_fn(t - half_width)) / (2 * half_width)


def explain_record(date, trade_units, v_old, v_new, phi1, s_old, s_new, delta, gamma,
                   phi2=None, h_old=None, h_new=None) -> PnLRecord:
    trade, hedge, total = pnl_quantities(trade_units, v_old, v_new, phi1, s_old, s_new,
                                         phi2, h_old, h_new)
    explained, unexplained = orthogonal_explain(total, delta, gamma, np.asarray(s_new) - s_old)
    return PnLRecord(date, trade, hedge, total, explained, unexplained)
