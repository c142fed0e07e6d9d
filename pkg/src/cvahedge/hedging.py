"""Hedge positions for the delta, CVA-adjusted delta and jump-option strategies."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .credit import CreditCurve, risky_factor
from .pricing.black_scholes import Greeks, bs_implied_vol_vec, norm_pdf
from .pricing.merton import MertonModel
from .pricing.options import EuropeanOption

log = logging.getLogger(__name__)

BASE_MODES = ("bs_delta", "merton_delta", "merton_jump_option", "bs_delta_on_merton_market")
HEDGE_MODES = (
    "bs_delta", "bs_delta_cva", "merton_delta", "merton_delta_cva",
    "merton_jump_option", "merton_jump_option_cva", "bs_delta_on_merton_market",
)
DEGENERACY_THRESHOLD = 1e-12


class JumpVegaDegenerateError(ArithmeticError):
    """The hedge option has (numerically) no sensitivity to the jump intensity."""


@dataclass(frozen=True)
class HedgeSpec:
    mode: str
    hedge_option: EuropeanOption | None = None

    def __post_init__(self):
        if self.mode not in HEDGE_MODES:
            raise ValueError(f"unknown hedge mode {self.mode!r}")
        if self.uses_option and self.hedge_option is None:
            raise ValueError("jump-option hedging needs a hedge option")

    @property
    def uses_option(self) -> bool:
        return self.mode.startswith("merton_jump_option")

    @property
    def cva_hedged(self) -> bool:
        return self.mode.endswith("_cva")

    @property
    def base_mode(self) -> str:
        return self.mode.removesuffix("_cva")


@dataclass(frozen=True)
class HedgePositions:
    phi1: np.ndarray
    phi2: np.ndarray | None = None


def jump_hedge_ratios(delta_v, dxi_v, delta_h, dxi_h, S, threshold: float = DEGENERACY_THRESHOLD):
    """Units of stock and hedge option neutralising dV/dS and dV/dxi.

    Returns ``(phi1, phi2, degenerate)``; where ``|dH/dxi| < threshold * S`` the hedge
    falls back to stock only.
    """
    S = np.asarray(S, dtype=float)
    degenerate = np.abs(dxi_h) < threshold * S
    with np.errstate(divide="ignore", invalid="ignore"):
        phi2 = np.where(degenerate, 0.0, -dxi_v / np.where(degenerate, 1.0, dxi_h))
    phi1 = -delta_v - phi2 * delta_h
    return phi1, phi2, degenerate


def bs_delta_hedge(pricer, option: EuropeanOption, S, t: float) -> HedgePositions:
    return HedgePositions(-np.asarray(pricer.delta(option, S, t)))


def cva_adjusted_delta(pricer, option: EuropeanOption, curve: CreditCurve, S, t: float,
                       tK: float) -> HedgePositions:
    return HedgePositions(-np.asarray(pricer.delta(option, S, t)) * risky_factor(curve, t, tK))


def merton_jump_option_hedge(pricer: MertonModel, option: EuropeanOption,
                             hedge_option: EuropeanOption, S, t: float,
                             on_degenerate: str = "raise",
                             threshold: float = DEGENERACY_THRESHOLD) -> HedgePositions:
    gv = pricer.greeks(option, S, t, jump=True)
    gh = pricer.greeks(hedge_option, S, t, jump=True)
    phi1, phi2, bad = jump_hedge_ratios(gv.delta, gv.d_xi, gh.delta, gh.d_xi, S, threshold)
    if np.any(bad):
        if on_degenerate == "raise":
            raise JumpVegaDegenerateError("jump-vega degenerate: hedge option has no xi sensitivity")
        log.warning("jump-vega degenerate on %d paths at t=%.6g; delta hedge used", int(bad.sum()), t)
    return HedgePositions(phi1, phi2)


def implied_bs_greeks(option: EuropeanOption, price, S, r: float, t: float) -> Greeks:
    """Black-Scholes delta and gamma at the volatility implied by an observed price."""
    S = np.asarray(S, dtype=float)
    vol = bs_implied_vol_vec(price, option, S, r, t)
    tau = option.time_to_maturity(t)
    sst = vol * math.sqrt(tau)
    d1 = (np.log(S / option.strike) + (r + 0.5 * vol * vol) * tau) / sst
    delta = ndtr(d1) - (0.0 if option.is_call else 1.0)
    gamma = norm_pdf(d1) / (S * sst)
    return Greeks(price=np.asarray(price, dtype=float), delta=delta, gamma=gamma)


def hedge_positions(spec: HedgeSpec, option: EuropeanOption, S, t: float, pricer,
                    curve: CreditCurve | None = None, tK: float | None = None,
                    on_degenerate: str = "fallback") -> HedgePositions:
    """Positions for any hedge mode; ``_cva`` modes scale by the risky-value factor."""
    scale = 1.0
    if spec.cva_hedged:
        if curve is None:
            raise ValueError("CVA-hedged modes need a credit curve")
        scale = risky_factor(curve, t, option.maturity if tK is None else tK)
    mode = spec.base_mode
    if mode == "merton_jump_option":
        if not isinstance(pricer, MertonModel):
            raise ValueError("jump-option hedging needs the Merton pricer")
        pos = merton_jump_option_hedge(pricer, option, spec.hedge_option, S, t, on_degenerate)
        return HedgePositions(scale * pos.phi1, scale * pos.phi2)
    if mode == "bs_delta_on_merton_market":
        if not isinstance(pricer, MertonModel):
            raise ValueError("bs_delta_on_merton_market needs the Merton pricer for market prices")
        g = implied_bs_greeks(option, pricer.price(option, S, t), S, pricer.r, t)
        return HedgePositions(-scale * g.delta)
    if mode == "merton_delta" and not isinstance(pricer, MertonModel):
        raise ValueError("merton_delta needs the Merton pricer")
    return HedgePositions(-scale * np.asarray(pricer.delta(option, S, t)))
