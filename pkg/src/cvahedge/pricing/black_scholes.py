"""Black-Scholes prices, Greeks and implied volatility for European options."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from .options import EuropeanOption

SQRT_2PI = math.sqrt(2.0 * math.pi)

IV_LOWER = 1e-6
IV_UPPER = 5.0


class ArbitrageBoundError(ValueError):
    """Raised when a quoted price lies outside the no-arbitrage interval."""


def norm_pdf(x):
    return np.exp(-0.5 * np.square(x)) / SQRT_2PI


def norm_cdf(x):
    return ndtr(x)


def _d1_d2(S, K, r, sigma, tau):
    sig_sqrt = sigma * np.sqrt(tau)
    d1 = (np.log(S / K) + (r + 0.5 * sigma * sigma) * tau) / sig_sqrt
    return d1, d1 - sig_sqrt


def _check(S, sigma):
    if np.any(np.asarray(S) <= 0):
        raise ValueError("spot must be positive")
    if np.any(np.asarray(sigma) <= 0):
        raise ValueError("volatility must be positive")


def bs_price(option: EuropeanOption, S, r: float, sigma, t: float):
    """Black-Scholes value per share; puts follow from put-call parity."""
    tau = option.time_to_maturity(t)
    _check(S, sigma)
    S = np.asarray(S, dtype=float)
    K = option.strike
    d1, d2 = _d1_d2(S, K, r, sigma, tau)
    disc_k = K * math.exp(-r * tau)
    call = S * ndtr(d1) - disc_k * ndtr(d2)
    if option.is_call:
        return call
    return call - S + disc_k


def bs_delta(option: EuropeanOption, S, r: float, sigma, t: float):
    tau = option.time_to_maturity(t)
    _check(S, sigma)
    d1, _ = _d1_d2(np.asarray(S, dtype=float), option.strike, r, sigma, tau)
    delta = ndtr(d1)
    return delta if option.is_call else delta - 1.0


def bs_gamma(option: EuropeanOption, S, r: float, sigma, t: float):
    """Gamma in the strike form K e^{-r tau} phi(d2) / (S^2 sigma sqrt(tau))."""
    tau = option.time_to_maturity(t)
    _check(S, sigma)
    S = np.asarray(S, dtype=float)
    _, d2 = _d1_d2(S, option.strike, r, sigma, tau)
    return (
        option.strike * math.exp(-r * tau) * norm_pdf(d2)
        / (S * S * sigma * math.sqrt(tau))
    )


def bs_vega(option: EuropeanOption, S, r: float, sigma, t: float):
    tau = option.time_to_maturity(t)
    S = np.asarray(S, dtype=float)
    d1, _ = _d1_d2(S, option.strike, r, sigma, tau)
    return S * norm_pdf(d1) * math.sqrt(tau)


def price_bounds(option: EuropeanOption, S, r: float, t: float):
    """No-arbitrage (lower, upper) bounds on a European option price."""
    tau = option.time_to_maturity(t)
    disc_k = option.strike * math.exp(-r * tau)
    S = np.asarray(S, dtype=float)
    if option.is_call:
        return np.maximum(S - disc_k, 0.0), S
    return np.maximum(disc_k - S, 0.0), np.full_like(S, disc_k)


def bs_implied_vol(price: float, option: EuropeanOption, S: float, r: float, t: float) -> float:
    """Bracketed root find for the Black-Scholes volatility matching ``price``."""
    lower, upper = (float(b) for b in price_bounds(option, S, r, t))
    if not lower < price < upper:
        raise ArbitrageBoundError(
            f"price {price!r} outside no-arbitrage bounds ({lower!r}, {upper!r})"
        )

    def objective(sigma):
        return float(bs_price(option, S, r, sigma, t)) - price

    f_lo, f_hi = objective(IV_LOWER), objective(IV_UPPER)
    if f_lo >= 0:
        return IV_LOWER
    if f_hi <= 0:
        raise ArbitrageBoundError(f"price {price!r} needs volatility above {IV_UPPER}")
    return brentq(objective, IV_LOWER, IV_UPPER, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)


def bs_implied_vol_vec(prices, option: EuropeanOption, S, r: float, t: float,
                       price_tol: float = 1e-10, max_iter: int = 100):
    """Vectorised implied volatility: Newton steps kept inside a shrinking bisection bracket.

    Prices at or beyond the bounds are clamped to the bracket ends rather than raising,
    since this runs inside path simulations.
    """
    prices = np.asarray(prices, dtype=float)
    S = np.broadcast_to(np.asarray(S, dtype=float), prices.shape)
    lo = np.full(prices.shape, IV_LOWER)
    hi = np.full(prices.shape, IV_UPPER)
    sigma = np.full(prices.shape, 0.3)
    tol = price_tol * S
    for _ in range(max_iter):
        diff = bs_price(option, S, r, sigma, t) - prices
        done = np.abs(diff) < tol
        if done.all():
            break
        above = diff > 0
        hi = np.where(above, sigma, hi)
        lo = np.where(above, lo, sigma)
        vega = bs_vega(option, S, r, sigma, t)
        with np.errstate(all="ignore"):
            newton = sigma - diff / vega
        bisect = 0.5 * (lo + hi)
        ok = np.isfinite(newton) & (newton > lo) & (newton < hi)
        step = np.where(ok, newton, bisect)
        sigma = np.where(done, sigma, step)
        if np.all((hi - lo) < 1e-15):
            break
    return sigma


@dataclass(frozen=True)
class BlackScholesModel:
    """Pricing model with constant volatility; used for valuation and hedging."""

    r: float
    sigma: float

    def __post_init__(self):
        # sigma = 0 is the deterministic limit, used for hand-checkable ledgers
        if not self.sigma >= 0:
            raise ValueError("sigma must be non-negative")

    def price(self, option, S, t):
        if self.sigma == 0:
            return self.greeks(option, S, t).price
        return bs_price(option, S, self.r, self.sigma, t)

    def delta(self, option, S, t):
        if self.sigma == 0:
            return self.greeks(option, S, t).delta
        return bs_delta(option, S, self.r, self.sigma, t)

    def gamma(self, option, S, t):
        if self.sigma == 0:
            return self.greeks(option, S, t).gamma
        return bs_gamma(option, S, self.r, self.sigma, t)

    def greeks(self, option, S, t, jump: bool = False):
        tau = option.time_to_maturity(t)
        S = np.asarray(S, dtype=float)
        K, r, sigma = option.strike, self.r, self.sigma
        if sigma == 0:
            return _zero_vol_greeks(option, S, r, tau, jump)
        d1, d2 = _d1_d2(S, K, r, sigma, tau)
        disc_k = K * math.exp(-r * tau)
        nd1 = ndtr(d1)
        call = S * nd1 - disc_k * ndtr(d2)
        if option.is_call:
            price, delta = call, nd1
        else:
            price, delta = call - S + disc_k, nd1 - 1.0
        gamma = disc_k * norm_pdf(d2) / (S * S * sigma * math.sqrt(tau))
        return Greeks(price=price, delta=delta, gamma=gamma,
                      d_xi=np.zeros_like(price) if jump else None)


def _zero_vol_greeks(option: EuropeanOption, S, r: float, tau: float, jump: bool):
    disc_k = option.strike * math.exp(-r * tau)
    sign = 1.0 if option.is_call else -1.0
    price = np.maximum(sign * (S - disc_k), 0.0)
    delta = np.where(sign * (S - disc_k) > 0, sign, 0.0)
    zeros = np.zeros_like(price)
    return Greeks(price=price, delta=delta, gamma=zeros, d_xi=zeros if jump else None)


@dataclass(frozen=True)
class Greeks:
    price: np.ndarray
    delta: np.ndarray
    gamma: np.ndarray
    d_xi: np.ndarray | None = None
