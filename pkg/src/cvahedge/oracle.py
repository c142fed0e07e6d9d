"""Closed-form mean and variance of the delta-hedged Black-Scholes PnL.

The one-period PnL of a delta-hedged option revalued at the old date is close to
``0.5 * gamma * dS^2``.  With ``S(t_k) = S(t_{k-1}) e^X`` and ``d2`` normal across
paths, both moments follow from lognormal and non-central chi-squared identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class NumericalCancellationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class LogReturnMoments:
    mu_x: float
    sigma_x: float
    mu_d2: float
    sigma_d2: float

    @classmethod
    def at(cls, t_prev: float, t0: float, T: float, dt: float, S0: float, K: float,
           r: float, sigma: float) -> "LogReturnMoments":
        tau = T - t_prev
        if not tau > 0:
            raise ValueError("time to maturity must be positive")
        drift = r - 0.5 * sigma**2
        mu_d2 = (math.log(S0 / K) + drift * (T - t0)) / (sigma * math.sqrt(tau))
        return cls(drift * dt, sigma * math.sqrt(dt), mu_d2, math.sqrt((t_prev - t0) / tau))


def _second_moment_step(mu_x: float, s2: float) -> float:
    # E[(e^X - 1)^2]
    return math.expm1(s2) * math.exp(2 * mu_x + s2) + math.expm1(mu_x + 0.5 * s2) ** 2


def f_term(mu_x: float, sigma_x: float) -> float:
    """E[(e^X - 1)^4] from the moment generating function."""
    s2 = sigma_x**2
    return (math.exp(4 * mu_x + 8 * s2) - 4 * math.exp(3 * mu_x + 4.5 * s2)
            + 6 * math.exp(2 * mu_x + 2 * s2) - 4 * math.exp(mu_x + 0.5 * s2) + 1.0)


def g_term(mu_x: float, sigma_x: float) -> float:
    return _second_moment_step(mu_x, sigma_x**2) ** 2


def pnl_mean_analytic(m: LogReturnMoments, K: float, r: float, sigma: float, tau: float) -> float:
    if not tau > 0:
        raise ValueError("time to maturity must be positive")
    v = 1.0 + m.sigma_d2**2
    e_phi = math.exp(-m.mu_d2**2 / (2 * v)) / (math.sqrt(2 * math.pi) * math.sqrt(v))
    return K * math.exp(-r * tau) / (2 * sigma * math.sqrt(tau)) * e_phi * _second_moment_step(
        m.mu_x, m.sigma_x**2)


def pnl_variance_analytic(m: LogReturnMoments, K: float, r: float, sigma: float, tau: float) -> float:
    if not tau > 0:
        raise ValueError("time to maturity must be positive")
    s2 = m.sigma_d2**2
    f = f_term(m.mu_x, m.sigma_x)
    g = g_term(m.mu_x, m.sigma_x)
    bracket = (f * math.exp(-m.mu_d2**2 / (1 + 2 * s2)) / math.sqrt(1 + 2 * s2)
               - g * math.exp(-m.mu_d2**2 / (1 + s2)) / (1 + s2))
    scale = K**2 * math.exp(-2 * r * tau) / (8 * math.pi * sigma**2 * tau)
    var = scale * bracket
    if var < 0:
        if var < -1e-12 * scale * max(f, g, 1e-300):
            raise NumericalCancellationError(f"negative variance {var!r}")
        var = 0.0
    return var


def pnl_gamma_approximation(gamma, dS):
    return 0.5 * np.square(dS) * gamma


def oracle_series(dates, S0: float, K: float, r: float, sigma: float, T: float):
    """Analytic (mean, volatility) of the one-step PnL starting at each date except the last."""
    dates = np.asarray(dates, dtype=float)
    t0, dt = dates[0], dates[1] - dates[0]
    means, vols = [], []
    for t_prev in dates[:-1]:
        tau = T - t_prev
        m = LogReturnMoments.at(t_prev, t0, T, dt, S0, K, r, sigma)
        means.append(pnl_mean_analytic(m, K, r, sigma, tau))
        vols.append(math.sqrt(pnl_variance_analytic(m, K, r, sigma, tau)))
    return np.array(means), np.array(vols)
