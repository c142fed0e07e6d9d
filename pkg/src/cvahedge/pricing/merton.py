"""European options under Merton jump-diffusion via the Poisson-weighted series.

Each series term is a Black-Scholes-like value conditional on ``n`` jumps before
maturity, weighted by ``w_n = (xi tau)^n e^{-xi tau} / n!``.  The series is cut
once the weighted term bound is below the requested tolerance and ``n`` is past
the Poisson mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import ndtr
from scipy.stats import poisson

from ..market import MertonParams
from .black_scholes import Greeks, norm_pdf
from .options import EuropeanOption

DEFAULT_TOLERANCE = 1e-12
MAX_TERMS = 2000

QUANTITIES = ("price", "delta", "d_mu", "d_sigma", "d_xi")


@dataclass(frozen=True)
class MertonTermDiagnostics:
    terms_used: int
    tolerance: float
    weights: list[float] = field(default_factory=list)


def poisson_weights(lam: float, n_terms: int) -> np.ndarray:
    return poisson.pmf(np.arange(n_terms), lam)


def weight_cutoff(lam: float, tolerance: float) -> int:
    """Number of leading terms whose Poisson weight is at least ``tolerance``."""
    if not 0 < tolerance < 1:
        raise ValueError("tolerance must lie in (0, 1)")
    n = 0
    while n < MAX_TERMS and (poisson.pmf(n, lam) >= tolerance or n <= lam):
        n += 1
    return max(n, 1)


def _forward_factor(S, params: MertonParams, tau: float, n: int):
    # S e^{mu_hat(n) - ln S + sigma_hat(n)^2 tau / 2}: expected terminal value given n jumps
    return S * math.exp((params.r - params.xi * params.mean_jump) * tau
                        + n * (params.mu_j + 0.5 * params.sigma_j**2))


def _term_bound(quantity: str, S: float, K: float, params: MertonParams, tau: float) -> Callable[[int], float]:
    """Upper bound on |term n| (before weighting) for each series."""
    growth = math.exp(params.mu_j + 0.5 * params.sigma_j**2)
    xi = params.xi

    def bound(n: int) -> float:
        F = _forward_factor(S, params, tau, n)
        sig_hat = math.sqrt(params.sigma**2 + n * params.sigma_j**2 / tau)
        spread = abs(n - xi * growth * tau)
        if quantity == "price":
            return F + K
        if quantity == "delta":
            return F / S
        if quantity == "d_mu":
            return spread * F
        if quantity == "d_sigma":
            return params.sigma_j * (spread * F + K * n / (sig_hat * math.sqrt(2 * math.pi * tau)))
        if quantity == "d_xi":
            ratio = n / xi if xi > 0 else 0.0
            return (F + K) * abs(ratio - tau) + abs(params.mean_jump) * tau * F
        raise ValueError(f"unknown series quantity {quantity!r}")

    return bound


def terms_needed(quantity: str, option: EuropeanOption, S, params: MertonParams, t: float,
                 tolerance: float) -> int:
    """Smallest N with w_N * bound_N < tolerance and N past the Poisson mode."""
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    tau = option.time_to_maturity(t)
    s_max = float(np.max(S))
    lam = params.xi * tau
    bound = _term_bound(quantity, s_max, option.strike, params, tau)
    n = 0
    while n < MAX_TERMS:
        w = poisson.pmf(n, lam)
        if n > lam and w * bound(n) < tolerance:
            break
        n += 1
    return max(n, 1)


def _series(option: EuropeanOption, S, params: MertonParams, t: float, tolerance: float,
            jump: bool):
    tau = option.time_to_maturity(t)
    if np.any(np.asarray(S) <= 0):
        raise ValueError("spot must be positive")
    S = np.asarray(S, dtype=float)
    K, r = option.strike, params.r
    n_terms = terms_needed("price", option, S, params, t, tolerance)
    lam = params.xi * tau
    # one extra weight/term for the shifted d/dxi sum
    w = poisson_weights(lam, n_terms + 1)
    growth = math.exp(params.mu_j + 0.5 * params.sigma_j**2)
    kappa = params.mean_jump
    sqrt_tau = math.sqrt(tau)
    log_sk = np.log(S / K)

    price = np.zeros_like(S)
    delta = np.zeros_like(S)
    gamma = np.zeros_like(S)
    d_mu = np.zeros_like(S) if jump else None
    d_sigma = np.zeros_like(S) if jump else None
    d_xi = np.zeros_like(S) if jump else None
    for n in range(n_terms + 1):
        sig_hat = math.sqrt(params.sigma**2 + n * params.sigma_j**2 / tau)
        sst = sig_hat * sqrt_tau
        d1 = (log_sk + (r - params.xi * kappa - 0.5 * params.sigma**2 + sig_hat**2) * tau
              + n * params.mu_j) / sst
        d2 = d1 - sst
        F = _forward_factor(S, params, tau, n)
        fn1 = F * ndtr(d1)
        v_bar = fn1 - K * ndtr(d2)
        if jump and n >= 1:
            # n/xi * w_n = tau * w_{n-1}; finite at xi = 0
            d_xi += tau * w[n - 1] * v_bar
        if n == n_terms:
            break
        wn = w[n]
        price += wn * v_bar
        delta += wn * fn1 / S
        gamma += wn * F * norm_pdf(d1) / (S * S * sst)
        if jump:
            spread = n - params.xi * growth * tau
            d_mu += wn * spread * fn1
            d_sigma += wn * (params.sigma_j * spread * fn1
                             + K * norm_pdf(d2) * n * params.sigma_j / sst)
            d_xi += wn * (-tau * v_bar - kappa * tau * fn1)

    disc = math.exp(-r * tau)
    price *= disc
    delta *= disc
    gamma *= disc
    if not option.is_call:
        price = price - S + K * disc
        delta = delta - 1.0
    sens = None
    if jump:
        sens = (d_mu * disc, d_sigma * disc, d_xi * disc)
    diag = MertonTermDiagnostics(n_terms, tolerance, [float(x) for x in w[:n_terms]])
    return price, delta, gamma, sens, diag


def _check_tol(tolerance):
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")


def merton_price(option: EuropeanOption, S, params: MertonParams, t: float,
                 tolerance: float = DEFAULT_TOLERANCE):
    _check_tol(tolerance)
    price, _, _, _, diag = _series(option, S, params, t, tolerance, jump=False)
    return price, diag


def merton_delta(option: EuropeanOption, S, params: MertonParams, t: float,
                 tolerance: float = DEFAULT_TOLERANCE):
    _check_tol(tolerance)
    return _series(option, S, params, t, tolerance, jump=False)[1]


def merton_gamma(option: EuropeanOption, S, params: MertonParams, t: float,
                 tolerance: float = DEFAULT_TOLERANCE):
    _check_tol(tolerance)
    return _series(option, S, params, t, tolerance, jump=False)[2]


def merton_jump_sensitivities(option: EuropeanOption, S, params: MertonParams, t: float,
                              tolerance: float = DEFAULT_TOLERANCE):
    """(dV/dmu_J, dV/dsigma_J, dV/dxi_J); identical for calls and puts."""
    _check_tol(tolerance)
    return _series(option, S, params, t, tolerance, jump=True)[3]


@dataclass(frozen=True)
class MertonModel:
    params: MertonParams
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def r(self) -> float:
        return self.params.r

    def price(self, option, S, t):
        return merton_price(option, S, self.params, t, self.tolerance)[0]

    def delta(self, option, S, t):
        return merton_delta(option, S, self.params, t, self.tolerance)

    def gamma(self, option, S, t):
        return merton_gamma(option, S, self.params, t, self.tolerance)

    def greeks(self, option, S, t, jump: bool = False) -> Greeks:
        price, delta, gamma, sens, _ = _series(option, S, self.params, t, self.tolerance, jump)
        return Greeks(price=price, delta=delta, gamma=gamma, d_xi=sens[2] if jump else None)
