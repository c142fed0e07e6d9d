"""Constant-hazard counterparty credit: default probabilities, CVA and risky values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .market import PathSet
from .pricing.options import EuropeanOption


@dataclass(frozen=True)
class CreditCurve:
    hazard: float
    recovery: float

    def __post_init__(self):
        if self.hazard < 0:
            raise ValueError("hazard rate must be non-negative")
        if not 0 <= self.recovery <= 1:
            raise ValueError("recovery must lie in [0, 1]")

    @property
    def lgd(self) -> float:
        return 1.0 - self.recovery


def survival_probability(curve: CreditCurve, t: float, T: float) -> float:
    if T < t:
        raise ValueError("survival horizon ends before it starts")
    return math.exp(-curve.hazard * (T - t))


def default_probability(curve: CreditCurve, t: float, T: float) -> float:
    if T < t:
        raise ValueError("default horizon ends before it starts")
    return -math.expm1(-curve.hazard * (T - t))


def risky_factor(curve: CreditCurve, t: float, tK: float) -> float:
    """Multiplier c with risky value = c * V, c = 1 - (1 - R) PD(t, tK)."""
    return 1.0 - curve.lgd * default_probability(curve, t, tK)


def _check_value(V):
    if np.any(np.asarray(V) < 0):
        raise ValueError("CVA is defined here for long option positions with non-negative value")


def cva_european(V, curve: CreditCurve, t: float, tK: float):
    """(1 - R) V(t) PD(t, tK) for a bought option, no wrong-way risk."""
    _check_value(V)
    return curve.lgd * np.asarray(V, dtype=float) * default_probability(curve, t, tK)


def risky_value(V, curve: CreditCurve, t: float, tK: float):
    _check_value(V)
    return np.asarray(V, dtype=float) * risky_factor(curve, t, tK)


def estimate_epe_mc(paths: PathSet, option: EuropeanOption, r: float, pricer, k: int):
    """Discounted expected positive exposure at grid date k.

    Returns ``(estimate, standard error)``; the identity EPE(t0, t_k) = V(t0) holds
    for a bought option under any arbitrage-free model.
    """
    t = float(paths.grid.dates[k])
    S = paths.values[:, k]
    if t >= option.maturity:
        exposure = option.payoff(S)
    else:
        exposure = np.maximum(pricer.price(option, S, t), 0.0)
    disc = math.exp(-r * (t - paths.grid.t0)) * exposure
    se = float(disc.std() / math.sqrt(len(disc))) if len(disc) > 1 else 0.0
    return float(disc.mean()), se
