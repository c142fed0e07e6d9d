"""Series truncation and implied-volatility smile studies for the Merton pricer."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..market import MertonParams
from .black_scholes import bs_implied_vol
from .merton import QUANTITIES, merton_price, terms_needed
from .options import EuropeanOption

# parameter sweeps for the truncation study
TRUNCATION_SWEEPS: dict[str, np.ndarray] = {
    "T": np.array([0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0]),
    "K": np.array([50.0, 75.0, 90.0, 100.0, 110.0, 125.0, 150.0]),
    "mu_j": np.array([-0.5, -0.25, -0.125, 0.0, 0.125, 0.25, 0.5]),
    "sigma_j": np.array([0.05, 0.1, 0.2, 0.3, 0.4, 0.6]),
    "xi": np.array([0.05, 0.1, 0.25, 0.5, 1.0, 3.0, 6.0]),
}

SMILE_BASE = MertonParams(r=0.05, sigma=0.1, mu_j=-0.125, sigma_j=0.1, xi=0.25)
SMILE_VALUES = {
    "mu_j": (-0.25, -0.125, 0.0, 0.125, 0.25),
    "sigma_j": (0.05, 0.1, 0.2, 0.4, 0.6),
    "xi": (0.25, 0.5, 1.0, 3.0, 6.0),
}


@dataclass(frozen=True)
class TruncationRow:
    sweep: str
    value: float
    terms: dict[str, int]


def truncation_study(params: MertonParams, option: EuropeanOption, S: float, tolerance: float,
                     sweeps: dict[str, np.ndarray] | None = None) -> list[TruncationRow]:
    """Term counts per series quantity while sweeping one input at a time."""
    if not 0 < tolerance < 1:
        raise ValueError("tolerance must lie in (0, 1)")
    sweeps = TRUNCATION_SWEEPS if sweeps is None else sweeps
    rows = []
    for name, values in sweeps.items():
        for value in values:
            opt, par = option, params
            if name == "T":
                opt = replace(option, maturity=float(value))
            elif name == "K":
                opt = replace(option, strike=float(value))
            else:
                par = replace(params, **{name: float(value)})
            terms = {q: terms_needed(q, opt, S, par, 0.0, tolerance) for q in QUANTITIES}
            rows.append(TruncationRow(name, float(value), terms))
    return rows


def same_pattern(rows: list[TruncationRow]) -> bool:
    """Whether all quantities move together along every sweep.

    Term counts differ in level between quantities (their bounds have different
    scales), so only the direction of change is compared: along a sweep no quantity
    may need more terms where another needs fewer.
    """
    by_sweep: dict[str, list[TruncationRow]] = {}
    for row in rows:
        by_sweep.setdefault(row.sweep, []).append(row)
    for group in by_sweep.values():
        counts = np.array([[row.terms[q] for q in QUANTITIES] for row in group])
        steps = np.sign(np.diff(counts, axis=0))
        if np.any(steps.max(axis=1) * steps.min(axis=1) < 0):
            return False
        # overall trend across the sweep must agree too
        trend = np.sign(counts[-1] - counts[0])
        if trend.max() * trend.min() < 0:
            return False
    return True


def smile(params: MertonParams, strikes, S: float = 100.0, maturity: float = 1.0,
          tolerance: float = 1e-12) -> np.ndarray:
    """Black-Scholes implied vols of Merton prices, read off the out-of-the-money option."""
    forward = S * np.exp(params.r * maturity)
    vols = []
    for K in strikes:
        kind = "put" if K < forward else "call"
        opt = EuropeanOption(kind, float(K), maturity)
        price = float(merton_price(opt, S, params, 0.0, tolerance)[0])
        vols.append(bs_implied_vol(price, opt, S, params.r, 0.0))
    return np.array(vols)


def smile_study(param: str, values, strikes=None, base: MertonParams = SMILE_BASE,
                S: float = 100.0, maturity: float = 1.0) -> dict[float, np.ndarray]:
    if param not in SMILE_VALUES:
        raise ValueError(f"smile parameter must be one of {sorted(SMILE_VALUES)}")
    strikes = np.linspace(70.0, 130.0, 25) if strikes is None else np.asarray(strikes, float)
    return {float(v): smile(replace(base, **{param: float(v)}), strikes, S, maturity)
            for v in values}
