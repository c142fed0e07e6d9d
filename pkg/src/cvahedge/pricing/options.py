from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

OptionKind = Literal["call", "put"]


@dataclass(frozen=True)
class EuropeanOption:
    """Cash-settled European option on a single stock.

    Prices and Greeks are quoted per share; ``shares`` is the multiplier
    applied when reporting book values.
    """

    kind: OptionKind
    strike: float
    maturity: float
    shares: float = 1.0

    def __post_init__(self):
        if self.kind not in ("call", "put"):
            raise ValueError(f"option kind must be 'call' or 'put', got {self.kind!r}")
        if not self.strike > 0:
            raise ValueError("strike must be positive")
        if not self.shares > 0:
            raise ValueError("shares must be positive")

    @property
    def is_call(self) -> bool:
        return self.kind == "call"

    def payoff(self, spot):
        spot = np.asarray(spot, dtype=float)
        if self.is_call:
            return np.maximum(spot - self.strike, 0.0)
        return np.maximum(self.strike - spot, 0.0)

    def time_to_maturity(self, t: float) -> float:
        tau = self.maturity - t
        if not tau > 0:
            raise ValueError(
                f"valuation time {t} is not before maturity {self.maturity}; "
                "use payoff() at expiry"
            )
        return tau
