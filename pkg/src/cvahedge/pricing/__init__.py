from .black_scholes import (
    ArbitrageBoundError,
    BlackScholesModel,
    Greeks,
    bs_delta,
    bs_gamma,
    bs_implied_vol,
    bs_implied_vol_vec,
    bs_price,
    bs_vega,
)
from .merton import (
    MertonModel,
    MertonTermDiagnostics,
    merton_delta,
    merton_gamma,
    merton_jump_sensitivities,
    merton_price,
)
from .options import EuropeanOption

__all__ = [
    "ArbitrageBoundError", "BlackScholesModel", "EuropeanOption", "Greeks",
    "MertonModel", "MertonTermDiagnostics", "bs_delta", "bs_gamma", "bs_implied_vol",
    "bs_implied_vol_vec", "bs_price", "bs_vega", "merton_delta", "merton_gamma",
    "merton_jump_sensitivities", "merton_price",
]
