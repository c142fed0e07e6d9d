"""Named experiment configurations ``fig1`` to ``fig11``, one per reported result.

``fig5`` and ``fig6`` are studies rather than single runs: the discretisation and
path-count sweep, and the analytic PnL moments against simulation.  Their preset
is the base run the study starts from.  A ``_stressed`` suffix switches to the
stressed market (higher diffusion vol for Black-Scholes; larger and more frequent
jumps for Merton).
"""

from __future__ import annotations

from dataclasses import replace

from .engine import ExperimentConfig

BASE = ExperimentConfig()

STRESSED_BS = {"sigma": 0.35}
STRESSED_MERTON = {"sigma_j": 0.2, "mu_j": -0.4, "xi": 0.2}

_PRESETS: dict[str, dict] = {
    "fig1": dict(model="bs", hedge_mode="bs_delta", cva_mode="none"),
    "fig2": dict(model="bs", hedge_mode="bs_delta", cva_mode="cash_at_inception"),
    "fig3": dict(model="bs", hedge_mode="bs_delta", cva_mode="priced_not_hedged"),
    "fig4": dict(model="bs", hedge_mode="bs_delta", cva_mode="priced_not_hedged"),
    "fig5": dict(model="bs", hedge_mode="bs_delta", cva_mode="none"),
    "fig6": dict(model="bs", hedge_mode="bs_delta", cva_mode="none"),
    "fig7": dict(model="bs", hedge_mode="bs_delta", cva_mode="priced_and_hedged"),
    "fig8": dict(model="merton", hedge_mode="bs_delta_on_merton_market",
                 cva_mode="priced_not_hedged"),
    "fig9": dict(model="merton", hedge_mode="merton_delta", cva_mode="priced_and_hedged"),
    "fig10": dict(model="merton", hedge_mode="merton_jump_option",
                  cva_mode="priced_not_hedged"),
    "fig11": dict(model="merton", hedge_mode="merton_jump_option",
                  cva_mode="priced_and_hedged"),
}

# sweep grids for the convergence study
SWEEP_STEPS = (50, 100, 200, 400)
SWEEP_PATHS = (1_000, 10_000, 100_000)


def preset_names() -> list[str]:
    names = list(_PRESETS)
    return names + [f"{n}_stressed" for n in names]


def preset(name: str, **overrides) -> ExperimentConfig:
    stressed = name.endswith("_stressed")
    key = name.removesuffix("_stressed")
    if key not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(preset_names())}")
    fields = dict(_PRESETS[key])
    if stressed:
        fields.update(STRESSED_MERTON if fields["model"] == "merton" else STRESSED_BS)
    fields.update(overrides)
    return replace(BASE, **fields)
