import pytest
import yaml

from cvahedge.config import ConfigError, config_to_dict, parse_config, parse_config_text
from cvahedge.engine import ExperimentConfig
from cvahedge.presets import BASE, preset, preset_names


def test_minimal_file_gives_base_parameters():
    cfg = parse_config_text("model: bs\n")
    assert cfg == ExperimentConfig()
    assert (cfg.s0, cfg.r, cfg.sigma, cfg.strike, cfg.hazard, cfg.recovery) == (100, 0.1, 0.2, 95, 0.2, 0.5)
    assert (cfg.n_paths, cfg.steps_per_year, cfg.shares) == (100_000, 200, 100)


def test_jump_keys_need_merton():
    with pytest.raises(ConfigError, match="jump parameters require merton") as exc:
        parse_config_text("model: bs\njump:\n  xi: 0.3\n")
    assert exc.value.line == 3


@pytest.mark.parametrize("text,line", [
    ("market:\n  sigma: -0.2\n", 2),
    ("sim:\n  paths: 1.5\n", 2),
    ("sim:\n  bogus: 1\n", 2),
    ("colour: blue\n", 1),
    ("market: 3\n", 1),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as exc:
        parse_config_text(text, "x.yaml")
    assert exc.value.line == line and str(exc.value).startswith(f"x.yaml:{line}:")


def test_invalid_combination():
    with pytest.raises(ConfigError):
        parse_config_text("model: bs\nhedge: {mode: merton_delta}\n")


def test_merton_defaults_to_merton_delta():
    cfg = parse_config_text("model: merton\njump: {xi: 0.2}\n")
    assert cfg.hedge_mode == "merton_delta" and cfg.xi == 0.2


@pytest.mark.parametrize("name", ["fig1", "fig7", "fig9_stressed", "fig10"])
def test_round_trip(name, tmp_path):
    cfg = preset(name, n_paths=123, two_desk=True)
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump(config_to_dict(cfg)))
    assert parse_config(path) == cfg


def test_missing_file():
    with pytest.raises(OSError):
        parse_config("/nonexistent/run.yaml")


def test_presets():
    assert (preset("fig1").cva_mode, preset("fig1").model, preset("fig1").hedge_mode) == ("none", "bs", "bs_delta")
    assert (preset("fig7").model, preset("fig7").cva_mode) == ("bs", "priced_and_hedged")
    f10 = preset("fig10")
    assert (f10.model, f10.hedge_mode, f10.cva_mode) == ("merton", "merton_jump_option", "priced_not_hedged")
    assert preset("fig1_stressed").sigma == 0.35
    s = preset("fig9_stressed")
    assert (s.sigma_j, s.mu_j, s.xi, s.sigma) == (0.2, -0.4, 0.2, BASE.sigma)
    assert len(preset_names()) == 22
    with pytest.raises(KeyError):
        preset("fig99")
