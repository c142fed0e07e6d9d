"""YAML experiment files.

Keys are nested by section; every key is checked and errors carry the line number::

    model: merton
    hedge: {mode: merton_delta}
    cva: {mode: priced_and_hedged}
    market: {s0: 100, r: 0.1, sigma: 0.2}
    sim: {paths: 100000, steps_per_year: 200, seed: 7}
"""

from __future__ import annotations

from dataclasses import fields, replace
from pathlib import Path

import yaml

from .engine import ExperimentConfig

# (section, key) -> ExperimentConfig field
KEYS: dict[tuple[str | None, str], str] = {
    (None, "model"): "model",
    ("hedge", "mode"): "hedge_mode",
    ("cva", "mode"): "cva_mode",
    ("market", "s0"): "s0",
    ("market", "r"): "r",
    ("market", "sigma"): "sigma",
    ("market", "mu"): "mu",
    ("market", "t0"): "t0",
    ("credit", "hazard"): "hazard",
    ("credit", "recovery"): "recovery",
    ("jump", "mu"): "mu_j",
    ("jump", "sigma"): "sigma_j",
    ("jump", "xi"): "xi",
    ("sim", "paths"): "n_paths",
    ("sim", "steps_per_year"): "steps_per_year",
    ("sim", "seed"): "seed",
    ("sim", "workers"): "workers",
    ("sim", "merton_tolerance"): "merton_tolerance",
    ("option", "kind"): "option_kind",
    ("option", "strike"): "strike",
    ("option", "maturity"): "maturity",
    ("option", "shares"): "shares",
    ("hedge_option", "kind"): "hedge_option_kind",
    ("hedge_option", "strike"): "hedge_option_strike",
    ("hedge_option", "maturity"): "hedge_option_maturity",
    ("report", "two_desk"): "two_desk",
    ("report", "event_log_paths"): "event_log_paths",
    ("report", "histogram_bins"): "histogram_bins",
}
SECTIONS = {s for s, _ in KEYS if s is not None}
_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def _coerce(field_name: str, value, line: int, source: str):
    kind = _TYPES[field_name]
    try:
        if kind == "int":
            if isinstance(value, bool) or float(value) != int(value):
                raise ValueError
            return int(value)
        if kind == "bool":
            if not isinstance(value, bool):
                raise ValueError
            return value
        if kind in ("float", "float | None"):
            if value is None and kind == "float | None":
                return None
            if isinstance(value, bool):
                raise ValueError
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{field_name}: cannot read {value!r} as {kind}", line, source) from None


def _walk(node, source: str):
    """Yield ((section, key), value, line) from a composed YAML mapping."""
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("top level must be a mapping", node.start_mark.line + 1, source)
    for key_node, value_node in node.value:
        key = key_node.value
        line = key_node.start_mark.line + 1
        if key in SECTIONS:
            if not isinstance(value_node, yaml.MappingNode):
                raise ConfigError(f"section {key!r} must be a mapping", line, source)
            for sub_key, sub_val in value_node.value:
                yield (key, sub_key.value), sub_val, sub_key.start_mark.line + 1
        else:
            yield (None, key), value_node, line


def parse_config_text(text: str, source: str = "<config>") -> ExperimentConfig:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"malformed YAML: {exc}", mark.line + 1 if mark else None, source) from None
    if root is None:
        return ExperimentConfig()
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    jump_line = None
    for (section, key), node, line in _walk(root, source):
        if (section, key) not in KEYS:
            name = key if section is None else f"{section}.{key}"
            raise ConfigError(f"unknown key {name!r}", line, source)
        if section == "jump" and jump_line is None:
            jump_line = line
        value = yaml.SafeLoader("").construct_object(node, deep=True)
        field_name = KEYS[(section, key)]
        values[field_name] = _coerce(field_name, value, line, source)
        lines[field_name] = line
    model = values.get("model", ExperimentConfig.model)
    if jump_line is not None and model != "merton":
        raise ConfigError("jump parameters require merton", jump_line, source)
    if "hedge_mode" not in values and model == "merton":
        values["hedge_mode"] = "merton_delta"
    for name in ("sigma", "sigma_j", "xi", "hazard", "strike", "s0", "shares"):
        if name in values and values[name] is not None and values[name] < 0:
            raise ConfigError(f"{name} must not be negative", lines[name], source)
    try:
        return replace(ExperimentConfig(), **values)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), None, source) from None


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config_text(path.read_text(), str(path))


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Nested mapping in the file layout; round-trips through :func:`parse_config_text`."""
    out: dict = {}
    for (section, key), name in KEYS.items():
        if section == "jump" and cfg.model != "merton":
            continue
        value = getattr(cfg, name)
        if section is None:
            out[key] = value
        else:
            out.setdefault(section, {})[key] = value
    return out
