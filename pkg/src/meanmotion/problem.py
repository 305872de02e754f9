"""Reading problem description files.

A problem file is a JSON object with exactly one of the keys ``oscillators``,
``system`` or ``blocks`` and an optional ``config`` block::

    {"oscillators": [{"re": 1.0, "im": 0.0, "freq": 1.414}, ...]}
    {"system": {"A": [[...], ...], "b": [...], "p": [...]}}
    {"blocks": {"freqs": [2.0, 1.0], "b": [...], "p": [...]},
     "config": {"quadrature": {"tol": 1e-9}, "zero": {"oversample": 32}}}
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .exceptions import ValidationError
from .mean_motion import UnwrapConfig
from .spectral import (
    LinearSystem,
    OscillatorSum,
    blocks_oscillator_sum,
    extract_oscillator_sum,
)
from .switching import ZeroConfig
from .torus_volume import QuadratureConfig

FORMS = ("oscillators", "system", "blocks")
_CONFIG_KEYS = {
    "quadrature": {"tol", "max_panels", "panel_order"},
    "zero": {"oversample", "tol_m", "tol_m_resid"},
    "unwrap": {"h_max", "eps_z", "max_refinements"},
    "mc": {"samples", "seed"},
}


@dataclass(frozen=True)
class MonteCarloConfig:
    samples: int = 1_000_000
    seed: int | None = None


@dataclass(frozen=True)
class Problem:
    form: str
    oscillators: OscillatorSum
    system: LinearSystem | None = None
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    zero: ZeroConfig = field(default_factory=ZeroConfig)
    unwrap: UnwrapConfig = field(default_factory=UnwrapConfig)
    mc: MonteCarloConfig = field(default_factory=MonteCarloConfig)


def load_problem(path: str | Path) -> Problem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read input file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"input file {path} is not valid JSON: {exc}") from exc
    return parse_problem(data)


def parse_problem(data: Any) -> Problem:
    if not isinstance(data, dict):
        raise ValidationError("problem must be a JSON object")
    unknown = set(data) - set(FORMS) - {"config"}
    if unknown:
        raise ValidationError(f"unknown top-level keys: {sorted(unknown)}")
    forms = [k for k in FORMS if k in data]
    if len(forms) != 1:
        raise ValidationError(f"expected exactly one of {FORMS}, got {forms}")
    form = forms[0]
    body = data[form]
    system = None
    if form == "oscillators":
        if not isinstance(body, list) or not body:
            raise ValidationError("'oscillators' must be a non-empty list")
        terms = []
        for i, item in enumerate(body):
            _require_keys(item, {"re", "im", "freq"}, f"oscillators[{i}]")
            terms.append((complex(_num(item["re"]), _num(item["im"])), _num(item["freq"])))
        osc = OscillatorSum.from_terms(terms)
    elif form == "system":
        _require_keys(body, {"A", "b", "p"}, "system")
        system = LinearSystem(body["A"], body["b"], body["p"])
        osc = extract_oscillator_sum(system)
    else:
        _require_keys(body, {"freqs", "b", "p"}, "blocks")
        system = LinearSystem.from_blocks(body["freqs"], body["b"], body["p"])
        osc = blocks_oscillator_sum(body["freqs"], body["b"], body["p"])
    configs = _parse_config(data.get("config", {}))
    return Problem(form, osc, system, **configs)


def _parse_config(cfg: Any) -> dict:
    if not isinstance(cfg, dict):
        raise ValidationError("'config' must be an object")
    unknown = set(cfg) - set(_CONFIG_KEYS)
    if unknown:
        raise ValidationError(f"unknown config sections: {sorted(unknown)}")
    out = {}
    classes = {
        "quadrature": QuadratureConfig,
        "zero": ZeroConfig,
        "unwrap": UnwrapConfig,
        "mc": MonteCarloConfig,
    }
    for section, values in cfg.items():
        if not isinstance(values, dict):
            raise ValidationError(f"config.{section} must be an object")
        bad = set(values) - _CONFIG_KEYS[section]
        if bad:
            raise ValidationError(f"unknown keys in config.{section}: {sorted(bad)}")
        try:
            out[section] = classes[section](**values)
        except TypeError as exc:
            raise ValidationError(f"config.{section}: {exc}") from exc
    return out


def _require_keys(obj: Any, keys: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise ValidationError(f"{where} must be an object")
    missing = keys - set(obj)
    extra = set(obj) - keys
    if missing:
        raise ValidationError(f"{where} is missing keys {sorted(missing)}")
    if extra:
        raise ValidationError(f"{where} has unknown keys {sorted(extra)}")


def _num(v: Any) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"expected a number, got {v!r}")
    return float(v)
