"""Flat key-value run configuration (JSON or TOML) and chain construction from it."""

from __future__ import annotations

import json
from pathlib import Path

from .chain import IonChain, default_edge, optimize_b, quartic_chain, solve_equilibrium
from .errors import ConfigError
from .units import PARAM_KEYS, AxialPotential, PhysicalParams

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

POTENTIAL_KEYS = frozenset({"alpha2", "alpha4", "b", "mean_spacing_m", "b_min", "b_max"})
RUN_KEYS = frozenset({"n_ions", "n_edge", "beta_convention"})
ALL_KEYS = PARAM_KEYS | POTENTIAL_KEYS | RUN_KEYS


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(text.decode())
        else:
            data = json.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(data, dict) or any(isinstance(v, (dict, list)) for v in data.values()):
        raise ConfigError("config must be a flat key-value document")
    return data


def parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        try:
            out[key.strip()] = json.loads(raw)
        except ValueError:
            out[key.strip()] = raw
    return out


def split_config(config: dict):
    """Separate a flat config into (physical, potential, run) parts, rejecting unknown keys."""
    unknown = set(config) - ALL_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    params = {k: v for k, v in config.items() if k in PARAM_KEYS}
    potential = {k: v for k, v in config.items() if k in POTENTIAL_KEYS}
    run = {k: v for k, v in config.items() if k in RUN_KEYS}
    return params, potential, run


def _number(cfg, key, default=None):
    if key not in cfg:
        return default
    try:
        return float(cfg[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number") from None


def run_sizes(run: dict) -> tuple[int, int]:
    try:
        n_ions = int(run.get("n_ions", 120))
        n_edge = int(run.get("n_edge", default_edge(n_ions)))
    except (TypeError, ValueError):
        raise ConfigError("n_ions and n_edge must be integers") from None
    return n_ions, n_edge


def build_chain(params: PhysicalParams, potential: dict, n_ions: int, n_edge: int, threads: int = 1):
    """Chain from either explicit ``alpha2``/``alpha4`` or ``b`` + ``mean_spacing_m``.

    With neither, B is optimised over ``[b_min, b_max]`` first.  Returns
    ``(chain, b_curve)``; the curve is empty unless B was optimised.
    """
    explicit = {"alpha2", "alpha4"} & set(potential)
    by_b = {"b", "mean_spacing_m"} & set(potential)
    if explicit and by_b:
        raise ConfigError("give either alpha2/alpha4 or b/mean_spacing_m, not both")
    if explicit:
        if "alpha2" not in potential:
            raise ConfigError("alpha2 is required with alpha4")
        pot = AxialPotential(_number(potential, "alpha2"), _number(potential, "alpha4", 0.0))
        return solve_equilibrium(pot, params, n_ions, n_edge=n_edge), []
    spacing = _number(potential, "mean_spacing_m", 10e-6)
    if not spacing > 0:
        raise ConfigError("mean_spacing_m must be positive")
    curve = []
    b = _number(potential, "b")
    if b is None:
        b_range = (_number(potential, "b_min", -12.0), _number(potential, "b_max", -1.0))
        b, curve = optimize_b(params, n_ions, n_edge, b_range, spacing, threads=threads)
    chain: IonChain = quartic_chain(b, spacing, params, n_ions, n_edge)
    return chain, curve
