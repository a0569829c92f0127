"""Run configuration for the command-line tool.

A run is described by one JSON document whose keys carry their units
(``delta_min_in_gamma0``, ``phi_in_rad``, ...).  The document is echoed into
every output file as a ``# config=<json>`` line, so any output can be turned
back into the configuration that produced it.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, ParameterError
from .model import SystemParams
from .plasmon_env import (PlasmonEnvironment, environment_at, free_space, from_rates,
                          read_rate_table, synthetic_fixture)

SCENARIOS = ("spectrum", "phase_sweep", "distance_sweep", "map", "oracle_check", "threshold")
ENV_SOURCES = ("free_space", "fixture", "table", "rates", "explicit")
ORACLE_ENVS = ("random", "free_space", "fixture")

DEFAULTS = {
    "scenario": "spectrum",
    "system": {"omega32_in_gamma0": 0.0, "gamma_prime_in_gamma0": 0.3, "gamma_dprime_in_gamma0": 0.0},
    "environment": {"source": "free_space"},
    "drive": {"x": 1.5, "phi_in_rad": 0.0, "delta_in_gamma0": 0.0},
    "sweep": {
        "delta_min_in_gamma0": -6.0, "delta_max_in_gamma0": 6.0, "delta_step_in_gamma0": 0.05,
        "phi_min_in_rad": 0.0, "phi_max_in_rad": 2 * math.pi, "phi_points": 181,
        "d_min_in_c_over_omega_p": None, "d_max_in_c_over_omega_p": None,
        "d_step_in_c_over_omega_p": 0.01,
    },
    "vortex": {"l": 1, "X": 1.5, "w": 1.0, "half_extent_in_w": 2.0, "n": 201, "quantity": "im_chi1"},
    "oracle": {"draws": 20, "seed": 0, "environment": "random", "orders": [1, 3],
               "gamma_dprime_range_in_gamma0": [0.1, 0.5]},
    "output": {"path": None, "svg": False},
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if k not in out:
            raise ParameterError(f"unknown configuration key {k!r}")
        if isinstance(out[k], dict):
            if not isinstance(v, dict):
                raise ParameterError(f"configuration key {k!r} must be an object")
            if k == "environment":
                out[k] = copy.deepcopy(v)
            else:
                out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _num(section: dict, key: str, name: str):
    v = section.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ParameterError(f"{name}.{key} must be a finite number, got {v!r}")
    return float(v)


@dataclass
class RunConfig:
    scenario: str = "spectrum"
    system: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["system"]))
    environment: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["environment"]))
    drive: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["drive"]))
    sweep: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["sweep"]))
    vortex: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["vortex"]))
    oracle: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["oracle"]))
    output: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["output"]))

    def __post_init__(self):
        self.scenario = self.scenario.replace("-", "_")
        if self.scenario not in SCENARIOS:
            raise ParameterError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        src = self.environment.get("source")
        if src not in ENV_SOURCES:
            raise ParameterError(f"environment.source must be one of {ENV_SOURCES}, got {src!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ParameterError("configuration must be a JSON object")
        return cls(**_merge(DEFAULTS, data))

    def merged(self, override: dict) -> "RunConfig":
        """New config with ``override`` applied; ``environment`` is replaced whole."""
        if not isinstance(override, dict):
            raise ParameterError("configuration override must be a JSON object")
        return RunConfig(**_merge(self.to_dict(), override))

    def to_dict(self) -> dict:
        return {k: copy.deepcopy(getattr(self, k)) for k in DEFAULTS}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    # Resolved physics objects

    def system_params(self) -> SystemParams:
        s = self.system
        return SystemParams(omega32=_num(s, "omega32_in_gamma0", "system"),
                            gamma_prime=_num(s, "gamma_prime_in_gamma0", "system"),
                            gamma_dprime=_num(s, "gamma_dprime_in_gamma0", "system"))

    def uses_table(self) -> bool:
        return self.environment["source"] in ("fixture", "table")

    def rate_table(self):
        env = self.environment
        if env["source"] == "fixture":
            return synthetic_fixture()
        if env["source"] == "table":
            if not env.get("path"):
                raise ParameterError("environment.path is required for a rate table")
            return read_rate_table(env["path"])
        raise ParameterError(f"environment source {env['source']!r} has no rate table")

    def environment_params(self) -> PlasmonEnvironment:
        env = self.environment
        src = env["source"]
        if src == "free_space":
            return free_space()
        if src == "rates":
            return from_rates(_num(env, "gamma_perp_in_gamma0", "environment"),
                              _num(env, "gamma_par_in_gamma0", "environment"))
        if src == "explicit":
            return PlasmonEnvironment.explicit(_num(env, "gamma_in_gamma0", "environment"),
                                               _num(env, "kappa_in_gamma0", "environment"))
        if env.get("distance_in_c_over_omega_p") is None:
            raise ParameterError("a rate-table environment needs distance_in_c_over_omega_p")
        return environment_at(self.rate_table(), _num(env, "distance_in_c_over_omega_p", "environment"))

    def drive_point(self):
        d = self.drive
        return (_num(d, "x", "drive"), _num(d, "phi_in_rad", "drive"), _num(d, "delta_in_gamma0", "drive"))

    def delta_grid(self) -> np.ndarray:
        s = self.sweep
        lo, hi = _num(s, "delta_min_in_gamma0", "sweep"), _num(s, "delta_max_in_gamma0", "sweep")
        step = _num(s, "delta_step_in_gamma0", "sweep")
        return _stepped(lo, hi, step, "delta")

    def phi_grid(self) -> np.ndarray:
        s = self.sweep
        lo, hi = _num(s, "phi_min_in_rad", "sweep"), _num(s, "phi_max_in_rad", "sweep")
        n = s.get("phi_points")
        if not isinstance(n, int) or isinstance(n, bool) or n < 2 or hi <= lo:
            raise DomainError("phase sweep needs phi_max > phi_min and phi_points >= 2")
        return np.linspace(lo, hi, n)

    def distance_grid(self, table) -> np.ndarray:
        s = self.sweep
        lo, hi = table.d_range
        if s.get("d_min_in_c_over_omega_p") is not None:
            lo = _num(s, "d_min_in_c_over_omega_p", "sweep")
        if s.get("d_max_in_c_over_omega_p") is not None:
            hi = _num(s, "d_max_in_c_over_omega_p", "sweep")
        grid = _stepped(lo, hi, _num(s, "d_step_in_c_over_omega_p", "sweep"), "distance")
        t_lo, t_hi = table.d_range
        if grid[0] < t_lo or grid[-1] > t_hi:
            raise DomainError(f"distance sweep [{grid[0]}, {grid[-1]}] leaves table range [{t_lo}, {t_hi}]")
        return grid


def _stepped(lo, hi, step, name):
    if step <= 0 or hi < lo:
        raise DomainError(f"{name} sweep needs max >= min and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config {path}: invalid JSON ({exc})") from None
    return RunConfig.from_dict(data)


def metadata_lines(config: RunConfig, extra: dict | None = None) -> list[str]:
    """``# key=value`` header lines; the ``config`` line reproduces the run."""
    lines = [f"# scenario={config.scenario}"]
    for k, v in (extra or {}).items():
        lines.append(f"# {k}={v}")
    lines.append(f"# config={config.to_json()}")
    return lines


def parse_metadata(text: str) -> dict:
    meta = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            continue
        key, sep, value = line[1:].strip().partition("=")
        if sep:
            meta[key.strip()] = value
    return meta


def config_from_output(path) -> RunConfig:
    meta = parse_metadata(Path(path).read_text(encoding="utf-8"))
    if "config" not in meta:
        raise ParameterError(f"{path} has no '# config=' metadata line")
    return RunConfig.from_dict(json.loads(meta["config"]))
