"""Flat ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored.  Angles accept plain floats or
``pi`` expressions such as ``pi/4`` and ``3*pi/8``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

from .core import PhysicalParams
from .dynamics import ConvergenceSettings, SimulationConfig

__all__ = ["ConfigError", "RunConfig", "parse_angle", "parse_config", "load_config"]


class ConfigError(ValueError):
    def __init__(self, message: str, source: str = "<config>", line: int | None = None):
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")
        self.line = line


_PI_EXPR = re.compile(r"^\s*(?:([-+]?\d*\.?\d+(?:[eE][-+]?\d+)?)\s*\*\s*)?(-)?pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_angle(text: str) -> float:
    """Parse ``0.5``, ``pi``, ``pi/12`` or ``2*pi/3``."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_EXPR.match(text.lower())
    if not m:
        raise ValueError(f"cannot parse angle {text!r}")
    coeff = float(m.group(1)) if m.group(1) else 1.0
    if m.group(2):
        coeff = -coeff
    denom = float(m.group(3)) if m.group(3) else 1.0
    return coeff * math.pi / denom


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected on/off, got {text!r}")


def _parse_int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


_PARSERS = {
    "omega": float,
    "eta_omega_tilde": float,
    "lambda_c": float,
    "delta": float,
    "beta": parse_angle,
    "n_cut": _parse_int,
    "t_max": float,
    "n_samples": _parse_int,
    "convergence": _parse_bool,
    "convergence_factor": _parse_int,
    "convergence_tol": float,
    "tail_tol": float,
}
REQUIRED = ("omega", "beta")
DEFAULTS = {
    "delta": 1.0,
    "n_cut": 128,
    "t_max": 20.0,
    "n_samples": 2000,
    "convergence": False,
    "convergence_factor": 2,
    "tail_tol": 1e-10,
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration plus the normalized key/value snapshot written to manifests."""

    simulation: SimulationConfig
    values: dict
    source: str = "<config>"

    @property
    def params(self) -> PhysicalParams:
        return self.simulation.params

    def with_beta(self, beta: float) -> "RunConfig":
        values = dict(self.values, beta=beta)
        return RunConfig(_build(values, self.source, None), values, self.source)


def _build(values: dict, source: str, last_line) -> SimulationConfig:
    try:
        if "lambda_c" in values:
            params = PhysicalParams.from_lambda_c(values["lambda_c"], values["omega"], values["delta"])
        else:
            params = PhysicalParams(values["omega"], values["eta_omega_tilde"], values["delta"])
        conv = ConvergenceSettings(
            enabled=values["convergence"],
            n_cut_factor=values["convergence_factor"],
            tolerance=values.get("convergence_tol"),
        )
        return SimulationConfig(
            params=params,
            beta=values["beta"],
            n_cut=values["n_cut"],
            t_max=values["t_max"],
            n_samples=values["n_samples"],
            convergence=conv,
            tail_tol=values["tail_tol"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc), source, last_line) from exc


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    values: dict = {}
    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", source, lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", source, lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", source, lineno)
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", source, lineno) from exc

    end = len(lines) + 1
    for key in REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}", source, end)
    if ("lambda_c" in values) == ("eta_omega_tilde" in values):
        raise ConfigError("exactly one of 'eta_omega_tilde' and 'lambda_c' must be given", source, end)
    for key, default in DEFAULTS.items():
        values.setdefault(key, default)
    return RunConfig(_build(values, source, end), values, source)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from exc
    return parse_config(text, str(path))
