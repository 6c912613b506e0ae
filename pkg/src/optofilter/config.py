"""Flat ``key = value`` run configuration.

Frequencies are read as ordinary frequencies in Hz (f = omega / 2 pi)
unless ``units = rad_s``.  ``theta`` is always in radians and may be the
word ``opt`` to use the angle that minimizes omega_theta / omega_m.
"""

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError
from .params import FREQUENCY_FIELDS, TWO_PI, SystemParams

PARAM_KEYS = (
    "m", "ell", "Omega_bare", "kappa", "omega_c", "Gamma_bare", "gamma_m", "P_in", "T", "theta",
)
DETUNING_KEYS = ("Delta", "Delta_over_kappa")

# axes that are not SystemParams fields but are solved for
DERIVED_AXES = ("Delta_over_kappa", "xi", "thermal_noise")
AXIS_NAMES = tuple(k for k in PARAM_KEYS if k != "theta") + ("Delta", "theta") + DERIVED_AXES

SPECTRUM_QUANTITIES = ("Sqq", "Spp", "Sqq_cond", "Spp_cond", "ReSqp_cond")
POINT_QUANTITIES = (
    "Vqq", "Vqp", "Vpp", "purity", "omega_theta", "gamma_theta", "omega_ratio", "theta_opt",
    "EN", "nu_minus", "condition_factor",
)
QUANTITIES = SPECTRUM_QUANTITIES + POINT_QUANTITIES

_AXIS_FIELDS = ("", "_min", "_max", "_count", "_scale")
OPTIONAL_KEYS = (
    "units", "delta", "tol", "outputs", "out", "format", "overlay", "frame",
    "omega_min", "omega_max", "omega_count", "omega_linear",
) + tuple(f"axis{i}{suffix}" for i in (1, 2) for suffix in _AXIS_FIELDS)

DEFAULT_TOL = 1e-8
MAX_TOL = 1e-2


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int
    scale: str = "lin"

    def values(self):
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    theta_opt: bool = False
    units: str = "hz"
    axes: tuple = ()
    outputs: tuple = ()
    delta: Optional[float] = None
    tol: float = DEFAULT_TOL
    out: Optional[str] = None
    format: str = "csv"
    overlay: bool = False
    frame: str = "mirror"
    omega_min: Optional[float] = None  # rad/s
    omega_max: Optional[float] = None
    omega_count: int = 200
    omega_linear: int = 0

    @property
    def freq_factor(self):
        return TWO_PI if self.units == "hz" else 1.0

    def axis_to_si(self, name, value):
        """Convert an axis value as written in the config to the SI value used internally."""
        if name in FREQUENCY_FIELDS:
            return value * self.freq_factor
        return value


def _tokenize(text):
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=lineno)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r}", line=lineno)
        entries[key] = (value, lineno)
    return entries


def _number(entries, key):
    value, lineno = entries[key]
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}", line=lineno) from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: value must be finite", line=lineno)
    return x


def _integer(entries, key):
    value, lineno = entries[key]
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}", line=lineno) from None


def _choice(entries, key, options, default):
    if key not in entries:
        return default
    value, lineno = entries[key]
    if value not in options:
        raise ConfigError(f"{key}: expected one of {', '.join(options)}, got {value!r}", line=lineno)
    return value


def _parse_axis(entries, i):
    prefix = f"axis{i}"
    present = [prefix + s for s in _AXIS_FIELDS if prefix + s in entries]
    if not present:
        return None
    missing = [prefix + s for s in _AXIS_FIELDS[:4] if prefix + s not in entries]
    if missing:
        raise ConfigError(f"incomplete sweep axis: missing {', '.join(missing)}", line=entries[present[0]][1])
    name, lineno = entries[prefix]
    if name not in AXIS_NAMES:
        raise ConfigError(f"{prefix}: unknown sweep parameter {name!r}", line=lineno)
    lo, hi = _number(entries, prefix + "_min"), _number(entries, prefix + "_max")
    count = _integer(entries, prefix + "_count")
    if count < 2:
        raise ConfigError(f"{prefix}_count must be >= 2, got {count}", line=entries[prefix + "_count"][1])
    if not lo < hi:
        raise ConfigError(f"{prefix}: need min < max", line=entries[prefix + "_min"][1])
    scale = _choice(entries, prefix + "_scale", ("lin", "log"), "lin")
    if scale == "log" and lo <= 0:
        raise ConfigError(f"{prefix}: log axis needs min > 0", line=entries[prefix + "_min"][1])
    return Axis(name, lo, hi, count, scale)


def parse_config(text):
    entries = _tokenize(text)
    known = set(PARAM_KEYS) | set(DETUNING_KEYS) | set(OPTIONAL_KEYS)
    for key, (_, lineno) in entries.items():
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", line=lineno)

    missing = [k for k in PARAM_KEYS if k not in entries]
    if not any(k in entries for k in DETUNING_KEYS):
        missing.append("Delta")
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}", missing=missing)
    if all(k in entries for k in DETUNING_KEYS):
        raise ConfigError("give only one of Delta, Delta_over_kappa", line=entries["Delta_over_kappa"][1])

    units = _choice(entries, "units", ("hz", "rad_s"), "hz")
    factor = TWO_PI if units == "hz" else 1.0

    values = {}
    for key in PARAM_KEYS:
        if key == "theta":
            continue
        x = _number(entries, key)
        values[key] = x * factor if key in FREQUENCY_FIELDS else x
    if "Delta" in entries:
        values["Delta"] = _number(entries, "Delta") * factor
    else:
        values["Delta"] = _number(entries, "Delta_over_kappa") * values["kappa"]

    theta_opt = entries["theta"][0] == "opt"
    values["theta"] = 0.0 if theta_opt else _number(entries, "theta")
    try:
        params = SystemParams(**values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    axes = tuple(a for a in (_parse_axis(entries, i) for i in (1, 2)) if a is not None)
    if len(axes) == 2 and axes[0].name == axes[1].name:
        raise ConfigError("sweep axes must be distinct", line=entries["axis2"][1])

    outputs = ()
    if "outputs" in entries:
        raw, lineno = entries["outputs"]
        outputs = tuple(s.strip() for s in raw.split(",") if s.strip())
        for q in outputs:
            if q not in QUANTITIES:
                raise ConfigError(f"unknown output quantity {q!r}", line=lineno)

    delta = None
    if "delta" in entries:
        delta = _number(entries, "delta")
        if not 0 <= delta < 1:
            raise ConfigError("delta must lie in [0, 1)", line=entries["delta"][1])

    tol = DEFAULT_TOL
    if "tol" in entries:
        tol = _number(entries, "tol")
        if not 0 < tol <= MAX_TOL:
            raise ConfigError(f"tol must lie in (0, {MAX_TOL:g}]", line=entries["tol"][1])

    grid = {}
    for key in ("omega_min", "omega_max"):
        if key in entries:
            x = _number(entries, key)
            if x <= 0:
                raise ConfigError(f"{key} must be > 0", line=entries[key][1])
            grid[key] = x * factor
    for key in ("omega_count", "omega_linear"):
        if key in entries:
            n = _integer(entries, key)
            if n < (2 if key == "omega_count" else 0):
                raise ConfigError(f"{key} out of range", line=entries[key][1])
            grid[key] = n
    if "omega_min" in grid and "omega_max" in grid and not grid["omega_min"] < grid["omega_max"]:
        raise ConfigError("need omega_min < omega_max", line=entries["omega_min"][1])

    overlay = _choice(entries, "overlay", ("true", "false"), "false") == "true"
    return RunConfig(
        params=params,
        theta_opt=theta_opt,
        units=units,
        axes=axes,
        outputs=outputs,
        delta=delta,
        tol=tol,
        out=entries["out"][0] if "out" in entries else None,
        format=_choice(entries, "format", ("csv", "json"), "csv"),
        overlay=overlay,
        frame=_choice(entries, "frame", ("mirror", "mode"), "mirror"),
        **grid,
    )


RECIPES = ("fig1", "fig2", "fig3", "fig4")


def recipe_text(name):
    if name not in RECIPES:
        raise ConfigError(f"unknown recipe {name!r}; available: {', '.join(RECIPES)}")
    return resources.files("optofilter").joinpath("recipes", f"{name}.cfg").read_text()


def load_config(path):
    """Read a config from a file, or a bundled recipe given as ``recipe:<name>``."""
    path = str(path)
    if path.startswith("recipe:"):
        return parse_config(recipe_text(path.split(":", 1)[1]))
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
