"""Config file schema, validation, and de/serialization.

Configs are single JSON documents made of named blocks.  All frequencies are
entered as ordinary frequencies in Hz (keys carry a ``_hz`` suffix) and are
converted to angular units exactly once, here; lengths are meters, times are
seconds.  Unknown keys are rejected with their dotted path, and a parsed
config serializes back to an identical document (round-trip safe).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .dynamics import GridSpec
from .errors import ConfigError
from .medium import DrivePoint, DriveSchedule, MediumParams, Ramp
from .protocol import Scenario

__all__ = [
    "RampSpec",
    "MediumBlock",
    "DriveBlock",
    "ScanBlock",
    "GridBlock",
    "PulseBlock",
    "EvolveBlock",
    "ScenarioBlock",
    "ValidityBlock",
    "OutputBlock",
    "Config",
    "parse_config",
    "dump_config",
    "load_config",
    "save_config",
    "REQUIRED_BLOCKS",
]

TWO_PI = 2.0 * math.pi

#: blocks each subcommand must provide
REQUIRED_BLOCKS = {
    "band": ("medium", "drive", "scan", "output"),
    "reflect": ("medium", "drive", "scan", "output"),
    "evolve": ("medium", "drive", "grid", "pulse", "evolve", "output"),
    "protocol": ("medium", "drive", "grid", "scenario", "output"),
    "check": ("medium", "drive", "grid", "scenario"),
}


def _expect_mapping(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(where, "expected an object")
    return value


def _reject_unknown(data: dict, allowed: set[str], prefix: str) -> None:
    for key in data:
        if key not in allowed:
            raise ConfigError(f"{prefix}.{key}" if prefix else key, "unknown key")


def _number(data: dict, key: str, prefix: str, required: bool = True, default=None):
    if key not in data:
        if required:
            raise ConfigError(f"{prefix}.{key}", "missing required key")
        return default
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{prefix}.{key}", "expected a number")
    return float(v)


def _integer(data: dict, key: str, prefix: str, required: bool = True, default=None):
    if key not in data:
        if required:
            raise ConfigError(f"{prefix}.{key}", "missing required key")
        return default
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{prefix}.{key}", "expected an integer")
    return int(v)


def _boolean(data: dict, key: str, prefix: str, default: bool) -> bool:
    if key not in data:
        return default
    v = data[key]
    if not isinstance(v, bool):
        raise ConfigError(f"{prefix}.{key}", "expected true or false")
    return v


def _string(data: dict, key: str, prefix: str, required: bool = True, default=None):
    if key not in data:
        if required:
            raise ConfigError(f"{prefix}.{key}", "missing required key")
        return default
    v = data[key]
    if not isinstance(v, str):
        raise ConfigError(f"{prefix}.{key}", "expected a string")
    return v


@dataclass(frozen=True)
class RampSpec:
    """Piecewise drive given as (time_s, value_hz) knots."""

    points: tuple[tuple[float, float], ...]
    shape: str = "smoothstep"

    @classmethod
    def parse(cls, data, prefix: str) -> "RampSpec":
        data = _expect_mapping(data, prefix)
        _reject_unknown(data, {"points", "shape"}, prefix)
        raw = data.get("points")
        if not isinstance(raw, list) or len(raw) < 2:
            raise ConfigError(f"{prefix}.points", "expected a list of at least two [t_s, v_hz] pairs")
        pts = []
        for i, pair in enumerate(raw):
            if (not isinstance(pair, list)) or len(pair) != 2 or any(
                isinstance(x, bool) or not isinstance(x, (int, float)) for x in pair
            ):
                raise ConfigError(f"{prefix}.points[{i}]", "expected [t_s, v_hz]")
            pts.append((float(pair[0]), float(pair[1])))
        shape = data.get("shape", "smoothstep")
        if shape not in ("hold", "linear", "smoothstep"):
            raise ConfigError(f"{prefix}.shape", "expected hold, linear, or smoothstep")
        return cls(tuple(pts), shape)

    def dump(self) -> dict:
        return {"points": [[t, v] for t, v in self.points], "shape": self.shape}

    def ramp(self) -> Ramp:
        return Ramp.from_points([(t, TWO_PI * v) for t, v in self.points], self.shape)


@dataclass(frozen=True)
class MediumBlock:
    coupling_hz: float
    gamma_ab_hz: float
    gamma_bc_hz: float
    length_m: float
    carrier_wavelength_m: float

    KEYS = ("coupling_hz", "gamma_ab_hz", "gamma_bc_hz", "length_m", "carrier_wavelength_m")

    @classmethod
    def parse(cls, data, prefix="medium") -> "MediumBlock":
        data = _expect_mapping(data, prefix)
        _reject_unknown(data, set(cls.KEYS), prefix)
        return cls(*(_number(data, k, prefix) for k in cls.KEYS))

    def dump(self) -> dict:
        return {k: getattr(self, k) for k in self.KEYS}

    def params(self) -> MediumParams:
        return MediumParams.from_wavelength(
            coupling=TWO_PI * self.coupling_hz,
            gamma_ab=TWO_PI * self.gamma_ab_hz,
            gamma_bc=TWO_PI * self.gamma_bc_hz,
            length=self.length_m,
            wavelength=self.carrier_wavelength_m,
        )


@dataclass(frozen=True)
class DriveBlock:
    delta_hz: float
    delta_k_per_m: float = 0.0
    omega_c_hz: float | RampSpec | None = None
    omega_s_hz: float | RampSpec | None = None

    @classmethod
    def parse(cls, data, prefix="drive") -> "DriveBlock":
        data = _expect_mapping(data, prefix)
        _reject_unknown(data, {"delta_hz", "delta_k_per_m", "omega_c_hz", "omega_s_hz"}, prefix)
        delta = _number(data, "delta_hz", prefix)
        if delta == 0.0:
            raise ConfigError(f"{prefix}.delta_hz", "must be nonzero")
        dk = _number(data, "delta_k_per_m", prefix, required=False, default=0.0)

        def drive_field(key):
            if key not in data:
                return None
            v = data[key]
            if isinstance(v, dict):
                return RampSpec.parse(v, f"{prefix}.{key}")
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{prefix}.{key}", "expected a number or a ramp object")
            return float(v)

        return cls(delta, dk, drive_field("omega_c_hz"), drive_field("omega_s_hz"))

    def dump(self) -> dict:
        out: dict = {"delta_hz": self.delta_hz, "delta_k_per_m": self.delta_k_per_m}
        for key in ("omega_c_hz", "omega_s_hz"):
            v = getattr(self, key)
            if v is None:
                continue
            out[key] = v.dump() if isinstance(v, RampSpec) else v
        return out

    def _constant(self, key: str) -> float:
        v = getattr(self, key)
        if v is None:
            raise ConfigError(f"drive.{key}", "missing required key")
        if isinstance(v, RampSpec):
            raise ConfigError(f"drive.{key}", "this subcommand needs a constant drive value")
        return v

    def drive_point(self, medium: MediumParams) -> DrivePoint:
        return DrivePoint(
            omega_c=TWO_PI * self._constant("omega_c_hz"),
            omega_s=TWO_PI * self._constant("omega_s_hz"),
            delta=TWO_PI * self.delta_hz,
            k_s=medium.carrier_wavenumber + self.delta_k_per_m,
            delta_k=self.delta_k_per_m,
        )

    def schedule(self, medium: MediumParams) -> DriveSchedule:
        def as_ramp(key):
            v = getattr(self, key)
            if v is None:
                raise ConfigError(f"drive.{key}", "missing required key")
            if isinstance(v, RampSpec):
                return v.ramp()
            return Ramp.constant(TWO_PI * v)

        return DriveSchedule(
            omega_c=as_ramp("omega_c_hz"),
            omega_s=as_ramp("omega_s_hz"),
            delta=TWO_PI * self.delta_hz,
            k_s=medium.carrier_wavenumber + self.delta_k_per_m,
            delta_k=self.delta_k_per_m,
        )


@dataclass(frozen=True)
class ScanBlock:
    omega_min_hz: float
    omega_max_hz: float
    n_points: int
    slab_count: int = 64

    @classmethod
    def parse(cls, data, prefix) -> "ScanBlock":
        data = _expect_mapping(data, prefix)
        _reject_unknown(data, {"omega_min_hz", "omega_max_hz", "n_points", "slab_count"}, prefix)
        lo = _number(data, "omega_min_hz", prefix)
        hi = _number(data, "omega_max_hz", prefix)
        n = _integer(data, "n_points", prefix)
        if n < 1:
            raise ConfigError(f"{prefix}.n_points", "must be >= 1")
        if hi < lo:
            raise ConfigError(f"{prefix}.omega_max_hz", "must be >= omega_min_hz")
        return cls(lo, hi, n, _integer(data, "slab_count", prefix, required=False, default=64))

    def dump(self) -> dict:
        return {
            "omega_min_hz": self.omega_min_hz,
            "omega_max_hz": self.omega_max_hz,
            "n_points": self.n_points,
            "slab_count": self.slab_count,
        }

    def grid_rad(self):
        import numpy as np

        return TWO_PI * np.linspace(self.omega_min_hz, self.omega_max_hz, self.n_points)


@dataclass(frozen=True)
class GridBlock:
    z_min_m: float
    z_max_m: float
    n_points: int

    @classmethod
    def parse(cls, data, prefix="grid") -> "GridBlock":
        data = _expect_mapping(data, prefix)
        _reject_unknown(data, {"z_min_m", "z_max_m", "n_points"}, prefix)
        return cls(
            _number(data, "z_min_m", prefix),
            _number(data, "z_max_m", prefix),
            _integer(data, "n_points", prefix),
        )

    def dump(self) -> dict:
        return {"z_min_m": self.z_min_m, "z_max_m": self.z_max_m, "n_points": self.n_points}

    def spec(self) -> GridSpec:
        return GridSpec(self.z_min_m, self.z_max_m, self.n_points)


@dataclass(frozen=True)
class PulseBlock:
    center_m: float
    rms_width_m: float

    @classmethod
    def parse(cls, data, prefix="pulse") -> "PulseBlock":
        data = _expect_mapping(data, prefix)
        _reject_unknown(data, {"center_m", "rms_width_m"}, prefix)
        return cls(_number(data, "center_m", prefix), _number(data, "rms_width_m", prefix))

    def dump(self) -> dict:
        return {"center_m": self.center_m, "rms_width_m": self.rms_width_m}


@dataclass(frozen=True)
class EvolveBlock:
    t0_s: float
    t1_s: float
    dt_s: float

    @classmethod
    def parse(cls, data, prefix="evolve") -> "EvolveBlock":
        data = _expect_mapping(data, prefix)
        _reject_unknown(data, {"t0_s", "t1_s", "dt_s"}, prefix)
        t0 = _number(data, "t0_s", prefix)
        t1 = _number(data, "t1_s", prefix)
        dt = _number(data, "dt_s", prefix)
        if not t1 > t0:
            raise ConfigError(f"{prefix}.t1_s", "must exceed t0_s")
        if dt <= 0:
            raise ConfigError(f"{prefix}.dt_s", "must be > 0")
        return cls(t0, t1, dt)

    def dump(self) -> dict:
        return {"t0_s": self.t0_s, "t1_s": self.t1_s, "dt_s": self.dt_s}


@dataclass(frozen=True)
class ScenarioBlock:
    pulse_center_m: float
    pulse_rms_m: float
    pulse_duration_s: float
    t_store_s: float
    t_hold_s: float
    t_release_s: float
    t_trap_end_s: float
    t_final_s: float
    omega_c_in_hz: float
    omega_c_0_hz: float
    omega_s_hz: float
    dt_slow_s: float | None = None
    dt_fast_s: float | None = None

    REQUIRED = (
        "pulse_center_m",
        "pulse_rms_m",
        "pulse_duration_s",
        "t_store_s",
        "t_hold_s",
        "t_release_s",
        "t_trap_end_s",
        "t_final_s",
        "omega_c_in_hz",
        "omega_c_0_hz",
        "omega_s_hz",
    )

    @classmethod
    def parse(cls, data, prefix="scenario") -> "ScenarioBlock":
        data = _expect_mapping(data, prefix)
        _reject_unknown(data, set(cls.REQUIRED) | {"dt_slow_s", "dt_fast_s"}, prefix)
        values = [_number(data, k, prefix) for k in cls.REQUIRED]
        return cls(
            *values,
            _number(data, "dt_slow_s", prefix, required=False),
            _number(data, "dt_fast_s", prefix, required=False),
        )

    def dump(self) -> dict:
        out = {k: getattr(self, k) for k in self.REQUIRED}
        if self.dt_slow_s is not None:
            out["dt_slow_s"] = self.dt_slow_s
        if self.dt_fast_s is not None:
            out["dt_fast_s"] = self.dt_fast_s
        return out


@dataclass(frozen=True)
class ValidityBlock:
    margin_large: float = 10.0
    margin_small: float = 0.1

    @classmethod
    def parse(cls, data, prefix="validity") -> "ValidityBlock":
        data = _expect_mapping(data, prefix)
        _reject_unknown(data, {"margin_large", "margin_small"}, prefix)
        return cls(
            _number(data, "margin_large", prefix, required=False, default=10.0),
            _number(data, "margin_small", prefix, required=False, default=0.1),
        )

    def dump(self) -> dict:
        return {"margin_large": self.margin_large, "margin_small": self.margin_small}


@dataclass(frozen=True)
class OutputBlock:
    directory: str
    svg: bool = False
    binary: bool = False
    snapshot_stride: int = 100

    @classmethod
    def parse(cls, data, prefix="output") -> "OutputBlock":
        data = _expect_mapping(data, prefix)
        _reject_unknown(data, {"directory", "svg", "binary", "snapshot_stride"}, prefix)
        return cls(
            _string(data, "directory", prefix),
            _boolean(data, "svg", prefix, False),
            _boolean(data, "binary", prefix, False),
            _integer(data, "snapshot_stride", prefix, required=False, default=100),
        )

    def dump(self) -> dict:
        return {
            "directory": self.directory,
            "svg": self.svg,
            "binary": self.binary,
            "snapshot_stride": self.snapshot_stride,
        }


_BLOCK_PARSERS = {
    "medium": MediumBlock.parse,
    "drive": DriveBlock.parse,
    "scan": ScanBlock.parse,
    "grid": GridBlock.parse,
    "pulse": PulseBlock.parse,
    "evolve": EvolveBlock.parse,
    "scenario": ScenarioBlock.parse,
    "validity": ValidityBlock.parse,
    "output": OutputBlock.parse,
}


@dataclass(frozen=True)
class Config:
    medium: MediumBlock | None = None
    drive: DriveBlock | None = None
    scan: ScanBlock | None = None
    grid: GridBlock | None = None
    pulse: PulseBlock | None = None
    evolve: EvolveBlock | None = None
    scenario: ScenarioBlock | None = None
    validity: ValidityBlock | None = None
    output: OutputBlock | None = None

    def require(self, subcommand: str) -> None:
        for block in REQUIRED_BLOCKS[subcommand]:
            if getattr(self, block) is None:
                raise ConfigError(block, f"block required by '{subcommand}'")

    def make_scenario(self) -> Scenario:
        if self.medium is None or self.grid is None or self.drive is None or self.scenario is None:
            raise ConfigError("scenario", "scenario needs medium, drive, grid and scenario blocks")
        s = self.scenario
        validity = self.validity or ValidityBlock()
        return Scenario(
            medium=self.medium.params(),
            grid=self.grid.spec(),
            delta=TWO_PI * self.drive.delta_hz,
            pulse_center=s.pulse_center_m,
            pulse_rms=s.pulse_rms_m,
            pulse_duration=s.pulse_duration_s,
            t_store=s.t_store_s,
            t_hold=s.t_hold_s,
            t_release=s.t_release_s,
            t_trap_end=s.t_trap_end_s,
            t_final=s.t_final_s,
            omega_c_in=TWO_PI * s.omega_c_in_hz,
            omega_c_0=TWO_PI * s.omega_c_0_hz,
            omega_s_max=TWO_PI * s.omega_s_hz,
            delta_k=self.drive.delta_k_per_m,
            margin_large=validity.margin_large,
            margin_small=validity.margin_small,
            dt_slow=s.dt_slow_s,
            dt_fast=s.dt_fast_s,
        )


def parse_config(document: dict) -> Config:
    document = _expect_mapping(document, "<root>")
    _reject_unknown(document, set(_BLOCK_PARSERS), "")
    kwargs = {}
    for name, parser in _BLOCK_PARSERS.items():
        if name in document:
            kwargs[name] = parser(document[name], name)
    return Config(**kwargs)


def dump_config(config: Config) -> dict:
    out = {}
    for f in fields(config):
        block = getattr(config, f.name)
        if block is not None:
            out[f.name] = block.dump()
    return out


def load_config(path) -> Config:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc}") from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
    return parse_config(document)


def save_config(config: Config, path) -> None:
    Path(path).write_text(json.dumps(dump_config(config), indent=2) + "\n", encoding="utf-8")
