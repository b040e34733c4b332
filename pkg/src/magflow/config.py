"""JSON run configuration, validated with pydantic."""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .crit import DEFAULT_R_GRID, Budget
from .field import ConformalMetric, MagneticField
from .flow import PhaseState
from .hyp import HalfPlanePoint
from .surface import Bump, InvariantOneForm, InvariantScalar, default_group


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class BumpSpec(_Strict):
    center: tuple[float, float] = (0.0, 1.0)
    amplitude: float
    support_radius: float = Field(gt=0)

    @field_validator("center")
    @classmethod
    def _upper_half_plane(cls, v):
        if not v[1] > 0:
            raise ValueError("center must have y > 0")
        return v

    @model_validator(mode="after")
    def _below_injectivity(self):
        inj = default_group().injectivity_radius(HalfPlanePoint(*self.center))
        if not self.support_radius < inj:
            raise ValueError(f"support_radius {self.support_radius} must be below the injectivity radius {inj:.6f}")
        return self

    def build(self) -> Bump:
        return Bump(HalfPlanePoint(*self.center), self.amplitude, self.support_radius)


class MetricSpec(_Strict):
    constant: float = 0.0
    bumps: list[BumpSpec] = []

    def build(self) -> ConformalMetric:
        return ConformalMetric(InvariantScalar(default_group(), self.constant, [b.build() for b in self.bumps]))


class MagneticSpec(_Strict):
    a: float = 1.0
    beta0: list[BumpSpec] = []

    def build(self) -> MagneticField:
        return MagneticField(self.a, InvariantOneForm(default_group(), [b.build() for b in self.beta0]))


class FlowSpec(_Strict):
    s: float = Field(1.0, gt=0)
    T: float = Field(10.0, gt=0)
    dt: float = Field(0.01, gt=0)
    initial: tuple[float, float, float] = (0.0, 1.0, 0.0)

    @field_validator("initial")
    @classmethod
    def _state(cls, v):
        if not v[1] > 0:
            raise ValueError("initial y must be positive")
        return v

    def state(self) -> PhaseState:
        return PhaseState(*self.initial)


class CritSpec(_Strict):
    r_grid: list[float] = list(DEFAULT_R_GRID)
    center_grid: Optional[list[tuple[float, float]]] = None
    amplitudes: list[float] = [-0.2, -0.1, 0.0, 0.1, 0.2]
    samples: int = Field(4096, gt=0)

    @field_validator("r_grid")
    @classmethod
    def _radii(cls, v):
        if not v or any(not r > 0 for r in v):
            raise ValueError("r_grid must be a nonempty list of positive radii")
        return v

    def centers(self):
        return None if self.center_grid is None else [HalfPlanePoint(*c) for c in self.center_grid]


class RadonSpec(_Strict):
    r_grid: list[float] = [0.5, 1.0, 2.0, 4.0]
    s_list: list[float] = [0.0, 1.0, 2.5]
    alpha_list: list[float] = [0.0, 0.25, 0.5]
    centers: list[tuple[float, float]] = [(0.0, 1.0), (2.0, 0.5)]
    n_max: int = Field(3, gt=0)
    h: list[BumpSpec] = []

    @field_validator("alpha_list")
    @classmethod
    def _alpha(cls, v):
        if any(not 0.0 <= a <= 0.5 for a in v):
            raise ValueError("alpha values must lie in [0, 1/2]")
        return v

    @field_validator("r_grid")
    @classmethod
    def _radii(cls, v):
        if any(not r > 0 for r in v):
            raise ValueError("radii must be positive")
        return v

    def h_scalar(self) -> InvariantScalar:
        return InvariantScalar(default_group(), 0.0, [b.build() for b in self.h]).centered()


class Tolerances(_Strict):
    quadrature: float = Field(1e-9, gt=0)
    cross_check: float = Field(1e-6, gt=0)
    geometry: float = Field(1e-8, gt=0)
    theorem: float = Field(1e-3, gt=0)
    integrator: float = Field(1e-6, gt=0)


class Config(_Strict):
    metric: MetricSpec = MetricSpec()
    magnetic: MagneticSpec = MagneticSpec()
    flow: FlowSpec = FlowSpec()
    crit: CritSpec = CritSpec()
    radon: RadonSpec = RadonSpec()
    tolerances: Tolerances = Tolerances()

    def budget(self) -> Budget:
        return Budget(
            r_max=max(self.crit.r_grid),
            samples=self.crit.samples,
            amplitudes=tuple(self.crit.amplitudes),
            tolerance=self.tolerances.cross_check,
        )


def _path(loc) -> str:
    out = ""
    for part in loc:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


def parse_config(data: dict) -> Config:
    try:
        return Config.model_validate(data)
    except ValidationError as exc:
        lines = [f"{_path(e['loc'])}: {e['msg']}" for e in exc.errors()]
        raise ConfigError("invalid config:\n  " + "\n  ".join(lines)) from None


def load_config(path: str | Path | None) -> Config:
    if path is None:
        return Config()
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return parse_config(data)


def to_jsonable(obj):
    """Recursively turn a report into JSON-safe data; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, HalfPlanePoint):
        return [obj.x, obj.y]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


def dumps(report) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True) + "\n"
