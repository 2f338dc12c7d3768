"""Versioned JSON scenario documents and the objects they describe.

Every section is optional; omitted keys take the dataclass defaults below.
Unknown sections or keys are rejected with a :class:`ConfigError` naming the
dotted key.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

from .beamform import BeamSpec, SurfaceGeometry
from .circuit import HuygensCell, VaractorModel, calibrate
from .errors import ConfigError
from .link import LinkBudgetInputs, NoiseModel
from .orbit import HandoverPolicy, OrbitParams, PassTrajectory, linear_schedule, pass_geometry
from .pattern import BiasGrid, Codebook, HuygensPattern, extract_codebook, sweep_pattern

CONFIG_VERSION = 1


@dataclass(frozen=True)
class CalibrationSection:
    f_dl: float = 10.0
    f_ul: float = 15.0
    v_mid: float = 10.0
    fixed_caps: tuple[float, float] = (0.1, 0.1)
    losses: tuple[float, float] = (0.5, 0.5)
    l_choke: float = 0.5
    sheet_scale: float = 0.0133


@dataclass(frozen=True)
class GridSection:
    v_min: float = 0.0
    v_max: float = 20.0
    points: int = 201


@dataclass(frozen=True)
class CodebookSection:
    n_bins: int = 32
    mode: str = "transmit"
    band: str = "dl"
    min_amplitude: float = 0.0
    # joint codebook used by the joint band policy
    joint_secondary_bins: int = 32
    joint_min_amplitude: float = 0.3


@dataclass(frozen=True)
class GeometrySection:
    n: int = 64
    d: float = 10.0
    rows: int = 64
    side: float = 0.75


@dataclass(frozen=True)
class LinkSection:
    p_tx: float = 97.0
    d1: float = 1150.0
    d2: float = 5.0
    f_dl_budget: float = 10.0
    f_ul_budget: float = 14.0
    window_loss: float = -4.0
    g_rx: float = 25.0


@dataclass(frozen=True)
class NoiseSection:
    bandwidth: float = 250e6
    noise_figure: float = 7.0
    temperature: float = 290.0


@dataclass(frozen=True)
class OrbitSection:
    altitude: float = 1150.0
    earth_radius: float = 6371.0
    ground_speed: float = 7.5
    max_elevation: float = 40.0
    min_elevation: float = 25.0
    t_step: float = 1.0
    secondary_max_elevation: float = 40.0
    secondary_offset: float = 240.0
    jitter_deg: float = 0.0
    re_steer_interval: float = 10.0


@dataclass(frozen=True)
class HandoverSection:
    trigger_elevation: float = 30.0
    soft_window: float = 20.0
    mode: str = "soft"
    schedule_steps: int = 5
    switch_time: float = 0.5
    snr_floor: float = 5.0
    band_policy: str = "dl_only"


@dataclass(frozen=True)
class SteerSection:
    theta: float = 45.0
    band_policy: str = "joint"
    pattern_step: float = 0.5


@dataclass(frozen=True)
class SplitSection:
    beams: tuple[tuple[float, float], ...] = ((-45.0, 0.5), (45.0, 0.5))
    band_policy: str = "dl_only"


@dataclass(frozen=True)
class SweepSection:
    scenario: str = "steer_out"
    angle_min: float = -75.0
    angle_max: float = 75.0
    angle_step: float = 5.0
    sides: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)
    band_policy: str = "dl_only"

    def angles(self) -> list[float]:
        n = int(math.floor((self.angle_max - self.angle_min) / self.angle_step + 1e-9)) + 1
        return [round(self.angle_min + i * self.angle_step, 9) for i in range(n)]


SECTIONS: dict[str, type] = {
    "varactor": VaractorModel,
    "calibration": CalibrationSection,
    "grid": GridSection,
    "codebook": CodebookSection,
    "geometry": GeometrySection,
    "link": LinkSection,
    "noise": NoiseSection,
    "orbit": OrbitSection,
    "handover": HandoverSection,
    "steer": SteerSection,
    "split": SplitSection,
    "sweep": SweepSection,
}


@dataclass(frozen=True)
class ScenarioConfig:
    version: int = CONFIG_VERSION
    varactor: VaractorModel = field(default_factory=VaractorModel)
    calibration: CalibrationSection = field(default_factory=CalibrationSection)
    grid: GridSection = field(default_factory=GridSection)
    codebook: CodebookSection = field(default_factory=CodebookSection)
    geometry: GeometrySection = field(default_factory=GeometrySection)
    link: LinkSection = field(default_factory=LinkSection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    orbit: OrbitSection = field(default_factory=OrbitSection)
    handover: HandoverSection = field(default_factory=HandoverSection)
    steer: SteerSection = field(default_factory=SteerSection)
    split: SplitSection = field(default_factory=SplitSection)
    sweep: SweepSection = field(default_factory=SweepSection)

    # -- builders ---------------------------------------------------------

    def cell(self) -> HuygensCell:
        c = self.calibration
        return calibrate(c.f_dl, c.f_ul, c.v_mid, self.varactor, c.fixed_caps, c.losses,
                         c.l_choke, c.sheet_scale)

    def bias_grid(self) -> BiasGrid:
        g = self.grid
        return BiasGrid.uniform(max(g.v_min, self.varactor.v_min), min(g.v_max, self.varactor.v_max),
                                g.points)

    def pattern(self, cell: HuygensCell | None = None) -> HuygensPattern:
        return sweep_pattern(cell or self.cell(), self.bias_grid(), self.calibration.f_dl,
                             self.calibration.f_ul)

    def codebook_for(self, band_policy: str, pattern: HuygensPattern | None = None) -> Codebook:
        """Plain codebook for single-band policies, joint codebook for ``joint``."""
        p = pattern or self.pattern()
        cb = self.codebook
        if band_policy == "joint":
            return extract_codebook(p, cb.band, cb.mode, cb.n_bins, cb.joint_min_amplitude,
                                    cb.joint_secondary_bins)
        band = "ul" if band_policy == "ul_only" else cb.band
        return extract_codebook(p, band, cb.mode, cb.n_bins, cb.min_amplitude)

    def surface_geometry(self) -> SurfaceGeometry:
        g = self.geometry
        return SurfaceGeometry(g.n, g.d, g.rows)

    def link_inputs(self, band: str = "dl") -> LinkBudgetInputs:
        k = self.link
        return LinkBudgetInputs(
            p_tx=k.p_tx, d1=k.d1, d2=k.d2,
            f=k.f_dl_budget if band == "dl" else k.f_ul_budget,
            window_loss=k.window_loss, g_rx=k.g_rx, surface_side=self.geometry.side,
        )

    def noise_model(self) -> NoiseModel:
        n = self.noise
        return NoiseModel(n.bandwidth, n.noise_figure, n.temperature)

    def orbit_params(self) -> OrbitParams:
        o = self.orbit
        return OrbitParams(o.altitude, o.earth_radius, o.ground_speed)

    def passes(self, seed: int | None = None) -> tuple[PassTrajectory, PassTrajectory]:
        o = self.orbit
        params = self.orbit_params()
        primary = pass_geometry(params, o.max_elevation, o.t_step, o.min_elevation, 0.0,
                                o.jitter_deg, seed, name="primary")
        secondary = pass_geometry(params, o.secondary_max_elevation, o.t_step, o.min_elevation,
                                  o.secondary_offset, o.jitter_deg,
                                  None if seed is None else seed + 1, name="secondary")
        return primary, secondary

    def handover_policy(self, mode: str | None = None) -> HandoverPolicy:
        h = self.handover
        return HandoverPolicy(h.trigger_elevation, h.soft_window, mode or h.mode,
                              linear_schedule(h.schedule_steps), h.switch_time, h.snr_floor)

    def beam_spec(self) -> BeamSpec:
        return BeamSpec(tuple(self.split.beams), self.split.band_policy)


def _coerce(value: Any, default: Any, key: str) -> Any:
    """Match ``value`` to the default's type, raising ConfigError on mismatch."""
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif isinstance(default, str):
        ok = isinstance(value, str)
    elif isinstance(default, tuple):
        ok = isinstance(value, (list, tuple))
        if ok:
            proto = default[0] if default else 0.0
            value = tuple(_coerce(v, proto, f"{key}[{i}]") for i, v in enumerate(value))
    else:
        ok = True
    if not ok:
        raise ConfigError(f"{key}: expected {type(default).__name__}, got {value!r}", key=key)
    return value


def _section(cls: type, data: Any, name: str):
    if not isinstance(data, Mapping):
        raise ConfigError(f"{name}: section must be an object", key=name)
    defaults = cls()
    known = {f.name for f in fields(cls)}
    for k in data:
        if k not in known:
            raise ConfigError(f"unknown key {name}.{k}", key=f"{name}.{k}")
    kwargs = {k: _coerce(v, getattr(defaults, k), f"{name}.{k}") for k, v in data.items()}
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}", key=name) from exc


def config_from_dict(data: Mapping[str, Any]) -> ScenarioConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("config document must be a JSON object")
    version = data.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version!r}", key="version")
    kwargs = {}
    for k, v in data.items():
        if k == "version":
            continue
        if k not in SECTIONS:
            raise ConfigError(f"unknown section {k}", key=k)
        kwargs[k] = _section(SECTIONS[k], v, k)
    cfg = ScenarioConfig(**kwargs)
    try:
        cfg.beam_spec()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"split.beams: {exc}", key="split.beams") from exc
    try:
        cfg.handover_policy()
    except ValueError as exc:
        raise ConfigError(f"handover: {exc}", key="handover") from exc
    return cfg


def load_config(path: str | Path | None) -> ScenarioConfig:
    """Read a scenario file; ``None`` gives the defaults."""
    if path is None:
        return ScenarioConfig()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {p}: {exc.strerror}", key=str(p)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return config_from_dict(data)


def config_to_dict(cfg: ScenarioConfig) -> dict[str, Any]:
    out: dict[str, Any] = {"version": cfg.version}
    for name in SECTIONS:
        sec = getattr(cfg, name)
        out[name] = {
            f.name: (list(map(list, v)) if v and isinstance(v[0], tuple) else list(v))
            if isinstance(v := getattr(sec, f.name), tuple) else v
            for f in fields(sec)
        }
    return out
