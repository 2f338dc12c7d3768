"""LEO pass geometry and hard/soft handover traces through the surface.

Passes use a flat-track model: the sub-satellite point moves in a straight
line at constant ground speed, and its ground distance to the surface maps to
an Earth central angle ``s / R_e``.  The surface broadside faces the pass's
maximum-elevation direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from .beamform import Beam, BeamSpec, SurfaceConfig, SurfaceGeometry, efficiency, split_config, \
    steering_config
from .errors import ScenarioError
from .link import LinkBudgetInputs, NoiseModel, link_budget
from .pattern import Codebook

FOV_LIMIT_DEG = 75.0
ANGLE_QUANTUM_DEG = 0.01
TRACE_HEADER = ("t_s", "serving", "elev_deg", "steer_deg", "eff", "snr_db")
TRACK_HEADER = ("t_s", "steer_deg", "eff_dl", "eff_ul", "snr_dl_db", "snr_ul_db", "resteer")


@dataclass(frozen=True)
class OrbitParams:
    altitude: float = 1150.0
    earth_radius: float = 6371.0
    ground_speed: float = 7.5

    def __post_init__(self):
        if not self.altitude > 0:
            raise ValueError(f"altitude must be > 0 km, got {self.altitude}")
        if not self.earth_radius > 0:
            raise ValueError(f"earth_radius must be > 0 km, got {self.earth_radius}")
        if not self.ground_speed > 0:
            raise ValueError(f"ground_speed must be > 0 km/s, got {self.ground_speed}")


def _check_elevation(e):
    e = np.asarray(e, dtype=float)
    if np.any((e < 0) | (e > 90)) or np.any(~np.isfinite(e)):
        raise ValueError(f"elevation must lie in [0, 90] deg, got {e}")
    return e


def slant_range(elevation, params: OrbitParams = OrbitParams()):
    """Line-of-sight distance (km) to the satellite at ``elevation`` (deg)."""
    e = np.radians(_check_elevation(elevation))
    re, rs = params.earth_radius, params.earth_radius + params.altitude
    d = np.sqrt(rs**2 - (re * np.cos(e)) ** 2) - re * np.sin(e)
    return float(d) if np.ndim(d) == 0 else d


def central_angle(elevation, params: OrbitParams = OrbitParams()):
    """Earth central angle (rad) between surface and sub-satellite point."""
    e = np.radians(_check_elevation(elevation))
    re, rs = params.earth_radius, params.earth_radius + params.altitude
    return np.arccos(re * np.cos(e) / rs) - e


def elevation_from_central_angle(gamma, params: OrbitParams = OrbitParams()):
    re, rs = params.earth_radius, params.earth_radius + params.altitude
    g = np.asarray(gamma, dtype=float)
    return np.degrees(np.arctan2(np.cos(g) - re / rs, np.sin(g)))


@dataclass(frozen=True, eq=False)
class PassTrajectory:
    """Time-ordered samples of a single pass."""

    t: np.ndarray
    elevation: np.ndarray
    slant_range: np.ndarray
    steering_angle: np.ndarray
    name: str = "sat"

    def __post_init__(self):
        arrays = [np.asarray(getattr(self, k), dtype=float)
                  for k in ("t", "elevation", "slant_range", "steering_angle")]
        if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 1 or arrays[0].size < 2:
            raise ValueError("trajectory arrays must be 1-D, equal length, with >= 2 samples")
        if np.any(np.diff(arrays[0]) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        for k, a in zip(("t", "elevation", "slant_range", "steering_angle"), arrays):
            a.setflags(write=False)
            object.__setattr__(self, k, a)

    @property
    def start(self) -> float:
        return float(self.t[0])

    @property
    def end(self) -> float:
        return float(self.t[-1])

    @property
    def duration(self) -> float:
        return self.end - self.start

    def visible(self, t: float) -> bool:
        return self.start <= t <= self.end

    def at(self, t: float) -> tuple[float, float, float]:
        """Linearly interpolated (elevation, slant range, steering angle) at ``t``."""
        if not self.visible(t):
            raise ScenarioError(f"{self.name} is not visible at t={t:g} s")
        return (float(np.interp(t, self.t, self.elevation)),
                float(np.interp(t, self.t, self.slant_range)),
                float(np.interp(t, self.t, self.steering_angle)))

    def rows(self):
        for i in range(self.t.size):
            yield (float(self.t[i]), float(self.elevation[i]), float(self.slant_range[i]),
                   float(self.steering_angle[i]))


def _direction(el_deg, x, y0):
    """Unit line-of-sight vectors (along-track, cross-track, up)."""
    el = np.radians(el_deg)
    az = np.arctan2(x, y0)
    return np.stack([np.cos(el) * np.sin(az), np.cos(el) * np.cos(az), np.sin(el)], axis=-1)


def pass_geometry(params: OrbitParams = OrbitParams(), max_elevation: float = 40.0, t_step: float = 1.0,
                  min_elevation: float = 25.0, t_start: float = 0.0, jitter_deg: float = 0.0,
                  seed: int | None = None, name: str = "sat") -> PassTrajectory:
    """Symmetric pass between two crossings of ``min_elevation``.

    The ground track's closest approach is placed so the peak elevation is
    ``max_elevation``.  ``jitter_deg`` adds zero-mean Gaussian noise to the
    steering angle, standing in for prediction error in the trajectory.
    """
    if not 0 < min_elevation < max_elevation <= 90:
        raise ValueError(
            f"need 0 < min_elevation < max_elevation <= 90, got {min_elevation}, {max_elevation}"
        )
    if not t_step > 0:
        raise ValueError(f"t_step must be > 0 s, got {t_step}")
    if jitter_deg < 0:
        raise ValueError("jitter_deg must be >= 0")
    re = params.earth_radius
    y0 = re * float(central_angle(max_elevation, params))
    s_max = re * float(central_angle(min_elevation, params))
    half = math.sqrt(max(s_max**2 - y0**2, 0.0)) / params.ground_speed
    # sample grid symmetric about closest approach, closed by the horizon crossings
    k = int(math.floor(half / t_step + 1e-9))
    tau = t_step * np.arange(-k, k + 1, dtype=float)
    if k * t_step < half - 1e-9:
        tau = np.r_[-half, tau, half]
    x = params.ground_speed * tau
    el = elevation_from_central_angle(np.hypot(x, y0) / re, params)
    el = np.clip(el, min_elevation, max_elevation)
    los = _direction(el, x, y0)
    ref = _direction(np.array(max_elevation), np.array(0.0), y0)
    steer = np.sign(x) * np.degrees(np.arccos(np.clip(los @ ref, -1.0, 1.0)))
    if jitter_deg > 0:
        steer = steer + np.random.default_rng(seed).normal(0.0, jitter_deg, steer.size)
    steer = np.clip(steer, -FOV_LIMIT_DEG, FOV_LIMIT_DEG)
    return PassTrajectory(
        t=t_start + tau + half,
        elevation=el,
        slant_range=slant_range(el, params),
        steering_angle=steer,
        name=name,
    )


def linear_schedule(steps: int = 5) -> tuple[tuple[float, float], ...]:
    """Primary/secondary weights ramping linearly across the soft window."""
    if steps < 1:
        raise ValueError("schedule needs at least one step")
    return tuple((1 - (k + 0.5) / steps, (k + 0.5) / steps) for k in range(steps))


@dataclass(frozen=True)
class HandoverPolicy:
    trigger_elevation: float = 30.0
    soft_window: float = 20.0
    mode: Literal["hard", "soft"] = "soft"
    split_schedule: tuple[tuple[float, float], ...] = field(default_factory=linear_schedule)
    switch_time: float = 0.5
    snr_floor: float = 5.0

    def __post_init__(self):
        if not 0 < self.trigger_elevation < 90:
            raise ValueError(f"trigger_elevation must be in (0, 90), got {self.trigger_elevation}")
        if self.soft_window < 0:
            raise ValueError("soft_window must be >= 0")
        if self.mode not in ("hard", "soft"):
            raise ValueError(f"unknown handover mode {self.mode!r}")
        if self.switch_time < 0:
            raise ValueError("switch_time must be >= 0")
        sched = tuple(tuple(float(w) for w in pair) for pair in self.split_schedule)
        if not sched:
            raise ValueError("split_schedule must not be empty")
        for pair in sched:
            if len(pair) != 2 or min(pair) <= 0 or not math.isclose(sum(pair), 1.0, abs_tol=1e-9):
                raise ValueError(f"schedule weights must be positive pairs summing to 1, got {pair}")
        object.__setattr__(self, "split_schedule", sched)


@dataclass(frozen=True)
class TraceRow:
    t: float
    serving: str
    elevation: float
    steering_angle: float
    eff: float
    snr_db: float
    detail: dict = field(default_factory=dict, compare=False)

    def as_tuple(self) -> tuple:
        return (self.t, self.serving, self.elevation, self.steering_angle, self.eff, self.snr_db)


@dataclass(frozen=True)
class HandoverTrace:
    rows: tuple[TraceRow, ...]
    outage_duration: float
    min_snr: float
    mode: str
    switch_start: float
    split_lobe_loss_db: dict = field(default_factory=dict)


class _ConfigCache:
    """Steering configs keyed by angle rounded to ``ANGLE_QUANTUM_DEG``."""

    def __init__(self, codebook: Codebook, geometry: SurfaceGeometry, band_policy: str):
        self.codebook, self.geometry, self.policy = codebook, geometry, band_policy
        self._steer: dict[float, SurfaceConfig] = {}

    @staticmethod
    def key(theta: float) -> float:
        return round(round(theta / ANGLE_QUANTUM_DEG) * ANGLE_QUANTUM_DEG, 6)

    def steer(self, theta: float) -> SurfaceConfig:
        k = self.key(theta)
        if k not in self._steer:
            self._steer[k] = steering_config(self.codebook, self.geometry, k, self.policy)
        return self._steer[k]

    def single_eff(self, theta: float, band: str = "dl") -> float:
        return float(efficiency(self.steer(theta), band, self.key(theta)))


def _sat_snr(inputs: LinkBudgetInputs, noise: NoiseModel, rng_km: float, eff_rx: float,
             eff_tx: float) -> float:
    return link_budget(replace(inputs, d1=rng_km, eff_rx=eff_rx, eff_tx=eff_tx), noise).snr


def _switch_time(primary: PassTrajectory, trigger: float) -> float:
    """First time after the primary's peak where its elevation drops below ``trigger``."""
    peak = int(np.argmax(primary.elevation))
    el, t = primary.elevation[peak:], primary.t[peak:]
    below = np.nonzero(el < trigger)[0]
    if below.size == 0:
        raise ScenarioError(f"primary never descends below the trigger elevation {trigger:g} deg")
    i = int(below[0])
    if i == 0:
        return float(t[0])
    # linear crossing between samples i-1 and i
    e0, e1 = el[i - 1], el[i]
    return float(t[i - 1] + (e0 - trigger) / (e0 - e1) * (t[i] - t[i - 1]))


def _outage(rows: Sequence[TraceRow], floor: float) -> float:
    total = 0.0
    for a, b in zip(rows[:-1], rows[1:]):
        if a.snr_db < floor:
            total += b.t - a.t
    return total


def simulate_handover(primary: PassTrajectory, secondary: PassTrajectory, policy: HandoverPolicy,
                      codebook: Codebook, geometry: SurfaceGeometry,
                      link_inputs: LinkBudgetInputs = LinkBudgetInputs(),
                      noise: NoiseModel = NoiseModel(), band_policy: str = "dl_only") -> HandoverTrace:
    """SNR trace across a handover from ``primary`` to ``secondary``.

    Rows are piecewise constant: each holds until the next row's time.  The
    satellite hop uses the lobe efficiency toward the satellite and the user
    hop the broadside efficiency.  During a soft split the two satellites'
    received powers add.
    """
    if primary.end <= secondary.start or secondary.end <= primary.start:
        raise ScenarioError("primary and secondary passes do not overlap in time")
    cache = _ConfigCache(codebook, geometry, band_policy)
    eff_user = cache.single_eff(0.0)
    t_sw = _switch_time(primary, policy.trigger_elevation)
    t_end = secondary.end

    if policy.mode == "hard":
        t_on = t_sw + policy.switch_time
        if not secondary.visible(t_on):
            raise ScenarioError(f"secondary is not visible at t={t_on:g} s when the switch completes")
        times = sorted({*primary.t[primary.t < t_sw], t_sw, t_on,
                        *secondary.t[(secondary.t > t_on) & (secondary.t <= t_end)]})
    else:
        w0, w1 = t_sw - policy.soft_window / 2, t_sw + policy.soft_window / 2
        if not (primary.visible(w0) and primary.visible(w1) and secondary.visible(w0)
                and secondary.visible(w1)):
            raise ScenarioError(
                f"soft window [{w0:g}, {w1:g}] s is not covered by both passes"
            )
        steps = len(policy.split_schedule)
        edges = [w0 + k * policy.soft_window / steps for k in range(steps + 1)]
        times = sorted({*primary.t[primary.t < w0], *edges,
                        *secondary.t[(secondary.t > w1) & (secondary.t <= t_end)]})

    rows: list[TraceRow] = []
    lobe_loss: dict = {}
    split_cache: dict[tuple, SurfaceConfig] = {}
    for t in times:
        if policy.mode == "hard" and t_sw <= t < t_sw + policy.switch_time:
            el, _, st = primary.at(t)
            rows.append(TraceRow(t, "none", el, st, 0.0, -math.inf))
            continue
        in_window = policy.mode == "soft" and policy.soft_window > 0 and w0 <= t < w1
        if not in_window:
            sat = primary if t < t_sw else secondary
            el, rng_km, st = sat.at(t)
            e = cache.single_eff(st)
            s = _sat_snr(link_inputs, noise, rng_km, e, eff_user)
            rows.append(TraceRow(t, sat.name, el, st, e, s))
            continue
        k = min(int((t - w0) / policy.soft_window * steps), steps - 1)
        weights = policy.split_schedule[k]
        geo = [primary.at(t), secondary.at(t)]
        angles = tuple(cache.key(g[2]) for g in geo)
        key = (angles, weights)
        if key not in split_cache:
            spec = BeamSpec(tuple(Beam(a, w) for a, w in zip(angles, weights)), band_policy)
            split_cache[key] = split_config(codebook, geometry, spec)
        cfg = split_cache[key]
        effs = [float(efficiency(cfg, "dl", a)) for a in angles]
        snrs = [_sat_snr(link_inputs, noise, g[1], e, eff_user) for g, e in zip(geo, effs)]
        combined = 10 * math.log10(sum(10 ** (s / 10) for s in snrs))
        lead = 0 if weights[0] >= weights[1] else 1
        detail = {
            "weights": list(weights),
            "angles": list(angles),
            "eff": effs,
            "snr": snrs,
            "single_eff": [cache.single_eff(a) for a in angles],
        }
        rows.append(TraceRow(t, f"{primary.name}+{secondary.name}", geo[lead][0], geo[lead][2],
                             effs[lead], combined, detail))
        if math.isclose(weights[0], 0.5) and not lobe_loss:
            lobe_loss = {
                name: 20 * math.log10(e / s)
                for name, e, s in zip((primary.name, secondary.name), effs, detail["single_eff"])
            }
    rows_t = tuple(rows)
    snrs = [r.snr_db for r in rows_t]
    return HandoverTrace(
        rows=rows_t,
        outage_duration=_outage(rows_t, policy.snr_floor),
        min_snr=min(snrs),
        mode=policy.mode,
        switch_start=t_sw,
        split_lobe_loss_db=lobe_loss,
    )


@dataclass(frozen=True)
class TrackRow:
    t: float
    steering_angle: float
    eff_dl: float
    eff_ul: float
    snr_dl: float
    snr_ul: float
    resteer: bool

    def as_tuple(self) -> tuple:
        return (self.t, self.steering_angle, self.eff_dl, self.eff_ul, self.snr_dl, self.snr_ul,
                int(self.resteer))


def track_link(trajectory: PassTrajectory, codebook: Codebook, geometry: SurfaceGeometry,
               link_inputs: LinkBudgetInputs = LinkBudgetInputs(), noise: NoiseModel = NoiseModel(),
               re_steer_interval: float = 10.0, f_ul_budget: float = 14.0,
               band_policy: str = "joint") -> list[TrackRow]:
    """Follow one pass with a single config per re-steer serving both bands.

    Between re-steer instants the stale config is evaluated at the true
    angle on both bands.  The user hop stays at the broadside efficiency of
    the same policy.
    """
    if not re_steer_interval > 0:
        raise ValueError("re_steer_interval must be > 0 s")
    cache = _ConfigCache(codebook, geometry, band_policy)
    user = cache.steer(0.0)
    user_eff = {b: float(efficiency(user, b, 0.0)) for b in ("dl", "ul")}
    ul_inputs = replace(link_inputs, f=f_ul_budget)
    rows = []
    next_steer = trajectory.start
    cfg = None
    for t, _, rng_km, st in trajectory.rows():
        resteer = cfg is None or t >= next_steer - 1e-9
        if resteer:
            cfg = cache.steer(st)
            while next_steer <= t + 1e-9:
                next_steer += re_steer_interval
        e_dl = max(float(efficiency(cfg, "dl", st)), 1e-12)
        e_ul = max(float(efficiency(cfg, "ul", st)), 1e-12)
        rows.append(TrackRow(
            t=t, steering_angle=st, eff_dl=e_dl, eff_ul=e_ul,
            snr_dl=_sat_snr(link_inputs, noise, rng_km, e_dl, user_eff["dl"]),
            snr_ul=_sat_snr(ul_inputs, noise, rng_km, e_ul, user_eff["ul"]),
            resteer=resteer,
        ))
    return rows
