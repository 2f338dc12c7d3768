"""Two-hop relay link budget, SNR baselines, and surface-size sweeps.

The relay chain is satellite -> window -> surface (receive aperture) ->
surface (transmit aperture) -> user.  All gains and losses are in dB; path
losses are returned as positive numbers and enter the budget negated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal, Sequence

from .beamform import SurfaceGeometry, efficiency, steering_config
from .pattern import Codebook

C_M_PER_S = 299_792_458.0
BRICK_LOSS_DB = 20.0
THERMAL_NOISE_DBM_HZ = -174.0

Scenario = Literal["steer_out", "vary_incident"]
SWEEP_HEADER = ("scenario", "side_m", "angle_deg", "snr_db", "snr_freespace_db", "snr_brick_db")


@dataclass(frozen=True)
class LinkBudgetInputs:
    """Relay link constants; ``d1`` in km, ``d2`` in m, ``f`` in GHz."""

    p_tx: float = 97.0
    d1: float = 1150.0
    d2: float = 5.0
    f: float = 10.0
    window_loss: float = -4.0
    g_rx: float = 25.0
    surface_side: float = 0.75
    eff_rx: float = 1.0
    eff_tx: float = 1.0

    def __post_init__(self):
        if not (self.d1 > 0 and self.d2 > 0):
            raise ValueError(f"hop distances must be > 0, got d1={self.d1} km, d2={self.d2} m")
        if not self.f > 0:
            raise ValueError(f"frequency must be > 0 GHz, got {self.f}")
        if self.window_loss > 0:
            raise ValueError(f"window_loss is a loss and must be <= 0 dB, got {self.window_loss}")
        if not self.surface_side > 0:
            raise ValueError(f"surface_side must be > 0 m, got {self.surface_side}")
        for name in ("eff_rx", "eff_tx"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must be in (0, 1], got {v}")


@dataclass(frozen=True)
class NoiseModel:
    bandwidth: float = 250e6
    noise_figure: float = 7.0
    temperature: float = 290.0

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be > 0 Hz, got {self.bandwidth}")
        if self.noise_figure < 0:
            raise ValueError(f"noise_figure must be >= 0 dB, got {self.noise_figure}")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be > 0 K, got {self.temperature}")

    @property
    def power_dbm(self) -> float:
        """Noise floor; the -174 dBm/Hz density is scaled by ``T / 290 K``."""
        density = THERMAL_NOISE_DBM_HZ + 10 * math.log10(self.temperature / 290.0)
        return density + 10 * math.log10(self.bandwidth) + self.noise_figure


@dataclass(frozen=True)
class LinkResult:
    p_rx: float
    snr: float
    breakdown: tuple[tuple[str, float], ...]


def fspl(d_m: float, f_ghz: float) -> float:
    """Free-space path loss 20 log10(4 pi d / lambda) in dB for ``d_m`` metres."""
    if not (d_m > 0 and f_ghz > 0):
        raise ValueError(f"fspl needs d > 0 and f > 0, got d={d_m} m, f={f_ghz} GHz")
    lam = C_M_PER_S / (f_ghz * 1e9)
    return 20 * math.log10(4 * math.pi * d_m / lam)


def surface_gain(side_m: float, f_ghz: float, eff: float) -> float:
    """Aperture gain (dBi) of a square surface with amplitude efficiency ``eff``."""
    if not (side_m > 0 and f_ghz > 0):
        raise ValueError("surface side and frequency must be > 0")
    if not 0 < eff <= 1:
        raise ValueError(f"efficiency must be in (0, 1], got {eff}")
    lam = C_M_PER_S / (f_ghz * 1e9)
    return 10 * math.log10(eff**2 * 4 * math.pi * side_m**2 / lam**2)


def snr(p_rx: float, noise: NoiseModel) -> float:
    return p_rx - noise.power_dbm


def _result(terms: list[tuple[str, float]], noise: NoiseModel) -> LinkResult:
    p_rx = math.fsum(v for _, v in terms)
    return LinkResult(p_rx=p_rx, snr=snr(p_rx, noise), breakdown=tuple(terms))


def link_budget(inputs: LinkBudgetInputs, noise: NoiseModel = NoiseModel()) -> LinkResult:
    """Received power through the surface, terms in chain order."""
    terms = [
        ("p_tx", inputs.p_tx),
        ("l_d1", -fspl(inputs.d1 * 1e3, inputs.f)),
        ("l_window", inputs.window_loss),
        ("g_surface_rx", surface_gain(inputs.surface_side, inputs.f, inputs.eff_rx)),
        ("l_d2", -fspl(inputs.d2, inputs.f)),
        ("g_surface_tx", surface_gain(inputs.surface_side, inputs.f, inputs.eff_tx)),
        ("g_rx", inputs.g_rx),
    ]
    return _result(terms, noise)


def baseline_budget(kind: Literal["free_space", "brick_wall"], inputs: LinkBudgetInputs,
                    noise: NoiseModel = NoiseModel()) -> LinkResult:
    """Direct path without the surface.

    The free-space path has no window loss; the brick path adds a fixed
    penetration loss on top of it.
    """
    if kind not in ("free_space", "brick_wall"):
        raise ValueError(f"unknown baseline {kind!r}")
    terms = [
        ("p_tx", inputs.p_tx),
        ("l_path", -fspl(inputs.d1 * 1e3 + inputs.d2, inputs.f)),
        ("g_rx", inputs.g_rx),
    ]
    if kind == "brick_wall":
        terms.append(("l_brick", -BRICK_LOSS_DB))
    return _result(terms, noise)


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    side_m: float
    angle_deg: float
    snr_db: float
    snr_freespace_db: float
    snr_brick_db: float

    def as_tuple(self) -> tuple:
        return (self.scenario, self.side_m, self.angle_deg, self.snr_db,
                self.snr_freespace_db, self.snr_brick_db)


def steering_efficiencies(codebook: Codebook, geometry: SurfaceGeometry, angles: Sequence[float],
                          band_policy: str = "dl_only", band: str = "dl") -> dict[float, float]:
    """Efficiency of a fresh steering config at each angle, evaluated at that angle."""
    out = {}
    for a in dict.fromkeys(float(x) for x in angles):
        cfg = steering_config(codebook, geometry, a, band_policy)
        out[a] = float(efficiency(cfg, band, a))
    return out


def snr_sweep(scenario: Scenario, angles: Sequence[float], sides: Sequence[float], codebook: Codebook,
              geometry: SurfaceGeometry, inputs: LinkBudgetInputs = LinkBudgetInputs(),
              noise: NoiseModel = NoiseModel(), band_policy: str = "dl_only") -> list[SweepRow]:
    """SNR through the surface over a (side, angle) grid, against both baselines.

    ``steer_out`` steers the surface-to-user hop and keeps the satellite hop
    at broadside; ``vary_incident`` swaps the roles.
    """
    if scenario not in ("steer_out", "vary_incident"):
        raise ValueError(f"unknown scenario {scenario!r}")
    if len(angles) == 0 or len(sides) == 0:
        raise ValueError("angles and sides must be non-empty")
    effs = steering_efficiencies(codebook, geometry, [0.0, *angles], band_policy)
    broadside = effs[0.0]
    rows = []
    for side in sides:
        base_in = replace(inputs, surface_side=float(side))
        free = baseline_budget("free_space", base_in, noise).snr
        brick = baseline_budget("brick_wall", base_in, noise).snr
        for a in angles:
            e = effs[float(a)]
            eff_rx, eff_tx = (broadside, e) if scenario == "steer_out" else (e, broadside)
            res = link_budget(replace(base_in, eff_rx=eff_rx, eff_tx=eff_tx), noise)
            rows.append(SweepRow(scenario, float(side), float(a), res.snr, free, brick))
    return rows


def contiguous_span(angles: Sequence[float], mask: Sequence[bool]) -> float:
    """Widest angular extent (deg) of consecutive sample angles where ``mask`` holds."""
    best, start = 0.0, None
    for a, m in zip(angles, mask):
        if m and start is None:
            start = a
        if m:
            best = max(best, a - start)
        else:
            start = None
    return best
