"""Bias sweeps of a Huygens cell and max-amplitude phase codebooks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .circuit import HuygensCell, cell_s_params
from .errors import CoverageError

Band = Literal["dl", "ul"]
Mode = Literal["transmit", "reflect"]

MAX_GAP_FRACTION = 0.25


@dataclass(frozen=True)
class BiasGrid:
    u_e_values: tuple[float, ...]
    u_m_values: tuple[float, ...]

    def __post_init__(self):
        for name in ("u_e_values", "u_m_values"):
            vals = np.asarray(getattr(self, name), dtype=float)
            if vals.ndim != 1 or vals.size == 0:
                raise ValueError(f"{name} must be a non-empty 1-D sequence")
            if np.any(np.diff(vals) <= 0):
                raise ValueError(f"{name} must be strictly ascending")
            object.__setattr__(self, name, tuple(float(v) for v in vals))

    @classmethod
    def uniform(cls, v_min: float = 0.0, v_max: float = 20.0, points: int = 201) -> BiasGrid:
        vals = tuple(np.linspace(v_min, v_max, points))
        return cls(vals, vals)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.u_e_values), len(self.u_m_values)


@dataclass(frozen=True, eq=False)
class HuygensPattern:
    """Coefficients indexed ``[i_e, i_m]`` over the bias grid at both bands."""

    grid: BiasGrid
    t_dl: np.ndarray
    r_dl: np.ndarray
    t_ul: np.ndarray
    r_ul: np.ndarray
    f_dl: float
    f_ul: float

    def __post_init__(self):
        for name in ("t_dl", "r_dl", "t_ul", "r_ul"):
            arr = getattr(self, name)
            if arr.shape != self.grid.shape:
                raise ValueError(f"{name} has shape {arr.shape}, grid is {self.grid.shape}")
            arr.setflags(write=False)

    def coefficients(self, band: Band, mode: Mode) -> np.ndarray:
        return getattr(self, ("t_" if mode == "transmit" else "r_") + band)


@dataclass(frozen=True)
class CodebookEntry:
    u_e: float
    u_m: float
    coeff_dl: complex
    coeff_ul: complex
    bin: int

    def coeff(self, band: Band) -> complex:
        return self.coeff_dl if band == "dl" else self.coeff_ul


@dataclass(frozen=True)
class Codebook:
    mode: Mode
    primary_band: Band
    n_bins: int
    entries: tuple[CodebookEntry, ...]
    f_dl: float = 10.0
    f_ul: float = 15.0

    def __post_init__(self):
        if not self.entries:
            raise ValueError("codebook has no entries")

    @property
    def gaps(self) -> tuple[int, ...]:
        filled = {e.bin for e in self.entries}
        return tuple(b for b in range(self.n_bins) if b not in filled)

    def coeffs(self, band: Band) -> np.ndarray:
        return np.array([e.coeff(band) for e in self.entries], dtype=complex)

    def biases(self) -> np.ndarray:
        return np.array([(e.u_e, e.u_m) for e in self.entries], dtype=float)


@dataclass(frozen=True)
class CoverageMetrics:
    phase_span: float
    min_amp: float
    mean_amp: float
    gap_count: int


def sweep_pattern(cell: HuygensCell, grid: BiasGrid, f_dl: float, f_ul: float) -> HuygensPattern:
    ue, um = np.meshgrid(grid.u_e_values, grid.u_m_values, indexing="ij")
    dl = cell_s_params(cell, ue, um, f_dl)
    ul = cell_s_params(cell, ue, um, f_ul)
    return HuygensPattern(
        grid=grid,
        t_dl=np.asarray(dl.t, dtype=complex).reshape(grid.shape),
        r_dl=np.asarray(dl.r, dtype=complex).reshape(grid.shape),
        t_ul=np.asarray(ul.t, dtype=complex).reshape(grid.shape),
        r_ul=np.asarray(ul.r, dtype=complex).reshape(grid.shape),
        f_dl=f_dl,
        f_ul=f_ul,
    )


def phase_bin(coeffs, n_bins: int) -> np.ndarray:
    """Bin index of each coefficient's phase; bin k is centred on k * 360/n_bins."""
    width = 2 * np.pi / n_bins
    ph = np.angle(coeffs)
    return np.floor(np.mod(ph + width / 2, 2 * np.pi) / width).astype(int) % n_bins


def extract_codebook(
    pattern: HuygensPattern,
    primary_band: Band = "dl",
    mode: Mode = "transmit",
    n_bins: int = 32,
    min_amplitude: float = 0.0,
    secondary_bins: int = 1,
) -> Codebook:
    """Per phase bin, keep the grid point with the largest primary-band amplitude.

    Bins whose best amplitude falls below ``min_amplitude`` are left as gaps.
    Ties go to the lower ``u_e``, then the lower ``u_m``.

    With ``secondary_bins > 1`` each primary bin is further split by the
    phase of the other band, and each (primary, secondary) cell keeps the
    point whose weaker band amplitude is largest.  Such a joint codebook
    lets one configuration shape both bands' phase profiles independently.
    """
    if n_bins < 8:
        raise ValueError(f"n_bins must be >= 8, got {n_bins}")
    if secondary_bins < 1:
        raise ValueError("secondary_bins must be >= 1")
    primary = pattern.coefficients(primary_band, mode).ravel()
    other_band: Band = "ul" if primary_band == "dl" else "dl"
    other = pattern.coefficients(other_band, mode).ravel()
    bins = phase_bin(primary, n_bins)
    if secondary_bins == 1:
        score = np.abs(primary)
        key = bins
    else:
        score = np.minimum(np.abs(primary), np.abs(other))
        key = bins * secondary_bins + phase_bin(other, secondary_bins)

    # row-major flattening already orders points by (u_e, u_m); lexsort is
    # stable, so equal scores keep that order
    order = np.lexsort((-score, key))
    sorted_keys = key[order]
    first = np.r_[True, sorted_keys[1:] != sorted_keys[:-1]]
    winners = order[first]
    winners = winners[score[winners] >= min_amplitude]

    n_m = len(pattern.grid.u_m_values)
    entries = []
    for idx in winners:
        i_e, i_m = divmod(int(idx), n_m)
        c_p, c_o = complex(primary[idx]), complex(other[idx])
        entries.append(
            CodebookEntry(
                u_e=pattern.grid.u_e_values[i_e],
                u_m=pattern.grid.u_m_values[i_m],
                coeff_dl=c_p if primary_band == "dl" else c_o,
                coeff_ul=c_o if primary_band == "dl" else c_p,
                bin=int(bins[idx]),
            )
        )
    width = 2 * np.pi / n_bins
    entries.sort(key=lambda e: (e.bin, np.angle(e.coeff(primary_band) * np.exp(-1j * e.bin * width))))
    gap_count = n_bins - len({e.bin for e in entries})
    if gap_count > MAX_GAP_FRACTION * n_bins:
        raise CoverageError(
            f"{gap_count} of {n_bins} phase bins empty for {primary_band} {mode}; "
            "use a denser bias grid or recalibrate the cell"
        )
    return Codebook(
        mode=mode,
        primary_band=primary_band,
        n_bins=n_bins,
        entries=tuple(entries),
        f_dl=pattern.f_dl,
        f_ul=pattern.f_ul,
    )


def coverage_metrics(codebook: Codebook) -> CoverageMetrics:
    amps = np.abs(codebook.coeffs(codebook.primary_band))
    filled = len({e.bin for e in codebook.entries})
    return CoverageMetrics(
        phase_span=filled * 360.0 / codebook.n_bins,
        min_amp=float(amps.min()),
        mean_amp=float(amps.mean()),
        gap_count=codebook.n_bins - filled,
    )


def transmission_phase_span(pattern: HuygensPattern, band: Band = "dl", mode: Mode = "transmit",
                            resolution_deg: float = 1.0) -> float:
    """Angular extent (deg) of the phase circle reached anywhere on the grid."""
    n = int(round(360 / resolution_deg))
    hit = np.unique(phase_bin(pattern.coefficients(band, mode).ravel(), n))
    return hit.size * 360.0 / n


def pattern_rows(pattern: HuygensPattern):
    """Long-format rows ``(u_e, u_m, band, mode, mag, phase_deg)``."""
    for i_e, ue in enumerate(pattern.grid.u_e_values):
        for i_m, um in enumerate(pattern.grid.u_m_values):
            for band in ("dl", "ul"):
                for mode in ("transmit", "reflect"):
                    c = pattern.coefficients(band, mode)[i_e, i_m]
                    yield ue, um, band, mode, abs(c), float(np.degrees(np.angle(c)))


def codebook_rows(codebook: Codebook):
    for e in codebook.entries:
        for band in ("dl", "ul"):
            c = e.coeff(band)
            yield e.u_e, e.u_m, band, codebook.mode, abs(c), float(np.degrees(np.angle(c)))


def codebook_to_dict(codebook: Codebook) -> dict:
    m = coverage_metrics(codebook)
    return {
        "mode": codebook.mode,
        "primary_band": codebook.primary_band,
        "n_bins": codebook.n_bins,
        "f_dl": codebook.f_dl,
        "f_ul": codebook.f_ul,
        "gaps": list(codebook.gaps),
        "metrics": {
            "phase_span_deg": m.phase_span,
            "min_amp": m.min_amp,
            "mean_amp": m.mean_amp,
            "gap_count": m.gap_count,
        },
        "entries": [
            {
                "bin": e.bin,
                "u_e": e.u_e,
                "u_m": e.u_m,
                "dl": {"mag": abs(e.coeff_dl), "phase_deg": float(np.degrees(np.angle(e.coeff_dl)))},
                "ul": {"mag": abs(e.coeff_ul), "phase_deg": float(np.degrees(np.angle(e.coeff_ul)))},
            }
            for e in codebook.entries
        ],
    }


def pattern_to_dict(pattern: HuygensPattern) -> dict:
    out = {
        "f_dl": pattern.f_dl,
        "f_ul": pattern.f_ul,
        "u_e_values": list(pattern.grid.u_e_values),
        "u_m_values": list(pattern.grid.u_m_values),
    }
    for band in ("dl", "ul"):
        for mode in ("transmit", "reflect"):
            c = pattern.coefficients(band, mode)
            out[f"{band}_{mode}"] = {
                "mag": np.abs(c).tolist(),
                "phase_deg": np.degrees(np.angle(c)).tolist(),
            }
    return out
