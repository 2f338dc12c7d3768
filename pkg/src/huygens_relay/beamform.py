"""Array-factor evaluation and codebook-driven beam synthesis.

Angles are measured from broadside; an element at index n contributes
``a_n * exp(j k d n sin(theta))``.  Efficiency is the amplitude fraction
``|AF(theta)| / n``, so 0.5 corresponds to about 6 dB of power loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence, Union

import numpy as np

from .pattern import Band, Codebook, Mode

BandPolicy = Literal["joint", "dl_only", "ul_only"]

C_MM_PER_NS = 299.792458
POLICY_WEIGHTS: dict[str, tuple[float, float]] = {
    "joint": (0.5, 0.5),
    "dl_only": (1.0, 0.0),
    "ul_only": (0.0, 1.0),
}


@dataclass(frozen=True)
class SurfaceGeometry:
    n: int = 64
    d: float = 10.0
    rows: int = 64

    def __post_init__(self):
        if self.n < 1 or self.rows < 1:
            raise ValueError("element and row counts must be >= 1")
        if not self.d > 0:
            raise ValueError(f"element spacing must be > 0 mm, got {self.d}")

    @property
    def aperture_area(self) -> float:
        """Physical aperture in m^2."""
        return (self.n * self.d * 1e-3) * (self.rows * self.d * 1e-3)

    def beamwidth(self, f: float) -> float:
        """Approximate null-to-null-free beamwidth (deg), 102 * lambda / (n d)."""
        return 102.0 * wavelength_mm(f) / (self.n * self.d)


@dataclass(frozen=True)
class Beam:
    theta: float
    weight: float


@dataclass(frozen=True)
class BeamSpec:
    beams: tuple[Beam, ...]
    band_policy: BandPolicy = "joint"

    def __post_init__(self):
        beams = tuple(b if isinstance(b, Beam) else Beam(*b) for b in self.beams)
        object.__setattr__(self, "beams", beams)
        if not beams:
            raise ValueError("BeamSpec needs at least one beam")
        if any(abs(b.theta) >= 90 for b in beams):
            raise ValueError("beam angles must satisfy |theta| < 90 deg")
        if any(b.weight <= 0 for b in beams):
            raise ValueError("beam weights must be positive")
        if not math.isclose(sum(b.weight for b in beams), 1.0, rel_tol=0, abs_tol=1e-9):
            raise ValueError("beam weights must sum to 1")
        if self.band_policy not in POLICY_WEIGHTS:
            raise ValueError(f"unknown band policy {self.band_policy!r}")


@dataclass(frozen=True, eq=False)
class SurfaceConfig:
    """Per-element bias pairs and the complex coefficients they realize."""

    u_e: np.ndarray
    u_m: np.ndarray
    coeff_dl: np.ndarray
    coeff_ul: np.ndarray
    mode: Mode
    geometry: SurfaceGeometry
    f_dl: float
    f_ul: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("u_e", "u_m", "coeff_dl", "coeff_ul"):
            arr = np.asarray(getattr(self, name))
            if arr.shape != (self.geometry.n,):
                raise ValueError(f"{name} has {arr.size} elements, geometry has {self.geometry.n}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def weights(self, band: Band) -> np.ndarray:
        return self.coeff_dl if band == "dl" else self.coeff_ul

    def band_frequency(self, band: Band) -> float:
        return self.f_dl if band == "dl" else self.f_ul

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "geometry": {"n": self.geometry.n, "d": self.geometry.d, "rows": self.geometry.rows},
            "f_dl": self.f_dl,
            "f_ul": self.f_ul,
            "metadata": self.metadata,
            "elements": [
                {
                    "index": i,
                    "u_e": float(self.u_e[i]),
                    "u_m": float(self.u_m[i]),
                    "dl": _polar(self.coeff_dl[i]),
                    "ul": _polar(self.coeff_ul[i]),
                }
                for i in range(self.geometry.n)
            ],
        }


@dataclass(frozen=True)
class RadiationPattern:
    theta: np.ndarray
    mag: np.ndarray
    mag_db: np.ndarray

    def rows(self):
        return [
            {"theta": float(t), "mag": float(m), "mag_db": float(db)}
            for t, m, db in zip(self.theta, self.mag, self.mag_db)
        ]


def _polar(c: complex) -> dict:
    return {"mag": float(abs(c)), "phase_deg": float(np.degrees(np.angle(c)))}


def wavelength_mm(f: float) -> float:
    return C_MM_PER_NS / f


def wavenumber(f: float) -> float:
    """Free-space wavenumber in rad/mm for ``f`` in GHz."""
    if f <= 0:
        raise ValueError(f"frequency must be > 0 GHz, got {f}")
    return 2 * np.pi * f / C_MM_PER_NS


def _wrap(phase):
    return np.angle(np.exp(1j * phase))


def array_factor(weights, geometry: SurfaceGeometry, f: float, theta):
    """Complex array factor at ``theta`` (deg, scalar or array)."""
    a = np.asarray(weights, dtype=complex)
    if a.shape != (geometry.n,):
        raise ValueError(f"got {a.size} weights for a {geometry.n}-element array")
    th = np.radians(np.asarray(theta, dtype=float))
    n = np.arange(geometry.n)
    steer = np.exp(1j * wavenumber(f) * geometry.d * np.multiply.outer(np.sin(th), n))
    af = steer @ a
    return complex(af) if np.ndim(af) == 0 else af


def progressive_phase(geometry: SurfaceGeometry, f: float, theta: float) -> np.ndarray:
    """Element phases that point a coherent beam at ``theta``."""
    n = np.arange(geometry.n)
    return -wavenumber(f) * geometry.d * n * np.sin(np.radians(theta))


def _band_freq(config: SurfaceConfig, f: Union[float, str]) -> tuple[Band, float]:
    if isinstance(f, str):
        band: Band = f  # type: ignore[assignment]
        return band, config.band_frequency(band)
    band = "dl" if abs(f - config.f_dl) <= abs(f - config.f_ul) else "ul"
    return band, float(f)


def efficiency(config: SurfaceConfig, f: Union[float, str], theta) -> float:
    """Amplitude fraction ``|AF(theta)| / n``.

    ``f`` is a band name ("dl"/"ul") or a frequency in GHz; a frequency picks
    the coefficients of the closer design band.
    """
    band, freq = _band_freq(config, f)
    af = array_factor(config.weights(band), config.geometry, freq, theta)
    eff = np.abs(af) / config.geometry.n
    return float(eff) if np.ndim(eff) == 0 else eff


def radiation_pattern(config: SurfaceConfig, f: Union[float, str], theta_grid) -> RadiationPattern:
    th = np.asarray(theta_grid, dtype=float)
    if th.size == 0:
        raise ValueError("theta grid is empty")
    mag = np.atleast_1d(efficiency(config, f, th))
    with np.errstate(divide="ignore"):
        mag_db = 20 * np.log10(mag)
    return RadiationPattern(theta=np.atleast_1d(th), mag=mag, mag_db=mag_db)


def main_lobe(config: SurfaceConfig, f: Union[float, str], lo: float = -90.0, hi: float = 90.0,
              step: float = 0.1) -> float:
    """Angle (deg) of the global maximum of |AF| on a uniform scan grid."""
    th = np.arange(lo, hi + step / 2, step)
    mag = efficiency(config, f, th)
    return float(th[int(np.argmax(mag))])


def _offset_grid(n_bins: int) -> np.ndarray:
    return np.arange(n_bins) * 2 * np.pi / n_bins


def _config_from_indices(codebook: Codebook, geometry: SurfaceGeometry, idx: np.ndarray,
                         metadata: dict) -> SurfaceConfig:
    bias = codebook.biases()[idx]
    return SurfaceConfig(
        u_e=bias[:, 0].copy(),
        u_m=bias[:, 1].copy(),
        coeff_dl=codebook.coeffs("dl")[idx],
        coeff_ul=codebook.coeffs("ul")[idx],
        mode=codebook.mode,
        geometry=geometry,
        f_dl=codebook.f_dl,
        f_ul=codebook.f_ul,
        metadata=metadata,
    )


def _steering_vector(geometry: SurfaceGeometry, f: float, theta: float) -> np.ndarray:
    n = np.arange(geometry.n)
    return np.exp(1j * wavenumber(f) * geometry.d * n * np.sin(np.radians(theta)))


def _refine_single_beam(cands: list[np.ndarray], steers: list[np.ndarray], idx: np.ndarray,
                        ghosts: list[list[np.ndarray]] | None = None, penalty: float = 0.0,
                        max_sweeps: int = 25) -> np.ndarray:
    """Coordinate ascent on the weakest band's ``|AF|`` at the target.

    ``cands[b]`` holds the codebook coefficients for band b and ``steers[b]``
    the steering vector toward the target; ``ghosts[b]`` are steering
    vectors toward directions whose lobes are subtracted with weight
    ``penalty``.  Each element in turn switches to its best entry until a
    sweep changes nothing.
    """
    idx = idx.copy()
    ghosts = ghosts if ghosts and penalty > 0 else [[] for _ in cands]
    # per band: list of (steering vector, per-element terms, running total, sign)
    probes = []
    for c, s, gs in zip(cands, steers, ghosts):
        band = [(s, 1.0)] + [(g, -penalty) for g in gs]
        probes.append([[v, c[idx] * v, None, w] for v, w in band])
        for pr in probes[-1]:
            pr[2] = pr[1].sum()

    def objective(k):
        vals = None
        for c, band in zip(cands, probes):
            v = 0.0
            for vec, terms, total, w in band:
                v = v + w * np.abs(total - terms[k] + c * vec[k])
            vals = v if vals is None else np.minimum(vals, v)
        return vals

    for _ in range(max_sweeps):
        changed = False
        for k in range(idx.size):
            vals = objective(k)
            j = int(np.argmax(vals))
            if j != idx[k] and vals[j] > vals[idx[k]] + 1e-12:
                idx[k] = j
                for c, band in zip(cands, probes):
                    for pr in band:
                        new = c[j] * pr[0][k]
                        pr[2] += new - pr[1][k]
                        pr[1][k] = new
                changed = True
        if not changed:
            break
    return idx


def cross_band_ghost(theta: float, f_from: float, f_to: float) -> float | None:
    """Direction band ``f_to`` would point if it copied band ``f_from``'s phase ramp."""
    s = np.sin(np.radians(theta)) * f_from / f_to
    return float(np.degrees(np.arcsin(s))) if abs(s) < 1 else None


POINTING_TOL_DEG = 2.0
GHOST_PENALTIES = (0.25, 0.5, 0.75, 1.0, 1.5, 2.0)
JOINT_STARTS = 32


def steering_config(codebook: Codebook, geometry: SurfaceGeometry, theta_target: float,
                    band_policy: BandPolicy = "joint", refine: bool = True) -> SurfaceConfig:
    """Codebook assignment that points a single beam at ``theta_target``.

    Each element first takes the entry with the smallest policy-weighted
    squared wrapped phase error against the band's linear phase ramp.  The
    ramp is only defined up to a common constant, which is picked per band
    from the codebook's bin centres to maximize ``|AF|`` at the target.

    With ``refine`` the assignment is polished by coordinate ascent on
    ``|AF(theta_target)|`` (the weaker band's, for the joint policy).  For the
    joint policy the main lobes are then checked; if one of them has jumped
    to the other band's ghost direction, the next-best ramp offsets are
    refined in turn, and failing that the ghost is penalized at increasing
    weight.
    """
    if band_policy not in POLICY_WEIGHTS:
        raise ValueError(f"unknown band policy {band_policy!r}")
    w_dl, w_ul = POLICY_WEIGHTS[band_policy]
    offsets = _offset_grid(codebook.n_bins)
    bands = [(b, w) for b, w in (("dl", w_dl), ("ul", w_ul)) if w > 0]
    freqs = {"dl": codebook.f_dl, "ul": codebook.f_ul}

    # (offset, element, entry) squared wrapped phase error per band
    errs = []
    for band, w in bands:
        desired = progressive_phase(geometry, freqs[band], theta_target)
        ph = np.angle(codebook.coeffs(band))
        e = _wrap(ph[None, None, :] - desired[None, :, None] - offsets[:, None, None])
        errs.append(w * e**2)
    if len(errs) == 1:
        idx = np.argmin(errs[0], axis=-1)
    else:
        idx = np.argmin(errs[0][:, None] + errs[1][None, :], axis=-1).reshape(-1, geometry.n)

    steers = [_steering_vector(geometry, freqs[b], theta_target) for b, _ in bands]
    cands = [codebook.coeffs(b) for b, _ in bands]
    score = np.min([np.abs(c[idx] @ s) for c, s in zip(cands, steers)], axis=0)
    order = np.argsort(-score, kind="stable")
    start = idx[order[0]]
    meta = {"kind": "steer", "theta_target": float(theta_target), "band_policy": band_policy}
    if not refine:
        return _config_from_indices(codebook, geometry, start, meta)

    chosen = _refine_single_beam(cands, steers, start)
    if len(bands) == 1:
        return _config_from_indices(codebook, geometry, chosen, meta)

    ghosts = []
    for b, _ in bands:
        other = "ul" if b == "dl" else "dl"
        g = cross_band_ghost(theta_target, freqs[other], freqs[b])
        far = g is not None and abs(g - theta_target) > POINTING_TOL_DEG
        ghosts.append([_steering_vector(geometry, freqs[b], g)] if far else [])

    def pointing_error(cfg):
        return max(abs(main_lobe(cfg, b) - theta_target) for b, _ in bands)

    # other ramp offsets often avoid the ghost without any penalty
    for k in order[:JOINT_STARTS]:
        cand = _refine_single_beam(cands, steers, idx[k]) if k != order[0] else chosen
        cfg = _config_from_indices(codebook, geometry, cand, dict(meta))
        if pointing_error(cfg) <= POINTING_TOL_DEG:
            return cfg

    # if no penalty meets the pointing tolerance, keep the strongest weak band
    best, best_eff = None, -np.inf
    for penalty in (0.0,) + GHOST_PENALTIES:
        if penalty > 0:
            chosen = _refine_single_beam(cands, steers, start, ghosts, penalty)
        cfg = _config_from_indices(codebook, geometry, chosen, dict(meta))
        if pointing_error(cfg) <= POINTING_TOL_DEG:
            return cfg
        eff = min(efficiency(cfg, b, theta_target) for b, _ in bands)
        if eff > best_eff:
            best, best_eff = cfg, eff
    return best


def _amplitude_curve(coeffs: np.ndarray):
    """Periodic piecewise-linear |c| as a function of phase over the codebook."""
    ph = np.angle(coeffs)
    order = np.argsort(ph)
    ph, amp = ph[order], np.abs(coeffs)[order]
    xp = np.r_[ph - 2 * np.pi, ph, ph + 2 * np.pi]
    fp = np.r_[amp, amp, amp]
    return lambda x: np.interp(_wrap(x), xp, fp)


def _fair_phase_ascent(coeffs: np.ndarray, steers: np.ndarray, weights: np.ndarray, phi: np.ndarray,
                       iters: int = 2000, lr: float = 0.05) -> np.ndarray:
    """Gradient ascent of ``sum_i w_i log|AF_i|^2`` over continuous element phases.

    Each element's amplitude follows the codebook's amplitude-vs-phase curve.
    At the optimum the lobe powers are proportional to the weights.
    """
    amp = _amplitude_curve(coeffs)
    h = 1e-4
    phi = phi.copy()
    for _ in range(iters):
        a_mag = amp(phi)
        rot = np.exp(1j * phi)
        da = ((amp(phi + h) - amp(phi - h)) / (2 * h) + 1j * a_mag) * rot
        af = steers @ (a_mag * rot)
        grad = 2 * np.real(np.conj(af)[:, None] * steers * da[None, :]) / np.abs(af)[:, None] ** 2
        phi += lr * (weights[:, None] * grad).sum(axis=0)
    return amp(phi) * np.exp(1j * phi)


def _refine_split(cands: list[np.ndarray], steers: list[np.ndarray], weights: np.ndarray,
                  idx: np.ndarray, max_sweeps: int = 40) -> np.ndarray:
    """Coordinate ascent on ``min over (band, beam) of |AF|^2 / weight``."""
    idx = idx.copy()
    terms = [[c[idx] * s for s in band] for c, band in zip(cands, steers)]
    totals = [[t.sum() for t in band] for band in terms]
    for _ in range(max_sweeps):
        changed = False
        for k in range(idx.size):
            vals = np.min([
                np.abs(totals[b][i] - terms[b][i][k] + c * s[k]) ** 2 / weights[i]
                for b, c in enumerate(cands) for i, s in enumerate(steers[b])
            ], axis=0)
            j = int(np.argmax(vals))
            if j != idx[k] and vals[j] > vals[idx[k]] + 1e-12:
                idx[k] = j
                for b, c in enumerate(cands):
                    for i, s in enumerate(steers[b]):
                        new = c[j] * s[k]
                        totals[b][i] += new - terms[b][i][k]
                        terms[b][i][k] = new
                changed = True
        if not changed:
            break
    return idx


def split_score(config: SurfaceConfig, spec: BeamSpec) -> float:
    """Smallest ``|AF(theta_i)|^2 / weight_i`` over beams and policy bands."""
    w = POLICY_WEIGHTS[spec.band_policy]
    return min(
        efficiency(config, band, b.theta) ** 2 / b.weight
        for band, wb in zip(("dl", "ul"), w) if wb > 0
        for b in spec.beams
    )


def split_config(codebook: Codebook, geometry: SurfaceGeometry, spec: BeamSpec,
                 refine: bool = True) -> SurfaceConfig:
    """Codebook assignment radiating several beams with the requested power split.

    The target profile per band is ``sum_i sqrt(w_i) exp(j phi_i,n)``, scaled
    to unit peak amplitude, and each element takes the codebook entry closest
    to it in the complex plane.  With ``refine`` the result is improved in two
    stages: a continuous-phase ascent that balances lobe powers against the
    weights (single-band policies only), then coordinate ascent on the
    weakest weight-normalized lobe.  The better of the plain and refined
    assignments is returned.

    Beams closer than one beamwidth are allowed; they are flagged under
    ``metadata["warnings"]``.
    """
    if len(spec.beams) == 1:
        cfg = steering_config(codebook, geometry, spec.beams[0].theta, spec.band_policy, refine)
        cfg.metadata.update(kind="split", beams=[[spec.beams[0].theta, 1.0]])
        return cfg
    w_pol = POLICY_WEIGHTS[spec.band_policy]
    bands = [(b, w) for b, w in zip(("dl", "ul"), w_pol) if w > 0]
    freqs = {"dl": codebook.f_dl, "ul": codebook.f_ul}
    thetas = np.array([b.theta for b in spec.beams])
    weights = np.array([b.weight for b in spec.beams])

    warnings = []
    bw = max(geometry.beamwidth(freqs[b]) for b, _ in bands)
    for i in range(len(thetas)):
        for j in range(i + 1, len(thetas)):
            if abs(thetas[i] - thetas[j]) < bw:
                warnings.append(
                    f"beams at {thetas[i]:g} and {thetas[j]:g} deg are closer than "
                    f"one beamwidth ({bw:.2f} deg); lobes will merge"
                )

    cands = [codebook.coeffs(b) for b, _ in bands]
    steers = [np.array([_steering_vector(geometry, freqs[b], t) for t in thetas]) for b, _ in bands]
    targets = []
    for s in steers:
        tgt = (np.sqrt(weights)[:, None] * np.conj(s)).sum(axis=0)
        targets.append(tgt / np.abs(tgt).max())
    dist = sum(w * np.abs(c[None, :] - t[:, None]) ** 2 for (_, w), c, t in zip(bands, cands, targets))
    idx = np.argmin(dist, axis=1)

    meta = {
        "kind": "split",
        "beams": [[float(t), float(w)] for t, w in zip(thetas, weights)],
        "band_policy": spec.band_policy,
        "warnings": warnings,
    }
    best = _config_from_indices(codebook, geometry, idx, dict(meta))
    if not refine:
        return best
    starts = [idx]
    if len(bands) == 1:
        shaped = _fair_phase_ascent(cands[0], steers[0], weights, np.angle(targets[0]))
        starts.append(np.argmin(np.abs(cands[0][None, :] - shaped[:, None]), axis=1))
    best_score = split_score(best, spec)
    for start in starts:
        cfg = _config_from_indices(codebook, geometry, _refine_split(cands, steers, weights, start),
                                   dict(meta))
        score = split_score(cfg, spec)
        if score > best_score:
            best, best_score = cfg, score
    return best
