"""Lumped-circuit model of the varactor-tuned, bi-resonant Huygens cell.

Units follow RF bench conventions: inductance in nH, capacitance in pF,
frequency in GHz, resistance in ohms, bias in volts.  Every function
broadcasts over numpy arrays so bias/frequency grids can be evaluated in a
single call.

Each meta-atom is two series-RLC branches in parallel, both loaded by the
same varactor.  The outer branch sets the downlink resonance; the inner one
is reached through an RF choke and sets the uplink resonance.  The electric
atom becomes a normalized shunt sheet admittance ``y``, the magnetic atom
(by duality) a normalized series sheet impedance ``z``; the pair is then a
symmetric two-port with

    t = (4 - y z) / ((2 + y)(2 + z)),    r = 2 (z - y) / ((2 + y)(2 + z)).
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Literal

import numpy as np

from .errors import BiasRangeError, CalibrationError

ETA0 = 376.73  # free-space wave impedance, ohm

# Lumped-to-sheet coupling.  The varactor's elastance swing only moves the
# branch reactance by ~25 ohm, so normalizing by eta0 alone would pin the
# cell near its resonant phase; this factor plays the role of the cell's
# gap/period geometry ratio.
DEFAULT_SHEET_SCALE = 0.0133

_NANO = 1e-9
_PICO = 1e-12
_GIGA = 1e9

AtomKind = Literal["electric", "magnetic"]


@dataclass(frozen=True)
class VaractorModel:
    """Reverse-biased junction varactor, C(v) = c_j0 / (1 + v/v_j)**m + c_par."""

    c_j0: float = 2.35
    v_j: float = 0.8
    m: float = 0.5
    c_par: float = 0.05
    r_s: float = 0.5
    v_min: float = 0.0
    v_max: float = 20.0

    def __post_init__(self):
        if not self.c_j0 > 0:
            raise ValueError(f"c_j0 must be > 0, got {self.c_j0}")
        if not self.v_j > 0:
            raise ValueError(f"v_j must be > 0, got {self.v_j}")
        if not 0 < self.m <= 2:
            raise ValueError(f"m must lie in (0, 2], got {self.m}")
        if self.c_par < 0 or self.r_s < 0:
            raise ValueError("c_par and r_s must be non-negative")
        if not self.v_min < self.v_max:
            raise ValueError(f"v_min ({self.v_min}) must be < v_max ({self.v_max})")
        if self.v_min <= -self.v_j:
            # forward conduction: the junction law is undefined there
            raise ValueError(f"v_min must exceed -v_j ({-self.v_j})")


@dataclass(frozen=True)
class ResonatorBranch:
    l: float
    c_fixed: float
    r: float = 0.0

    def __post_init__(self):
        if not self.l > 0:
            raise ValueError(f"branch inductance must be > 0, got {self.l}")
        if not self.c_fixed > 0:
            raise ValueError(f"branch fixed capacitance must be > 0, got {self.c_fixed}")
        if self.r < 0:
            raise ValueError(f"branch resistance must be >= 0, got {self.r}")


@dataclass(frozen=True)
class MetaAtomCircuit:
    outer: ResonatorBranch
    inner: ResonatorBranch
    varactor: VaractorModel = field(default_factory=VaractorModel)
    l_choke: float = 0.0
    kind: AtomKind = "electric"

    def __post_init__(self):
        if self.l_choke < 0:
            raise ValueError(f"l_choke must be >= 0, got {self.l_choke}")
        if self.kind not in ("electric", "magnetic"):
            raise ValueError(f"unknown meta-atom kind {self.kind!r}")


@dataclass(frozen=True)
class HuygensCell:
    electric: MetaAtomCircuit
    magnetic: MetaAtomCircuit
    sheet_scale: float = DEFAULT_SHEET_SCALE

    def __post_init__(self):
        if self.electric.kind != "electric" or self.magnetic.kind != "magnetic":
            raise ValueError("HuygensCell needs an electric and a magnetic atom in that order")
        if not self.sheet_scale > 0:
            raise ValueError(f"sheet_scale must be > 0, got {self.sheet_scale}")

    def lossless(self) -> HuygensCell:
        """Copy of the cell with every branch resistance set to zero."""
        def strip(atom: MetaAtomCircuit) -> MetaAtomCircuit:
            return MetaAtomCircuit(
                outer=ResonatorBranch(atom.outer.l, atom.outer.c_fixed, 0.0),
                inner=ResonatorBranch(atom.inner.l, atom.inner.c_fixed, 0.0),
                varactor=atom.varactor,
                l_choke=atom.l_choke,
                kind=atom.kind,
            )
        return HuygensCell(strip(self.electric), strip(self.magnetic), self.sheet_scale)


@dataclass(frozen=True)
class CellResponse:
    """Complex transmission/reflection of one cell; fields may be arrays."""

    t: Any
    r: Any
    frequency: float
    u_e: Any
    u_m: Any

    def __post_init__(self):
        t2 = np.abs(self.t) ** 2
        r2 = np.abs(self.r) ** 2
        if np.any(t2 + r2 > 1 + 1e-9):
            raise ValueError("non-passive cell response: |t|^2 + |r|^2 > 1")


def varactor_capacitance(model: VaractorModel, v):
    """Junction capacitance in pF at reverse bias ``v`` (scalar or array)."""
    va = np.asarray(v, dtype=float)
    if np.any(va < model.v_min) or np.any(va > model.v_max) or np.any(np.isnan(va)):
        raise BiasRangeError(
            f"bias {v!r} V outside allowed interval [{model.v_min}, {model.v_max}] V"
        )
    c = model.c_j0 / (1.0 + va / model.v_j) ** model.m + model.c_par
    return float(c) if np.ndim(c) == 0 else c


def series_capacitance(c1, c2):
    return c1 * c2 / (c1 + c2)


def resonant_frequency(l, c):
    """1 / (2 pi sqrt(L C)) in GHz for ``l`` in nH and ``c`` in pF."""
    la = np.asarray(l, dtype=float)
    ca = np.asarray(c, dtype=float)
    if np.any(la <= 0) or np.any(ca <= 0):
        raise ValueError("inductance and capacitance must be positive")
    f = 1.0 / (2 * np.pi * np.sqrt(la * _NANO * ca * _PICO)) / _GIGA
    return float(f) if np.ndim(f) == 0 else f


def _omega(f):
    fa = np.asarray(f, dtype=float)
    if np.any(fa <= 0):
        raise ValueError(f"frequency must be > 0 GHz, got {f!r}")
    return 2 * np.pi * fa * _GIGA


def branch_impedance(branch: ResonatorBranch, c_var, f, extra_l: float = 0.0):
    """Series RLC impedance with the varactor in series with ``c_fixed``.

    ``extra_l`` (nH) adds series inductance, used for the choke feeding the
    inner ring.
    """
    w = _omega(f)
    ca = np.asarray(c_var, dtype=float)
    if np.any(ca <= 0):
        raise ValueError("varactor capacitance must be positive")
    c_tot = series_capacitance(branch.c_fixed, ca) * _PICO
    x = w * (branch.l + extra_l) * _NANO - 1.0 / (w * c_tot)
    return branch.r + 1j * x


def atom_admittance(atom: MetaAtomCircuit, v, f):
    """Parallel admittance (S) of the outer branch and the choke-fed inner branch."""
    c_var = varactor_capacitance(atom.varactor, v)
    z_out = branch_impedance(atom.outer, c_var, f)
    z_in = branch_impedance(atom.inner, c_var, f, extra_l=atom.l_choke)
    return 1.0 / z_out + 1.0 / z_in


def atom_resonances(atom: MetaAtomCircuit, v) -> tuple[float, float]:
    """Series-resonance frequencies (GHz) of the outer and inner branches at bias ``v``."""
    c_var = varactor_capacitance(atom.varactor, v)
    f_out = resonant_frequency(atom.outer.l, series_capacitance(atom.outer.c_fixed, c_var))
    f_in = resonant_frequency(
        atom.inner.l + atom.l_choke, series_capacitance(atom.inner.c_fixed, c_var)
    )
    return f_out, f_in


def cell_sheet_parameters(cell: HuygensCell, u_e, u_m, f):
    """Normalized electric sheet admittance ``y`` and magnetic sheet impedance ``z``.

    The magnetic loop is the circuit dual of the electric one: its branch
    admittance maps onto a series sheet impedance Z_m = eta0^2 * Y_m, so both
    normalized quantities share the form ``sheet_scale * eta0 * Y``.
    """
    k = cell.sheet_scale * ETA0
    y = k * atom_admittance(cell.electric, u_e, f)
    z = k * atom_admittance(cell.magnetic, u_m, f)
    return y, z


def sheet_to_s(y, z):
    """Transmission and reflection of a shunt-y / series-z sheet pair."""
    den = (2.0 + y) * (2.0 + z)
    if np.any(den == 0):
        raise FloatingPointError("singular sheet pair: (2 + y)(2 + z) = 0")
    return (4.0 - y * z) / den, 2.0 * (z - y) / den


def cell_s_params(cell: HuygensCell, u_e, u_m, f: float) -> CellResponse:
    y, z = cell_sheet_parameters(cell, u_e, u_m, f)
    t, r = sheet_to_s(y, z)
    return CellResponse(t=t, r=r, frequency=f, u_e=u_e, u_m=u_m)


def _per_atom(value, name: str) -> dict[str, tuple[float, float]]:
    if isinstance(value, Mapping):
        try:
            return {kind: tuple(value[kind]) for kind in ("electric", "magnetic")}
        except KeyError as exc:
            raise ValueError(f"{name} mapping needs 'electric' and 'magnetic' keys") from exc
    pair = tuple(value)
    if len(pair) != 2:
        raise ValueError(f"{name} must be an (outer, inner) pair")
    return {"electric": pair, "magnetic": pair}


def calibrate(
    f_dl: float = 10.0,
    f_ul: float = 15.0,
    v_mid: float = 10.0,
    varactor: VaractorModel | None = None,
    fixed_caps=(0.1, 0.1),
    losses=(0.5, 0.5),
    l_choke: float = 0.5,
    sheet_scale: float = DEFAULT_SHEET_SCALE,
) -> HuygensCell:
    """Solve branch inductances so the cell is bi-resonant at ``v_mid``.

    ``fixed_caps`` and ``losses`` are (outer, inner) pairs in pF / ohm, or a
    mapping with ``"electric"`` and ``"magnetic"`` pairs.  The outer branch
    is tuned to ``f_dl``, the inner branch plus choke to ``f_ul``.
    """
    varactor = varactor or VaractorModel()
    if not f_dl < f_ul:
        raise ValueError(f"need f_dl < f_ul for a dual-band cell, got {f_dl} and {f_ul}")
    if f_dl <= 0:
        raise ValueError("frequencies must be positive")
    c_var = varactor_capacitance(varactor, v_mid)
    caps = _per_atom(fixed_caps, "fixed_caps")
    rs = _per_atom(losses, "losses")

    atoms = {}
    for kind in ("electric", "magnetic"):
        c_out, c_in = caps[kind]
        l_out = _solve_inductance(f_dl, series_capacitance(c_out, c_var))
        l_in = _solve_inductance(f_ul, series_capacitance(c_in, c_var)) - l_choke
        if not (l_out > 0 and l_in > 0):
            raise CalibrationError(
                f"{kind} atom: solved inductances outer={l_out:.4g} nH, "
                f"inner={l_in:.4g} nH (choke {l_choke} nH) are not all positive"
            )
        atoms[kind] = MetaAtomCircuit(
            outer=ResonatorBranch(l_out, c_out, rs[kind][0]),
            inner=ResonatorBranch(l_in, c_in, rs[kind][1]),
            varactor=varactor,
            l_choke=l_choke,
            kind=kind,
        )
    return HuygensCell(atoms["electric"], atoms["magnetic"], sheet_scale)


def _solve_inductance(f_ghz: float, c_pf: float) -> float:
    """L (nH) resonating with ``c_pf`` at ``f_ghz``."""
    w = 2 * math.pi * f_ghz * _GIGA
    return 1.0 / (w * w * c_pf * _PICO) / _NANO


# -- JSON round-trip -------------------------------------------------------

def _strict(cls, data: Mapping[str, Any], where: str):
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ValueError(f"{where}: unknown keys {sorted(unknown)}")
    return data


def varactor_from_dict(data: Mapping[str, Any]) -> VaractorModel:
    return VaractorModel(**_strict(VaractorModel, data, "varactor"))


def atom_from_dict(data: Mapping[str, Any]) -> MetaAtomCircuit:
    d = dict(_strict(MetaAtomCircuit, data, "meta-atom"))
    d["outer"] = ResonatorBranch(**_strict(ResonatorBranch, d["outer"], "outer"))
    d["inner"] = ResonatorBranch(**_strict(ResonatorBranch, d["inner"], "inner"))
    if "varactor" in d:
        d["varactor"] = varactor_from_dict(d["varactor"])
    return MetaAtomCircuit(**d)


def cell_to_dict(cell: HuygensCell) -> dict[str, Any]:
    return asdict(cell)


def cell_from_dict(data: Mapping[str, Any]) -> HuygensCell:
    d = dict(_strict(HuygensCell, data, "cell"))
    return HuygensCell(
        electric=atom_from_dict(d["electric"]),
        magnetic=atom_from_dict(d["magnetic"]),
        sheet_scale=d.get("sheet_scale", DEFAULT_SHEET_SCALE),
    )
