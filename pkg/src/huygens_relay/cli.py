"""Command-line entry point: one subcommand per experiment.

Each command reads an optional JSON scenario (``--config``), writes a CSV or
JSON artifact (``--out``, a file or a directory), and prints a one-line
summary.  Exit status is 0 on success, 1 for invalid configuration or
arguments, and 2 for scenario, calibration, or coverage failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .beamform import BeamSpec, efficiency, main_lobe, radiation_pattern, split_config, \
    steering_config
from .circuit import atom_resonances, cell_to_dict
from .config import ScenarioConfig, load_config
from .errors import BiasRangeError, CalibrationError, ConfigError, CoverageError, ScenarioError
from .export import csv_text, json_text, write_text
from .link import SWEEP_HEADER, baseline_budget, contiguous_span, link_budget, snr_sweep
from .orbit import TRACE_HEADER, simulate_handover
from .pattern import codebook_to_dict, coverage_metrics, pattern_rows, transmission_phase_span

COMMANDS = ("calibrate", "pattern", "codebook", "steer", "split", "linkbudget", "snr-sweep", "pass",
            "handover")
DEFAULT_NAMES = {
    "calibrate": "calibrate.json",
    "pattern": "pattern.csv",
    "codebook": "codebook.json",
    "steer": "steer.json",
    "split": "split.json",
    "linkbudget": "linkbudget.json",
    "snr-sweep": "snr_sweep.csv",
    "pass": "pass.csv",
    "handover": "handover.csv",
}


class Result:
    def __init__(self, text: str, summary: str, table: str = ""):
        self.text, self.summary, self.table = text, summary, table


def _cmd_calibrate(cfg: ScenarioConfig, args) -> Result:
    cell = cfg.cell()
    v = cfg.calibration.v_mid
    res = {k: atom_resonances(getattr(cell, k), v) for k in ("electric", "magnetic")}
    doc = {
        "cell": cell_to_dict(cell),
        "resonances_ghz": {k: {"outer": r[0], "inner": r[1]} for k, r in res.items()},
        "v_mid": v,
    }
    e = res["electric"]
    return Result(json_text(doc), f"f_dl={e[0]:.4f} GHz, f_ul={e[1]:.4f} GHz at v_mid={v:g} V")


def _cmd_pattern(cfg: ScenarioConfig, args) -> Result:
    p = cfg.pattern()
    text = csv_text(("u_e", "u_m", "band", "mode", "mag", "phase_deg"), pattern_rows(p))
    span = transmission_phase_span(p, "dl")
    return Result(text, f"points={p.grid.shape[0] * p.grid.shape[1]}, dl_transmit_span={span:.0f} deg")


def _cmd_codebook(cfg: ScenarioConfig, args) -> Result:
    cb = cfg.codebook_for("ul_only" if cfg.codebook.band == "ul" else "dl_only")
    m = coverage_metrics(cb)
    return Result(
        json_text(codebook_to_dict(cb)),
        f"bins={cb.n_bins - m.gap_count}/{cb.n_bins}, min_amp={m.min_amp:.3f}, mean_amp={m.mean_amp:.3f}",
    )


def _lobes(config, policy_bands) -> dict:
    return {b: main_lobe(config, b) for b in policy_bands}


def _cmd_steer(cfg: ScenarioConfig, args) -> Result:
    theta = cfg.steer.theta if args.theta is None else args.theta
    if not abs(theta) < 90:
        raise ConfigError(f"--theta must satisfy |theta| < 90, got {theta}", key="steer.theta")
    policy = cfg.steer.band_policy
    cb = cfg.codebook_for(policy)
    geom = cfg.surface_geometry()
    sc = steering_config(cb, geom, theta, policy)
    effs = {b: efficiency(sc, b, theta) for b in ("dl", "ul")}
    lobes = _lobes(sc, ("dl", "ul"))
    grid = np.arange(-90.0, 90.0 + 1e-9, cfg.steer.pattern_step)
    doc = sc.to_dict()
    doc["efficiency"] = effs
    doc["main_lobe_deg"] = lobes
    doc["pattern"] = {b: radiation_pattern(sc, b, grid).rows() for b in ("dl", "ul")}
    return Result(
        json_text(doc),
        f"eff_dl={effs['dl']:.3f}, eff_ul={effs['ul']:.3f}, "
        f"lobe_dl={lobes['dl']:.1f}°, lobe_ul={lobes['ul']:.1f}°",
    )


def _parse_beams(text: str) -> tuple[tuple[float, float], ...]:
    beams = []
    for part in text.split(","):
        try:
            theta, weight = part.split(":")
            beams.append((float(theta), float(weight)))
        except ValueError as exc:
            raise ConfigError(f"--beams entries must look like THETA:WEIGHT, got {part!r}",
                              key="split.beams") from exc
    return tuple(beams)


def _cmd_split(cfg: ScenarioConfig, args) -> Result:
    if args.beams:
        try:
            spec = BeamSpec(_parse_beams(args.beams), cfg.split.band_policy)
        except ValueError as exc:
            raise ConfigError(f"--beams: {exc}", key="split.beams") from exc
    else:
        spec = cfg.beam_spec()
    cb = cfg.codebook_for(spec.band_policy)
    sc = split_config(cb, cfg.surface_geometry(), spec)
    band = "ul" if spec.band_policy == "ul_only" else "dl"
    lobes = [{"theta": b.theta, "weight": b.weight, "eff": efficiency(sc, band, b.theta),
              "power_db": 20 * np.log10(efficiency(sc, band, b.theta))} for b in spec.beams]
    doc = sc.to_dict()
    doc["lobes"] = lobes
    doc["band"] = band
    summary = ", ".join(f"lobe@{lb['theta']:g}°={lb['power_db']:.2f} dB" for lb in lobes)
    if sc.metadata.get("warnings"):
        summary += f" ({len(sc.metadata['warnings'])} warning)"
    return Result(json_text(doc), summary)


def _budget_doc(res) -> dict:
    return {"p_rx_dbm": res.p_rx, "snr_db": res.snr, "breakdown": [[k, v] for k, v in res.breakdown]}


def _cmd_linkbudget(cfg: ScenarioConfig, args) -> Result:
    noise = cfg.noise_model()
    doc, lines = {}, []
    for band in ("dl", "ul"):
        inp = cfg.link_inputs(band)
        entry = {
            "f_ghz": inp.f,
            "surface": _budget_doc(link_budget(inp, noise)),
            "free_space": _budget_doc(baseline_budget("free_space", inp, noise)),
            "brick_wall": _budget_doc(baseline_budget("brick_wall", inp, noise)),
        }
        doc[band] = entry
        lines.append(f"[{band} @ {inp.f:g} GHz]")
        for k, v in entry["surface"]["breakdown"]:
            lines.append(f"  {k:<14}{v:>10.2f} dB")
        lines.append(f"  {'p_rx':<14}{entry['surface']['p_rx_dbm']:>10.2f} dBm")
    doc["noise_dbm"] = noise.power_dbm
    dl = doc["dl"]
    gain = dl["surface"]["snr_db"] - dl["free_space"]["snr_db"]
    return Result(
        json_text(doc),
        f"p_rx={dl['surface']['p_rx_dbm']:.2f} dBm, snr={dl['surface']['snr_db']:.2f} dB, "
        f"vs_free_space={gain:+.2f} dB",
        "\n".join(lines) + "\n",
    )


def _cmd_snr_sweep(cfg: ScenarioConfig, args) -> Result:
    sw = cfg.sweep
    cb = cfg.codebook_for(sw.band_policy)
    angles = sw.angles()
    rows = snr_sweep(sw.scenario, angles, sw.sides, cb, cfg.surface_geometry(), cfg.link_inputs("dl"),
                     cfg.noise_model(), sw.band_policy)
    side = cfg.geometry.side
    sel = [r for r in rows if abs(r.side_m - side) < 1e-12] or [r for r in rows if r.side_m == rows[-1].side_m]
    gains = [r.snr_db - r.snr_freespace_db for r in sel]
    span = contiguous_span([r.angle_deg for r in sel], [g > 0 for g in gains])
    broad = min(sel, key=lambda r: abs(r.angle_deg))
    return Result(
        csv_text(SWEEP_HEADER, (r.as_tuple() for r in rows)),
        f"side={sel[0].side_m:g} m, broadside_gain={broad.snr_db - broad.snr_freespace_db:+.2f} dB, "
        f"span_above_free_space={span:g}°",
    )


def _cmd_pass(cfg: ScenarioConfig, args) -> Result:
    primary, secondary = cfg.passes(args.seed)
    rows = [(p.name, *r) for p in (primary, secondary) for r in p.rows()]
    return Result(
        csv_text(("satellite", "t_s", "elev_deg", "slant_km", "steer_deg"), rows),
        f"duration={primary.duration:.1f} s, max_elev={primary.elevation.max():.1f}°, "
        f"min_slant={primary.slant_range.min():.1f} km",
    )


def _cmd_handover(cfg: ScenarioConfig, args) -> Result:
    primary, secondary = cfg.passes(args.seed)
    policy = cfg.handover_policy(args.mode)
    bp = cfg.handover.band_policy
    trace = simulate_handover(primary, secondary, policy, cfg.codebook_for(bp), cfg.surface_geometry(),
                              cfg.link_inputs("dl"), cfg.noise_model(), bp)
    summary = f"mode={trace.mode}, outage={trace.outage_duration:g} s, min_snr={trace.min_snr:.2f} dB"
    if trace.split_lobe_loss_db:
        worst = min(trace.split_lobe_loss_db.values())
        summary += f", even_split_lobe_loss={worst:.2f} dB"
    return Result(csv_text(TRACE_HEADER, (r.as_tuple() for r in trace.rows)), summary)


HANDLERS: dict[str, Callable[[ScenarioConfig, argparse.Namespace], Result]] = {
    "calibrate": _cmd_calibrate,
    "pattern": _cmd_pattern,
    "codebook": _cmd_codebook,
    "steer": _cmd_steer,
    "split": _cmd_split,
    "linkbudget": _cmd_linkbudget,
    "snr-sweep": _cmd_snr_sweep,
    "pass": _cmd_pass,
    "handover": _cmd_handover,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON scenario file (defaults apply when omitted)")
    common.add_argument("--out", help="output file, or directory for the default file name")
    common.add_argument("--seed", type=int, default=0, help="seed for trajectory jitter")
    common.add_argument("--quiet", action="store_true", help="suppress the summary line")
    parser = argparse.ArgumentParser(prog="huygens-relay", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "steer":
            p.add_argument("--theta", type=float, help="target angle from broadside (deg)")
        elif name == "split":
            p.add_argument("--beams", help="comma-separated THETA:WEIGHT pairs, e.g. -45:0.5,45:0.5")
        elif name == "handover":
            p.add_argument("--mode", choices=("hard", "soft"), help="override handover.mode")
    return parser


def _resolve_out(command: str, out: str | None) -> Path:
    if out is None:
        return Path(DEFAULT_NAMES[command])
    p = Path(out)
    if p.is_dir() or out.endswith(("/", "\\")):
        return p / DEFAULT_NAMES[command]
    return p


def run(command: str, config_path: str | None = None, output_path: str | None = None,
        argv_extra: Sequence[str] = ()) -> int:
    """Run one subcommand; returns the process exit status."""
    argv = [command]
    if config_path is not None:
        argv += ["--config", str(config_path)]
    if output_path is not None:
        argv += ["--out", str(output_path)]
    return main([*argv, *argv_extra])


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        result = HANDLERS[args.command](cfg, args)
        path = write_text(_resolve_out(args.command, args.out), result.text)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ScenarioError, CoverageError, CalibrationError, BiasRangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        if result.table:
            sys.stdout.write(result.table)
        print(f"{args.command}: {result.summary} -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
