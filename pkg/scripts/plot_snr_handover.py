"""SNR against angle and surface size, and soft vs hard handover traces."""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from huygens_relay.config import load_config
from huygens_relay.link import snr_sweep
from huygens_relay.orbit import simulate_handover


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config")
    ap.add_argument("--out", default="snr_handover.png")
    args = ap.parse_args()
    cfg = load_config(args.config)
    geom = cfg.surface_geometry()
    cb = cfg.codebook_for("dl_only")
    fig, axes = plt.subplots(1, 3, figsize=(15, 4.2), constrained_layout=True)
    for ax, scenario in zip(axes[:2], ("steer_out", "vary_incident")):
        rows = snr_sweep(scenario, cfg.sweep.angles(), cfg.sweep.sides, cb, geom, cfg.link_inputs(),
                         cfg.noise_model())
        for side in cfg.sweep.sides:
            sel = [r for r in rows if r.side_m == side]
            ax.plot([r.angle_deg for r in sel], [r.snr_db for r in sel], label=f"{side:g} m surface")
        ax.axhline(rows[0].snr_freespace_db, color="k", ls="--", label="free space")
        ax.axhline(rows[0].snr_brick_db, color="brown", ls=":", label="brick wall")
        ax.set(xlabel="angle (deg)", ylabel="SNR (dB)", title=scenario)
        ax.legend(fontsize=8)

    primary, secondary = cfg.passes(seed=0)
    ax = axes[2]
    for mode, style in (("hard", "-"), ("soft", "--")):
        tr = simulate_handover(primary, secondary, cfg.handover_policy(mode), cb, geom, cfg.link_inputs(),
                               cfg.noise_model())
        t = np.array([r.t for r in tr.rows])
        s = np.array([r.snr_db for r in tr.rows])
        ax.step(t, np.where(np.isfinite(s), s, np.nan), style, where="post",
                label=f"{mode} (outage {tr.outage_duration:g} s)")
        if mode == "hard":
            ax.axvspan(tr.switch_start, tr.switch_start + cfg.handover.switch_time, color="red", alpha=0.3)
    ax.set(xlabel="time (s)", ylabel="SNR (dB)", title="handover")
    ax.legend(fontsize=8)
    fig.savefig(args.out, dpi=130)
    print(args.out)


if __name__ == "__main__":
    main()
