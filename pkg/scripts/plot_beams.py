"""Steering efficiency across the field of view and split-beam patterns."""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from huygens_relay.beamform import Beam, BeamSpec, efficiency, radiation_pattern, split_config, \
    steering_config
from huygens_relay.config import load_config

SEPARATIONS = (150, 120, 90, 60, 30)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config")
    ap.add_argument("--out", default="beams.png")
    args = ap.parse_args()
    cfg = load_config(args.config)
    pattern = cfg.pattern()
    geom = cfg.surface_geometry()
    plain = cfg.codebook_for("dl_only", pattern)
    joint = cfg.codebook_for("joint", pattern)
    angles = np.arange(-75, 76, 5)
    grid = np.arange(-90, 90.01, 0.25)

    fig, axes = plt.subplots(1, 3, figsize=(15, 4.2), constrained_layout=True)
    ax = axes[0]
    dl = [efficiency(steering_config(plain, geom, a, "dl_only"), "dl", a) for a in angles]
    cj = [steering_config(joint, geom, a, "joint") for a in angles]
    ax.plot(angles, dl, "o-", label="DL, dl_only")
    ax.plot(angles, [efficiency(c, "dl", a) for c, a in zip(cj, angles)], "s--", label="DL, joint")
    ax.plot(angles, [efficiency(c, "ul", a) for c, a in zip(cj, angles)], "^--", label="UL, joint")
    ax.axhline(0.5, color="k", lw=0.8, ls=":")
    ax.set(xlabel="steering angle (deg)", ylabel="amplitude efficiency", ylim=(0, 1.05))
    ax.legend()

    for ax, weights, title in ((axes[1], (0.5, 0.5), "even split"), (axes[2], (1 / 3, 2 / 3), "1/3 : 2/3 split")):
        for sep in SEPARATIONS:
            spec = BeamSpec((Beam(-sep / 2, weights[0]), Beam(sep / 2, weights[1])), "dl_only")
            rp = radiation_pattern(split_config(plain, geom, spec), "dl", grid)
            ax.plot(rp.theta, rp.mag_db, lw=1, label=f"{sep}° apart")
        ax.set(xlabel="angle (deg)", ylabel="|AF|/n (dB)", ylim=(-30, 0), title=title)
        ax.legend(fontsize=8)
    fig.savefig(args.out, dpi=130)
    print(args.out)


if __name__ == "__main__":
    main()
