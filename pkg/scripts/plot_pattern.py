"""Transmission amplitude and phase over the (u_e, u_m) bias plane for both bands."""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from huygens_relay.config import load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config")
    ap.add_argument("--out", default="huygens_pattern.png")
    args = ap.parse_args()
    cfg = load_config(args.config)
    p = cfg.pattern()
    extent = [p.grid.u_m_values[0], p.grid.u_m_values[-1], p.grid.u_e_values[0], p.grid.u_e_values[-1]]
    fig, axes = plt.subplots(2, 2, figsize=(9, 7.5), constrained_layout=True)
    for row, band in enumerate(("dl", "ul")):
        t = p.coefficients(band, "transmit")
        im = axes[row, 0].imshow(np.abs(t), origin="lower", extent=extent, vmin=0, vmax=1, aspect="auto")
        fig.colorbar(im, ax=axes[row, 0], label="|t|")
        im = axes[row, 1].imshow(np.degrees(np.angle(t)), origin="lower", extent=extent, cmap="twilight",
                                 vmin=-180, vmax=180, aspect="auto")
        fig.colorbar(im, ax=axes[row, 1], label="arg t (deg)")
        f = p.f_dl if band == "dl" else p.f_ul
        for ax in axes[row]:
            ax.set_xlabel("U_M (V)")
            ax.set_ylabel("U_E (V)")
            ax.set_title(f"{band.upper()} {f:g} GHz transmission")
    fig.savefig(args.out, dpi=130)
    print(args.out)


if __name__ == "__main__":
    main()
