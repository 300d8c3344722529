#!/usr/bin/env python3
# ---------------------------------------------------------------------
# Constant vs rate-dependent decoder, and the role of harvesting
# efficiency.
#
# Fair calibration: with omega = 0.044 the rate-dependent decoder peaks
# around 50 mW here, so each constant budget p_sic is compared against
# the dynamic model with p_r = p_sic - 50 mW. Two effects stand out:
#
#   * the dynamic region contains the constant one and shrinks only
#     gradually as the budget tightens, because the receiver can always
#     trade rate for decoding power;
#   * raising the budget (or lowering the harvesting efficiency xi)
#     shrinks the regions toward the R1 axis: only the near user pays
#     for decoding, so R2's ceiling (all power to the far user) stays.
# ---------------------------------------------------------------------

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from wpnoma import (
    DynamicPower,
    GridSpec,
    SystemParams,
    exhaustive_search,
    generalized_boundary,
    generalized_r1_max,
)

SIGMA2_W = 10.0 ** ((-104.0 - 30.0) / 10.0)
MBPS = 10.0
OMEGA = 0.044


def const_curve(params, p_sic, n):
    rs = np.linspace(0.0, 0.999 * generalized_r1_max(params, p_sic), n)
    pts = [(float(r), res.r2_star) for r in rs
           if (res := generalized_boundary(float(r), params, p_sic)).is_optimal]
    return np.array(pts).T * MBPS


def dyn_curve(params, p_r, grid, n):
    model = DynamicPower(omega=OMEGA, p_r=p_r)
    rs = np.linspace(0.0, 0.985 * params.ue1_capacity(), n)
    pts = [(float(r), res.r2_star) for r in rs
           if (res := exhaustive_search(float(r), params, model, grid)).is_optimal]
    return np.array(pts).T * MBPS


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid-factor", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=30)
    args = ap.parse_args()
    grid = GridSpec().coarsened(args.grid_factor)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.6), sharey=True)

    params = SystemParams.from_distances(0.5, 10.0, SIGMA2_W, 40.0, 0.5)
    for p_sic_mw, color in ((60.0, "C0"), (80.0, "C1"), (100.0, "C2")):
        p_sic = p_sic_mw * 1e-3
        x, y = const_curve(params, p_sic, args.points)
        ax1.plot(x, y, "--", color=color,
                 label=f"constant {p_sic_mw:.0f} mW")
        x, y = dyn_curve(params, p_sic - 0.05, grid, args.points)
        ax1.plot(x, y, color=color,
                 label=f"dynamic, front end {p_sic_mw - 50:.0f} mW")
        print(f"budget {p_sic_mw:.0f} mW: constant region ends at "
              f"{generalized_r1_max(params, p_sic) * MBPS:.0f} Mbps")
    ax1.set_title("decoder budget (xi = 0.5)")
    ax1.set_xlabel("R1 (Mbps)")
    ax1.set_ylabel("R2 (Mbps)")
    ax1.legend(fontsize=8)
    ax1.grid(alpha=0.3)

    for xi, color in ((0.3, "C0"), (0.5, "C1"), (0.7, "C2")):
        p = SystemParams.from_distances(0.5, 10.0, SIGMA2_W, 40.0, xi)
        x, y = const_curve(p, 0.08, args.points)
        ax2.plot(x, y, "--", color=color, label=f"constant, xi = {xi}")
        x, y = dyn_curve(p, 0.03, grid, args.points)
        ax2.plot(x, y, color=color, label=f"dynamic, xi = {xi}")
    ax2.set_title("harvesting efficiency (80 mW calibration)")
    ax2.set_xlabel("R1 (Mbps)")
    ax2.legend(fontsize=8)
    ax2.grid(alpha=0.3)

    fig.tight_layout()
    fig.savefig("decoder_model_comparison.png", dpi=150)
    print("\nwrote decoder_model_comparison.png")


if __name__ == "__main__":
    main()
