#!/usr/bin/env python3
# ---------------------------------------------------------------------
# Rate regions under the constant decoding-power model.
#
# A base station serves a near user (0.5 m or 0.75 m away) and a far
# user, 40 W peak power, -104 dBm noise (10 MHz at -174 dBm/Hz). The
# near user runs its 80 mW SIC decoder purely on harvested RF energy,
# with harvesting efficiency 0.5. We trace the boundary of the
# achievable (R1, R2) region for four schemes:
#
#   ts   - harvest-only first sub-slot, then decode (cut-off line!)
#   ps   - single slot, a fraction of received power to the harvester
#   gen  - both knobs free; solved via two concave subproblems
#   tdma - orthogonal baseline (far user first, then near user alone)
#
# Three channel geometries show three qualitatively different regions:
# a wide gain gap (near user at 0.5 m, far at 10 m), a narrow gap
# (far user at 1.2 m: the ps boundary is a straight line of slope -1),
# and a weak near-user channel (0.75 m: ps collapses to the R1 = 0
# segment, and even the generalized region has a cut-off).
# ---------------------------------------------------------------------

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from wpnoma import (
    ConstantPower,
    GridSpec,
    Scheme,
    SystemParams,
    generalized_boundary,
    generalized_r1_max,
    ps_boundary,
    ps_feasible,
    ps_r1_max,
    tdma_baseline,
    ts_boundary,
    ts_r1_max,
)

SIGMA2_W = 10.0 ** ((-104.0 - 30.0) / 10.0)
P_MAX_W = 40.0
XI = 0.5
P_SIC_W = 0.08
MBPS = 10.0  # bits/s/Hz -> Mbps at 10 MHz

GEOMETRIES = [
    ("wide gain gap", 0.5, 10.0),
    ("narrow gain gap", 0.5, 1.2),
    ("weak near user", 0.75, 10.0),
]


def sweep(solver, r1_max, n):
    rs = np.linspace(0.0, r1_max, n)
    out = [(float(r), res.r2_star) for r in rs if (res := solver(float(r))).is_optimal]
    return np.array(out).T if out else np.empty((2, 0))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=120)
    args = ap.parse_args()

    fig, axes = plt.subplots(1, 3, figsize=(15, 4.6), sharey=True)
    tdma_grid = GridSpec(dt=2e-3, drho=2e-3, dp_db=0.5)

    for ax, (label, d1, d2) in zip(axes, GEOMETRIES):
        params = SystemParams.from_distances(d1, d2, SIGMA2_W, P_MAX_W, XI)
        model = ConstantPower(P_SIC_W)
        print(f"\n=== {label}: d1={d1} m, d2={d2} m ===")
        print(f"far-user cap {params.ue2_capacity() * MBPS:.1f} Mbps, "
              f"near-user cap {params.ue1_capacity() * MBPS:.1f} Mbps")

        r1, r2 = sweep(lambda r: ts_boundary(r, params, P_SIC_W),
                       ts_r1_max(params, P_SIC_W), args.points)
        ax.plot(r1 * MBPS, r2 * MBPS, label="time switching")
        cutoff = ts_r1_max(params, P_SIC_W) * MBPS
        ax.axvline(cutoff, ls=":", color="gray")
        print(f"time-switching cut-off at R1 = {cutoff:.1f} Mbps")

        if ps_feasible(params, P_SIC_W):
            r1, r2 = sweep(lambda r: ps_boundary(r, params, P_SIC_W),
                           ps_r1_max(params, P_SIC_W), args.points)
            ax.plot(r1 * MBPS, r2 * MBPS, label="power splitting")
        else:
            # the whole region collapses onto the R2 axis
            ax.plot([0, 0], [0, params.ue2_capacity() * MBPS],
                    lw=3, alpha=0.5, label="power splitting (R1 = 0)")
            print("power splitting infeasible: peak harvest rate "
                  f"{XI * params.h1_sq * P_MAX_W * 1e3:.1f} mW < "
                  f"{P_SIC_W * 1e3:.0f} mW decoder draw")

        r1, r2 = sweep(lambda r: generalized_boundary(r, params, P_SIC_W),
                       generalized_r1_max(params, P_SIC_W), args.points)
        ax.plot(r1 * MBPS, r2 * MBPS, label="generalized")

        r1, r2 = sweep(lambda r: tdma_baseline(r, params, model, tdma_grid),
                       generalized_r1_max(params, P_SIC_W), args.points // 2)
        ax.plot(r1 * MBPS, r2 * MBPS, "--", label="TDMA baseline")

        ax.set_title(f"{label} (d1={d1} m, d2={d2} m)")
        ax.set_xlabel("R1 (Mbps)")
        ax.grid(alpha=0.3)
    axes[0].set_ylabel("R2 (Mbps)")
    axes[0].legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    fig.savefig("constant_power_regions.png", dpi=150)
    print("\nwrote constant_power_regions.png")


if __name__ == "__main__":
    main()
