#!/usr/bin/env python3
"""Collapse and revival of the qubit population for one drive setting.

Writes trajectory.csv (P_e, purity, Bloch components, mean phonon number)
and prints the characteristic times.
"""

import argparse
from pathlib import Path

import numpy as np

from catsim import SystemParams, characteristic_times, jc_trajectory


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha0", type=float, default=1.75)
    ap.add_argument("--g0", type=float, default=2.0 ** 0.5 / 0.9)
    ap.add_argument("--t-max", type=float, default=10.0)
    ap.add_argument("--n-times", type=int, default=801)
    ap.add_argument("--out", default="collapse_revival_out")
    args = ap.parse_args()

    params = SystemParams(g0=args.g0, alpha0=args.alpha0)
    ct = characteristic_times(params)
    print(f"t_collapse = {ct.t_collapse:.3f} us, t_C = {ct.t_C:.3f} us, "
          f"t_R = {ct.t_R:.3f} us")

    times = np.linspace(0.0, args.t_max, args.n_times)
    traj = jc_trajectory(params, times)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    traj.to_csv(out / "trajectory.csv")
    print(f"wrote {out / 'trajectory.csv'}")


if __name__ == "__main__":
    main()
