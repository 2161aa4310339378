#!/usr/bin/env python3
"""Acoustic-mode mass table for the device geometry.

Prints the geometric mode mass, both effective-mass conventions, the
zero-point motion, and the cat-state delocalization for a chosen size.
"""

import argparse

from catsim import AcousticMode, delocalization, half_wavelength_mass, mass_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--w0-um", type=float, default=27.0)
    ap.add_argument("--length-um", type=float, default=435.0)
    ap.add_argument("--wavelength-um", type=float, default=1.7)
    ap.add_argument("--alpha", type=float, default=1.61)
    args = ap.parse_args()

    mode = AcousticMode.from_wavelength(args.w0_um, args.length_um,
                                        args.wavelength_um)
    print(f"mode: m = {mode.m}, lambda = {mode.wavelength_um:.4f} um, "
          f"f = {mode.omega_p / (2e9 * 3.141592653589793):.3f} GHz")
    print(f"half-wavelength section mass ~ {half_wavelength_mass(mode) * 1e12:.1f} ng")
    for convention in ("max", "rms"):
        model = mass_model(mode, convention)
        x_eff, sep = delocalization(model, args.alpha)
        print(f"[{convention}] S0 = {model.S0:.3e}  M0 = {model.M0_ug:.3f} ug  "
              f"M_eff = {model.M_eff_ug:.3f} ug  x_zpf = {model.x_zpf_m:.3e} m  "
              f"separation(alpha={args.alpha}) = {sep:.3e} m")


if __name__ == "__main__":
    main()
