"""Escape angle of the collision scaling ODE over a range of d.

For each d the ODE is integrated to ``s_max`` and the remaining sweep is
added by quadrature.  The table compares the result with the exact limit of
the integrated equation and with ``pi/2 - pi sqrt(1+d)``, for the reduced
Kepler coefficient 1/2 and for the zero-energy coefficient 1.
"""
import argparse

import numpy as np

from supereight.collision import REDUCED_KEPLER, integrate_scaling, limit_angle, theta_asymptote


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=float, nargs="+", default=list(np.linspace(0.0, 4.0, 9)))
    ap.add_argument("--s-max", type=float, default=1e3)
    ap.add_argument("--branch", choices=("+", "-"), default="+")
    args = ap.parse_args()

    print(f"{'k':>4} {'d':>5} {'theta(s_max)':>14} {'extrapolated':>14} {'exact limit':>14} "
          f"{'pi/2-pi*sqrt(1+d)':>18} {'energy drift':>12}")
    for k in (REDUCED_KEPLER, 1.0):
        for d in args.d:
            tr = integrate_scaling(d, args.branch, args.s_max, kepler_coefficient=k)
            print(f"{k:4.1f} {d:5.2f} {tr.theta_final():14.9f} {tr.extrapolated_theta():14.9f} "
                  f"{limit_angle(d, args.branch, k):14.9f} {theta_asymptote(d, args.branch):18.9f} "
                  f"{tr.energy_drift():12.1e}")


if __name__ == "__main__":
    main()
