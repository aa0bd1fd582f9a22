"""Scan one v coefficient of an L=3 QES config and track the restricted spectrum.

Prints e0(M), the invariance certificate and the eigenvalues at each grid
point, which makes it easy to see where pairs collide and turn complex.
"""
import argparse
from fractions import Fraction

from dqm.models import load_config
from dqm.polyop import PotentialCoefficients
from dqm.qes import QesSpec, certify_invariance, qes_from_config, qes_spectrum, solve_compensation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/qes_l3.cfg")
    ap.add_argument("--key", default="v_0_0", help="coefficient to vary, e.g. v_1_1")
    ap.add_argument("--start", type=Fraction, default=Fraction(-2))
    ap.add_argument("--stop", type=Fraction, default=Fraction(2))
    ap.add_argument("--steps", type=int, default=9)
    args = ap.parse_args()

    base = qes_from_config(load_config(args.config))
    if not isinstance(base, QesSpec):
        raise SystemExit(base.describe())
    k, l = (int(s) for s in args.key.split("_")[1:])
    for i in range(args.steps):
        val = args.start + (args.stop - args.start) * Fraction(i, max(args.steps - 1, 1))
        v = dict(base.coeffs.v)
        v[(k, l)] = val
        spec = solve_compensation(PotentialCoefficients(base.L, v), base.coordinate, base.shift, base.M)
        sp = qes_spectrum(spec)
        vals = " ".join(f"{z.real:9.4f}{z.imag:+.3f}i" for z in sp.eigenvalues)
        print(f"{args.key}={str(val):>6s} e0={str(spec.e0):>8s} cert={certify_invariance(spec)} "
              f"real={sp.real!s:5s} {vals}")


if __name__ == "__main__":
    main()
