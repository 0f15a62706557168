"""The disk and cylinder series, three independent ways.

The one-boundary (disk) and two-boundary (cylinder) generating series come
out of: (a) brute-force counting with a marked boundary, (b) the solved
Laurent-polynomial system evaluated along the substitution series Z, and for
polynomial weights (c) lattice-path slice decompositions.  All three agree
coefficient by coefficient.
"""

from fractions import Fraction as F

from wht import (
    EllBounds, ModelParams, build_table, compute_Z, solve_system,
    tilde_transform, w01, w01_bijective, w02, w02_annular, wgn_oracle,
)

params = ModelParams.make(m=2, r=0, u=[F(1, 2), F(5, 3)],
                          p=[F(1, 3), F(1, 5)], q=[F(2, 7), F(3)], T=3)

sd = solve_system(params)
print("solved blocks; Z =", compute_Z(sd).coeffs[0], "+ t * (",
      compute_Z(sd).coeffs[1], ") + ...")

disk_curve = w01(sd)
print("\ndisk series from the curve, t^1 coefficient:")
print("  ", disk_curve.coeffs[1])

table = build_table(params, 3, EllBounds())
disk_oracle = wgn_oracle(table, params, 0, 1)
print("disk series from enumeration, t^1 coefficient:")
print("  ", disk_oracle.coeffs[1])

td = tilde_transform(sd, params)
disk_paths = w01_bijective(td)
print("disk series from slice paths, t^1 coefficient:")
print("  ", disk_paths.coeffs[1])

cyl_curve = w02(sd)
cyl_oracle = wgn_oracle(table, params, 0, 2)
cyl_paths = w02_annular(td)
agree = all(
    (a - b).is_zero() and (a - c).is_zero()
    for a, b, c in [(x, y, z) for x, y, z in zip(
        cyl_curve.coeffs, cyl_oracle.coeffs, cyl_paths.coeffs)
        if hasattr(x, "is_zero")])
print("\ncylinder: curve == enumeration == annular sum:", agree)
