"""The rational-exponential extension.

An extra free (not necessarily monotone) run of transpositions, weighted
v^length / length!, corresponds to an exponential factor in the content
weight.  The solved system acquires a pair of auxiliary blocks; the genus-0
series stay exact as polynomials in v, and the whole extension is the
N -> infinity limit of a rational model with one weight v/N repeated N times.
"""

from fractions import Fraction as F

from wht import EllBounds, ModelParams, build_table, solve_system, w01, wgn_oracle
from wht.ring import MPoly
from wht.spectral import solve_bulk_approximation

params = ModelParams.make(m=1, r=1, u=[F(1, 2), F(-1, 3)], p=[F(1, 3)],
                          q=[F(2, 7)], T=3, u_exp=MPoly.var("v"))
sd = solve_system(params)
print("auxiliary block eta:", sd.eta.window(), " theta:", sd.theta.window())

disk = w01(sd)
print("\ndisk series t^2 coefficient, exact in v:")
print("  ", disk.coeffs[2])

table = build_table(params, 3, EllBounds(run_max=6, exp_run_max=8))
oracle = wgn_oracle(table, params, 0, 1).map_coeffs(
    lambda c: c.rename({"xb1": "xb"}))
print("matches enumeration exactly:",
      all((a - b).is_zero() for a, b in zip(disk.coeffs[1:], oracle.coeffs[1:])))

print("\nfinite-N approximation error (one block, worst coefficient):")
pe = ModelParams.make(m=1, r=1, u=[F(1, 2), F(-1, 3)], p=[F(1, 3)],
                      q=[F(2, 7)], T=3, u_exp=F(1, 5))
sde = solve_system(pe)
for N in (10 ** 2, 10 ** 4, 10 ** 6):
    sdb = solve_bulk_approximation(pe, N)
    worst = max(
        (abs(c) for ts in (sdb.A["c0"] - sde.A["c0"]).coeffs.values()
         for c in ts.coeffs), default=F(0))
    print(f"  N = {N:>9}: {float(worst):.3e}")
