"""How the radial solutions concentrate as p grows.

Run:  python3 demos/concentration.py
"""

import numpy as np

from henonlab import profiles as P
from henonlab.constants import ELL, SQRT_E, ProblemParams, mu_limits
from henonlab.shooting import rescale, scaling_report, solve_radial

P_GRID = (25, 50, 100, 200, 400, 800)

mu1_lim, mu2_lim = mu_limits()
print(f"limits: v1(0) -> {SQRT_E:.5f}, nodal maxima -> {mu1_lim:.4f}, {mu2_lim:.4f}, ratio -> {ELL}")
print()
print(f"{'p':>5} {'v1(0)':>9} {'mu1':>9} {'mu2':>9} {'s2/eps2':>9} {'log eps2':>10} {'c0 zone 2':>10}")
for p in P_GRID:
    pos = solve_radial(ProblemParams(0.0, p), 1)
    nod = solve_radial(ProblemParams(0.0, p), 2)
    rep = scaling_report(nod)
    c0, _ = P.profile_distance(rescale(nod, 2), P.Z_ell(), 20.0, 0.5)
    print(f"{p:5d} {pos.mu[0]:9.5f} {nod.mu[0]:9.5f} {nod.mu[1]:9.5f} "
          f"{rep['s2_over_eps2']:9.5f} {nod.log_eps[1]:10.2f} {c0:10.2e}")

# v1(0) dips below its limit before climbing back
print()
print("v1(0) - sqrt(e):", ", ".join(
    f"p={p}: {solve_radial(ProblemParams(0.0, p), 1).mu[0] - SQRT_E:+.2e}" for p in (100, 150, 200, 800)))

grid = [100, 200, 400, 800]
print(f"extrapolated ell from {grid}: {P.estimate_ell(grid):.5f}")

# the first bubble looks like log(64/(8+r^2)^2) after rescaling
sol = solve_radial(ProblemParams(0.0, 400), 2)
r = np.linspace(0.0, 10.0, 6)
print()
print("zone-1 rescaled vs V_8 at p=400")
for x, a, b in zip(r, rescale(sol, 1)(r)[0], P.V_family(8.0)(r)):
    print(f"  r={x:5.1f}  computed {a:+.5f}  limit {b:+.5f}")
