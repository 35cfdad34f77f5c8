"""Singular eigenvalues, the -1 degeneracy, and the Morse indices they give.

Run:  python3 demos/spectra_and_morse.py
"""

import math

from henonlab import morse as M
from henonlab.constants import ProblemParams, alpha_resonances, kappa_of_ell
from henonlab.shooting import solve_radial
from henonlab.spectral import finite_spectrum, limit_spectrum

kappa = kappa_of_ell()
print(f"limit eigenvalues: beta1 = {limit_spectrum(1).nu[0]:.8f}, "
      f"beta2 = {limit_spectrum(2).nu[0]:.6f} (-kappa^2 = {-kappa**2:.6f})")
print()

# nu_2 + 1 shrinks like exp(-0.9 p); the finite-difference value stops resolving it
# around p = 30, so the Green-identity gap carries the sign from there on
print(f"{'p':>5} {'nu1':>11} {'nu2 (FD)':>14} {'log|nu2+1|':>11} {'side':>6}")
for p in (5, 12, 30, 100, 400, 800):
    res = finite_spectrum(solve_radial(ProblemParams(0.0, p), 2), 2)
    gap = res.minus_one_gap.get(1)
    lg = f"{gap[1]:11.2f}" if gap else f"{math.log(abs(res.nu[1] + 1)):11.2f}"
    side = "above" if res.above_minus_one(1) else "below"
    print(f"{p:5d} {res.nu[0]:11.5f} {res.nu[1]:14.10f} {lg} {side:>6}")

print()
res = finite_spectrum(solve_radial(ProblemParams(0.0, 800), 2), 2)
for alpha in (0.0, 1.0, 2.0, 3.0):
    rep = M.full_report(ProblemParams(alpha, 800.0), 2, res)
    print(f"alpha={alpha}: computed {rep.morse}, asymptotic {rep.asymptotic}, "
          f"n-invariant {rep.sym_morse}")

print()
print("resonances (2+alpha) kappa / 2 = n:")
for n, a in alpha_resonances(9):
    rng = M.asymptotic_morse(2, a)
    print(f"  n={n}  alpha={a:.6f}  index in [{rng.lo}, {rng.hi}]  "
          f"nodal multiplicity {M.multiplicity(a - 1e-6)[1]} -> {M.multiplicity(a + 1e-6)[1]}")
