"""The acceptance checks, grouped into ten numbered criteria.

Each ``criterion_N`` returns a list of :class:`Check`. ``run`` collects them
for the ``fast`` level (closed forms, constants, limit problems, formula
suites) or the ``full`` level (adds the p-sweeps up to ``p = 800``).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from henonlab import constants as C
from henonlab import morse as M
from henonlab import profiles as P
from henonlab.shooting import integrate_ivp, scaling_report, solve_radial, to_henon
from henonlab.spectral import (
    finite_spectrum,
    henon_side_oracle,
    kappa_rescale_check,
    limit_spectrum,
    eigenfunction_distance,
)

SWEEP_P = (50, 100, 200, 400, 800)
TREND_P = (50, 100, 200, 400)
BESSEL_J01 = 2.404825557695773


@dataclass
class Check:
    name: str
    passed: bool
    value: object = None
    target: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        v = f"{self.value:.6g}" if isinstance(self.value, float) else str(self.value)
        return f"{tag}  {self.name}: {v} [{self.target}]"


def _close(name, value, expected, tol, rel=False):
    err = abs(value - expected) / (abs(expected) if rel else 1.0)
    kind = "rel" if rel else "abs"
    return Check(name, bool(err <= tol), float(value), f"{expected:.6g} +/- {tol:g} {kind}")


def _at_most(name, value, tol):
    return Check(name, bool(value <= tol), float(value), f"<= {tol:g}")


def _monotone(seq, decreasing):
    d = np.diff(np.asarray(seq, dtype=float))
    return bool(np.all(d < 0) if decreasing else np.all(d > 0))


@lru_cache(maxsize=None)
def solution(p: float, m: int, alpha: float = 0.0):
    return solve_radial(C.ProblemParams(alpha, p), m)


@lru_cache(maxsize=None)
def spectrum(p: float, m: int):
    # the reduced eigenproblem does not depend on alpha
    return finite_spectrum(solution(p, m), m)


def _nu_plus_one_text(res, j):
    if j in res.minus_one_gap:
        sign, lg = res.minus_one_gap[j]
        return f"{'+' if sign > 0 else '-'}exp({lg:.4g})"
    return f"{res.nu[j] + 1.0:.4g}"


# 1 ------------------------------------------------------------------------------

def criterion_1() -> list[Check]:
    t0 = time.perf_counter()
    out = []
    r_reg = np.linspace(0.1, 10.0, 500)
    r_sing = np.linspace(0.5, 20.0, 500)
    for a in (0.0, 1.0, 2.0, 3.7):
        out.append(_at_most(f"residual U(alpha={a})", P.pde_residual(P.U_family(a, C.delta1_of_alpha(a)), r_reg), 1e-6))
    out.append(_at_most("residual V_8", P.pde_residual(P.V_family(8.0), r_reg), 1e-6))
    out.append(_at_most("residual Z_ell", P.pde_residual(P.Z_ell(), r_sing), 1e-6))
    for a in (0.0, 1.0, 2.0, 3.7):
        out.append(_at_most(f"residual Z_henon(alpha={a})", P.pde_residual(P.Z_ell_henon(a), r_sing), 1e-6))
    got, exp = P.mass_identity("lane_emden")
    out.append(_close("mass int t e^Z = gamma", got, exp, 1e-8, rel=True))
    got, exp = P.mass_identity("henon", 2.0)
    out.append(_close("weighted mass at alpha=2", got, exp, 1e-8, rel=True))
    rs = np.linspace(0.1, 5.0, 200)
    dev = max(P.correspondence_check(a, d, rs) for a in (0.0, 1.0, 2.0, 3.7) for d in (8.0, C.delta_of_ell(C.ELL)))
    out.append(_at_most("correspondence identities", dev, 1e-12))
    for k, v in P.normalization_defects().items():
        out.append(_at_most(f"normalization {k}", v, 1e-10))
    out.append(_at_most("runtime seconds", time.perf_counter() - t0, 60.0))
    return out


# 2 ------------------------------------------------------------------------------

def criterion_2() -> list[Check]:
    u = C.universal_constants()
    return [
        _close("tbar", u.tbar, 0.7875, 5e-4),
        _close("gamma(7.1979)", u.gamma, 8.3740, 1e-3),
        _close("kappa", u.kappa, 5.1869, 1e-3),
        _close("kappa^2", u.kappa**2, 26.9, 0.1),
        _close("mu1 limit", u.mu1_limit, 2.46, 0.01),
        _close("mu2 limit", u.mu2_limit, 1.17, 0.01),
    ]


# 3 ------------------------------------------------------------------------------

def criterion_3() -> list[Check]:
    tr = integrate_ivp(1.001, 1.0, t_max=10.0, zero_budget=1)
    return [_close("first zero at p=1.001", float(tr.zeros[0]), BESSEL_J01, 1e-2)]


# 4 ------------------------------------------------------------------------------

def criterion_4() -> list[Check]:
    out = []
    v0 = solution(400, 1).mu[0]
    out.append(_close("v1(0) at p=400", v0, C.SQRT_E, 0.02, rel=True))
    s = solution(400, 2)
    out.append(_close("mu1 at p=400", s.mu[0], 2.46, 0.05, rel=True))
    out.append(_close("mu2 at p=400", s.mu[1], 1.17, 0.05, rel=True))
    r0 = scaling_report(s, 0.0)["sigma_over_rho2"]
    out.append(_close("s2/eps2 at p=400, alpha=0", r0, C.ELL, 0.05, rel=True))
    target2 = (2.0 * C.ELL) ** 0.5
    r2 = scaling_report(s, 2.0)["sigma_over_rho2"]
    out.append(_close("sigma/rho2 at p=400, alpha=2", r2, target2, 0.05, rel=True))
    mu1 = [solution(p, 2).mu[0] for p in TREND_P]
    mu2 = [solution(p, 2).mu[1] for p in TREND_P]
    q0 = [scaling_report(solution(p, 2), 0.0)["sigma_over_rho2"] for p in TREND_P]
    q2 = [scaling_report(solution(p, 2), 2.0)["sigma_over_rho2"] for p in TREND_P]
    out.append(Check("mu1 monotone (decreasing)", _monotone(mu1, True), [round(x, 6) for x in mu1], "p in 50..400"))
    out.append(Check("mu2 monotone (decreasing)", _monotone(mu2, True), [round(x, 6) for x in mu2], "p in 50..400"))
    out.append(Check("s2/eps2 monotone (increasing)", _monotone(q0, False), [round(x, 6) for x in q0], "alpha=0"))
    out.append(Check("sigma/rho2 monotone (increasing)", _monotone(q2, False), [round(x, 6) for x in q2], "alpha=2"))
    return out


# 5 ------------------------------------------------------------------------------

def criterion_5() -> list[Check]:
    out = []
    for p in SWEEP_P:
        r1 = spectrum(p, 1)
        ok1 = r1.n_negative == 1 and len(r1.nu) == 1 and r1.above_minus_one(0) and r1.nu[0] < 0
        out.append(Check(f"m=1 p={p}: one nu in (-1,0)", bool(ok1),
                         f"n_neg={r1.n_negative}, nu+1={_nu_plus_one_text(r1, 0)}", "exact"))
        r2 = spectrum(p, 2)
        ok2 = (r2.n_negative == 2 and len(r2.nu) == 2 and r2.nu[0] < -1.0
               and r2.above_minus_one(1) and r2.nu[1] < 0)
        out.append(Check(f"m=2 p={p}: nu1 < -1 < nu2 < 0", bool(ok2),
                         f"n_neg={r2.n_negative}, nu1={r2.nu[0]:.6g}, nu2+1={_nu_plus_one_text(r2, 1)}", "exact"))
    return out


# 6 ------------------------------------------------------------------------------

def _gap_log(res, j):
    if j in res.minus_one_gap:
        return res.minus_one_gap[j][1]
    return math.log(abs(res.nu[j] + 1.0))


def criterion_6() -> list[Check]:
    out = []
    k2 = C.kappa_of_ell() ** 2
    r1, r2 = spectrum(800, 1), spectrum(800, 2)
    out.append(_at_most("|nu1+1| m=1 p=800", abs(r1.nu[0] + 1.0), 0.1))
    out.append(_at_most("|nu2+1| m=2 p=800", abs(r2.nu[1] + 1.0), 0.1))
    out.append(_close("nu1 m=2 p=800", float(r2.nu[0]), -k2, 0.05, rel=True))
    g1 = [_gap_log(spectrum(p, 1), 0) for p in SWEEP_P]
    g2 = [_gap_log(spectrum(p, 2), 1) for p in SWEEP_P]
    n1 = [float(spectrum(p, 2).nu[0]) for p in SWEEP_P]
    out.append(Check("m=1 log(nu1+1) decreasing", _monotone(g1, True), [round(x, 3) for x in g1], "p sweep"))
    out.append(Check("m=2 log(nu2+1) decreasing", _monotone(g2, True), [round(x, 3) for x in g2], "p sweep"))
    out.append(Check("m=2 nu1 decreasing toward -kappa^2", _monotone(n1, True) and n1[-1] > -k2,
                     [round(x, 5) for x in n1], f"> {-k2:.5g}"))
    return out


# 7 ------------------------------------------------------------------------------

def criterion_7() -> list[Check]:
    out = []
    k2 = C.kappa_of_ell() ** 2
    l1, l2 = limit_spectrum(1), limit_spectrum(2)
    out.append(_close("beta1", float(l1.nu[0]), -1.0, 1e-4))
    out.append(_close("beta2", float(l2.nu[0]), -k2, 0.03))
    out.append(_at_most("eta1 distance", eigenfunction_distance(l1, 1), 1e-3))
    out.append(_at_most("eta2 distance", eigenfunction_distance(l2, 2), 1e-3))
    out.append(Check("one negative beta each", l1.n_negative == 1 and l2.n_negative == 1,
                     (l1.n_negative, l2.n_negative), "(1, 1)"))
    out.append(_at_most("kappa conjugacy", kappa_rescale_check(), 1e-12))
    return out


# 8 ------------------------------------------------------------------------------

def criterion_8() -> list[Check]:
    out = []
    for a, p, m in ((0.0, 50, 1), (2.0, 50, 1), (3.0, 50, 2)):
        sol = solution(p, m)
        res = spectrum(p, m)
        u, _ = to_henon(sol, a)
        lam = henon_side_oracle(u, C.ProblemParams(a, p), m)
        k2 = ((2.0 + a) / 2.0) ** 2
        dev = max(abs(lam.nu[j] / (k2 * res.nu[j]) - 1.0) for j in range(m))
        out.append(_at_most(f"Lambda/((2+a)^2/4 nu) - 1 at (a={a},p={p},m={m})", dev, 1e-3))
    return out


# 9 ------------------------------------------------------------------------------

def criterion_9_tables() -> list[Check]:
    got = [M.asymptotic_morse(1, a) for a in (0.0, 0.5, 1.0, 2.0, 3.0)]
    return [
        Check("asymptotic_morse(1, alpha)", got == [1, 3, 3, 3, 5], got, "[1, 3, 3, 3, 5]"),
        Check("asymptotic_morse(2, 0)", M.asymptotic_morse(2, 0.0) == 12, M.asymptotic_morse(2, 0.0), "12"),
        Check("multiplicity(0)", M.multiplicity(0.0) == (0, 5), M.multiplicity(0.0), "(0, 5)"),
    ]


def criterion_9_computed() -> list[Check]:
    out = []
    for a in (0.0, 1.0, 3.0):
        for m in (1, 2):
            rep = M.full_report(C.ProblemParams(a, 800), m, spectrum(800, m))
            out.append(Check(f"computed Morse alpha={a} m={m} p=800", bool(rep.agrees) and not rep.ceiling_unstable,
                             rep.morse, f"asymptotic {rep.asymptotic}"))
    n6, a6 = [r for r in C.alpha_resonances(6) if r[0] == 6][0]
    rep = M.full_report(C.ProblemParams(a6, 800), 2, spectrum(800, 2))
    ok = isinstance(rep.asymptotic, M.IndexRange) and rep.morse in rep.asymptotic
    out.append(Check(f"alpha_6={a6:.4f} computed index in interval", bool(ok), rep.morse, str(tuple(rep.asymptotic))))
    return out


def criterion_9(full: bool = True) -> list[Check]:
    return criterion_9_tables() + (criterion_9_computed() if full else [])


# 10 -----------------------------------------------------------------------------

def criterion_10(seed: int = 20240601, n_samples: int = 10_000) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    bad = 0
    for _ in range(n_samples):
        m = int(rng.integers(1, 3))
        a = float(rng.uniform(0.0, 10.0))
        nu = sorted((-rng.uniform(0.0, 40.0, size=m)).tolist())
        if M.morse_index_sym(1, m, a, nu) != M.morse_index(m, a, nu):
            bad += 1
    out.append(Check("sym formula at n=1 equals plain formula", bad == 0, f"{bad} mismatches", f"{n_samples} samples"))

    # two nu inside one ceiling cell give the same index
    bad = 0
    for _ in range(1000):
        a = float(rng.uniform(0.0, 6.0))
        k = (2.0 + a) / 2.0
        n = int(rng.integers(1, 12))
        x1, x2 = np.sort(rng.uniform(n - 1 + 1e-6, n - 1e-6, size=2))
        nus = [-((x1 / k) ** 2)], [-((x2 / k) ** 2)]
        if M.morse_index(1, a, nus[0]) != M.morse_index(1, a, nus[1]):
            bad += 1
    out.append(Check("ceiling-cell invariance", bad == 0, f"{bad} mismatches", "1000 pairs"))

    jumps = []
    for n, an in C.alpha_resonances(20):
        lo = M.multiplicity(max(an - 1e-6, 0.0))[1]
        hi = M.multiplicity(an + 1e-6)[1]
        if an >= 1e-6:
            jumps.append(hi - lo)
    out.append(Check("multiplicity jumps by one at each alpha_n", all(j == 1 for j in jumps), jumps, "all 1"))

    res = spectrum(50, 2)
    dev = float(np.abs(res.gram() - np.eye(2)).max())
    out.append(_at_most("eigenfunction orthonormality (p=50, m=2)", dev, 1e-8))
    sol = solution(50, 2)
    fine = finite_spectrum(sol, 2, h=res.disc["h"])
    cauchy = float(np.abs(fine.nu - res.nu).max())
    out.append(_at_most("grid-refinement Cauchy (N vs 2N)", cauchy, 1e-5))
    return out


CRITERIA = {
    1: ("closed-form identity suite", criterion_1, "fast"),
    2: ("constants", criterion_2, "fast"),
    3: ("small-p Bessel oracle", criterion_3, "fast"),
    4: ("asymptotics of solutions", criterion_4, "full"),
    5: ("eigenvalue bounds", criterion_5, "full"),
    6: ("eigenvalue limits", criterion_6, "full"),
    7: ("limit spectra", criterion_7, "fast"),
    8: ("cross-solver oracle", criterion_8, "full"),
    9: ("Morse tables", criterion_9, "fast"),
    10: ("property suites", criterion_10, "fast"),
}


def run(level: str = "fast") -> dict[int, list[Check]]:
    if level not in ("fast", "full"):
        raise ValueError(f"unknown level {level!r}")
    full = level == "full"
    results = {}
    for k, (_, fn, lvl) in CRITERIA.items():
        if lvl == "full" and not full:
            continue
        results[k] = fn(full) if k == 9 else fn()
    return results
