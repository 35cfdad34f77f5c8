"""Negative singular eigenvalues of the linearized radial operator.

With ``s = log t`` the weighted problem
``-(t psi')' - t p |v|^(p-1) psi = nu t^-1 psi`` becomes the Schrödinger form
``-psi_ss - q(s) psi = nu psi`` with ``q(s) = p exp(2 s) |v(e^s)|^(p-1)``,
which is ``f_p(t) = p t^2 |v|^(p-1)`` written in ``s``. The weight ``t^-1 dt``
turns into ``ds``, so eigenfunctions orthonormal in ``L^2(ds)`` are
orthonormal in the singular inner product.

Discretization is second order on a uniform grid with Dirichlet ends; the
matrix is symmetric tridiagonal. Each eigenvalue is computed on a grid and
on one of half the step, then Richardson-combined as ``(4 nu(h/2) - nu(h)) / 3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh_tridiagonal
from scipy.signal import argrelmax

from henonlab.constants import ELL, ProblemParams
from henonlab.profiles import W1, W2_limit, eta1, eta2_limit, bump_argmax
from henonlab.shooting import RadialSolution, Trajectory

#: grid step; 16000 nodes per 30 units keeps the two raw grids within COARSE_TOL
H_DEFAULT = 30.0 / 16000
#: truncation margin beyond the deepest bubble
L_MARGIN = 30.0
LIMIT_L = 30.0
COARSE_TOL = 1e-4
N_LOWEST = 4
#: FD eigenvalues this close to -1 get the exact gap treatment
GAP_WINDOW = 1e-3
SCHEME = "fd2-uniform-richardson"


@dataclass
class SpectralResult:
    """Negative eigenvalues with ``L^2(ds)``-normalized eigenfunctions.

    ``s`` is the grid (``t = exp(s)``); ``eigenfunctions[j]`` lives on it.
    ``lowest`` holds the lowest raw eigenvalues of the finer grid, negative
    or not, so callers can count negatives beyond ``count``.
    """

    nu: np.ndarray
    eigenfunctions: np.ndarray
    s: np.ndarray
    disc: dict
    coarse: bool = False
    raw: tuple = field(default=(), repr=False)
    lowest: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    #: j -> (sign, log|nu_j + 1|) for modes resolved through the exact -1 solution
    minus_one_gap: dict = field(default_factory=dict)

    @property
    def t(self) -> np.ndarray:
        return np.exp(self.s)

    @property
    def n_negative(self) -> int:
        return int(np.sum(self.lowest < 0))

    def above_minus_one(self, j: int) -> bool:
        """``nu_j > -1``, decided by the resolved gap when one is stored."""
        if j in self.minus_one_gap:
            return self.minus_one_gap[j][0] > 0
        return bool(self.nu[j] > -1.0)

    def gram(self) -> np.ndarray:
        """Trapezoid Gram matrix of the eigenfunctions in ``L^2(ds)``."""
        h = self.disc["h"]
        if not len(self.nu):
            return np.zeros((0, 0))
        psi = self.eigenfunctions
        return h * psi @ psi.T

    def interior_zeros(self, j: int, rel: float = 1e-12) -> int:
        """Sign changes of eigenfunction ``j`` ignoring negligible tails."""
        psi = self.eigenfunctions[j]
        big = psi[np.abs(psi) > rel * np.abs(psi).max()]
        return int(np.sum(np.signbit(big[1:]) != np.signbit(big[:-1])))


# the name the limit problems go by
LimitSpectralResult = SpectralResult


def _grid(a: float, b: float, h: float) -> tuple[np.ndarray, float]:
    n = max(int(math.ceil((b - a) / h)), 8)
    return np.linspace(a, b, n + 1), (b - a) / n


def _dirichlet_lowest(q: np.ndarray, h: float, k: int):
    """Lowest ``k`` eigenpairs of ``-D2 - q`` on the interior nodes."""
    d = 2.0 / h**2 - q
    e = np.full(q.size - 1, -1.0 / h**2)
    k = min(k, q.size)
    w, v = eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1))
    return w, v


def _fix_sign(psi):
    return psi if psi[np.argmax(np.abs(psi))] >= 0 else -psi


def solve_schrodinger(potential: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                      count: int, h: float = H_DEFAULT) -> SpectralResult:
    """Negative eigenpairs of ``-psi'' - potential psi`` on ``(a, b)``, Dirichlet ends.

    At most ``count`` eigenvalues are returned; all are Richardson combinations
    of the raw values on steps ``h`` and ``h/2``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    nk = max(N_LOWEST, count + 1)
    s_c, hc = _grid(a, b, h)
    s_f, hf = _grid(a, b, h / 2.0)
    wc, _ = _dirichlet_lowest(potential(s_c[1:-1]), hc, nk)
    wf, vf = _dirichlet_lowest(potential(s_f[1:-1]), hf, nk)
    n_neg = min(int(np.sum(wc < 0)), int(np.sum(wf < 0)), count)
    rich = (4.0 * wf[:n_neg] - wc[:n_neg]) / 3.0
    psis = np.zeros((n_neg, s_f.size))
    for j in range(n_neg):
        psi = vf[:, j] / math.sqrt(hf)  # h sum psi^2 = 1
        psis[j, 1:-1] = _fix_sign(psi)
    coarse = bool(n_neg and np.max(np.abs(wf[:n_neg] - wc[:n_neg])) > COARSE_TOL)
    disc = {"L": float(b - a), "N": int(s_f.size - 2), "h": hf, "scheme": SCHEME,
            "s_min": float(a), "s_max": float(b)}
    return SpectralResult(rich, psis, s_f, disc, coarse, (wc[:n_neg], wf[:n_neg]), wf)


# finite-p problem --------------------------------------------------------------

def potential_fn(sol: RadialSolution) -> Callable[[np.ndarray], np.ndarray]:
    """``q(s) = p exp(2 s + (p-1) log|v(e^s)|)`` from the solution's exact evaluator."""
    p = sol.p

    def q(s):
        s = np.asarray(s, dtype=float)
        v, _ = sol.eval_log(s)
        with np.errstate(divide="ignore"):
            return p * np.exp(2.0 * s + (p - 1.0) * np.log(np.abs(v)))

    return q


def truncation(sol: RadialSolution, margin: float = L_MARGIN) -> float:
    """Left cut ``s_min``: ``margin`` units below the smallest concentration scale."""
    return min(sol.log_eps) - margin


def finite_spectrum(sol: RadialSolution, count: int = 2, h: float = H_DEFAULT,
                    margin: float = L_MARGIN) -> SpectralResult:
    """Negative singular eigenvalues ``nu_1 < nu_2 < 0`` (at most ``count``).

    Eigenvalues within ``GAP_WINDOW`` of -1 are resolved by :func:`minus_one_gap`,
    since their distance to -1 is far below the discretization error.
    """
    if count not in (1, 2):
        raise ValueError("count must be 1 or 2")
    q = potential_fn(sol)
    res = solve_schrodinger(q, truncation(sol, margin), 0.0, count, h)
    for j, nu in enumerate(res.nu):
        if abs(nu + 1.0) < GAP_WINDOW:
            sign, log_gap = minus_one_gap(sol, res.s, res.eigenfunctions[j], q)
            res.minus_one_gap[j] = (sign, log_gap)
            res.nu[j] = -1.0 + sign * math.exp(log_gap)
    return res


def minus_one_gap(sol: RadialSolution, s: np.ndarray, psi: np.ndarray,
                  q: Optional[Callable] = None) -> tuple[int, float]:
    """Sign and log-magnitude of ``nu + 1`` for a Dirichlet eigenpair ``(nu, psi)``.

    ``phi0(s) = v'(e^s)`` solves the eigen-equation with ``nu = -1`` exactly
    but misses the boundary condition, so Green's identity gives
    ``nu + 1 = -phi0(0) psi_s(0) / int phi0 psi ds``. The boundary slope
    ``psi_s(0)`` is tiny at large ``p``; it is recovered by integrating the
    solution with ``chi(0) = 0, chi_s(0) = 1`` back to a point where ``psi``
    is well resolved and matching ``psi = psi_s(0) chi``.
    """
    q = potential_fn(sol) if q is None else q
    v, w = sol.eval_log(s)
    phi0 = w * np.exp(-s)
    overlap = float(np.trapezoid(phi0 * psi, s))
    k_peak = int(np.argmax(np.abs(psi)))
    small = np.nonzero(np.abs(psi[k_peak:]) < 1e-2 * np.abs(psi[k_peak]))[0]
    k_match = k_peak + int(small[0]) if small.size else (k_peak + s.size - 1) // 2
    k_match = min(k_match, s.size - 2)
    s_m = float(s[k_match])

    def rhs(x, y):
        return [y[1], -(q(np.array([x]))[0] - 1.0) * y[0]]

    out = solve_ivp(rhs, (0.0, s_m), [0.0, 1.0], method="DOP853", rtol=1e-11, atol=1e-14)
    if not out.success:
        raise RuntimeError(f"matching integration failed: {out.message}")
    chi = float(out.y[0, -1])
    psi_m = float(psi[k_match])
    log_slope = math.log(abs(psi_m)) - math.log(abs(chi))
    sign = -int(np.sign(phi0[-1])) * int(np.sign(psi_m) * np.sign(chi)) * int(np.sign(overlap))
    log_gap = math.log(abs(phi0[-1])) + log_slope - math.log(abs(overlap))
    return sign, log_gap


def henon_side_oracle(u_profile: Trajectory, params: ProblemParams, count: int = 2,
                      h: float = H_DEFAULT, sigma_min: Optional[float] = None) -> SpectralResult:
    """Eigenvalues ``Lambda`` of the radial Hénon problem, discretized in ``log r``.

    The potential is ``p exp((2+alpha) sigma) |u(e^sigma)|^(p-1)``, built from
    the Hénon profile alone. Expect ``Lambda_j = ((2+alpha)/2)^2 nu_j``.
    """
    if count not in (1, 2):
        raise ValueError("count must be 1 or 2")
    p, a = params.p, params.alpha

    def q(sig):
        u, _ = u_profile.eval_log(sig)
        with np.errstate(divide="ignore"):
            return p * np.exp((2.0 + a) * sig + (p - 1.0) * np.log(np.abs(u)))

    if sigma_min is None:
        # below the series start the profile is flat and q decays like r^(2+alpha)
        sigma_min = math.log(u_profile.grid[0]) - 20.0
    return solve_schrodinger(q, sigma_min, 0.0, count, h)


def rayleigh_quotient(potential: Callable, s: np.ndarray, psi: np.ndarray, refine: int = 4) -> float:
    """Continuous Rayleigh quotient of a spline through ``psi``.

    Quadratures run on a ``refine``-times finer grid, so the result is an
    independent check on the discrete eigenvalue.
    """
    spline = CubicSpline(s, psi)
    fine = np.linspace(s[0], s[-1], refine * (s.size - 1) + 1)
    y = spline(fine)
    dy = spline(fine, 1)
    num = np.trapezoid(dy**2 - potential(fine) * y**2, fine)
    return float(num / np.trapezoid(y**2, fine))


# limit problems ------------------------------------------------------------------

def limit_potential(which: int, ell: float = ELL) -> Callable[[np.ndarray], np.ndarray]:
    """``exp(2 s) W^i(exp(s))``."""
    if which == 1:
        w = W1()
    elif which == 2:
        w = W2_limit(ell)
    else:
        raise ValueError("which must be 1 or 2")

    def q(s):
        s = np.asarray(s, dtype=float)
        return np.exp(2.0 * s) * w(np.exp(s))

    return q


def limit_eigenfunction(which: int, ell: float = ELL):
    return eta1() if which == 1 else eta2_limit(ell)


def limit_spectrum(which: int, L: float = LIMIT_L, h: float = H_DEFAULT, ell: float = ELL) -> SpectralResult:
    """Negative eigenvalue of ``-eta_ss - e^{2s} W^i(e^s) eta = beta eta`` on ``[-L, L]``.

    Two eigenvalues are requested so that a spurious second negative value
    would show up in ``n_negative``; only negatives are kept.
    """
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    return solve_schrodinger(limit_potential(which, ell), -L, L, 2, h)


def eigenfunction_distance(res: SpectralResult, which: int, ell: float = ELL) -> float:
    """``L^2(r^-1 dr)`` distance between the computed and closed-form first eigenfunction."""
    exact = limit_eigenfunction(which, ell)(np.exp(res.s))
    diff = res.eigenfunctions[0] - exact
    return float(math.sqrt(np.trapezoid(diff**2, res.s)))


def kappa_rescale_check(r_samples=None, ell: float = ELL) -> float:
    """Pointwise conjugacy ``eta^2(r) / sqrt(kappa) = eta1(sqrt(8/delta) r^kappa)``."""
    from henonlab.profiles import kappa_conjugacy

    if r_samples is None:
        r_samples = np.geomspace(1e-2, 1e2, 100)
    return kappa_conjugacy(r_samples, ell)


# potential diagnostics ------------------------------------------------------------

def potential_diagnostics(sol: RadialSolution, R: float = 20.0, K: float = 20.0,
                          h: float = 2e-3) -> dict:
    """Sup and local maxima of ``f_p(t) = p t^2 |v|^(p-1)`` plus the window maxima.

    Windows are ``[eps_1 R, eps_2 / K] U [eps_2 K, 1]`` for two zones and
    ``[eps R, 1]`` for one. Bump locations are reported scaled by ``eps_i``
    so they can be compared with the limit maximizers ``sqrt 8`` and
    ``delta^(1/(2+gamma))``.
    """
    q = potential_fn(sol)
    s_lo = truncation(sol, 10.0)
    s, _ = _grid(s_lo, 0.0, h)
    f = q(s)
    peaks = argrelmax(f)[0]
    # keep the maxima that matter, one per zone at most
    peaks = peaks[f[peaks] > 1e-3 * f.max()]
    le = sol.log_eps
    loc = np.exp(s[peaks])
    windows = []
    if sol.zones == 1:
        windows.append((le[0] + math.log(R), 0.0))
    else:
        windows.append((le[0] + math.log(R), le[1] - math.log(K)))
        windows.append((le[1] + math.log(K), 0.0))
    wmax = 0.0
    for lo, hi in windows:
        mask = (s >= lo) & (s <= hi)
        if mask.any():
            wmax = max(wmax, float(f[mask].max()))
    scaled = [math.exp(math.log(x) - le[min(i, len(le) - 1)]) for i, x in enumerate(loc)]
    return {
        "sup_fp": float(f.max()),
        "bump_t": [float(x) for x in loc],
        "bump_scaled": scaled,
        "bump_values": [float(v) for v in f[peaks]],
        "expected_scaled": [bump_argmax()["g"], bump_argmax()["h"]][: sol.zones],
        "window_max": wmax,
        "R": R,
        "K": K,
    }


__all__ = [
    "SpectralResult",
    "LimitSpectralResult",
    "finite_spectrum",
    "limit_spectrum",
    "henon_side_oracle",
    "kappa_rescale_check",
    "potential_diagnostics",
    "rayleigh_quotient",
    "eigenfunction_distance",
    "potential_fn",
    "solve_schrodinger",
]
