"""Closed-form limit objects and the checks that tie computed solutions to them.

Profiles are evaluated in log form wherever a power of ``r`` appears, so
large exponents (``2 kappa ~ 10``) and wide radial windows stay finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from henonlab.constants import (
    ELL,
    delta2_of_alpha,
    delta_of_ell,
    ell_alpha,
    gamma_of_ell,
)
from henonlab.shooting import Trajectory

KINDS = ("U", "V", "Z", "Z_henon", "eta1", "eta1_sq", "W1", "W2")
_SINGULAR = ("Z", "Z_henon")
_FD_REL_STEP = 1e-4


def _log(r):
    with np.errstate(divide="ignore"):
        return np.log(r)


def _log_sum(log_delta, k, lr):
    """``log(delta + r^k)`` from ``log r``."""
    return np.logaddexp(log_delta, k * lr)


@dataclass(frozen=True)
class LimitProfile:
    """A closed-form radial function; ``kind`` is one of :data:`KINDS`."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        for name in ("delta", "gamma", "kappa"):
            if name in self.params and not self.params[name] > 0:
                raise ValueError(f"{name} must be > 0")
        if self.params.get("alpha", 0.0) < 0:
            raise ValueError("alpha must be >= 0")

    @property
    def singular(self) -> bool:
        return self.kind in _SINGULAR and self._sing_exponent() > 0

    def _sing_exponent(self):
        g = self.params["gamma"]
        if self.kind == "Z":
            return g
        return (2.0 + self.params["alpha"]) * g / 2.0

    def label(self) -> str:
        inner = ",".join(f"{k}={v:.10g}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({inner})"

    def eval(self, r):
        """Value and first derivative at ``r`` (scalar or array)."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("r must be >= 0")
        if self.singular and np.any(r == 0):
            raise ValueError(f"{self.kind} is singular at r = 0")
        lr = _log(r)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            f, df = getattr(self, f"_eval_{self.kind}")(r, lr)
        return f, df

    def __call__(self, r):
        return self.eval(r)[0]

    # each evaluator returns (f, f') given r and log r

    def _log_weighted(self, r, lr, c, a, b, log_delta):
        """``log(c delta r^a / (delta + r^b)^2)`` and its derivative."""
        ls = _log_sum(log_delta, b, lr)
        f = math.log(c) + log_delta - 2.0 * ls
        if a:
            f = f + a * lr
        # r^(b-1) / (delta + r^b) = exp((b - 1) log r - ls)
        frac = np.where(r > 0, np.exp((b - 1.0) * lr - ls), 0.0 if b > 1 else np.inf)
        df = -2.0 * b * frac
        if a:
            df = df + a / r
        return f, df

    def _eval_U(self, r, lr):
        a, d = self.params["alpha"], self.params["delta"]
        return self._log_weighted(r, lr, 2.0 * (2.0 + a) ** 2, 0.0, 2.0 + a, math.log(d))

    def _eval_V(self, r, lr):
        return self._log_weighted(r, lr, 8.0, 0.0, 2.0, math.log(self.params["delta"]))

    def _eval_Z(self, r, lr):
        g, d = self.params["gamma"], self.params["delta"]
        return self._log_weighted(r, lr, 2.0 * (2.0 + g) ** 2, g, 2.0 + g, math.log(d))

    def _eval_Z_henon(self, r, lr):
        a, g, d = self.params["alpha"], self.params["gamma"], self.params["delta"]
        b = (2.0 + a) * (2.0 + g) / 2.0
        return self._log_weighted(r, lr, 2.0 * b**2, (2.0 + a) * g / 2.0, b, math.log(d))

    def _eval_eta1(self, r, lr):
        q = 8.0 + r * r
        return 4.0 * r / q, 4.0 * (8.0 - r * r) / q**2

    def _eval_eta1_sq(self, r, lr):
        k, d = self.params["kappa"], self.params["delta"]
        ld = math.log(d)
        f = np.exp(0.5 * math.log(2.0 * k * d) + k * lr - _log_sum(ld, 2.0 * k, lr))
        # d/dr = f * kappa/r * (delta - r^2k)/(delta + r^2k)
        df = np.where(r > 0, f * k / np.where(r > 0, r, 1.0) * np.tanh(0.5 * (ld - 2.0 * k * lr)), 0.0)
        if k < 1:
            df = np.where(r > 0, df, np.inf)
        return f, df

    def _eval_W1(self, r, lr):
        q = 8.0 + r * r
        return 64.0 / q**2, -256.0 * r / q**3

    def _eval_W2(self, r, lr):
        z, dz = LimitProfile("Z", dict(self.params))._eval_Z(r, lr)
        w = np.exp(z)
        return w, np.where(r > 0, w * dz, 0.0)


def U_family(alpha: float, delta: float) -> LimitProfile:
    return LimitProfile("U", {"alpha": float(alpha), "delta": float(delta)})


def V_family(delta: float = 8.0) -> LimitProfile:
    return LimitProfile("V", {"delta": float(delta)})


def Z_family(gamma: float, delta: float) -> LimitProfile:
    return LimitProfile("Z", {"gamma": float(gamma), "delta": float(delta)})


def Z_henon_family(alpha: float, gamma: float, delta: float) -> LimitProfile:
    return LimitProfile("Z_henon", {"alpha": float(alpha), "gamma": float(gamma), "delta": float(delta)})


def eta1() -> LimitProfile:
    return LimitProfile("eta1")


def eta1_sq(kappa: float, delta: float) -> LimitProfile:
    return LimitProfile("eta1_sq", {"kappa": float(kappa), "delta": float(delta)})


def W1() -> LimitProfile:
    return LimitProfile("W1")


def W2(gamma: float, delta: float) -> LimitProfile:
    return LimitProfile("W2", {"gamma": float(gamma), "delta": float(delta)})


def Z_ell(ell: float = ELL) -> LimitProfile:
    """The singular profile with maximum 0 at ``r = ell``."""
    return Z_family(gamma_of_ell(ell), delta_of_ell(ell))


def Z_ell_henon(alpha: float, ell: float = ELL) -> LimitProfile:
    return Z_henon_family(alpha, gamma_of_ell(ell), delta2_of_alpha(alpha, ell))


def eta2_limit(ell: float = ELL) -> LimitProfile:
    g = gamma_of_ell(ell)
    return eta1_sq((2.0 + g) / 2.0, delta_of_ell(ell))


def W2_limit(ell: float = ELL) -> LimitProfile:
    return W2(gamma_of_ell(ell), delta_of_ell(ell))


# PDE residuals ---------------------------------------------------------------

def _flux_derivative(profile: LimitProfile, r):
    """``(r f')'`` by a 4th-order central stencil on the analytic ``r f'``."""
    h = _FD_REL_STEP * r

    def flux(x):
        return x * profile.eval(x)[1]

    return (-flux(r + 2 * h) + 8 * flux(r + h) - 8 * flux(r - h) + flux(r - 2 * h)) / (12 * h)


def _eigen_data(profile: LimitProfile):
    """Potential and eigenvalue paired with a limit eigenfunction."""
    if profile.kind == "eta1":
        return W1(), -1.0
    k, d = profile.params["kappa"], profile.params["delta"]
    return W2(2.0 * k - 2.0, d), -(k**2)


def pde_residual(profile: LimitProfile, r_samples: Sequence[float]) -> float:
    """Max absolute residual of the equation ``profile`` solves, on ``r_samples``.

    Liouville kinds use ``-(r f')'/r - r^a e^f`` (``a = alpha`` for the
    weighted families, 0 otherwise); limit eigenfunctions use
    ``-(r f')'/r - (W + beta/r^2) f``.
    """
    r = np.asarray(r_samples, dtype=float)
    if np.any(r <= 0):
        raise ValueError("residual samples must be > 0")
    lap = _flux_derivative(profile, r) / r
    k = profile.kind
    if k in ("U", "V", "Z", "Z_henon"):
        f = profile(r)
        a = profile.params.get("alpha", 0.0) if k in ("U", "Z_henon") else 0.0
        res = -lap - np.exp(a * np.log(r) + f)
    elif k in ("eta1", "eta1_sq"):
        pot, beta = _eigen_data(profile)
        f = profile(r)
        res = -lap - (pot(r) + beta / r**2) * f
    else:
        raise ValueError(f"{k} is a potential, not a solution of a differential equation")
    return float(np.max(np.abs(res)))


def default_window(profile: LimitProfile) -> tuple[float, float]:
    return (0.5, 20.0) if profile.kind in _SINGULAR else (0.1, 10.0)


# integrals -------------------------------------------------------------------

def mass_identity(kind: str = "lane_emden", alpha: float = 0.0, ell: float = ELL) -> tuple[float, float]:
    """Mass of the singular profile inside its maximum radius, with its closed form.

    ``lane_emden``: ``int_0^ell t e^{Z_ell} dt = gamma``. ``henon``:
    ``int_0^{ell_alpha} r^(1+alpha) e^{Z_{alpha,gamma;delta_2(alpha)}} dr = (2+alpha) gamma / 2``.
    """
    g = gamma_of_ell(ell)
    if kind == "lane_emden":
        prof, top, a = Z_ell(ell), ell, 0.0
    elif kind == "henon":
        if alpha < 0:
            raise ValueError("alpha must be >= 0")
        prof, top, a = Z_ell_henon(alpha, ell), ell_alpha(alpha, ell), alpha
    else:
        raise ValueError(f"unknown mass kind {kind!r}")

    def integrand(r):
        if r == 0.0:
            return 0.0
        return math.exp((1.0 + a) * math.log(r) + float(prof(r)))

    val, _ = quad(integrand, 0.0, top, epsabs=0.0, epsrel=1e-13, limit=200)
    return val, (2.0 + a) * g / 2.0


def log_norm(profile: LimitProfile, half_width: float = 40.0) -> float:
    """``int_0^inf r^-1 f(r)^2 dr``, computed as ``int f(e^x)^2 dx``.

    The eigenfunctions decay at least like ``e^-|x|`` around their centre, so
    the tail beyond ``half_width`` is below ``e^-80``.
    """

    def integrand(x):
        return float(profile(math.exp(x))) ** 2

    c = _bump_centre(profile)
    total = 0.0
    for lo, hi in ((c - half_width, c), (c, c + half_width)):
        v, _ = quad(integrand, lo, hi, epsabs=1e-15, epsrel=1e-13, limit=200)
        total += v
    return total


def _bump_centre(profile: LimitProfile) -> float:
    if profile.kind == "eta1_sq":
        return math.log(profile.params["delta"]) / (2.0 * profile.params["kappa"])
    return 0.5 * math.log(8.0)


def normalization_defects(ell: float = ELL) -> dict[str, float]:
    """Deviation from 1 of the two limit eigenfunction norms."""
    return {
        "eta1": abs(log_norm(eta1()) - 1.0),
        "eta1_sq": abs(log_norm(eta2_limit(ell)) - 1.0),
    }


# algebraic identities ---------------------------------------------------------

def correspondence_check(alpha: float, delta: float, r_samples, gamma: float | None = None) -> float:
    """Max deviation in the two Lane-Emden / Hénon limit-profile correspondences.

    With ``s = (2/(2+alpha)) r^((2+alpha)/2)`` these read
    ``U_{alpha;k^2 delta}(r) = V_delta(s)`` and
    ``Z_{alpha,gamma;k^(2+gamma) delta}(r) = Z_{gamma;delta}(s)``, ``k = (2+alpha)/2``.
    """
    if alpha < 0 or delta <= 0:
        raise ValueError("need alpha >= 0 and delta > 0")
    g = gamma_of_ell(ELL) if gamma is None else gamma
    r = np.asarray(r_samples, dtype=float)
    if np.any(r <= 0):
        raise ValueError("samples must be > 0")
    k = (2.0 + alpha) / 2.0
    s = np.exp(k * np.log(r) - math.log(k))
    d1 = np.abs(U_family(alpha, k**2 * delta)(r) - V_family(delta)(s))
    d2 = np.abs(Z_henon_family(alpha, g, k ** (2.0 + g) * delta)(r) - Z_family(g, delta)(s))
    return float(max(d1.max(), d2.max()))


def kappa_conjugacy(r_samples, ell: float = ELL) -> float:
    """Max of ``|eta^2(r) / sqrt(kappa) - eta1(sqrt(8/delta) r^kappa)|``."""
    e2 = eta2_limit(ell)
    k, d = e2.params["kappa"], e2.params["delta"]
    r = np.asarray(r_samples, dtype=float)
    x = np.exp(0.5 * math.log(8.0 / d) + k * np.log(r))
    return float(np.max(np.abs(e2(r) / math.sqrt(k) - eta1()(x))))


# computed-vs-limit -------------------------------------------------------------

def profile_distance(resc: Trajectory, profile: LimitProfile, R: float, inner: float = 0.0,
                     n: int = 4001) -> tuple[float, float]:
    """Sup distances of values and derivatives between ``resc`` and ``profile`` on ``[inner, R]``."""
    if R <= inner or inner < 0:
        raise ValueError("need 0 <= inner < R")
    if profile.singular and inner <= 0:
        raise ValueError(f"{profile.kind} targets need inner > 0")
    lo, hi = resc.span
    if R > hi * (1 + 1e-12):
        raise ValueError(f"trajectory covers up to {hi:.6g}, window needs {R:.6g}")
    r = np.linspace(inner, R, n)
    y, dy = resc(r)
    f, df = profile.eval(r)
    return float(np.max(np.abs(y - f))), float(np.max(np.abs(dy - df)))


def ell_ratios(p_grid: Sequence[float], alpha: float = 0.0) -> list[float]:
    """``s_2/eps_2`` of the nodal solution along ``p_grid``."""
    from henonlab.constants import ProblemParams
    from henonlab.shooting import solve_radial

    out = []
    for p in p_grid:
        sol = solve_radial(ProblemParams(alpha, p), 2)
        out.append(math.exp(math.log(sol.s2) - sol.log_eps[1]))
    return out


def extrapolate_in_inverse_p(p_grid: Sequence[float], values: Sequence[float]) -> float:
    """Limit as ``p -> inf`` from a polynomial fit in ``1/p``.

    Uses degree ``min(len - 1, 2)`` through the largest ``p`` values; a single
    point is returned unchanged.
    """
    p = np.asarray(p_grid, dtype=float)
    y = np.asarray(values, dtype=float)
    if p.size != y.size or p.size == 0:
        raise ValueError("need matching, non-empty inputs")
    if p.size == 1:
        return float(y[0])
    deg = min(p.size - 1, 2)
    idx = np.argsort(p)[-(deg + 1):]
    coef = np.polyfit(1.0 / p[idx], y[idx], deg)
    return float(coef[-1])


def estimate_ell(p_grid: Sequence[float]) -> float:
    """Extrapolated limit of ``s_2/eps_2`` for the nodal Lane-Emden solution."""
    p = list(p_grid)
    if not p:
        raise ValueError("p_grid must be non-empty")
    if any(q <= 1 for q in p) or any(b <= a for a, b in zip(p, p[1:])):
        raise ValueError("p_grid must be increasing and > 1")
    return extrapolate_in_inverse_p(p, ell_ratios(p))


def bump_argmax() -> dict[str, float]:
    """Maximizers of ``g = r^2 W1`` and ``h = r^2 W2``: ``sqrt 8`` and ``delta^(1/(2+gamma))``."""
    g = gamma_of_ell(ELL)
    return {"g": math.sqrt(8.0), "h": delta_of_ell(ELL) ** (1.0 / (2.0 + g))}
