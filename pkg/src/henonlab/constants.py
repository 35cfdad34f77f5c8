"""Problem parameters, universal constants and closed-form parameter algebra.

All quantities here are plain functions of floats. The number ``ELL`` is the
limit of ``s_2 / eps_2`` for the nodal Lane-Emden solution; it has no closed
form and is kept as a literal (the asymptotic sweep in
:func:`henonlab.profiles.estimate_ell` recomputes it numerically).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

ELL = 7.1979
SQRT_E = math.sqrt(math.e)

#: ``(2 + alpha) * kappa / 2`` closer than this to an integer counts as resonant.
RESONANCE_TOL = 1e-9

_TBAR_BRACKET = (0.1, 1.0)
_TBAR_XTOL = 1e-12


@dataclass(frozen=True)
class ProblemParams:
    """One instance ``-Δu = |x|^alpha |u|^(p-1) u`` on the unit disc."""

    alpha: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "p", float(self.p))
        if not (math.isfinite(self.alpha) and math.isfinite(self.p)):
            raise ValueError("alpha and p must be finite")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.p <= 1:
            raise ValueError(f"p must be > 1, got {self.p}")


@dataclass(frozen=True)
class UniversalConstants:
    tbar: float
    ell: float
    gamma: float
    kappa: float
    mu1_limit: float
    mu2_limit: float
    sqrt_e: float

    def as_dict(self) -> dict:
        return asdict(self)


def _tbar_equation(t: float) -> float:
    return 2.0 * SQRT_E * math.log(t) + t


def root_tbar() -> float:
    """Root of ``2 sqrt(e) log t + t = 0`` in (0, 1), by bisection.

    The left side is strictly increasing on (0, 1], negative at 0.1 and equal
    to 1 at t = 1, so plain bisection on the fixed bracket always converges.
    """
    lo, hi = _TBAR_BRACKET
    f_lo = _tbar_equation(lo)
    if f_lo >= 0 or _tbar_equation(hi) <= 0:
        raise RuntimeError("bracket for tbar does not enclose a sign change")
    while hi - lo > _TBAR_XTOL:
        mid = 0.5 * (lo + hi)
        f_mid = _tbar_equation(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_ell(ell):
    if not ell > 0:
        raise ValueError(f"ell must be > 0, got {ell}")


def _check_alpha(alpha):
    if not alpha >= 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")


def gamma_of_ell(ell: float) -> float:
    """``sqrt(2 ell^2 + 4) - 2``; the singular-Liouville weight exponent."""
    _check_ell(ell)
    # written to avoid cancellation for small ell
    return 2.0 * ell**2 / (math.sqrt(2.0 * ell**2 + 4.0) + 2.0)


def delta_of_ell(ell: float) -> float:
    """Scale ``delta(ell) = (gamma + 4) / gamma * ell^(2 + gamma)``."""
    _check_ell(ell)
    g = gamma_of_ell(ell)
    return (g + 4.0) / g * ell ** (2.0 + g)


def kappa_of_ell(ell: float = ELL) -> float:
    return (2.0 + gamma_of_ell(ell)) / 2.0


def kappa_direct(ell: float = ELL) -> float:
    """``kappa`` from ``sqrt((2 + ell^2) / 2)``, independent of ``gamma``."""
    _check_ell(ell)
    return math.sqrt((2.0 + ell**2) / 2.0)


def delta1_of_alpha(alpha: float) -> float:
    """``2 (2 + alpha)^2``: the scale with ``U_{alpha;delta}(0) = 0``."""
    _check_alpha(alpha)
    return 2.0 * (2.0 + alpha) ** 2


def delta2_of_alpha(alpha: float, ell: float = ELL) -> float:
    _check_alpha(alpha)
    g = gamma_of_ell(ell)
    return (g + 4.0) / g * ((2.0 + alpha) / 2.0 * ell) ** (2.0 + g)


def ell_alpha(alpha: float, ell: float = ELL) -> float:
    """Radius where the weighted singular profile has its maximum 0."""
    _check_alpha(alpha)
    return ((2.0 + alpha) / 2.0 * ell) ** (2.0 / (2.0 + alpha))


def resonance_level(alpha: float, kappa: float | None = None) -> float:
    """``(2 + alpha) kappa / 2``; resonances sit where this is an integer."""
    kappa = kappa_of_ell() if kappa is None else kappa
    return (2.0 + alpha) * kappa / 2.0


def is_resonant(alpha: float, kappa: float | None = None) -> bool:
    x = resonance_level(alpha, kappa)
    return abs(x - round(x)) < RESONANCE_TOL


def nearest_resonance(alpha: float, kappa: float | None = None) -> tuple[int, float]:
    """Closest ``(n, alpha_n)`` with ``alpha_n >= 0``."""
    kappa = kappa_of_ell() if kappa is None else kappa
    n = max(round(resonance_level(alpha, kappa)), math.ceil(kappa))
    return n, 2.0 * (n / kappa - 1.0)


def alpha_resonances(n_max: int, kappa: float | None = None) -> list[tuple[int, float]]:
    """All ``(n, alpha_n = 2 (n / kappa - 1))`` with ``n <= n_max`` and ``alpha_n >= 0``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    kappa = kappa_of_ell() if kappa is None else kappa
    return [(n, 2.0 * (n / kappa - 1.0)) for n in range(math.ceil(kappa), n_max + 1)]


def snapped_ceil(x: float, tol: float = RESONANCE_TOL) -> int:
    """Ceiling that treats values within ``tol`` of an integer as that integer."""
    k = round(x)
    if abs(x - k) < tol:
        return int(k)
    return math.ceil(x)


def mu_limits(tbar: float | None = None) -> tuple[float, float]:
    """Limits of the two extremal values of the nodal radial solution."""
    tbar = root_tbar() if tbar is None else tbar
    mu2 = math.exp(tbar / (2.0 * (tbar + SQRT_E)))
    return SQRT_E / tbar * mu2, mu2


def universal_constants(ell: float = ELL) -> UniversalConstants:
    tbar = root_tbar()
    mu1, mu2 = mu_limits(tbar)
    return UniversalConstants(
        tbar=tbar,
        ell=ell,
        gamma=gamma_of_ell(ell),
        kappa=kappa_of_ell(ell),
        mu1_limit=mu1,
        mu2_limit=mu2,
        sqrt_e=SQRT_E,
    )


def constants_table(ell: float = ELL) -> dict[str, float]:
    """Flat mapping of every derived constant, as emitted by ``henonlab constants``."""
    c = universal_constants(ell)
    out = c.as_dict()
    out["kappa_squared"] = c.kappa**2
    out["delta_ell"] = delta_of_ell(ell)
    out["delta1_alpha0"] = delta1_of_alpha(0.0)
    out["tbar_residual"] = _tbar_equation(c.tbar)
    out["mu_ratio"] = c.mu1_limit / c.mu2_limit
    first_n, first_alpha = alpha_resonances(math.ceil(c.kappa))[0]
    out["first_resonance_n"] = float(first_n)
    out["first_resonance_alpha"] = first_alpha
    return out
