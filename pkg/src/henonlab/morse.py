"""Morse indices from singular eigenvalues, and their large-``p`` limits.

The full Morse index of a radial solution is assembled from its radial
singular eigenvalues: each ``nu_j`` contributes every angular mode ``k``
with ``k^2 < ((2+alpha)/2)^2 (-nu_j)``, counted twice for ``k >= 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Callable, NamedTuple, Optional, Sequence, Union

from henonlab.constants import (
    ProblemParams,
    RESONANCE_TOL,
    is_resonant,
    kappa_of_ell,
    nearest_resonance,
    resonance_level,
    snapped_ceil,
)

#: a computed level this close to an integer is reported as ceiling-unstable
CEIL_UNSTABLE_TOL = 1e-6


class IndexRange(NamedTuple):
    """Closed integer interval; the index at a resonance is only known to lie in it."""

    lo: int
    hi: int

    def __contains__(self, k) -> bool:  # type: ignore[override]
        return self.lo <= k <= self.hi


Index = Union[int, IndexRange]


def _levels(alpha: float, nu: Sequence[float]) -> list[float]:
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    out = []
    for v in nu:
        if not v < 0:
            raise ValueError(f"eigenvalues must be negative, got {v}")
        out.append((2.0 + alpha) / 2.0 * math.sqrt(-v))
    return out


def _check_zones(m, nu):
    if m not in (1, 2):
        raise ValueError(f"zones must be 1 or 2, got {m}")
    if len(nu) != m:
        raise ValueError(f"need exactly {m} eigenvalues, got {len(nu)}")


def morse_index(m: int, alpha: float, nu: Sequence[float]) -> int:
    """``2 sum_j ceil((2+alpha)/2 sqrt(-nu_j)) - m``."""
    _check_zones(m, nu)
    return 2 * sum(math.ceil(x) for x in _levels(alpha, nu)) - m


def morse_index_sym(n: int, m: int, alpha: float, nu: Sequence[float]) -> int:
    """Index restricted to functions invariant under rotation by ``2 pi / n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_zones(m, nu)
    return m + 2 * sum((math.ceil(x) - 1) // n for x in _levels(alpha, nu))


def _half_alpha_ceil(alpha: float) -> int:
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    return math.ceil(alpha / 2.0)


def asymptotic_morse(m: int, alpha: float, kappa: Optional[float] = None) -> Index:
    """Morse index for ``p`` large; an :class:`IndexRange` at a resonance."""
    a2 = _half_alpha_ceil(alpha)
    if m == 1:
        return 1 + 2 * a2
    if m != 2:
        raise ValueError(f"zones must be 1 or 2, got {m}")
    kappa = kappa_of_ell() if kappa is None else kappa
    x = resonance_level(alpha, kappa)
    if is_resonant(alpha, kappa):
        lo = 2 * round(x) + 2 * a2
        return IndexRange(lo, lo + 2)
    return 2 * math.ceil(x) + 2 * a2


def asymptotic_morse_rewritten(alpha: float, kappa: Optional[float] = None) -> int:
    """Nodal index in the form ``2 + 2 ceil(alpha/2) + 2 ceil((2+alpha) kappa/2 - 1)``."""
    kappa = kappa_of_ell() if kappa is None else kappa
    return 2 + 2 * _half_alpha_ceil(alpha) + 2 * math.ceil(resonance_level(alpha, kappa) - 1.0)


def multiplicity(alpha: float, kappa: Optional[float] = None) -> tuple[int, int]:
    """Guaranteed counts of nonradial (positive, nodal) solutions for large ``p``."""
    kappa = kappa_of_ell() if kappa is None else kappa
    return _half_alpha_ceil(alpha), snapped_ceil(resonance_level(alpha, kappa) - 1.0)


def asymptotic_sym_morse(n: int, m: int, alpha: float, kappa: Optional[float] = None) -> Index:
    """Large-``p`` index among ``2 pi / n``-invariant functions."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a2 = _half_alpha_ceil(alpha)
    if m == 1:
        return 1 + 2 * (a2 // n)
    if m != 2:
        raise ValueError(f"zones must be 1 or 2, got {m}")
    kappa = kappa_of_ell() if kappa is None else kappa
    x = resonance_level(alpha, kappa)
    if is_resonant(alpha, kappa):
        k = round(x)
        return IndexRange(2 + 2 * ((k - 1) // n) + 2 * (a2 // n), 2 + 2 * (k // n) + 2 * (a2 // n))
    return 2 + 2 * (math.ceil(x - 1.0) // n) + 2 * (a2 // n)


@dataclass
class MorseReport:
    alpha: float
    p: Union[float, str]
    zones: int
    nu_used: list
    morse: Index
    sym_morse: dict
    resonant: bool
    nearest_resonance: tuple
    ceiling_unstable: bool
    multiplicity_positive: int
    multiplicity_nodal: int
    asymptotic: Index
    agrees: Optional[bool] = None
    p_star: Optional[float] = None
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        d = asdict(self)
        for key in ("morse", "asymptotic"):
            v = getattr(self, key)
            d[key] = [v.lo, v.hi] if isinstance(v, IndexRange) else v
        d["sym_morse"] = {
            str(n): ([v.lo, v.hi] if isinstance(v, IndexRange) else v) for n, v in self.sym_morse.items()
        }
        d["nearest_resonance"] = {"n": self.nearest_resonance[0], "alpha_n": self.nearest_resonance[1]}
        return d


def _matches(computed: Index, asymptotic: Index) -> bool:
    if isinstance(asymptotic, IndexRange):
        return computed in asymptotic
    return computed == asymptotic


def _ceiling_unstable(alpha, nu, resolved: dict) -> bool:
    """A level near an integer is unstable unless its side is known exactly.

    A mode with a resolved gap to -1 has level ``k sqrt(1 - gap)`` with
    ``k = (2+alpha)/2``; the gap sign fixes which side of ``k`` it is on.
    """
    k = (2.0 + alpha) / 2.0
    for j, x in enumerate(_levels(alpha, nu)):
        if abs(x - round(x)) >= CEIL_UNSTABLE_TOL:
            continue
        if j in resolved and abs(k - round(x)) < RESONANCE_TOL:
            continue
        return True
    return False


def _resolved_levels_ceiling(alpha, nu, resolved: dict) -> list[float]:
    """Eigenvalues with the exact-side correction for resolved modes at integer levels."""
    k = (2.0 + alpha) / 2.0
    out = list(nu)
    for j, (sign, _) in resolved.items():
        if j < len(out) and abs(k - round(k)) < RESONANCE_TOL and abs(out[j] + 1.0) < 1e-12:
            # nu_j = -1 + sign * tiny; nudge so the ceiling lands on the exact side
            out[j] = -1.0 + sign * 1e-12
    return out


def full_report(params: ProblemParams, m: int, nu=None, n_max: int = 6,
                p_star: Optional[float] = None) -> MorseReport:
    """Morse data for one solution.

    ``nu`` is a sequence of eigenvalues, a spectral result (whose resolved
    gaps to -1 are honoured) or ``None`` / ``"asymptotic"`` for the large-``p``
    formulas.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    alpha = params.alpha
    kappa = kappa_of_ell()
    asym = asymptotic_morse(m, alpha, kappa)
    pos, nod = multiplicity(alpha, kappa)
    resonant = m == 2 and is_resonant(alpha, kappa)
    near = nearest_resonance(alpha, kappa)
    notes = []
    if nu is None or (isinstance(nu, str) and nu == "asymptotic"):
        sym = {n: asymptotic_sym_morse(n, m, alpha, kappa) for n in range(1, n_max + 1)}
        return MorseReport(alpha, "asymptotic", m, [], asym, sym, resonant, near, False,
                           pos, nod, asym, None, p_star, notes)
    resolved = dict(getattr(nu, "minus_one_gap", {}) or {})
    values = [float(x) for x in getattr(nu, "nu", nu)]
    if len(values) != m:
        raise ValueError(f"need exactly {m} negative eigenvalues, got {len(values)}")
    unstable = _ceiling_unstable(alpha, values, resolved)
    used = _resolved_levels_ceiling(alpha, values, resolved)
    morse = morse_index(m, alpha, used)
    sym = {n: morse_index_sym(n, m, alpha, used) for n in range(1, n_max + 1)}
    if sym[1] != morse:
        raise AssertionError("symmetric formula at n = 1 disagrees with the plain formula")
    if unstable:
        notes.append("ceiling-unstable")
    return MorseReport(alpha, params.p, m, values, morse, sym, resonant, near, unstable,
                       pos, nod, asym, _matches(morse, asym), p_star, notes)


def find_p_star(alpha: float, m: int, p_grid: Sequence[float],
                compute_nu: Optional[Callable[[float], object]] = None) -> Optional[float]:
    """Smallest grid ``p`` from which computed and asymptotic indices agree to the end.

    ``compute_nu(p)`` returns the eigenvalues (or spectral result) at ``p``;
    the default solves and discretizes from scratch.
    """
    if compute_nu is None:
        from henonlab.shooting import solve_radial
        from henonlab.spectral import finite_spectrum

        def compute_nu(p):
            return finite_spectrum(solve_radial(ProblemParams(alpha, p), m), m)

    agree = [bool(full_report(ProblemParams(alpha, p), m, compute_nu(p)).agrees) for p in p_grid]
    p_star = None
    for p, ok in zip(reversed(list(p_grid)), reversed(agree)):
        if not ok:
            break
        p_star = p
    return p_star
