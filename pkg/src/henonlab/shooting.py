"""Radial solutions of ``-(t v')' = t |v|^(p-1) v`` by shooting.

Radial Hénon solutions reduce, through ``t = r^((2+alpha)/2)``, to this
one-dimensional Lane-Emden problem. We integrate the initial value problem
``v(0) = a, v'(0) = 0`` in the logarithmic variable ``s = log t``::

    v_s = w,    w_s = -exp(2 s) |v|^(p-1) v,

where ``w = t v'``. The singular point ``t = 0`` moves to ``s = -inf`` and the
exponentially long ranges that appear at large ``p`` become linear in ``s``.
Powers are formed in log space, ``exp(2 s + (p - 1) log|v|)``, so nothing
overflows up to ``p ~ 10^3``.

The equation is invariant under ``v -> lam^(2/(p-1)) v(lam t)``, so a single
integration from ``v(0) = a`` followed by that rescaling places the m-th zero
at ``t = 1``; no shooting iteration is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import DOP853, OdeSolution
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from henonlab.constants import ProblemParams

RTOL = 1e-12
ATOL = 1e-14
T0 = 1e-6
PROFILE_POINTS = 4096
_ROOT_XTOL = 1e-14
_EXP_CAP = 600.0
_BIG = math.exp(_EXP_CAP)
_SQRT_BIG = math.exp(_EXP_CAP / 2)

LogEvaluator = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


class IntegrationError(RuntimeError):
    """The initial value integration broke down (typically step-size underflow)."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (at t = {t:.6g})")
        self.t = t


@dataclass
class Trajectory:
    """Sampled radial profile plus an optional exact evaluator.

    ``grid`` holds abscissae (``t`` or ``r``), ``v`` the values and ``dv`` the
    derivative with respect to the abscissa. When ``log_evaluator`` is set it
    maps ``log x`` to ``(value, x * d value / dx)`` and is used by
    :meth:`__call__`; otherwise a cubic Hermite spline through the samples is.
    """

    grid: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    zeros: np.ndarray
    crit_points: np.ndarray
    crit_values: np.ndarray
    log_evaluator: Optional[LogEvaluator] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.dv = np.asarray(self.dv, dtype=float)
        self.zeros = np.atleast_1d(np.asarray(self.zeros, dtype=float))
        self.crit_points = np.atleast_1d(np.asarray(self.crit_points, dtype=float))
        self.crit_values = np.atleast_1d(np.asarray(self.crit_values, dtype=float))
        if not (self.grid.shape == self.v.shape == self.dv.shape):
            raise ValueError("grid, v and dv must have the same length")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.log_evaluator is None:
            self.log_evaluator = _hermite_log_evaluator(self.grid, self.v, self.dv)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    def eval_log(self, s) -> tuple[np.ndarray, np.ndarray]:
        """Value and logarithmic derivative ``x f'(x)`` at ``x = exp(s)``."""
        return self.log_evaluator(np.asarray(s, dtype=float))

    def __call__(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Value and derivative at abscissae ``x >= 0``."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            s = np.log(x)
        val, xd = self.eval_log(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(x > 0, xd / np.where(x > 0, x, 1.0), 0.0)
        return val, d


def _hermite_log_evaluator(grid, v, dv) -> LogEvaluator:
    pos = grid > 0
    s = np.log(grid[pos])
    spline = CubicHermiteSpline(s, v[pos], grid[pos] * dv[pos], extrapolate=True)
    dspline = spline.derivative()
    v_left = v[pos][0]

    def evaluate(q):
        q = np.asarray(q, dtype=float)
        inside = q >= s[0]
        qc = np.where(inside, q, s[0])
        val = np.where(inside, spline(qc), v_left)
        der = np.where(inside, dspline(qc), 0.0)
        return val, der

    return evaluate


def _abs_pow(v, k):
    """``|v|^k`` through logs; exactly 0 at ``v = 0``."""
    with np.errstate(divide="ignore"):
        return np.exp(k * np.log(np.abs(v)))


def _series_start(p, a, t):
    """Taylor start ``v = a - a^p t^2/4 + p a^(2p-1) t^4/64`` and ``t v'``."""
    c2 = -math.exp(p * math.log(a)) / 4.0
    c4 = p * math.exp((2 * p - 1) * math.log(a)) / 64.0
    v = a + c2 * t**2 + c4 * t**4
    w = 2 * c2 * t**2 + 4 * c4 * t**4
    return v, w


def _rhs(p):
    pp1 = p + 1.0

    def f(s, y):
        v, w = y[0], y[1]
        if v == 0.0:
            force = 0.0
            e_pp1 = 0.0
        else:
            lv = math.log(abs(v))
            # trial stages may overshoot wildly; cap so the step is rejected
            force = math.copysign(math.exp(min(2.0 * s + p * lv, _EXP_CAP)), v)
            e_pp1 = math.exp(min(2.0 * s + pp1 * lv, _EXP_CAP))
        # extra components accumulate the two Nehari integrals
        w2 = w * w if abs(w) < _SQRT_BIG else _BIG
        return np.array([w, -force, w2, e_pp1])

    return f


@dataclass
class _Shot:
    p: float
    a: float
    s0: float
    dense: OdeSolution
    s_nodes: np.ndarray
    y_nodes: np.ndarray
    zeros: list
    crits: list
    s_end: float

    def state(self, s):
        return self.dense(s)


def _shoot(p, a, log_t_max, zero_budget, t0=None, rtol=RTOL, atol=ATOL) -> _Shot:
    log_a = math.log(a)
    if t0 is None:
        # series start well inside the first bubble of width (p a^(p-1))^(-1/2)
        bubble = math.exp(-0.5 * (math.log(p) + (p - 1) * log_a))
        t0 = T0 * min(1.0, bubble)
    s0 = math.log(t0)
    if log_t_max <= s0:
        raise ValueError("t_max must exceed the series start")
    v0, w0 = _series_start(p, a, t0)
    i1_0 = (a**p / 4.0) ** 2 * t0**4  # int_0^t0 w^2 ds for the series
    i2_0 = math.exp((p + 1) * log_a) * t0**2 / 2.0
    y0 = np.array([v0, w0, i1_0, i2_0])
    solver = DOP853(_rhs(p), s0, y0, log_t_max, rtol=rtol, atol=[atol, atol, 0.0, 0.0])
    ts = [s0]
    ys = [y0]
    interps = []
    zeros: list[float] = []
    crits: list[float] = []
    while solver.status == "running":
        s_old, y_old = solver.t, solver.y.copy()
        msg = solver.step()
        if solver.status == "failed":
            raise IntegrationError(f"integration failed: {msg}", math.exp(s_old))
        s_new, y_new = solver.t, solver.y.copy()
        dense = solver.dense_output()
        interps.append(dense)
        ts.append(s_new)
        ys.append(y_new)
        if y_old[1] * y_new[1] < 0:
            crits.append(brentq(lambda q: dense(q)[1], s_old, s_new, xtol=_ROOT_XTOL, rtol=1e-15))
        if y_old[0] * y_new[0] < 0:
            zeros.append(brentq(lambda q: dense(q)[0], s_old, s_new, xtol=_ROOT_XTOL, rtol=1e-15))
            if len(zeros) >= zero_budget:
                break
    s_end = zeros[-1] if len(zeros) >= zero_budget else solver.t
    crits = [c for c in crits if c < s_end]
    sol = OdeSolution(np.array(ts), interps)
    return _Shot(p, a, s0, sol, np.array(ts), np.array(ys), zeros, crits, s_end)


def _default_log_horizon(p, a):
    # the m <= 2 zeros of the a = 1 solution sit below s ~ 0.5 p
    return p + 50.0 - 0.5 * (p - 1) * math.log(a)


def integrate_ivp(p: float, a: float, t_max: float | None = None, zero_budget: int = 1,
                  *, log_t_max: float | None = None, t0: float | None = None) -> Trajectory:
    """Integrate ``v(0) = a, v'(0) = 0`` until ``t_max`` or ``zero_budget`` zeros.

    ``t_max`` may overflow a float at large ``p``; pass ``log_t_max`` instead.
    Running out of horizon before the budget is spent is not an error: the
    trajectory simply has fewer zeros.
    """
    if not p > 1:
        raise ValueError("p must be > 1")
    if not a > 0:
        raise ValueError("a must be > 0")
    if log_t_max is None:
        log_t_max = math.log(t_max) if t_max is not None else _default_log_horizon(p, a)
    shot = _shoot(p, a, log_t_max, zero_budget, t0=t0)
    s_nodes = shot.s_nodes[shot.s_nodes < shot.s_end]
    s_nodes = np.append(s_nodes, shot.s_end)
    y = shot.dense(s_nodes)
    grid = np.exp(s_nodes)
    crit_s = np.array(shot.crits)
    crit_vals = np.concatenate([[a], shot.dense(crit_s)[0]]) if crit_s.size else np.array([a])

    def log_eval(q, shot=shot):
        q = np.asarray(q, dtype=float)
        st = shot.dense(np.atleast_1d(q))
        return st[0].reshape(q.shape), st[1].reshape(q.shape)

    return Trajectory(
        grid=grid,
        v=y[0],
        dv=y[1] / grid,
        zeros=np.exp(np.array(shot.zeros)),
        crit_points=np.concatenate([[0.0], np.exp(crit_s)]),
        crit_values=crit_vals,
        log_evaluator=log_eval,
    )


@dataclass(frozen=True)
class HenonScalingData:
    """Scaling data of the radial Hénon solution ``u`` attached to ``v``."""

    mu_henon: tuple
    rho: tuple
    r_p: Optional[float] = None
    sigma_p: Optional[float] = None


@dataclass
class RadialSolution:
    """Radial solution with ``zones`` nodal zones, normalized so ``v(1) = 0``.

    ``mu`` holds the extremal magnitudes ``|v(0)|`` and, for two zones,
    ``|v(s2)|``; ``eps`` the matching scales ``(p mu^(p-1))^(-1/2)``. Scales
    underflow for ``p`` beyond ~1500, so ``log_eps`` is the primary record.
    """

    params: ProblemParams
    zones: int
    profile: Trajectory
    mu: tuple
    log_eps: tuple
    t1: Optional[float] = None
    s2: Optional[float] = None
    nehari: tuple = (math.nan, math.nan)
    log_t_min: float = -math.inf

    @property
    def p(self) -> float:
        return self.params.p

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def eps(self) -> tuple:
        return tuple(math.exp(le) for le in self.log_eps)

    @property
    def nehari_defect(self) -> float:
        """Relative gap in ``int t v'^2 = int t |v|^(p+1)`` over (0, 1)."""
        kin, pot = self.nehari
        return abs(kin - pot) / abs(pot)

    @property
    def henon(self) -> HenonScalingData:
        a, p = self.alpha, self.p
        k = (2.0 + a) / 2.0
        mu_h = tuple(k ** (2.0 / (p - 1)) * m for m in self.mu)
        rho = tuple(math.exp(2.0 / (2.0 + a) * (le - math.log(k))) for le in self.log_eps)
        e = 2.0 / (2.0 + a)
        r_p = self.t1**e if self.t1 is not None else None
        sigma = self.s2**e if self.s2 is not None else None
        return HenonScalingData(mu_h, rho, r_p, sigma)

    def crit_point(self, zone: int) -> float:
        return 0.0 if zone == 1 else self.s2

    def zone_end(self, zone: int) -> float:
        return self.t1 if (zone == 1 and self.zones == 2) else 1.0

    def eval_log(self, s):
        """``(v, t v')`` at ``t = exp(s)``."""
        return self.profile.eval_log(s)

    def __call__(self, t):
        return self.profile(t)


def _normalized_evaluator(shot: _Shot, log_lam: float, mu1: float) -> LogEvaluator:
    p = shot.p
    c = math.exp(2.0 * log_lam / (p - 1))
    s_first = shot.s0 - log_lam
    lmu = math.log(mu1)

    def evaluate(q):
        q = np.asarray(q, dtype=float)
        flat = np.atleast_1d(q)
        v = np.empty_like(flat)
        w = np.empty_like(flat)
        inner = flat < s_first
        if np.any(~inner):
            st = shot.dense(flat[~inner] + log_lam)
            v[~inner] = c * st[0]
            w[~inner] = c * st[1]
        if np.any(inner):
            qs = flat[inner]
            a_p_t2 = np.exp(p * lmu + 2 * qs)
            quart = p * np.exp((2 * p - 1) * lmu + 4 * qs)
            v[inner] = mu1 - a_p_t2 / 4.0 + quart / 64.0
            w[inner] = -a_p_t2 / 2.0 + quart / 16.0
        return v.reshape(q.shape), w.reshape(q.shape)

    return evaluate


def _profile_log_grid(s_lo, special, n=PROFILE_POINTS):
    """Grid in ``s = log t``: uniform in ``s`` near 0, uniform in ``t`` near 1."""
    n_t = n // 4
    t_cut = 0.05
    s_part = np.linspace(s_lo, math.log(t_cut), n - n_t, endpoint=False)
    t_part = np.linspace(t_cut, 1.0, n_t)
    extra = []
    for z in special:
        extra.extend([z - 1e-3, z, z + 1e-3])
    s = np.concatenate([s_part, np.log(t_part), np.array(extra)])
    s = np.unique(s[(s >= s_lo) & (s <= 0.0)])
    return s


def solve_radial(params: ProblemParams, zones: int, a: float = 1.0) -> RadialSolution:
    """Radial solution with ``zones`` nodal zones, first zone positive.

    Integrates from ``v(0) = a`` to the ``zones``-th zero ``T`` and rescales
    by ``lam = T`` so that the last zero lands at ``t = 1``.
    """
    if zones not in (1, 2):
        raise ValueError(f"zones must be 1 or 2, got {zones}")
    p = params.p
    shot = _shoot(p, a, _default_log_horizon(p, a), zones)
    if len(shot.zeros) < zones:
        raise IntegrationError(
            f"found {len(shot.zeros)} zeros before the safety horizon, need {zones}",
            math.exp(min(shot.s_end, 700.0)),
        )
    log_lam = shot.zeros[zones - 1]
    c = math.exp(2.0 * log_lam / (p - 1))
    mu1 = c * a
    mu = [mu1]
    t1 = s2 = None
    if zones == 2:
        s_crit = shot.crits[0]
        mu.append(float(abs(c * shot.dense(s_crit)[0])))
        t1 = math.exp(shot.zeros[0] - log_lam)
        s2 = math.exp(s_crit - log_lam)
    log_eps = tuple(-0.5 * (math.log(p) + (p - 1) * math.log(m)) for m in mu)
    y_end = shot.dense(log_lam)
    nehari = (float(y_end[2]), float(y_end[3]))

    evaluator = _normalized_evaluator(shot, log_lam, mu1)
    s_lo = shot.s0 - log_lam
    specials = [math.log(t1)] if t1 is not None else []
    if s2 is not None:
        specials.append(math.log(s2))
    s_grid = _profile_log_grid(s_lo, specials)
    v, w = evaluator(s_grid)
    v[-1] = 0.0
    grid = np.exp(s_grid)
    crit_pts = [0.0] + ([s2] if s2 is not None else [])
    crit_vals = [mu1] + ([-mu[1]] if s2 is not None else [])
    profile = Trajectory(
        grid=grid,
        v=v,
        dv=w / grid,
        zeros=np.array([t1, 1.0] if t1 is not None else [1.0]),
        crit_points=np.array(crit_pts),
        crit_values=np.array(crit_vals),
        log_evaluator=evaluator,
    )
    return RadialSolution(params, zones, profile, tuple(mu), log_eps, t1, s2, nehari, s_lo)


def to_henon(sol: RadialSolution, alpha: float | None = None) -> tuple[Trajectory, HenonScalingData]:
    """Radial Hénon solution ``u(r) = ((2+alpha)/2)^(2/(p-1)) v(r^((2+alpha)/2))``."""
    alpha = sol.alpha if alpha is None else alpha
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha != sol.alpha:
        sol = RadialSolution(ProblemParams(alpha, sol.p), sol.zones, sol.profile, sol.mu,
                             sol.log_eps, sol.t1, sol.s2, sol.nehari, sol.log_t_min)
    p = sol.p
    k = (2.0 + alpha) / 2.0
    amp = k ** (2.0 / (p - 1))

    def evaluate(sigma, base=sol.profile.log_evaluator):
        # s = k sigma, and r u_r = amp * k * (t v_t)
        v, w = base(k * np.asarray(sigma, dtype=float))
        return amp * v, amp * k * w

    sigma = np.log(sol.profile.grid) / k
    u, ru = evaluate(sigma)
    r = np.exp(sigma)
    e = 1.0 / k
    traj = Trajectory(
        grid=r,
        v=u,
        dv=ru / r,
        zeros=sol.profile.zeros**e,
        crit_points=sol.profile.crit_points**e,
        crit_values=amp * sol.profile.crit_values,
        log_evaluator=evaluate,
    )
    return traj, sol.henon


def _rescaled_grid(lo_log, hi_log, n=2048):
    return np.exp(np.linspace(lo_log, hi_log, n))


def rescale(sol: RadialSolution, zone: int) -> Trajectory:
    """``p (v(eps_i t) - v(c_i)) / v(c_i)`` around the i-th critical point ``c_i``.

    Defined for ``0 <= t < zone_end / eps_i``; its value and slope vanish at
    ``c_i / eps_i``.
    """
    if zone not in (1, 2) or zone > sol.zones:
        raise ValueError(f"zone {zone} not available for a {sol.zones}-zone solution")
    p = sol.p
    log_eps = sol.log_eps[zone - 1]
    c = sol.crit_point(zone)
    vc = float(sol.eval_log(math.log(c))[0]) if c > 0 else sol.mu[0]
    base = sol.profile.log_evaluator

    def evaluate(x):
        v, w = base(np.asarray(x, dtype=float) + log_eps)
        return p * (v - vc) / vc, p * w / vc

    hi = math.log(sol.zone_end(zone)) - log_eps
    lo = max(sol.log_t_min - log_eps, hi - 60.0)
    r = _rescaled_grid(lo, hi)
    val, xd = evaluate(np.log(r))
    crit = np.array([c / math.exp(log_eps)]) if zone == 2 else np.array([0.0])
    z_end = math.exp(hi)
    zeros = [z_end]
    if zone == 2:
        zeros = [math.exp(math.log(sol.t1) - log_eps), z_end]
    return Trajectory(r, val, xd / r, np.array(zeros), crit, np.zeros(1), log_evaluator=evaluate)


def rescale_henon(sol: RadialSolution, zone: int, alpha: float | None = None) -> Trajectory:
    """Hénon-side rescaling ``p (u(rho_i x) - u(c_i)) / u(c_i)``.

    Equals the Lane-Emden rescaling evaluated at ``(2/(2+alpha)) x^((2+alpha)/2)``.
    """
    alpha = sol.alpha if alpha is None else alpha
    k = (2.0 + alpha) / 2.0
    inner = rescale(sol, zone)
    base = inner.log_evaluator

    def evaluate(x):
        y, yd = base(k * np.asarray(x, dtype=float) - math.log(k))
        return y, k * yd

    lo = (math.log(inner.grid[0]) + math.log(k)) / k
    hi = (math.log(inner.grid[-1]) + math.log(k)) / k
    r = np.exp(np.linspace(lo, hi, inner.grid.size))
    val, xd = evaluate(np.log(r))
    to_x = lambda y: (k * np.asarray(y)) ** (1.0 / k)  # noqa: E731
    return Trajectory(r, val, xd / r, to_x(inner.zeros), to_x(inner.crit_points),
                      np.zeros(1), log_evaluator=evaluate)


def scaling_report(sol: RadialSolution, alpha: float | None = None) -> dict:
    """Extremal values, scales and the characteristic ratios of a solution.

    One-zone solutions report only ``mu``, ``eps`` and ``rho``.
    """
    alpha = sol.alpha if alpha is None else alpha
    if alpha != sol.alpha:
        sol = RadialSolution(ProblemParams(alpha, sol.p), sol.zones, sol.profile, sol.mu,
                             sol.log_eps, sol.t1, sol.s2, sol.nehari, sol.log_t_min)
    h = sol.henon
    out = {"mu": list(sol.mu), "eps": list(sol.eps), "rho": list(h.rho)}
    if sol.zones == 2:
        le1, le2 = sol.log_eps
        out.update(
            t1=sol.t1,
            s2=sol.s2,
            r_p=h.r_p,
            sigma_p=h.sigma_p,
            s2_over_eps2=math.exp(math.log(sol.s2) - le2),
            t1_over_eps1=math.exp(math.log(sol.t1) - le1),
            t1_over_eps2=math.exp(math.log(sol.t1) - le2),
            sigma_over_rho2=math.exp(math.log(h.sigma_p) - math.log(h.rho[1])),
        )
    return out
