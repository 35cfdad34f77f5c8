import math

import numpy as np
import pytest

from henonlab.constants import ProblemParams, kappa_of_ell, delta_of_ell, ELL
from henonlab.profiles import eta1, eta2_limit, bump_argmax
from henonlab.shooting import solve_radial, to_henon
from henonlab.spectral import (
    H_DEFAULT,
    eigenfunction_distance,
    finite_spectrum,
    henon_side_oracle,
    kappa_rescale_check,
    limit_spectrum,
    potential_diagnostics,
    potential_fn,
    rayleigh_quotient,
    solve_schrodinger,
)

# mpmath shooting in t with psi ~ t^sqrt(-nu); see tests/oracles/mp_oracles.py
MP_NU = {
    (3, 1): [-0.5914814513111258],
    (3, 2): [-14.77002261297048, -0.9079706983962866],
    (5, 2): [-18.69447787354607, -0.988880132911136],
}


def sol(p, m, alpha=0.0):
    return solve_radial(ProblemParams(alpha, p), m)


@pytest.fixture(scope="module")
def spec50():
    return finite_spectrum(sol(50, 2), 2)


@pytest.mark.parametrize("key", sorted(MP_NU))
def test_nu_against_mpmath(key):
    p, m = key
    res = finite_spectrum(sol(p, m), m)
    assert res.nu == pytest.approx(MP_NU[key], rel=1e-6)


def test_quadratic_well_exact():
    # -psi'' on (0, pi) has eigenvalues k^2; shift by a constant potential
    res = solve_schrodinger(lambda s: np.full_like(s, 10.0), 0.0, math.pi, 3, h=1e-3)
    assert res.nu == pytest.approx([1 - 10.0, 4 - 10.0, 9 - 10.0], abs=1e-8)


def test_bounds_large_p():
    r1 = finite_spectrum(sol(500, 1), 1)
    assert r1.n_negative == 1 and len(r1.nu) == 1
    assert r1.nu[0] < 0 and r1.above_minus_one(0)
    r2 = finite_spectrum(sol(500, 2), 2)
    assert r2.n_negative == 2
    assert r2.nu[0] < -1 and r2.above_minus_one(1) and r2.nu[1] < 0
    assert r2.nu[0] == pytest.approx(-kappa_of_ell() ** 2, rel=0.05)
    assert abs(r2.nu[1] + 1) <= 0.1
    assert not r2.coarse


@pytest.mark.parametrize("p", [12, 16, 20])
def test_minus_one_gap_dual_route(p):
    # where FD still resolves nu_2 + 1, the Green-identity route must agree with it
    res = finite_spectrum(sol(p, 2), 2)
    sign, log_gap = res.minus_one_gap[1]
    fd = res.nu[1] + 1.0
    assert sign == 1 and fd > 0
    assert math.exp(log_gap) == pytest.approx(fd, rel=5e-3)


def test_gap_not_used_for_moderate_p():
    res = finite_spectrum(sol(3, 2), 2)
    assert res.minus_one_gap == {}


def test_orthonormal_and_sturm(spec50):
    assert np.abs(spec50.gram() - np.eye(2)).max() <= 1e-8
    assert spec50.interior_zeros(0) == 0
    assert spec50.interior_zeros(1) == 1
    assert np.all(np.diff(spec50.nu) > 0) and np.all(spec50.nu < 0)


@pytest.mark.parametrize("p,m", [(7, 1), (7, 2), (50, 2)])
def test_rayleigh_quotient(p, m):
    s = sol(p, m)
    res = finite_spectrum(s, m)
    q = potential_fn(s)
    for j in range(m):
        rq = rayleigh_quotient(q, res.s, res.eigenfunctions[j])
        assert rq == pytest.approx(res.nu[j], rel=1e-6)


def test_grid_refinement(spec50):
    fine = finite_spectrum(sol(50, 2), 2, h=H_DEFAULT / 2)
    assert np.abs(fine.nu - spec50.nu).max() <= 1e-5


def test_coarse_flag():
    assert finite_spectrum(sol(50, 2), 2, h=0.05).coarse


def test_no_negative_is_empty():
    res = solve_schrodinger(lambda s: np.zeros_like(s), 0.0, 1.0, 2, h=1e-2)
    assert res.nu.size == 0 and res.eigenfunctions.shape[0] == 0


def test_trend_m1():
    logs = [finite_spectrum(sol(p, 1), 1).minus_one_gap[0] for p in (50, 100, 200)]
    assert all(sg == 1 for sg, _ in logs)
    assert logs[0][1] > logs[1][1] > logs[2][1]


def test_trend_m2():
    nus = [finite_spectrum(sol(p, 2), 2) for p in (50, 100, 200)]
    n1 = [r.nu[0] for r in nus]
    assert n1[0] > n1[1] > n1[2] > -kappa_of_ell() ** 2
    for r in nus:
        assert r.above_minus_one(1) and r.nu[1] < 0


@pytest.mark.parametrize("alpha,p,m", [(0.0, 50, 1), (2.0, 50, 1), (3.0, 50, 2), (1.0, 9, 2)])
def test_henon_side_oracle(alpha, p, m):
    s = sol(p, m, alpha)
    u, _ = to_henon(s)
    lam = henon_side_oracle(u, s.params, m)
    nu = finite_spectrum(s, m)
    assert lam.nu == pytest.approx(((2 + alpha) / 2) ** 2 * nu.nu, rel=1e-3)


def test_limit_spectra():
    b1, b2 = limit_spectrum(1), limit_spectrum(2)
    assert b1.nu[0] == pytest.approx(-1.0, abs=1e-4)
    assert b2.nu[0] == pytest.approx(-kappa_of_ell() ** 2, rel=1e-3)
    assert b1.n_negative == b2.n_negative == 1
    assert b2.nu[0] / b1.nu[0] == pytest.approx(kappa_of_ell() ** 2, rel=1e-4)
    assert eigenfunction_distance(b1, 1) <= 1e-3
    assert eigenfunction_distance(b2, 2) <= 1e-3


def test_kappa_conjugacy():
    assert kappa_rescale_check() <= 1e-12
    k, d = kappa_of_ell(), delta_of_ell(ELL)
    lhs = eta2_limit()(np.array([1.0])) / math.sqrt(k)
    rhs = eta1()(np.array([math.sqrt(8 / d)]))
    assert lhs[0] == pytest.approx(rhs[0], rel=1e-14)


def test_potential_diagnostics():
    d1 = potential_diagnostics(sol(200, 1))
    assert len(d1["bump_t"]) == 1
    assert d1["bump_scaled"][0] == pytest.approx(math.sqrt(8), rel=0.01)
    d2 = potential_diagnostics(sol(200, 2))
    assert len(d2["bump_t"]) == 2
    assert d2["bump_scaled"][0] == pytest.approx(bump_argmax()["g"], rel=0.01)
    assert d2["bump_scaled"][1] == pytest.approx(bump_argmax()["h"], rel=0.02)
    d3 = potential_diagnostics(sol(500, 2))
    assert d3["window_max"] <= 0.5 * d3["sup_fp"]
